//! Multiplicity codes: the encoder `F ↦ (F^{(v)}(P))_{P, |v|<s}`, the
//! geometry of `GF(q)^m`, and the split of a codeword into one share per
//! hyperplane `x_m = α_ℓ`.

mod geometry;
mod infoset;
mod params;
mod table;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::Fe;
use crate::mpoly::{power_table, MultiPoly, PolyError};

pub use infoset::InformationSet;
pub use params::{binomial, CodeParams, ParamError};
pub use table::{round_sig, scheme_table, standard_rows, SchemeRow};

/// The `σ` Hasse derivative values stored at one point, in the order of
/// [`CodeParams::derivative_orders`].
pub type EvalTuple = Vec<Fe>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("index {index} out of range (size {n})")]
    IndexOutOfRange { index: u64, n: u64 },
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("value {0} is not a field element")]
    NotInField(u16),
    #[error("direction is the zero vector")]
    ZeroDirection,
    #[error("polynomial has {got} variables, code has {expected}")]
    WrongVariables { expected: usize, got: usize },
    #[error("polynomial of degree {degree} exceeds bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("expected {expected} symbols, got {got}")]
    Length { expected: u64, got: u64 },
    #[error("shares do not form a complete codeword")]
    BadShares,
    #[error("codeword is too long to materialise")]
    TooLarge,
    #[error("no information set found")]
    Rank,
}

impl From<PolyError> for CodeError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::DimensionMismatch { expected, got } => {
                CodeError::Dimension { expected, got }
            }
            PolyError::ZeroDirection => CodeError::ZeroDirection,
            PolyError::DegreeTooLarge { degree, bound } => {
                CodeError::DegreeTooLarge { degree, bound }
            }
        }
    }
}

/// `n` evaluation tuples in canonical point order, stored flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    params: CodeParams,
    symbols: Vec<Fe>,
}

impl Codeword {
    pub fn from_symbols(params: &CodeParams, symbols: Vec<Fe>) -> Result<Self, CodeError> {
        let expected = params.n() * params.sigma() as u64;
        if symbols.len() as u64 != expected {
            return Err(CodeError::Length {
                expected,
                got: symbols.len() as u64,
            });
        }
        if let Some(&bad) = symbols.iter().find(|&&x| !params.field().contains(x)) {
            return Err(CodeError::NotInField(bad.value()));
        }
        Ok(Codeword {
            params: params.clone(),
            symbols,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    /// Evaluation tuple at the point with index `i`.
    pub fn symbol(&self, i: u64) -> &[Fe] {
        let sigma = self.params.sigma();
        let start = i as usize * sigma;
        &self.symbols[start..start + sigma]
    }

    pub fn symbols(&self) -> &[Fe] {
        &self.symbols
    }

    /// Number of positions whose tuples differ.
    pub fn distance(&self, other: &Codeword) -> u64 {
        let sigma = self.params.sigma();
        self.symbols
            .chunks(sigma)
            .zip(other.symbols.chunks(sigma))
            .filter(|(a, b)| a != b)
            .count() as u64
    }

    /// Number of nonzero positions.
    pub fn weight(&self) -> u64 {
        self.symbols
            .chunks(self.params.sigma())
            .filter(|t| t.iter().any(|x| !x.is_zero()))
            .count() as u64
    }
}

/// The part of a codeword stored on server `ℓ`: the tuples of all points of
/// `H_ℓ` in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Share {
    params: CodeParams,
    hyperplane: usize,
    symbols: Vec<Fe>,
}

impl Share {
    pub fn new(
        params: &CodeParams,
        hyperplane: usize,
        symbols: Vec<Fe>,
    ) -> Result<Self, CodeError> {
        if hyperplane >= params.q() {
            return Err(CodeError::IndexOutOfRange {
                index: hyperplane as u64,
                n: params.q() as u64,
            });
        }
        let expected = params.share_len() * params.sigma() as u64;
        if symbols.len() as u64 != expected {
            return Err(CodeError::Length {
                expected,
                got: symbols.len() as u64,
            });
        }
        if let Some(&bad) = symbols.iter().find(|&&x| !params.field().contains(x)) {
            return Err(CodeError::NotInField(bad.value()));
        }
        Ok(Share {
            params: params.clone(),
            hyperplane,
            symbols,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn hyperplane(&self) -> usize {
        self.hyperplane
    }

    pub fn symbols(&self) -> &[Fe] {
        &self.symbols
    }

    /// Tuple at local position `local`.
    pub fn tuple(&self, local: u64) -> &[Fe] {
        let sigma = self.params.sigma();
        let start = local as usize * sigma;
        &self.symbols[start..start + sigma]
    }

    /// Tuple at the point of `H_ℓ` whose first `m-1` coordinates are `xs`.
    pub fn lookup(&self, xs: &[Fe]) -> Result<&[Fe], CodeError> {
        let m = self.params.m();
        if xs.len() != m - 1 {
            return Err(CodeError::Dimension {
                expected: m - 1,
                got: xs.len(),
            });
        }
        let mut point = xs.to_vec();
        point.push(self.params.field().alpha(self.hyperplane));
        let i = self.params.index(&point)?;
        Ok(self.tuple(self.params.local_index(i)))
    }
}

/// `ev^s(F)`; fails if `F` has the wrong number of variables or degree
/// above `d`.
pub fn encode(params: &CodeParams, poly: &MultiPoly) -> Result<Codeword, CodeError> {
    if poly.nvars() != params.m() {
        return Err(CodeError::WrongVariables {
            expected: params.m(),
            got: poly.nvars(),
        });
    }
    if let Some(degree) = poly.degree().filter(|&g| g > params.d()) {
        return Err(CodeError::DegreeTooLarge {
            degree,
            bound: params.d(),
        });
    }
    let n = usize::try_from(params.n()).map_err(|_| CodeError::TooLarge)?;
    let sigma = params.sigma();
    let len = n.checked_mul(sigma).ok_or(CodeError::TooLarge)?;
    let derivs = params
        .derivative_orders()
        .iter()
        .map(|v| poly.hasse_derivative(v.exponents()))
        .collect::<Result<Vec<_>, _>>()?;
    let max_exp = poly.degree().unwrap_or(0);
    let mut symbols = vec![Fe::ZERO; len];
    if !poly.is_zero() {
        symbols
            .par_chunks_mut(sigma)
            .enumerate()
            .for_each(|(i, out)| {
                let point = params.point(i as u64).expect("index below n");
                let powers = power_table(params.field(), &point, max_exp);
                for (slot, dv) in out.iter_mut().zip(&derivs) {
                    *slot = dv.eval_with_powers(&powers);
                }
            });
    }
    Ok(Codeword {
        params: params.clone(),
        symbols,
    })
}

/// Encodes the message whose symbols are the coefficients of `F` in
/// graded-lex monomial order (shorter messages are zero-padded).
pub fn encode_message(params: &CodeParams, message: &[Fe]) -> Result<Codeword, CodeError> {
    if message.len() as u64 > params.k() {
        return Err(CodeError::Length {
            expected: params.k(),
            got: message.len() as u64,
        });
    }
    let mut coeffs = message.to_vec();
    coeffs.resize(params.k() as usize, Fe::ZERO);
    let poly = MultiPoly::from_graded_lex(params.field(), params.m(), params.d(), &coeffs)?;
    encode(params, &poly)
}

/// Splits `cw` into the `q` shares `c_{H_0}, …, c_{H_{q-1}}`.
pub fn partition(cw: &Codeword) -> Vec<Share> {
    let p = &cw.params;
    let block = p.share_len() as usize * p.sigma();
    cw.symbols
        .chunks(block)
        .enumerate()
        .map(|(l, chunk)| Share {
            params: p.clone(),
            hyperplane: l,
            symbols: chunk.to_vec(),
        })
        .collect()
}

/// Inverse of [`partition`]; shares may be given in any order.
pub fn concatenate(shares: &[Share]) -> Result<Codeword, CodeError> {
    let first = shares.first().ok_or(CodeError::BadShares)?;
    let p = &first.params;
    if shares.len() != p.q() || shares.iter().any(|s| &s.params != p) {
        return Err(CodeError::BadShares);
    }
    let mut ordered: Vec<&Share> = shares.iter().collect();
    ordered.sort_by_key(|s| s.hyperplane);
    if ordered.iter().enumerate().any(|(l, s)| s.hyperplane != l) {
        return Err(CodeError::BadShares);
    }
    Ok(Codeword {
        params: p.clone(),
        symbols: ordered
            .iter()
            .flat_map(|s| s.symbols.iter().copied())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn zero_polynomial_gives_zero_codeword() {
        let p = CodeParams::new(&Field::gf16(), 2, 2, 29).unwrap();
        let cw = encode(&p, &MultiPoly::zero(p.field(), 2)).unwrap();
        assert_eq!(cw.weight(), 0);
        assert_eq!(cw.symbols().len(), 256 * 3);
    }

    #[test]
    fn tuples_match_derivative_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (q, m, s, d) in [(4u64, 1, 2, 4), (4, 3, 2, 5), (5, 2, 3, 7), (16, 2, 2, 29)] {
            let f = Field::of_order(q).unwrap();
            let p = CodeParams::new(&f, m, s, d).unwrap();
            let poly = MultiPoly::random(&f, m, d, &mut rng);
            let cw = encode(&p, &poly).unwrap();
            for i in 0..p.n() {
                let pt = p.point(i).unwrap();
                let expect: Vec<Fe> = p
                    .derivative_orders()
                    .iter()
                    .map(|v| {
                        poly.hasse_derivative(v.exponents())
                            .unwrap()
                            .eval(&pt)
                            .unwrap()
                    })
                    .collect();
                assert_eq!(cw.symbol(i), &expect[..]);
            }
        }
    }

    #[test]
    fn order_one_is_reed_muller() {
        let f = Field::new(7, 1).unwrap();
        let p = CodeParams::new(&f, 2, 1, 5).unwrap();
        let poly = MultiPoly::random(&f, 2, 5, &mut ChaCha8Rng::seed_from_u64(22));
        let cw = encode(&p, &poly).unwrap();
        for i in 0..p.n() {
            assert_eq!(cw.symbol(i), &[poly.eval(&p.point(i).unwrap()).unwrap()]);
        }
    }

    #[test]
    fn rejects_high_degree() {
        let f = Field::new(5, 1).unwrap();
        let p = CodeParams::new(&f, 2, 1, 3).unwrap();
        let x4 = MultiPoly::monomial(&f, &[4, 0], Fe::ONE);
        assert_eq!(
            encode(&p, &x4),
            Err(CodeError::DegreeTooLarge {
                degree: 4,
                bound: 3
            })
        );
        let y = MultiPoly::var(&f, 3, 0);
        assert!(matches!(
            encode(&p, &y),
            Err(CodeError::WrongVariables { .. })
        ));
    }

    #[test]
    fn linearity() {
        let f = Field::new(3, 2).unwrap();
        let p = CodeParams::new(&f, 2, 2, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let a = MultiPoly::random(&f, 2, 9, &mut rng);
            let b = MultiPoly::random(&f, 2, 9, &mut rng);
            let (x, y) = (f.random(&mut rng), f.random(&mut rng));
            let lhs = encode(&p, &a.scale(x).add(&b.scale(y))).unwrap();
            let ea = encode(&p, &a).unwrap();
            let eb = encode(&p, &b).unwrap();
            let rhs: Vec<Fe> = ea
                .symbols()
                .iter()
                .zip(eb.symbols())
                .map(|(&u, &v)| f.add(f.mul(x, u), f.mul(y, v)))
                .collect();
            assert_eq!(lhs.symbols(), &rhs[..]);
        }
    }

    #[test]
    fn injective_on_small_line_code() {
        // q=4, m=1, s=2, d=5: 4^6 messages, all codewords distinct
        let f = Field::new(2, 2).unwrap();
        let p = CodeParams::new(&f, 1, 2, 5).unwrap();
        let mut seen = HashSet::new();
        for code in 0..4u32.pow(6) {
            let msg: Vec<Fe> = (0..6)
                .map(|i| f.alpha(((code >> (2 * i)) & 3) as usize))
                .collect();
            let cw = encode_message(&p, &msg).unwrap();
            assert!(seen.insert(cw.symbols().to_vec()));
        }
    }

    #[test]
    fn partition_round_trip() {
        let f = Field::new(2, 2).unwrap();
        let p = CodeParams::new(&f, 3, 2, 5).unwrap();
        let poly = MultiPoly::random(&f, 3, 5, &mut ChaCha8Rng::seed_from_u64(24));
        let cw = encode(&p, &poly).unwrap();
        let mut shares = partition(&cw);
        assert_eq!(shares.len(), 4);
        for (l, share) in shares.iter().enumerate() {
            assert_eq!(share.hyperplane(), l);
            assert_eq!(share.symbols().len(), 16 * 4);
            for local in 0..16 {
                let i = p.global_index(l, local);
                assert_eq!(share.tuple(local), cw.symbol(i));
                let pt = p.point(i).unwrap();
                assert_eq!(share.lookup(&pt[..2]).unwrap(), cw.symbol(i));
            }
        }
        shares.reverse();
        assert_eq!(concatenate(&shares).unwrap(), cw);
        shares.pop();
        assert_eq!(concatenate(&shares), Err(CodeError::BadShares));
    }
}
