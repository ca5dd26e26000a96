use crate::field::Fe;
use crate::linalg::{invert, Matrix};
use crate::mpoly::graded_lex;

use super::{CodeError, CodeParams};

/// `k` codeword coordinates `(point, slot)` that determine the polynomial,
/// together with the inverse of the map from coefficients to those
/// coordinates.
///
/// Coordinates are chosen greedily, keeping each one that is independent of
/// those already kept. Points are visited by increasing sum of their digits
/// (then by index), so the first candidates form a lower set of the grid
/// and few of them are rejected.
#[derive(Debug, Clone)]
pub struct InformationSet {
    params: CodeParams,
    coords: Vec<(u64, usize)>,
    inverse: Matrix,
}

/// Point indices ordered by digit sum, then index.
fn by_digit_sum(q: u64, m: usize) -> impl Iterator<Item = u64> {
    (0..=m as u64 * (q - 1)).flat_map(move |sum| {
        let mut level = Vec::new();
        let mut digits = vec![0u64; m];
        collect_level(q, sum, &mut digits, m, &mut level);
        level.sort_unstable();
        level
    })
}

fn collect_level(q: u64, rest: u64, digits: &mut [u64], t: usize, out: &mut Vec<u64>) {
    if t == 0 {
        if rest == 0 {
            out.push(digits.iter().rev().fold(0, |acc, &x| acc * q + x));
        }
        return;
    }
    if rest > t as u64 * (q - 1) {
        return;
    }
    for x in 0..q.min(rest + 1) {
        digits[t - 1] = x;
        collect_level(q, rest - x, digits, t - 1, out);
    }
}

impl InformationSet {
    pub fn new(params: &CodeParams) -> Result<Self, CodeError> {
        let f = params.field().clone();
        let k = usize::try_from(params.k()).map_err(|_| CodeError::TooLarge)?;
        let monos = graded_lex(params.m(), params.d());
        let mut coords = Vec::with_capacity(k);
        let mut rows: Vec<Vec<Fe>> = Vec::with_capacity(k);
        // reduced[i] has a leading one at pivots[i]
        let mut reduced: Vec<Vec<Fe>> = Vec::with_capacity(k);
        let mut pivots: Vec<usize> = Vec::with_capacity(k);
        'points: for i in by_digit_sum(params.q() as u64, params.m()) {
            let point = params.point(i)?;
            for (slot, v) in params.derivative_orders().iter().enumerate() {
                let row: Vec<Fe> = monos
                    .iter()
                    .map(|j| {
                        if !j.dominates(v.exponents()) {
                            return Fe::ZERO;
                        }
                        j.exponents().iter().zip(v.exponents()).zip(&point).fold(
                            Fe::ONE,
                            |acc, ((&je, &ve), &x)| {
                                let c = f.binom(je as u64, ve as u64);
                                f.mul(acc, f.mul(c, f.pow(x, (je - ve) as u64)))
                            },
                        )
                    })
                    .collect();
                let mut r = row.clone();
                for (b, &pc) in reduced.iter().zip(&pivots) {
                    let c = r[pc];
                    if !c.is_zero() {
                        for (x, &y) in r.iter_mut().zip(b) {
                            *x = f.sub(*x, f.mul(c, y));
                        }
                    }
                }
                let Some(pc) = r.iter().position(|x| !x.is_zero()) else {
                    continue;
                };
                let inv = f.inv(r[pc]).expect("nonzero");
                r.iter_mut().for_each(|x| *x = f.mul(*x, inv));
                reduced.push(r);
                pivots.push(pc);
                rows.push(row);
                coords.push((i, slot));
                if coords.len() == k {
                    break 'points;
                }
            }
        }
        if coords.len() < k {
            return Err(CodeError::Rank);
        }
        let inverse = invert(&f, &Matrix::from_rows(&rows)).ok_or(CodeError::Rank)?;
        Ok(InformationSet {
            params: params.clone(),
            coords,
            inverse,
        })
    }

    /// The chosen `(point index, slot)` pairs.
    pub fn coords(&self) -> &[(u64, usize)] {
        &self.coords
    }

    /// Distinct point indices that must be read, ascending.
    pub fn points(&self) -> Vec<u64> {
        let mut pts: Vec<u64> = self.coords.iter().map(|c| c.0).collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    /// Coefficients (graded-lex) of the unique polynomial taking `values`
    /// at the chosen coordinates.
    pub fn solve(&self, values: &[Fe]) -> Result<Vec<Fe>, CodeError> {
        if values.len() != self.coords.len() {
            return Err(CodeError::Length {
                expected: self.coords.len() as u64,
                got: values.len() as u64,
            });
        }
        Ok(self.inverse.mul_vec(self.params.field(), values))
    }

    /// Reads the chosen coordinates out of a tuple lookup.
    pub fn gather<'a, L>(&self, mut lookup: L) -> Vec<Fe>
    where
        L: FnMut(u64) -> &'a [Fe],
    {
        self.coords
            .iter()
            .map(|&(i, slot)| lookup(i)[slot])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::mpoly::MultiPoly;
    use crate::multcode::{encode, encode_message};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_polynomial_from_its_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (q, m, s, d) in [
            (4u64, 3, 2, 5),
            (16, 2, 2, 29),
            (5, 1, 2, 7),
            (16, 2, 1, 14),
        ] {
            let f = Field::of_order(q).unwrap();
            let p = CodeParams::new(&f, m, s, d).unwrap();
            let set = InformationSet::new(&p).unwrap();
            assert_eq!(set.coords().len() as u64, p.k());
            assert!(set.points().len() as u64 * p.sigma() as u64 >= p.k());
            let poly = MultiPoly::random(&f, m, d, &mut rng);
            let cw = encode(&p, &poly).unwrap();
            let coeffs = set.solve(&set.gather(|i| cw.symbol(i))).unwrap();
            assert_eq!(coeffs, poly.to_graded_lex(d).unwrap());
        }
    }

    #[test]
    fn systematic_placement() {
        let f = Field::new(2, 2).unwrap();
        let p = CodeParams::new(&f, 3, 2, 5).unwrap();
        let set = InformationSet::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let msg: Vec<Fe> = (0..p.k()).map(|_| f.random(&mut rng)).collect();
        let cw = encode_message(&p, &set.solve(&msg).unwrap()).unwrap();
        assert_eq!(set.gather(|i| cw.symbol(i)), msg);
    }

    #[test]
    fn lower_set_without_multiplicities() {
        let order: Vec<u64> = by_digit_sum(3, 2).collect();
        assert_eq!(order, vec![0, 1, 3, 2, 4, 6, 5, 7, 8]);
        let f = Field::gf256();
        let p = CodeParams::new(&f, 2, 1, 40).unwrap();
        let set = InformationSet::new(&p).unwrap();
        let expected: Vec<u64> = by_digit_sum(256, 2).take(p.k() as usize).collect();
        let got: Vec<u64> = set.coords().iter().map(|c| c.0).collect();
        assert_eq!(got, expected);
        assert!(got.iter().all(|&i| i % 256 + i / 256 <= 40));
    }
}
