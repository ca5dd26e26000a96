//! Decoding univariate multiplicity codes of length `q - 1`: each position
//! `α_b` (`b = 1..q-1`) carries the claimed values `G^{(0)}(α_b), …,
//! G^{(s-1)}(α_b)` of a polynomial of degree at most `d`.
//!
//! [`hermite_interpolate`] handles error-free words. [`bw_decode`] is a
//! Berlekamp–Welch decoder: it looks for an error locator `E` and a
//! polynomial `N = E·G` with
//!
//! ```text
//! H^{(r)}N(α_i) = Σ_{j ≤ r} H^{(j)}E(α_i) · y_{i, r-j}     r < s
//! ```
//!
//! at every position, `deg E ≤ s·t`, `deg N ≤ s·t + d`, where
//! `t = ⌊(s n - d) / 2s⌋` is the decoding radius in positions.

use thiserror::Error;

use crate::field::{Fe, Field};
use crate::linalg::{kernel_vector, solve, Matrix, SolveError};
use crate::mpoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("word has {got} positions, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("values are not consistent with any polynomial of degree <= {0}")]
    Inconsistent(usize),
    #[error("interpolation is underdetermined for degree {0}")]
    Underdetermined(usize),
    #[error("more than {0} positions are in error")]
    TooManyErrors(usize),
    #[error("two polynomials lie within distance {0} of the word")]
    Ambiguous(usize),
}

/// Claimed Hasse derivative profiles at `α_1, …, α_{q-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineWord {
    s: usize,
    values: Vec<Fe>,
}

impl LineWord {
    /// `values[b]` is the `s`-tuple at `α_{b+1}`.
    pub fn new(field: &Field, s: usize, values: Vec<Vec<Fe>>) -> Result<Self, DecodeError> {
        let n = field.order() - 1;
        if values.len() != n {
            return Err(DecodeError::Shape {
                expected: n,
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| v.len() != s) {
            return Err(DecodeError::Shape {
                expected: s,
                got: bad.len(),
            });
        }
        Ok(LineWord {
            s,
            values: values.concat(),
        })
    }

    /// The error-free word of `g`.
    pub fn of_poly(g: &UniPoly, s: usize) -> Self {
        let f = g.field();
        let values = (1..f.order())
            .flat_map(|b| g.hasse_profile(s, f.alpha(b)))
            .collect();
        LineWord { s, values }
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of positions, `q - 1`.
    pub fn len(&self) -> usize {
        self.values.len() / self.s
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The tuple at `α_{b+1}`.
    pub fn position(&self, b: usize) -> &[Fe] {
        &self.values[b * self.s..(b + 1) * self.s]
    }

    pub fn position_mut(&mut self, b: usize) -> &mut [Fe] {
        &mut self.values[b * self.s..(b + 1) * self.s]
    }

    /// Positions where `g` disagrees with the word.
    pub fn distance(&self, g: &UniPoly) -> usize {
        let f = g.field();
        (0..self.len())
            .filter(|&b| g.hasse_profile(self.s, f.alpha(b + 1)) != self.position(b))
            .count()
    }
}

/// Decoding radius `⌊(s(q-1) - d) / 2s⌋`.
pub fn radius(q: usize, s: usize, d: usize) -> usize {
    (s * (q - 1)).saturating_sub(d) / (2 * s)
}

/// The unique `G` with `deg G ≤ d` matching every value of the word.
pub fn hermite_interpolate(
    field: &Field,
    word: &LineWord,
    d: usize,
) -> Result<UniPoly, DecodeError> {
    let s = word.s();
    let mut a = Matrix::zeros(word.len() * s, d + 1);
    let mut rhs = Vec::with_capacity(word.len() * s);
    for b in 0..word.len() {
        let x = field.alpha(b + 1);
        for e in 0..s {
            let row = a.row_mut(b * s + e);
            let mut xp = Fe::ONE;
            for (j, slot) in row.iter_mut().enumerate().skip(e) {
                *slot = field.mul(field.binom(j as u64, e as u64), xp);
                xp = field.mul(xp, x);
            }
            rhs.push(word.position(b)[e]);
        }
    }
    match solve(field, &a, &rhs) {
        Ok(c) => Ok(UniPoly::new(field, c)),
        Err(SolveError::Inconsistent) => Err(DecodeError::Inconsistent(d)),
        Err(SolveError::Underdetermined { .. }) => Err(DecodeError::Underdetermined(d)),
    }
}

/// Finds the polynomial of degree at most `d` within `radius(q, s, d)`
/// positions of the word.
///
/// When `s(q-1) - d` is a multiple of `2s` the code has minimum distance
/// exactly twice the radius, so a word can sit at the radius from two
/// codewords. In that case a candidate at full radius (or a failed solve) is
/// re-checked by decoding every punctured word at radius `t - 1`; a unique
/// candidate is returned and two distinct ones give [`DecodeError::Ambiguous`].
pub fn bw_decode(field: &Field, word: &LineWord, d: usize) -> Result<UniPoly, DecodeError> {
    let s = word.s();
    let n = word.len();
    let t = radius(field.order(), s, d);
    let positions: Vec<usize> = (0..n).collect();
    let boundary = (s * n - d).is_multiple_of(2 * s) && t > 0;
    let first = bw_core(field, word, &positions, d, t).filter(|g| word.distance(g) <= t);
    match first {
        Some(g) if !boundary || word.distance(&g) < t => return Ok(g),
        None if !boundary => return Err(DecodeError::TooManyErrors(t)),
        _ => {}
    }
    let mut found: Vec<UniPoly> = Vec::new();
    for skip in 0..n {
        let kept: Vec<usize> = positions.iter().copied().filter(|&b| b != skip).collect();
        if let Some(g) = bw_core(field, word, &kept, d, t - 1) {
            if word.distance(&g) <= t && !found.contains(&g) {
                found.push(g);
            }
        }
    }
    match found.len() {
        0 => Err(DecodeError::TooManyErrors(t)),
        1 => Ok(found.pop().expect("one candidate")),
        _ => Err(DecodeError::Ambiguous(t)),
    }
}

/// Hermite interpolation, falling back to [`bw_decode`] on inconsistency.
pub fn decode_line(field: &Field, word: &LineWord, d: usize) -> Result<UniPoly, DecodeError> {
    match hermite_interpolate(field, word, d) {
        Ok(g) => Ok(g),
        Err(DecodeError::Inconsistent(_)) => bw_decode(field, word, d),
        Err(e) => Err(e),
    }
}

// Solves the key equations on the given positions with at most `t` errors;
// returns N/E if E divides N and the quotient has degree <= d.
fn bw_core(
    field: &Field,
    word: &LineWord,
    positions: &[usize],
    d: usize,
    t: usize,
) -> Option<UniPoly> {
    let s = word.s();
    let de = s * t;
    let dn = s * t + d;
    let ne = de + 1;
    let cols = ne + dn + 1;
    let mut a = Matrix::zeros(positions.len() * s, cols);
    for (pi, &b) in positions.iter().enumerate() {
        let x = field.alpha(b + 1);
        let y = word.position(b);
        // hasse[j][c] = C(c, j) x^{c-j}
        let maxc = dn.max(de);
        let mut xp = vec![Fe::ONE; maxc + 1];
        for c in 1..=maxc {
            xp[c] = field.mul(xp[c - 1], x);
        }
        let hasse = |j: usize, c: usize| -> Fe {
            if c < j {
                Fe::ZERO
            } else {
                field.mul(field.binom(c as u64, j as u64), xp[c - j])
            }
        };
        for r in 0..s {
            let row = a.row_mut(pi * s + r);
            for (c, cell) in row[..=de].iter_mut().enumerate() {
                let mut acc = Fe::ZERO;
                for j in 0..=r {
                    acc = field.add(acc, field.mul(hasse(j, c), y[r - j]));
                }
                *cell = field.neg(acc);
            }
            for c in 0..=dn {
                row[ne + c] = hasse(r, c);
            }
        }
    }
    let v = kernel_vector(field, &a)?;
    let e = UniPoly::new(field, v[..ne].to_vec());
    let nn = UniPoly::new(field, v[ne..].to_vec());
    let (g, rem) = nn.div_rem(&e)?;
    if !rem.is_zero() || g.degree().is_some_and(|dg| dg > d) {
        return None;
    }
    Some(g)
}
