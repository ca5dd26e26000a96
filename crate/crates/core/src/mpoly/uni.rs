use std::fmt;

use crate::field::{Fe, Field};

/// Dense univariate polynomial over GF(q), lowest degree first. The
/// coefficient list never ends in a zero.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly{:?}", self.coeffs)
    }
}

impl UniPoly {
    pub fn new(field: &Field, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &Field) -> Self {
        UniPoly::new(field, Vec::new())
    }

    pub fn constant(field: &Field, c: Fe) -> Self {
        UniPoly::new(field, vec![c])
    }

    /// `c · T^k`
    pub fn monomial(field: &Field, k: usize, c: Fe) -> Self {
        let mut coeffs = vec![Fe::ZERO; k + 1];
        coeffs[k] = c;
        UniPoly::new(field, coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    /// Coefficient of `T^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        UniPoly::new(f, c)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| f.sub(self.coeff(i), other.coeff(i)))
            .collect();
        UniPoly::new(f, c)
    }

    pub fn scale(&self, k: Fe) -> UniPoly {
        let f = &self.field;
        UniPoly::new(f, self.coeffs.iter().map(|&c| f.mul(c, k)).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(f);
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(f, out)
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, divisor: &UniPoly) -> Option<(UniPoly, UniPoly)> {
        let f = &self.field;
        let dd = divisor.degree()?;
        let lead_inv = f.inv(divisor.coeffs[dd]).ok()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((UniPoly::zero(f), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(rem[k + dd], lead_inv);
            quot[k] = c;
            if c.is_zero() {
                continue;
            }
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = f.sub(rem[k + i], f.mul(c, b));
            }
        }
        rem.truncate(dd);
        Some((UniPoly::new(f, quot), UniPoly::new(f, rem)))
    }

    /// The k-th Hasse derivative: `Σ_j C(j, k) c_j T^{j-k}`.
    pub fn hasse(&self, k: usize) -> UniPoly {
        let f = &self.field;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(k)
            .map(|(j, &cj)| f.mul(cj, f.binom(j as u64, k as u64)))
            .collect();
        UniPoly::new(f, c)
    }

    /// `H^{(k)} self (x)` without materialising the derivative.
    pub fn hasse_eval(&self, k: usize, x: Fe) -> Fe {
        let f = &self.field;
        let mut acc = Fe::ZERO;
        let mut xp = Fe::ONE;
        for (j, &cj) in self.coeffs.iter().enumerate().skip(k) {
            if !cj.is_zero() {
                acc = f.add(acc, f.mul(f.mul(cj, f.binom(j as u64, k as u64)), xp));
            }
            xp = f.mul(xp, x);
        }
        acc
    }

    /// `(H^{(0)} self (x), …, H^{(s-1)} self (x))`
    pub fn hasse_profile(&self, s: usize, x: Fe) -> Vec<Fe> {
        (0..s).map(|k| self.hasse_eval(k, x)).collect()
    }
}
