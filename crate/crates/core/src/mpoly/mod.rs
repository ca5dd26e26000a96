//! Multivariate polynomials over GF(q) and their Hasse derivatives.
//!
//! The `i`-th Hasse derivative of `F` is the coefficient of `Z^i` in
//! `F(X + Z)`, i.e. `Σ_{j ≫ i} f_j C(j, i) X^{j-i}` with the binomial taken
//! componentwise. Restricting `F` to the line `P + T·V` ties the univariate
//! coefficients and Hasse derivatives of the restriction to the multivariate
//! Hasse derivatives at `P`:
//!
//! ```text
//! coeff_i(F|_{P,V})            = Σ_{|j| = i} F^{(j)}(P) V^j
//! (F|_{P,V})^{(i)}(α)          = Σ_{|j| = i} F^{(j)}(P + αV) V^j
//! ```

mod uni;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::field::{Fe, Field};

pub use uni::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("line direction is the zero vector")]
    ZeroDirection,
    #[error("polynomial of degree {degree} exceeds bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
}

/// Exponent vector `j = (j_1, …, j_m)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{:?}", self.0)
    }
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|j|`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `j ≫ i`, componentwise domination.
    pub fn dominates(&self, other: &[u32]) -> bool {
        self.0.iter().zip(other).all(|(a, b)| a >= b)
    }
}

/// All exponent vectors of `m` variables with total degree exactly `deg`, in
/// descending lexicographic order (`X_1^deg` first, `X_m^deg` last).
pub fn monomials_of_degree(m: usize, deg: usize) -> Vec<Monomial> {
    fn rec(m: usize, deg: usize, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if m == 1 {
            prefix.push(deg as u32);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=deg).rev() {
            prefix.push(first as u32);
            rec(m - 1, deg - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if deg == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    rec(m, deg, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Graded-lexicographic enumeration of all monomials of total degree at most
/// `max_deg`: ascending total degree, then descending lex within a degree.
/// This order fixes how message symbols map onto coefficients and how the
/// coordinates of a codeword symbol are laid out.
pub fn graded_lex(m: usize, max_deg: usize) -> Vec<Monomial> {
    (0..=max_deg)
        .flat_map(|d| monomials_of_degree(m, d))
        .collect()
}

/// Multivariate polynomial in `m` variables; zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: Field,
    m: usize,
    terms: BTreeMap<Monomial, Fe>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl MultiPoly {
    pub fn zero(field: &Field, m: usize) -> Self {
        MultiPoly {
            field: field.clone(),
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, m: usize, c: Fe) -> Self {
        let mut p = Self::zero(field, m);
        p.add_term(Monomial(vec![0; m]), c);
        p
    }

    /// `c · X^exponents`
    pub fn monomial(field: &Field, exponents: &[u32], c: Fe) -> Self {
        let mut p = Self::zero(field, exponents.len());
        p.add_term(Monomial(exponents.to_vec()), c);
        p
    }

    /// The variable `X_{var+1}` in `m` variables.
    pub fn var(field: &Field, m: usize, var: usize) -> Self {
        let mut e = vec![0; m];
        e[var] = 1;
        Self::monomial(field, &e, Fe::ONE)
    }

    pub fn from_terms<I>(field: &Field, m: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Fe)>,
    {
        let mut p = Self::zero(field, m);
        for (e, c) in terms {
            if e.len() != m {
                return Err(PolyError::DimensionMismatch {
                    expected: m,
                    got: e.len(),
                });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    /// Builds a polynomial from coefficients listed in graded-lex order;
    /// missing trailing coefficients are zero.
    pub fn from_graded_lex(
        field: &Field,
        m: usize,
        max_deg: usize,
        coeffs: &[Fe],
    ) -> Result<Self, PolyError> {
        let monos = graded_lex(m, max_deg);
        if coeffs.len() > monos.len() {
            return Err(PolyError::DimensionMismatch {
                expected: monos.len(),
                got: coeffs.len(),
            });
        }
        let mut p = Self::zero(field, m);
        for (mono, &c) in monos.into_iter().zip(coeffs) {
            p.add_term(mono, c);
        }
        Ok(p)
    }

    /// Coefficients in graded-lex order over all monomials of degree
    /// `<= max_deg`.
    pub fn to_graded_lex(&self, max_deg: usize) -> Result<Vec<Fe>, PolyError> {
        if let Some(deg) = self.degree() {
            if deg > max_deg {
                return Err(PolyError::DegreeTooLarge {
                    degree: deg,
                    bound: max_deg,
                });
            }
        }
        Ok(graded_lex(self.m, max_deg)
            .iter()
            .map(|mono| self.coeff(mono))
            .collect())
    }

    /// Uniformly random polynomial of degree at most `max_deg`.
    pub fn random<R: Rng + ?Sized>(field: &Field, m: usize, max_deg: usize, rng: &mut R) -> Self {
        let mut p = Self::zero(field, m);
        for mono in graded_lex(m, max_deg) {
            p.add_term(mono, field.random(rng));
        }
        p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn coeff(&self, mono: &Monomial) -> Fe {
        self.terms.get(mono).copied().unwrap_or(Fe::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Fe)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, mono: Monomial, c: Fe) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = self.field.add(*slot.get(), c);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    fn check_len(&self, got: usize) -> Result<(), PolyError> {
        if got == self.m {
            Ok(())
        } else {
            Err(PolyError::DimensionMismatch {
                expected: self.m,
                got,
            })
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.m, other.m);
        let mut out = self.clone();
        for (mono, c) in other.terms() {
            out.add_term(mono.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.scale(self.field.neg(Fe::ONE)))
    }

    pub fn scale(&self, k: Fe) -> MultiPoly {
        let f = &self.field;
        let mut out = Self::zero(f, self.m);
        for (mono, c) in self.terms() {
            out.add_term(mono.clone(), f.mul(c, k));
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.m, other.m);
        let f = &self.field;
        let mut out = Self::zero(f, self.m);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let e = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                out.add_term(Monomial(e), f.mul(ca, cb));
            }
        }
        out
    }

    /// `F^{(i)} = Σ_{j ≫ i} f_j C(j, i) X^{j - i}`.
    pub fn hasse_derivative(&self, i: &[u32]) -> Result<MultiPoly, PolyError> {
        self.check_len(i.len())?;
        let f = &self.field;
        let mut out = Self::zero(f, self.m);
        for (mono, c) in self.terms() {
            if !mono.dominates(i) {
                continue;
            }
            let scalar = mono.0.iter().zip(i).fold(Fe::ONE, |acc, (&j, &k)| {
                f.mul(acc, f.binom(j as u64, k as u64))
            });
            if scalar.is_zero() {
                continue;
            }
            let e = mono.0.iter().zip(i).map(|(j, k)| j - k).collect();
            out.add_term(Monomial(e), f.mul(c, scalar));
        }
        Ok(out)
    }

    /// `F(P)`.
    pub fn eval(&self, point: &[Fe]) -> Result<Fe, PolyError> {
        self.check_len(point.len())?;
        let f = &self.field;
        let max_exp = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let powers = power_table(f, point, max_exp);
        Ok(self.eval_with_powers(&powers))
    }

    /// Evaluation against precomputed `powers[var][exp]`.
    pub(crate) fn eval_with_powers(&self, powers: &[Vec<Fe>]) -> Fe {
        let f = &self.field;
        self.terms.iter().fold(Fe::ZERO, |acc, (mono, &c)| {
            let v = mono
                .0
                .iter()
                .enumerate()
                .fold(c, |t, (var, &e)| f.mul(t, powers[var][e as usize]));
            f.add(acc, v)
        })
    }

    /// `F|_{P,V}(T) = F(P + T·V)`, by substitution and exact re-expansion.
    pub fn restrict_to_line(&self, p: &[Fe], v: &[Fe]) -> Result<UniPoly, PolyError> {
        self.check_len(p.len())?;
        self.check_len(v.len())?;
        if v.iter().all(|x| x.is_zero()) {
            return Err(PolyError::ZeroDirection);
        }
        let f = &self.field;
        let max_exp = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        // lin_pows[var][e] = (p_var + v_var T)^e
        let lin_pows: Vec<Vec<UniPoly>> = (0..self.m)
            .map(|var| {
                let lin = UniPoly::new(f, vec![p[var], v[var]]);
                let mut acc = vec![UniPoly::constant(f, Fe::ONE)];
                for e in 1..=max_exp {
                    let next = acc[e - 1].mul(&lin);
                    acc.push(next);
                }
                acc
            })
            .collect();
        let mut out = vec![Fe::ZERO; self.degree().unwrap_or(0) + 1];
        for (mono, c) in self.terms() {
            let term = mono
                .0
                .iter()
                .enumerate()
                .fold(UniPoly::constant(f, c), |t, (var, &e)| {
                    t.mul(&lin_pows[var][e as usize])
                });
            for (k, &tc) in term.coeffs().iter().enumerate() {
                out[k] = f.add(out[k], tc);
            }
        }
        Ok(UniPoly::new(f, out))
    }

    /// `Σ_{|j| = i} F^{(j)}(P) V^j`, which equals the coefficient of `T^i`
    /// in `F|_{P,V}`.
    pub fn line_coeff_identity(&self, p: &[Fe], v: &[Fe], i: usize) -> Result<Fe, PolyError> {
        self.directional_sum(p, v, i)
    }

    /// `Σ_{|j| = i} F^{(j)}(P + αV) V^j`, which equals the `i`-th Hasse
    /// derivative of `F|_{P,V}` at `α`.
    pub fn line_hasse_identity(
        &self,
        p: &[Fe],
        v: &[Fe],
        i: usize,
        alpha: Fe,
    ) -> Result<Fe, PolyError> {
        self.check_len(p.len())?;
        self.check_len(v.len())?;
        let f = &self.field;
        let shifted: Vec<Fe> = p
            .iter()
            .zip(v)
            .map(|(&a, &b)| f.add(a, f.mul(alpha, b)))
            .collect();
        self.directional_sum(&shifted, v, i)
    }

    fn directional_sum(&self, p: &[Fe], v: &[Fe], i: usize) -> Result<Fe, PolyError> {
        self.check_len(p.len())?;
        self.check_len(v.len())?;
        if v.iter().all(|x| x.is_zero()) {
            return Err(PolyError::ZeroDirection);
        }
        let f = &self.field;
        let mut acc = Fe::ZERO;
        for j in monomials_of_degree(self.m, i) {
            let dj = self.hasse_derivative(j.exponents())?.eval(p)?;
            acc = f.add(acc, f.mul(dj, monomial_value(f, j.exponents(), v)));
        }
        Ok(acc)
    }
}

/// `powers[var][e] = point[var]^e` for `e <= max_exp`.
pub(crate) fn power_table(f: &Field, point: &[Fe], max_exp: usize) -> Vec<Vec<Fe>> {
    point
        .iter()
        .map(|&x| {
            let mut row = Vec::with_capacity(max_exp + 1);
            let mut acc = Fe::ONE;
            for _ in 0..=max_exp {
                row.push(acc);
                acc = f.mul(acc, x);
            }
            row
        })
        .collect()
}

/// `V^j = Π_t v_t^{j_t}`.
pub fn monomial_value(f: &Field, exponents: &[u32], v: &[Fe]) -> Fe {
    exponents
        .iter()
        .zip(v)
        .fold(Fe::ONE, |acc, (&e, &x)| f.mul(acc, f.pow(x, e as u64)))
}
