//! Enumeration of `GF(q)^m`, the hyperplanes `H_ℓ = {x : x_m = α_ℓ}` and
//! line directions.
//!
//! Point `P` has index `Σ_t x_t q^{t-1}` (first coordinate fastest), so every
//! hyperplane is one contiguous block of `q^{m-1}` indices. A direction class
//! is represented by the vector whose last nonzero coordinate is one. Classes
//! with `u_m = 1` (the transversal ones) come first, in the index order of
//! their first `m-1` coordinates; the remaining classes follow grouped by the
//! position of their last nonzero coordinate, from high to low.

use crate::field::Fe;

use super::{CodeError, CodeParams};

impl CodeParams {
    /// The point with canonical index `i`.
    pub fn point(&self, i: u64) -> Result<Vec<Fe>, CodeError> {
        if i >= self.n() {
            return Err(CodeError::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(self.digits(i, self.m()))
    }

    /// Inverse of [`CodeParams::point`].
    pub fn index(&self, point: &[Fe]) -> Result<u64, CodeError> {
        if point.len() != self.m() {
            return Err(CodeError::Dimension {
                expected: self.m(),
                got: point.len(),
            });
        }
        self.undigits(point)
    }

    /// Hyperplane containing the point with index `i`.
    pub fn hyperplane_of(&self, i: u64) -> usize {
        (i / self.share_len()) as usize
    }

    /// Position of point `i` inside its hyperplane's share.
    pub fn local_index(&self, i: u64) -> u64 {
        i % self.share_len()
    }

    /// Global index of the point at local position `local` of `H_ℓ`.
    pub fn global_index(&self, hyperplane: usize, local: u64) -> u64 {
        hyperplane as u64 * self.share_len() + local
    }

    /// Number of direction classes `U` with `u_m ≠ 0`, i.e. `q^{m-1}`.
    pub fn transversal_count(&self) -> u64 {
        self.share_len()
    }

    /// Number of all direction classes, `(q^m - 1)/(q - 1)`.
    pub fn direction_class_count(&self) -> u64 {
        (self.n() - 1) / (self.q() as u64 - 1)
    }

    /// Normalised representative of direction class `c`.
    pub fn direction(&self, c: u64) -> Result<Vec<Fe>, CodeError> {
        let total = self.direction_class_count();
        if c >= total {
            return Err(CodeError::IndexOutOfRange { index: c, n: total });
        }
        let q = self.q() as u64;
        let mut offset = 0;
        for lead in (0..self.m()).rev() {
            let block = q.pow(lead as u32);
            if c < offset + block {
                let mut v = self.digits(c - offset, lead);
                v.push(Fe::ONE);
                v.resize(self.m(), Fe::ZERO);
                return Ok(v);
            }
            offset += block;
        }
        unreachable!("class index checked against total")
    }

    /// Class index of a nonzero direction (any scalar multiple).
    pub fn direction_class(&self, v: &[Fe]) -> Result<u64, CodeError> {
        if v.len() != self.m() {
            return Err(CodeError::Dimension {
                expected: self.m(),
                got: v.len(),
            });
        }
        let f = self.field();
        let lead = v
            .iter()
            .rposition(|x| !x.is_zero())
            .ok_or(CodeError::ZeroDirection)?;
        let inv = f.inv(v[lead]).map_err(|_| CodeError::ZeroDirection)?;
        let normal: Vec<Fe> = v[..lead].iter().map(|&x| f.mul(x, inv)).collect();
        let q = self.q() as u64;
        let offset: u64 = (lead + 1..self.m()).map(|t| q.pow(t as u32)).sum();
        Ok(offset + self.undigits(&normal)?)
    }

    /// `P + α·U`
    pub fn line_point(&self, p: &[Fe], u: &[Fe], alpha: Fe) -> Vec<Fe> {
        let f = self.field();
        p.iter()
            .zip(u)
            .map(|(&a, &b)| f.add(a, f.mul(alpha, b)))
            .collect()
    }

    fn digits(&self, mut i: u64, len: usize) -> Vec<Fe> {
        let q = self.q() as u64;
        let f = self.field();
        (0..len)
            .map(|_| {
                let x = f.alpha((i % q) as usize);
                i /= q;
                x
            })
            .collect()
    }

    fn undigits(&self, xs: &[Fe]) -> Result<u64, CodeError> {
        let q = self.q() as u64;
        let mut acc = 0u64;
        for &x in xs.iter().rev() {
            if !self.field().contains(x) {
                return Err(CodeError::NotInField(x.value()));
            }
            acc = acc * q + x.index() as u64;
        }
        Ok(acc)
    }
}
