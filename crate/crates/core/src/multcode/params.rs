use thiserror::Error;

use crate::field::Field;
use crate::mpoly::{graded_lex, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("number of variables must be at least 1")]
    NoVariables,
    #[error("derivative order s must be at least 1")]
    ZeroOrder,
    #[error("degree bound d = {d} must be below s(q-1) = {bound}")]
    DegreeTooLarge { d: usize, bound: usize },
    #[error("σ = {sigma} lines needed but only {available} transversal directions exist")]
    TooFewDirections { sigma: usize, available: u64 },
    #[error("derivative order s = {s} exceeds q = {q}; no set of lines can resolve order s-1")]
    OrderExceedsField { s: usize, q: usize },
    #[error("parameters overflow 64-bit counters")]
    Overflow,
}

/// `C(n, r)` exactly, or `None` on overflow.
pub fn binomial(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    u64::try_from(acc).ok()
}

/// Parameters of the multiplicity code `Mult^s_d` over `GF(q)^m`.
///
/// `σ = C(m+s-1, m)` Hasse derivatives are stored per point, `k = C(m+d, m)`
/// message symbols are encoded into `n = q^m` symbols of `GF(q)^σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    field: Field,
    m: usize,
    s: usize,
    d: usize,
    sigma: usize,
    k: u64,
    n: u64,
    orders: Vec<Monomial>,
}

impl CodeParams {
    /// Validates `m, s >= 1` and `d < s(q-1)`, the bound under which every
    /// restriction to a line is recoverable from its `q-1` points off the
    /// base point.
    pub fn new(field: &Field, m: usize, s: usize, d: usize) -> Result<Self, ParamError> {
        if m == 0 {
            return Err(ParamError::NoVariables);
        }
        if s == 0 {
            return Err(ParamError::ZeroOrder);
        }
        let q = field.order();
        let bound = s.checked_mul(q - 1).ok_or(ParamError::Overflow)?;
        if d >= bound {
            return Err(ParamError::DegreeTooLarge { d, bound });
        }
        let sigma = binomial((m + s - 1) as u64, m as u64).ok_or(ParamError::Overflow)?;
        let k = binomial((m + d) as u64, m as u64).ok_or(ParamError::Overflow)?;
        let n = (q as u64)
            .checked_pow(m as u32)
            .ok_or(ParamError::Overflow)?;
        let orders = if sigma <= 1 << 20 {
            graded_lex(m, s - 1)
        } else {
            Vec::new()
        };
        Ok(CodeParams {
            field: field.clone(),
            m,
            s,
            d,
            sigma: sigma as usize,
            k,
            n,
            orders,
        })
    }

    /// Additional requirements of the PIR layout: `σ <= q^{m-1}` distinct
    /// transversal lines through a point, and `s <= q` so that the
    /// order-`(s-1)` block of the local decoding system can have full rank.
    pub fn check_pir(&self) -> Result<(), ParamError> {
        let available = self.share_len();
        if self.sigma as u64 > available {
            return Err(ParamError::TooFewDirections {
                sigma: self.sigma,
                available,
            });
        }
        if self.s > self.q() {
            return Err(ParamError::OrderExceedsField {
                s: self.s,
                q: self.q(),
            });
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Symbols per codeword position, `C(m+s-1, m)`.
    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Message length over `GF(q)`, `C(m+d, m)`.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Code length `q^m`.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Points per hyperplane, `q^{m-1}`.
    pub fn share_len(&self) -> u64 {
        self.n / self.q() as u64
    }

    /// `k / (σ n)`
    pub fn rate(&self) -> f64 {
        self.k as f64 / (self.sigma as f64 * self.n as f64)
    }

    /// `q^m - (d/s) q^{m-1}`
    pub fn distance_bound(&self) -> f64 {
        self.n as f64 - (self.d as f64 / self.s as f64) * self.share_len() as f64
    }

    /// Number of servers that may answer arbitrarily, `⌊(q-1-d/s)/2⌋`,
    /// which is also the per-line error radius of the univariate decoder.
    pub fn nu(&self) -> usize {
        let total = self.s * (self.q() - 1);
        total.saturating_sub(self.d) / (2 * self.s)
    }

    /// LDC-locality `(q-1)σ`.
    pub fn queries(&self) -> u64 {
        (self.q() as u64 - 1) * self.sigma as u64
    }

    /// Multi-indices `v` with `|v| < s` in graded-lex order: the layout of
    /// every codeword symbol.
    pub fn derivative_orders(&self) -> &[Monomial] {
        &self.orders
    }

    /// Position of `v` within an evaluation tuple.
    pub fn slot_of(&self, v: &[u32]) -> Option<usize> {
        self.orders.iter().position(|o| o.exponents() == v)
    }

    /// Slots whose multi-index has total degree exactly `e`.
    pub fn slots_of_order(&self, e: usize) -> std::ops::Range<usize> {
        let start = binomial((self.m + e - 1) as u64, self.m as u64).unwrap_or(0) as usize;
        let end = binomial((self.m + e) as u64, self.m as u64).unwrap_or(0) as usize;
        if e == 0 {
            0..1
        } else {
            start..end
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let f16 = Field::gf16();
        let p = CodeParams::new(&f16, 2, 2, 29).unwrap();
        assert_eq!((p.sigma(), p.k(), p.queries()), (3, 465, 45));
        assert!((p.rate() - 465.0 / 768.0).abs() < 1e-12);
        let p = CodeParams::new(&f16, 3, 2, 29).unwrap();
        assert_eq!((p.sigma(), p.k(), p.queries()), (4, 4960, 60));
        let p = CodeParams::new(&f16, 2, 2, 14).unwrap();
        assert_eq!(p.nu(), 4);
        let p = CodeParams::new(&Field::gf256(), 4, 6, 1529).unwrap();
        assert_eq!(p.k(), 229_222_001_295);
    }

    #[test]
    fn rejects_out_of_range() {
        let f16 = Field::gf16();
        assert_eq!(
            CodeParams::new(&f16, 2, 2, 30),
            Err(ParamError::DegreeTooLarge { d: 30, bound: 30 })
        );
        assert_eq!(CodeParams::new(&f16, 0, 1, 1), Err(ParamError::NoVariables));
        assert_eq!(CodeParams::new(&f16, 1, 0, 1), Err(ParamError::ZeroOrder));
        // m = 1 leaves a single transversal direction
        let p = CodeParams::new(&f16, 1, 2, 5).unwrap();
        assert!(matches!(
            p.check_pir(),
            Err(ParamError::TooFewDirections {
                sigma: 2,
                available: 1
            })
        ));
        let f4 = Field::new(2, 2).unwrap();
        let p = CodeParams::new(&f4, 2, 5, 10).unwrap();
        assert!(p.check_pir().is_err());
        assert!(CodeParams::new(&f4, 3, 2, 5).unwrap().check_pir().is_ok());
    }

    #[test]
    fn order_slots() {
        let p = CodeParams::new(&Field::gf16(), 3, 3, 10).unwrap();
        assert_eq!(p.sigma(), 10);
        assert_eq!(p.slots_of_order(0), 0..1);
        assert_eq!(p.slots_of_order(1), 1..4);
        assert_eq!(p.slots_of_order(2), 4..10);
        for e in 0..3 {
            for slot in p.slots_of_order(e) {
                assert_eq!(p.derivative_orders()[slot].degree(), e);
            }
        }
        assert_eq!(p.slot_of(&[0, 1, 0]), Some(2));
    }

    #[test]
    fn binomials_exact() {
        assert_eq!(binomial(10, 3), Some(120));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(1533, 4), Some(229_222_001_295));
        assert_eq!(binomial(200, 100), None);
    }
}
