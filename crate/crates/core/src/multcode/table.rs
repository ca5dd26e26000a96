use std::fmt;

use serde::Serialize;

use crate::field::Field;

use super::{CodeParams, ParamError};

/// Cost summary of one parameter set, next to the classical LDC-to-PIR
/// reduction (one server per query, each storing the whole codeword).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeRow {
    pub q: usize,
    pub m: usize,
    pub s: usize,
    pub d: usize,
    pub k: u64,
    pub queries: u64,
    pub servers: u64,
    pub std_overhead: f64,
    pub overhead: f64,
    pub std_comm: f64,
    pub comm: f64,
}

pub fn scheme_table(field: &Field, m: usize, s: usize, d: usize) -> Result<SchemeRow, ParamError> {
    let p = CodeParams::new(field, m, s, d)?;
    let q = p.q() as f64;
    let sigma = p.sigma() as f64;
    let lg = q.log2();
    let inv_rate = 1.0 / p.rate();
    Ok(SchemeRow {
        q: p.q(),
        m,
        s,
        d,
        k: p.k(),
        queries: p.queries(),
        servers: p.q() as u64,
        std_overhead: (q - 1.0) * inv_rate,
        overhead: inv_rate,
        std_comm: (q - 1.0) * sigma * (m as f64 + sigma) * lg,
        comm: (m as f64 - 1.0 + sigma) * q * sigma * lg,
    })
}

/// Rows `m ∈ {2,3,4}`, `s ∈ 1..=6` at the largest degree `d = s(q-1) - 1`.
pub fn standard_rows(field: &Field) -> Vec<SchemeRow> {
    let q = field.order();
    let mut rows = Vec::new();
    for m in 2..=4 {
        for s in 1..=6 {
            rows.push(scheme_table(field, m, s, s * (q - 1) - 1).expect("d below s(q-1)"));
        }
    }
    rows
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits as i32 - 1 - mag);
    (x * scale).round() / scale
}

fn fmt_sig(x: f64) -> String {
    let r = round_sig(x, 2);
    if r >= 10.0 {
        format!("{r:.0}")
    } else {
        format!("{r:.1}")
    }
}

impl SchemeRow {
    pub const HEADER: &'static str =
        "q\tm\ts\td\tk\tqueries\tservers\tstd_ovh\tours_ovh\tstd_comm\tours_comm";

    pub fn std_overhead_display(&self) -> String {
        fmt_sig(self.std_overhead)
    }

    pub fn overhead_display(&self) -> String {
        fmt_sig(self.overhead)
    }
}

impl fmt::Display for SchemeRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.0}\t{:.0}",
            self.q,
            self.m,
            self.s,
            self.d,
            self.k,
            self.queries,
            self.servers,
            self.std_overhead_display(),
            self.overhead_display(),
            self.std_comm,
            self.comm
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(2.0645, 2), 2.1);
        assert_eq!(round_sig(1234.0, 2), 1200.0);
        assert_eq!(round_sig(0.0456, 2), 0.046);
        assert_eq!(fmt_sig(5.98), "6.0");
        assert_eq!(fmt_sig(32.0), "32");
        assert_eq!(fmt_sig(246.7), "250");
    }

    #[test]
    fn example_rows() {
        let r = scheme_table(&Field::gf16(), 2, 1, 14).unwrap();
        assert_eq!((r.k, r.queries, r.servers), (120, 15, 16));
        assert_eq!((r.std_comm, r.comm), (180.0, 128.0));
        assert_eq!(
            (
                r.std_overhead_display().as_str(),
                r.overhead_display().as_str()
            ),
            ("32", "2.1")
        );
        let r = scheme_table(&Field::gf256(), 3, 1, 254).unwrap();
        assert_eq!(r.comm, 6144.0);
        assert_eq!(r.overhead_display(), "6.0");
        let r = scheme_table(&Field::gf16(), 2, 2, 29).unwrap();
        assert_eq!(r.comm, 768.0);
        assert_eq!(standard_rows(&Field::gf16()).len(), 18);
    }
}
