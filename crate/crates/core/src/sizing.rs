//! Choosing code parameters for a database of `E` entries of `S` records of
//! `b` bits each.

use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::multcode::{scheme_table, CodeParams, SchemeRow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SizingError {
    #[error("database description must be `E,S,b` with positive integers")]
    BadDb,
    #[error("database size overflows")]
    Overflow,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("no parameters in the search grid hold {0} bits")]
    Infeasible(u128),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DbConfig {
    pub entries: u64,
    pub records: u64,
    pub bits: u64,
}

impl DbConfig {
    /// Total size `N = E·S·b` in bits.
    pub fn total_bits(&self) -> u128 {
        self.entries as u128 * self.records as u128 * self.bits as u128
    }
}

impl FromStr for DbConfig {
    type Err = SizingError;

    fn from_str(s: &str) -> Result<Self, SizingError> {
        let parts: Vec<u64> = s
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|_| SizingError::BadDb))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [entries, records, bits] if entries > 0 && records > 0 && bits > 0 => Ok(DbConfig {
                entries,
                records,
                bits,
            }),
            _ => Err(SizingError::BadDb),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Choice {
    pub row: SchemeRow,
    /// Field symbols needed to hold the database.
    pub needed_symbols: u128,
}

pub const GRID_M: std::ops::RangeInclusive<usize> = 1..=4;
pub const GRID_S: std::ops::RangeInclusive<usize> = 1..=6;

/// Every `(q, m, s)` with `d = s(q-1) - 1` in the grid (restricted to the
/// given values) that can serve as a PIR layout and holds the database,
/// ordered by number of servers, then storage overhead.
pub fn candidates(
    db: &DbConfig,
    qs: &[u64],
    m: Option<usize>,
    s: Option<usize>,
) -> Result<Vec<Choice>, SizingError> {
    let n = db.total_bits();
    if n == 0 {
        return Err(SizingError::BadDb);
    }
    let mut out = Vec::new();
    for &q in qs {
        let field = Field::of_order(q)?;
        let lg = (q as f64).log2();
        let needed = (n as f64 / lg).ceil() as u128;
        for mm in GRID_M.filter(|v| m.is_none_or(|x| x == *v)) {
            for ss in GRID_S.filter(|v| s.is_none_or(|x| x == *v)) {
                let d = ss * (field.order() - 1) - 1;
                let Ok(params) = CodeParams::new(&field, mm, ss, d) else {
                    continue;
                };
                if params.check_pir().is_err() || (params.k() as u128) < needed {
                    continue;
                }
                let row = scheme_table(&field, mm, ss, d).expect("validated above");
                out.push(Choice {
                    row,
                    needed_symbols: needed,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        a.row
            .servers
            .cmp(&b.row.servers)
            .then(a.row.overhead.total_cmp(&b.row.overhead))
    });
    if out.is_empty() {
        return Err(SizingError::Infeasible(n));
    }
    Ok(out)
}

/// The first of [`candidates`].
pub fn auto_select(
    db: &DbConfig,
    qs: &[u64],
    m: Option<usize>,
    s: Option<usize>,
) -> Result<Choice, SizingError> {
    Ok(candidates(db, qs, m, s)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_db() {
        let db: DbConfig = "90000,1,128".parse().unwrap();
        assert_eq!(db.total_bits(), 11_520_000);
        assert!("1,2".parse::<DbConfig>().is_err());
        assert!("0,1,1".parse::<DbConfig>().is_err());
        assert!("a,1,1".parse::<DbConfig>().is_err());
    }

    #[test]
    fn worked_examples() {
        let db: DbConfig = "90000,1,128".parse().unwrap();
        let c = auto_select(&db, &[256], Some(3), Some(1)).unwrap();
        assert_eq!(c.row.k, 2_796_160);
        assert_eq!(c.row.overhead_display(), "6.0");
        let c = auto_select(&db, &[16], None, None).unwrap();
        assert_eq!((c.row.m, c.row.s, c.row.k), (4, 6, 2_919_735));
        assert_eq!(c.row.overhead_display(), "2.8");
        assert_eq!(c.row.servers, 16);
    }

    #[test]
    fn fewer_servers_first() {
        let db: DbConfig = "1000,1,8".parse().unwrap();
        let all = candidates(&db, &[16, 256], None, None).unwrap();
        assert_eq!(all[0].row.q, 16);
        assert!(all.windows(2).all(|w| w[0].row.servers <= w[1].row.servers));
    }

    #[test]
    fn infeasible() {
        let db: DbConfig = "1000000000,1000,1000".parse().unwrap();
        assert!(matches!(
            auto_select(&db, &[16], None, None),
            Err(SizingError::Infeasible(_))
        ));
    }
}
