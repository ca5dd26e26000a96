//! Share files: `"MPIR1"`, then `p`, `e` (u16 LE), the `e+1` modulus
//! coefficients (one byte each, constant term first), `m`, `s`, `d`, `ℓ`
//! (u16 LE), then the share's symbols.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::multcode::{CodeError, CodeParams, ParamError, Share};

use super::wire::{read_symbols, write_symbols};

pub const MAGIC: &[u8; 5] = b"MPIR1";

#[derive(Debug, Error)]
pub enum ShareFileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a share file (bad magic)")]
    Magic,
    #[error("share file truncated")]
    Truncated,
    #[error("{0} trailing bytes after share data")]
    Trailing(usize),
    #[error("invalid field in header: {0}")]
    Field(#[from] FieldError),
    #[error("invalid code parameters in header: {0}")]
    Params(#[from] ParamError),
    #[error("invalid share data: {0}")]
    Code(#[from] CodeError),
    #[error("header does not match expected parameters: {0}")]
    Mismatch(String),
    #[error("header value {0} does not fit the format")]
    Unrepresentable(usize),
}

fn u16_of(v: usize) -> Result<[u8; 2], ShareFileError> {
    u16::try_from(v)
        .map(u16::to_le_bytes)
        .map_err(|_| ShareFileError::Unrepresentable(v))
}

pub fn header_len(field: &Field) -> usize {
    MAGIC.len() + 4 + field.degree() as usize + 1 + 8
}

pub fn share_to_bytes(share: &Share) -> Result<Vec<u8>, ShareFileError> {
    let p = share.params();
    let f = p.field();
    let mut out = Vec::with_capacity(header_len(f) + share.symbols().len() * f.symbol_bytes());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&u16_of(f.characteristic() as usize)?);
    out.extend_from_slice(&u16_of(f.degree() as usize)?);
    for &c in f.modulus() {
        out.push(u8::try_from(c).map_err(|_| ShareFileError::Unrepresentable(c as usize))?);
    }
    for v in [p.m(), p.s(), p.d(), share.hyperplane()] {
        out.extend_from_slice(&u16_of(v)?);
    }
    write_symbols(f, share.symbols(), &mut out);
    Ok(out)
}

struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ShareFileError> {
        if self.0.len() < n {
            return Err(ShareFileError::Truncated);
        }
        let (head, rest) = self.0.split_at(n);
        self.0 = rest;
        Ok(head)
    }

    fn u16(&mut self) -> Result<u16, ShareFileError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }
}

/// Parses a share file, checking it against `expected` when given.
pub fn share_from_bytes(
    bytes: &[u8],
    expected: Option<&CodeParams>,
) -> Result<Share, ShareFileError> {
    let mut r = Reader(bytes);
    if r.take(MAGIC.len()).map_err(|_| ShareFileError::Magic)? != MAGIC {
        return Err(ShareFileError::Magic);
    }
    let p = r.u16()? as u32;
    let e = r.u16()? as u32;
    let modulus: Vec<u16> = r.take(e as usize + 1)?.iter().map(|&b| b as u16).collect();
    let field = Field::with_modulus(p, e, &modulus)?;
    let m = r.u16()? as usize;
    let s = r.u16()? as usize;
    let d = r.u16()? as usize;
    let l = r.u16()? as usize;
    let params = CodeParams::new(&field, m, s, d)?;
    if let Some(want) = expected {
        if want != &params {
            return Err(ShareFileError::Mismatch(format!(
                "file has q={} m={m} s={s} d={d}, expected q={} m={} s={} d={}",
                field.order(),
                want.q(),
                want.m(),
                want.s(),
                want.d()
            )));
        }
    }
    let count = usize::try_from(params.share_len() * params.sigma() as u64)
        .map_err(|_| CodeError::TooLarge)?;
    let body = r.take(count * field.symbol_bytes())?;
    if !r.0.is_empty() {
        return Err(ShareFileError::Trailing(r.0.len()));
    }
    let symbols = read_symbols(&field, body).map_err(CodeError::NotInField)?;
    Ok(Share::new(&params, l, symbols)?)
}

pub fn write_share(path: impl AsRef<Path>, share: &Share) -> Result<(), ShareFileError> {
    fs::write(path, share_to_bytes(share)?)?;
    Ok(())
}

pub fn read_share(
    path: impl AsRef<Path>,
    expected: Option<&CodeParams>,
) -> Result<Share, ShareFileError> {
    share_from_bytes(&fs::read(path)?, expected)
}
