//! Bytes to field symbols and back for `q = 2^e`: the input is read as a
//! bit stream, least significant bit of each byte first, and cut into
//! `e`-bit symbols (first bit = least significant bit of the symbol).

use thiserror::Error;

use crate::field::{Fe, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackError {
    #[error("byte packing needs q = 2^e, got q = {0}")]
    NotBinary(usize),
}

pub fn bits_per_symbol(field: &Field) -> Result<usize, PackError> {
    if field.characteristic() != 2 {
        return Err(PackError::NotBinary(field.order()));
    }
    Ok(field.degree() as usize)
}

/// Number of symbols holding `len` bytes.
pub fn symbols_for(field: &Field, len: usize) -> Result<usize, PackError> {
    let e = bits_per_symbol(field)?;
    Ok((len * 8).div_ceil(e))
}

pub fn pack(field: &Field, bytes: &[u8]) -> Result<Vec<Fe>, PackError> {
    let e = bits_per_symbol(field)?;
    let mut out = Vec::with_capacity(symbols_for(field, bytes.len())?);
    let mut acc: u32 = 0;
    let mut have = 0;
    for &b in bytes {
        acc |= (b as u32) << have;
        have += 8;
        while have >= e {
            out.push(field.alpha((acc & ((1 << e) - 1)) as usize));
            acc >>= e;
            have -= e;
        }
    }
    if have > 0 {
        out.push(field.alpha(acc as usize));
    }
    Ok(out)
}

/// Inverse of [`pack`], keeping the first `len` bytes.
pub fn unpack(field: &Field, symbols: &[Fe], len: usize) -> Result<Vec<u8>, PackError> {
    let e = bits_per_symbol(field)?;
    let mut out = Vec::with_capacity(len);
    let mut acc: u32 = 0;
    let mut have = 0;
    for s in symbols {
        if out.len() == len {
            break;
        }
        acc |= (s.value() as u32) << have;
        have += e;
        while have >= 8 && out.len() < len {
            out.push((acc & 0xff) as u8);
            acc >>= 8;
            have -= 8;
        }
    }
    out.resize(len, 0);
    Ok(out)
}

/// Bytes `start..end` from the symbols `first..first + symbols.len()`,
/// which must cover them (see [`symbol_range`]).
pub fn unpack_range(
    field: &Field,
    first: usize,
    symbols: &[Fe],
    start: usize,
    end: usize,
) -> Result<Vec<u8>, PackError> {
    let mut all = vec![Fe::ZERO; first];
    all.extend_from_slice(symbols);
    let bytes = unpack(field, &all, end)?;
    Ok(bytes[start..end].to_vec())
}

/// Symbol indices covering bytes `start..end`.
pub fn symbol_range(
    field: &Field,
    start: usize,
    end: usize,
) -> Result<std::ops::Range<usize>, PackError> {
    let e = bits_per_symbol(field)?;
    Ok(start * 8 / e..(end * 8).div_ceil(e))
}
