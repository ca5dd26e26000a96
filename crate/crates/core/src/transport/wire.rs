//! Length-prefixed frames: a u32 LE payload length, a type byte, then the
//! payload. Field symbols take `⌈⌈log2 q⌉/8⌉` bytes, little-endian.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::field::{Fe, Field};
use crate::pir::ServerAnswer;

pub const MAX_FRAME: usize = 16 << 20;
pub const HEADER_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    Query = 0x01,
    Answer = 0x02,
    Error = 0x03,
    Ping = 0x04,
}

impl TryFrom<u8> for MsgType {
    type Error = WireError;

    fn try_from(b: u8) -> Result<Self, WireError> {
        match b {
            0x01 => Ok(MsgType::Query),
            0x02 => Ok(MsgType::Answer),
            0x03 => Ok(MsgType::Error),
            0x04 => Ok(MsgType::Ping),
            other => Err(WireError::UnknownType(other)),
        }
    }
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("frame of {0} bytes exceeds the 16 MiB limit")]
    TooLarge(usize),
    #[error("unknown message type {0:#04x}")]
    UnknownType(u8),
    #[error("malformed payload: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub kind: MsgType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(kind: MsgType, payload: Vec<u8>) -> Self {
        Frame { kind, payload }
    }

    pub fn error(msg: impl Into<String>) -> Self {
        Frame::new(MsgType::Error, msg.into().into_bytes())
    }

    /// Bytes on the wire, header included.
    pub fn wire_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.wire_len());
        out.extend_from_slice(&(self.payload.len() as u32).to_le_bytes());
        out.push(self.kind as u8);
        out.extend_from_slice(&self.payload);
        out
    }
}

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> Result<usize, WireError> {
    if frame.payload.len() > MAX_FRAME {
        return Err(WireError::TooLarge(frame.payload.len()));
    }
    let bytes = frame.to_bytes();
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(bytes.len())
}

/// Reads one frame; `Ok(None)` on a clean end of stream before a header.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<Frame>, WireError> {
    let mut header = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        match r.read(&mut header[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(io::Error::from(io::ErrorKind::UnexpectedEof).into()),
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    let len = u32::from_le_bytes([header[0], header[1], header[2], header[3]]) as usize;
    if len > MAX_FRAME {
        return Err(WireError::TooLarge(len));
    }
    let kind = MsgType::try_from(header[4])?;
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload)?;
    Ok(Some(Frame { kind, payload }))
}

pub fn write_symbols(field: &Field, symbols: &[Fe], out: &mut Vec<u8>) {
    let w = field.symbol_bytes();
    for s in symbols {
        out.extend_from_slice(&s.value().to_le_bytes()[..w]);
    }
}

/// Decodes a whole buffer of symbols; a value `>= q` is returned as `Err`.
pub fn read_symbols(field: &Field, bytes: &[u8]) -> Result<Vec<Fe>, u16> {
    bytes
        .chunks(field.symbol_bytes())
        .map(|c| {
            let v = c.iter().rev().fold(0u16, |acc, &b| acc << 8 | b as u16);
            field.elem(v as u64).map_err(|_| v)
        })
        .collect()
}

/// `u16` count followed by the first `m-1` coordinates of every point.
pub fn encode_query(field: &Field, points: &[Vec<Fe>]) -> Vec<u8> {
    let mut out = (points.len() as u16).to_le_bytes().to_vec();
    for p in points {
        write_symbols(field, p, &mut out);
    }
    out
}

pub fn decode_query(
    field: &Field,
    coords: usize,
    payload: &[u8],
) -> Result<Vec<Vec<Fe>>, WireError> {
    if payload.len() < 2 {
        return Err(WireError::Malformed("query shorter than its count".into()));
    }
    let count = u16::from_le_bytes([payload[0], payload[1]]) as usize;
    let body = &payload[2..];
    let w = field.symbol_bytes();
    if body.len() != count * coords * w {
        return Err(WireError::Malformed(format!(
            "query announces {count} points but carries {} bytes",
            body.len()
        )));
    }
    let symbols = read_symbols(field, body)
        .map_err(|v| WireError::Malformed(format!("symbol {v} out of range")))?;
    if coords == 0 {
        return Ok(vec![Vec::new(); count]);
    }
    Ok(symbols.chunks(coords).map(<[Fe]>::to_vec).collect())
}

pub fn encode_answer(field: &Field, answer: &ServerAnswer) -> Vec<u8> {
    let mut out = Vec::new();
    for t in answer {
        write_symbols(field, t, &mut out);
    }
    out
}

pub fn decode_answer(
    field: &Field,
    sigma: usize,
    payload: &[u8],
) -> Result<ServerAnswer, WireError> {
    let w = field.symbol_bytes();
    if payload.len() != sigma * sigma * w {
        return Err(WireError::Malformed(format!(
            "answer has {} bytes, expected {}",
            payload.len(),
            sigma * sigma * w
        )));
    }
    let symbols = read_symbols(field, payload)
        .map_err(|v| WireError::Malformed(format!("symbol {v} out of range")))?;
    Ok(symbols.chunks(sigma).map(<[Fe]>::to_vec).collect())
}
