//! Files as polynomials: byte packing, the two message layouts, the public
//! manifest, and reading byte ranges back through private retrievals.
//!
//! With the `coefficients` layout the message symbols are the coefficients
//! of `F` in graded-lex order, so reading any byte means recovering all of
//! `F` from an information set. With the `systematic` layout the message
//! symbols are the codeword values at an information set, and a byte range
//! is read by retrieving only the points that hold its symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::field::{Fe, Field};
use crate::multcode::{encode_message, partition, CodeParams, EvalTuple, InformationSet, Share};
use crate::packing::{pack, symbol_range, symbols_for, unpack, unpack_range};
use crate::transport::{retrieve, Endpoint, Traffic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    #[default]
    Coefficients,
    Systematic,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Coefficients => "coefficients",
            Layout::Systematic => "systematic",
        })
    }
}

impl FromStr for Layout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coefficients" => Ok(Layout::Coefficients),
            "systematic" => Ok(Layout::Systematic),
            _ => Err(format!("unknown layout {s:?} (coefficients, systematic)")),
        }
    }
}

/// Public description of an encoded file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub q: usize,
    pub m: usize,
    pub s: usize,
    pub d: usize,
    pub byte_len: usize,
    #[serde(default)]
    pub layout: Layout,
}

impl Manifest {
    pub fn params(&self) -> anyhow::Result<CodeParams> {
        let field = Field::of_order(self.q as u64)?;
        Ok(CodeParams::new(&field, self.m, self.s, self.d)?)
    }
}

/// Packs `bytes` into `k` symbols and encodes them into the `q` shares.
pub fn encode_bytes(
    params: &CodeParams,
    bytes: &[u8],
    layout: Layout,
) -> anyhow::Result<(Vec<Share>, Manifest)> {
    params.check_pir()?;
    let f = params.field();
    let needed = symbols_for(f, bytes.len())?;
    if needed as u64 > params.k() {
        bail!(
            "input needs {needed} symbols but the code holds k = {} ({} bytes at most)",
            params.k(),
            params.k() as f64 * f.bits_per_symbol() / 8.0
        );
    }
    let mut msg = pack(f, bytes)?;
    msg.resize(params.k() as usize, Fe::ZERO);
    let coeffs = match layout {
        Layout::Coefficients => msg,
        Layout::Systematic => InformationSet::new(params)?.solve(&msg)?,
    };
    let cw = encode_message(params, &coeffs)?;
    let manifest = Manifest {
        q: params.q(),
        m: params.m(),
        s: params.s(),
        d: params.d(),
        byte_len: bytes.len(),
        layout,
    };
    Ok((partition(&cw), manifest))
}

/// Result of reading bytes back.
#[derive(Debug, Clone)]
pub struct Fetched {
    pub bytes: Vec<u8>,
    pub traffic: Traffic,
    /// Number of protocol runs.
    pub runs: usize,
}

fn fetch_points<R: Rng + ?Sized>(
    params: &CodeParams,
    endpoints: &[Endpoint],
    points: impl IntoIterator<Item = u64>,
    rng: &mut R,
    timeout: Duration,
) -> anyhow::Result<(BTreeMap<u64, EvalTuple>, Traffic)> {
    let mut got = BTreeMap::new();
    let mut total = Traffic::default();
    for j in points {
        if got.contains_key(&j) {
            continue;
        }
        let r = retrieve(params, endpoints, j, rng, timeout)
            .with_context(|| format!("retrieving point {j}"))?;
        total.uplink_bits += r.traffic.uplink_bits;
        total.downlink_bits += r.traffic.downlink_bits;
        total.uplink_payload_bytes += r.traffic.uplink_payload_bytes;
        total.downlink_payload_bytes += r.traffic.downlink_payload_bytes;
        total.frame_header_bytes += r.traffic.frame_header_bytes;
        total.rejected.extend(r.traffic.rejected);
        got.insert(j, r.tuple);
    }
    total.rejected.sort_unstable();
    total.rejected.dedup();
    Ok((got, total))
}

/// Privately reads bytes `start..end` of the encoded file.
pub fn fetch_bytes<R: Rng + ?Sized>(
    manifest: &Manifest,
    endpoints: &[Endpoint],
    start: usize,
    end: usize,
    rng: &mut R,
    timeout: Duration,
) -> anyhow::Result<Fetched> {
    if start > end || end > manifest.byte_len {
        bail!(
            "byte range {start}..{end} outside the file ({} bytes)",
            manifest.byte_len
        );
    }
    let params = manifest.params()?;
    let f = params.field().clone();
    let set = InformationSet::new(&params)?;
    match manifest.layout {
        Layout::Coefficients => {
            let (tuples, traffic) = fetch_points(&params, endpoints, set.points(), rng, timeout)?;
            let coeffs = set.solve(&set.gather(|i| &tuples[&i]))?;
            let bytes = unpack(&f, &coeffs, manifest.byte_len)?;
            Ok(Fetched {
                bytes: bytes[start..end].to_vec(),
                traffic,
                runs: tuples.len(),
            })
        }
        Layout::Systematic => {
            let range = symbol_range(&f, start, end)?;
            let coords = &set.coords()[range.clone()];
            let (tuples, traffic) =
                fetch_points(&params, endpoints, coords.iter().map(|c| c.0), rng, timeout)?;
            let symbols: Vec<Fe> = coords.iter().map(|&(i, slot)| tuples[&i][slot]).collect();
            Ok(Fetched {
                bytes: unpack_range(&f, range.start, &symbols, start, end)?,
                traffic,
                runs: tuples.len(),
            })
        }
    }
}
