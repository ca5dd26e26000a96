//! Share files, the wire protocol, a threaded TCP server and the client
//! fan-out. The in-process transport runs every request through the same
//! frame codec as the socket one.

mod client;
mod server;
mod sharefile;
pub mod wire;

pub use client::{
    fanout, parse_endpoints, retrieve, timeout_from_env, Endpoint, Retrieval, RetrieveError,
    Target, Traffic, TransportError, DEFAULT_TIMEOUT, TIMEOUT_ENV,
};
pub use server::{serve, Responder, ServerHandle};
pub use sharefile::{
    header_len, read_share, share_from_bytes, share_to_bytes, write_share, ShareFileError, MAGIC,
};

use std::sync::Arc;

use crate::multcode::Share;
use crate::pir::ByzantineMode;

/// In-process endpoints for `shares`, with per-server behaviour `modes`
/// (missing entries are honest).
pub fn in_process(shares: &[Share], modes: &[ByzantineMode], seed: u64) -> Vec<Endpoint> {
    shares
        .iter()
        .map(|s| {
            let l = s.hyperplane();
            let mode = modes.get(l).copied().unwrap_or_default();
            Endpoint::in_process(Arc::new(Responder::new(
                s.clone(),
                mode,
                Some(seed.wrapping_add(l as u64)),
            )))
        })
        .collect()
}

/// Starts one socket server per share on `127.0.0.1` with ephemeral ports.
pub fn spawn_local(
    shares: &[Share],
    modes: &[ByzantineMode],
    seed: u64,
) -> std::io::Result<(Vec<ServerHandle>, Vec<Endpoint>)> {
    let mut handles = Vec::with_capacity(shares.len());
    let mut endpoints = Vec::with_capacity(shares.len());
    for s in shares {
        let l = s.hyperplane();
        let mode = modes.get(l).copied().unwrap_or_default();
        let h = serve(
            "127.0.0.1:0",
            Responder::new(s.clone(), mode, Some(seed.wrapping_add(l as u64))),
        )?;
        endpoints.push(Endpoint::tcp(l, h.addr().to_string()));
        handles.push(h);
    }
    Ok((handles, endpoints))
}
