use std::fmt;
use std::io::{self, BufReader, Cursor};
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::multcode::{CodeParams, EvalTuple};
use crate::pir::{gen_queries, reconstruct, PirError, QueryPlan, ServerAnswer};

use super::server::Responder;
use super::wire::{
    decode_answer, encode_query, read_frame, write_frame, Frame, MsgType, WireError,
};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);
pub const TIMEOUT_ENV: &str = "MPIR_TIMEOUT_MS";

/// Per-request timeout: `MPIR_TIMEOUT_MS` if set and valid, else 5 s.
pub fn timeout_from_env() -> Duration {
    std::env::var(TIMEOUT_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(Duration::from_millis)
        .unwrap_or(DEFAULT_TIMEOUT)
}

#[derive(Clone)]
pub enum Target {
    Tcp(String),
    InProcess(Arc<Responder>),
}

impl fmt::Debug for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Tcp(a) => write!(f, "tcp://{a}"),
            Target::InProcess(r) => write!(f, "in-process(H_{})", r.share().hyperplane()),
        }
    }
}

/// Where server `ℓ` can be reached.
#[derive(Debug, Clone)]
pub struct Endpoint {
    pub index: usize,
    pub target: Target,
}

impl Endpoint {
    pub fn tcp(index: usize, addr: impl Into<String>) -> Self {
        Endpoint {
            index,
            target: Target::Tcp(addr.into()),
        }
    }

    pub fn in_process(responder: Arc<Responder>) -> Self {
        Endpoint {
            index: responder.share().hyperplane(),
            target: Target::InProcess(responder),
        }
    }

    /// Sends one frame and waits for the reply.
    pub fn exchange(&self, frame: &Frame, timeout: Duration) -> Result<Frame, TransportError> {
        let server = self.index;
        let io_err = |e: WireError| match e {
            WireError::Io(e)
                if matches!(
                    e.kind(),
                    io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut
                ) =>
            {
                TransportError::Timeout { server }
            }
            other => TransportError::Io {
                server,
                msg: other.to_string(),
            },
        };
        match &self.target {
            Target::Tcp(addr) => {
                let sock = addr
                    .to_socket_addrs()
                    .map_err(|e| TransportError::Connect {
                        server,
                        msg: e.to_string(),
                    })?
                    .next()
                    .ok_or_else(|| TransportError::Connect {
                        server,
                        msg: format!("{addr} resolves to no address"),
                    })?;
                let stream = TcpStream::connect_timeout(&sock, timeout).map_err(|e| {
                    if e.kind() == io::ErrorKind::TimedOut {
                        TransportError::Timeout { server }
                    } else {
                        TransportError::Connect {
                            server,
                            msg: e.to_string(),
                        }
                    }
                })?;
                let setup = |e: io::Error| TransportError::Io {
                    server,
                    msg: e.to_string(),
                };
                stream.set_read_timeout(Some(timeout)).map_err(setup)?;
                stream.set_write_timeout(Some(timeout)).map_err(setup)?;
                stream.set_nodelay(true).map_err(setup)?;
                let mut writer = stream.try_clone().map_err(setup)?;
                write_frame(&mut writer, frame).map_err(io_err)?;
                read_frame(&mut BufReader::new(stream))
                    .map_err(io_err)?
                    .ok_or(TransportError::Closed { server })
            }
            Target::InProcess(responder) => {
                // same bytes as on a socket
                let request = read_frame(&mut Cursor::new(frame.to_bytes()))
                    .map_err(io_err)?
                    .ok_or(TransportError::Closed { server })?;
                let mut buf = Vec::new();
                write_frame(&mut buf, &responder.respond(&request)).map_err(io_err)?;
                read_frame(&mut Cursor::new(buf))
                    .map_err(io_err)?
                    .ok_or(TransportError::Closed { server })
            }
        }
    }

    pub fn ping(&self, timeout: Duration) -> Result<(), TransportError> {
        let reply = self.exchange(&Frame::new(MsgType::Ping, b"ping".to_vec()), timeout)?;
        if reply.kind == MsgType::Ping && reply.payload == b"ping" {
            Ok(())
        } else {
            Err(TransportError::Protocol {
                server: self.index,
                msg: "bad ping reply".into(),
            })
        }
    }
}

/// Parses lines of the form `index host:port`; blank lines and `#` comments
/// are skipped.
pub fn parse_endpoints(text: &str) -> Result<Vec<Endpoint>, TransportError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(addr), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(TransportError::Endpoints(format!(
                "line {}: expected `index host:port`",
                n + 1
            )));
        };
        let index = idx
            .parse()
            .map_err(|_| TransportError::Endpoints(format!("line {}: bad index {idx:?}", n + 1)))?;
        out.push(Endpoint::tcp(index, addr));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("server {server}: connection failed: {msg}")]
    Connect { server: usize, msg: String },
    #[error("server {server}: timed out")]
    Timeout { server: usize },
    #[error("server {server}: {msg}")]
    Io { server: usize, msg: String },
    #[error("server {server}: connection closed without a reply")]
    Closed { server: usize },
    #[error("server {server}: protocol error: {msg}")]
    Protocol { server: usize, msg: String },
    #[error("no endpoint for server {0}")]
    Missing(usize),
    #[error("endpoint for server {0} given twice")]
    Duplicate(usize),
    #[error("bad endpoints file: {0}")]
    Endpoints(String),
}

/// Traffic of one retrieval. Information bits count `log2 q` per field
/// symbol of point coordinates and answer tuples; byte counters include the
/// query count field and frame headers.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Traffic {
    pub uplink_bits: f64,
    pub downlink_bits: f64,
    pub uplink_payload_bytes: u64,
    pub downlink_payload_bytes: u64,
    pub frame_header_bytes: u64,
    /// Servers whose reply was an error frame or could not be decoded.
    pub rejected: Vec<usize>,
}

impl Traffic {
    pub fn info_bits(&self) -> f64 {
        self.uplink_bits + self.downlink_bits
    }

    pub fn wire_bytes(&self) -> u64 {
        self.uplink_payload_bytes + self.downlink_payload_bytes + self.frame_header_bytes
    }
}

/// Sends every server its batch concurrently and returns the answers indexed
/// by server. Unreachable servers abort with a [`TransportError`]; a reply
/// that is an error frame or malformed is passed on as an empty answer, which
/// reconstruction treats as corrupted.
pub fn fanout(
    endpoints: &[Endpoint],
    plan: &QueryPlan,
    timeout: Duration,
) -> Result<(Vec<ServerAnswer>, Traffic), TransportError> {
    let p = plan.params();
    let q = p.q();
    let field = p.field();
    let sigma = p.sigma();
    let mut by_index: Vec<Option<&Endpoint>> = vec![None; q];
    for ep in endpoints {
        let slot = by_index
            .get_mut(ep.index)
            .ok_or(TransportError::Endpoints(format!(
                "server index {} outside 0..{q}",
                ep.index
            )))?;
        if slot.replace(ep).is_some() {
            return Err(TransportError::Duplicate(ep.index));
        }
    }
    let eps: Vec<&Endpoint> = by_index
        .iter()
        .enumerate()
        .map(|(l, e)| e.ok_or(TransportError::Missing(l)))
        .collect::<Result<_, _>>()?;
    let lg = (q as f64).log2();
    let replies: Vec<Result<(Frame, Frame), TransportError>> = thread::scope(|scope| {
        let handles: Vec<_> = eps
            .iter()
            .enumerate()
            .map(|(l, ep)| {
                scope.spawn(move || {
                    let req = Frame::new(MsgType::Query, encode_query(field, plan.batch(l)));
                    ep.exchange(&req, timeout).map(|rep| (req, rep))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fanout worker panicked"))
            .collect()
    });
    let mut answers = Vec::with_capacity(q);
    let mut traffic = Traffic::default();
    for (l, reply) in replies.into_iter().enumerate() {
        let (req, rep) = reply?;
        let coords: usize = plan.batch(l).iter().map(Vec::len).sum();
        traffic.uplink_bits += coords as f64 * lg;
        traffic.uplink_payload_bytes += req.payload.len() as u64;
        traffic.downlink_payload_bytes += rep.payload.len() as u64;
        traffic.frame_header_bytes +=
            (req.wire_len() - req.payload.len() + rep.wire_len() - rep.payload.len()) as u64;
        let decoded = match rep.kind {
            MsgType::Answer => decode_answer(field, sigma, &rep.payload).ok(),
            _ => None,
        };
        match decoded {
            Some(a) => {
                traffic.downlink_bits += (a.len() * sigma) as f64 * lg;
                answers.push(a);
            }
            None => {
                traffic.rejected.push(l);
                answers.push(Vec::new());
            }
        }
    }
    Ok((answers, traffic))
}

#[derive(Debug, Error)]
pub enum RetrieveError {
    #[error("transport failure: {0}")]
    Transport(#[from] TransportError),
    #[error("decoding failure: {0}")]
    Decode(#[from] PirError),
}

#[derive(Debug, Clone)]
pub struct Retrieval {
    pub tuple: EvalTuple,
    pub traffic: Traffic,
}

/// One private read of the tuple at point `j`.
pub fn retrieve<R: Rng + ?Sized>(
    params: &CodeParams,
    endpoints: &[Endpoint],
    j: u64,
    rng: &mut R,
    timeout: Duration,
) -> Result<Retrieval, RetrieveError> {
    let plan = gen_queries(params, j, rng)?;
    let (answers, traffic) = fanout(endpoints, &plan, timeout)?;
    let tuple = reconstruct(&plan, &answers)?;
    Ok(Retrieval { tuple, traffic })
}
