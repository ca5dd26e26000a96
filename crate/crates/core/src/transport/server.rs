use std::io::{self, BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::multcode::Share;
use crate::pir::{answer, ByzantineMode};

use super::wire::{
    decode_query, encode_answer, read_frame, write_frame, Frame, MsgType, WireError,
};

const IDLE_TIMEOUT: Duration = Duration::from_secs(60);

/// Answers frames for one share. Shared by the socket server and the
/// in-process transport.
#[derive(Debug)]
pub struct Responder {
    share: Share,
    mode: ByzantineMode,
    rng: Mutex<ChaCha8Rng>,
}

impl Responder {
    /// `seed` only matters for the garbage mode.
    pub fn new(share: Share, mode: ByzantineMode, seed: Option<u64>) -> Self {
        let rng = match seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s),
            None => ChaCha8Rng::from_entropy(),
        };
        Responder {
            share,
            mode,
            rng: Mutex::new(rng),
        }
    }

    pub fn share(&self) -> &Share {
        &self.share
    }

    pub fn mode(&self) -> ByzantineMode {
        self.mode
    }

    pub fn respond(&self, frame: &Frame) -> Frame {
        match frame.kind {
            MsgType::Ping => Frame::new(MsgType::Ping, frame.payload.clone()),
            MsgType::Query => match self.answer_query(&frame.payload) {
                Ok(payload) => Frame::new(MsgType::Answer, payload),
                Err(msg) => Frame::error(msg),
            },
            MsgType::Answer | MsgType::Error => Frame::error("unexpected message type"),
        }
    }

    fn answer_query(&self, payload: &[u8]) -> Result<Vec<u8>, String> {
        let p = self.share.params();
        let field = p.field();
        let points = decode_query(field, p.m() - 1, payload).map_err(|e| e.to_string())?;
        let mut ans = answer(&self.share, &points).map_err(|e| e.to_string())?;
        if self.mode != ByzantineMode::Honest {
            let mut rng = self.rng.lock().unwrap_or_else(|e| e.into_inner());
            self.mode.corrupt(field, &mut ans, &mut *rng);
        }
        Ok(encode_answer(field, &ans))
    }
}

fn handle_connection(stream: TcpStream, responder: &Responder) -> Result<(), WireError> {
    stream.set_read_timeout(Some(IDLE_TIMEOUT))?;
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    loop {
        let frame = match read_frame(&mut reader) {
            Ok(Some(f)) => f,
            Ok(None) => return Ok(()),
            Err(WireError::Io(e)) => return Err(WireError::Io(e)),
            Err(e) => {
                // the stream position is lost after a bad header
                write_frame(&mut writer, &Frame::error(e.to_string()))?;
                return Err(e);
            }
        };
        write_frame(&mut writer, &responder.respond(&frame))?;
    }
}

/// A running socket server.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting connections and waits for the accept loop to exit.
    pub fn shutdown(mut self) {
        self.stop_inner();
    }

    /// Blocks until the server stops.
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    fn stop_inner(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // wake the blocking accept
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_millis(200));
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        if self.thread.is_some() {
            self.stop_inner();
        }
    }
}

/// Binds `addr` and answers queries on a background thread, one thread per
/// connection.
pub fn serve<A: ToSocketAddrs>(addr: A, responder: Responder) -> io::Result<ServerHandle> {
    let listener = TcpListener::bind(addr)?;
    let local = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let responder = Arc::new(responder);
    let flag = stop.clone();
    let thread = thread::spawn(move || {
        for conn in listener.incoming() {
            if flag.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = conn else { continue };
            let r = responder.clone();
            thread::spawn(move || {
                let _ = handle_connection(stream, &r);
            });
        }
    });
    Ok(ServerHandle {
        addr: local,
        stop,
        thread: Some(thread),
    })
}
