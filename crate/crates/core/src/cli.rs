//! Command line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::audit::privacy_audit;
use crate::field::Field;
use crate::mpoly::MultiPoly;
use crate::multcode::{concatenate, scheme_table, standard_rows, CodeParams, SchemeRow};
use crate::pir::{preprocess, ByzantineMode};
use crate::sizing::{candidates, DbConfig};
use crate::store::{encode_bytes, fetch_bytes, Layout, Manifest};
use crate::transport::{
    in_process, parse_endpoints, read_share, retrieve, serve, spawn_local, timeout_from_env,
    write_share, Endpoint, Responder, RetrieveError, Traffic,
};

#[derive(Debug, Parser)]
#[command(
    name = "mpir",
    version,
    about = "Multi-server private information retrieval over multiplicity codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Code parameters, the cost table, or automatic sizing for a database.
    Params(ParamsArgs),
    /// Encodes a file into one share file per server.
    Encode(EncodeArgs),
    /// Serves one share over TCP.
    Serve(ServeArgs),
    /// Privately reads a codeword symbol or a byte range.
    Retrieve(RetrieveArgs),
    /// Statistical check that single servers learn nothing about the target.
    PrivacyAudit(AuditArgs),
    /// Times retrievals against local servers, optionally with faulty ones.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CodeArgs {
    /// Field size (prime power).
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub m: usize,
    /// Multiplicity.
    #[arg(long)]
    pub s: usize,
    /// Total degree bound [default: s(q-1) - 1].
    #[arg(long)]
    pub d: Option<usize>,
}

impl CodeArgs {
    fn params(&self) -> Result<CodeParams> {
        let field = Field::of_order(self.q)?;
        Ok(CodeParams::new(&field, self.m, self.s, self.degree())?)
    }

    fn degree(&self) -> usize {
        self.d
            .unwrap_or((self.s * (self.q as usize - 1)).saturating_sub(1))
    }
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Print the rows m = 2..4, s = 1..6 (for q = 16 and 256 unless --q is given).
    #[arg(long, conflicts_with = "db")]
    pub table: bool,
    /// Pick parameters for a database of E entries, S records each, b bits per record.
    #[arg(long, value_name = "E,S,b")]
    pub db: Option<DbConfig>,
    /// Number of sizing candidates to list.
    #[arg(long, default_value_t = 1)]
    pub top: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub code: CodeArgs,
    /// Output directory for shares and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
    /// `coefficients` or `systematic`.
    #[arg(long, default_value_t = Layout::Coefficients)]
    pub layout: Layout,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub share: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// 0 picks a free port.
    #[arg(long, default_value_t = 0)]
    pub port: u16,
    /// honest, garbage, fixed or bit-flip.
    #[arg(long, default_value_t = ByzantineMode::Honest)]
    pub byzantine: ByzantineMode,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("what").required(true).args(["index", "record", "all"])))]
pub struct RetrieveArgs {
    /// Lines of `index host:port`.
    #[arg(long)]
    pub endpoints: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Point index j; prints its evaluation tuple.
    #[arg(long)]
    pub index: Option<u64>,
    /// Record number; reads bytes r·B .. (r+1)·B.
    #[arg(long, requires = "record_size")]
    pub record: Option<usize>,
    /// Record size B in bytes.
    #[arg(long)]
    pub record_size: Option<usize>,
    /// The whole file.
    #[arg(long)]
    pub all: bool,
    /// Write the bytes here instead of printing them as hex.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 20_000)]
    pub trials: usize,
    /// Fixed target point index.
    #[arg(long, default_value_t = 0)]
    pub target: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Number of misbehaving servers.
    #[arg(long, default_value_t = 0)]
    pub faulty: usize,
    #[arg(long, default_value_t = ByzantineMode::Garbage)]
    pub mode: ByzantineMode,
    /// Use TCP servers on localhost instead of the in-process transport.
    #[arg(long)]
    pub tcp: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    execute(cli.command, out)
}

pub fn run() -> Result<()> {
    let cli = Cli::parse();
    execute(cli.command, &mut std::io::stdout().lock())
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Params(a) => cmd_params(&a, out),
        Command::Encode(a) => cmd_encode(&a, out),
        Command::Serve(a) => cmd_serve(&a, out),
        Command::Retrieve(a) => cmd_retrieve(&a, out),
        Command::PrivacyAudit(a) => cmd_privacy_audit(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

fn rng_from(seed: Option<u64>) -> ChaCha8Rng {
    match seed {
        Some(s) => ChaCha8Rng::seed_from_u64(s),
        None => ChaCha8Rng::from_entropy(),
    }
}

fn print_rows(rows: &[SchemeRow], json: bool, out: &mut dyn Write) -> Result<()> {
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(rows)?)?;
    } else {
        writeln!(out, "{}", SchemeRow::HEADER)?;
        for r in rows {
            writeln!(out, "{r}")?;
        }
    }
    Ok(())
}

pub fn cmd_params(a: &ParamsArgs, out: &mut dyn Write) -> Result<()> {
    if a.table {
        let qs = a.q.map_or(vec![16, 256], |q| vec![q]);
        let mut rows = Vec::new();
        for q in qs {
            rows.extend(standard_rows(&Field::of_order(q)?));
        }
        return print_rows(&rows, a.json, out);
    }
    if let Some(db) = &a.db {
        let qs = a.q.map_or(vec![16, 256], |q| vec![q]);
        let found = candidates(db, &qs, a.m, a.s)?;
        let top: Vec<_> = found.into_iter().take(a.top.max(1)).collect();
        if a.json {
            writeln!(out, "{}", serde_json::to_string_pretty(&top)?)?;
            return Ok(());
        }
        writeln!(out, "database: N = {} bits", db.total_bits())?;
        for c in &top {
            let r = &c.row;
            writeln!(
                out,
                "q = {} m = {} s = {} d = {}: k = {} >= {} symbols, expansion {}, servers {}, queries {}, {} bits per retrieval",
                r.q,
                r.m,
                r.s,
                r.d,
                r.k,
                c.needed_symbols,
                r.overhead_display(),
                r.servers,
                r.queries,
                r.comm
            )?;
        }
        return Ok(());
    }
    let (Some(q), Some(m), Some(s)) = (a.q, a.m, a.s) else {
        bail!("give --q, --m and --s, or use --table or --db");
    };
    let code = CodeArgs { q, m, s, d: a.d };
    let p = code.params()?;
    let row = scheme_table(p.field(), m, s, p.d())?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&row)?)?;
        return Ok(());
    }
    print_rows(std::slice::from_ref(&row), false, out)?;
    writeln!(
        out,
        "sigma = {}  n = {}  rate = {:.4}",
        p.sigma(),
        p.n(),
        p.rate()
    )?;
    writeln!(
        out,
        "distance >= {:.2}  decoding radius per line = {}",
        p.distance_bound(),
        p.nu()
    )?;
    match p.check_pir() {
        Ok(()) => writeln!(out, "usable for PIR: yes")?,
        Err(e) => writeln!(out, "usable for PIR: no ({e})")?,
    }
    Ok(())
}

pub fn share_path(dir: &Path, l: usize) -> PathBuf {
    dir.join(format!("share-{l:03}.mpir"))
}

pub const MANIFEST: &str = "manifest.json";

pub fn cmd_encode(a: &EncodeArgs, out: &mut dyn Write) -> Result<()> {
    let p = a.code.params()?;
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let (shares, manifest) = encode_bytes(&p, &bytes, a.layout)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut total = 0;
    for s in &shares {
        let path = share_path(&a.out, s.hyperplane());
        write_share(&path, s)?;
        total += fs::metadata(&path)?.len();
    }
    fs::write(
        a.out.join(MANIFEST),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    writeln!(
        out,
        "encoded {} bytes into {} shares of {} symbols ({} bytes on disk, k = {}, expansion {:.2}, layout {})",
        bytes.len(),
        shares.len(),
        p.share_len() * p.sigma() as u64,
        total,
        p.k(),
        1.0 / p.rate(),
        a.layout
    )?;
    Ok(())
}

pub fn cmd_serve(a: &ServeArgs, out: &mut dyn Write) -> Result<()> {
    let share = read_share(&a.share, None)?;
    let l = share.hyperplane();
    let handle = serve(
        (a.host.as_str(), a.port),
        Responder::new(share, a.byzantine, a.seed),
    )?;
    writeln!(
        out,
        "server {l} listening on {} ({})",
        handle.addr(),
        a.byzantine
    )?;
    out.flush()?;
    handle.wait();
    Ok(())
}

/// Information bits one retrieval sends and receives.
pub fn expected_bits(p: &CodeParams) -> (f64, f64) {
    let lg = (p.q() as f64).log2();
    let per_server = p.q() as f64 * p.sigma() as f64 * lg;
    (
        per_server * (p.m() - 1) as f64,
        per_server * p.sigma() as f64,
    )
}

fn report_traffic(p: &CodeParams, t: &Traffic, runs: usize, out: &mut dyn Write) -> Result<()> {
    let (up, down) = expected_bits(p);
    let r = runs as f64;
    writeln!(out, "protocol runs: {runs}")?;
    writeln!(
        out,
        "uplink:   {} bits (expected {})",
        t.uplink_bits,
        up * r
    )?;
    writeln!(
        out,
        "downlink: {} bits (expected {})",
        t.downlink_bits,
        down * r
    )?;
    writeln!(
        out,
        "total:    {} bits (expected {})",
        t.info_bits(),
        (up + down) * r
    )?;
    writeln!(
        out,
        "on the wire: {} bytes ({} up, {} down, {} frame headers)",
        t.wire_bytes(),
        t.uplink_payload_bytes,
        t.downlink_payload_bytes,
        t.frame_header_bytes
    )?;
    if !t.rejected.is_empty() {
        writeln!(out, "rejected replies from servers {:?}", t.rejected)?;
    }
    Ok(())
}

fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_endpoints(path: &Path) -> Result<Vec<Endpoint>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_endpoints(&text)?)
}

pub fn cmd_retrieve(a: &RetrieveArgs, out: &mut dyn Write) -> Result<()> {
    let manifest = read_manifest(&a.manifest)?;
    let p = manifest.params()?;
    let endpoints = read_endpoints(&a.endpoints)?;
    let timeout = timeout_from_env();
    let mut rng = rng_from(a.seed);
    if let Some(j) = a.index {
        let r = retrieve(&p, &endpoints, j, &mut rng, timeout)?;
        let values: Vec<u16> = r.tuple.iter().map(|x| x.value()).collect();
        writeln!(out, "point {j}: {values:?}")?;
        return report_traffic(&p, &r.traffic, 1, out);
    }
    let (start, end) = match (a.record, a.record_size) {
        (Some(r), Some(b)) => {
            let start = r.checked_mul(b).context("record offset overflows")?;
            (
                start,
                start.checked_add(b).context("record offset overflows")?,
            )
        }
        _ => (0, manifest.byte_len),
    };
    let got = fetch_bytes(&manifest, &endpoints, start, end, &mut rng, timeout)?;
    match &a.out {
        Some(path) => {
            fs::write(path, &got.bytes)?;
            writeln!(out, "wrote {} bytes to {}", got.bytes.len(), path.display())?;
        }
        None => {
            let hex: String = got.bytes.iter().map(|b| format!("{b:02x}")).collect();
            writeln!(out, "bytes {start}..{end}: {hex}")?;
        }
    }
    report_traffic(&p, &got.traffic, got.runs, out)
}

pub fn cmd_privacy_audit(a: &AuditArgs, out: &mut dyn Write) -> Result<()> {
    let p = a.code.params()?;
    let report = privacy_audit(&p, a.trials, a.target, &mut rng_from(a.seed))?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        return Ok(());
    }
    writeln!(
        out,
        "q = {} m = {} s = {} d = {}, {} trials, fixed target {}",
        report.q, report.m, report.s, report.d, report.trials, report.target
    )?;
    writeln!(out, "server\ttv\tp_fixed\tp_random")?;
    for s in &report.servers {
        writeln!(
            out,
            "{}\t{:.4}\t{:.3}\t{:.3}",
            s.server, s.tv, s.fixed_p, s.random_p
        )?;
    }
    writeln!(out, "max tv distance: {:.4}", report.max_tv)?;
    writeln!(
        out,
        "direction uniformity p-value: {:.3}",
        report.direction_p
    )?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub q: usize,
    pub m: usize,
    pub s: usize,
    pub d: usize,
    pub transport: &'static str,
    pub faulty: usize,
    pub mode: String,
    pub trials: usize,
    pub correct: usize,
    /// Retrievals that reported an error.
    pub failed: usize,
    /// Retrievals that returned a wrong tuple.
    pub wrong: usize,
    pub mean_ms: f64,
    pub info_bits: f64,
}

pub fn bench(a: &BenchArgs) -> Result<BenchReport> {
    let p = a.code.params()?;
    p.check_pir()?;
    if a.faulty > p.q() {
        bail!("{} faulty servers out of {}", a.faulty, p.q());
    }
    let mut rng = rng_from(a.seed);
    let f = p.field().clone();
    let poly = MultiPoly::random(&f, p.m(), p.d(), &mut rng);
    let shares = preprocess(&p, &poly)?;
    let cw = concatenate(&shares)?;
    let mut modes = vec![ByzantineMode::Honest; p.q()];
    let mut order: Vec<usize> = (0..p.q()).collect();
    rand::seq::SliceRandom::shuffle(&mut order[..], &mut rng);
    for &l in &order[..a.faulty] {
        modes[l] = a.mode;
    }
    let seed = rng.gen();
    let (_handles, endpoints) = if a.tcp {
        spawn_local(&shares, &modes, seed)?
    } else {
        (Vec::new(), in_process(&shares, &modes, seed))
    };
    let timeout = timeout_from_env().max(Duration::from_secs(1));
    let (mut correct, mut failed, mut wrong) = (0, 0, 0);
    let mut bits = 0.0;
    let start = Instant::now();
    for _ in 0..a.trials {
        let j = rng.gen_range(0..p.n());
        match retrieve(&p, &endpoints, j, &mut rng, timeout) {
            Ok(r) => {
                bits = r.traffic.info_bits();
                if r.tuple == cw.symbol(j) {
                    correct += 1;
                } else {
                    wrong += 1;
                }
            }
            Err(RetrieveError::Decode(_)) => failed += 1,
            Err(e) => return Err(e.into()),
        }
    }
    let elapsed = start.elapsed();
    Ok(BenchReport {
        q: p.q(),
        m: p.m(),
        s: p.s(),
        d: p.d(),
        transport: if a.tcp { "tcp" } else { "in-process" },
        faulty: a.faulty,
        mode: a.mode.to_string(),
        trials: a.trials,
        correct,
        failed,
        wrong,
        mean_ms: elapsed.as_secs_f64() * 1e3 / a.trials.max(1) as f64,
        info_bits: bits,
    })
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let r = bench(a)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
        return Ok(());
    }
    writeln!(
        out,
        "q = {} m = {} s = {} d = {} over {}, {} {} server(s)",
        r.q, r.m, r.s, r.d, r.transport, r.faulty, r.mode
    )?;
    writeln!(
        out,
        "{} trials: {} correct, {} failed, {} wrong",
        r.trials, r.correct, r.failed, r.wrong
    )?;
    writeln!(
        out,
        "mean {:.2} ms per retrieval, {} information bits each",
        r.mean_ms, r.info_bits
    )?;
    Ok(())
}
