//! Acceptance criteria. Each test prints one PASS/FAIL line with its runtime
//! bound; the tests share a lock so timings are not inflated by running
//! concurrently.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use mpir::audit::privacy_audit;
use mpir::cli::run_from;
use mpir::field::{Fe, Field};
use mpir::mpoly::{graded_lex, MultiPoly, UniPoly};
use mpir::multcode::{concatenate, encode, CodeParams};
use mpir::pir::{preprocess, ByzantineMode};
use mpir::sizing::{auto_select, DbConfig};
use mpir::store::{encode_bytes, Layout};
use mpir::transport::{
    header_len, in_process, retrieve, spawn_local, write_share, Endpoint, RetrieveError,
};
use mpir::unidecode::{bw_decode, LineWord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());
const TIMEOUT: Duration = Duration::from_secs(5);

fn check(n: u32, name: &str, bound_s: f64, body: impl FnOnce() -> Result<String, String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = body();
    let secs = start.elapsed().as_secs_f64();
    let in_time = secs < bound_s;
    let (ok, detail) = match &outcome {
        Ok(d) => (in_time, d.clone()),
        Err(d) => (false, d.clone()),
    };
    println!(
        "criterion {n:2} [{}] {name}: {detail} ({secs:.2} s, bound {bound_s} s)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(outcome.is_ok(), "criterion {n}: {detail}");
    assert!(in_time, "criterion {n}: {secs:.2} s exceeds {bound_s} s");
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `C(n, r)` by Pascal's rule.
fn choose(n: u64, r: u64) -> u128 {
    let r = r.min(n - r.min(n));
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

// ---------------------------------------------------------------- 1

// q, m, s, d, k, queries, servers, std overhead, overhead, std comm, comm
type Row = (
    usize,
    usize,
    usize,
    usize,
    u64,
    u64,
    u64,
    &'static str,
    &'static str,
    u64,
    u64,
);

const TABLE: [Row; 36] = [
    (16, 2, 1, 14, 120, 15, 16, "32", "2.1", 180, 128),
    (16, 2, 2, 29, 465, 45, 16, "25", "1.7", 900, 768),
    (16, 2, 3, 44, 1035, 90, 16, "22", "1.5", 2880, 2688),
    (16, 2, 4, 59, 1830, 150, 16, "21", "1.4", 7200, 7040),
    (16, 2, 5, 74, 2850, 225, 16, "20", "1.3", 15300, 15360),
    (16, 2, 6, 89, 4095, 315, 16, "20", "1.3", 28980, 29568),
    (16, 3, 1, 14, 680, 15, 16, "90", "6.0", 240, 192),
    (16, 3, 2, 29, 4960, 60, 16, "50", "3.3", 1680, 1536),
    (16, 3, 3, 44, 16215, 150, 16, "38", "2.5", 7800, 7680),
    (16, 3, 4, 59, 37820, 300, 16, "32", "2.2", 27600, 28160),
    (16, 3, 5, 74, 73150, 525, 16, "29", "2.0", 79800, 82880),
    (16, 3, 6, 89, 125580, 840, 16, "27", "1.8", 198240, 207872),
    (16, 4, 1, 14, 3060, 15, 16, "320", "21", 300, 256),
    (16, 4, 2, 29, 40920, 75, 16, "120", "8.0", 2700, 2560),
    (16, 4, 3, 44, 194580, 225, 16, "76", "5.1", 17100, 17280),
    (16, 4, 4, 59, 595665, 525, 16, "58", "3.9", 81900, 85120),
    (16, 4, 5, 74, 1426425, 1050, 16, "48", "3.2", 310800, 327040),
    (
        16, 4, 6, 89, 2919735, 1890, 16, "42", "2.8", 982800, 1040256,
    ),
    (256, 2, 1, 254, 32640, 255, 256, "510", "2.0", 6120, 4096),
    (256, 2, 2, 509, 130305, 765, 256, "380", "1.5", 30600, 24576),
    (
        256, 2, 3, 764, 292995, 1530, 256, "340", "1.3", 97920, 86016,
    ),
    (
        256, 2, 4, 1019, 520710, 2550, 256, "320", "1.3", 244800, 225280,
    ),
    (
        256, 2, 5, 1274, 813450, 3825, 256, "310", "1.2", 520200, 491520,
    ),
    (
        256, 2, 6, 1529, 1171215, 5355, 256, "300", "1.2", 985320, 946176,
    ),
    (256, 3, 1, 254, 2796160, 255, 256, "1500", "6.0", 8160, 6144),
    (
        256, 3, 2, 509, 22238720, 1020, 256, "770", "3.0", 57120, 49152,
    ),
    (
        256, 3, 3, 764, 74909055, 2550, 256, "570", "2.2", 265200, 245760,
    ),
    (
        256, 3, 4, 1019, 177388540, 5100, 256, "480", "1.9", 938400, 901120,
    ),
    (
        256, 3, 5, 1274, 346258550, 8925, 256, "430", "1.7", 2713200, 2652160,
    ),
    (
        256, 3, 6, 1529, 598100460, 14280, 256, "400", "1.6", 6740160, 6651904,
    ),
    (
        256, 4, 1, 254, 180352320, 255, 256, "6100", "24", 10200, 8192,
    ),
    (
        256, 4, 2, 509, 2852115840, 1275, 256, "1900", "7.5", 91800, 81920,
    ),
    (
        256,
        4,
        3,
        764,
        14382538560,
        3825,
        256,
        "1100",
        "4.5",
        581400,
        552960,
    ),
    (
        256,
        4,
        4,
        1019,
        45367119105,
        8925,
        256,
        "840",
        "3.3",
        2784600,
        2723840,
    ),
    (
        256,
        4,
        5,
        1274,
        110629606725,
        17850,
        256,
        "690",
        "2.7",
        10567200,
        10465280,
    ),
    (
        256,
        4,
        6,
        1529,
        229222001295,
        32130,
        256,
        "600",
        "2.4",
        33415200,
        33288192,
    ),
];

/// One unit in the last displayed digit of a two-significant-digit value.
fn display_unit(text: &str) -> f64 {
    if let Some(dot) = text.find('.') {
        return 10f64.powi(-((text.len() - dot - 1) as i32));
    }
    let v: f64 = text.parse().unwrap();
    if v < 10.0 {
        1.0
    } else {
        10f64.powi(v.log10().floor() as i32 - 1)
    }
}

#[test]
fn criterion_01_table() {
    check(1, "cost table", 1.0, || {
        let mut out = Vec::new();
        run_from(["mpir", "params", "--table"], &mut out).map_err(|e| e.to_string())?;
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<Vec<&str>> = text
            .lines()
            .skip(1)
            .map(|l| l.split('\t').collect())
            .collect();
        ensure(rows.len() == 36, || format!("{} rows", rows.len()))?;
        for (got, want) in rows.iter().zip(TABLE.iter()) {
            let (q, m, s, d, k, queries, servers, std_o, o, std_c, c) = *want;
            let ints: Vec<u64> = got[..7].iter().map(|x| x.parse().unwrap()).collect();
            ensure(
                ints == [q as u64, m as u64, s as u64, d as u64, k, queries, servers],
                || format!("row {want:?}: got {got:?}"),
            )?;
            // the formulas themselves, independently of the library
            let sigma = choose((m + s - 1) as u64, m as u64);
            ensure(choose((m + d) as u64, m as u64) == k as u128, || {
                format!("k at {want:?}")
            })?;
            ensure(sigma * (q as u128 - 1) == queries as u128, || {
                format!("queries at {want:?}")
            })?;
            for (shown, want_s) in [(got[7], std_o), (got[8], o)] {
                let diff = (shown.parse::<f64>().unwrap() - want_s.parse::<f64>().unwrap()).abs();
                ensure(diff <= display_unit(want_s) + 1e-9, || {
                    format!("overhead {shown} vs {want_s} at {want:?}")
                })?;
            }
            for (shown, want_c) in [(got[9], std_c), (got[10], c)] {
                let diff = (shown.parse::<f64>().unwrap() - want_c as f64).abs();
                ensure(diff <= 1.0, || {
                    format!("communication {shown} vs {want_c} at {want:?}")
                })?;
            }
        }
        Ok("36/36 rows match".into())
    });
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_02_communication() {
    check(2, "communication bits", 1.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut parts = Vec::new();
        for (s, d, up, down) in [(2, 29, 192.0, 576.0), (1, 14, 64.0, 64.0)] {
            let f = Field::gf16();
            let p = CodeParams::new(&f, 2, s, d).unwrap();
            let shares = preprocess(&p, &MultiPoly::random(&f, 2, d, &mut rng)).unwrap();
            let eps = in_process(&shares, &[], 2);
            let j = rng.gen_range(0..p.n());
            let r = retrieve(&p, &eps, j, &mut rng, TIMEOUT).map_err(|e| e.to_string())?;
            let t = &r.traffic;
            ensure(t.uplink_bits == up && t.downlink_bits == down, || {
                format!(
                    "(16,2,{s},{d}): {} + {} bits",
                    t.uplink_bits, t.downlink_bits
                )
            })?;
            parts.push(format!(
                "(16,2,{s},{d}) {} = {} + {}",
                t.info_bits(),
                up,
                down
            ));
        }
        Ok(parts.join(", "))
    });
}

// ---------------------------------------------------------------- 3

/// Evaluation tuple straight from Hasse derivatives of `F`.
fn oracle_tuple(p: &CodeParams, poly: &MultiPoly, j: u64) -> Vec<Fe> {
    let point = p.point(j).unwrap();
    p.derivative_orders()
        .iter()
        .map(|v| {
            poly.hasse_derivative(v.exponents())
                .unwrap()
                .eval(&point)
                .unwrap()
        })
        .collect()
}

#[test]
fn criterion_03_correctness() {
    check(3, "end-to-end correctness", 30.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut runs = 0;
        for (q, m, s, d) in [(16u64, 2, 2, 29), (4, 3, 2, 5)] {
            let f = Field::of_order(q).unwrap();
            let p = CodeParams::new(&f, m, s, d).unwrap();
            for trial in 0..100 {
                let poly = MultiPoly::random(&f, m, d, &mut rng);
                let shares = preprocess(&p, &poly).unwrap();
                let j = rng.gen_range(0..p.n());
                let want = oracle_tuple(&p, &poly, j);
                let (handles, tcp) = spawn_local(&shares, &[], trial).map_err(|e| e.to_string())?;
                let local = in_process(&shares, &[], trial);
                for (name, eps) in [("tcp", &tcp), ("in-process", &local)] {
                    let got = retrieve(&p, eps, j, &mut rng, TIMEOUT)
                        .map_err(|e| format!("{name} ({q},{m},{s},{d}) j={j}: {e}"))?;
                    ensure(got.tuple == want, || {
                        format!("{name} ({q},{m},{s},{d}) j={j}: wrong tuple")
                    })?;
                    runs += 1;
                }
                drop(handles);
            }
        }
        Ok(format!(
            "{runs}/{runs} retrievals correct over TCP and in-process"
        ))
    });
}

// ---------------------------------------------------------------- 4

fn byzantine_run(
    p: &CodeParams,
    bad: usize,
    mode: ByzantineMode,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> (usize, usize, usize) {
    let f = p.field().clone();
    let (mut correct, mut failed, mut wrong) = (0, 0, 0);
    for trial in 0..trials {
        let poly = MultiPoly::random(&f, p.m(), p.d(), rng);
        let shares = preprocess(p, &poly).unwrap();
        let mut servers: Vec<usize> = (0..p.q()).collect();
        servers.shuffle(rng);
        let mut modes = vec![ByzantineMode::Honest; p.q()];
        for &l in &servers[..bad] {
            modes[l] = mode;
        }
        let eps: Vec<Endpoint> = in_process(&shares, &modes, trial as u64);
        let j = rng.gen_range(0..p.n());
        match retrieve(p, &eps, j, rng, TIMEOUT) {
            Ok(r) if r.tuple == oracle_tuple(p, &poly, j) => correct += 1,
            Ok(_) => wrong += 1,
            Err(RetrieveError::Decode(_)) => failed += 1,
            Err(e) => panic!("transport: {e}"),
        }
    }
    (correct, failed, wrong)
}

#[test]
fn criterion_04_byzantine() {
    check(4, "Byzantine robustness", 60.0, || {
        let p = CodeParams::new(&Field::gf16(), 2, 2, 14).unwrap();
        ensure(p.nu() == 4, || format!("nu = {}", p.nu()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut parts = Vec::new();
        for mode in [
            ByzantineMode::Garbage,
            ByzantineMode::Fixed,
            ByzantineMode::BitFlip,
        ] {
            let (c, fl, w) = byzantine_run(&p, 4, mode, 100, &mut rng);
            ensure(c == 100, || {
                format!("4 {mode}: {c} correct, {fl} failed, {w} wrong")
            })?;
            let (c5, f5, w5) = byzantine_run(&p, 5, mode, 100, &mut rng);
            ensure(w5 == 0, || format!("5 {mode}: {w5} wrong outputs accepted"))?;
            parts.push(format!("{mode} 4: 100/100, 5: {c5} ok {f5} refused"));
        }
        Ok(parts.join("; "))
    });
}

// ---------------------------------------------------------------- 5

fn random_uni(f: &Field, deg: usize, rng: &mut ChaCha8Rng) -> UniPoly {
    UniPoly::new(f, (0..=deg).map(|_| f.random(rng)).collect())
}

#[test]
fn criterion_05_univariate_exhaustive() {
    check(5, "univariate decoder exhaustiveness", 120.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = Field::new(2, 3).unwrap();
        let (s, d) = (2, 5);
        let pairs: Vec<[Fe; 2]> = f
            .elements()
            .flat_map(|a| f.elements().map(move |b| [a, b]))
            .collect();
        let mut cases = 0u64;
        for _ in 0..10 {
            let g = random_uni(&f, d, &mut rng);
            let clean = LineWord::of_poly(&g, s);
            let decode = |w: &LineWord| -> Result<(), String> {
                match bw_decode(&f, w, d) {
                    Ok(h) if h == g => Ok(()),
                    Ok(_) => Err("wrong polynomial".into()),
                    Err(e) => Err(e.to_string()),
                }
            };
            decode(&clean)?;
            let n = clean.len();
            for b1 in 0..n {
                for e1 in pairs.iter().filter(|e| e[..] != *clean.position(b1)) {
                    let mut w = clean.clone();
                    w.position_mut(b1).copy_from_slice(e1);
                    decode(&w).map_err(|e| format!("error at {b1}: {e}"))?;
                    cases += 1;
                    for b2 in b1 + 1..n {
                        for e2 in pairs.iter().filter(|e| e[..] != *clean.position(b2)) {
                            let mut w2 = w.clone();
                            w2.position_mut(b2).copy_from_slice(e2);
                            decode(&w2).map_err(|e| format!("errors at {b1},{b2}: {e}"))?;
                            cases += 1;
                        }
                    }
                }
            }
        }
        let f5 = Field::new(5, 1).unwrap();
        for c0 in f5.elements() {
            for c1 in f5.elements() {
                let g = UniPoly::new(&f5, vec![c0, c1]);
                let clean = LineWord::of_poly(&g, 1);
                for b in 0..clean.len() {
                    for v in f5.elements().filter(|v| *v != clean.position(b)[0]) {
                        let mut w = clean.clone();
                        w.position_mut(b)[0] = v;
                        let h = bw_decode(&f5, &w, 1)
                            .map_err(|e| format!("GF(5) error at {b}: {e}"))?;
                        ensure(h == g, || format!("GF(5) error at {b}: wrong polynomial"))?;
                        cases += 1;
                    }
                }
            }
        }
        Ok(format!("{cases} corruption patterns decoded"))
    });
}

// ---------------------------------------------------------------- 6

#[test]
fn criterion_06_minimum_distance() {
    check(6, "minimum distance", 10.0, || {
        let f = Field::new(3, 1).unwrap();
        let p = CodeParams::new(&f, 1, 2, 3).unwrap();
        let bound = 3.0 - 1.5;
        let elems: Vec<Fe> = f.elements().collect();
        let mut min = usize::MAX;
        for code in 1..81u32 {
            let coeffs: Vec<Fe> = (0..4)
                .map(|i| elems[(code / 3u32.pow(i) % 3) as usize])
                .collect();
            let g = UniPoly::new(&f, coeffs.clone());
            let poly = MultiPoly::from_graded_lex(&f, 1, 3, &coeffs).unwrap();
            let cw = encode(&p, &poly).unwrap();
            // weight from value and first derivative computed by hand
            let manual = elems
                .iter()
                .filter(|&&x| {
                    let v = g.eval(x);
                    let dv = (1..4).fold(Fe::ZERO, |acc, k| {
                        f.add(
                            acc,
                            f.mul(
                                f.from_int(k as u64),
                                f.mul(g.coeff(k), f.pow(x, k as u64 - 1)),
                            ),
                        )
                    });
                    !v.is_zero() || !dv.is_zero()
                })
                .count();
            ensure(manual as u64 == cw.weight(), || {
                format!("weight mismatch for {coeffs:?}")
            })?;
            min = min.min(manual);
        }
        ensure(min as f64 >= bound, || {
            format!("weight {min} below {bound}")
        })?;
        Ok(format!("80 nonzero codewords, min weight {min} >= {bound}"))
    });
}

// ---------------------------------------------------------------- 7

/// Binomial coefficients reduced mod p, by Pascal's rule.
fn pascal_mod(p: u32, n: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        t[i][0] = 1;
        for j in 1..=i {
            t[i][j] = (t[i - 1][j - 1] + t[i - 1][j]) % p as u64;
        }
    }
    t
}

/// `F(X + Z)` expanded in `2m` variables, with `X` first.
fn shifted(f: &Field, poly: &MultiPoly) -> MultiPoly {
    let m = poly.nvars();
    let sums: Vec<MultiPoly> = (0..m)
        .map(|t| MultiPoly::var(f, 2 * m, t).add(&MultiPoly::var(f, 2 * m, m + t)))
        .collect();
    let mut acc = MultiPoly::zero(f, 2 * m);
    for (mono, c) in poly.terms() {
        let mut term = MultiPoly::constant(f, 2 * m, c);
        for (t, &e) in mono.exponents().iter().enumerate() {
            for _ in 0..e {
                term = term.mul(&sums[t]);
            }
        }
        acc = acc.add(&term);
    }
    acc
}

/// `F(P + T V)` by univariate products.
fn on_line(f: &Field, poly: &MultiPoly, p: &[Fe], v: &[Fe]) -> UniPoly {
    let mut acc = UniPoly::zero(f);
    for (mono, c) in poly.terms() {
        let mut term = UniPoly::constant(f, c);
        for (t, &e) in mono.exponents().iter().enumerate() {
            let lin = UniPoly::new(f, vec![p[t], v[t]]);
            for _ in 0..e {
                term = term.mul(&lin);
            }
        }
        acc = acc.add(&term);
    }
    acc
}

#[test]
fn criterion_07_hasse_calculus() {
    check(7, "Hasse calculus identities", 60.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let deg = 6;
        let mut sets = 0;
        for q in [4u64, 5, 16] {
            let f = Field::of_order(q).unwrap();
            let binom = pascal_mod(f.characteristic(), deg);
            for m in 1..=3 {
                for _ in 0..1000 {
                    let poly = MultiPoly::random(&f, m, deg, &mut rng);
                    // shift expansion: coefficient of Z^i in F(X+Z)
                    let mut by_i: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
                    for (mono, c) in shifted(&f, &poly).terms() {
                        let (x, z) = mono.exponents().split_at(m);
                        let part = by_i
                            .entry(z.to_vec())
                            .or_insert_with(|| MultiPoly::zero(&f, m));
                        *part = part.add(&MultiPoly::monomial(&f, x, c));
                    }
                    for i in graded_lex(m, deg) {
                        let want = by_i
                            .remove(i.exponents())
                            .unwrap_or_else(|| MultiPoly::zero(&f, m));
                        let got = poly.hasse_derivative(i.exponents()).unwrap();
                        ensure(got == want, || {
                            format!("shift expansion q={q} m={m} i={:?}", i.exponents())
                        })?;
                    }
                    let pt: Vec<Fe> = (0..m).map(|_| f.random(&mut rng)).collect();
                    let mut dir: Vec<Fe> = (0..m).map(|_| f.random(&mut rng)).collect();
                    if dir.iter().all(|x| x.is_zero()) {
                        dir[0] = Fe::ONE;
                    }
                    let g = on_line(&f, &poly, &pt, &dir);
                    let alpha = f.random(&mut rng);
                    for i in 0..=deg {
                        ensure(
                            poly.line_coeff_identity(&pt, &dir, i).unwrap() == g.coeff(i),
                            || format!("line coefficients q={q} m={m} i={i}"),
                        )?;
                        // i-th Hasse derivative of g at alpha
                        let want =
                            binom[i..]
                                .iter()
                                .enumerate()
                                .fold(Fe::ZERO, |acc, (off, row)| {
                                    let k = i + off;
                                    let c = f.from_int(row[i]);
                                    f.add(
                                        acc,
                                        f.mul(c, f.mul(g.coeff(k), f.pow(alpha, (k - i) as u64))),
                                    )
                                });
                        ensure(
                            poly.line_hasse_identity(&pt, &dir, i, alpha).unwrap() == want,
                            || format!("line Hasse derivative q={q} m={m} i={i}"),
                        )?;
                    }
                }
                sets += 1;
            }
        }
        Ok(format!("{sets} parameter sets x 1000 instances"))
    });
}

// ---------------------------------------------------------------- 8

#[test]
fn criterion_08_privacy() {
    check(8, "privacy audit", 60.0, || {
        let p = CodeParams::new(&Field::new(2, 2).unwrap(), 3, 2, 5).unwrap();
        let report = privacy_audit(&p, 20_000, 0, &mut ChaCha8Rng::seed_from_u64(8))
            .map_err(|e| e.to_string())?;
        ensure(report.max_tv < 0.02, || {
            format!("max TV {:.4}", report.max_tv)
        })?;
        ensure(report.direction_p > 0.01, || {
            format!("direction p {:.4}", report.direction_p)
        })?;
        Ok(format!(
            "max TV {:.4} < 0.02, direction p {:.3} > 0.01",
            report.max_tv, report.direction_p
        ))
    });
}

// ---------------------------------------------------------------- 9

#[test]
fn criterion_09_storage() {
    check(9, "storage overhead", 1.0, || {
        let f = Field::gf16();
        let p = CodeParams::new(&f, 2, 2, 29).unwrap();
        let data: Vec<u8> = (0..232).map(|i| (i * 7) as u8).collect();
        let (shares, _) =
            encode_bytes(&p, &data, Layout::Coefficients).map_err(|e| e.to_string())?;
        let header = header_len(&f) as u64;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut symbols = 0;
        let mut total_bytes = 0;
        for s in &shares {
            let path = dir.path().join(format!("share-{}.mpir", s.hyperplane()));
            write_share(&path, s).map_err(|e| e.to_string())?;
            let len = std::fs::metadata(&path).map_err(|e| e.to_string())?.len();
            total_bytes += len;
            let per = ((len - header) / f.symbol_bytes() as u64) as usize;
            // k / (R q) = sigma q^(m-1)
            ensure(per == 3 * 16, || {
                format!("server {} stores {per} symbols", s.hyperplane())
            })?;
            symbols += per;
        }
        ensure(
            concatenate(&shares).unwrap().symbols().len() == 3 * 256,
            || "codeword length".into(),
        )?;
        let k = choose(31, 2) as usize;
        let ratio = symbols as f64 / k as f64;
        ensure(symbols == 3 * 256, || format!("{symbols} symbols"))?;
        ensure((ratio - 1.65).abs() < 0.005, || format!("ratio {ratio:.4}"))?;
        Ok(format!(
            "{total_bytes} bytes on disk = {symbols} symbols + {} header bytes; k = {k}, ratio {ratio:.3}, 48 per server",
            16 * header
        ))
    });
}

// ---------------------------------------------------------------- 10

#[test]
fn criterion_10_sizing() {
    check(10, "database sizing", 5.0, || {
        let db: DbConfig = "90000,1,128".parse().unwrap();
        let a = auto_select(&db, &[256], Some(3), Some(1)).map_err(|e| e.to_string())?;
        let b = auto_select(&db, &[16], Some(4), Some(6)).map_err(|e| e.to_string())?;
        ensure(
            a.row.k as u128 == choose(257, 3) && a.row.k == 2_796_160,
            || format!("k = {}", a.row.k),
        )?;
        ensure(a.row.overhead_display() == "6.0", || {
            a.row.overhead_display()
        })?;
        ensure(
            b.row.k as u128 == choose(93, 4) && b.row.k == 2_919_735,
            || format!("k = {}", b.row.k),
        )?;
        ensure(
            b.row.overhead_display() == "2.8" && b.row.servers == 16,
            || b.row.overhead_display(),
        )?;
        let free = auto_select(&db, &[16], None, None).map_err(|e| e.to_string())?;
        ensure((free.row.m, free.row.s) == (4, 6), || {
            format!("free search chose {:?}", (free.row.m, free.row.s))
        })?;
        Ok("q=256 (3,1) k=2796160 x6.0; q=16 (4,6) k=2919735 x2.8".into())
    });
}
