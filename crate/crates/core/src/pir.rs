//! The `q`-server PIR protocol over hyperplane shares.
//!
//! To read the tuple at `P_j`, the client picks `σ` transversal lines through
//! `P_j`. Each line meets every hyperplane `H_ℓ` exactly once, so server `ℓ`
//! is asked for `σ` points of its own share. The server holding `P_j` would
//! learn the target, so it is sent `σ` fake points instead and its answers are
//! ignored; the remaining `q - 1` servers supply one position of every line.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::field::{Fe, Field};
use crate::localdecode::{
    is_nondegenerate, plan_lines, recover_symbol, LineQuerySet, LocalError, MAX_RESAMPLES,
};
use crate::mpoly::MultiPoly;
use crate::multcode::{encode, partition, CodeError, CodeParams, EvalTuple, ParamError, Share};

/// One tuple per queried point, in query order.
pub type ServerAnswer = Vec<EvalTuple>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PirError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] LocalError),
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("expected {expected} answers, got {got}")]
    AnswerCount { expected: usize, got: usize },
}

/// A query for `P_j` together with the client state needed to decode it.
#[derive(Debug, Clone)]
pub struct QueryPlan {
    params: CodeParams,
    target: u64,
    hiding: usize,
    lines: LineQuerySet,
    batches: Vec<Vec<Vec<Fe>>>,
    // slots[ℓ][i] = batch position of line i at server ℓ (unused for the hiding server)
    slots: Vec<Vec<usize>>,
}

impl QueryPlan {
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    /// Index of the hyperplane containing the target.
    pub fn hiding(&self) -> usize {
        self.hiding
    }

    pub fn lines(&self) -> &LineQuerySet {
        &self.lines
    }

    /// The `σ` points sent to server `ℓ`, as their first `m-1` coordinates.
    pub fn batch(&self, server: usize) -> &[Vec<Fe>] {
        &self.batches[server]
    }

    pub fn batches(&self) -> &[Vec<Vec<Fe>>] {
        &self.batches
    }
}

/// Encodes `F` and splits the codeword into the `q` server shares.
pub fn preprocess(params: &CodeParams, poly: &MultiPoly) -> Result<Vec<Share>, PirError> {
    params.check_pir()?;
    Ok(partition(&encode(params, poly)?))
}

fn fake_batch<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Result<Vec<Vec<Fe>>, PirError> {
    let m = params.m();
    for _ in 0..MAX_RESAMPLES {
        let locals = sample(rng, params.share_len() as usize, params.sigma());
        let dirs: Vec<Vec<Fe>> = locals
            .iter()
            .map(|l| {
                let mut u = params.point(l as u64).expect("local index below n")[..m - 1].to_vec();
                u.push(Fe::ONE);
                u
            })
            .collect();
        if is_nondegenerate(params, &dirs) {
            let mut batch: Vec<Vec<Fe>> = dirs
                .into_iter()
                .map(|mut u| {
                    u.pop();
                    u
                })
                .collect();
            batch.shuffle(rng);
            return Ok(batch);
        }
    }
    Err(LocalError::Degenerate(MAX_RESAMPLES).into())
}

/// Builds the per-server batches for target index `j`.
///
/// Every server, the hiding one included, receives `σ` distinct points whose
/// set is uniform over the non-degenerate `σ`-subsets of its hyperplane, in a
/// uniformly random order.
pub fn gen_queries<R: Rng + ?Sized>(
    params: &CodeParams,
    j: u64,
    rng: &mut R,
) -> Result<QueryPlan, PirError> {
    params.check_pir()?;
    let q = params.q();
    let m = params.m();
    let sigma = params.sigma();
    let lines = plan_lines(params, j, rng, true)?;
    let hiding = params.hyperplane_of(j);
    let f = params.field();
    let p_m = params.point(j)?[m - 1];
    let mut batches = Vec::with_capacity(q);
    let mut slots = Vec::with_capacity(q);
    for l in 0..q {
        if l == hiding {
            batches.push(fake_batch(params, rng)?);
            slots.push(Vec::new());
            continue;
        }
        // the line point with T = α_b lies on H_ℓ when α_ℓ = P_m + α_b
        let b = f.sub(f.alpha(l), p_m).index();
        let mut perm: Vec<usize> = (0..sigma).collect();
        perm.shuffle(rng);
        let mut batch = vec![Vec::new(); sigma];
        for (i, pts) in lines.points().iter().enumerate() {
            let point = params.point(pts[b - 1])?;
            batch[perm[i]] = point[..m - 1].to_vec();
        }
        batches.push(batch);
        slots.push(perm);
    }
    Ok(QueryPlan {
        params: params.clone(),
        target: j,
        hiding,
        lines,
        batches,
        slots,
    })
}

/// Looks up the stored tuple of every queried point.
pub fn answer(share: &Share, points: &[Vec<Fe>]) -> Result<ServerAnswer, PirError> {
    let sigma = share.params().sigma();
    if points.len() != sigma {
        return Err(PirError::MalformedQuery(format!(
            "{} points, expected {sigma}",
            points.len()
        )));
    }
    points
        .iter()
        .map(|xs| {
            share
                .lookup(xs)
                .map(<[Fe]>::to_vec)
                .map_err(|e| PirError::MalformedQuery(e.to_string()))
        })
        .collect()
}

/// Behaviour of a simulated server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ByzantineMode {
    #[default]
    Honest,
    /// Uniformly random tuples.
    Garbage,
    /// Every symbol replaced by one.
    Fixed,
    /// Lowest bit of every symbol flipped.
    BitFlip,
}

impl ByzantineMode {
    pub const ALL: [ByzantineMode; 4] = [
        ByzantineMode::Honest,
        ByzantineMode::Garbage,
        ByzantineMode::Fixed,
        ByzantineMode::BitFlip,
    ];

    pub fn corrupt<R: Rng + ?Sized>(self, field: &Field, answer: &mut ServerAnswer, rng: &mut R) {
        let q = field.order() as u16;
        for x in answer.iter_mut().flatten() {
            *x = match self {
                ByzantineMode::Honest => *x,
                ByzantineMode::Garbage => field.random(rng),
                ByzantineMode::Fixed => Fe::ONE,
                ByzantineMode::BitFlip => {
                    let v = x.value() ^ 1;
                    let v = if v >= q { x.value() - 1 } else { v };
                    field.elem(v as u64).expect("below q")
                }
            };
        }
    }
}

impl fmt::Display for ByzantineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ByzantineMode::Honest => "honest",
            ByzantineMode::Garbage => "garbage",
            ByzantineMode::Fixed => "fixed",
            ByzantineMode::BitFlip => "bit-flip",
        })
    }
}

impl FromStr for ByzantineMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ByzantineMode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown mode {s:?} (honest, garbage, fixed, bit-flip)"))
    }
}

/// Decodes the target tuple from one answer per server (index = server).
///
/// Answers from the hiding server are ignored. An answer of the wrong shape
/// or with values outside the field is treated like any other corrupted
/// answer.
pub fn reconstruct(plan: &QueryPlan, answers: &[ServerAnswer]) -> Result<EvalTuple, PirError> {
    let p = &plan.params;
    let q = p.q();
    let sigma = p.sigma();
    if answers.len() != q {
        return Err(PirError::AnswerCount {
            expected: q,
            got: answers.len(),
        });
    }
    let f = p.field();
    let zero = vec![Fe::ZERO; sigma];
    let well_formed: Vec<bool> = answers
        .iter()
        .map(|a| {
            a.len() == sigma
                && a.iter()
                    .all(|t| t.len() == sigma && t.iter().all(|&x| f.contains(x)))
        })
        .collect();
    let p_m = p.point(plan.target)?[p.m() - 1];
    let per_line: Vec<Vec<&[Fe]>> = (0..sigma)
        .map(|i| {
            (1..q)
                .map(|b| {
                    let l = f.add(p_m, f.alpha(b)).index();
                    if well_formed[l] {
                        &answers[l][plan.slots[l][i]][..]
                    } else {
                        &zero[..]
                    }
                })
                .collect()
        })
        .collect();
    Ok(recover_symbol(p, &plan.lines, &per_line)?)
}

/// Runs the protocol against in-memory shares, `modes[ℓ]` selecting each
/// server's behaviour.
pub fn retrieve_local<R: Rng + ?Sized>(
    shares: &[Share],
    modes: &[ByzantineMode],
    j: u64,
    rng: &mut R,
) -> Result<EvalTuple, PirError> {
    let params = shares.first().ok_or(CodeError::BadShares)?.params().clone();
    let plan = gen_queries(&params, j, rng)?;
    let mut answers = Vec::with_capacity(shares.len());
    for share in shares {
        let l = share.hyperplane();
        let mut a = answer(share, plan.batch(l))?;
        modes
            .get(l)
            .copied()
            .unwrap_or_default()
            .corrupt(params.field(), &mut a, rng);
        answers.push(a);
    }
    reconstruct(&plan, &answers)
}
