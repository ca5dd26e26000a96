//! Empirical privacy check of the query generator.
//!
//! For every server the audit compares the distribution of points it
//! receives when the client always asks for one fixed target with the
//! distribution under uniformly random targets (total variation distance of
//! the pooled point counts), and tests each against the uniform law on the
//! hyperplane with a chi-square test. The sampled direction classes are
//! tested for uniformity the same way.

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::multcode::CodeParams;
use crate::pir::{gen_queries, PirError};

pub const MIN_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("at least {MIN_TRIALS} trials are needed, got {0}")]
    TooFewTrials(usize),
    #[error("m = 1 has a single transversal direction; there is nothing to audit")]
    NoGeometry,
    #[error(transparent)]
    Pir(#[from] PirError),
}

#[derive(Debug, Clone, Serialize)]
pub struct ServerAudit {
    pub server: usize,
    /// TV distance between the fixed-target and random-target point laws.
    pub tv: f64,
    /// Chi-square p-value of the fixed-target point counts against uniform.
    pub fixed_p: f64,
    /// Same for random targets.
    pub random_p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub q: usize,
    pub m: usize,
    pub s: usize,
    pub d: usize,
    pub trials: usize,
    pub target: u64,
    pub servers: Vec<ServerAudit>,
    pub max_tv: f64,
    /// Chi-square p-value of the sampled direction classes against uniform.
    pub direction_p: f64,
}

/// Upper tail probability of the chi-square statistic of `counts` against
/// the uniform law on its cells.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let k = counts.len();
    if k < 2 || total == 0 {
        return 1.0;
    }
    let expect = total as f64 / k as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expect).powi(2) / expect)
        .sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}

/// `½ Σ |a_i/|a| - b_i/|b||`
pub fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    0.5 * a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 / na as f64 - y as f64 / nb as f64).abs())
        .sum::<f64>()
}

struct Counts {
    points: Vec<Vec<u64>>,
    classes: Vec<u64>,
}

fn sample<R: Rng + ?Sized>(
    params: &CodeParams,
    trials: usize,
    target: Option<u64>,
    rng: &mut R,
) -> Result<Counts, AuditError> {
    let q = params.q();
    let cells = params.share_len() as usize;
    let mut counts = Counts {
        points: vec![vec![0; cells]; q],
        classes: vec![0; params.transversal_count() as usize],
    };
    let qq = q as u64;
    for _ in 0..trials {
        let j = target.unwrap_or_else(|| rng.gen_range(0..params.n()));
        let plan = gen_queries(params, j, rng)?;
        for (l, batch) in plan.batches().iter().enumerate() {
            for x in batch {
                let local = x
                    .iter()
                    .rev()
                    .fold(0u64, |acc, v| acc * qq + v.index() as u64);
                counts.points[l][local as usize] += 1;
            }
        }
        for &c in plan.lines().classes() {
            counts.classes[c as usize] += 1;
        }
    }
    Ok(counts)
}

/// Runs `trials` query generations for target `target` and as many for
/// uniformly random targets.
pub fn privacy_audit<R: Rng + ?Sized>(
    params: &CodeParams,
    trials: usize,
    target: u64,
    rng: &mut R,
) -> Result<AuditReport, AuditError> {
    if trials < MIN_TRIALS {
        return Err(AuditError::TooFewTrials(trials));
    }
    if params.m() < 2 {
        return Err(AuditError::NoGeometry);
    }
    params.check_pir().map_err(PirError::from)?;
    params.point(target).map_err(PirError::from)?;
    let fixed = sample(params, trials, Some(target), rng)?;
    let random = sample(params, trials, None, rng)?;
    let servers: Vec<ServerAudit> = (0..params.q())
        .map(|l| ServerAudit {
            server: l,
            tv: total_variation(&fixed.points[l], &random.points[l]),
            fixed_p: chi_square_uniform(&fixed.points[l]),
            random_p: chi_square_uniform(&random.points[l]),
        })
        .collect();
    let max_tv = servers.iter().map(|s| s.tv).fold(0.0, f64::max);
    let all_classes: Vec<u64> = fixed
        .classes
        .iter()
        .zip(&random.classes)
        .map(|(a, b)| a + b)
        .collect();
    Ok(AuditReport {
        q: params.q(),
        m: params.m(),
        s: params.s(),
        d: params.d(),
        trials,
        target,
        servers,
        max_tv,
        direction_p: chi_square_uniform(&all_classes),
    })
}
