//! Local self-correction of one codeword symbol from `σ` lines through its
//! point.
//!
//! On the line `P + T·U` the restriction `G = F|_{P,U}` satisfies
//! `coeff_e(G) = Σ_{|v|=e} F^{(v)}(P) U^v` and
//! `G^{(e)}(α) = Σ_{|v|=e} F^{(v)}(P + αU) U^v`. The second identity turns the
//! codeword symbols read at `P + α_b U` into a univariate word for `G`; after
//! decoding every line, the first identity is a linear system for the `σ`
//! unknowns `F^{(v)}(P)`. It splits into one block per order `e`, each with
//! `σ` equations in `C(m+e-1, e)` unknowns.

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::field::{Fe, Field};
use crate::linalg::{solve, Matrix, SolveError};
use crate::mpoly::monomial_value;
use crate::multcode::{CodeError, CodeParams, EvalTuple};
use crate::unidecode::{decode_line, DecodeError, LineWord};

/// Direction sets are resampled at most this many times when degenerate.
pub const MAX_RESAMPLES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("σ = {sigma} lines requested but only {available} direction classes exist")]
    TooFewDirections { sigma: usize, available: u64 },
    #[error("no non-degenerate direction set found after {0} attempts")]
    Degenerate(usize),
    #[error("line {line} could not be decoded: {source}")]
    Line { line: usize, source: DecodeError },
    #[error("decoded lines give a singular system at order {0}")]
    Singular(usize),
    #[error("decoded lines disagree at order {0}")]
    Inconsistent(usize),
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
}

/// `σ` lines through a base point and the `q-1` points of each line other
/// than the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineQuerySet {
    base: u64,
    classes: Vec<u64>,
    directions: Vec<Vec<Fe>>,
    points: Vec<Vec<u64>>,
}

impl LineQuerySet {
    /// Builds the query points for explicit direction classes.
    pub fn from_classes(
        params: &CodeParams,
        base: u64,
        classes: Vec<u64>,
    ) -> Result<Self, LocalError> {
        let p = params.point(base)?;
        let f = params.field();
        let directions = classes
            .iter()
            .map(|&c| params.direction(c))
            .collect::<Result<Vec<_>, _>>()?;
        let points = directions
            .iter()
            .map(|u| {
                (1..params.q())
                    .map(|b| params.index(&params.line_point(&p, u, f.alpha(b))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LineQuerySet {
            base,
            classes,
            directions,
            points,
        })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn classes(&self) -> &[u64] {
        &self.classes
    }

    pub fn directions(&self) -> &[Vec<Fe>] {
        &self.directions
    }

    /// `points()[i][b]` is the index of `P + α_{b+1}·U_i`.
    pub fn points(&self) -> &[Vec<u64>] {
        &self.points
    }

    pub fn query_count(&self) -> usize {
        self.points.iter().map(Vec::len).sum()
    }
}

/// Whether every order-`e` block of the system built from `dirs` has full
/// column rank, i.e. the directions determine all `F^{(v)}(P)`.
pub fn is_nondegenerate(params: &CodeParams, dirs: &[Vec<Fe>]) -> bool {
    let f = params.field();
    let orders = params.derivative_orders();
    (0..params.s()).all(|e| {
        let slots = params.slots_of_order(e);
        let rows: Vec<Vec<Fe>> = dirs
            .iter()
            .map(|u| {
                slots
                    .clone()
                    .map(|k| monomial_value(f, orders[k].exponents(), u))
                    .collect()
            })
            .collect();
        Matrix::from_rows(&rows).rank(f) == slots.len()
    })
}

/// Samples `σ` distinct direction classes uniformly among the transversal
/// ones (or among all classes), resampling degenerate sets.
pub fn plan_lines<R: Rng + ?Sized>(
    params: &CodeParams,
    base: u64,
    rng: &mut R,
    transversal_only: bool,
) -> Result<LineQuerySet, LocalError> {
    let sigma = params.sigma();
    let available = if transversal_only {
        params.transversal_count()
    } else {
        params.direction_class_count()
    };
    if sigma as u64 > available {
        return Err(LocalError::TooFewDirections { sigma, available });
    }
    params.point(base)?;
    for _ in 0..MAX_RESAMPLES {
        let classes: Vec<u64> = sample(rng, available as usize, sigma)
            .into_iter()
            .map(|c| c as u64)
            .collect();
        let dirs = classes
            .iter()
            .map(|&c| params.direction(c))
            .collect::<Result<Vec<_>, _>>()?;
        if is_nondegenerate(params, &dirs) {
            return LineQuerySet::from_classes(params, base, classes);
        }
    }
    Err(LocalError::Degenerate(MAX_RESAMPLES))
}

/// Turns the `q-1` tuples read along direction `u` into the univariate word
/// `(Σ_{|v|=e} y_v u^v)_{b, e}`.
pub fn side_values(
    params: &CodeParams,
    answers: &[&[Fe]],
    u: &[Fe],
) -> Result<LineWord, LocalError> {
    let f = params.field();
    let sigma = params.sigma();
    if answers.len() != params.q() - 1 {
        return Err(LocalError::Shape {
            expected: params.q() - 1,
            got: answers.len(),
        });
    }
    if let Some(bad) = answers.iter().find(|a| a.len() != sigma) {
        return Err(LocalError::Shape {
            expected: sigma,
            got: bad.len(),
        });
    }
    let weights = direction_powers(f, params, u);
    let values = answers
        .iter()
        .map(|y| {
            (0..params.s())
                .map(|e| {
                    params
                        .slots_of_order(e)
                        .fold(Fe::ZERO, |acc, k| f.add(acc, f.mul(y[k], weights[k])))
                })
                .collect()
        })
        .collect();
    LineWord::new(f, params.s(), values).map_err(|_| LocalError::Shape {
        expected: params.q() - 1,
        got: answers.len(),
    })
}

fn direction_powers(f: &Field, params: &CodeParams, u: &[Fe]) -> Vec<Fe> {
    params
        .derivative_orders()
        .iter()
        .map(|v| monomial_value(f, v.exponents(), u))
        .collect()
}

/// Recovers the evaluation tuple at the base point; `answers[i][b]` is the
/// tuple read at `lines.points()[i][b]`.
pub fn recover_symbol(
    params: &CodeParams,
    lines: &LineQuerySet,
    answers: &[Vec<&[Fe]>],
) -> Result<EvalTuple, LocalError> {
    let f = params.field();
    let sigma = params.sigma();
    if answers.len() != lines.directions.len() || lines.directions.len() != sigma {
        return Err(LocalError::Shape {
            expected: sigma,
            got: answers.len(),
        });
    }
    let mut line_polys = Vec::with_capacity(sigma);
    for (i, (u, ans)) in lines.directions.iter().zip(answers).enumerate() {
        let word = side_values(params, ans, u)?;
        let g = decode_line(f, &word, params.d())
            .map_err(|source| LocalError::Line { line: i, source })?;
        line_polys.push(g);
    }
    let weights: Vec<Vec<Fe>> = lines
        .directions
        .iter()
        .map(|u| direction_powers(f, params, u))
        .collect();
    let mut out = vec![Fe::ZERO; sigma];
    for e in 0..params.s() {
        let slots = params.slots_of_order(e);
        let rows: Vec<Vec<Fe>> = weights.iter().map(|w| w[slots.clone()].to_vec()).collect();
        let rhs: Vec<Fe> = line_polys.iter().map(|g| g.coeff(e)).collect();
        let x = solve(f, &Matrix::from_rows(&rows), &rhs).map_err(|err| match err {
            SolveError::Inconsistent => LocalError::Inconsistent(e),
            SolveError::Underdetermined { .. } => LocalError::Singular(e),
        })?;
        out[slots].copy_from_slice(&x);
    }
    Ok(out)
}

/// Plans lines through point `j`, reads the needed symbols through `oracle`
/// and recovers the tuple at `j`.
pub fn local_decode<'a, R, O>(
    params: &CodeParams,
    j: u64,
    rng: &mut R,
    transversal_only: bool,
    mut oracle: O,
) -> Result<EvalTuple, LocalError>
where
    R: Rng + ?Sized,
    O: FnMut(u64) -> &'a [Fe],
{
    let lines = plan_lines(params, j, rng, transversal_only)?;
    let answers: Vec<Vec<&[Fe]>> = lines
        .points
        .iter()
        .map(|pts| pts.iter().map(|&i| oracle(i)).collect())
        .collect();
    recover_symbol(params, &lines, &answers)
}
