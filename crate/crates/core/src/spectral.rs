//! Stationary eigenpair, rank-1 limit and subdominant spectrum of `W`.
//!
//! For a connected graph the eigenvalue 1 of `W` is simple, with right
//! eigenvector `e_r = (k(o_1), …, k(o_n))` and left eigenvector
//! `e_l = α·(1, …, 1)`, `α = 1/Σ_j k(o_j)`, so that `e_lᵀ e_r = 1`. All
//! other eigenvalues have modulus below one, hence `Wᴺ → W* = e_r e_lᵀ`.
//!
//! `W = (A U⁻¹ Aᵀ) O⁻¹` is self-adjoint under `⟨x, y⟩ = Σ x_i y_i / k(o_i)`,
//! so its spectrum is real and lies in `[0, 1]`. The power iteration in
//! [`spectral_gap`] works in that inner product, which makes its Rayleigh
//! quotient converge at twice the rate of a plain norm ratio.

// `!(x > y)` is deliberate below: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseMatrix;
use crate::diffusion::{DiffusionOperator, DEFAULT_MAX_DENSE};
use crate::{Error, Result};

/// Relative tolerance of the eigen-relation self-checks.
pub const EIGEN_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPair {
    /// Right eigenvector, the object degrees.
    pub e_r: Vec<f64>,
    /// Left eigenvector, `α` in every entry.
    pub e_l: Vec<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectralSummary {
    pub alpha: f64,
    pub e_r: Vec<f64>,
    pub e_l: Vec<f64>,
    pub lambda2_abs: f64,
}

/// Closed-form stationary pair, checked against the operator.
pub fn stationary_eigenpair(op: &DiffusionOperator<'_>) -> Result<StationaryPair> {
    let graph = op.graph();
    let e_r: Vec<f64> = graph.object_degrees().iter().map(|&k| k as f64).collect();
    let alpha = 1.0 / graph.edge_count() as f64;
    let e_l = vec![alpha; e_r.len()];

    let image = op.apply(&e_r)?;
    let scale = e_r.iter().fold(0.0_f64, |a, &b| a.max(b));
    let defect = max_abs_diff(&image, &e_r);
    if defect > EIGEN_CHECK_TOL * scale {
        return Err(Error::Verification(format!(
            "degree vector is not fixed by W (max defect {defect:e})"
        )));
    }
    let column_sums = op.apply_transpose(&vec![1.0; e_r.len()])?;
    let defect = column_sums
        .iter()
        .fold(0.0_f64, |a, s| a.max((s - 1.0).abs()));
    if defect > EIGEN_CHECK_TOL {
        return Err(Error::Verification(format!(
            "W is not column-stochastic (max column-sum defect {defect:e})"
        )));
    }
    Ok(StationaryPair { e_r, e_l, alpha })
}

/// `W* = e_r e_lᵀ`, stored as the pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitOperator {
    e_r: Vec<f64>,
    alpha: f64,
}

impl LimitOperator {
    pub fn from_pair(pair: &StationaryPair) -> Self {
        LimitOperator {
            e_r: pair.e_r.clone(),
            alpha: pair.alpha,
        }
    }

    pub fn dim(&self) -> usize {
        self.e_r.len()
    }

    /// `W* v = α (Σ v) e_r`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "object resource vector",
                expected: self.dim(),
                found: v.len(),
            });
        }
        let mass = self.alpha * v.iter().sum::<f64>();
        Ok(self.e_r.iter().map(|&k| mass * k).collect())
    }

    /// Every column of `W*` is `α e_r`.
    pub fn column(&self) -> Vec<f64> {
        self.e_r.iter().map(|&k| self.alpha * k).collect()
    }

    pub fn materialize(&self, max_n: usize) -> Result<DenseMatrix> {
        let n = self.dim();
        if n > max_n {
            return Err(Error::TooLarge { n, max_n });
        }
        let column = self.column();
        let mut m = DenseMatrix::zeros(n, n);
        for j in 0..n {
            m.set_column(j, &column);
        }
        Ok(m)
    }
}

pub fn limit_operator(op: &DiffusionOperator<'_>) -> Result<LimitOperator> {
    op.graph().require_connected()?;
    Ok(LimitOperator::from_pair(&stationary_eigenpair(op)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for restarts after the iterate collapses to zero.
    pub seed: u64,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            tol: 1e-8,
            max_iter: 10_000,
            seed: 0x5eed,
        }
    }
}

const RESTARTS: usize = 3;
/// Below this weighted norm (relative to a unit iterate) the deflated
/// operator has annihilated the iterate.
const COLLAPSE: f64 = 1e-13;

/// `|λ₂|` by power iteration on `v ↦ W v − e_r (e_lᵀ v)`.
///
/// Starts from the ramp `(1, 2, …, n)/n`. If the iterate collapses to zero
/// the iteration restarts from a seeded random vector; if every restart
/// collapses as well, the deflated operator is zero and the result is 0.
pub fn spectral_gap(op: &DiffusionOperator<'_>, opts: GapOptions) -> Result<f64> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spectral gap tolerance must be positive, got {}",
            opts.tol
        )));
    }
    op.graph().require_connected()?;
    let n = op.dim();
    if n == 1 {
        return Ok(0.0);
    }
    let pair = stationary_eigenpair(op)?;
    let weights: Vec<f64> = pair.e_r.iter().map(|&k| 1.0 / k).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let ramp: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let mut start = ramp;
    for _ in 0..=RESTARTS {
        match deflated_power_iteration(op, &pair, &weights, start, opts)? {
            Some(lambda) => return Ok(lambda),
            None => start = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }
    Ok(0.0)
}

/// `None` when the iterate collapses.
fn deflated_power_iteration(
    op: &DiffusionOperator<'_>,
    pair: &StationaryPair,
    weights: &[f64],
    start: Vec<f64>,
    opts: GapOptions,
) -> Result<Option<f64>> {
    let n = op.dim();
    let mut users = vec![0.0; op.graph().n_users()];
    let mut v = start;
    let initial = weighted_norm(&v, weights);
    deflate(&mut v, pair);
    let norm = weighted_norm(&v, weights);
    if !(norm > COLLAPSE * initial) {
        return Ok(None);
    }
    scale(&mut v, 1.0 / norm);

    let mut y = vec![0.0; n];
    let mut lambda = f64::NAN;
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        op.apply_into(&v, &mut users, &mut y);
        deflate(&mut y, pair);
        let norm = weighted_norm(&y, weights);
        if !(norm > COLLAPSE) {
            return Ok(None);
        }
        let rayleigh = weighted_dot(&v, &y, weights);
        residual = {
            let r: f64 = v
                .iter()
                .zip(&y)
                .zip(weights)
                .map(|((a, b), w)| (b - rayleigh * a) * (b - rayleigh * a) * w)
                .sum();
            libm::sqrt(r)
        };
        let previous = lambda;
        lambda = rayleigh;
        for (a, b) in v.iter_mut().zip(&y) {
            *a = b / norm;
        }
        if (lambda - previous).abs() <= opts.tol {
            return Ok(Some(lambda.max(0.0)));
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        estimate: lambda,
        residual,
    })
}

fn deflate(v: &mut [f64], pair: &StationaryPair) {
    let mass = pair.alpha * v.iter().sum::<f64>();
    for (x, &k) in v.iter_mut().zip(&pair.e_r) {
        *x -= mass * k;
    }
}

fn weighted_dot(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum()
}

fn weighted_norm(v: &[f64], w: &[f64]) -> f64 {
    libm::sqrt(weighted_dot(v, v, w))
}

fn scale(v: &mut [f64], s: f64) {
    for x in v {
        *x *= s;
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn spectral_summary(op: &DiffusionOperator<'_>, opts: GapOptions) -> Result<SpectralSummary> {
    let pair = stationary_eigenpair(op)?;
    let lambda2_abs = spectral_gap(op, opts)?;
    Ok(SpectralSummary {
        alpha: pair.alpha,
        e_r: pair.e_r,
        e_l: pair.e_l,
        lambda2_abs,
    })
}

/// Tracks `max_j ‖Wᴺ e_j − W* e_j‖∞` over a set of basis columns while
/// `N` advances one round at a time.
#[derive(Debug, Clone)]
pub struct ConvergenceMonitor<'o, 'g> {
    op: &'o DiffusionOperator<'g>,
    target: Vec<f64>,
    columns: Vec<Vec<f64>>,
    users: Vec<f64>,
    scratch: Vec<f64>,
    rounds: usize,
}

impl<'o, 'g> ConvergenceMonitor<'o, 'g> {
    /// Tracks every basis column. Needs `dim() ≤ 1024`.
    pub fn all_columns(op: &'o DiffusionOperator<'g>) -> Result<Self> {
        let n = op.dim();
        if n > DEFAULT_MAX_DENSE {
            return Err(Error::TooLarge {
                n,
                max_n: DEFAULT_MAX_DENSE,
            });
        }
        let probes: Vec<usize> = (0..n).collect();
        Self::with_probes(op, &probes)
    }

    /// Tracks the basis columns listed in `probes`.
    pub fn with_probes(op: &'o DiffusionOperator<'g>, probes: &[usize]) -> Result<Self> {
        op.graph().require_connected()?;
        let n = op.dim();
        if probes.is_empty() {
            return Err(Error::InvalidParameter("empty probe set".into()));
        }
        let mut columns = Vec::with_capacity(probes.len());
        for &j in probes {
            if j >= n {
                return Err(Error::IndexOutOfRange {
                    what: "probe column",
                    index: j,
                    len: n,
                });
            }
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            columns.push(e);
        }
        let pair = stationary_eigenpair(op)?;
        Ok(ConvergenceMonitor {
            op,
            target: LimitOperator::from_pair(&pair).column(),
            columns,
            users: vec![0.0; op.graph().n_users()],
            scratch: vec![0.0; n],
            rounds: 0,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn residual(&self) -> f64 {
        self.columns
            .iter()
            .map(|c| max_abs_diff(c, &self.target))
            .fold(0.0, f64::max)
    }

    /// Advances every tracked column by one round and returns the new
    /// residual.
    pub fn advance(&mut self) -> f64 {
        for column in &mut self.columns {
            self.op
                .apply_into(column, &mut self.users, &mut self.scratch);
            core::mem::swap(column, &mut self.scratch);
        }
        self.rounds += 1;
        self.residual()
    }

    /// Current images `Wᴺ e_j` of the tracked columns.
    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Convergence {
    pub rounds: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeOptions {
    pub tol: f64,
    pub max_rounds: usize,
    /// Basis columns to track. `None` tracks all of them (dense path).
    pub probes: Option<Vec<usize>>,
}

impl Default for ConvergeOptions {
    fn default() -> Self {
        ConvergeOptions {
            tol: 5e-5,
            max_rounds: 100_000,
            probes: None,
        }
    }
}

/// Smallest `N` with `max_j ‖Wᴺ e_j − W* e_j‖∞ ≤ tol`.
pub fn rounds_to_converge(
    op: &DiffusionOperator<'_>,
    opts: &ConvergeOptions,
) -> Result<Convergence> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "convergence tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let mut monitor = match &opts.probes {
        Some(probes) => ConvergenceMonitor::with_probes(op, probes)?,
        None => ConvergenceMonitor::all_columns(op)?,
    };
    let mut residual = monitor.residual();
    while residual > opts.tol {
        if monitor.rounds() >= opts.max_rounds {
            return Err(Error::NotConverged {
                iterations: monitor.rounds(),
                estimate: monitor.rounds() as f64,
                residual,
            });
        }
        residual = monitor.advance();
    }
    Ok(Convergence {
        rounds: monitor.rounds(),
        residual,
    })
}
