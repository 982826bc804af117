use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use massdiff_core::diffusion::DEFAULT_MAX_DENSE;
use massdiff_core::eval::{
    evaluate, split_edges, GrmRecommender, LimitRecommender, NbiRecommender,
};
use massdiff_core::fixture::{
    self, REFERENCE_ALPHA, REFERENCE_LAMBDA2, REFERENCE_LIMIT, REFERENCE_POWERS,
    REFERENCE_RIGHT_EIGENVECTOR, REFERENCE_ROUNDS, REFERENCE_W,
};
use massdiff_core::ranking::{grm_ranking, nbi_topk};
use massdiff_core::spectral::{
    limit_operator, rounds_to_converge, spectral_gap, spectral_summary, stationary_eigenpair,
    ConvergeOptions, ConvergenceMonitor, GapOptions,
};
use massdiff_core::{DenseMatrix, DiffusionOperator};

use crate::args::{ConvergeArgs, EvalArgs, GrmArgs, InputArgs, RecommendArgs, SpectrumArgs};
use crate::edgelist::{load_graph, LoadedGraph};
use crate::report::{CheckLine, EvalReport, RankingLine, SpectrumReport};
use crate::RunError;

type Out<'a> = &'a mut dyn Write;

fn load(input: &InputArgs, stderr: Out) -> Result<LoadedGraph, RunError> {
    let loaded = load_graph(&input.input, input.isolated.into())
        .map_err(|e| RunError::Input(format!("{}: {e}", input.input.display())))?;
    let r = loaded.report;
    let g = &loaded.graph;
    writeln!(
        stderr,
        "{}: {} lines, {} comments, {} duplicates dropped; {} objects, {} users, {} edges",
        input.input.display(),
        r.lines,
        r.comments,
        r.dups,
        g.n_objects(),
        g.n_users(),
        g.edge_count()
    )?;
    Ok(loaded)
}

fn json_line<T: Serialize>(out: Out, value: &T) -> Result<(), RunError> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn to_usize(v: u64) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

pub fn recommend(a: &RecommendArgs, stdout: Out, stderr: Out) -> Result<(), RunError> {
    let loaded = load(&a.input, stderr)?;
    let graph = &loaded.graph;
    let op = DiffusionOperator::new(graph)?;
    let mut users = Vec::with_capacity(a.users.len());
    for label in &a.users {
        match graph.find_user(label) {
            Some(l) => users.push(l),
            None => return Err(RunError::Input(format!("unknown user `{label}`"))),
        }
    }
    if users.is_empty() {
        users = (0..graph.n_users()).collect();
    }
    users.sort_unstable();
    users.dedup();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.map_or(0, to_usize))
        .build()
        .map_err(|e| RunError::Input(format!("thread pool: {e}")))?;
    let (rounds, k) = (to_usize(a.rounds), to_usize(a.top_k));
    let lines: Vec<_> = pool.install(|| {
        users
            .par_iter()
            .map(|&l| nbi_topk(&op, l, rounds, k).map(|list| RankingLine::from_list(graph, &list)))
            .collect()
    });
    for line in lines {
        json_line(stdout, &line?)?;
    }
    Ok(())
}

pub fn grm(a: &GrmArgs, stdout: Out, stderr: Out) -> Result<(), RunError> {
    let loaded = load(&a.input, stderr)?;
    let list = grm_ranking(&loaded.graph, to_usize(a.top_k));
    json_line(stdout, &RankingLine::from_list(&loaded.graph, &list))
}

pub fn spectrum(a: &SpectrumArgs, stdout: Out, stderr: Out) -> Result<(), RunError> {
    let loaded = load(&a.input, stderr)?;
    let op = DiffusionOperator::new(&loaded.graph)?;
    let opts = GapOptions {
        tol: a.tol,
        ..GapOptions::default()
    };
    let summary = spectral_summary(&op, opts)?;
    json_line(
        stdout,
        &SpectrumReport {
            alpha: summary.alpha,
            e_r: summary.e_r,
            lambda2_abs: summary.lambda2_abs,
        },
    )
}

pub fn converge(a: &ConvergeArgs, stdout: Out, stderr: Out) -> Result<(), RunError> {
    let loaded = load(&a.input, stderr)?;
    let op = DiffusionOperator::new(&loaded.graph)?;
    let opts = ConvergeOptions {
        tol: a.tol,
        ..ConvergeOptions::default()
    };
    json_line(stdout, &rounds_to_converge(&op, &opts)?)
}

pub fn eval(a: &EvalArgs, stdout: Out, stderr: Out) -> Result<(), RunError> {
    let loaded = load(&a.input, stderr)?;
    let split = split_edges(&loaded.records, a.fraction, a.seed)?;
    let (rounds, k) = (to_usize(a.rounds), to_usize(a.top_k));
    let report = EvalReport {
        fraction: a.fraction,
        seed: a.seed,
        rounds,
        top_k: k,
        train_edges: split.train.edge_count(),
        nbi: evaluate(&NbiRecommender { rounds }, &split, k)?,
        limit: evaluate(&LimitRecommender, &split, k)?,
        grm: evaluate(&GrmRecommender, &split, k)?,
    };
    json_line(stdout, &report)
}

const IDENTITY_TOL: f64 = 1e-9;
const CONVERGE_TOL: f64 = 5e-5;
/// Residuals at or below this are treated as roundoff by the decay check.
const DECAY_FLOOR: f64 = 1e-12;
/// Covers the error of the iterative |λ₂| estimate.
const LAMBDA_SLACK: f64 = 1e-6;
const DECAY_EXTRA_ROUNDS: usize = 50;
/// Above this many objects the convergence checks track a sample of columns.
const PROBE_SAMPLE: usize = 64;

fn probe_columns(n: usize) -> Option<Vec<usize>> {
    if n <= DEFAULT_MAX_DENSE {
        return None;
    }
    let mut probes: Vec<usize> = (0..PROBE_SAMPLE)
        .map(|i| i * (n - 1) / (PROBE_SAMPLE - 1))
        .collect();
    probes.dedup();
    Some(probes)
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn verify_limit(a: &InputArgs, stdout: Out, stderr: Out) -> Result<(), RunError> {
    let loaded = load(a, stderr)?;
    let graph = &loaded.graph;
    let op = DiffusionOperator::new(graph)?;
    let n = graph.n_objects();
    let mut checks = Vec::new();

    let sums = op.apply_transpose(&vec![1.0; n])?;
    checks.push(CheckLine {
        check: "column_sums",
        pass: max_dev(&sums, &vec![1.0; n]) <= IDENTITY_TOL,
        value: max_dev(&sums, &vec![1.0; n]),
        bound: IDENTITY_TOL,
        detail: None,
    });

    let degrees: Vec<f64> = graph.object_degrees().iter().map(|&d| d as f64).collect();
    let image = op.apply(&degrees)?;
    let rel = max_dev(&image, &degrees) / degrees.iter().fold(0.0, |m: f64, &d| m.max(d));
    checks.push(CheckLine {
        check: "degree_fixed_point",
        pass: rel <= IDENTITY_TOL,
        value: rel,
        bound: IDENTITY_TOL,
        detail: None,
    });

    let ramp: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let mass: f64 = ramp.iter().sum();
    let drift = [1usize, 10, 100]
        .iter()
        .map(|&r| {
            op.diffuse(&ramp, r)
                .map(|v| (v.total() - mass).abs() / mass)
        })
        .collect::<massdiff_core::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(CheckLine {
        check: "mass_conservation",
        pass: drift <= IDENTITY_TOL,
        value: drift,
        bound: IDENTITY_TOL,
        detail: Some("rounds 1, 10, 100".into()),
    });

    let probes = probe_columns(n);
    let opts = ConvergeOptions {
        tol: CONVERGE_TOL,
        probes: probes.clone(),
        ..ConvergeOptions::default()
    };
    let reached = rounds_to_converge(&op, &opts);
    checks.push(match &reached {
        Ok(c) => CheckLine {
            check: "limit_convergence",
            pass: true,
            value: c.residual,
            bound: CONVERGE_TOL,
            detail: Some(format!("N = {}", c.rounds)),
        },
        Err(e) => CheckLine {
            check: "limit_convergence",
            pass: false,
            value: f64::NAN,
            bound: CONVERGE_TOL,
            detail: Some(e.to_string()),
        },
    });

    // W is self-adjoint under <x, y> = Σ x_i y_i / k(o_i) and W* is the
    // orthogonal projection onto e_r, so the weighted norm of Wᴺe_j − W*e_j
    // is at most |λ₂|ᴺ / sqrt(k(o_j)). Converting to the max norm costs sqrt(k_max).
    let lambda2 = spectral_gap(&op, GapOptions::default())?;
    let k_min = graph.object_degrees().iter().copied().min().unwrap_or(1) as f64;
    let k_max = graph.object_degrees().iter().copied().max().unwrap_or(1) as f64;
    let scale = (k_max / k_min).sqrt();
    let horizon = reached
        .as_ref()
        .map_or(opts.max_rounds, |c| 2 * c.rounds + DECAY_EXTRA_ROUNDS);
    let mut monitor = match &probes {
        Some(p) => ConvergenceMonitor::with_probes(&op, p)?,
        None => ConvergenceMonitor::all_columns(&op)?,
    };
    let (mut worst, mut worst_round) = (0.0f64, 0usize);
    let mut residual = monitor.residual();
    loop {
        let bound = scale * (lambda2 + LAMBDA_SLACK).powi(monitor.rounds() as i32) + DECAY_FLOOR;
        if residual / bound > worst {
            worst = residual / bound;
            worst_round = monitor.rounds();
        }
        if residual <= DECAY_FLOOR || monitor.rounds() >= horizon {
            break;
        }
        residual = monitor.advance();
    }
    checks.push(CheckLine {
        check: "residual_decay",
        pass: worst <= 1.0,
        value: worst,
        bound: 1.0,
        detail: Some(format!(
            "max over N <= {} of residual / (sqrt(k_max/k_min) |lambda2|^N), worst at N = {worst_round}, |lambda2| = {lambda2:.6}",
            monitor.rounds()
        )),
    });

    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.check).collect();
    for c in &checks {
        json_line(stdout, c)?;
    }
    if failed.is_empty() {
        writeln!(stderr, "all {} checks passed", checks.len())?;
        Ok(())
    } else {
        Err(RunError::Verification(failed.join(", ")))
    }
}

/// Half a unit in the 4th decimal, for values published at 4 decimals.
const PRINTED_TOL: f64 = 5e-5;
const EXACT_TOL: f64 = 1e-12;

struct Tally {
    mismatches: Vec<String>,
}

impl Tally {
    fn mark(&mut self, what: &str, ok: bool) -> &'static str {
        if ok {
            "ok"
        } else {
            self.mismatches.push(what.to_owned());
            "MISMATCH"
        }
    }
}

fn dense_of(rows: &[[f64; 3]; 3]) -> DenseMatrix {
    DenseMatrix::from_rows(rows)
}

fn print_matrix(out: Out, m: &DenseMatrix) -> std::io::Result<()> {
    for i in 0..m.rows() {
        let cells: Vec<String> = m.row(i).iter().map(|x| format!("{x:.4}")).collect();
        writeln!(out, "    [{}]", cells.join(", "))?;
    }
    Ok(())
}

pub fn paper_example(stdout: Out, _stderr: Out) -> Result<(), RunError> {
    let graph = fixture::reference_graph();
    let op = DiffusionOperator::new(&graph)?;
    let mut tally = Tally {
        mismatches: Vec::new(),
    };
    writeln!(
        stdout,
        "reference network: {} objects, {} users, {} edges",
        graph.n_objects(),
        graph.n_users(),
        graph.edge_count()
    )?;

    let w = op.materialize(DEFAULT_MAX_DENSE)?;
    let status = tally.mark("W", w.max_abs_diff(&dense_of(&REFERENCE_W)) <= EXACT_TOL);
    writeln!(
        stdout,
        "W (expected [[11/18, 1/6, 5/18], [1/9, 5/12, 5/18], [5/18, 5/12, 4/9]]): {status}"
    )?;
    print_matrix(stdout, &w)?;

    let pair = stationary_eigenpair(&op)?;
    let status = tally.mark(
        "e_r",
        max_dev(&pair.e_r, &REFERENCE_RIGHT_EIGENVECTOR) <= EXACT_TOL,
    );
    writeln!(
        stdout,
        "e_r = {:?} (expected (3, 2, 3)): {status}",
        pair.e_r
    )?;
    let status = tally.mark("alpha", (pair.alpha - REFERENCE_ALPHA).abs() <= EXACT_TOL);
    writeln!(stdout, "alpha = {} (expected 1/8): {status}", pair.alpha)?;

    let lambda2 = spectral_gap(&op, GapOptions::default())?;
    let status = tally.mark(
        "|lambda2|",
        (lambda2 - REFERENCE_LAMBDA2).abs() <= PRINTED_TOL,
    );
    writeln!(
        stdout,
        "|lambda2| = {lambda2:.6} (expected 0.4034): {status}"
    )?;

    let limit = limit_operator(&op)?.materialize(DEFAULT_MAX_DENSE)?;
    let status = tally.mark(
        "W*",
        limit.max_abs_diff(&dense_of(&REFERENCE_LIMIT)) <= EXACT_TOL,
    );
    writeln!(stdout, "W* (expected columns (3/8, 1/4, 3/8)): {status}")?;
    print_matrix(stdout, &limit)?;

    let mut power = w.clone();
    let mut worst: f64 = 0.0;
    for table in &REFERENCE_POWERS {
        power = w.matmul(&power);
        worst = worst.max(power.max_abs_diff(&dense_of(table)));
    }
    let status = tally.mark("W^2..W^11", worst <= PRINTED_TOL);
    writeln!(
        stdout,
        "W^2 .. W^11 against the 4-decimal tables: max deviation {worst:.2e}: {status}"
    )?;

    let c = rounds_to_converge(&op, &ConvergeOptions::default())?;
    let status = tally.mark("N", c.rounds == REFERENCE_ROUNDS);
    writeln!(
        stdout,
        "rounds until max |W^N - W*| <= 5e-5: N = {} (residual {:.2e}, expected N = 11): {status}",
        c.rounds, c.residual
    )?;

    if tally.mismatches.is_empty() {
        writeln!(stdout, "all values match")?;
        Ok(())
    } else {
        Err(RunError::Verification(format!(
            "mismatched: {}",
            tally.mismatches.join(", ")
        )))
    }
}
