//! Train/probe splitting and ranking metrics.
//!
//! A split moves a random subset of edges into a probe set without ever
//! removing a node's last training edge, so every train degree stays
//! positive. Recommenders are then scored on the train graph, one connected
//! component at a time; probes whose user and object end up in different
//! train components are skipped.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffusion::{score_user, DiffusionOperator};
use crate::graph::{build_graph, connected_components, BipartiteGraph, EdgeRecord, IsolatedPolicy};
use crate::ranking::{limit_scores, rank_order, RankedEntry};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub train: BipartiteGraph,
    pub probe: Vec<EdgeRecord>,
    pub seed: u64,
    pub fraction: f64,
}

/// Splits deduplicated records into train and probe sets. About
/// `(1 − fraction)·|E|` edges are drawn as probes in seeded random order;
/// a candidate whose removal would leave its user or object without train
/// edges stays in train and the next candidate is drawn.
pub fn split_edges(records: &[EdgeRecord], fraction: f64, seed: u64) -> Result<SplitDataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let mut seen = BTreeSet::new();
    let records: Vec<&EdgeRecord> = records.iter().filter(|r| seen.insert(*r)).collect();
    let owned: Vec<EdgeRecord> = records.iter().map(|r| (*r).clone()).collect();
    let full = build_graph(&owned, IsolatedPolicy::Reject)?;

    let total = owned.len();
    let train_target = libm::round(fraction * total as f64) as usize;
    let probe_target = total - train_target.min(total);

    let mut object_left: Vec<usize> = full.object_degrees().to_vec();
    let mut user_left: Vec<usize> = full.user_degrees().to_vec();
    let mut order: Vec<usize> = (0..total).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut is_probe = vec![false; total];
    let mut drawn = 0;
    for &e in &order {
        if drawn == probe_target {
            break;
        }
        let rec = &owned[e];
        let o = full.find_object(&rec.object).expect("indexed");
        let u = full.find_user(&rec.user).expect("indexed");
        if object_left[o] > 1 && user_left[u] > 1 {
            object_left[o] -= 1;
            user_left[u] -= 1;
            is_probe[e] = true;
            drawn += 1;
        }
    }

    let (probe, train): (Vec<_>, Vec<_>) = owned.into_iter().zip(is_probe).partition(|(_, p)| *p);
    let train: Vec<EdgeRecord> = train.into_iter().map(|(r, _)| r).collect();
    let probe = probe.into_iter().map(|(r, _)| r).collect();
    Ok(SplitDataset {
        train: build_graph(&train, IsolatedPolicy::Reject)?,
        probe,
        seed,
        fraction,
    })
}

/// Scores every object of a connected (component) graph for one user.
pub trait Recommender {
    fn scores(&self, op: &DiffusionOperator<'_>, user: usize) -> Result<Vec<f64>>;
}

impl<F> Recommender for F
where
    F: Fn(&DiffusionOperator<'_>, usize) -> Result<Vec<f64>>,
{
    fn scores(&self, op: &DiffusionOperator<'_>, user: usize) -> Result<Vec<f64>> {
        self(op, user)
    }
}

/// Diffusion with a fixed number of rounds.
#[derive(Debug, Clone, Copy)]
pub struct NbiRecommender {
    pub rounds: usize,
}

impl Recommender for NbiRecommender {
    fn scores(&self, op: &DiffusionOperator<'_>, user: usize) -> Result<Vec<f64>> {
        Ok(score_user(op, user, self.rounds)?.into_inner())
    }
}

/// Infinite-round diffusion, in closed form.
#[derive(Debug, Clone, Copy)]
pub struct LimitRecommender;

impl Recommender for LimitRecommender {
    fn scores(&self, op: &DiffusionOperator<'_>, user: usize) -> Result<Vec<f64>> {
        limit_scores(op.graph(), user)
    }
}

/// Object degree, identical for every user.
#[derive(Debug, Clone, Copy)]
pub struct GrmRecommender;

impl Recommender for GrmRecommender {
    fn scores(&self, op: &DiffusionOperator<'_>, _user: usize) -> Result<Vec<f64>> {
        Ok(op
            .graph()
            .object_degrees()
            .iter()
            .map(|&d| d as f64)
            .collect())
    }
}

/// Position of one probe object in its user's ranked uncollected set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeOutcome {
    /// 1-based rank.
    pub rank: usize,
    /// Size of the user's uncollected set within its component.
    pub candidates: usize,
}

impl ProbeOutcome {
    pub fn relative_rank(&self) -> f64 {
        self.rank as f64 / self.candidates as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcomes {
    pub evaluated: Vec<ProbeOutcome>,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MetricsReport {
    pub mean_ranking_score: f64,
    pub hit_rate_at_k: f64,
    pub k: usize,
    pub probe_size: usize,
    pub skipped_probes: usize,
}

/// Ranks every probe edge under `recommender`.
pub fn probe_outcomes<R: Recommender + ?Sized>(
    recommender: &R,
    split: &SplitDataset,
) -> Result<ProbeOutcomes> {
    let train = &split.train;
    let components = connected_components(train);
    let subgraphs: Vec<_> = if components.len() == 1 {
        Vec::new()
    } else {
        components.iter().map(|c| train.subgraph(c)).collect()
    };
    let graphs: Vec<&BipartiteGraph> = if subgraphs.is_empty() {
        vec![train]
    } else {
        subgraphs.iter().map(|s| &s.graph).collect()
    };

    // global index -> (component, local index)
    let mut object_home = vec![(0, 0); train.n_objects()];
    let mut user_home = vec![(0, 0); train.n_users()];
    for (c, comp) in components.iter().enumerate() {
        for (local, &j) in comp.objects.iter().enumerate() {
            object_home[j] = (c, local);
        }
        for (local, &l) in comp.users.iter().enumerate() {
            user_home[l] = (c, local);
        }
    }

    let mut skipped = 0;
    // (component, local user) -> local probe objects, in probe order
    let mut by_user: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (p, rec) in split.probe.iter().enumerate() {
        let (Some(j), Some(l)) = (train.find_object(&rec.object), train.find_user(&rec.user))
        else {
            skipped += 1;
            continue;
        };
        let (oc, local_o) = object_home[j];
        let (uc, local_u) = user_home[l];
        if oc != uc || train.has_edge(j, l) {
            skipped += 1;
            continue;
        }
        by_user.entry((uc, local_u)).or_default().push((p, local_o));
    }

    let mut ranked: Vec<(usize, ProbeOutcome)> = Vec::new();
    let mut current: Option<(usize, DiffusionOperator<'_>)> = None;
    for ((c, user), probes) in by_user {
        if current.as_ref().map(|(cc, _)| *cc) != Some(c) {
            current = Some((c, DiffusionOperator::new(graphs[c])?));
        }
        let op = &current.as_ref().expect("set above").1;
        let graph = op.graph();
        let scores = recommender.scores(op, user)?;
        if scores.len() != graph.n_objects() {
            return Err(Error::DimensionMismatch {
                what: "recommender scores",
                expected: graph.n_objects(),
                found: scores.len(),
            });
        }
        let candidates = graph.n_objects() - graph.user_degree(user);
        for (p, object) in probes {
            let target = RankedEntry {
                object,
                score: scores[object],
            };
            let ahead = scores
                .iter()
                .enumerate()
                .filter(|&(o, _)| !graph.has_edge(o, user))
                .filter(|&(o, &score)| {
                    rank_order(&RankedEntry { object: o, score }, &target).is_lt()
                })
                .count();
            ranked.push((
                p,
                ProbeOutcome {
                    rank: ahead + 1,
                    candidates,
                },
            ));
        }
    }
    ranked.sort_unstable_by_key(|&(p, _)| p);
    Ok(ProbeOutcomes {
        evaluated: ranked.into_iter().map(|(_, o)| o).collect(),
        skipped,
    })
}

/// Ranking score and hit rate in one pass.
pub fn evaluate<R: Recommender + ?Sized>(
    recommender: &R,
    split: &SplitDataset,
    k: usize,
) -> Result<MetricsReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("hit rate needs k >= 1".into()));
    }
    let outcomes = probe_outcomes(recommender, split)?;
    report(&outcomes, k, split.probe.len())
}

fn report(outcomes: &ProbeOutcomes, k: usize, probe_size: usize) -> Result<MetricsReport> {
    let evaluated = &outcomes.evaluated;
    if evaluated.is_empty() {
        return Err(Error::EmptyProbeSet {
            skipped: outcomes.skipped,
        });
    }
    let count = evaluated.len() as f64;
    let mean_ranking_score = evaluated
        .iter()
        .map(ProbeOutcome::relative_rank)
        .sum::<f64>()
        / count;
    let hits = evaluated.iter().filter(|o| o.rank <= k).count();
    Ok(MetricsReport {
        mean_ranking_score,
        hit_rate_at_k: hits as f64 / count,
        k,
        probe_size,
        skipped_probes: outcomes.skipped,
    })
}

/// Mean of `rank / |uncollected|` over evaluable probe edges. Lower is better.
pub fn ranking_score<R: Recommender + ?Sized>(
    recommender: &R,
    split: &SplitDataset,
) -> Result<f64> {
    Ok(evaluate(recommender, split, 1)?.mean_ranking_score)
}

/// Fraction of evaluable probe edges whose object is in the user's top `k`.
pub fn hit_rate_at_k<R: Recommender + ?Sized>(
    recommender: &R,
    split: &SplitDataset,
    k: usize,
) -> Result<f64> {
    Ok(evaluate(recommender, split, k)?.hit_rate_at_k)
}
