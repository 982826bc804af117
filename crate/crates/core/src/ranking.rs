//! Top-k recommendation lists.
//!
//! Every list is ordered by score descending with ties broken by ascending
//! object index. Per-user lists never contain objects the user collected.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::diffusion::{score_user, DiffusionOperator};
use crate::graph::BipartiteGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedEntry {
    pub object: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    /// `None` for the global degree ranking.
    pub user: Option<usize>,
    pub entries: Vec<RankedEntry>,
    pub k: usize,
}

impl RankedList {
    pub fn objects(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.object)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Ranking order: higher score first, then lower object index.
pub fn rank_order(a: &RankedEntry, b: &RankedEntry) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.object.cmp(&b.object))
}

fn top_k(mut entries: Vec<RankedEntry>, k: usize) -> Vec<RankedEntry> {
    if k < entries.len() {
        if k > 0 {
            entries.select_nth_unstable_by(k - 1, rank_order);
        }
        entries.truncate(k);
    }
    entries.sort_unstable_by(rank_order);
    entries
}

/// Global ranking by object degree.
pub fn grm_ranking(graph: &BipartiteGraph, k: usize) -> RankedList {
    let entries = graph
        .object_degrees()
        .iter()
        .enumerate()
        .map(|(object, &d)| RankedEntry {
            object,
            score: d as f64,
        })
        .collect();
    RankedList {
        user: None,
        entries: top_k(entries, k),
        k,
    }
}

/// Ranks user `l`'s uncollected objects by `scores` (one per object).
pub fn rank_uncollected(
    graph: &BipartiteGraph,
    l: usize,
    scores: &[f64],
    k: usize,
) -> Result<RankedList> {
    graph.check_user(l)?;
    if scores.len() != graph.n_objects() {
        return Err(Error::DimensionMismatch {
            what: "score vector",
            expected: graph.n_objects(),
            found: scores.len(),
        });
    }
    let collected = graph.user_objects(l);
    let mut next_collected = collected.iter().peekable();
    let mut entries = Vec::with_capacity(scores.len() - collected.len());
    for (object, &score) in scores.iter().enumerate() {
        if next_collected.peek() == Some(&&object) {
            next_collected.next();
            continue;
        }
        entries.push(RankedEntry { object, score });
    }
    Ok(RankedList {
        user: Some(l),
        entries: top_k(entries, k),
        k,
    })
}

/// Top-k of `rounds`-round diffusion scores for user `l`.
pub fn nbi_topk(
    op: &DiffusionOperator<'_>,
    l: usize,
    rounds: usize,
    k: usize,
) -> Result<RankedList> {
    let scores = score_user(op, l, rounds)?;
    rank_uncollected(op.graph(), l, &scores, k)
}

/// Infinite-round scores in closed form: `α · k(u_l) · k(o_i)`.
pub fn limit_scores(graph: &BipartiteGraph, l: usize) -> Result<Vec<f64>> {
    graph.check_user(l)?;
    let factor = graph.user_degree(l) as f64 / graph.edge_count() as f64;
    Ok(graph
        .object_degrees()
        .iter()
        .map(|&d| factor * d as f64)
        .collect())
}

pub fn limit_topk(graph: &BipartiteGraph, l: usize, k: usize) -> Result<RankedList> {
    let scores = limit_scores(graph, l)?;
    rank_uncollected(graph, l, &scores, k)
}

/// Same object sequence; scores are ignored.
pub fn rankings_agree(a: &RankedList, b: &RankedList) -> bool {
    a.entries.len() == b.entries.len() && a.objects().eq(b.objects())
}
