//! JSON shapes written to standard output.

use serde::Serialize;

use massdiff_core::eval::MetricsReport;
use massdiff_core::{BipartiteGraph, RankedList};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Item {
    pub object: String,
    pub score: f64,
}

/// One ranking line. `user` is absent for the global degree list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingLine {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user: Option<String>,
    pub items: Vec<Item>,
}

impl RankingLine {
    pub fn from_list(graph: &BipartiteGraph, list: &RankedList) -> Self {
        RankingLine {
            user: list.user.map(|l| graph.user_label(l).to_owned()),
            items: list
                .entries
                .iter()
                .map(|e| Item {
                    object: graph.object_label(e.object).to_owned(),
                    score: e.score,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub alpha: f64,
    pub e_r: Vec<f64>,
    pub lambda2_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub fraction: f64,
    pub seed: u64,
    pub rounds: usize,
    pub top_k: usize,
    pub train_edges: usize,
    pub nbi: MetricsReport,
    pub limit: MetricsReport,
    pub grm: MetricsReport,
}

/// One line of `verify-limit` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub check: &'static str,
    pub pass: bool,
    pub value: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}
