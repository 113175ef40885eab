//! File formats: JSON schemas for hypergraphs, patterns, solutions, and
//! tail estimates.
//!
//! Hypergraph: `{"r": int, "v": int, "edges": [{"A": [ints], "d": float}]}`.
//! Pattern:    `{"s": int, "v": int, "edges": [[ints]]}`.
//! Solution:   `{"phi": float, "theta": float, "q": [floats],
//!               "status": string, "kkt_residual": float}`.
//! Estimate:   `{"method": string, "log_prob": float, "ci": [lo,hi]|null,
//!               "samples": int|null, "seed": int|null}`.
//!
//! Readers validate the construction invariants (duplicate edge sets are
//! merged by weight addition). Non-finite log-probabilities serialize as
//! JSON `null` (serde_json's representation for infinities).

use lowertail_core::builders::PatternHypergraph;
use lowertail_core::oracle::TailEstimate;
use lowertail_core::{VariationalSolution, WeightedHypergraph};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    #[serde(rename = "A")]
    pub a: Vec<u32>,
    pub d: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub r: usize,
    pub v: usize,
    pub edges: Vec<EdgeJson>,
}

impl HypergraphJson {
    pub fn to_hypergraph(&self) -> anyhow::Result<WeightedHypergraph> {
        Ok(WeightedHypergraph::new(
            self.v,
            self.r,
            self.edges.iter().map(|e| (e.a.clone(), e.d)),
        )?)
    }

    pub fn from_hypergraph(h: &WeightedHypergraph) -> Self {
        HypergraphJson {
            r: h.uniformity(),
            v: h.vertex_count(),
            edges: h
                .edges()
                .map(|(a, d)| EdgeJson { a: a.to_vec(), d })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternJson {
    pub s: usize,
    pub v: usize,
    pub edges: Vec<Vec<u32>>,
}

impl PatternJson {
    pub fn to_pattern(&self) -> anyhow::Result<PatternHypergraph> {
        Ok(PatternHypergraph::new(self.s, self.v, self.edges.clone())?)
    }

    pub fn from_pattern(p: &PatternHypergraph) -> Self {
        PatternJson {
            s: p.uniformity(),
            v: p.vertex_count(),
            edges: p.edges().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionJson {
    pub phi: f64,
    pub theta: f64,
    pub q: Vec<f64>,
    pub status: String,
    pub kkt_residual: f64,
}

impl SolutionJson {
    pub fn from_solution(s: &VariationalSolution) -> Self {
        SolutionJson {
            phi: s.phi,
            theta: s.theta,
            q: s.q_star.values().to_vec(),
            status: s.status.as_str().to_string(),
            kkt_residual: s.kkt_residual,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateJson {
    pub method: String,
    pub log_prob: f64,
    pub ci: Option<(f64, f64)>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

impl EstimateJson {
    pub fn from_estimate(e: &TailEstimate) -> Self {
        EstimateJson {
            method: e.method.as_str().to_string(),
            log_prob: e.log_prob,
            ci: e.ci,
            samples: e.samples,
            seed: e.seed,
        }
    }
}
