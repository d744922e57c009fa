// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Highly coordinating community (HCC) extraction from a merged LCN.

mod baselines;
mod fsa_v;
mod louvain;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lcn::{mean_edge_weight, MergedLcn};
use crate::linkage::Criterion;

pub use baselines::{knn_extract, knn_k, threshold_extract};
pub use fsa_v::{fsa_v, fsa_v_detailed, fsa_v_with_communities, CandidateReport, FsaVOutcome};
pub use louvain::{louvain, modularity};

pub const DEFAULT_THETA: f64 = 0.3;
pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HccEdge {
    pub u: String,
    pub v: String,
    pub weight: f64,
}

/// An extracted community: its members, the edges that hold it together,
/// and their mean weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hcc {
    /// Sorted account ids.
    pub members: Vec<String>,
    /// Canonically ordered internal edges.
    pub internal_edges: Vec<HccEdge>,
    pub mew: f64,
}

impl Hcc {
    /// Build from edge indices of `g`. Returns `None` for an empty set.
    pub fn from_edge_indices(g: &MergedLcn, edge_indices: &[usize]) -> Option<Hcc> {
        if edge_indices.is_empty() {
            return None;
        }
        let mut idx = edge_indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut members: Vec<usize> = idx
            .iter()
            .flat_map(|&e| [g.edges()[e].u, g.edges()[e].v])
            .collect();
        members.sort_unstable();
        members.dedup();
        let internal_edges: Vec<HccEdge> = idx
            .iter()
            .map(|&e| {
                let edge = &g.edges()[e];
                HccEdge {
                    u: g.vertex(edge.u).to_string(),
                    v: g.vertex(edge.v).to_string(),
                    weight: edge.weight,
                }
            })
            .collect();
        let mew = mean_edge_weight(internal_edges.iter().map(|e| e.weight)).ok()?;
        Some(Hcc {
            members: members.into_iter().map(|v| g.vertex(v).to_string()).collect(),
            internal_edges,
            mew,
        })
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, account: &str) -> bool {
        self.members.binary_search_by(|m| m.as_str().cmp(account)).is_ok()
    }

    /// Sum of the per-criterion weights of the internal edges, looked up in
    /// the graph they were extracted from.
    pub fn criterion_breakdown(&self, g: &MergedLcn) -> BTreeMap<Criterion, u64> {
        let mut out = BTreeMap::new();
        for e in &self.internal_edges {
            let (Some(u), Some(v)) = (g.index_of(&e.u), g.index_of(&e.v)) else {
                continue;
            };
            if let Some(edge) = g.edge_between(u, v) {
                for (c, w) in &edge.breakdown {
                    *out.entry(*c).or_insert(0) += w;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsaVParams {
    theta: f64,
    /// Keep a candidate only if its MEW is strictly above the global mean.
    /// Setting this false relaxes the final filter to `>=`.
    pub strict_final_filter: bool,
}

impl FsaVParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::param("theta", format!("{theta} is outside (0, 1]")));
        }
        Ok(FsaVParams {
            theta,
            strict_final_filter: true,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl Default for FsaVParams {
    fn default() -> Self {
        FsaVParams {
            theta: DEFAULT_THETA,
            strict_final_filter: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    FsaV(FsaVParams),
    Knn,
    Threshold { fraction: f64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::FsaV(_) => "fsa_v",
            Method::Knn => "knn",
            Method::Threshold { .. } => "threshold",
        }
    }
}

/// Method names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    FsaV,
    Knn,
    Threshold,
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fsa_v" | "fsav" => Ok(MethodName::FsaV),
            "knn" => Ok(MethodName::Knn),
            "threshold" => Ok(MethodName::Threshold),
            other => Err(Error::param("method", format!("unknown method `{other}`"))),
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodName::FsaV => "fsa_v",
            MethodName::Knn => "knn",
            MethodName::Threshold => "threshold",
        })
    }
}

pub fn extract(g: &MergedLcn, method: &Method, seed: u64) -> Result<Vec<Hcc>> {
    match method {
        Method::FsaV(p) => Ok(fsa_v(g, p, seed)),
        Method::Knn => Ok(knn_extract(g)),
        Method::Threshold { fraction } => threshold_extract(g, *fraction),
    }
}

/// Connected components (as edge-index lists) of the subgraph formed by
/// `kept` edges, keeping only components with at least two members.
pub(crate) fn components_of(g: &MergedLcn, kept: &[usize]) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &e in kept {
        let edge = &g.edges()[e];
        let (a, b) = (find(&mut parent, edge.u), find(&mut parent, edge.v));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in kept {
        let root = find(&mut parent, g.edges()[e].u);
        groups.entry(root).or_default().push(e);
    }
    groups.into_values().collect()
}
