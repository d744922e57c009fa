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

//! Greedy heaviest-edge growth of candidate communities inside Louvain
//! communities.
//!
//! For each community the candidate starts from its heaviest edge and keeps
//! absorbing the heaviest adjacent community edge until the running mean
//! would drop below the global mean, or below `theta` times its previous
//! value. Candidates whose final mean does not beat the global mean are
//! dropped. Equal weights are broken by canonical `(u, v)` order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{louvain, FsaVParams, Hcc};
use crate::lcn::MergedLcn;

/// Frontier entry; the max-heap pops the heaviest edge, then the
/// canonically smallest.
#[derive(Debug, Clone, Copy)]
struct Frontier {
    weight: f64,
    edge: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // edges are stored in canonical order, so a smaller index is the
        // canonically smaller pair
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| other.edge.cmp(&self.edge))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    /// Index into [`FsaVOutcome::communities`].
    pub community: usize,
    /// Accepted edge indices in acceptance order; the first is the seed.
    pub edges: Vec<usize>,
    /// `(old_mean, new_mean)` at each accepted growth step after the seed.
    pub accepted_steps: Vec<(f64, f64)>,
    pub mew: f64,
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FsaVOutcome {
    /// `None` for a graph without edges.
    pub g_mean: Option<f64>,
    pub communities: Vec<Vec<usize>>,
    pub candidates: Vec<CandidateReport>,
    pub hccs: Vec<Hcc>,
}

pub fn fsa_v(g: &MergedLcn, params: &FsaVParams, seed: u64) -> Vec<Hcc> {
    fsa_v_detailed(g, params, seed).hccs
}

/// FSA_V with every candidate's growth trace exposed.
pub fn fsa_v_detailed(g: &MergedLcn, params: &FsaVParams, seed: u64) -> FsaVOutcome {
    if g.is_empty() {
        return FsaVOutcome {
            g_mean: None,
            communities: Vec::new(),
            candidates: Vec::new(),
            hccs: Vec::new(),
        };
    }
    let communities = louvain(g, seed);
    fsa_v_with_communities(g, communities, params)
}

/// FSA_V over a caller-supplied partition of the vertices.
pub fn fsa_v_with_communities(
    g: &MergedLcn,
    communities: Vec<Vec<usize>>,
    params: &FsaVParams,
) -> FsaVOutcome {
    let Ok(g_mean) = g.mean_edge_weight() else {
        return FsaVOutcome {
            g_mean: None,
            communities,
            candidates: Vec::new(),
            hccs: Vec::new(),
        };
    };
    let mut label = vec![usize::MAX; g.vertex_count()];
    for (c, members) in communities.iter().enumerate() {
        for &v in members {
            label[v] = c;
        }
    }

    let candidates: Vec<CandidateReport> = (0..communities.len())
        .into_par_iter()
        .filter_map(|c| grow(g, &label, c, g_mean, params))
        .collect();
    let hccs = candidates
        .iter()
        .filter(|c| c.kept)
        .filter_map(|c| Hcc::from_edge_indices(g, &c.edges))
        .collect();
    FsaVOutcome {
        g_mean: Some(g_mean),
        communities,
        candidates,
        hccs,
    }
}

fn grow(
    g: &MergedLcn,
    label: &[usize],
    community: usize,
    g_mean: f64,
    params: &FsaVParams,
) -> Option<CandidateReport> {
    let inside = |e: usize| {
        let edge = &g.edges()[e];
        label[edge.u] == community && label[edge.v] == community
    };
    // first maximum in canonical order
    let seed = (0..g.edge_count())
        .filter(|&e| inside(e))
        .fold(None::<usize>, |best, e| match best {
            Some(b) if g.edges()[b].weight >= g.edges()[e].weight => Some(b),
            _ => Some(e),
        })?;

    let mut in_h = vec![false; g.vertex_count()];
    let mut taken = vec![false; g.edge_count()];
    let mut heap = BinaryHeap::new();
    let mut edges = vec![seed];
    let mut steps = Vec::new();
    let mut sum = g.edges()[seed].weight;

    let admit = |v: usize, in_h: &mut Vec<bool>, taken: &Vec<bool>, heap: &mut BinaryHeap<Frontier>| {
        if in_h[v] {
            return;
        }
        in_h[v] = true;
        for &(nbr, e) in g.neighbors(v) {
            if label[nbr] == community && !taken[e] {
                heap.push(Frontier {
                    weight: g.edges()[e].weight,
                    edge: e,
                });
            }
        }
    };
    taken[seed] = true;
    admit(g.edges()[seed].u, &mut in_h, &taken, &mut heap);
    admit(g.edges()[seed].v, &mut in_h, &taken, &mut heap);

    while let Some(next) = heap.pop() {
        if taken[next.edge] {
            continue;
        }
        let count = edges.len() as f64;
        let old_mean = sum / count;
        let new_mean = (sum + next.weight) / (count + 1.0);
        if new_mean < g_mean || new_mean < old_mean * params.theta() {
            break;
        }
        taken[next.edge] = true;
        edges.push(next.edge);
        sum += next.weight;
        steps.push((old_mean, new_mean));
        let e = &g.edges()[next.edge];
        admit(e.u, &mut in_h, &taken, &mut heap);
        admit(e.v, &mut in_h, &taken, &mut heap);
    }

    let mew = sum / edges.len() as f64;
    let kept = if params.strict_final_filter {
        mew > g_mean
    } else {
        mew >= g_mean
    };
    Some(CandidateReport {
        community,
        edges,
        accepted_steps: steps,
        mew,
        kept,
    })
}
