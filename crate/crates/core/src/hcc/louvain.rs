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

//! Two-phase Louvain modularity optimisation on weighted undirected graphs.
//!
//! Vertex visitation order at every level is a seeded shuffle, fixed for
//! the whole level, so results are reproducible for a given seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lcn::MergedLcn;

const MIN_GAIN: f64 = 1e-12;

struct Level {
    // neighbour lists without self-loops
    adj: Vec<Vec<(usize, f64)>>,
    // weighted degree including twice any self-loop weight
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(g: &MergedLcn) -> Self {
        let n = g.vertex_count();
        let mut adj = vec![Vec::new(); n];
        let mut degree = vec![0.0; n];
        for e in g.edges() {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
            degree[e.u] += e.weight;
            degree[e.v] += e.weight;
        }
        Level { adj, degree }
    }

    fn len(&self) -> usize {
        self.degree.len()
    }

    /// Local moving phase. Returns the community of each node and whether
    /// anything moved.
    fn local_moves(&self, order: &[usize], two_m: f64) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut weight_to = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;

        loop {
            let mut moved = false;
            for &i in order {
                let ki = self.degree[i];
                let current = comm[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if weight_to[c] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                tot[current] -= ki;

                let gain = |c: usize, w: f64| w - tot[c] * ki / two_m;
                let mut best = current;
                let mut best_gain = gain(current, weight_to[current]);
                touched.sort_unstable();
                for &c in &touched {
                    let g = gain(c, weight_to[c]);
                    if g > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                for &c in &touched {
                    weight_to[c] = 0.0;
                }
                touched.clear();

                tot[best] += ki;
                if best != current {
                    comm[i] = best;
                    moved = true;
                    any_move = true;
                }
            }
            if !moved {
                break;
            }
        }
        (comm, any_move)
    }

    /// Collapse communities into single nodes. `comm` must be dense.
    fn aggregate(&self, comm: &[usize], count: usize) -> Level {
        let mut acc: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        let mut degree = vec![0.0; count];
        for i in 0..self.len() {
            degree[comm[i]] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                let (a, b) = (comm[i], comm[j]);
                if a != b {
                    *acc[a].entry(b).or_insert(0.0) += w;
                }
            }
        }
        let adj = acc.into_iter().map(|m| m.into_iter().collect()).collect();
        Level { adj, degree }
    }
}

/// Renumber labels densely in order of first appearance.
fn densify(labels: &mut [usize]) -> usize {
    let mut map = std::collections::HashMap::new();
    for l in labels.iter_mut() {
        let next = map.len();
        *l = *map.entry(*l).or_insert(next);
    }
    map.len()
}

/// Partition the vertices of `g` into communities.
///
/// Communities are returned as sorted vertex-index lists, ordered by their
/// smallest member. Every vertex appears in exactly one community.
pub fn louvain(g: &MergedLcn, seed: u64) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    let two_m = 2.0 * g.total_weight();
    let mut membership: Vec<usize> = (0..n).collect();
    if two_m > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut level = Level::from_graph(g);
        loop {
            let mut order: Vec<usize> = (0..level.len()).collect();
            order.shuffle(&mut rng);
            let (mut comm, moved) = level.local_moves(&order, two_m);
            if !moved {
                break;
            }
            let count = densify(&mut comm);
            for m in membership.iter_mut() {
                *m = comm[*m];
            }
            if count == level.len() {
                break;
            }
            level = level.aggregate(&comm, count);
        }
    }

    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (v, c) in membership.iter().enumerate() {
        groups.entry(*c).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|c| c[0]);
    out
}

/// Newman modularity of a partition given as vertex-index lists.
pub fn modularity(g: &MergedLcn, communities: &[Vec<usize>]) -> f64 {
    let m = g.total_weight();
    if m == 0.0 {
        return 0.0;
    }
    let mut label = vec![usize::MAX; g.vertex_count()];
    for (c, members) in communities.iter().enumerate() {
        for &v in members {
            label[v] = c;
        }
    }
    let mut internal = vec![0.0; communities.len()];
    let mut tot = vec![0.0; communities.len()];
    for e in g.edges() {
        let (a, b) = (label[e.u], label[e.v]);
        if a == b {
            internal[a] += e.weight;
        }
        tot[a] += e.weight;
        tot[b] += e.weight;
    }
    internal
        .iter()
        .zip(&tot)
        .map(|(i, t)| i / m - (t / (2.0 * m)).powi(2))
        .sum()
}
