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

//! Baseline extractors: per-vertex top-k edges and a global weight cut.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::{components_of, Hcc};
use crate::error::{Error, Result};
use crate::lcn::MergedLcn;

// heaviest first, canonical order on ties
fn heaviest_first(g: &MergedLcn, a: usize, b: usize) -> Ordering {
    g.edges()[b]
        .weight
        .total_cmp(&g.edges()[a].weight)
        .then(a.cmp(&b))
}

/// `max(1, round(ln |V|))`.
pub fn knn_k(vertex_count: usize) -> usize {
    if vertex_count < 2 {
        return 1;
    }
    ((vertex_count as f64).ln().round() as usize).max(1)
}

/// Keep each vertex's k heaviest incident edges; HCCs are the connected
/// components of the union.
pub fn knn_extract(g: &MergedLcn) -> Vec<Hcc> {
    if g.vertex_count() < 2 {
        return Vec::new();
    }
    let k = knn_k(g.vertex_count());
    let mut kept = BTreeSet::new();
    for v in 0..g.vertex_count() {
        let mut incident: Vec<usize> = g.neighbors(v).iter().map(|&(_, e)| e).collect();
        incident.sort_by(|&a, &b| heaviest_first(g, a, b));
        kept.extend(incident.into_iter().take(k));
    }
    let kept: Vec<usize> = kept.into_iter().collect();
    components_of(g, &kept)
        .iter()
        .filter_map(|edges| Hcc::from_edge_indices(g, edges))
        .collect()
}

/// Keep the `floor(fraction * |E|)` heaviest edges (at least one); HCCs are
/// the connected components of what remains.
pub fn threshold_extract(g: &MergedLcn, fraction: f64) -> Result<Vec<Hcc>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::param(
            "threshold-fraction",
            format!("{fraction} is outside (0, 1]"),
        ));
    }
    if g.is_empty() {
        return Ok(Vec::new());
    }
    let keep = ((fraction * g.edge_count() as f64).floor() as usize).max(1);
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by(|&a, &b| heaviest_first(g, a, b));
    order.truncate(keep);
    Ok(components_of(g, &order)
        .iter()
        .filter_map(|edges| Hcc::from_edge_indices(g, edges))
        .collect())
}
