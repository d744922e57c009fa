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

//! Latent connection networks: per-criterion multigraphs built from
//! inferred links, and their scalar-weighted merged form.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkage::{Criterion, InferredLink};
use crate::window::WindowId;

/// Typed multigraph over accounts. Each `(u, v, criterion)` triple with
/// `u < v` holds a positive integer weight.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lcn {
    pub vertices: BTreeSet<String>,
    pub edges: BTreeMap<(String, String, Criterion), u64>,
}

impl Lcn {
    pub fn new() -> Self {
        Lcn::default()
    }

    /// Accumulate links regardless of which window they came from.
    pub fn from_links<'a>(links: impl IntoIterator<Item = &'a InferredLink>) -> Self {
        let mut lcn = Lcn::new();
        for l in links {
            lcn.add(&l.u, &l.v, l.criterion, l.weight);
        }
        lcn
    }

    /// Add `weight` to the `(u, v, criterion)` edge. Self-pairs and zero
    /// weights are ignored.
    pub fn add(&mut self, u: &str, v: &str, criterion: Criterion, weight: u64) {
        if u == v || weight == 0 {
            return;
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.vertices.insert(a.to_string());
        self.vertices.insert(b.to_string());
        *self
            .edges
            .entry((a.to_string(), b.to_string(), criterion))
            .or_insert(0) += weight;
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }
}

/// Build the LCN of one window.
pub fn build_lcn(links: &[InferredLink], window: WindowId) -> Lcn {
    debug_assert!(links.iter().all(|l| l.window == window));
    Lcn::from_links(links)
}

/// One LCN per window present in `links`.
pub fn build_window_lcns(links: &[InferredLink]) -> BTreeMap<WindowId, Lcn> {
    let mut out: BTreeMap<WindowId, Lcn> = BTreeMap::new();
    for l in links {
        out.entry(l.window).or_default().add(&l.u, &l.v, l.criterion, l.weight);
    }
    out
}

/// Sum per-(u, v, criterion) weights across windows.
pub fn aggregate<'a>(lcns: impl IntoIterator<Item = &'a Lcn>) -> Lcn {
    let mut out = Lcn::new();
    for l in lcns {
        out.vertices.extend(l.vertices.iter().cloned());
        for (k, w) in &l.edges {
            *out.edges.entry(k.clone()).or_insert(0) += w;
        }
    }
    out
}

/// Per-criterion multipliers applied while collapsing multi-edges.
/// Missing criteria default to 1.0; all 1.0 is a plain sum.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CriterionWeights(pub BTreeMap<Criterion, f64>);

impl CriterionWeights {
    pub fn get(&self, c: Criterion) -> f64 {
        self.0.get(&c).copied().unwrap_or(1.0)
    }

    pub fn is_unit(&self) -> bool {
        self.0.values().all(|w| *w == 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedEdge {
    /// Vertex indices, `u < v`.
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    /// Per-criterion weights that were collapsed into `weight`.
    pub breakdown: BTreeMap<Criterion, u64>,
}

/// Simple weighted undirected graph. Vertices are kept in lexicographic
/// order so vertex indices and canonical `(u, v)` order agree.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedLcn {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<MergedEdge>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MergedLcn {
    fn assemble(vertices: Vec<String>, mut edges: Vec<MergedEdge>) -> Self {
        edges.sort_by_key(|e| (e.u, e.v));
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (ei, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, ei));
            adjacency[e.v].push((e.u, ei));
        }
        MergedLcn {
            vertices,
            index,
            edges,
            adjacency,
        }
    }

    /// Build from arbitrary weighted pairs. Repeated pairs are summed.
    /// Every weight must be finite and positive; self-loops are rejected.
    pub fn from_weighted_edges<S: AsRef<str>>(
        edges: impl IntoIterator<Item = (S, S, f64)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(String, String), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            if u == v {
                return Err(Error::InvalidEdge {
                    u: u.into(),
                    v: v.into(),
                    reason: "self-loop".into(),
                });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidEdge {
                    u: u.into(),
                    v: v.into(),
                    reason: format!("weight {w} is not positive"),
                });
            }
            let key = if u < v { (u.to_string(), v.to_string()) } else { (v.to_string(), u.to_string()) };
            *acc.entry(key).or_insert(0.0) += w;
        }
        let vertices: Vec<String> = acc
            .keys()
            .flat_map(|(u, v)| [u.clone(), v.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let pos: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let edges = acc
            .iter()
            .map(|((u, v), w)| MergedEdge {
                u: pos[u.as_str()],
                v: pos[v.as_str()],
                weight: *w,
                breakdown: BTreeMap::new(),
            })
            .collect();
        Ok(MergedLcn::assemble(vertices, edges))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn index_of(&self, account: &str) -> Option<usize> {
        self.index.get(account).copied()
    }

    /// Edges in canonical `(u, v)` order.
    pub fn edges(&self) -> &[MergedEdge] {
        &self.edges
    }

    /// `(neighbour, edge index)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&MergedEdge> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&(u, v)))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|&(_, e)| self.edges[e].weight).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn mean_edge_weight(&self) -> Result<f64> {
        mean_edge_weight(self.edges.iter().map(|e| e.weight))
    }

    /// Write `u TAB v TAB weight TAB breakdown` lines, one per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                self.vertices[e.u],
                self.vertices[e.v],
                e.weight,
                format_breakdown(&e.breakdown)
            )?;
        }
        Ok(())
    }

    /// GraphML with a `weight` attribute plus one attribute per criterion.
    pub fn write_graphml<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut doc = crate::graphml::GraphMl::new(false);
        doc.edge_key("weight", "double");
        for c in Criterion::ALL {
            doc.edge_key(c.as_str(), "long");
        }
        for v in &self.vertices {
            doc.node(v, Vec::new());
        }
        for e in &self.edges {
            let mut attrs = vec![("weight".to_string(), e.weight.to_string())];
            attrs.extend(e.breakdown.iter().map(|(c, w)| (c.as_str().to_string(), w.to_string())));
            doc.edge(&self.vertices[e.u], &self.vertices[e.v], attrs);
        }
        doc.write(out)
    }
}

/// `co_retweet:2,co_hashtag:3`, or `-` when empty.
pub fn format_breakdown(b: &BTreeMap<Criterion, u64>) -> String {
    if b.is_empty() {
        return "-".into();
    }
    b.iter()
        .map(|(c, w)| format!("{c}:{w}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Collapse typed multi-edges into one scalar weight per pair by summation.
pub fn merge_multi_edges(l: &Lcn) -> MergedLcn {
    merge_multi_edges_weighted(l, &CriterionWeights::default())
}

/// Like [`merge_multi_edges`] but scales each criterion's weight first.
pub fn merge_multi_edges_weighted(l: &Lcn, multipliers: &CriterionWeights) -> MergedLcn {
    let vertices: Vec<String> = l.vertices.iter().cloned().collect();
    let pos: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut grouped: BTreeMap<(usize, usize), BTreeMap<Criterion, u64>> = BTreeMap::new();
    for ((u, v, c), w) in &l.edges {
        grouped
            .entry((pos[u.as_str()], pos[v.as_str()]))
            .or_default()
            .insert(*c, *w);
    }
    let unit = multipliers.is_unit();
    let edges = grouped
        .into_iter()
        .map(|((u, v), breakdown)| {
            let weight = if unit {
                breakdown.values().sum::<u64>() as f64
            } else {
                breakdown
                    .iter()
                    .map(|(c, w)| *w as f64 * multipliers.get(*c))
                    .sum()
            };
            MergedEdge { u, v, weight, breakdown }
        })
        .collect();
    MergedLcn::assemble(vertices, edges)
}

/// Arithmetic mean of edge weights.
pub fn mean_edge_weight(weights: impl IntoIterator<Item = f64>) -> Result<f64> {
    let (sum, n) = weights
        .into_iter()
        .fold((0.0f64, 0usize), |(s, n), w| (s + w, n + 1));
    if n == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    Ok(sum / n as f64)
}
