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

//! Hashtag co-occurrence graphs and reason-expansion graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use super::CorpusIndex;
use crate::graphml::GraphMl;
use crate::interaction::normalize_hashtag;
use crate::linkage::{Criterion, InferredLink};
use crate::window::WindowId;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagGraph {
    /// Hashtag -> number of member posts using it.
    pub tags: BTreeMap<String, u64>,
    /// `(a, b)` with `a < b` -> number of member posts containing both.
    pub edges: BTreeMap<(String, String), u64>,
}

impl TagGraph {
    pub fn write_graphml<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut doc = GraphMl::new(false);
        doc.node_key("uses", "long");
        doc.edge_key("weight", "long");
        for (t, n) in &self.tags {
            doc.node(t, vec![("uses".into(), n.to_string())]);
        }
        for ((a, b), w) in &self.edges {
            doc.edge(a, b, vec![("weight".into(), w.to_string())]);
        }
        doc.write(out)
    }
}

pub fn hashtag_cooccurrence(members: &[String], corpus: &CorpusIndex<'_>) -> TagGraph {
    let mut g = TagGraph::default();
    for p in corpus.member_posts(members) {
        let tags: Vec<String> = p
            .hashtags
            .iter()
            .map(|t| normalize_hashtag(t))
            .filter(|t| !t.is_empty())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for (i, a) in tags.iter().enumerate() {
            *g.tags.entry(a.clone()).or_insert(0) += 1;
            for b in &tags[i + 1..] {
                *g.edges.entry((a.clone(), b.clone())).or_insert(0) += 1;
            }
        }
    }
    g
}

/// Accounts of each HCC joined to the keys that linked them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReasonGraph {
    /// Account -> HCC index.
    pub accounts: BTreeMap<String, usize>,
    /// `(criterion, key)` reason vertices.
    pub reasons: BTreeSet<(Criterion, String)>,
    /// `(account, criterion, key)` -> number of windows in which the account
    /// was linked to a fellow member through that key.
    pub reason_edges: BTreeMap<(String, Criterion, String), u64>,
    /// `(u, v)` -> inferred links between members of the same HCC.
    pub account_edges: BTreeMap<(String, String), u64>,
}

impl ReasonGraph {
    pub fn reason_vertex_id(criterion: Criterion, key: &str) -> String {
        format!("{criterion}:{key}")
    }

    pub fn write_graphml<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut doc = GraphMl::new(false);
        doc.node_key("kind", "string");
        doc.node_key("hcc_id", "long");
        doc.node_key("criterion", "string");
        doc.node_key("key", "string");
        doc.edge_key("kind", "string");
        doc.edge_key("weight", "long");
        for (a, h) in &self.accounts {
            doc.node(a, vec![("kind".into(), "account".into()), ("hcc_id".into(), h.to_string())]);
        }
        for (c, k) in &self.reasons {
            doc.node(
                &Self::reason_vertex_id(*c, k),
                vec![
                    ("kind".into(), "reason".into()),
                    ("criterion".into(), c.to_string()),
                    ("key".into(), k.clone()),
                ],
            );
        }
        for ((u, v), w) in &self.account_edges {
            doc.edge(u, v, vec![("kind".into(), "link".into()), ("weight".into(), w.to_string())]);
        }
        for ((a, c, k), w) in &self.reason_edges {
            doc.edge(
                a,
                &Self::reason_vertex_id(*c, k),
                vec![("kind".into(), "reason".into()), ("weight".into(), w.to_string())],
            );
        }
        doc.write(out)
    }

    /// `hcc_id TAB account TAB criterion TAB key TAB weight` lines.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for ((a, c, k), w) in &self.reason_edges {
            writeln!(out, "{}\t{a}\t{c}\t{k}\t{w}", self.accounts[a])?;
        }
        Ok(())
    }
}

/// Expand HCCs with the keys behind their internal links. Links between
/// accounts of different HCCs, or outside any HCC, are ignored.
pub fn expand_reasons(groups: &[Vec<String>], links: &[InferredLink]) -> ReasonGraph {
    let mut g = ReasonGraph::default();
    let mut owner: HashMap<&str, usize> = HashMap::new();
    for (hi, members) in groups.iter().enumerate() {
        for m in members {
            owner.entry(m.as_str()).or_insert(hi);
            g.accounts.entry(m.clone()).or_insert(hi);
        }
    }
    let mut usage: BTreeSet<(&str, Criterion, &str, WindowId)> = BTreeSet::new();
    for l in links {
        match (owner.get(l.u.as_str()), owner.get(l.v.as_str())) {
            (Some(a), Some(b)) if a == b => {}
            _ => continue,
        }
        *g.account_edges.entry((l.u.clone(), l.v.clone())).or_insert(0) += l.weight;
        g.reasons.insert((l.criterion, l.key.clone()));
        usage.insert((&l.u, l.criterion, &l.key, l.window));
        usage.insert((&l.v, l.criterion, &l.key, l.window));
    }
    for (a, c, k, _) in usage {
        *g.reason_edges.entry((a.to_string(), c, k.to_string())).or_insert(0) += 1;
    }
    g
}
