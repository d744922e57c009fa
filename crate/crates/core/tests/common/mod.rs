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

//! Independent reference implementations shared by the integration suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lcn_core::interaction::{Interaction, Post};
use lcn_core::lcn::MergedLcn;
use lcn_core::linkage::{Criterion, InferredLink};
use lcn_core::synth::{ImplantSpec, ScenarioConfig, Strategy};
use lcn_core::window::WindowId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn vertex_name(i: usize) -> String {
    format!("v{i:03}")
}

/// Erdos-Renyi graph with integer weights in `1..=max_w`.
pub fn random_graph(seed: u64, n: usize, p: f64, max_w: u64) -> MergedLcn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((vertex_name(a), vertex_name(b), rng.random_range(1..=max_w) as f64));
            }
        }
    }
    MergedLcn::from_weighted_edges(edges).unwrap()
}

/// Dense blocks of heavy edges over a sparse light background.
pub fn planted_partition(seed: u64, blocks: usize, block_size: usize, p_in: f64, p_out: f64) -> (MergedLcn, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = blocks * block_size;
    let label: Vec<usize> = (0..n).map(|i| i / block_size).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let same = label[a] == label[b];
            if rng.random_bool(if same { p_in } else { p_out }) {
                let w = if same { rng.random_range(5..=10) } else { 1 };
                edges.push((vertex_name(a), vertex_name(b), w as f64));
            }
        }
    }
    (MergedLcn::from_weighted_edges(edges).unwrap(), label)
}

/// Newman modularity as sum over communities of `e_cc - a_c^2`.
pub fn modularity_oracle(g: &MergedLcn, communities: &[Vec<usize>]) -> f64 {
    let mut label = vec![usize::MAX; g.vertex_count()];
    for (c, members) in communities.iter().enumerate() {
        for &v in members {
            label[v] = c;
        }
    }
    let m: f64 = g.edges().iter().map(|e| e.weight).sum();
    let mut internal = vec![0.0; communities.len()];
    let mut degree = vec![0.0; communities.len()];
    for e in g.edges() {
        degree[label[e.u]] += e.weight;
        degree[label[e.v]] += e.weight;
        if label[e.u] == label[e.v] {
            internal[label[e.u]] += e.weight;
        }
    }
    (0..communities.len())
        .map(|c| internal[c] / m - (degree[c] / (2.0 * m)).powi(2))
        .sum()
}

/// All-pairs scan: every two interactions with the same kind, window and
/// key but different actors give one unit per (window, criterion, pair, key).
pub fn brute_force_links(interactions: &[Interaction], criteria: &BTreeSet<Criterion>, width: u64) -> Vec<InferredLink> {
    let mut found = BTreeSet::new();
    for (i, a) in interactions.iter().enumerate() {
        for b in &interactions[i + 1..] {
            for &c in criteria {
                if a.kind != c.kind() || b.kind != c.kind() {
                    continue;
                }
                if a.key.is_empty() || a.key != b.key || a.actor == b.actor {
                    continue;
                }
                let (wa, wb) = (a.timestamp / width, b.timestamp / width);
                if wa != wb {
                    continue;
                }
                let (u, v) = if a.actor < b.actor { (&a.actor, &b.actor) } else { (&b.actor, &a.actor) };
                found.insert((wa, c, u.clone(), v.clone(), a.key.clone()));
            }
        }
    }
    found
        .into_iter()
        .map(|(w, criterion, u, v, key)| InferredLink {
            window: WindowId(w),
            criterion,
            u,
            v,
            key,
            weight: 1,
        })
        .collect()
}

/// Small random corpus over few accounts, keys and a short time span so that
/// coincidences are frequent.
pub fn random_posts(seed: u64, n: usize) -> Vec<Post> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng, prefix: &str, k: u32| format!("{prefix}{}", rng.random_range(0..k));
    (0..n)
        .map(|i| {
            let mut p = Post::new(format!("p{i:03}"), pick(&mut rng, "a", 8), rng.random_range(0..7_200));
            p.text = pick(&mut rng, "word", 50);
            if rng.random_bool(0.5) {
                p.reposted_post_id = Some(pick(&mut rng, "s", 4));
                p.reposted_account_id = Some(pick(&mut rng, "pub", 3));
            }
            if rng.random_bool(0.3) {
                p.replied_to_post_id = Some(pick(&mut rng, "r", 5));
                p.conversation_root_id = Some(pick(&mut rng, "conv", 3));
            }
            for _ in 0..rng.random_range(0..3) {
                p.hashtags.push(pick(&mut rng, "tag", 4));
            }
            for _ in 0..rng.random_range(0..2) {
                p.mentions.push(pick(&mut rng, "m", 4));
            }
            for _ in 0..rng.random_range(0..2) {
                p.urls.push(format!("https://site{}.example/x", rng.random_range(0..3)));
            }
            p
        })
        .collect()
}

/// Cosine similarity over 5-character windows, straight from the text.
pub fn cosine_oracle(a: &str, b: &str) -> f64 {
    fn grams(s: &str) -> BTreeMap<String, f64> {
        let norm: String = s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
        let chars: Vec<char> = norm.chars().collect();
        let mut m = BTreeMap::new();
        if chars.len() >= 5 {
            for w in chars.windows(5) {
                *m.entry(w.iter().collect::<String>()).or_insert(0.0) += 1.0;
            }
        }
        m
    }
    let (x, y) = (grams(a), grams(b));
    let dot: f64 = x.iter().map(|(k, v)| v * y.get(k).copied().unwrap_or(0.0)).sum();
    let nx: f64 = x.values().map(|v| v * v).sum::<f64>().sqrt();
    let ny: f64 = y.values().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        0.0
    } else {
        dot / (nx * ny)
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

/// Five BOOST groups of sizes 3..=8 over 500 background accounts.
pub fn boost_scenario(seed: u64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(seed, 14, 500, 0.3);
    cfg.implants = [3, 4, 5, 6, 8]
        .into_iter()
        .map(|group_size| ImplantSpec {
            strategy: Strategy::Boost,
            group_size,
            events: 10,
            within_window_seconds: 600,
            target: None,
        })
        .collect();
    cfg
}
