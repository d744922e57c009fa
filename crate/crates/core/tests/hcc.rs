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

mod common;

use std::collections::BTreeSet;

use lcn_core::hcc::{self, fsa_v_detailed, knn_extract, louvain, modularity, threshold_extract, FsaVParams, Hcc, Method};
use lcn_core::lcn::MergedLcn;
use proptest::prelude::*;

fn graph_strategy() -> impl Strategy<Value = MergedLcn> {
    (any::<u64>(), 2usize..60, 0.05f64..0.6, 1u64..20).prop_map(|(seed, n, p, w)| common::random_graph(seed, n, p, w))
}

fn assert_well_formed(g: &MergedLcn, hccs: &[Hcc]) -> Result<(), TestCaseError> {
    for h in hccs {
        prop_assert!(h.size() >= 2);
        prop_assert!(h.members.windows(2).all(|w| w[0] < w[1]));
        for e in &h.internal_edges {
            let (a, b) = (g.index_of(&e.u).unwrap(), g.index_of(&e.v).unwrap());
            prop_assert_eq!(g.edge_between(a, b).map(|x| x.weight), Some(e.weight));
            prop_assert!(h.contains(&e.u) && h.contains(&e.v));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fsa_v_invariants(g in graph_strategy(), seed in 0u64..100, theta in 0.05f64..=1.0) {
        let params = FsaVParams::new(theta).unwrap();
        let out = fsa_v_detailed(&g, &params, seed);
        assert_well_formed(&g, &out.hccs)?;
        prop_assert_eq!(out.g_mean, g.mean_edge_weight().ok());
        let g_mean = out.g_mean.unwrap_or(f64::INFINITY);
        for h in &out.hccs {
            prop_assert!(h.mew > g_mean);
            let members: BTreeSet<usize> = h.members.iter().map(|m| g.index_of(m).unwrap()).collect();
            let owners = out.communities.iter().filter(|c| members.iter().all(|v| c.contains(v))).count();
            prop_assert_eq!(owners, 1);
        }
        for c in &out.candidates {
            for &(old, new) in &c.accepted_steps {
                prop_assert!(new >= g_mean);
                prop_assert!(new >= old * theta);
            }
            let community: BTreeSet<usize> = out.communities[c.community].iter().copied().collect();
            for &e in &c.edges {
                let edge = &g.edges()[e];
                prop_assert!(community.contains(&edge.u) && community.contains(&edge.v));
            }
        }
        prop_assert_eq!(out.hccs.len(), out.candidates.iter().filter(|c| c.kept).count());
    }

    #[test]
    fn all_methods_are_deterministic(g in graph_strategy(), seed in 0u64..100) {
        for method in [Method::FsaV(FsaVParams::default()), Method::Knn, Method::Threshold { fraction: 0.9 }] {
            let a = hcc::extract(&g, &method, seed).unwrap();
            let b = hcc::extract(&g, &method, seed).unwrap();
            assert_well_formed(&g, &a)?;
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn louvain_covers_every_vertex_once(g in graph_strategy(), seed in 0u64..100) {
        let comms = louvain(&g, seed);
        let mut seen: Vec<usize> = comms.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..g.vertex_count()).collect::<Vec<_>>());
        prop_assert!((modularity(&g, &comms) - common::modularity_oracle(&g, &comms)).abs() < 1e-9);
    }

    #[test]
    fn full_threshold_is_component_split(g in graph_strategy()) {
        let hccs = threshold_extract(&g, 1.0).unwrap();
        let covered: usize = hccs.iter().map(Hcc::size).sum();
        let non_isolated = (0..g.vertex_count()).filter(|&v| !g.neighbors(v).is_empty()).count();
        prop_assert_eq!(covered, non_isolated);
        let edges: usize = hccs.iter().map(|h| h.internal_edges.len()).sum();
        prop_assert_eq!(edges, g.edge_count());
    }

    #[test]
    fn knn_keeps_every_non_isolated_vertex(g in graph_strategy()) {
        let hccs = knn_extract(&g);
        let covered: usize = hccs.iter().map(Hcc::size).sum();
        let non_isolated = (0..g.vertex_count()).filter(|&v| !g.neighbors(v).is_empty()).count();
        prop_assert_eq!(covered, non_isolated);
    }
}

#[test]
fn louvain_recovers_planted_blocks() {
    for seed in 0..10 {
        let (g, label) = common::planted_partition(seed, 4, 15, 0.6, 0.05);
        let comms = louvain(&g, seed);
        let q = common::modularity_oracle(&g, &comms);
        assert!(q >= 0.3, "seed {seed}: Q = {q}");
        assert!((modularity(&g, &comms) - q).abs() < 1e-9);
        for c in &comms {
            let blocks: BTreeSet<usize> = c.iter().map(|&v| label[g.index_of(&common::vertex_name(v)).unwrap()]).collect();
            assert_eq!(blocks.len(), 1, "seed {seed}: community spans blocks {blocks:?}");
        }
        assert_eq!(comms.len(), 4);
    }
}

#[test]
fn dense_graph_gives_single_knn_hcc() {
    for seed in 0..5 {
        let g = common::random_graph(seed, 100, 0.3, 10);
        assert_eq!(knn_extract(&g).len(), 1);
    }
}
