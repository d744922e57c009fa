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

//! One PASS/FAIL line per headline criterion. Exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use lcn_core::analysis::{self, CorpusIndex, Feature, NgramOptions};
use lcn_core::hcc::{fsa_v_detailed, fsa_v_with_communities, knn_extract, FsaVParams};
use lcn_core::interaction::{extract_all, Interaction, InteractionKind, ParsedCorpus};
use lcn_core::lcn::{merge_multi_edges, Lcn, MergedLcn};
use lcn_core::linkage::{filter_interactions, find_coordination, Criterion, LinkageOptions};
use lcn_core::pipeline::{self, AnalyzeConfig, DetectConfig};
use lcn_core::synth;
use lcn_core::window::{partition, window_of, WindowConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const FIDELITY_GRAPHS: u64 = 200;
const FIDELITY_MAX_VERTICES: usize = 200;
const FIDELITY_BUDGET: Duration = Duration::from_secs(10);
const EQ_LCNS: u64 = 1000;
const ORACLE_CORPORA: u64 = 500;
const ORACLE_MAX_POSTS: usize = 50;
const BOOST_SEED: u64 = 1;
const BOOST_MIN_F1: f64 = 0.90;
const BOOST_BUDGET: Duration = Duration::from_secs(60);
const KNN_VERTICES: usize = 100;
const KNN_DENSITY: f64 = 0.3;
const ENTROPY_MARGIN_BITS: f64 = 0.5;
const SIMILARITY_GAP: f64 = 0.2;
const COSINE_TOLERANCE: f64 = 1e-9;
const COSINE_MAX_DOCS: usize = 10;
const WINDOW_TIMESTAMPS: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn fsa_v_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (mut violations, mut hccs) = (0, 0);
    for seed in 0..FIDELITY_GRAPHS {
        let n = rng.random_range(2..=FIDELITY_MAX_VERTICES);
        let p = rng.random_range(0.01..0.3);
        let g = common::random_graph(seed, n, p, 20);
        let out = fsa_v_detailed(&g, &FsaVParams::default(), seed);
        let g_mean = out.g_mean.unwrap_or(f64::INFINITY);
        hccs += out.hccs.len();
        violations += out.hccs.iter().filter(|h| h.mew <= g_mean).count();
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < FIDELITY_BUDGET,
        format!("{FIDELITY_GRAPHS} graphs, {hccs} HCCs, {violations} violations, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn graph(edges: &[(&str, &str, f64)]) -> MergedLcn {
    MergedLcn::from_weighted_edges(edges.iter().copied()).unwrap()
}

fn hand_traces() -> Outcome {
    let params = FsaVParams::new(0.3).unwrap();
    let triangles = graph(&[
        ("a", "b", 10.0),
        ("a", "c", 10.0),
        ("b", "c", 10.0),
        ("d", "e", 1.0),
        ("d", "f", 1.0),
        ("e", "f", 1.0),
    ]);
    let t = fsa_v_detailed(&triangles, &params, 0);
    let triangles_ok = t.g_mean == Some(5.5)
        && t.hccs.len() == 1
        && t.hccs[0].members == ["a", "b", "c"]
        && t.hccs[0].mew == 10.0
        && t.candidates.iter().any(|c| !c.kept && c.mew == 1.0);

    let path = graph(&[("a", "b", 9.0), ("b", "c", 1.0)]);
    let p = fsa_v_with_communities(&path, vec![vec![0, 1, 2]], &params);
    let c = &p.candidates;
    let path_ok = p.g_mean == Some(5.0)
        && c.len() == 1
        && c[0].accepted_steps == [(9.0, 5.0)]
        && c[0].mew == 5.0
        && !c[0].kept
        && p.hccs.is_empty()
        && fsa_v_detailed(&path, &params, 0).hccs.is_empty();
    outcome(triangles_ok && path_ok, format!("two-triangle {triangles_ok}, 9/1 path {path_ok}"))
}

fn eq_one_exactness() -> Outcome {
    let mut mismatches = 0;
    let mut edges_checked = 0;
    for seed in 0..EQ_LCNS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut l = Lcn::new();
        let mut expected: BTreeMap<(String, String), u64> = BTreeMap::new();
        for _ in 0..rng.random_range(1..200) {
            let a = common::vertex_name(rng.random_range(0..30));
            let b = common::vertex_name(rng.random_range(0..30));
            if a == b {
                continue;
            }
            let c = Criterion::ALL[rng.random_range(0..Criterion::ALL.len())];
            let w = rng.random_range(1..1u64 << 40);
            l.add(&a, &b, c, w);
            let key = if a < b { (a, b) } else { (b, a) };
            *expected.entry(key).or_insert(0) += w;
        }
        let g = merge_multi_edges(&l);
        for e in g.edges() {
            edges_checked += 1;
            let sum = expected[&(g.vertex(e.u).to_string(), g.vertex(e.v).to_string())];
            if e.weight != sum as f64 || e.breakdown.values().sum::<u64>() != sum {
                mismatches += 1;
            }
        }
        if g.edge_count() != expected.len() {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{EQ_LCNS} LCNs, {edges_checked} merged edges, {mismatches} mismatches"))
}

fn link_oracle() -> Outcome {
    let all: BTreeSet<Criterion> = Criterion::ALL.into_iter().collect();
    let mut failures = 0;
    let mut links = 0;
    for seed in 0..ORACLE_CORPORA {
        let posts = common::random_posts(seed, (seed as usize % ORACLE_MAX_POSTS) + 1);
        let cfg = WindowConfig::new([1, 15, 60][seed as usize % 3]).unwrap();
        let interactions = extract_all(&posts);
        let filtered = filter_interactions(&interactions, &all).unwrap();
        let mut got = find_coordination(&partition(filtered, &cfg), &all, &LinkageOptions { max_group_size: None });
        let mut expected = common::brute_force_links(&interactions, &all, cfg.width_seconds());
        got.sort();
        expected.sort();
        links += got.len();
        if got != expected {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{ORACLE_CORPORA} corpora, {links} links, {failures} mismatches"))
}

struct BoostRun {
    posts: Vec<lcn_core::interaction::Post>,
    truth: BTreeMap<String, usize>,
    groups: Vec<Vec<String>>,
    f1: Option<f64>,
    elapsed: Duration,
}

fn boost_run() -> BoostRun {
    let start = Instant::now();
    let scenario = synth::generate(&common::boost_scenario(BOOST_SEED)).unwrap();
    let mut cfg = DetectConfig::new("unused", "unused");
    cfg.window = WindowConfig::new(15).unwrap();
    cfg.fsa_v = FsaVParams::new(0.3).unwrap();
    cfg.criteria = BTreeSet::from([Criterion::CoRetweet]);
    let corpus = ParsedCorpus {
        posts: scenario.posts.clone(),
        malformed: Vec::new(),
    };
    let det = pipeline::detect_posts(corpus, &cfg).unwrap();
    let groups = det.groups();
    let f1 = synth::score_detection(&scenario.truth, &groups).f1;
    BoostRun {
        posts: scenario.posts,
        truth: scenario.truth,
        groups,
        f1,
        elapsed: start.elapsed(),
    }
}

fn boost_recovery(run: &BoostRun) -> Outcome {
    let f1 = run.f1.unwrap_or(0.0);
    outcome(
        f1 >= BOOST_MIN_F1 && run.elapsed < BOOST_BUDGET,
        format!("F1 {f1:.4} over {} HCCs, {:.2}s", run.groups.len(), run.elapsed.as_secs_f64()),
    )
}

fn knn_single_hcc() -> Outcome {
    let g = common::random_graph(99, KNN_VERTICES, KNN_DENSITY, 10);
    let hccs = knn_extract(&g);
    outcome(
        hccs.len() == 1,
        format!("{} vertices, {} edges, {} HCCs", g.vertex_count(), g.edge_count(), hccs.len()),
    )
}

fn entropy_separation(run: &BoostRun) -> Outcome {
    let corpus = CorpusIndex::new(&run.posts);
    let feature = Feature::RetweetedAccounts;
    let mean = |groups: &[Vec<String>]| {
        let vals: Vec<f64> = groups
            .iter()
            .enumerate()
            .filter_map(|(i, g)| analysis::feature_entropy(i, g, &corpus).features.get(&feature).map(|e| e.entropy))
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    let random = analysis::random_baseline(&corpus.accounts(), &run.groups, 7).unwrap();
    match (mean(&run.groups), mean(&random)) {
        (Some(d), Some(r)) => outcome(
            r - d > ENTROPY_MARGIN_BITS,
            format!("detected {d:.4} bits, random {r:.4} bits, margin {:.4}", r - d),
        ),
        _ => outcome(false, "no groups used the feature"),
    }
}

fn similarity_structure(run: &BoostRun) -> Outcome {
    let corpus = CorpusIndex::new(&run.posts);
    let truth = synth::truth_groups(&run.truth);
    let m = analysis::similarity_matrix(&truth, &corpus, &NgramOptions::default());
    let (intra, inter) = m.block_means();
    let gap = intra.unwrap_or(0.0) - inter.unwrap_or(1.0);

    let mut worst: f64 = 0.0;
    let docs: Vec<&lcn_core::interaction::Post> = run.posts.iter().take(COSINE_MAX_DOCS).collect();
    let opts = NgramOptions::default();
    for a in &docs {
        for b in &docs {
            let da = analysis::AccountDocument::from_text(&a.account_id, &a.text, &opts);
            let db = analysis::AccountDocument::from_text(&b.account_id, &b.text, &opts);
            let diff = (analysis::cosine_similarity(&da, &db) - common::cosine_oracle(&a.text, &b.text)).abs();
            worst = worst.max(diff);
        }
    }
    outcome(
        gap >= SIMILARITY_GAP && worst <= COSINE_TOLERANCE,
        format!(
            "intra {:.4}, inter {:.4}, gap {gap:.4}; cosine oracle max error {worst:.1e}",
            intra.unwrap_or(f64::NAN),
            inter.unwrap_or(f64::NAN)
        ),
    )
}

fn windowing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let ts: Vec<u64> = (0..WINDOW_TIMESTAMPS).map(|_| rng.random_range(0..4_000_000_000)).collect();
    let interactions: Vec<Interaction> = ts
        .iter()
        .enumerate()
        .map(|(n, &t)| Interaction {
            kind: InteractionKind::Post,
            actor: format!("a{}", n % 97),
            timestamp: t,
            key: String::new(),
            source_post: format!("p{n}"),
        })
        .collect();
    let (fine_cfg, coarse_cfg) = (WindowConfig::new(15).unwrap(), WindowConfig::new(60).unwrap());
    let refined = ts
        .iter()
        .all(|&t| window_of(t, &fine_cfg).index() / 4 == window_of(t, &coarse_cfg).index());
    let parts = partition(interactions, &fine_cfg);
    let mut seen = BTreeSet::new();
    let total = parts
        .iter()
        .all(|(w, b)| b.iter().all(|i| window_of(i.timestamp, &fine_cfg) == *w && seen.insert(i.source_post.clone())))
        && seen.len() == WINDOW_TIMESTAMPS;
    outcome(refined && total, format!("{WINDOW_TIMESTAMPS} timestamps, refinement {refined}, totality {total}"))
}

fn hash_dir(dir: &Path) -> BTreeMap<String, String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, format!("{:x}", Sha256::digest(fs::read(&path).unwrap())))
        })
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().unwrap();
    let run = || {
        let scenario = synth::generate(&common::boost_scenario(5)).unwrap();
        let corpus = tmp.path().join("corpus.jsonl");
        fs::write(&corpus, scenario.corpus_text()).unwrap();
        let mut detect = DetectConfig::new(&corpus, tmp.path().join("detect"));
        detect.graphml = true;
        detect.dump_interactions = true;
        pipeline::run_detect(&detect).unwrap();
        let mut analyze = AnalyzeConfig::new(tmp.path().join("detect"), tmp.path().join("analyze"));
        analyze.random_baseline = true;
        analyze.seed = 3;
        pipeline::run_analyze(&analyze).unwrap();
        let mut all = hash_dir(&tmp.path().join("detect"));
        all.extend(hash_dir(&tmp.path().join("analyze")).into_iter().map(|(k, v)| (format!("analyze/{k}"), v)));
        all.insert("corpus.jsonl".into(), format!("{:x}", Sha256::digest(fs::read(&corpus).unwrap())));
        all
    };
    let first = run();
    let second = run();
    let differing = first.iter().filter(|(k, v)| second.get(*k) != Some(v)).count();
    outcome(
        differing == 0 && first.len() == second.len(),
        format!("{} files compared, {differing} differ", first.len()),
    )
}

fn main() {
    let boost = boost_run();
    let results = [
        ("FSA_V fidelity", fsa_v_fidelity()),
        ("FSA_V hand traces", hand_traces()),
        ("Multi-edge merge exactness", eq_one_exactness()),
        ("Link inference oracle", link_oracle()),
        ("Synthetic Boost recovery", boost_recovery(&boost)),
        ("kNN single HCC", knn_single_hcc()),
        ("Entropy separation", entropy_separation(&boost)),
        ("Similarity structure", similarity_structure(&boost)),
        ("Windowing properties", windowing()),
        ("Determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
