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

//! Python bindings: corpus parsing, LCN construction, HCC extraction,
//! validation analytics and synthetic scenarios.

use std::collections::{BTreeMap, BTreeSet};

use lcn_core::analysis::{self, CorpusIndex, NgramOptions};
use lcn_core::hcc::{self, FsaVParams, MethodName};
use lcn_core::interaction::{self, ParsedCorpus, Post};
use lcn_core::lcn::{self, MergedLcn};
use lcn_core::linkage::{self, LinkageOptions};
use lcn_core::pipeline::{self, DetectConfig};
use lcn_core::synth::{self, ScenarioConfig};
use lcn_core::window::{self, WindowConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: lcn_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse(jsonl: &str) -> lcn_core::Result<ParsedCorpus> {
    interaction::parse_posts(jsonl.as_bytes())
}

fn linkage_options(max_group_size: usize) -> LinkageOptions {
    LinkageOptions {
        max_group_size: (max_group_size > 0).then_some(max_group_size),
    }
}

/// Merged latent connection network.
#[pyclass(name = "Lcn", module = "lcn_py", frozen)]
pub struct PyLcn {
    inner: MergedLcn,
}

#[pymethods]
impl PyLcn {
    /// Build from `(u, v, weight)` triples; duplicate pairs are summed.
    #[new]
    fn new(edges: Vec<(String, String, f64)>) -> PyResult<Self> {
        MergedLcn::from_weighted_edges(edges).map(|inner| PyLcn { inner }).map_err(py_err)
    }

    /// Steps 1-4 of the pipeline over JSON-lines text.
    #[staticmethod]
    #[pyo3(signature = (jsonl, gamma=15, criteria="co_retweet", max_group_size=1000))]
    fn from_corpus(jsonl: &str, gamma: u64, criteria: &str, max_group_size: usize) -> PyResult<Self> {
        lcn_from_corpus(jsonl, gamma, criteria, max_group_size).map(|inner| PyLcn { inner }).map_err(py_err)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn vertices(&self) -> Vec<String> {
        self.inner.vertices().to_vec()
    }

    fn edges(&self) -> Vec<(String, String, f64)> {
        self.inner
            .edges()
            .iter()
            .map(|e| (self.inner.vertex(e.u).to_string(), self.inner.vertex(e.v).to_string(), e.weight))
            .collect()
    }

    /// Per-criterion provenance of each edge.
    fn breakdown(&self) -> Vec<(String, String, BTreeMap<String, u64>)> {
        self.inner
            .edges()
            .iter()
            .map(|e| {
                let b = e.breakdown.iter().map(|(c, w)| (c.to_string(), *w)).collect();
                (self.inner.vertex(e.u).to_string(), self.inner.vertex(e.v).to_string(), b)
            })
            .collect()
    }

    fn mean_edge_weight(&self) -> PyResult<f64> {
        self.inner.mean_edge_weight().map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Lcn(vertices={}, edges={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

fn lcn_from_corpus(jsonl: &str, gamma: u64, criteria: &str, max_group_size: usize) -> lcn_core::Result<MergedLcn> {
    let corpus = parse(jsonl)?;
    let criteria = linkage::parse_criteria(criteria)?;
    let filtered = linkage::filter_interactions(&interaction::extract_all(&corpus.posts), &criteria)?;
    let parts = window::partition(filtered, &WindowConfig::new(gamma)?);
    let links = linkage::find_coordination(&parts, &criteria, &linkage_options(max_group_size));
    let per_window = lcn::build_window_lcns(&links);
    Ok(lcn::merge_multi_edges(&lcn::aggregate(per_window.values())))
}

/// An extracted highly coordinating community.
#[pyclass(name = "Hcc", module = "lcn_py", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyHcc {
    members: Vec<String>,
    mew: f64,
    edges: Vec<(String, String, f64)>,
}

#[pymethods]
impl PyHcc {
    fn __len__(&self) -> usize {
        self.members.len()
    }

    fn __repr__(&self) -> String {
        format!("Hcc(size={}, mew={})", self.members.len(), self.mew)
    }
}

impl From<hcc::Hcc> for PyHcc {
    fn from(h: hcc::Hcc) -> Self {
        PyHcc {
            edges: h.internal_edges.into_iter().map(|e| (e.u, e.v, e.weight)).collect(),
            members: h.members,
            mew: h.mew,
        }
    }
}

fn wrap(hccs: Vec<hcc::Hcc>) -> Vec<PyHcc> {
    hccs.into_iter().map(PyHcc::from).collect()
}

/// Normalized URL and whether it parsed.
#[pyfunction]
fn normalize_url(url: &str) -> (String, bool) {
    let n = interaction::normalize_url(url);
    (n.url, n.valid)
}

#[pyfunction]
#[pyo3(signature = (timestamp, gamma=15))]
fn window_of(timestamp: u64, gamma: u64) -> PyResult<u64> {
    let cfg = WindowConfig::new(gamma).map_err(py_err)?;
    Ok(window::window_of(timestamp, &cfg).index())
}

type InteractionRow = (String, String, u64, String, String);

/// `(kind, actor, timestamp, key, source_post)` for every interaction,
/// plus the 1-based line numbers of malformed records.
#[pyfunction]
fn extract_interactions(jsonl: &str) -> PyResult<(Vec<InteractionRow>, Vec<usize>)> {
    let corpus = parse(jsonl).map_err(py_err)?;
    let rows = interaction::extract_all(&corpus.posts)
        .into_iter()
        .map(|i| (i.kind.to_string(), i.actor, i.timestamp, i.key, i.source_post))
        .collect();
    Ok((rows, corpus.malformed.iter().map(|m| m.line).collect()))
}

#[pyfunction]
#[pyo3(signature = (lcn, seed=0))]
fn louvain(lcn: &PyLcn, seed: u64) -> Vec<Vec<String>> {
    hcc::louvain(&lcn.inner, seed)
        .into_iter()
        .map(|c| c.into_iter().map(|v| lcn.inner.vertex(v).to_string()).collect())
        .collect()
}

#[pyfunction]
#[pyo3(signature = (lcn, theta=0.3, seed=0, strict=true))]
fn fsa_v(lcn: &PyLcn, theta: f64, seed: u64, strict: bool) -> PyResult<Vec<PyHcc>> {
    let mut params = FsaVParams::new(theta).map_err(py_err)?;
    params.strict_final_filter = strict;
    Ok(wrap(hcc::fsa_v(&lcn.inner, &params, seed)))
}

#[pyfunction]
fn knn_extract(lcn: &PyLcn) -> Vec<PyHcc> {
    wrap(hcc::knn_extract(&lcn.inner))
}

#[pyfunction]
#[pyo3(signature = (lcn, fraction=0.9))]
fn threshold_extract(lcn: &PyLcn, fraction: f64) -> PyResult<Vec<PyHcc>> {
    hcc::threshold_extract(&lcn.inner, fraction).map(wrap).map_err(py_err)
}

fn detect_inner(
    jsonl: &str,
    gamma: u64,
    criteria: &str,
    method: &str,
    theta: f64,
    threshold_fraction: f64,
    seed: u64,
) -> lcn_core::Result<Vec<hcc::Hcc>> {
    let mut cfg = DetectConfig::new("", "");
    cfg.window = WindowConfig::new(gamma)?;
    cfg.criteria = linkage::parse_criteria(criteria)?;
    cfg.method = method.parse::<MethodName>()?;
    cfg.fsa_v = FsaVParams::new(theta)?;
    if !(threshold_fraction > 0.0 && threshold_fraction <= 1.0) {
        return Err(lcn_core::Error::InvalidParameter {
            name: "threshold_fraction",
            reason: format!("{threshold_fraction} is outside (0, 1]"),
        });
    }
    cfg.threshold_fraction = threshold_fraction;
    cfg.seed = seed;
    Ok(pipeline::detect_posts(parse(jsonl)?, &cfg)?.hccs)
}

/// The whole detection pipeline over JSON-lines text.
#[pyfunction]
#[pyo3(signature = (jsonl, gamma=15, criteria="co_retweet", method="fsa_v", theta=0.3, threshold_fraction=0.9, seed=0))]
fn detect(
    jsonl: &str,
    gamma: u64,
    criteria: &str,
    method: &str,
    theta: f64,
    threshold_fraction: f64,
    seed: u64,
) -> PyResult<Vec<PyHcc>> {
    detect_inner(jsonl, gamma, criteria, method, theta, threshold_fraction, seed)
        .map(wrap)
        .map_err(py_err)
}

/// Generate a scenario from TOML text: `(corpus_jsonl, truth)`.
#[pyfunction]
fn generate_scenario(config_toml: &str) -> PyResult<(String, BTreeMap<String, usize>)> {
    let cfg = ScenarioConfig::from_toml(config_toml).map_err(py_err)?;
    let s = synth::generate(&cfg).map_err(py_err)?;
    Ok((s.corpus_text(), s.truth))
}

/// Pairwise `(precision, recall, f1)`; `None` where undefined.
#[pyfunction]
fn score_detection(truth: BTreeMap<String, usize>, groups: Vec<Vec<String>>) -> (Option<f64>, Option<f64>, Option<f64>) {
    let s = synth::score_detection(&truth, &groups);
    (s.precision, s.recall, s.f1)
}

/// Entropy in bits per used feature for one group of accounts.
#[pyfunction]
fn feature_entropy(jsonl: &str, members: Vec<String>) -> PyResult<BTreeMap<String, f64>> {
    let corpus = parse(jsonl).map_err(py_err)?;
    let index = CorpusIndex::new(&corpus.posts);
    let report = analysis::feature_entropy(0, &members, &index);
    Ok(report.features.into_iter().map(|(f, e)| (f.to_string(), e.entropy)).collect())
}

/// Cosine similarity of two texts over character 5-grams.
#[pyfunction]
fn text_similarity(a: &str, b: &str) -> f64 {
    let opts = NgramOptions::default();
    let da = analysis::AccountDocument::from_text("a", a, &opts);
    let db = analysis::AccountDocument::from_text("b", b, &opts);
    analysis::cosine_similarity(&da, &db)
}

/// `(irr, imr)` for one group; `None` when the denominator is zero.
#[pyfunction]
fn internal_ratios(jsonl: &str, members: Vec<String>) -> PyResult<(Option<f64>, Option<f64>)> {
    let corpus = parse(jsonl).map_err(py_err)?;
    let r = analysis::internal_ratios(&members, &CorpusIndex::new(&corpus.posts));
    Ok((r.irr, r.imr))
}

/// Random groups of the same sizes drawn from accounts outside `groups`.
#[pyfunction]
#[pyo3(signature = (jsonl, groups, seed=0))]
fn random_baseline(jsonl: &str, groups: Vec<Vec<String>>, seed: u64) -> PyResult<Vec<Vec<String>>> {
    let corpus = parse(jsonl).map_err(py_err)?;
    let accounts: BTreeSet<String> = corpus.posts.iter().map(|p: &Post| p.account_id.clone()).collect();
    analysis::random_baseline(&accounts, &groups, seed).map_err(py_err)
}

#[pymodule]
fn lcn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLcn>()?;
    m.add_class::<PyHcc>()?;
    m.add_function(wrap_pyfunction!(normalize_url, m)?)?;
    m.add_function(wrap_pyfunction!(window_of, m)?)?;
    m.add_function(wrap_pyfunction!(extract_interactions, m)?)?;
    m.add_function(wrap_pyfunction!(louvain, m)?)?;
    m.add_function(wrap_pyfunction!(fsa_v, m)?)?;
    m.add_function(wrap_pyfunction!(knn_extract, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_extract, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(score_detection, m)?)?;
    m.add_function(wrap_pyfunction!(feature_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(text_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(internal_ratios, m)?)?;
    m.add_function(wrap_pyfunction!(random_baseline, m)?)?;
    Ok(())
}
