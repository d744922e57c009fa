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

//! End-to-end runs and their file outputs.
//!
//! Configuration comes from TOML files whose keys mirror the command-line
//! flags; flags override file values. Every detect run writes a manifest
//! that can be fed back as `--config` to reproduce the run exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{self, CorpusIndex, Feature, NgramOptions, TimeBucket};
use crate::error::{Error, Result};
use crate::hcc::{self, FsaVParams, Hcc, Method, MethodName};
use crate::interaction::{self, Interaction, ParsedCorpus, Post};
use crate::lcn::{self, CriterionWeights, MergedLcn};
use crate::linkage::{self, Criterion, InferredLink, LinkageOptions};
use crate::synth::{self, PairwiseScore};
use crate::window::{self, WindowConfig};

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const MEMBERSHIP_FILE: &str = "hcc_membership.csv";
pub const SUMMARY_FILE: &str = "hcc_summary.json";
pub const EDGE_LIST_FILE: &str = "lcn_edges.tsv";
pub const GRAPHML_FILE: &str = "lcn.graphml";
pub const INTERACTIONS_FILE: &str = "interactions.tsv";

/// Every detect/analyze setting, all optional. Used both for config files
/// and for collecting command-line overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub gamma: Option<u64>,
    pub criteria: Option<String>,
    /// 0 disables the cap.
    pub max_group_size: Option<usize>,
    pub method: Option<String>,
    pub theta: Option<f64>,
    pub threshold_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub final_filter_strict: Option<bool>,
    pub graphml: Option<bool>,
    /// Extra copy of the LCN edge list (and GraphML, with `graphml`).
    pub dump_lcn: Option<PathBuf>,
    pub dump_interactions: Option<bool>,
    pub criterion_weights: Option<BTreeMap<Criterion, f64>>,
    pub detect_dir: Option<PathBuf>,
    pub random_baseline: Option<bool>,
    pub bucket: Option<String>,
    pub binary_ngrams: Option<bool>,
    /// Written by detect runs; ignored on input.
    #[serde(skip_serializing)]
    pub stats: Option<toml::Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Field-wise `self.or(fallback)`.
    pub fn or(self, fallback: ConfigFile) -> ConfigFile {
        ConfigFile {
            input: self.input.or(fallback.input),
            out: self.out.or(fallback.out),
            gamma: self.gamma.or(fallback.gamma),
            criteria: self.criteria.or(fallback.criteria),
            max_group_size: self.max_group_size.or(fallback.max_group_size),
            method: self.method.or(fallback.method),
            theta: self.theta.or(fallback.theta),
            threshold_fraction: self.threshold_fraction.or(fallback.threshold_fraction),
            seed: self.seed.or(fallback.seed),
            final_filter_strict: self.final_filter_strict.or(fallback.final_filter_strict),
            graphml: self.graphml.or(fallback.graphml),
            dump_lcn: self.dump_lcn.or(fallback.dump_lcn),
            dump_interactions: self.dump_interactions.or(fallback.dump_interactions),
            criterion_weights: self.criterion_weights.or(fallback.criterion_weights),
            detect_dir: self.detect_dir.or(fallback.detect_dir),
            random_baseline: self.random_baseline.or(fallback.random_baseline),
            bucket: self.bucket.or(fallback.bucket),
            binary_ngrams: self.binary_ngrams.or(fallback.binary_ngrams),
            stats: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    pub input: PathBuf,
    pub out: PathBuf,
    pub window: WindowConfig,
    pub criteria: BTreeSet<Criterion>,
    pub linkage: LinkageOptions,
    pub method: MethodName,
    pub fsa_v: FsaVParams,
    pub threshold_fraction: f64,
    pub seed: u64,
    pub criterion_weights: CriterionWeights,
    pub graphml: bool,
    pub dump_lcn: Option<PathBuf>,
    pub dump_interactions: bool,
}

impl DetectConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        DetectConfig {
            input: input.into(),
            out: out.into(),
            window: WindowConfig::default(),
            criteria: BTreeSet::from([Criterion::CoRetweet]),
            linkage: LinkageOptions::default(),
            method: MethodName::FsaV,
            fsa_v: FsaVParams::default(),
            threshold_fraction: hcc::DEFAULT_THRESHOLD_FRACTION,
            seed: 0,
            criterion_weights: CriterionWeights::default(),
            graphml: false,
            dump_lcn: None,
            dump_interactions: false,
        }
    }

    /// Fill in defaults and validate every parameter.
    pub fn from_file(f: &ConfigFile) -> Result<Self> {
        let input = f.input.clone().ok_or_else(|| Error::param("input", "an input corpus is required"))?;
        let out = f.out.clone().ok_or_else(|| Error::param("out", "an output directory is required"))?;
        let mut cfg = DetectConfig::new(input, out);
        if let Some(g) = f.gamma {
            cfg.window = WindowConfig::new(g)?;
        }
        if let Some(c) = &f.criteria {
            cfg.criteria = linkage::parse_criteria(c)?;
        }
        if let Some(m) = f.max_group_size {
            cfg.linkage.max_group_size = (m > 0).then_some(m);
        }
        if let Some(m) = &f.method {
            cfg.method = m.parse()?;
        }
        if let Some(t) = f.theta {
            cfg.fsa_v = FsaVParams::new(t)?;
        }
        if let Some(s) = f.final_filter_strict {
            cfg.fsa_v.strict_final_filter = s;
        }
        if let Some(t) = f.threshold_fraction {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::param("threshold-fraction", format!("{t} is outside (0, 1]")));
            }
            cfg.threshold_fraction = t;
        }
        if let Some(w) = &f.criterion_weights {
            if let Some((c, v)) = w.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::param("criterion-weights", format!("{c} weight {v} is not positive")));
            }
            cfg.criterion_weights = CriterionWeights(w.clone());
        }
        cfg.seed = f.seed.unwrap_or(0);
        cfg.graphml = f.graphml.unwrap_or(false);
        cfg.dump_lcn = f.dump_lcn.clone();
        cfg.dump_interactions = f.dump_interactions.unwrap_or(false);
        Ok(cfg)
    }

    /// The fully resolved configuration, in config-file form.
    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            input: Some(self.input.clone()),
            out: Some(self.out.clone()),
            gamma: Some(self.window.gamma_minutes()),
            criteria: Some(linkage::criteria_to_string(&self.criteria)),
            max_group_size: Some(self.linkage.max_group_size.unwrap_or(0)),
            method: Some(self.method.to_string()),
            theta: Some(self.fsa_v.theta()),
            threshold_fraction: Some(self.threshold_fraction),
            seed: Some(self.seed),
            final_filter_strict: Some(self.fsa_v.strict_final_filter),
            graphml: Some(self.graphml),
            dump_lcn: self.dump_lcn.clone(),
            dump_interactions: Some(self.dump_interactions),
            criterion_weights: (!self.criterion_weights.0.is_empty()).then(|| self.criterion_weights.0.clone()),
            ..ConfigFile::default()
        }
    }

    pub fn extraction_method(&self) -> Method {
        match self.method {
            MethodName::FsaV => Method::FsaV(self.fsa_v),
            MethodName::Knn => Method::Knn,
            MethodName::Threshold => Method::Threshold {
                fraction: self.threshold_fraction,
            },
        }
    }
}

/// Table-2-style corpus statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub posts: u64,
    pub reposts: u64,
    pub repost_percent: f64,
    pub accounts: u64,
    pub days: u64,
    pub posts_per_account_per_day: f64,
    pub reposts_per_account_per_day: f64,
}

pub fn corpus_stats(posts: &[Post]) -> CorpusStats {
    let n = posts.len() as u64;
    let reposts = posts.iter().filter(|p| p.is_repost()).count() as u64;
    let accounts = posts.iter().map(|p| p.account_id.as_str()).collect::<BTreeSet<_>>().len() as u64;
    let days = match (posts.iter().map(|p| p.timestamp).min(), posts.iter().map(|p| p.timestamp).max()) {
        (Some(lo), Some(hi)) => (hi - lo + 1).div_ceil(86_400).max(1),
        _ => 0,
    };
    let per = |x: u64| if accounts == 0 || days == 0 { 0.0 } else { x as f64 / accounts as f64 / days as f64 };
    CorpusStats {
        posts: n,
        reposts,
        repost_percent: if n == 0 { 0.0 } else { 100.0 * reposts as f64 / n as f64 },
        accounts,
        days,
        posts_per_account_per_day: per(n),
        reposts_per_account_per_day: per(reposts),
    }
}

/// Everything a detect run computes, kept in memory.
#[derive(Debug, Clone)]
pub struct Detection {
    pub corpus: ParsedCorpus,
    pub interactions: Vec<Interaction>,
    pub filtered: usize,
    pub windows: usize,
    pub links: Vec<InferredLink>,
    pub lcn: MergedLcn,
    pub hccs: Vec<Hcc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    #[serde(flatten)]
    pub corpus: CorpusStats,
    pub malformed_lines: u64,
    pub interactions: u64,
    pub filtered_interactions: u64,
    pub windows: u64,
    pub inferred_links: u64,
    pub lcn_vertices: u64,
    pub lcn_edges: u64,
    pub lcn_mean_edge_weight: Option<f64>,
    pub hccs: u64,
    pub hcc_accounts: u64,
}

pub fn read_corpus(path: &Path) -> Result<ParsedCorpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    interaction::parse_posts(BufReader::new(file))
}

/// Steps 1-5 over an already-parsed corpus.
pub fn detect_posts(corpus: ParsedCorpus, cfg: &DetectConfig) -> Result<Detection> {
    let interactions = interaction::extract_all(&corpus.posts);
    let filtered = linkage::filter_interactions(&interactions, &cfg.criteria)?;
    let n_filtered = filtered.len();
    let parts = window::partition(filtered, &cfg.window);
    let links = linkage::find_coordination(&parts, &cfg.criteria, &cfg.linkage);
    let per_window = lcn::build_window_lcns(&links);
    let aggregated = lcn::aggregate(per_window.values());
    let merged = lcn::merge_multi_edges_weighted(&aggregated, &cfg.criterion_weights);
    let hccs = hcc::extract(&merged, &cfg.extraction_method(), cfg.seed)?;
    Ok(Detection {
        corpus,
        interactions,
        filtered: n_filtered,
        windows: parts.len(),
        links,
        lcn: merged,
        hccs,
    })
}

impl Detection {
    pub fn stats(&self) -> RunStats {
        RunStats {
            corpus: corpus_stats(&self.corpus.posts),
            malformed_lines: self.corpus.malformed.len() as u64,
            interactions: self.interactions.len() as u64,
            filtered_interactions: self.filtered as u64,
            windows: self.windows as u64,
            inferred_links: self.links.len() as u64,
            lcn_vertices: self.lcn.vertex_count() as u64,
            lcn_edges: self.lcn.edge_count() as u64,
            lcn_mean_edge_weight: self.lcn.mean_edge_weight().ok(),
            hccs: self.hccs.len() as u64,
            hcc_accounts: self.hccs.iter().map(|h| h.members.len() as u64).sum(),
        }
    }

    pub fn groups(&self) -> Vec<Vec<String>> {
        self.hccs.iter().map(|h| h.members.clone()).collect()
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    #[serde(flatten)]
    config: ConfigFile,
    stats: &'a RunStats,
}

#[derive(Serialize)]
struct HccSummary {
    hcc_id: usize,
    size: usize,
    mew: f64,
    edge_count: usize,
    criterion_breakdown: BTreeMap<Criterion, u64>,
}

#[derive(Serialize)]
struct SummaryDoc {
    method: String,
    lcn_mean_edge_weight: Option<f64>,
    hccs: Vec<HccSummary>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish<W: Write>(mut w: W, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Run detection and write manifest, LCN dump, membership CSV and summary
/// JSON into `cfg.out`.
pub fn run_detect(cfg: &DetectConfig) -> Result<Detection> {
    let corpus = read_corpus(&cfg.input)?;
    let det = detect_posts(corpus, cfg)?;
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let stats = det.stats();

    let path = cfg.out.join(MANIFEST_FILE);
    let manifest = Manifest {
        config: cfg.to_file(),
        stats: &stats,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;

    let mut targets = vec![(cfg.out.join(EDGE_LIST_FILE), cfg.out.join(GRAPHML_FILE))];
    if let Some(p) = &cfg.dump_lcn {
        targets.push((p.clone(), p.with_extension("graphml")));
    }
    for (edges, graphml) in &targets {
        write_lcn(&det.lcn, edges, cfg.graphml.then_some(graphml.as_path()))?;
    }

    if cfg.dump_interactions {
        let path = cfg.out.join(INTERACTIONS_FILE);
        write_interactions(&det.interactions, &path)?;
    }

    write_membership(&cfg.out.join(MEMBERSHIP_FILE), &det.groups())?;

    let summary = SummaryDoc {
        method: cfg.method.to_string(),
        lcn_mean_edge_weight: stats.lcn_mean_edge_weight,
        hccs: det
            .hccs
            .iter()
            .enumerate()
            .map(|(i, h)| HccSummary {
                hcc_id: i,
                size: h.size(),
                mew: h.mew,
                edge_count: h.internal_edges.len(),
                criterion_breakdown: h.criterion_breakdown(&det.lcn),
            })
            .collect(),
    };
    let path = cfg.out.join(SUMMARY_FILE);
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &summary)?;
    writeln!(w).map_err(|e| Error::io(&path, e))?;
    finish(w, &path)?;
    Ok(det)
}

/// Edge list with a header row, plus GraphML when a path is given.
pub fn write_lcn(g: &MergedLcn, edges: &Path, graphml: Option<&Path>) -> Result<()> {
    let mut w = create(edges)?;
    writeln!(w, "u\tv\tweight\tbreakdown").map_err(|e| Error::io(edges, e))?;
    g.write_edge_list(&mut w).map_err(|e| Error::io(edges, e))?;
    finish(w, edges)?;
    if let Some(path) = graphml {
        let mut w = create(path)?;
        g.write_graphml(&mut w).map_err(|e| Error::io(path, e))?;
        finish(w, path)?;
    }
    Ok(())
}

pub fn write_interactions(interactions: &[Interaction], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "kind\tactor\ttimestamp\tkey\tsource_post").map_err(|e| Error::io(path, e))?;
    for i in interactions {
        writeln!(w, "{}", i.to_tsv()).map_err(|e| Error::io(path, e))?;
    }
    finish(w, path)
}

/// `hcc_id,account_id` rows.
pub fn write_membership(path: &Path, groups: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["hcc_id", "account_id"])?;
    for (i, g) in groups.iter().enumerate() {
        for a in g {
            w.write_record([i.to_string().as_str(), a])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Groups from a membership CSV, ordered by numeric id.
pub fn read_membership(path: &Path) -> Result<Vec<Vec<String>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let mut groups: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    for row in r.records() {
        let row = row?;
        let (Some(id), Some(account)) = (row.get(0), row.get(1)) else {
            return Err(Error::Data(format!("{}: short row", path.display())));
        };
        let id: u64 = id
            .trim()
            .parse()
            .map_err(|_| Error::Data(format!("{}: bad group id `{id}`", path.display())))?;
        groups.entry(id).or_default().push(account.to_string());
    }
    Ok(groups.into_values().collect())
}

pub fn write_truth(path: &Path, truth: &BTreeMap<String, usize>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["account_id", "group_id"])?;
    for (a, g) in truth {
        w.write_record([a.as_str(), g.to_string().as_str()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_truth(path: &Path) -> Result<BTreeMap<String, usize>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let mut out = BTreeMap::new();
    for row in r.records() {
        let row = row?;
        let (Some(a), Some(g)) = (row.get(0), row.get(1)) else {
            return Err(Error::Data(format!("{}: short row", path.display())));
        };
        let g = g
            .trim()
            .parse()
            .map_err(|_| Error::Data(format!("{}: bad group id `{g}`", path.display())))?;
        out.insert(a.to_string(), g);
    }
    Ok(out)
}

pub fn score_files(truth: &Path, membership: &Path) -> Result<PairwiseScore> {
    Ok(synth::score_detection(&read_truth(truth)?, &read_membership(membership)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeConfig {
    pub detect_dir: PathBuf,
    pub out: PathBuf,
    /// Corpus to analyse; defaults to the detect run's input.
    pub input: Option<PathBuf>,
    pub random_baseline: bool,
    pub seed: u64,
    pub bucket: TimeBucket,
    pub ngrams: NgramOptions,
}

impl AnalyzeConfig {
    pub fn new(detect_dir: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        AnalyzeConfig {
            detect_dir: detect_dir.into(),
            out: out.into(),
            input: None,
            random_baseline: false,
            seed: 0,
            bucket: TimeBucket::Daily,
            ngrams: NgramOptions::default(),
        }
    }

    pub fn from_file(f: &ConfigFile) -> Result<Self> {
        let detect_dir = f
            .detect_dir
            .clone()
            .ok_or_else(|| Error::param("detect-dir", "the detect output directory is required"))?;
        let out = f.out.clone().ok_or_else(|| Error::param("out", "an output directory is required"))?;
        let mut cfg = AnalyzeConfig::new(detect_dir, out);
        cfg.input = f.input.clone();
        cfg.random_baseline = f.random_baseline.unwrap_or(false);
        cfg.seed = f.seed.unwrap_or(0);
        if let Some(b) = &f.bucket {
            cfg.bucket = b.parse()?;
        }
        cfg.ngrams.binary = f.binary_ngrams.unwrap_or(false);
        Ok(cfg)
    }
}

/// Reports produced for one set of groups (detected or random).
#[derive(Debug, Clone)]
pub struct GroupReports {
    pub groups: Vec<Vec<String>>,
    pub similarity: analysis::SimilarityMatrix,
    pub entropy: Vec<analysis::FeatureEntropyReport>,
    pub ratios: Vec<analysis::InternalRatios>,
    pub activity: analysis::ActivitySeries,
}

impl GroupReports {
    pub fn compute(groups: Vec<Vec<String>>, corpus: &CorpusIndex<'_>, cfg: &AnalyzeConfig) -> Self {
        GroupReports {
            similarity: analysis::similarity_matrix(&groups, corpus, &cfg.ngrams),
            entropy: groups
                .iter()
                .enumerate()
                .map(|(i, g)| analysis::feature_entropy(i, g, corpus))
                .collect(),
            ratios: groups.iter().map(|g| analysis::internal_ratios(g, corpus)).collect(),
            activity: analysis::temporal_activity(&groups, corpus, cfg.bucket),
            groups,
        }
    }

    /// Mean entropy per feature over the groups that used it.
    pub fn mean_entropy(&self) -> BTreeMap<Feature, (f64, usize)> {
        let mut acc: BTreeMap<Feature, (f64, usize)> = BTreeMap::new();
        for r in &self.entropy {
            for (f, e) in &r.features {
                let slot = acc.entry(*f).or_insert((0.0, 0));
                slot.0 += e.entropy;
                slot.1 += 1;
            }
        }
        acc.into_iter().map(|(f, (s, n))| (f, (s / n as f64, n))).collect()
    }

    fn write(&self, dir: &Path, prefix: &str) -> Result<()> {
        let path = dir.join(format!("{prefix}similarity.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        let mut header = vec!["account_id".to_string()];
        header.extend(self.similarity.rows.iter().map(|(_, a)| a.clone()));
        w.write_record(&header)?;
        for (i, (_, a)) in self.similarity.rows.iter().enumerate() {
            let mut row = vec![a.clone()];
            row.extend(self.similarity.values[i].iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join(format!("{prefix}similarity_index.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["hcc_id", "first_row", "end_row"])?;
        for (g, start, end) in self.similarity.group_bounds() {
            w.write_record([g.to_string(), start.to_string(), end.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join(format!("{prefix}entropy.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["hcc_id", "feature", "entropy", "distinct_values", "total_uses"])?;
        for r in &self.entropy {
            for (f, e) in &r.features {
                w.write_record([
                    r.group_id.to_string(),
                    f.to_string(),
                    e.entropy.to_string(),
                    e.distinct_values.to_string(),
                    e.total_uses.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join(format!("{prefix}entropy_summary.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["feature", "mean_entropy", "groups"])?;
        for (f, (m, n)) in self.mean_entropy() {
            w.write_record([f.to_string(), m.to_string(), n.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join(format!("{prefix}ratios.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["hcc_id", "size", "irr", "imr", "reposts", "internal_reposts", "mentions", "internal_mentions"])?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for (i, (g, r)) in self.groups.iter().zip(&self.ratios).enumerate() {
            w.write_record([
                i.to_string(),
                g.len().to_string(),
                opt(r.irr),
                opt(r.imr),
                r.reposts.to_string(),
                r.internal_reposts.to_string(),
                r.mentions.to_string(),
                r.internal_mentions.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join(format!("{prefix}timeseries.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["bucket_start", "hcc_id", "value"])?;
        let a = &self.activity;
        for (bi, start) in a.bucket_starts.iter().enumerate() {
            for (gi, series) in a.per_group.iter().enumerate() {
                w.write_record([start.to_string(), gi.to_string(), series[bi].to_string()])?;
            }
            if let Some(m) = a.mean.get(bi) {
                w.write_record([start.to_string(), "mean".to_string(), m.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io(&path, e))
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub detected: GroupReports,
    pub random: Option<GroupReports>,
    pub reasons: analysis::ReasonGraph,
}

/// Produce every validation report for a finished detect run.
pub fn run_analyze(cfg: &AnalyzeConfig) -> Result<Analysis> {
    let manifest = ConfigFile::load(&cfg.detect_dir.join(MANIFEST_FILE))?;
    let mut detect_cfg = DetectConfig::from_file(&manifest)?;
    if let Some(input) = &cfg.input {
        detect_cfg.input = input.clone();
    }
    let groups = read_membership(&cfg.detect_dir.join(MEMBERSHIP_FILE))?;
    let corpus = read_corpus(&detect_cfg.input)?;
    let posts = corpus.posts;
    let index = CorpusIndex::new(&posts);

    // links are recomputed so reason keys are available
    let interactions = interaction::extract_all(&posts);
    let filtered = linkage::filter_interactions(&interactions, &detect_cfg.criteria)?;
    let parts = window::partition(filtered, &detect_cfg.window);
    let links = linkage::find_coordination(&parts, &detect_cfg.criteria, &detect_cfg.linkage);

    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let detected = GroupReports::compute(groups.clone(), &index, cfg);
    detected.write(&cfg.out, "")?;

    let path = cfg.out.join("hashtag_cooccurrence.tsv");
    let mut w = create(&path)?;
    writeln!(w, "hcc_id\ttag_a\ttag_b\tweight").map_err(|e| Error::io(&path, e))?;
    for (i, g) in groups.iter().enumerate() {
        let tags = analysis::hashtag_cooccurrence(g, &index);
        for ((a, b), n) in &tags.edges {
            writeln!(w, "{i}\t{a}\t{b}\t{n}").map_err(|e| Error::io(&path, e))?;
        }
    }
    finish(w, &path)?;

    let reasons = analysis::expand_reasons(&groups, &links);
    let path = cfg.out.join("reasons.tsv");
    let mut w = create(&path)?;
    writeln!(w, "hcc_id\taccount_id\tcriterion\tkey\tweight").map_err(|e| Error::io(&path, e))?;
    reasons.write_edge_list(&mut w).map_err(|e| Error::io(&path, e))?;
    finish(w, &path)?;
    let path = cfg.out.join("reasons.graphml");
    let mut w = create(&path)?;
    reasons.write_graphml(&mut w).map_err(|e| Error::io(&path, e))?;
    finish(w, &path)?;

    let random = if cfg.random_baseline {
        let rgroups = analysis::random_baseline(&index.accounts(), &groups, cfg.seed)?;
        write_membership(&cfg.out.join("random_groups.csv"), &rgroups)?;
        let reports = GroupReports::compute(rgroups, &index, cfg);
        reports.write(&cfg.out, "random_")?;
        Some(reports)
    } else {
        None
    };

    Ok(Analysis {
        detected,
        random,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = ConfigFile {
            gamma: Some(60),
            theta: Some(0.5),
            ..ConfigFile::default()
        };
        let flags = ConfigFile {
            gamma: Some(15),
            input: Some("in.jsonl".into()),
            out: Some("out".into()),
            ..ConfigFile::default()
        };
        let cfg = DetectConfig::from_file(&flags.or(file)).unwrap();
        assert_eq!(cfg.window.gamma_minutes(), 15);
        assert_eq!(cfg.fsa_v.theta(), 0.5);
    }

    #[test]
    fn defaults() {
        let f = ConfigFile {
            input: Some("a".into()),
            out: Some("b".into()),
            ..ConfigFile::default()
        };
        let cfg = DetectConfig::from_file(&f).unwrap();
        assert_eq!(cfg.criteria, BTreeSet::from([Criterion::CoRetweet]));
        assert_eq!(cfg.window.gamma_minutes(), 15);
        assert_eq!(cfg.method, MethodName::FsaV);
        assert_eq!(cfg.fsa_v.theta(), 0.3);
        assert_eq!(cfg.threshold_fraction, 0.9);
        assert_eq!(cfg.linkage.max_group_size, Some(1000));
        assert_eq!(DetectConfig::from_file(&cfg.to_file()).unwrap(), cfg);
    }

    #[test]
    fn invalid_parameters_are_named() {
        let base = ConfigFile {
            input: Some("a".into()),
            out: Some("b".into()),
            ..ConfigFile::default()
        };
        let check = |f: ConfigFile, expected: &str| match DetectConfig::from_file(&f) {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, expected),
            other => panic!("expected {expected}, got {other:?}"),
        };
        check(ConfigFile { gamma: Some(0), ..base.clone() }, "gamma");
        check(ConfigFile { theta: Some(1.5), ..base.clone() }, "theta");
        check(ConfigFile { threshold_fraction: Some(0.0), ..base.clone() }, "threshold-fraction");
        check(ConfigFile { criteria: Some("co_nothing".into()), ..base.clone() }, "criteria");
        check(ConfigFile { method: Some("spectral".into()), ..base.clone() }, "method");
        check(ConfigFile { input: None, ..base }, "input");
    }

    #[test]
    fn stats_mirror_table_columns() {
        let mut posts = vec![Post::new("1", "a", 0), Post::new("2", "b", 86_400 * 2 - 1)];
        posts[1].reposted_post_id = Some("x".into());
        posts[1].reposted_account_id = Some("y".into());
        let s = corpus_stats(&posts);
        assert_eq!((s.posts, s.reposts, s.accounts, s.days), (2, 1, 2, 2));
        assert_eq!(s.repost_percent, 50.0);
        assert_eq!(s.posts_per_account_per_day, 0.5);
        assert_eq!(s.reposts_per_account_per_day, 0.25);
    }
}
