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

//! Labelled synthetic corpora: Zipf-distributed organic background traffic
//! plus implanted groups running Boost, Pollute or Bully campaigns.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::Post;

/// 2018-03-01 00:00:00 UTC.
pub const DEFAULT_START: u64 = 1_519_862_400;
pub const VOCABULARY_SIZE: usize = 500;
pub const ZIPF_EXPONENT: f64 = 1.2;
/// Share of background posts that are reposts.
pub const REPOST_SHARE: f64 = 0.545;
const PUBLISHERS: u64 = 200;
const DOMAINS: u64 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Every member reposts the same fresh post.
    Boost,
    /// Every member reposts a (different) fresh post of the same account.
    BoostAccount,
    /// Every member posts with the same fresh hashtag.
    Pollute,
    /// Every member mentions the target; half also reply under its post.
    Bully,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boost" => Ok(Strategy::Boost),
            "boost_account" => Ok(Strategy::BoostAccount),
            "pollute" => Ok(Strategy::Pollute),
            "bully" => Ok(Strategy::Bully),
            other => Err(Error::param("strategy", format!("unknown strategy `{other}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Boost => "boost",
            Strategy::BoostAccount => "boost_account",
            Strategy::Pollute => "pollute",
            Strategy::Bully => "bully",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplantSpec {
    pub strategy: Strategy,
    pub group_size: usize,
    pub events: usize,
    /// All member actions of one episode fall within this many seconds.
    #[serde(default = "default_within")]
    pub within_window_seconds: u64,
    /// Amplified account (Boost) or victim (Bully). Generated if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

fn default_within() -> u64 {
    600
}
fn default_start() -> u64 {
    DEFAULT_START
}
fn default_gamma() -> u64 {
    crate::window::DEFAULT_GAMMA_MINUTES
}
fn default_repost_share() -> f64 {
    REPOST_SHARE
}
fn default_vocabulary() -> usize {
    VOCABULARY_SIZE
}
fn default_zipf() -> f64 {
    ZIPF_EXPONENT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub duration_days: u64,
    pub background_accounts: usize,
    /// Mean posts per background account per day.
    pub background_rate: f64,
    #[serde(default = "default_start")]
    pub start_timestamp: u64,
    /// Window size episodes are placed against.
    #[serde(default = "default_gamma")]
    pub gamma_minutes: u64,
    /// Place episodes across a window boundary instead of inside one.
    #[serde(default)]
    pub straddle: bool,
    #[serde(default = "default_repost_share")]
    pub repost_share: f64,
    #[serde(default = "default_vocabulary")]
    pub vocabulary_size: usize,
    #[serde(default = "default_zipf")]
    pub zipf_exponent: f64,
    /// Organic posts per implanted account per day, on top of campaigns.
    #[serde(default)]
    pub implant_organic_rate: f64,
    #[serde(default, rename = "implant")]
    pub implants: Vec<ImplantSpec>,
}

impl ScenarioConfig {
    pub fn new(seed: u64, duration_days: u64, background_accounts: usize, background_rate: f64) -> Self {
        ScenarioConfig {
            seed,
            duration_days,
            background_accounts,
            background_rate,
            start_timestamp: DEFAULT_START,
            gamma_minutes: default_gamma(),
            straddle: false,
            repost_share: REPOST_SHARE,
            vocabulary_size: VOCABULARY_SIZE,
            zipf_exponent: ZIPF_EXPONENT,
            implant_organic_rate: 0.0,
            implants: Vec::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialization is infallible")
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration_days == 0 {
            return Err(Error::param("duration_days", "must be positive"));
        }
        if self.background_accounts == 0 {
            return Err(Error::param("background_accounts", "must be positive"));
        }
        if !(self.background_rate.is_finite() && self.background_rate > 0.0) {
            return Err(Error::param("background_rate", "must be positive"));
        }
        if self.gamma_minutes == 0 {
            return Err(Error::param("gamma_minutes", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.repost_share) {
            return Err(Error::param("repost_share", "must lie in [0, 1]"));
        }
        if self.vocabulary_size == 0 {
            return Err(Error::param("vocabulary_size", "must be positive"));
        }
        if !(self.zipf_exponent.is_finite() && self.zipf_exponent > 0.0) {
            return Err(Error::param("zipf_exponent", "must be positive"));
        }
        if !(self.implant_organic_rate.is_finite() && self.implant_organic_rate >= 0.0) {
            return Err(Error::param("implant_organic_rate", "must be non-negative"));
        }
        let width = self.gamma_minutes * 60;
        if self.duration_days * 86_400 < 2 * width {
            return Err(Error::param("duration_days", "must span at least two windows"));
        }
        for (i, imp) in self.implants.iter().enumerate() {
            if imp.group_size < 2 {
                return Err(Error::param("group_size", format!("implant {i}: must be at least 2")));
            }
            if imp.events == 0 {
                return Err(Error::param("events", format!("implant {i}: must be positive")));
            }
            if imp.within_window_seconds >= width {
                return Err(Error::param(
                    "within_window_seconds",
                    format!("implant {i}: {} must be below the window width {width}", imp.within_window_seconds),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Sorted by (timestamp, post_id).
    pub posts: Vec<Post>,
    /// Implanted account -> group index.
    pub truth: BTreeMap<String, usize>,
}

impl Scenario {
    /// Truth groups as sorted member lists, in group order.
    pub fn truth_groups(&self) -> Vec<Vec<String>> {
        truth_groups(&self.truth)
    }

    pub fn corpus_text(&self) -> String {
        let mut s = String::new();
        for p in &self.posts {
            s.push_str(&p.to_record());
            s.push('\n');
        }
        s
    }
}

pub fn truth_groups(truth: &BTreeMap<String, usize>) -> Vec<Vec<String>> {
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (a, g) in truth {
        groups.entry(*g).or_default().push(a.clone());
    }
    groups.into_values().collect()
}

struct Generator {
    rng: ChaCha8Rng,
    cfg: ScenarioConfig,
    zipf: Zipf<f64>,
    words: Vec<String>,
    source_text: HashMap<u64, String>,
    next_id: u64,
    posts: Vec<Post>,
}

impl Generator {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let zipf = Zipf::new(cfg.vocabulary_size as f64, cfg.zipf_exponent)
            .map_err(|e| Error::Config(format!("zipf: {e}")))?;
        let words = make_words(&mut rng, cfg.vocabulary_size);
        Ok(Generator {
            rng,
            cfg: cfg.clone(),
            zipf,
            words,
            source_text: HashMap::new(),
            next_id: 0,
            posts: Vec::new(),
        })
    }

    fn rank(&mut self) -> u64 {
        self.zipf.sample(&mut self.rng) as u64
    }

    fn fresh_id(&mut self, prefix: &str) -> String {
        self.next_id += 1;
        format!("{prefix}{:08}", self.next_id)
    }

    fn sentence(&mut self, min: usize, max: usize) -> String {
        let n = self.rng.random_range(min..=max);
        (0..n)
            .map(|_| {
                let r = self.rng.random_range(0..self.words.len());
                self.words[r].clone()
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn end(&self) -> u64 {
        self.cfg.start_timestamp + self.cfg.duration_days * 86_400
    }

    /// One organic post by `account` at a uniform time in the scenario.
    fn organic_post(&mut self, account: &str, background: &[String]) {
        let ts = self.rng.random_range(self.cfg.start_timestamp..self.end());
        let id = self.fresh_id("p");
        let mut post = Post::new(id, account, ts);
        if self.rng.random_bool(self.cfg.repost_share) {
            let src = self.rank();
            let author = format!("pub{:03}", src % PUBLISHERS);
            let text = match self.source_text.get(&src) {
                Some(t) => t.clone(),
                None => {
                    let t = self.sentence(6, 14);
                    self.source_text.insert(src, t.clone());
                    t
                }
            };
            post.text = format!("RT @{author}: {text}");
            post.reposted_post_id = Some(format!("src{src:04}"));
            post.reposted_account_id = Some(author);
        } else {
            post.text = self.sentence(6, 14);
            let tags = match self.rng.random_range(0..100) {
                0..=49 => 0,
                50..=84 => 1,
                _ => 2,
            };
            for _ in 0..tags {
                let t = format!("tag{:03}", self.rank());
                post.text.push_str(&format!(" #{t}"));
                post.hashtags.push(t);
            }
            if self.rng.random_bool(0.2) && !background.is_empty() {
                let r = (self.rank() as usize - 1) % background.len();
                let target = background[r].clone();
                if target != account {
                    post.text = format!("@{target} {}", post.text);
                    post.mentions.push(target);
                }
            }
            if self.rng.random_bool(0.15) {
                let r = self.rank();
                let url = format!("https://site{:02}.example/a/{r}", r % DOMAINS);
                post.text.push(' ');
                post.text.push_str(&url);
                post.urls.push(url);
            }
            if self.rng.random_bool(0.15) {
                let root = format!("conv{:04}", self.rank());
                post.replied_to_post_id = Some(root.clone());
                post.conversation_root_id = Some(root);
            }
        }
        self.posts.push(post);
    }

    /// Episode start such that `start + spread` stays inside one window, or
    /// straddles a boundary when configured.
    fn episode_start(&mut self, spread: u64) -> u64 {
        let width = self.cfg.gamma_minutes * 60;
        let first = self.cfg.start_timestamp.div_ceil(width);
        let last = self.end() / width - 1;
        let w = self.rng.random_range(first..last.max(first + 1));
        if self.cfg.straddle {
            (w + 1) * width - spread / 2 - 1
        } else {
            w * width + self.rng.random_range(0..width - spread)
        }
    }

    fn implant(&mut self, gi: usize, spec: &ImplantSpec, truth: &mut BTreeMap<String, usize>) {
        let members: Vec<String> = (0..spec.group_size).map(|i| format!("imp{gi}_{i:02}")).collect();
        for m in &members {
            truth.insert(m.clone(), gi);
        }
        let target = spec.target.clone().unwrap_or_else(|| match spec.strategy {
            Strategy::Bully => format!("imp{gi}_victim"),
            _ => format!("imp{gi}_amp"),
        });
        let spread = spec.within_window_seconds;

        for e in 0..spec.events {
            let start = self.episode_start(spread);
            let at = |rng: &mut ChaCha8Rng| start + if spread == 0 { 0 } else { rng.random_range(0..=spread) };
            match spec.strategy {
                Strategy::Boost | Strategy::BoostAccount => {
                    let n_src = if spec.strategy == Strategy::Boost { 1 } else { members.len() };
                    let sources: Vec<(String, String)> = (0..n_src)
                        .map(|k| (format!("imp{gi}_e{e:03}_src{k:02}"), self.sentence(8, 16)))
                        .collect();
                    for (sid, text) in &sources {
                        let mut original = Post::new(sid.clone(), target.clone(), start);
                        original.text = text.clone();
                        self.posts.push(original);
                    }
                    for (i, m) in members.iter().enumerate() {
                        let (sid, text) = &sources[i % sources.len()];
                        let mut p = Post::new(format!("imp{gi}_e{e:03}_m{i:02}"), m.clone(), at(&mut self.rng));
                        p.text = format!("RT @{target}: {text}");
                        p.reposted_post_id = Some(sid.clone());
                        p.reposted_account_id = Some(target.clone());
                        self.posts.push(p);
                    }
                }
                Strategy::Pollute => {
                    let tag = format!("imp{gi}tag{e:03}");
                    for (i, m) in members.iter().enumerate() {
                        let mut p = Post::new(format!("imp{gi}_e{e:03}_m{i:02}"), m.clone(), at(&mut self.rng));
                        p.text = format!("{} #{tag}", self.sentence(6, 12));
                        p.hashtags.push(tag.clone());
                        self.posts.push(p);
                    }
                }
                Strategy::Bully => {
                    let root = format!("imp{gi}_e{e:03}_root");
                    let mut original = Post::new(root.clone(), target.clone(), start);
                    original.text = self.sentence(6, 12);
                    self.posts.push(original);
                    for (i, m) in members.iter().enumerate() {
                        let mut p = Post::new(format!("imp{gi}_e{e:03}_m{i:02}"), m.clone(), at(&mut self.rng));
                        p.text = format!("@{target} {}", self.sentence(4, 10));
                        p.mentions.push(target.clone());
                        if i % 2 == 0 {
                            p.replied_to_post_id = Some(root.clone());
                            p.conversation_root_id = Some(root.clone());
                        }
                        self.posts.push(p);
                    }
                }
            }
        }

        if self.cfg.implant_organic_rate > 0.0 {
            let mean = self.cfg.implant_organic_rate * self.cfg.duration_days as f64;
            let poisson = Poisson::new(mean).expect("positive mean");
            for m in &members {
                let n = poisson.sample(&mut self.rng) as u64;
                for _ in 0..n {
                    self.organic_post(m, &[]);
                }
            }
        }
    }
}

fn make_words(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    const SYLLABLES: [&str; 24] = [
        "ka", "lo", "mi", "ne", "ru", "sa", "te", "vo", "zi", "pa", "do", "gu", "ba", "ri", "fe",
        "ho", "ju", "ly", "mo", "no", "qu", "si", "ta", "we",
    ];
    let mut seen = HashSet::new();
    let mut words = Vec::with_capacity(n);
    while words.len() < n {
        let len = rng.random_range(2..=4);
        let w: String = (0..len).map(|_| SYLLABLES[rng.random_range(0..SYLLABLES.len())]).collect();
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

/// Generate a corpus and its ground truth. Deterministic in `cfg.seed`.
pub fn generate(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut gen = Generator::new(cfg)?;
    let background: Vec<String> = (0..cfg.background_accounts).map(|i| format!("bg{i:05}")).collect();
    let poisson = Poisson::new(cfg.background_rate * cfg.duration_days as f64)
        .map_err(|e| Error::Config(format!("poisson: {e}")))?;
    for account in &background {
        let n = poisson.sample(&mut gen.rng) as u64;
        for _ in 0..n {
            gen.organic_post(account, &background);
        }
    }
    let mut truth = BTreeMap::new();
    for (gi, spec) in cfg.implants.iter().enumerate() {
        gen.implant(gi, spec, &mut truth);
    }
    let mut posts = gen.posts;
    posts.sort_by(|a, b| (a.timestamp, &a.post_id).cmp(&(b.timestamp, &b.post_id)));
    Ok(Scenario { posts, truth })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseScore {
    /// `None` when nothing was predicted.
    pub precision: Option<f64>,
    /// `None` when the truth has no positive pairs.
    pub recall: Option<f64>,
    /// `2TP / (predicted + actual)`; `None` only when both are zero.
    pub f1: Option<f64>,
    pub true_positives: u64,
    pub predicted_positives: u64,
    pub actual_positives: u64,
}

/// Pairwise precision/recall over account pairs: a pair is positive when
/// both accounts share a truth group, predicted when they share an HCC.
pub fn score_detection(truth: &BTreeMap<String, usize>, hccs: &[Vec<String>]) -> PairwiseScore {
    let mut sizes: HashMap<usize, u64> = HashMap::new();
    for g in truth.values() {
        *sizes.entry(*g).or_insert(0) += 1;
    }
    let actual: u64 = sizes.values().map(|n| n * n.saturating_sub(1) / 2).sum();

    let mut predicted: HashSet<(&str, &str)> = HashSet::new();
    for h in hccs {
        let mut members: Vec<&str> = h.iter().map(String::as_str).collect();
        members.sort_unstable();
        members.dedup();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                predicted.insert((a, b));
            }
        }
    }
    let tp = predicted
        .iter()
        .filter(|(a, b)| matches!((truth.get(*a), truth.get(*b)), (Some(x), Some(y)) if x == y))
        .count() as u64;
    let pp = predicted.len() as u64;
    let ratio = |n: u64, d: u64| (d > 0).then(|| n as f64 / d as f64);
    PairwiseScore {
        precision: ratio(tp, pp),
        recall: ratio(tp, actual),
        f1: ratio(2 * tp, pp + actual),
        true_positives: tp,
        predicted_positives: pp,
        actual_positives: actual,
    }
}
