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

//! Coincidence criteria and pairwise link inference inside windows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::{Interaction, InteractionKind};
use crate::window::WindowId;

pub const DEFAULT_MAX_GROUP_SIZE: usize = 1000;

/// A coincidence rule. Each criterion pairs accounts that produced the same
/// key through one interaction kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    CoRetweet,
    CoRetweetedAccount,
    CoHashtag,
    CoUrl,
    CoMention,
    CoConv,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::CoRetweet,
        Criterion::CoRetweetedAccount,
        Criterion::CoHashtag,
        Criterion::CoUrl,
        Criterion::CoMention,
        Criterion::CoConv,
    ];

    pub fn kind(self) -> InteractionKind {
        match self {
            Criterion::CoRetweet => InteractionKind::Repost,
            Criterion::CoRetweetedAccount => InteractionKind::RepostAccount,
            Criterion::CoHashtag => InteractionKind::Tag,
            Criterion::CoUrl => InteractionKind::Url,
            Criterion::CoMention => InteractionKind::Mention,
            Criterion::CoConv => InteractionKind::Reply,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::CoRetweet => "co_retweet",
            Criterion::CoRetweetedAccount => "co_retweeted_account",
            Criterion::CoHashtag => "co_hashtag",
            Criterion::CoUrl => "co_url",
            Criterion::CoMention => "co_mention",
            Criterion::CoConv => "co_conv",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param("criteria", format!("unknown criterion `{s}`")))
    }
}

/// Parse a comma-separated criteria list. An empty list is an error.
pub fn parse_criteria(list: &str) -> Result<BTreeSet<Criterion>> {
    let set = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Criterion::from_str)
        .collect::<Result<BTreeSet<_>>>()?;
    if set.is_empty() {
        return Err(Error::param("criteria", "at least one criterion is required"));
    }
    Ok(set)
}

pub fn criteria_to_string(set: &BTreeSet<Criterion>) -> String {
    set.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",")
}

/// One unit of evidence: `u` and `v` both used `key` under `criterion`
/// inside `window`. Always `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InferredLink {
    pub window: WindowId,
    pub criterion: Criterion,
    pub u: String,
    pub v: String,
    pub key: String,
    pub weight: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkageOptions {
    /// Key groups with more distinct actors than this are skipped.
    /// `None` disables the cap.
    pub max_group_size: Option<usize>,
}

impl Default for LinkageOptions {
    fn default() -> Self {
        LinkageOptions {
            max_group_size: Some(DEFAULT_MAX_GROUP_SIZE),
        }
    }
}

/// Keep the interactions some criterion in `criteria` consumes.
pub fn filter_interactions(
    all: &[Interaction],
    criteria: &BTreeSet<Criterion>,
) -> Result<Vec<Interaction>> {
    if criteria.is_empty() {
        return Err(Error::param("criteria", "at least one criterion is required"));
    }
    let kinds: BTreeSet<InteractionKind> = criteria.iter().map(|c| c.kind()).collect();
    Ok(all.iter().filter(|i| kinds.contains(&i.kind)).cloned().collect())
}

/// Pair up the distinct actors of every key group in one window bucket.
///
/// Interactions of other kinds are ignored. The result is sorted by
/// (u, v, key).
pub fn infer_links(
    bucket: &[Interaction],
    criterion: Criterion,
    window: WindowId,
    opts: &LinkageOptions,
) -> Vec<InferredLink> {
    let kind = criterion.kind();
    let mut groups: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for i in bucket.iter().filter(|i| i.kind == kind && !i.key.is_empty()) {
        groups.entry(&i.key).or_default().insert(&i.actor);
    }

    let mut links = Vec::new();
    for (key, actors) in groups {
        if let Some(cap) = opts.max_group_size {
            if actors.len() > cap {
                log::warn!(
                    "window {}: skipping {criterion} group `{key}` with {} actors (cap {cap})",
                    window.0,
                    actors.len()
                );
                continue;
            }
        }
        let actors: Vec<&str> = actors.into_iter().collect();
        for (i, u) in actors.iter().enumerate() {
            for v in &actors[i + 1..] {
                links.push(InferredLink {
                    window,
                    criterion,
                    u: u.to_string(),
                    v: v.to_string(),
                    key: key.to_string(),
                    weight: 1,
                });
            }
        }
    }
    links.sort_by(|a, b| (&a.u, &a.v, &a.key).cmp(&(&b.u, &b.v, &b.key)));
    links
}

/// Run [`infer_links`] for every (window, criterion) pair. The output is
/// ordered by (window, criterion, u, v, key) regardless of thread count.
pub fn find_coordination(
    partition: &BTreeMap<WindowId, Vec<Interaction>>,
    criteria: &BTreeSet<Criterion>,
    opts: &LinkageOptions,
) -> Vec<InferredLink> {
    let tasks: Vec<(WindowId, &[Interaction], Criterion)> = partition
        .iter()
        .flat_map(|(w, bucket)| criteria.iter().map(move |c| (*w, bucket.as_slice(), *c)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(w, bucket, c)| infer_links(bucket, c, w, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
