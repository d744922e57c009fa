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

//! Shannon entropy of a group's pooled use of post features.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CorpusIndex;
use crate::interaction::{normalize_hashtag, normalize_url, url_domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Hashtags,
    Urls,
    Domains,
    MentionedAccounts,
    RetweetedAccounts,
}

impl Feature {
    pub const ALL: [Feature; 5] = [
        Feature::Hashtags,
        Feature::Urls,
        Feature::Domains,
        Feature::MentionedAccounts,
        Feature::RetweetedAccounts,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Feature::Hashtags => "hashtags",
            Feature::Urls => "urls",
            Feature::Domains => "domains",
            Feature::MentionedAccounts => "mentioned_accounts",
            Feature::RetweetedAccounts => "retweeted_accounts",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureEntropy {
    /// Bits.
    pub entropy: f64,
    pub distinct_values: usize,
    pub total_uses: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEntropyReport {
    pub group_id: usize,
    /// Features the group never used are absent.
    pub features: BTreeMap<Feature, FeatureEntropy>,
}

/// Base-2 entropy of a frequency distribution. Zero counts are ignored.
pub fn shannon_entropy(counts: impl IntoIterator<Item = u64>) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * (1.0 / p).log2()
        })
        .sum()
}

/// Entropy of each feature over all member posts pooled together.
///
/// Each post contributes one use per distinct hashtag, URL (and its domain)
/// and mentioned account, and one retweeted-account use if it is a repost.
pub fn feature_entropy(group_id: usize, members: &[String], corpus: &CorpusIndex<'_>) -> FeatureEntropyReport {
    let mut freq: BTreeMap<Feature, BTreeMap<String, u64>> = BTreeMap::new();
    let mut bump = |f: Feature, v: String| *freq.entry(f).or_default().entry(v).or_insert(0) += 1;

    for p in corpus.member_posts(members) {
        let tags: BTreeSet<String> = p.hashtags.iter().map(|t| normalize_hashtag(t)).filter(|t| !t.is_empty()).collect();
        for t in tags {
            bump(Feature::Hashtags, t);
        }
        let urls: BTreeSet<String> = p.urls.iter().filter(|u| !u.trim().is_empty()).map(|u| normalize_url(u).url).collect();
        for u in urls {
            if let Some(d) = url_domain(&u) {
                bump(Feature::Domains, d);
            }
            bump(Feature::Urls, u);
        }
        let mentions: BTreeSet<&String> = p.mentions.iter().filter(|m| !m.is_empty()).collect();
        for m in mentions {
            bump(Feature::MentionedAccounts, m.clone());
        }
        if let Some(a) = &p.reposted_account_id {
            bump(Feature::RetweetedAccounts, a.clone());
        }
    }

    let features = freq
        .into_iter()
        .map(|(f, values)| {
            let e = FeatureEntropy {
                entropy: shannon_entropy(values.values().copied()),
                distinct_values: values.len(),
                total_uses: values.values().sum(),
            };
            (f, e)
        })
        .collect();
    FeatureEntropyReport { group_id, features }
}
