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

//! Internal retweet/mention ratios and per-member activity time series.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::CorpusIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InternalRatios {
    /// Internal retweet ratio; `None` when members made no reposts.
    pub irr: Option<f64>,
    /// Internal mention ratio; `None` when members mentioned nobody.
    pub imr: Option<f64>,
    pub reposts: u64,
    pub internal_reposts: u64,
    pub mentions: u64,
    pub internal_mentions: u64,
}

/// Fraction of member reposts (and mentions) whose target is a member.
/// Mentions count once per distinct target per post.
pub fn internal_ratios(members: &[String], corpus: &CorpusIndex<'_>) -> InternalRatios {
    let set: HashSet<&str> = members.iter().map(String::as_str).collect();
    let mut r = InternalRatios {
        irr: None,
        imr: None,
        reposts: 0,
        internal_reposts: 0,
        mentions: 0,
        internal_mentions: 0,
    };
    for p in corpus.member_posts(members) {
        if let Some(target) = &p.reposted_account_id {
            r.reposts += 1;
            if set.contains(target.as_str()) {
                r.internal_reposts += 1;
            }
        }
        let targets: BTreeSet<&str> = p.mentions.iter().map(String::as_str).filter(|m| !m.is_empty()).collect();
        for t in targets {
            r.mentions += 1;
            if set.contains(t) {
                r.internal_mentions += 1;
            }
        }
    }
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    r.irr = ratio(r.internal_reposts, r.reposts);
    r.imr = ratio(r.internal_mentions, r.mentions);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeBucket {
    /// UTC calendar days.
    Daily,
    /// ISO weeks, Monday 00:00 UTC.
    Weekly,
}

impl TimeBucket {
    const DAY: i64 = 86_400;

    /// Start (epoch seconds) of the bucket containing `t`.
    pub fn start_of(self, t: u64) -> i64 {
        let t = t as i64;
        let day = t.div_euclid(Self::DAY);
        match self {
            TimeBucket::Daily => day * Self::DAY,
            // 1970-01-01 was a Thursday, three days after a Monday
            TimeBucket::Weekly => (day - (day + 3).rem_euclid(7)) * Self::DAY,
        }
    }

    pub fn width(self) -> i64 {
        match self {
            TimeBucket::Daily => Self::DAY,
            TimeBucket::Weekly => 7 * Self::DAY,
        }
    }
}

impl std::str::FromStr for TimeBucket {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "daily" | "day" => Ok(TimeBucket::Daily),
            "weekly" | "week" => Ok(TimeBucket::Weekly),
            other => Err(crate::error::Error::param("bucket", format!("unknown bucket `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivitySeries {
    pub bucket: TimeBucket,
    pub bucket_starts: Vec<i64>,
    /// Mean posts per member, per group, per bucket.
    pub per_group: Vec<Vec<f64>>,
    /// Mean of the per-group values; empty when there are no groups.
    pub mean: Vec<f64>,
}

/// Posts per member per bucket for each group, over every bucket spanned by
/// the whole corpus.
pub fn temporal_activity(groups: &[Vec<String>], corpus: &CorpusIndex<'_>, bucket: TimeBucket) -> ActivitySeries {
    let span = corpus
        .posts()
        .iter()
        .map(|p| p.timestamp)
        .fold(None, |acc: Option<(u64, u64)>, t| match acc {
            None => Some((t, t)),
            Some((lo, hi)) => Some((lo.min(t), hi.max(t))),
        });
    let bucket_starts: Vec<i64> = match span {
        None => Vec::new(),
        Some((lo, hi)) => {
            let (first, last) = (bucket.start_of(lo), bucket.start_of(hi));
            (0..=(last - first) / bucket.width())
                .map(|i| first + i * bucket.width())
                .collect()
        }
    };
    let first = bucket_starts.first().copied().unwrap_or(0);

    let per_group: Vec<Vec<f64>> = groups
        .iter()
        .map(|members| {
            let mut tally = vec![0u64; bucket_starts.len()];
            for p in corpus.member_posts(members) {
                let i = ((bucket.start_of(p.timestamp) - first) / bucket.width()) as usize;
                tally[i] += 1;
            }
            let n = members.len().max(1) as f64;
            tally.into_iter().map(|c| c as f64 / n).collect()
        })
        .collect();

    let mean = if per_group.is_empty() {
        Vec::new()
    } else {
        (0..bucket_starts.len())
            .map(|i| per_group.iter().map(|s| s[i]).sum::<f64>() / per_group.len() as f64)
            .collect()
    };
    ActivitySeries {
        bucket,
        bucket_starts,
        per_group,
        mean,
    }
}
