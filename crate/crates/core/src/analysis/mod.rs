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

//! Validation analytics over extracted communities.
//!
//! Everything here works on plain member lists so the same reports can be
//! produced for detected HCCs and for random baseline groups.

mod activity;
mod entropy;
mod graphs;
mod similarity;

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interaction::Post;

pub use activity::{internal_ratios, temporal_activity, ActivitySeries, InternalRatios, TimeBucket};
pub use entropy::{feature_entropy, shannon_entropy, Feature, FeatureEntropy, FeatureEntropyReport};
pub use graphs::{expand_reasons, hashtag_cooccurrence, ReasonGraph, TagGraph};
pub use similarity::{
    account_document, cosine_similarity, similarity_matrix, AccountDocument, NgramOptions,
    SimilarityMatrix,
};

/// Posts grouped by account, each account's posts in (timestamp, post_id)
/// order.
pub struct CorpusIndex<'a> {
    posts: &'a [Post],
    by_account: HashMap<&'a str, Vec<&'a Post>>,
}

impl<'a> CorpusIndex<'a> {
    pub fn new(posts: &'a [Post]) -> Self {
        let mut by_account: HashMap<&str, Vec<&Post>> = HashMap::new();
        for p in posts {
            by_account.entry(p.account_id.as_str()).or_default().push(p);
        }
        for list in by_account.values_mut() {
            list.sort_by(|a, b| (a.timestamp, &a.post_id).cmp(&(b.timestamp, &b.post_id)));
        }
        CorpusIndex { posts, by_account }
    }

    pub fn posts(&self) -> &'a [Post] {
        self.posts
    }

    pub fn posts_of(&self, account: &str) -> &[&'a Post] {
        self.by_account.get(account).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every account that authored at least one post, sorted.
    pub fn accounts(&self) -> BTreeSet<String> {
        self.by_account.keys().map(|a| a.to_string()).collect()
    }

    /// Posts of all members, in member order.
    pub(crate) fn member_posts<'s>(&'s self, members: &'s [String]) -> impl Iterator<Item = &'a Post> + 's {
        members.iter().flat_map(|m| self.posts_of(m).iter().copied())
    }
}

/// Groups of accounts outside every given group, sampled without
/// replacement to match the given group sizes.
pub fn random_baseline(
    all_accounts: &BTreeSet<String>,
    groups: &[Vec<String>],
    seed: u64,
) -> Result<Vec<Vec<String>>> {
    let taken: HashSet<&str> = groups.iter().flatten().map(String::as_str).collect();
    let mut pool: Vec<&String> = all_accounts
        .iter()
        .filter(|a| !taken.contains(a.as_str()))
        .collect();
    let needed: usize = groups.iter().map(Vec::len).sum();
    if pool.len() < needed {
        return Err(Error::InsufficientPool {
            needed,
            available: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    let mut out = Vec::with_capacity(groups.len());
    let mut next = pool.into_iter();
    for g in groups {
        let mut members: Vec<String> = next.by_ref().take(g.len()).cloned().collect();
        members.sort();
        out.push(members);
    }
    Ok(out)
}
