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

//! Character n-gram documents and cosine similarity between accounts.

use std::collections::HashMap;

use super::CorpusIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NgramOptions {
    pub n: usize,
    /// Lowercase and collapse whitespace runs before extracting n-grams.
    pub normalize: bool,
    /// Use presence (0/1) instead of raw counts.
    pub binary: bool,
}

impl Default for NgramOptions {
    fn default() -> Self {
        NgramOptions {
            n: 5,
            normalize: true,
            binary: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccountDocument {
    pub account_id: String,
    pub ngram_counts: HashMap<String, u32>,
}

impl AccountDocument {
    pub fn from_text(account_id: &str, text: &str, opts: &NgramOptions) -> Self {
        let text = if opts.normalize {
            text.split_whitespace()
                .collect::<Vec<_>>()
                .join(" ")
                .to_lowercase()
        } else {
            text.to_string()
        };
        let chars: Vec<char> = text.chars().collect();
        let mut ngram_counts: HashMap<String, u32> = HashMap::new();
        if opts.n > 0 && chars.len() >= opts.n {
            for w in chars.windows(opts.n) {
                let c = ngram_counts.entry(w.iter().collect()).or_insert(0);
                *c = if opts.binary { 1 } else { *c + 1 };
            }
        }
        AccountDocument {
            account_id: account_id.to_string(),
            ngram_counts,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ngram_counts.is_empty()
    }

    fn norm(&self) -> f64 {
        self.ngram_counts
            .values()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt()
    }
}

/// All of an account's post texts, space-joined in time order, as one
/// document.
pub fn account_document(account: &str, corpus: &CorpusIndex<'_>, opts: &NgramOptions) -> AccountDocument {
    let text = corpus
        .posts_of(account)
        .iter()
        .map(|p| p.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    AccountDocument::from_text(account, &text, opts)
}

/// Cosine similarity of two n-gram count vectors; 0 if either is empty.
pub fn cosine_similarity(a: &AccountDocument, b: &AccountDocument) -> f64 {
    let (small, large) = if a.ngram_counts.len() <= b.ngram_counts.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .ngram_counts
        .iter()
        .filter_map(|(k, &x)| large.ngram_counts.get(k).map(|&y| x as f64 * y as f64))
        .sum();
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        0.0
    } else {
        (dot / denom).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    /// `(group index, account id)` per row/column.
    pub rows: Vec<(usize, String)>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    /// Half-open row ranges per group, in group order.
    pub fn group_bounds(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<(usize, usize, usize)> = Vec::new();
        for (i, (g, _)) in self.rows.iter().enumerate() {
            match out.last_mut() {
                Some((last, _, end)) if last == g => *end = i + 1,
                _ => out.push((*g, i, i + 1)),
            }
        }
        out
    }

    /// Mean off-diagonal similarity within groups and across groups.
    /// `None` where no such pairs exist.
    pub fn block_means(&self) -> (Option<f64>, Option<f64>) {
        let (mut intra, mut ni, mut inter, mut nx) = (0.0, 0usize, 0.0, 0usize);
        for i in 0..self.rows.len() {
            for j in i + 1..self.rows.len() {
                if self.rows[i].0 == self.rows[j].0 {
                    intra += self.values[i][j];
                    ni += 1;
                } else {
                    inter += self.values[i][j];
                    nx += 1;
                }
            }
        }
        let mean = |s: f64, n: usize| (n > 0).then(|| s / n as f64);
        (mean(intra, ni), mean(inter, nx))
    }
}

/// Pairwise cosine similarity of member documents, rows ordered by
/// (group, account id).
pub fn similarity_matrix(
    groups: &[Vec<String>],
    corpus: &CorpusIndex<'_>,
    opts: &NgramOptions,
) -> SimilarityMatrix {
    let mut rows: Vec<(usize, String)> = Vec::new();
    for (gi, members) in groups.iter().enumerate() {
        let mut sorted = members.clone();
        sorted.sort();
        sorted.dedup();
        rows.extend(sorted.into_iter().map(|m| (gi, m)));
    }
    let docs: Vec<AccountDocument> = rows
        .iter()
        .map(|(_, a)| account_document(a, corpus, opts))
        .collect();
    let n = docs.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = if docs[i].is_empty() { 0.0 } else { 1.0 };
        for j in i + 1..n {
            let s = cosine_similarity(&docs[i], &docs[j]);
            values[i][j] = s;
            values[j][i] = s;
        }
    }
    SimilarityMatrix { rows, values }
}
