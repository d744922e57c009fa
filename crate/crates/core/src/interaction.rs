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

//! Post records and the interaction primitives derived from them.
//!
//! Input is newline-delimited JSON, one post per line. Each post is reduced
//! to a fixed, ordered list of [`Interaction`]s; everything else in the
//! record (text aside) is discarded by the later pipeline stages.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use url::{Position, Url};

use crate::error::{Error, Result};

/// A single post as read from the input corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub post_id: String,
    pub account_id: String,
    pub timestamp: u64,
    #[serde(default)]
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reposted_post_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reposted_account_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replied_to_post_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conversation_root_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub liked_post_id: Option<String>,
    #[serde(default)]
    pub mentions: Vec<String>,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub urls: Vec<String>,
}

impl Post {
    /// A plain post with no entities.
    pub fn new(post_id: impl Into<String>, account_id: impl Into<String>, timestamp: u64) -> Self {
        Post {
            post_id: post_id.into(),
            account_id: account_id.into(),
            timestamp,
            text: String::new(),
            reposted_post_id: None,
            reposted_account_id: None,
            replied_to_post_id: None,
            conversation_root_id: None,
            liked_post_id: None,
            mentions: Vec::new(),
            hashtags: Vec::new(),
            urls: Vec::new(),
        }
    }

    pub fn is_repost(&self) -> bool {
        self.reposted_post_id.is_some()
    }

    /// Serialize as one line of the input record format.
    pub fn to_record(&self) -> String {
        serde_json::to_string(self).expect("post serialization is infallible")
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.post_id.is_empty() {
            return Err("empty post_id".into());
        }
        if self.account_id.is_empty() {
            return Err("empty account_id".into());
        }
        if self.reposted_post_id.is_some() != self.reposted_account_id.is_some() {
            return Err("reposted_post_id and reposted_account_id must appear together".into());
        }
        for (name, field) in [
            ("reposted_post_id", &self.reposted_post_id),
            ("reposted_account_id", &self.reposted_account_id),
            ("conversation_root_id", &self.conversation_root_id),
        ] {
            if matches!(field, Some(s) if s.is_empty()) {
                return Err(format!("empty {name}"));
            }
        }
        Ok(())
    }
}

// Wire form: optional lists may be null as well as absent.
#[derive(Deserialize)]
struct PostRecord {
    post_id: String,
    account_id: String,
    timestamp: u64,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    reposted_post_id: Option<String>,
    #[serde(default)]
    reposted_account_id: Option<String>,
    #[serde(default)]
    replied_to_post_id: Option<String>,
    #[serde(default)]
    conversation_root_id: Option<String>,
    #[serde(default)]
    liked_post_id: Option<String>,
    #[serde(default)]
    mentions: Option<Vec<String>>,
    #[serde(default)]
    hashtags: Option<Vec<String>>,
    #[serde(default)]
    urls: Option<Vec<String>>,
}

impl From<PostRecord> for Post {
    fn from(r: PostRecord) -> Self {
        Post {
            post_id: r.post_id,
            account_id: r.account_id,
            timestamp: r.timestamp,
            text: r.text.unwrap_or_default(),
            reposted_post_id: r.reposted_post_id,
            reposted_account_id: r.reposted_account_id,
            replied_to_post_id: r.replied_to_post_id,
            conversation_root_id: r.conversation_root_id,
            liked_post_id: r.liked_post_id,
            mentions: r.mentions.unwrap_or_default(),
            hashtags: r
                .hashtags
                .unwrap_or_default()
                .iter()
                .map(|t| normalize_hashtag(t))
                .collect(),
            urls: r.urls.unwrap_or_default(),
        }
    }
}

/// Lowercase and strip a leading `#`.
pub fn normalize_hashtag(tag: &str) -> String {
    tag.trim_start_matches('#').to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedLine {
    /// 1-based line number in the input stream.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub posts: Vec<Post>,
    pub malformed: Vec<MalformedLine>,
}

/// Parse newline-delimited post records. Blank lines are ignored; malformed
/// lines (bad JSON, missing required fields, broken invariants, duplicate
/// post ids) are skipped and reported.
pub fn parse_posts<R: BufRead>(reader: R) -> Result<ParsedCorpus> {
    let mut corpus = ParsedCorpus::default();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(Error::Stream)?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let outcome = serde_json::from_str::<PostRecord>(&line)
            .map_err(|e| e.to_string())
            .map(Post::from)
            .and_then(|p| p.validate().map(|_| p));
        match outcome {
            Ok(post) => {
                if !seen.insert(post.post_id.clone()) {
                    log::warn!("line {lineno}: duplicate post_id `{}`", post.post_id);
                    corpus.malformed.push(MalformedLine {
                        line: lineno,
                        reason: format!("duplicate post_id `{}`", post.post_id),
                    });
                    continue;
                }
                corpus.posts.push(post);
            }
            Err(reason) => {
                log::warn!("line {lineno}: skipping malformed record: {reason}");
                corpus.malformed.push(MalformedLine {
                    line: lineno,
                    reason,
                });
            }
        }
    }
    Ok(corpus)
}

/// Kinds of interaction primitive. The declaration order is the order in
/// which [`extract_interactions`] emits them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InteractionKind {
    Post,
    Repost,
    /// Repost keyed by the reposted account rather than the reposted post.
    RepostAccount,
    Reply,
    Mention,
    Tag,
    Url,
    /// Parsed when present; no criterion consumes it.
    Like,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 8] = [
        InteractionKind::Post,
        InteractionKind::Repost,
        InteractionKind::RepostAccount,
        InteractionKind::Reply,
        InteractionKind::Mention,
        InteractionKind::Tag,
        InteractionKind::Url,
        InteractionKind::Like,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InteractionKind::Post => "POST",
            InteractionKind::Repost => "REPOST",
            InteractionKind::RepostAccount => "REPOST_ACCOUNT",
            InteractionKind::Reply => "REPLY",
            InteractionKind::Mention => "MENTION",
            InteractionKind::Tag => "TAG",
            InteractionKind::Url => "URL",
            InteractionKind::Like => "LIKE",
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InteractionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InteractionKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Data(format!("unknown interaction kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interaction {
    pub kind: InteractionKind,
    pub actor: String,
    pub timestamp: u64,
    /// Coincidence key; empty for [`InteractionKind::Post`].
    pub key: String,
    pub source_post: String,
}

impl Interaction {
    /// Tab-separated dump line: kind, actor, timestamp, key, source_post.
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.kind, self.actor, self.timestamp, self.key, self.source_post
        )
    }
}

/// Reduce a post to its interaction primitives.
///
/// Order: POST, REPOST, REPOST_ACCOUNT, REPLY, MENTION*, TAG*, URL*, LIKE,
/// with each entity list deduplicated and sorted by key.
pub fn extract_interactions(post: &Post) -> Vec<Interaction> {
    let make = |kind: InteractionKind, key: &str| Interaction {
        kind,
        actor: post.account_id.clone(),
        timestamp: post.timestamp,
        key: key.to_string(),
        source_post: post.post_id.clone(),
    };

    let mut out = vec![make(InteractionKind::Post, "")];
    if let (Some(pid), Some(aid)) = (&post.reposted_post_id, &post.reposted_account_id) {
        out.push(make(InteractionKind::Repost, pid));
        out.push(make(InteractionKind::RepostAccount, aid));
    }
    if let Some(root) = &post.conversation_root_id {
        out.push(make(InteractionKind::Reply, root));
    }

    let mentions: BTreeSet<&str> = post
        .mentions
        .iter()
        .map(String::as_str)
        .filter(|m| !m.is_empty())
        .collect();
    out.extend(mentions.into_iter().map(|m| make(InteractionKind::Mention, m)));

    let tags: BTreeSet<String> = post
        .hashtags
        .iter()
        .map(|t| normalize_hashtag(t))
        .filter(|t| !t.is_empty())
        .collect();
    out.extend(tags.iter().map(|t| make(InteractionKind::Tag, t)));

    let urls: BTreeSet<String> = post
        .urls
        .iter()
        .filter(|u| !u.trim().is_empty())
        .map(|u| normalize_url(u).url)
        .collect();
    out.extend(urls.iter().map(|u| make(InteractionKind::Url, u)));

    if let Some(liked) = post.liked_post_id.as_deref().filter(|l| !l.is_empty()) {
        out.push(make(InteractionKind::Like, liked));
    }
    out
}

/// Interactions for a whole corpus, sorted by (timestamp, source_post) with
/// each post's internal order kept.
pub fn extract_all(posts: &[Post]) -> Vec<Interaction> {
    let mut order: Vec<&Post> = posts.iter().collect();
    order.sort_by(|a, b| (a.timestamp, &a.post_id).cmp(&(b.timestamp, &b.post_id)));
    order.into_iter().flat_map(extract_interactions).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedUrl {
    pub url: String,
    /// False when the input could not be parsed and was returned verbatim.
    pub valid: bool,
}

/// Lowercase scheme and host, drop the fragment and trailing path slashes,
/// keep the query. Idempotent.
pub fn normalize_url(raw: &str) -> NormalizedUrl {
    let mut parsed = match Url::parse(raw.trim()) {
        Ok(u) => u,
        Err(_) => {
            return NormalizedUrl {
                url: raw.to_string(),
                valid: false,
            }
        }
    };
    parsed.set_fragment(None);
    let before_query = parsed[..Position::AfterPath].trim_end_matches('/');
    // Keep the scheme separator for things like `file:///`.
    let before_query = if before_query.ends_with(':') {
        &parsed[..Position::AfterPath]
    } else {
        before_query
    };
    let url = format!("{}{}", before_query, &parsed[Position::AfterPath..]);
    NormalizedUrl { url, valid: true }
}

/// Host of a normalized URL with a leading `www.` removed.
pub fn url_domain(url: &str) -> Option<String> {
    let parsed = Url::parse(url).ok()?;
    let host = parsed.host_str()?.to_ascii_lowercase();
    Some(host.strip_prefix("www.").unwrap_or(&host).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_keys(v: &[Interaction]) -> Vec<(InteractionKind, &str)> {
        v.iter().map(|i| (i.kind, i.key.as_str())).collect()
    }

    #[test]
    fn full_record_maps_every_field() {
        let line = r##"{"post_id":"p1","account_id":"a1","timestamp":1520000000,"text":"hi","reposted_post_id":"t9","reposted_account_id":"a9","replied_to_post_id":"r0","conversation_root_id":"r1","mentions":["b"],"hashtags":["#Vote"],"urls":["http://x.com"]}"##;
        let c = parse_posts(line.as_bytes()).unwrap();
        assert!(c.malformed.is_empty());
        let p = &c.posts[0];
        assert_eq!(p.post_id, "p1");
        assert_eq!(p.account_id, "a1");
        assert_eq!(p.timestamp, 1_520_000_000);
        assert_eq!(p.text, "hi");
        assert_eq!(p.reposted_post_id.as_deref(), Some("t9"));
        assert_eq!(p.reposted_account_id.as_deref(), Some("a9"));
        assert_eq!(p.replied_to_post_id.as_deref(), Some("r0"));
        assert_eq!(p.conversation_root_id.as_deref(), Some("r1"));
        assert_eq!(p.mentions, vec!["b"]);
        assert_eq!(p.hashtags, vec!["vote"]);
        assert_eq!(p.urls, vec!["http://x.com"]);
    }

    #[test]
    fn missing_timestamp_is_skipped() {
        let c = parse_posts(r#"{"post_id":"p1","account_id":"a"}"#.as_bytes()).unwrap();
        assert!(c.posts.is_empty());
        assert_eq!(c.malformed.len(), 1);
        assert_eq!(c.malformed[0].line, 1);
    }

    #[test]
    fn three_valid_one_malformed_keeps_order() {
        let input = [
            r#"{"post_id":"p3","account_id":"a","timestamp":30}"#,
            r#"{"post_id":"p1","account_id":"b","timestamp":10}"#,
            r#"not json"#,
            r#"{"post_id":"p2","account_id":"c","timestamp":20,"mentions":null}"#,
        ]
        .join("\n");
        let c = parse_posts(input.as_bytes()).unwrap();
        let ids: Vec<_> = c.posts.iter().map(|p| p.post_id.as_str()).collect();
        assert_eq!(ids, ["p3", "p1", "p2"]);
        assert_eq!(c.malformed.len(), 1);
        assert_eq!(c.malformed[0].line, 3);
    }

    #[test]
    fn invariant_violations_are_malformed() {
        let input = [
            r#"{"post_id":"","account_id":"a","timestamp":1}"#,
            r#"{"post_id":"x","account_id":"a","timestamp":-5}"#,
            r#"{"post_id":"y","account_id":"a","timestamp":1,"reposted_post_id":"t"}"#,
            r#"{"post_id":"z","account_id":"a","timestamp":1}"#,
            r#"{"post_id":"z","account_id":"b","timestamp":2}"#,
        ]
        .join("\n");
        let c = parse_posts(input.as_bytes()).unwrap();
        assert_eq!(c.posts.len(), 1);
        let lines: Vec<_> = c.malformed.iter().map(|m| m.line).collect();
        assert_eq!(lines, [1, 2, 3, 5]);
    }

    #[test]
    fn text_only_post_is_a_single_post_interaction() {
        let mut p = Post::new("p", "a", 5);
        p.text = "hello".into();
        let out = extract_interactions(&p);
        assert_eq!(kinds_keys(&out), [(InteractionKind::Post, "")]);
    }

    #[test]
    fn retweet_with_duplicate_tag() {
        let mut p = Post::new("p", "a", 5);
        p.reposted_post_id = Some("T9".into());
        p.reposted_account_id = Some("A9".into());
        p.hashtags = vec!["x".into(), "x".into()];
        let out = extract_interactions(&p);
        assert_eq!(
            kinds_keys(&out),
            [
                (InteractionKind::Post, ""),
                (InteractionKind::Repost, "T9"),
                (InteractionKind::RepostAccount, "A9"),
                (InteractionKind::Tag, "x"),
            ]
        );
    }

    #[test]
    fn reply_with_mentions() {
        let mut p = Post::new("p", "a", 5);
        p.replied_to_post_id = Some("R0".into());
        p.conversation_root_id = Some("R1".into());
        p.mentions = vec!["C".into(), "B".into(), "C".into()];
        let out = extract_interactions(&p);
        assert_eq!(
            kinds_keys(&out),
            [
                (InteractionKind::Post, ""),
                (InteractionKind::Reply, "R1"),
                (InteractionKind::Mention, "B"),
                (InteractionKind::Mention, "C"),
            ]
        );
    }

    #[test]
    fn hashtags_case_insensitive_mentions_case_sensitive() {
        let mut p = Post::new("p", "a", 5);
        p.hashtags = vec!["Vote".into(), "#VOTE".into()];
        p.mentions = vec!["Bob".into(), "bob".into()];
        let out = extract_interactions(&p);
        let tags = out.iter().filter(|i| i.kind == InteractionKind::Tag).count();
        let mentions = out.iter().filter(|i| i.kind == InteractionKind::Mention).count();
        assert_eq!(tags, 1);
        assert_eq!(mentions, 2);
    }

    #[test]
    fn url_dedup_after_normalization() {
        let mut p = Post::new("p", "a", 5);
        p.urls = vec!["http://X.com/a/".into(), "http://x.com/a#top".into()];
        let out = extract_interactions(&p);
        let urls: Vec<_> = out
            .iter()
            .filter(|i| i.kind == InteractionKind::Url)
            .map(|i| i.key.as_str())
            .collect();
        assert_eq!(urls, ["http://x.com/a"]);
    }

    #[test]
    fn url_normalization_rules() {
        assert_eq!(normalize_url("HTTP://Example.com/a/").url, "http://example.com/a");
        assert_eq!(normalize_url("http://x.com/p#frag").url, "http://x.com/p");
        assert_eq!(normalize_url("https://x.com/p/?q=A#f").url, "https://x.com/p?q=A");
        assert_eq!(normalize_url("http://x.com/").url, "http://x.com");
        let bad = normalize_url("not a url");
        assert!(!bad.valid);
        assert_eq!(bad.url, "not a url");
    }

    #[test]
    fn domain_strips_www() {
        assert_eq!(url_domain("https://www.Twitter.com/x").as_deref(), Some("twitter.com"));
        assert_eq!(url_domain("garbage"), None);
    }

    #[test]
    fn like_is_parsed_but_last() {
        let line = r#"{"post_id":"p","account_id":"a","timestamp":3,"liked_post_id":"q","hashtags":["z"]}"#;
        let c = parse_posts(line.as_bytes()).unwrap();
        let out = extract_interactions(&c.posts[0]);
        assert_eq!(out.last().unwrap().kind, InteractionKind::Like);
        assert_eq!(out.last().unwrap().key, "q");
    }
}
