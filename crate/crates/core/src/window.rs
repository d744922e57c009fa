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

//! Tumbling, epoch-aligned time windows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::Interaction;

pub const DEFAULT_GAMMA_MINUTES: u64 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    gamma_minutes: u64,
}

impl WindowConfig {
    pub fn new(gamma_minutes: u64) -> Result<Self> {
        if gamma_minutes == 0 {
            return Err(Error::param("gamma", "window size must be a positive number of minutes"));
        }
        Ok(WindowConfig { gamma_minutes })
    }

    pub fn gamma_minutes(&self) -> u64 {
        self.gamma_minutes
    }

    pub fn width_seconds(&self) -> u64 {
        self.gamma_minutes * 60
    }
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            gamma_minutes: DEFAULT_GAMMA_MINUTES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WindowId(pub u64);

impl WindowId {
    pub fn index(self) -> u64 {
        self.0
    }

    /// First second covered by this window.
    pub fn start(self, cfg: &WindowConfig) -> u64 {
        self.0 * cfg.width_seconds()
    }
}

pub fn window_of(t: u64, cfg: &WindowConfig) -> WindowId {
    WindowId(t / cfg.width_seconds())
}

/// Bucket interactions by window. Input order does not matter; each bucket
/// is sorted by (timestamp, source_post, kind, key).
pub fn partition(
    interactions: impl IntoIterator<Item = Interaction>,
    cfg: &WindowConfig,
) -> BTreeMap<WindowId, Vec<Interaction>> {
    let mut buckets: BTreeMap<WindowId, Vec<Interaction>> = BTreeMap::new();
    for i in interactions {
        buckets.entry(window_of(i.timestamp, cfg)).or_default().push(i);
    }
    for bucket in buckets.values_mut() {
        bucket.sort_by(|a, b| {
            (a.timestamp, &a.source_post, a.kind, &a.key)
                .cmp(&(b.timestamp, &b.source_post, b.kind, &b.key))
        });
    }
    buckets
}
