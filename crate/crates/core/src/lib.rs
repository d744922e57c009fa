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

//! Detection of covertly coordinating account groups in post corpora.
//!
//! The pipeline reduces posts to interaction primitives, buckets them into
//! tumbling time windows, links accounts that coincide on the same key
//! inside a window, accumulates those links into a latent connection
//! network (LCN), and extracts highly coordinating communities (HCCs).

pub mod analysis;
pub mod error;
pub mod graphml;
pub mod hcc;
pub mod interaction;
pub mod lcn;
pub mod linkage;
pub mod pipeline;
pub mod synth;
pub mod window;

pub use error::{Error, Result};
