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

//! Minimal GraphML writer.

use std::io::Write;

type Attrs = Vec<(String, String)>;

pub struct GraphMl {
    directed: bool,
    node_keys: Vec<(String, &'static str)>,
    edge_keys: Vec<(String, &'static str)>,
    nodes: Vec<(String, Attrs)>,
    edges: Vec<(String, String, Attrs)>,
}

impl GraphMl {
    pub fn new(directed: bool) -> Self {
        GraphMl {
            directed,
            node_keys: Vec::new(),
            edge_keys: Vec::new(),
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Declare a node attribute; `ty` is a GraphML type (string, long, double...).
    pub fn node_key(&mut self, name: &str, ty: &'static str) {
        self.node_keys.push((name.to_string(), ty));
    }

    pub fn edge_key(&mut self, name: &str, ty: &'static str) {
        self.edge_keys.push((name.to_string(), ty));
    }

    pub fn node(&mut self, id: &str, attrs: Attrs) {
        self.nodes.push((id.to_string(), attrs));
    }

    pub fn edge(&mut self, source: &str, target: &str, attrs: Attrs) {
        self.edges.push((source.to_string(), target.to_string(), attrs));
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
        writeln!(out, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
        for (name, ty) in &self.node_keys {
            let n = escape(name);
            writeln!(out, r#"  <key id="n_{n}" for="node" attr.name="{n}" attr.type="{ty}"/>"#)?;
        }
        for (name, ty) in &self.edge_keys {
            let n = escape(name);
            writeln!(out, r#"  <key id="e_{n}" for="edge" attr.name="{n}" attr.type="{ty}"/>"#)?;
        }
        let kind = if self.directed { "directed" } else { "undirected" };
        writeln!(out, r#"  <graph id="G" edgedefault="{kind}">"#)?;
        for (id, attrs) in &self.nodes {
            if attrs.is_empty() {
                writeln!(out, r#"    <node id="{}"/>"#, escape(id))?;
                continue;
            }
            writeln!(out, r#"    <node id="{}">"#, escape(id))?;
            for (k, v) in attrs {
                writeln!(out, r#"      <data key="n_{}">{}</data>"#, escape(k), escape(v))?;
            }
            writeln!(out, "    </node>")?;
        }
        for (s, t, attrs) in &self.edges {
            writeln!(out, r#"    <edge source="{}" target="{}">"#, escape(s), escape(t))?;
            for (k, v) in attrs {
                writeln!(out, r#"      <data key="e_{}">{}</data>"#, escape(k), escape(v))?;
            }
            writeln!(out, "    </edge>")?;
        }
        writeln!(out, "  </graph>")?;
        writeln!(out, "</graphml>")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}
