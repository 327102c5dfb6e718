// Copyright 2026 The Basketry Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Item co-occurrence graph with weak/medium/strong edges and DOT export.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::ItemCatalog;
use crate::fmt::{percent_half_up, ratio_half_up};
use crate::mining::{BitmapIndex, ItemId};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("min_pair_count must be at least 1")]
    InvalidMinPairCount,
    #[error("thresholds must satisfy t_weak < t_strong (got {0} and {1})")]
    InvalidThresholds(f64, f64),
    #[error("unknown weight metric `{0}` (want count, support or lift)")]
    UnknownMetric(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMetric {
    Count,
    Support,
    #[default]
    Lift,
}

impl FromStr for WeightMetric {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "count" => Ok(WeightMetric::Count),
            "support" => Ok(WeightMetric::Support),
            "lift" => Ok(WeightMetric::Lift),
            other => Err(GraphError::UnknownMetric(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Strength {
    Weak,
    Medium,
    Strong,
}

impl Strength {
    pub fn as_str(self) -> &'static str {
        match self {
            Strength::Weak => "weak",
            Strength::Medium => "medium",
            Strength::Strong => "strong",
        }
    }

    fn dot_style(self) -> (u32, &'static str) {
        match self {
            Strength::Weak => (1, "dotted"),
            Strength::Medium => (2, "solid"),
            Strength::Strong => (4, "bold"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub item: String,
    pub label: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints as node indices, `a < b`.
    pub a: usize,
    pub b: usize,
    pub count: u64,
    pub support_pct: f64,
    pub lift: f64,
    pub weight: f64,
    /// Set by [`classify_edges`].
    pub strength: Option<Strength>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoocGraph {
    pub n_baskets: u64,
    pub metric: WeightMetric,
    /// Items incident to at least one edge, in item order.
    pub nodes: Vec<Node>,
    /// Sorted by endpoint pair.
    pub edges: Vec<Edge>,
}

impl CoocGraph {
    /// Replaces node labels with catalog display names.
    pub fn label_with(&mut self, catalog: &ItemCatalog) {
        for node in &mut self.nodes {
            node.label = catalog.name(&node.item).to_string();
        }
    }

    pub fn edge(&self, a: &str, b: &str) -> Option<&Edge> {
        let pos = |item: &str| self.nodes.iter().position(|n| n.item == item);
        let (x, y) = (pos(a)?, pos(b)?);
        let (x, y) = (x.min(y), x.max(y));
        self.edges.iter().find(|e| e.a == x && e.b == y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiwebOptions {
    pub min_pair_count: u64,
    pub weight_metric: WeightMetric,
    pub include_virtual: bool,
}

impl Default for MultiwebOptions {
    fn default() -> Self {
        MultiwebOptions {
            min_pair_count: 1,
            weight_metric: WeightMetric::Lift,
            include_virtual: false,
        }
    }
}

/// One edge per unordered item pair seen together at least
/// `min_pair_count` times.
pub fn build_multiweb(
    index: &BitmapIndex,
    opts: &MultiwebOptions,
) -> Result<CoocGraph, GraphError> {
    if opts.min_pair_count < 1 {
        return Err(GraphError::InvalidMinPairCount);
    }
    let n = index.n_baskets() as u64;
    let items: Vec<ItemId> = (0..index.n_items() as ItemId)
        .filter(|&id| opts.include_virtual || !index.is_virtual(id))
        .collect();

    let pairs: Vec<(ItemId, ItemId, u64)> = (0..items.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = items[i];
            items[i + 1..].iter().filter_map(move |&b| {
                let c = index.pair_count(a, b);
                (c >= opts.min_pair_count).then_some((a, b, c))
            })
        })
        .collect();

    let mut used: Vec<ItemId> = pairs.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    used.sort_unstable();
    used.dedup();
    let node_of = |id: ItemId| used.binary_search(&id).expect("endpoint is a node");

    let nodes = used
        .iter()
        .map(|&id| Node {
            item: index.item_name(id).to_string(),
            label: index.item_name(id).to_string(),
            count: index.item_count(id),
        })
        .collect();
    let edges = pairs
        .iter()
        .map(|&(a, b, count)| {
            let (ca, cb) = (index.item_count(a), index.item_count(b));
            let support_pct = count as f64 * 100.0 / n as f64;
            let lift = (count as f64 * n as f64) / (ca as f64 * cb as f64);
            let weight = match opts.weight_metric {
                WeightMetric::Count => count as f64,
                WeightMetric::Support => support_pct,
                WeightMetric::Lift => lift,
            };
            Edge {
                a: node_of(a),
                b: node_of(b),
                count,
                support_pct,
                lift,
                weight,
                strength: None,
            }
        })
        .collect();

    Ok(CoocGraph {
        n_baskets: n,
        metric: opts.weight_metric,
        nodes,
        edges,
    })
}

/// Nearest-rank percentile: the value at position `floor(p · n)` of the
/// ascending weights.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = ((p * sorted.len() as f64).floor() as usize).min(sorted.len() - 1);
    sorted[pos]
}

/// Default thresholds: the 33rd and 67th percentiles of the edge weights.
pub fn default_thresholds(graph: &CoocGraph) -> Option<(f64, f64)> {
    if graph.edges.is_empty() {
        return None;
    }
    let mut w: Vec<f64> = graph.edges.iter().map(|e| e.weight).collect();
    w.sort_by(f64::total_cmp);
    Some((percentile(&w, 0.33), percentile(&w, 0.67)))
}

fn strength_of(weight: f64, t_weak: f64, t_strong: f64) -> Strength {
    if weight < t_weak {
        Strength::Weak
    } else if weight >= t_strong && t_strong > t_weak {
        Strength::Strong
    } else {
        Strength::Medium
    }
}

/// Labels edges weak below `t_weak`, strong at or above `t_strong`, medium
/// otherwise. Without explicit thresholds the weight terciles are used; when
/// both percentiles coincide nothing is strong.
pub fn classify_edges(
    graph: &CoocGraph,
    thresholds: Option<(f64, f64)>,
) -> Result<CoocGraph, GraphError> {
    let (t_weak, t_strong) = match thresholds {
        Some((w, s)) if w < s => (w, s),
        Some((w, s)) => return Err(GraphError::InvalidThresholds(w, s)),
        None => match default_thresholds(graph) {
            Some(t) => t,
            None => return Ok(graph.clone()),
        },
    };
    let mut out = graph.clone();
    for e in &mut out.edges {
        e.strength = Some(strength_of(e.weight, t_weak, t_strong));
    }
    Ok(out)
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz source for the graph. Output is byte-stable: nodes in item
/// order, edges in endpoint order.
pub fn export_dot(graph: &CoocGraph) -> String {
    let mut out = String::from("graph multiweb {\n  node [shape=ellipse];\n");
    for node in &graph.nodes {
        let _ = writeln!(
            out,
            "  {} [label={}, count={}];",
            dot_quote(&node.item),
            dot_quote(&node.label),
            node.count
        );
    }
    for e in &graph.edges {
        let strength = e.strength.unwrap_or(Strength::Medium);
        let (penwidth, style) = strength.dot_style();
        let _ = writeln!(
            out,
            "  {} -- {} [penwidth={penwidth}, style={style}, strength={}, count={}];",
            dot_quote(&graph.nodes[e.a].item),
            dot_quote(&graph.nodes[e.b].item),
            strength.as_str(),
            e.count
        );
    }
    out.push_str("}\n");
    out
}

/// `item_a;item_b;count;support_pct;lift;strength`
pub fn write_edges_csv<W: Write>(graph: &CoocGraph, sink: W) -> Result<(), GraphError> {
    let mut writer = csv::WriterBuilder::new().delimiter(b';').from_writer(sink);
    writer.write_record([
        "item_a",
        "item_b",
        "count",
        "support_pct",
        "lift",
        "strength",
    ])?;
    for e in &graph.edges {
        let (ca, cb) = (graph.nodes[e.a].count, graph.nodes[e.b].count);
        writer.write_record([
            graph.nodes[e.a].item.clone(),
            graph.nodes[e.b].item.clone(),
            e.count.to_string(),
            percent_half_up(e.count, graph.n_baskets, 3),
            ratio_half_up(
                e.count as u128 * graph.n_baskets as u128,
                ca as u128 * cb as u128,
                1,
                3,
            ),
            e.strength.map_or("", Strength::as_str).to_string(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
