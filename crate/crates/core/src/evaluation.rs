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

//! Train/holdout validation and rule triage.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hasher;
use std::io::Write;
use std::str::FromStr;

use fnv::FnvHasher;
use thiserror::Error;

use crate::dataset::Basket;
use crate::fmt::{float_half_up, ratio_half_up, trim_zero_fraction};
use crate::mining::{BitmapIndex, MiningError};
use crate::rules::{rule_fields, Rule, RuleCounts, ScoredRule, RULES_HEADER};

const SPLIT_BUCKETS: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("holdout fraction {0} outside (0, 1)")]
    InvalidFraction(f64),
    #[error("need at least 2 baskets to split, got {0}")]
    TooFewBaskets(usize),
    #[error("degenerate split: {train} train / {holdout} holdout baskets")]
    DegenerateSplit { train: usize, holdout: usize },
    #[error("holdout set is empty")]
    EmptyHoldout,
    #[error("stability threshold {0} must be nonnegative")]
    InvalidDelta(f64),
    #[error("line {line}: malformed pattern `{text}` (want `a|b => c`, `*` allowed)")]
    MalformedPattern { line: usize, text: String },
    #[error("line {line}: unknown triage label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error(transparent)]
    Mining(#[from] MiningError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub holdout_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            holdout_fraction: 0.3,
            seed: 0,
        }
    }
}

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic 64-bit key of a receipt under a seed:
/// `splitmix64(fnv1a64(receipt_id) ^ splitmix64(seed))`.
pub fn split_key(seed: u64, receipt_id: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(receipt_id.as_bytes());
    splitmix64(h.finish() ^ splitmix64(seed))
}

/// True when the receipt lands in the holdout side.
pub fn in_holdout(spec: &SplitSpec, receipt_id: &str) -> bool {
    let cut = (spec.holdout_fraction * SPLIT_BUCKETS as f64).round() as u64;
    split_key(spec.seed, receipt_id) % SPLIT_BUCKETS < cut
}

#[derive(Debug, Clone, Default)]
pub struct Split {
    pub train: Vec<Basket>,
    pub holdout: Vec<Basket>,
}

/// Receipt-level split; membership depends only on `(seed, receipt_id)`.
pub fn split_baskets(baskets: &[Basket], spec: &SplitSpec) -> Result<Split, EvalError> {
    if !(spec.holdout_fraction > 0.0 && spec.holdout_fraction < 1.0) {
        return Err(EvalError::InvalidFraction(spec.holdout_fraction));
    }
    if baskets.len() < 2 {
        return Err(EvalError::TooFewBaskets(baskets.len()));
    }
    let (holdout, train): (Vec<Basket>, Vec<Basket>) = baskets
        .iter()
        .cloned()
        .partition(|b| in_holdout(spec, &b.receipt_id));
    if train.is_empty() || holdout.is_empty() {
        return Err(EvalError::DegenerateSplit {
            train: train.len(),
            holdout: holdout.len(),
        });
    }
    Ok(Split { train, holdout })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    /// The antecedent never occurs in the holdout baskets.
    Unsupported,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "true",
            Stability::Unstable => "false",
            Stability::Unsupported => "unsupported",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationRow {
    pub rule: ScoredRule,
    pub holdout: RuleCounts,
    pub status: Stability,
}

impl ValidationRow {
    pub fn train_confidence(&self) -> f64 {
        self.rule.metrics.counts.confidence().unwrap_or(0.0)
    }

    pub fn holdout_confidence(&self) -> Option<f64> {
        self.holdout.confidence()
    }

    /// `|train − holdout|` confidence, as a fraction.
    pub fn drop(&self) -> Option<f64> {
        self.holdout_confidence()
            .map(|h| (self.train_confidence() - h).abs())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationSummary {
    pub stable: usize,
    pub unstable: usize,
    pub unsupported: usize,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub delta: f64,
    pub rows: Vec<ValidationRow>,
    pub summary: ValidationSummary,
}

impl ValidationReport {
    pub fn row(&self, rule: &Rule) -> Option<&ValidationRow> {
        self.rows.iter().find(|r| &r.rule.rule == rule)
    }
}

/// Re-measures each train rule's confidence on the holdout baskets.
pub fn validate_rules(
    rules: &[ScoredRule],
    holdout: &[Basket],
    delta: f64,
) -> Result<ValidationReport, EvalError> {
    if holdout.is_empty() {
        return Err(EvalError::EmptyHoldout);
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(EvalError::InvalidDelta(delta));
    }
    let index = BitmapIndex::build(holdout)?;
    let mut summary = ValidationSummary::default();
    let rows = rules
        .iter()
        .map(|r| {
            let counts = RuleCounts::lenient(&r.rule, &index);
            let train = r.metrics.counts.confidence().unwrap_or(0.0);
            let status = match counts.confidence() {
                None => {
                    summary.unsupported += 1;
                    Stability::Unsupported
                }
                Some(h) if (train - h).abs() <= delta => {
                    summary.stable += 1;
                    Stability::Stable
                }
                Some(_) => {
                    summary.unstable += 1;
                    Stability::Unstable
                }
            };
            ValidationRow {
                rule: r.clone(),
                holdout: counts,
                status,
            }
        })
        .collect();
    Ok(ValidationReport {
        delta,
        rows,
        summary,
    })
}

/// Rules CSV columns plus `holdout_confidence;drop;stable`. Holdout
/// confidence is a percentage like `confidence_pct`; drop is a fraction in
/// the units of δ.
pub fn write_validation_csv<W: Write>(report: &ValidationReport, sink: W) -> Result<(), EvalError> {
    let mut writer = csv::WriterBuilder::new().delimiter(b';').from_writer(sink);
    let mut header: Vec<&str> = RULES_HEADER.to_vec();
    header.extend(["holdout_confidence", "drop", "stable"]);
    writer.write_record(&header)?;
    for row in &report.rows {
        let mut fields = rule_fields(&row.rule);
        match row.status {
            Stability::Unsupported => fields.extend([String::new(), String::new()]),
            _ => {
                fields.push(trim_zero_fraction(ratio_half_up(
                    row.holdout.joint as u128,
                    row.holdout.instances as u128,
                    100,
                    1,
                )));
                fields.push(float_half_up(row.drop().unwrap_or(0.0), 4));
            }
        }
        fields.push(row.status.as_str().to_string());
        writer.write_record(&fields)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `a|b => c`, where either side may be `*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RulePattern {
    /// `None` matches any antecedent.
    pub antecedent: Option<BTreeSet<String>>,
    /// `None` matches any consequent.
    pub consequent: Option<String>,
}

impl RulePattern {
    pub fn matches(&self, rule: &Rule) -> bool {
        let antecedent_ok = self.antecedent.as_ref().is_none_or(|items| {
            items.len() == rule.antecedent().len()
                && rule.antecedent().iter().all(|a| items.contains(a))
        });
        let consequent_ok = self
            .consequent
            .as_ref()
            .is_none_or(|c| c == rule.consequent());
        antecedent_ok && consequent_ok
    }
}

impl FromStr for RulePattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lhs, rhs) = s.split_once("=>").ok_or("missing `=>`")?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if rhs.contains("=>") {
            return Err("more than one `=>`".into());
        }
        if lhs.is_empty() || rhs.is_empty() {
            return Err("empty side".into());
        }
        let antecedent = if lhs == "*" {
            None
        } else {
            let items: BTreeSet<String> = lhs.split('|').map(|i| i.trim().to_string()).collect();
            if items.iter().any(String::is_empty) {
                return Err("empty antecedent item".into());
            }
            Some(items)
        };
        let consequent = (rhs != "*").then(|| rhs.to_string());
        Ok(RulePattern {
            antecedent,
            consequent,
        })
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a known-associations file: one pattern per line, `#` comments.
pub fn parse_patterns(text: &str) -> Result<Vec<RulePattern>, EvalError> {
    content_lines(text)
        .map(|(line, l)| {
            l.parse().map_err(|_| EvalError::MalformedPattern {
                line,
                text: l.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriageKind {
    Actionable,
    Trivial,
    Inexplicable,
    Unlabeled,
}

impl TriageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TriageKind::Actionable => "actionable",
            TriageKind::Trivial => "trivial",
            TriageKind::Inexplicable => "inexplicable",
            TriageKind::Unlabeled => "unlabeled",
        }
    }
}

impl FromStr for TriageKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            TriageKind::Actionable,
            TriageKind::Trivial,
            TriageKind::Inexplicable,
            TriageKind::Unlabeled,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| s.to_string())
    }
}

impl fmt::Display for TriageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriageLabel {
    pub kind: TriageKind,
    pub rationale: String,
}

/// A user-supplied label that overrides the suggestion for matching rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub pattern: RulePattern,
    pub kind: TriageKind,
}

/// Parses an annotations file: `label: pattern` per line, e.g.
/// `actionable: beer|@dow=SAT => crisps`.
pub fn parse_annotations(text: &str) -> Result<Vec<Annotation>, EvalError> {
    content_lines(text)
        .map(|(line, l)| {
            let malformed = || EvalError::MalformedPattern {
                line,
                text: l.to_string(),
            };
            let (label, pattern) = l.split_once(':').ok_or_else(malformed)?;
            let kind = label
                .trim()
                .parse()
                .map_err(|label| EvalError::UnknownLabel { line, label })?;
            let pattern = pattern.trim().parse().map_err(|_| malformed())?;
            Ok(Annotation { pattern, kind })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriageThresholds {
    /// Lift within `1 ± epsilon` is unsurprising.
    pub epsilon: f64,
    /// Fewer instances than this is too thin to explain.
    pub floor_instances: u64,
}

impl Default for TriageThresholds {
    fn default() -> Self {
        TriageThresholds {
            epsilon: 0.1,
            floor_instances: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TriagedRule {
    pub rule: ScoredRule,
    pub label: TriageLabel,
}

/// Suggests one label per rule. Annotations win, then known associations,
/// then the lift band, then the instance floor; anything left is
/// actionable.
pub fn triage(
    rules: &[ScoredRule],
    known: &[RulePattern],
    thresholds: &TriageThresholds,
    annotations: &[Annotation],
) -> Vec<TriagedRule> {
    rules
        .iter()
        .map(|r| {
            let m = &r.metrics;
            let (kind, rationale) =
                if let Some(a) = annotations.iter().find(|a| a.pattern.matches(&r.rule)) {
                    (a.kind, "user annotation".to_string())
                } else if known.iter().any(|p| p.matches(&r.rule)) {
                    (TriageKind::Trivial, "known association".to_string())
                } else if (m.lift - 1.0).abs() <= thresholds.epsilon {
                    (
                        TriageKind::Trivial,
                        format!("lift {:.3} within 1 ± {}", m.lift, thresholds.epsilon),
                    )
                } else if m.instances() < thresholds.floor_instances {
                    (
                        TriageKind::Inexplicable,
                        format!(
                            "{} instances below floor {}",
                            m.instances(),
                            thresholds.floor_instances
                        ),
                    )
                } else {
                    (
                        TriageKind::Actionable,
                        format!("lift {:.3} on {} instances", m.lift, m.instances()),
                    )
                };
            TriagedRule {
                rule: r.clone(),
                label: TriageLabel { kind, rationale },
            }
        })
        .collect()
}

/// `consequent;antecedent_items;instances;lift;label;rationale`
pub fn write_triage_csv<W: Write>(rules: &[TriagedRule], sink: W) -> Result<(), EvalError> {
    let mut writer = csv::WriterBuilder::new().delimiter(b';').from_writer(sink);
    writer.write_record([
        "consequent",
        "antecedent_items",
        "instances",
        "lift",
        "label",
        "rationale",
    ])?;
    for t in rules {
        let r = &t.rule;
        writer.write_record([
            r.rule.consequent().to_string(),
            r.rule.antecedent().join("|"),
            r.metrics.instances().to_string(),
            r.metrics.lift_display(),
            t.label.kind.to_string(),
            t.label.rationale.clone(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
