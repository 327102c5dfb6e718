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

//! Single-consequent association rules and their quality measures.
//!
//! All measures derive from four basket counts: the corpus size `N`, the
//! antecedent count `|T(A)|` (the rule's *instances*), the consequent count
//! `|T(C)|` and the joint count `|T(A∪C)|`.
//!
//! The MDL score is the cost in bits of transmitting the rule and the
//! baskets where it fails, given an item universe of `M` items:
//!
//! ```text
//! bits = log2(M · C(M-1, k))        which consequent, then which k-item antecedent
//!      + log2(instances + 1)        how many exceptions (0..=instances)
//!      + log2(C(instances, e))      which of the covered baskets are exceptions
//! ```
//!
//! where `k = |A|` and `e = instances - joint`.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::is_virtual;
use crate::fmt::{float_half_up, percent_half_up, ratio_half_up, trim_zero_fraction};
use crate::mining::{BitmapIndex, FrequentItemsetTable, ItemId, Itemset, MiningError};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error(transparent)]
    Mining(#[from] MiningError),
    #[error("confidence undefined: antecedent {0:?} never occurs")]
    UndefinedConfidence(Vec<String>),
    #[error("lift undefined: consequent `{0}` never occurs")]
    UndefinedLift(String),
    #[error("J-measure undefined: consequent frequency is 0 or 1")]
    UndefinedJMeasure,
    #[error("min_confidence {0} outside (0, 1]")]
    InvalidConfidence(f64),
    #[error("unknown measure `{0}` (want support, confidence, lift, j_measure or mdl)")]
    UnknownMeasure(String),
    #[error("unknown support mode `{0}` (want antecedent or joint)")]
    UnknownSupportMode(String),
    #[error("itemset table does not match the index: {0}")]
    TableMismatch(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// `antecedent → consequent`, antecedent sorted. Ordering is lexicographic
/// on (antecedent, consequent).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    antecedent: Vec<String>,
    consequent: String,
}

impl Rule {
    pub fn new<I, S>(antecedent: I, consequent: impl Into<String>) -> Result<Self, RuleError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut antecedent: Vec<String> = antecedent.into_iter().map(Into::into).collect();
        antecedent.sort();
        antecedent.dedup();
        let consequent = consequent.into();
        if antecedent.is_empty() {
            return Err(RuleError::InvalidRule("empty antecedent".into()));
        }
        if antecedent.contains(&consequent) {
            return Err(RuleError::InvalidRule(format!(
                "consequent `{consequent}` also in antecedent"
            )));
        }
        Ok(Rule {
            antecedent,
            consequent,
        })
    }

    pub fn antecedent(&self) -> &[String] {
        &self.antecedent
    }

    pub fn consequent(&self) -> &str {
        &self.consequent
    }

    /// Antecedent plus consequent.
    pub fn item_count(&self) -> usize {
        self.antecedent.len() + 1
    }

    pub fn has_virtual_consequent(&self) -> bool {
        is_virtual(&self.consequent)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.antecedent.join("|"), self.consequent)
    }
}

/// What the rule's support percentage counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SupportMode {
    /// Baskets containing the antecedent.
    #[default]
    Antecedent,
    /// Baskets containing antecedent and consequent.
    Joint,
}

impl FromStr for SupportMode {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "antecedent" => Ok(SupportMode::Antecedent),
            "joint" => Ok(SupportMode::Joint),
            other => Err(RuleError::UnknownSupportMode(other.to_string())),
        }
    }
}

/// Raw basket counts behind a rule's measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleCounts {
    pub n_baskets: u64,
    /// Size of the index's item universe.
    pub n_items: u64,
    pub antecedent_len: u64,
    /// `|T(A)|`
    pub instances: u64,
    /// `|T(A∪C)|`
    pub joint: u64,
    /// `|T(C)|`
    pub consequent_count: u64,
}

impl RuleCounts {
    fn from_ids(index: &BitmapIndex, antecedent: &Itemset, consequent: ItemId) -> Self {
        let joint = Itemset::new(antecedent.items().iter().copied().chain([consequent]));
        RuleCounts {
            n_baskets: index.n_baskets() as u64,
            n_items: index.n_items() as u64,
            antecedent_len: antecedent.len() as u64,
            instances: index.count(antecedent),
            joint: index.count(&joint),
            consequent_count: index.item_count(consequent),
        }
    }

    /// Counts for `rule` on `index`; every item must be known to the index.
    pub fn strict(rule: &Rule, index: &BitmapIndex) -> Result<Self, RuleError> {
        let antecedent = index.itemset(rule.antecedent())?;
        let consequent = index
            .item_id(rule.consequent())
            .ok_or_else(|| MiningError::UnknownItem(rule.consequent().to_string()))?;
        Ok(Self::from_ids(index, &antecedent, consequent))
    }

    /// Counts for `rule` on `index`, where items the index has never seen
    /// occur in zero baskets.
    pub fn lenient(rule: &Rule, index: &BitmapIndex) -> Self {
        match Self::strict(rule, index) {
            Ok(c) => c,
            Err(_) => {
                let mut all = rule.antecedent.clone();
                all.push(rule.consequent.clone());
                RuleCounts {
                    n_baskets: index.n_baskets() as u64,
                    n_items: index.n_items() as u64,
                    antecedent_len: rule.antecedent.len() as u64,
                    instances: index.support_count_lenient(rule.antecedent()),
                    joint: index.support_count_lenient(&all),
                    consequent_count: index.support_count_lenient(&[rule.consequent()]),
                }
            }
        }
    }

    /// `|T(A∪C)| / |T(A)|`, or `None` when the antecedent never occurs.
    pub fn confidence(&self) -> Option<f64> {
        (self.instances > 0).then(|| self.joint as f64 / self.instances as f64)
    }

    pub fn exceptions(&self) -> u64 {
        self.instances - self.joint
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleMetrics {
    pub counts: RuleCounts,
    pub support_mode: SupportMode,
    pub support_pct: f64,
    pub confidence_pct: f64,
    pub lift: f64,
    pub j_measure_bits: f64,
    pub mdl_bits: f64,
}

impl RuleMetrics {
    /// Baskets antecedent support counts, i.e. `instances`.
    pub fn instances(&self) -> u64 {
        self.counts.instances
    }

    fn support_count(&self) -> u64 {
        match self.support_mode {
            SupportMode::Antecedent => self.counts.instances,
            SupportMode::Joint => self.counts.joint,
        }
    }

    /// Support percentage to three decimals.
    pub fn support_display(&self) -> String {
        percent_half_up(self.support_count(), self.counts.n_baskets, 3)
    }

    /// Confidence percentage to one decimal, a whole number when exact.
    pub fn confidence_display(&self) -> String {
        trim_zero_fraction(ratio_half_up(
            self.counts.joint as u128,
            self.counts.instances as u128,
            100,
            1,
        ))
    }

    /// Lift to one decimal.
    pub fn lift_display(&self) -> String {
        let c = self.counts;
        ratio_half_up(
            c.joint as u128 * c.n_baskets as u128,
            c.instances as u128 * c.consequent_count as u128,
            1,
            1,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRule {
    pub rule: Rule,
    pub metrics: RuleMetrics,
}

fn metrics_from_counts(
    rule: &Rule,
    counts: RuleCounts,
    mode: SupportMode,
) -> Result<RuleMetrics, RuleError> {
    let RuleCounts {
        n_baskets: n,
        instances,
        joint,
        consequent_count: c,
        ..
    } = counts;
    if instances == 0 {
        return Err(RuleError::UndefinedConfidence(rule.antecedent.clone()));
    }
    if c == 0 {
        return Err(RuleError::UndefinedLift(rule.consequent.clone()));
    }
    let support_count = match mode {
        SupportMode::Antecedent => instances,
        SupportMode::Joint => joint,
    };
    // Integer products first so equal ratios give identical floats.
    let lift = (joint as f64 * n as f64) / (instances as f64 * c as f64);
    let j_measure_bits = if c == n {
        // P(C) = 1 forces P(C|A) = 1; both terms vanish.
        0.0
    } else {
        j_measure_from_counts(n, instances, joint, c).ok_or(RuleError::UndefinedJMeasure)?
    };
    Ok(RuleMetrics {
        counts,
        support_mode: mode,
        support_pct: support_count as f64 * 100.0 / n as f64,
        confidence_pct: joint as f64 * 100.0 / instances as f64,
        lift,
        j_measure_bits,
        mdl_bits: mdl_bits(
            counts.n_items,
            counts.antecedent_len,
            instances,
            instances - joint,
        ),
    })
}

/// Support, confidence, lift, J-measure and MDL for one rule.
pub fn compute_metrics(
    rule: &Rule,
    index: &BitmapIndex,
    mode: SupportMode,
) -> Result<RuleMetrics, RuleError> {
    metrics_from_counts(rule, RuleCounts::strict(rule, index)?, mode)
}

/// `J = P(A)·[p·log2(p/q) + (1-p)·log2((1-p)/(1-q))]` with `p = P(C|A)` and
/// `q = P(C)`, taking `0·log2(0/x) = 0`. `None` when `q` is 0 or 1 or the
/// antecedent never occurs.
pub fn j_measure_from_counts(n: u64, instances: u64, joint: u64, consequent: u64) -> Option<f64> {
    if n == 0 || instances == 0 || consequent == 0 || consequent >= n {
        return None;
    }
    let pa = instances as f64 / n as f64;
    let p = joint as f64 / instances as f64;
    let q = consequent as f64 / n as f64;
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).log2() };
    Some(pa * (term(p, q) + term(1.0 - p, 1.0 - q)))
}

pub fn j_measure(rule: &Rule, index: &BitmapIndex) -> Result<f64, RuleError> {
    let c = RuleCounts::strict(rule, index)?;
    if c.instances == 0 {
        return Err(RuleError::UndefinedConfidence(rule.antecedent.clone()));
    }
    j_measure_from_counts(c.n_baskets, c.instances, c.joint, c.consequent_count)
        .ok_or(RuleError::UndefinedJMeasure)
}

/// `log2(C(n, k))`, summed term by term; `C(n, 0) = 1`.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64 / i as f64).log2())
        .sum()
}

/// Description length in bits of a rule with a `k`-item antecedent over an
/// `m`-item universe that covers `instances` baskets with `exceptions`
/// failures.
pub fn mdl_bits(m: u64, k: u64, instances: u64, exceptions: u64) -> f64 {
    let identity = (m as f64).log2() + log2_binomial(m.saturating_sub(1), k);
    identity + ((instances + 1) as f64).log2() + log2_binomial(instances, exceptions)
}

pub fn mdl_score(rule: &Rule, index: &BitmapIndex) -> Result<f64, RuleError> {
    let c = RuleCounts::strict(rule, index)?;
    Ok(mdl_bits(
        c.n_items,
        c.antecedent_len,
        c.instances,
        c.exceptions(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Support,
    Confidence,
    Lift,
    JMeasure,
    Mdl,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Support,
        Measure::Confidence,
        Measure::Lift,
        Measure::JMeasure,
        Measure::Mdl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Support => "support",
            Measure::Confidence => "confidence",
            Measure::Lift => "lift",
            Measure::JMeasure => "j_measure",
            Measure::Mdl => "mdl",
        }
    }

    pub fn value(self, m: &RuleMetrics) -> f64 {
        match self {
            Measure::Support => m.support_pct,
            Measure::Confidence => m.confidence_pct,
            Measure::Lift => m.lift,
            Measure::JMeasure => m.j_measure_bits,
            Measure::Mdl => m.mdl_bits,
        }
    }

    /// Best-first comparison; fewer bits is better for MDL.
    fn compare(self, a: &ScoredRule, b: &ScoredRule) -> Ordering {
        let (x, y) = (self.value(&a.metrics), self.value(&b.metrics));
        let by_value = match self {
            Measure::Mdl => x.total_cmp(&y),
            _ => y.total_cmp(&x),
        };
        by_value.then_with(|| a.rule.cmp(&b.rule))
    }
}

impl FromStr for Measure {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "j" | "jmeasure" | "j_measure" => Ok(Measure::JMeasure),
            other => Measure::ALL
                .into_iter()
                .find(|m| m.name() == other)
                .ok_or_else(|| RuleError::UnknownMeasure(other.to_string())),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Top `k` rules by `measure`, ties broken by (antecedent, consequent).
pub fn rank_rules(rules: &[ScoredRule], measure: Measure, k: usize) -> Vec<ScoredRule> {
    let mut sorted = rules.to_vec();
    sorted.sort_by(|a, b| measure.compare(a, b));
    sorted.truncate(k);
    sorted
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleGenParams {
    pub min_confidence: f64,
    pub support_mode: SupportMode,
    /// Never emit a virtual item as consequent.
    pub virtual_antecedent_only: bool,
    /// Output order.
    pub rank_by: Measure,
    /// Keep only the best `n` rules under `rank_by`. With
    /// `rank_by = JMeasure` this is generalized rule induction.
    pub max_rules: Option<usize>,
}

impl Default for RuleGenParams {
    fn default() -> Self {
        RuleGenParams {
            min_confidence: 0.5,
            support_mode: SupportMode::Antecedent,
            virtual_antecedent_only: true,
            rank_by: Measure::Confidence,
            max_rules: None,
        }
    }
}

impl RuleGenParams {
    pub fn validate(&self) -> Result<(), RuleError> {
        if self.min_confidence > 0.0 && self.min_confidence <= 1.0 {
            Ok(())
        } else {
            Err(RuleError::InvalidConfidence(self.min_confidence))
        }
    }
}

/// Emits every `Z∖{c} → c` for frequent `Z` of size ≥ 2 that meets the
/// confidence floor, scored on `index` and ordered by `params.rank_by`.
pub fn generate_rules(
    table: &FrequentItemsetTable,
    index: &BitmapIndex,
    params: &RuleGenParams,
) -> Result<Vec<ScoredRule>, RuleError> {
    params.validate()?;

    // Map table ids onto index ids.
    let remap: Vec<ItemId> = if table.item_order() == index.item_order() {
        (0..index.n_items() as ItemId).collect()
    } else {
        table
            .item_order()
            .iter()
            .map(|name| {
                index
                    .item_id(name)
                    .ok_or_else(|| RuleError::TableMismatch(format!("item `{name}` not indexed")))
            })
            .collect::<Result<_, _>>()?
    };

    let itemsets: Vec<Itemset> = table
        .iter()
        .filter(|(set, _)| set.len() >= 2)
        .map(|(set, _)| Itemset::new(set.items().iter().map(|&id| remap[id as usize])))
        .collect();

    let scored: Vec<ScoredRule> = itemsets
        .par_iter()
        .map(|z| -> Result<Vec<ScoredRule>, RuleError> {
            let mut out = Vec::new();
            for (pos, &consequent) in z.items().iter().enumerate() {
                if params.virtual_antecedent_only && index.is_virtual(consequent) {
                    continue;
                }
                let antecedent = z.without(pos).expect("size >= 2");
                let counts = RuleCounts::from_ids(index, &antecedent, consequent);
                let conf = counts.confidence().unwrap_or(0.0);
                if conf < params.min_confidence {
                    continue;
                }
                let rule = Rule {
                    antecedent: index.names(&antecedent),
                    consequent: index.item_name(consequent).to_string(),
                };
                let metrics = metrics_from_counts(&rule, counts, params.support_mode)?;
                out.push(ScoredRule { rule, metrics });
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();

    Ok(rank_rules(
        &scored,
        params.rank_by,
        params.max_rules.unwrap_or(usize::MAX),
    ))
}

pub const RULES_HEADER: [&str; 8] = [
    "consequent",
    "antecedent_items",
    "instances",
    "support_pct",
    "confidence_pct",
    "lift",
    "j_bits",
    "mdl_bits",
];

/// One CSV row's worth of rendered rule fields, in [`RULES_HEADER`] order.
pub fn rule_fields(r: &ScoredRule) -> Vec<String> {
    let m = &r.metrics;
    vec![
        r.rule.consequent.clone(),
        r.rule.antecedent.join("|"),
        m.instances().to_string(),
        m.support_display(),
        m.confidence_display(),
        m.lift_display(),
        float_half_up(m.j_measure_bits, 4),
        float_half_up(m.mdl_bits, 4),
    ]
}

/// Writes rules in the given order.
pub fn write_rules_csv<W: Write>(rules: &[ScoredRule], sink: W) -> Result<(), RuleError> {
    let mut writer = csv::WriterBuilder::new().delimiter(b';').from_writer(sink);
    writer.write_record(RULES_HEADER)?;
    for r in rules {
        writer.write_record(rule_fields(r))?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mining::{apriori, MinSupport, MiningParams};

    fn index(rows: &[&[&str]]) -> BitmapIndex {
        BitmapIndex::from_transactions(rows.iter().map(|r| r.iter())).unwrap()
    }

    fn rule(a: &[&str], c: &str) -> Rule {
        Rule::new(a.iter().copied(), c).unwrap()
    }

    fn scored(a: &[&str], c: &str, lift: f64) -> ScoredRule {
        let counts = RuleCounts {
            n_baskets: 10,
            n_items: 4,
            antecedent_len: a.len() as u64,
            instances: 5,
            joint: 2,
            consequent_count: 3,
        };
        let mut metrics =
            metrics_from_counts(&rule(a, c), counts, SupportMode::Antecedent).unwrap();
        metrics.lift = lift;
        ScoredRule {
            rule: rule(a, c),
            metrics,
        }
    }

    #[test]
    fn rule_construction() {
        let r = rule(&["B", "A", "A"], "C");
        assert_eq!(r.antecedent(), ["A", "B"]);
        assert_eq!(r.to_string(), "A|B => C");
        assert!(Rule::new(["A"], "A").is_err());
        assert!(Rule::new(Vec::<String>::new(), "A").is_err());
        assert!(rule(&["A"], "@dow=SAT").has_virtual_consequent());
    }

    #[test]
    fn independence_gives_unit_lift_and_zero_j() {
        // P(C) = 1/2 overall and within A.
        let idx = index(&[&["A", "C"], &["A"], &["C"], &["B"]]);
        let m = compute_metrics(&rule(&["A"], "C"), &idx, SupportMode::Antecedent).unwrap();
        assert_eq!(m.lift, 1.0);
        assert_eq!(m.j_measure_bits, 0.0);
        assert_eq!(m.confidence_pct, 50.0);
        assert_eq!(m.support_pct, 50.0);
        let joint = compute_metrics(&rule(&["A"], "C"), &idx, SupportMode::Joint).unwrap();
        assert_eq!(joint.support_pct, 25.0);
    }

    #[test]
    fn certain_rule_has_full_confidence() {
        let idx = index(&[&["A", "B"], &["A", "B"], &["B"]]);
        let m = compute_metrics(&rule(&["A"], "B"), &idx, SupportMode::Antecedent).unwrap();
        assert_eq!(m.confidence_pct, 100.0);
        assert_eq!(m.confidence_display(), "100");
        // B is everywhere: J is zero by convention, lift exactly one.
        assert_eq!(m.j_measure_bits, 0.0);
        assert_eq!(m.lift, 1.0);
    }

    #[test]
    fn undefined_measures() {
        let idx = index(&[&["A"], &["B"]]);
        assert!(matches!(
            compute_metrics(&rule(&["Z"], "A"), &idx, SupportMode::Antecedent),
            Err(RuleError::Mining(MiningError::UnknownItem(_)))
        ));
        let zero = RuleCounts {
            n_baskets: 2,
            n_items: 2,
            antecedent_len: 1,
            instances: 0,
            joint: 0,
            consequent_count: 1,
        };
        assert!(matches!(
            metrics_from_counts(&rule(&["A"], "B"), zero, SupportMode::Antecedent),
            Err(RuleError::UndefinedConfidence(_))
        ));
        let no_c = RuleCounts {
            instances: 1,
            consequent_count: 0,
            ..zero
        };
        assert!(matches!(
            metrics_from_counts(&rule(&["A"], "B"), no_c, SupportMode::Antecedent),
            Err(RuleError::UndefinedLift(_))
        ));
        let everywhere = index(&[&["A", "B"], &["B"]]);
        assert!(matches!(
            j_measure(&rule(&["A"], "B"), &everywhere),
            Err(RuleError::UndefinedJMeasure)
        ));
    }

    #[test]
    fn j_measure_half_bit() {
        // P(A) = 0.5, P(C|A) = 1, P(C) = 0.5.
        let idx = index(&[&["A", "C"], &["A", "C"], &["B"], &["B"]]);
        let j = j_measure(&rule(&["A"], "C"), &idx).unwrap();
        assert!((j - 0.5).abs() < 1e-12, "{j}");
        assert_eq!(j_measure_from_counts(4, 2, 2, 2), Some(0.5));
        assert_eq!(j_measure_from_counts(4, 2, 1, 4), None);
        assert_eq!(j_measure_from_counts(4, 2, 0, 0), None);
    }

    #[test]
    fn mdl_worked_values() {
        let perfect = mdl_bits(4, 1, 6, 0);
        let expected = 12f64.log2() + 7f64.log2();
        assert!((perfect - expected).abs() < 1e-12);
        assert!((perfect - 6.392).abs() < 5e-4, "{perfect}");
        let three = mdl_bits(4, 1, 6, 3);
        assert!((three - perfect - 20f64.log2()).abs() < 1e-12);
        assert!((three - perfect - 4.322).abs() < 5e-4);
        assert!(mdl_bits(4, 1, 6, 1) < mdl_bits(4, 1, 6, 2));
    }

    #[test]
    fn mdl_score_reads_the_index() {
        // M = 4 items, A→C holds in 3 of A's 6 baskets.
        let rows: &[&[&str]] = &[
            &["A", "C"],
            &["A", "C"],
            &["A", "C"],
            &["A", "B"],
            &["A", "D"],
            &["A"],
            &["B"],
        ];
        let bits = mdl_score(&rule(&["A"], "C"), &index(rows)).unwrap();
        assert!((bits - mdl_bits(4, 1, 6, 3)).abs() < 1e-12);
    }

    #[test]
    fn log2_binomial_values() {
        assert_eq!(log2_binomial(6, 0), 0.0);
        assert!((log2_binomial(6, 3) - 20f64.log2()).abs() < 1e-12);
        assert!((log2_binomial(52, 5) - 2_598_960f64.log2()).abs() < 1e-9);
        assert_eq!(log2_binomial(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn ranking_ties_break_on_rule_order() {
        let rules = vec![
            scored(&["B"], "C", 2.0),
            scored(&["A"], "C", 2.0),
            scored(&["A"], "B", 3.0),
        ];
        let top = rank_rules(&rules, Measure::Lift, 10);
        let order: Vec<String> = top.iter().map(|r| r.rule.to_string()).collect();
        assert_eq!(order, ["A => B", "A => C", "B => C"]);
        assert!(rank_rules(&rules, Measure::Lift, 0).is_empty());
        assert_eq!(rank_rules(&rules, Measure::Lift, 1).len(), 1);
    }

    #[test]
    fn mdl_ranks_ascending() {
        let rules = vec![scored(&["A", "B"], "C", 1.0), scored(&["A"], "C", 1.0)];
        let top = rank_rules(&rules, Measure::Mdl, 2);
        // Shorter antecedent over a 4-item universe: log2(4·3) < log2(4·3).. + k=2 term.
        assert_eq!(top[0].rule.antecedent(), ["A"]);
    }

    #[test]
    fn measure_names() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!(matches!(
            "zeal".parse::<Measure>(),
            Err(RuleError::UnknownMeasure(_))
        ));
        assert!("both".parse::<SupportMode>().is_err());
    }

    #[test]
    fn generation_respects_confidence_and_virtual_policy() {
        let rows: &[&[&str]] = &[
            &["@dow=SAT", "A", "B"],
            &["@dow=SAT", "A", "B"],
            &["A"],
            &["B"],
        ];
        let idx = index(rows);
        let table = apriori(
            &idx,
            &MiningParams {
                min_support: MinSupport::Count(2),
                max_len: 3,
            },
        )
        .unwrap();
        let rules = generate_rules(&table, &idx, &RuleGenParams::default()).unwrap();
        assert!(rules.iter().all(|r| !r.rule.has_virtual_consequent()));
        assert!(rules
            .iter()
            .any(|r| r.rule.antecedent() == ["@dow=SAT", "A"] && r.rule.consequent() == "B"));
        assert!(rules.iter().all(|r| r.metrics.confidence_pct >= 50.0));

        let open = RuleGenParams {
            virtual_antecedent_only: false,
            ..RuleGenParams::default()
        };
        let rules = generate_rules(&table, &idx, &open).unwrap();
        assert!(rules.iter().any(|r| r.rule.has_virtual_consequent()));

        let strict = RuleGenParams {
            min_confidence: 1.01,
            ..RuleGenParams::default()
        };
        assert!(matches!(
            generate_rules(&table, &idx, &strict),
            Err(RuleError::InvalidConfidence(_))
        ));
    }

    #[test]
    fn full_confidence_rule_is_emitted() {
        let idx = index(&[&["A", "B"], &["A", "B"], &["B"]]);
        let table = apriori(
            &idx,
            &MiningParams {
                min_support: MinSupport::Count(1),
                max_len: 2,
            },
        )
        .unwrap();
        let rules = generate_rules(&table, &idx, &RuleGenParams::default()).unwrap();
        let ab = rules
            .iter()
            .find(|r| r.rule == rule(&["A"], "B"))
            .expect("A => B");
        assert_eq!(ab.metrics.confidence_pct, 100.0);
    }

    #[test]
    fn gri_mode_keeps_top_j_measure_rules() {
        let rows: &[&[&str]] = &[&["A", "B"], &["A", "B"], &["A", "C"], &["C"], &["B"]];
        let idx = index(rows);
        let table = apriori(
            &idx,
            &MiningParams {
                min_support: MinSupport::Count(1),
                max_len: 2,
            },
        )
        .unwrap();
        let params = RuleGenParams {
            min_confidence: 0.1,
            rank_by: Measure::JMeasure,
            max_rules: Some(2),
            ..RuleGenParams::default()
        };
        let rules = generate_rules(&table, &idx, &params).unwrap();
        assert_eq!(rules.len(), 2);
        assert!(rules[0].metrics.j_measure_bits >= rules[1].metrics.j_measure_bits);
    }

    #[test]
    fn csv_rendering() {
        let counts = RuleCounts {
            n_baskets: 2919,
            n_items: 4,
            antecedent_len: 1,
            instances: 6,
            joint: 3,
            consequent_count: 3,
        };
        let metrics =
            metrics_from_counts(&rule(&["A"], "C"), counts, SupportMode::Antecedent).unwrap();
        let mut buf = Vec::new();
        write_rules_csv(
            &[ScoredRule {
                rule: rule(&["A"], "C"),
                metrics,
            }],
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RULES_HEADER.join(";"));
        assert!(lines.next().unwrap().starts_with("C;A;6;0.206;50;486.5;"));
    }
}
