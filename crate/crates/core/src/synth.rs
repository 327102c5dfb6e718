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

//! Synthetic basket corpora with planted rules.
//!
//! Randomness comes from xoshiro256++ seeded through the SplitMix64
//! expansion of the 64-bit seed. A uniform draw in `[0, 1)` is the top 53
//! bits of the next output divided by 2^53, and an integer in `[0, n)` is
//! `floor(u · n)`, so a corpus is fully determined by its spec.
//!
//! Draws per basket happen in a fixed order:
//!
//! 1. each item `i` in id order: present iff `u < base[i]`;
//! 2. each planted rule in order: iff `u < antecedent_probability` the
//!    antecedent items are forced in and the consequent is then present iff
//!    `u < target_confidence` (absent otherwise);
//! 3. an empty basket goes back to step 1;
//! 4. gender, age, day offset, hour, minute;
//! 5. one quantity per present item.

use std::io::Write;

use chrono::{Duration, NaiveDate};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Deserialize;
use thiserror::Error;

use crate::dataset::{group_into_baskets, Basket, Gender, PosRecord};

const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
    #[error("basket {0} still empty after {MAX_REDRAWS} redraws")]
    EmptyBaskets(usize),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// The generator's random stream.
#[derive(Debug, Clone)]
pub struct SynthRng(Xoshiro256PlusPlus);

impl SynthRng {
    pub fn new(seed: u64) -> Self {
        SynthRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_f64() * n as f64) as u64).min(n.saturating_sub(1))
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum BaseProbability {
    Uniform(f64),
    PerItem(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PlantedRule {
    /// Item indices in `0..n_items`.
    pub antecedent: Vec<usize>,
    pub consequent: usize,
    pub target_confidence: f64,
    pub antecedent_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct DemographicMix {
    pub female_fraction: f64,
    pub unknown_gender_fraction: f64,
    pub age_min: u32,
    pub age_max: u32,
    pub missing_age_fraction: f64,
    pub start_date: NaiveDate,
    pub days: u32,
}

impl Default for DemographicMix {
    fn default() -> Self {
        DemographicMix {
            female_fraction: 0.85,
            unknown_gender_fraction: 0.05,
            age_min: 15,
            age_max: 79,
            missing_age_fraction: 0.1,
            start_date: NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date"),
            days: 31,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SynthSpec {
    pub n_baskets: usize,
    pub n_items: usize,
    pub base_item_probability: BaseProbability,
    #[serde(default)]
    pub planted: Vec<PlantedRule>,
    #[serde(default)]
    pub demographics: DemographicMix,
    #[serde(default)]
    pub seed: u64,
}

impl SynthSpec {
    /// Ten thousand baskets over 40 items with five planted one-to-one rules
    /// `I000→I001`, `I002→I003`, …, `I008→I009` (confidence 0.7, antecedent
    /// probability 0.02). Planted items occur only through their rule; the
    /// other 30 items are independent noise with base probabilities from
    /// 0.100 to 0.245.
    pub fn planted_demo(seed: u64) -> Self {
        let n_items = 40;
        let base = (0..n_items)
            .map(|i| {
                if i < 10 {
                    0.0
                } else {
                    0.1 + 0.005 * (i - 10) as f64
                }
            })
            .collect();
        SynthSpec {
            n_baskets: 10_000,
            n_items,
            base_item_probability: BaseProbability::PerItem(base),
            planted: (0..5)
                .map(|r| PlantedRule {
                    antecedent: vec![2 * r],
                    consequent: 2 * r + 1,
                    target_confidence: 0.7,
                    antecedent_probability: 0.02,
                })
                .collect(),
            demographics: DemographicMix::default(),
            seed,
        }
    }

    fn base(&self) -> Vec<f64> {
        match &self.base_item_probability {
            BaseProbability::Uniform(p) => vec![*p; self.n_items],
            BaseProbability::PerItem(v) => v.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidSpec(msg));
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if self.n_baskets == 0 || self.n_items == 0 {
            return bad("n_baskets and n_items must be positive".into());
        }
        let base = self.base();
        if base.len() != self.n_items {
            return bad(format!(
                "{} base probabilities for {} items",
                base.len(),
                self.n_items
            ));
        }
        if let Some(p) = base.iter().find(|p| !unit(**p)) {
            return bad(format!("base probability {p} outside [0, 1]"));
        }
        for (i, r) in self.planted.iter().enumerate() {
            if r.antecedent.is_empty() {
                return bad(format!("planted rule {i}: empty antecedent"));
            }
            if let Some(&item) = r
                .antecedent
                .iter()
                .chain([&r.consequent])
                .find(|&&item| item >= self.n_items)
            {
                return bad(format!("planted rule {i}: item {item} out of range"));
            }
            if r.antecedent.contains(&r.consequent) {
                return bad(format!("planted rule {i}: consequent in antecedent"));
            }
            if !unit(r.target_confidence) || !unit(r.antecedent_probability) {
                return bad(format!("planted rule {i}: probability outside [0, 1]"));
            }
            if r.target_confidence <= base[r.consequent] {
                return bad(format!(
                    "planted rule {i}: target confidence {} not above base probability {}",
                    r.target_confidence, base[r.consequent]
                ));
            }
        }
        let d = &self.demographics;
        if !unit(d.female_fraction)
            || !unit(d.unknown_gender_fraction)
            || !unit(d.missing_age_fraction)
        {
            return bad("demographic fractions must lie in [0, 1]".into());
        }
        if d.age_min > d.age_max || d.age_max > 130 {
            return bad(format!("age range {}..={} invalid", d.age_min, d.age_max));
        }
        if d.days == 0 {
            return bad("date range must cover at least one day".into());
        }
        let can_fill = base.iter().any(|&p| p > 0.0)
            || self.planted.iter().any(|r| r.antecedent_probability > 0.0);
        if !can_fill {
            return bad("every basket would be empty".into());
        }
        Ok(())
    }
}

/// Expected behaviour of a planted rule, ignoring redraws and overlap
/// between rules.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub antecedent: Vec<String>,
    pub consequent: String,
    pub target_confidence: f64,
    pub antecedent_probability: f64,
    pub expected_antecedent_count: f64,
    pub expected_joint_count: f64,
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub records: Vec<PosRecord>,
    pub baskets: Vec<Basket>,
    pub truth: Vec<GroundTruth>,
}

pub fn item_code(n_items: usize, i: usize) -> String {
    let width = (n_items.saturating_sub(1)).to_string().len().max(3);
    format!("I{i:0width$}")
}

fn receipt_id(n_baskets: usize, b: usize) -> String {
    let width = n_baskets.to_string().len().max(6);
    format!("R{b:0width$}")
}

pub fn generate(spec: &SynthSpec) -> Result<SynthCorpus, SynthError> {
    spec.validate()?;
    let base = spec.base();
    let codes: Vec<String> = (0..spec.n_items)
        .map(|i| item_code(spec.n_items, i))
        .collect();
    let d = &spec.demographics;
    let mut rng = SynthRng::new(spec.seed);
    let mut records = Vec::new();

    for b in 0..spec.n_baskets {
        let mut present = vec![false; spec.n_items];
        let mut redraws = 0;
        loop {
            for (slot, &p) in present.iter_mut().zip(&base) {
                *slot = rng.chance(p);
            }
            for rule in &spec.planted {
                if rng.chance(rule.antecedent_probability) {
                    for &a in &rule.antecedent {
                        present[a] = true;
                    }
                    present[rule.consequent] = rng.chance(rule.target_confidence);
                }
            }
            if present.iter().any(|&p| p) {
                break;
            }
            redraws += 1;
            if redraws == MAX_REDRAWS {
                return Err(SynthError::EmptyBaskets(b));
            }
        }

        let gender = if rng.chance(d.unknown_gender_fraction) {
            Gender::Unknown
        } else if rng.chance(d.female_fraction) {
            Gender::Female
        } else {
            Gender::Male
        };
        let age = if rng.chance(d.missing_age_fraction) {
            None
        } else {
            Some(d.age_min + rng.below((d.age_max - d.age_min + 1) as u64) as u32)
        };
        let day = rng.below(d.days as u64) as i64;
        let hour = 7 + rng.below(16) as u32;
        let minute = rng.below(60) as u32;
        let timestamp = (d.start_date + Duration::days(day))
            .and_hms_opt(hour, minute, 0)
            .expect("valid time of day");

        let receipt = receipt_id(spec.n_baskets, b);
        for (i, _) in present.iter().enumerate().filter(|(_, &p)| p) {
            records.push(PosRecord {
                receipt_id: receipt.clone(),
                timestamp,
                gender,
                age,
                item_code: codes[i].clone(),
                item_name: format!("Product {i}"),
                // Every tenth item is uncategorised, like newspapers.
                category: (i % 10 != 9).then(|| format!("Category {}", i % 5)),
                quantity: 1 + rng.below(3) as u32,
                unit_price: (100 + 10 * (i % 20)) as f64,
            });
        }
    }

    let n = spec.n_baskets as f64;
    let truth = spec
        .planted
        .iter()
        .map(|r| {
            let natural: f64 = r.antecedent.iter().map(|&a| base[a]).product();
            let pa = r.antecedent_probability;
            GroundTruth {
                antecedent: r.antecedent.iter().map(|&a| codes[a].clone()).collect(),
                consequent: codes[r.consequent].clone(),
                target_confidence: r.target_confidence,
                antecedent_probability: pa,
                expected_antecedent_count: n * (pa + (1.0 - pa) * natural),
                expected_joint_count: n
                    * (pa * r.target_confidence + (1.0 - pa) * natural * base[r.consequent]),
            }
        })
        .collect();

    let grouping = group_into_baskets(&records);
    debug_assert!(grouping.rejected.is_empty());
    Ok(SynthCorpus {
        records,
        baskets: grouping.baskets,
        truth,
    })
}

/// `antecedent;consequent;target_confidence;antecedent_prob`
pub fn write_ground_truth_csv<W: Write>(truth: &[GroundTruth], sink: W) -> Result<(), SynthError> {
    let mut writer = csv::WriterBuilder::new().delimiter(b';').from_writer(sink);
    writer.write_record([
        "antecedent",
        "consequent",
        "target_confidence",
        "antecedent_prob",
    ])?;
    for t in truth {
        writer.write_record([
            t.antecedent.join("|"),
            t.consequent.clone(),
            t.target_confidence.to_string(),
            t.antecedent_probability.to_string(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
