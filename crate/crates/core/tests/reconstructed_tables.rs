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

//! Fixtures rebuilt from published summary figures. Each corpus size or
//! count vector is first recovered by exhaustive integer search against
//! the printed, rounded values; the library then has to reproduce those
//! values from the constructed corpus.

use basketry::dataset::{categorical_profile, frequency_table, ProfileAttribute};
use basketry::mining::{apriori, BitmapIndex, MinSupport, MiningParams};
use basketry::rules::{
    compute_metrics, generate_rules, write_rules_csv, Rule, RuleGenParams, SupportMode,
};
use basketry::{Basket, Gender, ItemCatalog};

const BRAND_COUNTS: [u64; 8] = [1410, 1027, 495, 79, 69, 64, 62, 56];
const BRAND_PERCENTS: [&str; 8] = [
    "15.26", "11.11", "5.36", "0.85", "0.75", "0.69", "0.67", "0.61",
];

/// Half-up percentage in hundredths, by integer arithmetic only.
fn hundredths(count: u64, n: u64) -> u64 {
    (2 * count * 10_000 + n) / (2 * n)
}

fn printed_hundredths(s: &str) -> u64 {
    let (i, f) = s.split_once('.').unwrap();
    i.parse::<u64>().unwrap() * 100 + f.parse::<u64>().unwrap()
}

#[test]
fn receipt_count_consistent_with_brand_percentages() {
    let consistent: Vec<u64> = (1000..50_000)
        .filter(|&n| {
            BRAND_COUNTS
                .iter()
                .zip(BRAND_PERCENTS)
                .all(|(&c, p)| hundredths(c, n) == printed_hundredths(p))
        })
        .collect();
    assert_eq!(consistent, [9240, 9241, 9242]);
}

fn brand_corpus(n: u64) -> Vec<Basket> {
    (0..n)
        .map(|i| {
            let mut items: Vec<String> = BRAND_COUNTS
                .iter()
                .enumerate()
                .filter(|&(_, &c)| i < c)
                .map(|(b, _)| format!("B{}", b + 1))
                .collect();
            items.push("filler".into());
            Basket::new(format!("R{i}"), items)
        })
        .collect()
}

#[test]
fn brand_frequency_table() {
    let baskets = brand_corpus(9240);
    let rows = frequency_table(&baskets);
    assert_eq!(rows[0].value, "filler");
    let brands: Vec<(String, u64, String)> = rows[1..]
        .iter()
        .map(|r| (r.value.clone(), r.count, r.percent()))
        .collect();
    let expected: Vec<(String, u64, String)> = BRAND_COUNTS
        .iter()
        .zip(BRAND_PERCENTS)
        .enumerate()
        .map(|(b, (&c, p))| (format!("B{}", b + 1), c, p.to_string()))
        .collect();
    assert_eq!(brands, expected);

    let index = BitmapIndex::build(&baskets).unwrap();
    assert_eq!(index.support_count(&["B1"]).unwrap(), 1410);
}

#[test]
fn gender_split() {
    let baskets: Vec<Basket> = (0..10_000)
        .map(|i| {
            let mut b = Basket::new(format!("R{i}"), ["x"]);
            b.gender = if i < 8452 {
                Gender::Female
            } else {
                Gender::Male
            };
            b
        })
        .collect();
    let rows = categorical_profile(&baskets, ProfileAttribute::Gender, &ItemCatalog::default());
    assert_eq!(rows.len(), 2);
    assert_eq!(
        (rows[0].value.as_str(), rows[0].percent()),
        ("F", "84.52".into())
    );
    assert_eq!(
        (rows[1].value.as_str(), rows[1].percent()),
        ("M", "15.48".into())
    );
}

/// (N, joint, |T(C)|) reproducing instances 6, support 0.206 %, confidence
/// 50 % and lift 486.5 under half-up rounding, with support = |T(A)| / N.
fn virtual_rule_solutions() -> Vec<(u64, u64, u64)> {
    let instances = 6u64;
    let mut out = Vec::new();
    for n in 100..20_000u64 {
        // support in thousandths of a percent
        if (2 * instances * 100_000 + n) / (2 * n) != 206 {
            continue;
        }
        for joint in 0..=instances {
            if (2 * joint * 100 + instances) / (2 * instances) != 50 {
                continue;
            }
            for c in joint.max(1)..=n {
                // lift in tenths: joint·N / (instances·c)
                let tenths = (2 * joint * n * 10 + instances * c) / (2 * instances * c);
                if tenths == 4865 {
                    out.push((n, joint, c));
                }
            }
        }
    }
    out
}

fn virtual_rule_corpus() -> Vec<Basket> {
    (0..2919)
        .map(|i| {
            let items: &[&str] = match i {
                0..=2 => &["A", "C"],
                3..=5 => &["A"],
                _ => &["X"],
            };
            Basket::new(format!("R{i}"), items.iter().copied())
        })
        .collect()
}

#[test]
fn virtual_rule_row_has_a_unique_integer_solution() {
    assert_eq!(virtual_rule_solutions(), [(2919, 3, 3)]);
}

#[test]
fn virtual_rule_row_metrics() {
    let index = BitmapIndex::build(&virtual_rule_corpus()).unwrap();
    let rule = Rule::new(["A"], "C").unwrap();
    let m = compute_metrics(&rule, &index, SupportMode::Antecedent).unwrap();
    assert_eq!(m.instances(), 6);
    assert_eq!(m.support_display(), "0.206");
    assert_eq!(m.confidence_display(), "50");
    assert!((m.lift - 486.5).abs() <= 0.05, "{}", m.lift);
    assert_eq!(m.lift_display(), "486.5");

    let table = apriori(
        &index,
        &MiningParams {
            min_support: MinSupport::Count(3),
            max_len: 3,
        },
    )
    .unwrap();
    let rules = generate_rules(&table, &index, &RuleGenParams::default()).unwrap();
    let mut csv = Vec::new();
    write_rules_csv(&rules, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(
        text.lines().any(|l| l.starts_with("C;A;6;0.206;50;486.5;")),
        "{text}"
    );
}
