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

use std::collections::BTreeSet;

use basketry::mining::BitmapIndex;
use basketry::rules::{compute_metrics, mdl_bits, Rule, RuleCounts, SupportMode};
use proptest::prelude::*;

fn corpus() -> impl Strategy<Value = Vec<BTreeSet<u8>>> {
    prop::collection::vec(prop::collection::btree_set(0u8..6, 1..=6), 2..=60)
}

fn rule_shape() -> impl Strategy<Value = (BTreeSet<u8>, u8)> {
    (prop::collection::btree_set(0u8..6, 1..=2), 0u8..6)
        .prop_filter("consequent outside antecedent", |(a, c)| !a.contains(c))
}

fn name(x: u8) -> String {
    format!("I{x}")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metric_laws(rows in corpus(), (ante, cons) in rule_shape()) {
        let index = BitmapIndex::from_transactions(rows.iter().map(|r| r.iter().map(|&x| name(x)))).unwrap();
        let rule = Rule::new(ante.iter().map(|&x| name(x)), name(cons)).unwrap();
        let Ok(m) = compute_metrics(&rule, &index, SupportMode::Antecedent) else {
            // antecedent or consequent absent from this corpus
            return Ok(());
        };
        let RuleCounts { n_baskets: n, instances, joint, consequent_count: c, .. } = m.counts;

        // Brute-force the counts.
        let has_all = |r: &BTreeSet<u8>, xs: &BTreeSet<u8>| xs.iter().all(|x| r.contains(x));
        prop_assert_eq!(instances, rows.iter().filter(|r| has_all(r, &ante)).count() as u64);
        prop_assert_eq!(joint, rows.iter().filter(|r| has_all(r, &ante) && r.contains(&cons)).count() as u64);
        prop_assert_eq!(c, rows.iter().filter(|r| r.contains(&cons)).count() as u64);

        // confidence·|T(A)| = |T(A∪C)|
        prop_assert!((m.confidence_pct / 100.0 * instances as f64 - joint as f64).abs() < 1e-9);
        prop_assert!(instances >= joint);
        prop_assert!((0.0..=100.0).contains(&m.confidence_pct));
        prop_assert!(m.lift >= 0.0);

        // J ≥ 0, and J = 0 exactly when joint·N = |T(A)|·|T(C)|.
        prop_assert!(m.j_measure_bits >= 0.0, "J = {}", m.j_measure_bits);
        let independent = joint * n == instances * c;
        prop_assert_eq!(m.j_measure_bits == 0.0, independent);
        if independent {
            prop_assert_eq!(m.lift, 1.0);
        }

        // Pairwise lift symmetry.
        if ante.len() == 1 {
            let a = *ante.iter().next().unwrap();
            let back = Rule::new([name(cons)], name(a)).unwrap();
            let mb = compute_metrics(&back, &index, SupportMode::Antecedent).unwrap();
            prop_assert_eq!(m.lift, mb.lift);
        }
    }

    #[test]
    fn mdl_grows_with_exceptions(m in 2u64..2000, k in 1u64..4, instances in 1u64..500) {
        let k = k.min(m - 1);
        let mut last = mdl_bits(m, k, instances, 0);
        prop_assert!(last > 0.0);
        for e in 1..=instances / 2 {
            let bits = mdl_bits(m, k, instances, e);
            prop_assert!(bits > last, "e={} bits={} last={}", e, bits, last);
            last = bits;
        }
    }
}
