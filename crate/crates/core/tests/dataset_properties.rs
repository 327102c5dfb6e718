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

use basketry::dataset::{
    categorical_profile, derive_virtual_items, frequency_table, group_into_baskets, parse_pos_csv,
    write_pos_csv, Gender, PosRecord, ProfileAttribute, VirtualAttribute, VirtualItemSpec,
};
use basketry::ItemCatalog;
use chrono::NaiveDate;
use proptest::prelude::*;

fn record() -> impl Strategy<Value = PosRecord> {
    (
        0u8..30,
        0u32..14,
        prop_oneof![
            Just(Gender::Female),
            Just(Gender::Male),
            Just(Gender::Unknown)
        ],
        prop::option::of(0u32..100),
        0u8..15,
        prop::option::of(0u8..4),
        1u32..5,
    )
        .prop_map(
            |(receipt, day, gender, age, item, category, quantity)| PosRecord {
                receipt_id: format!("R{receipt}"),
                timestamp: NaiveDate::from_ymd_opt(2024, 1, 1 + day)
                    .unwrap()
                    .and_hms_opt(10, 30, 0)
                    .unwrap(),
                gender,
                age,
                item_code: format!("I{item}"),
                item_name: format!("Item {item}"),
                category: category.map(|c| format!("C{c}")),
                quantity,
                unit_price: 120.0,
            },
        )
}

/// Records sharing per-receipt demographics so no receipt is rejected.
fn consistent_records() -> impl Strategy<Value = Vec<PosRecord>> {
    prop::collection::vec(record(), 1..200).prop_map(|mut recs| {
        let firsts: Vec<PosRecord> = recs.clone();
        for r in &mut recs {
            let first = firsts
                .iter()
                .find(|f| f.receipt_id == r.receipt_id)
                .unwrap();
            r.gender = first.gender;
            r.age = first.age;
            r.timestamp = first.timestamp;
            // one catalog entry per code
            r.category = (!r.item_code.ends_with('9')).then(|| format!("C{}", &r.item_code[1..]));
        }
        recs
    })
}

proptest! {
    #[test]
    fn one_basket_per_accepted_receipt(recs in prop::collection::vec(record(), 0..200)) {
        let g = group_into_baskets(&recs);
        let distinct: BTreeSet<&str> = recs.iter().map(|r| r.receipt_id.as_str()).collect();
        prop_assert_eq!(g.baskets.len() + g.rejected.len(), distinct.len());
        let ids: BTreeSet<&str> = g.baskets.iter().map(|b| b.receipt_id.as_str()).collect();
        prop_assert_eq!(ids.len(), g.baskets.len());
        for b in &g.baskets {
            prop_assert!(!b.items.is_empty());
            prop_assert!(b.virtual_items.is_empty());
            prop_assert!(b.items.iter().all(|i| !i.starts_with('@')));
        }
    }

    #[test]
    fn csv_round_trip(recs in consistent_records()) {
        let mut buf = Vec::new();
        write_pos_csv(&recs, &mut buf).unwrap();
        prop_assert_eq!(parse_pos_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn virtual_items_are_idempotent_and_disjoint(
        recs in consistent_records(),
        attrs in prop::collection::btree_set(
            prop_oneof![
                Just(VirtualAttribute::Gender),
                Just(VirtualAttribute::DayOfWeek),
                Just(VirtualAttribute::AgeBand)
            ],
            0..=3,
        ),
    ) {
        let spec = VirtualItemSpec { attributes: attrs, antecedent_only: true };
        for b in group_into_baskets(&recs).baskets {
            let once = derive_virtual_items(&b, &spec);
            prop_assert_eq!(&derive_virtual_items(&once, &spec), &once);
            prop_assert!(once.virtual_items.iter().all(|v| v.starts_with('@')));
            prop_assert!(once.items.is_disjoint(&once.virtual_items));
            prop_assert_eq!(&once.items, &b.items);
        }
    }

    #[test]
    fn profiles_partition_their_population(recs in consistent_records()) {
        let baskets = group_into_baskets(&recs).baskets;
        let catalog = ItemCatalog::from_records(&recs);
        for attr in ProfileAttribute::ALL {
            let rows = categorical_profile(&baskets, attr, &catalog);
            let total: u64 = rows.iter().map(|r| r.count).sum();
            prop_assert!(rows.iter().all(|r| r.total == total));
            let present = match attr {
                ProfileAttribute::Gender => baskets.iter().filter(|b| b.gender != Gender::Unknown).count() as u64,
                ProfileAttribute::AgeBand => baskets.iter().filter(|b| b.age_band.is_some()).count() as u64,
                ProfileAttribute::DayOfWeek => baskets.len() as u64,
                ProfileAttribute::Category => total,
            };
            prop_assert_eq!(total, present);
            for w in rows.windows(2) {
                prop_assert!(w[0].count > w[1].count || (w[0].count == w[1].count && w[0].value < w[1].value));
            }
        }
    }

    #[test]
    fn frequency_counts_match_membership(recs in consistent_records()) {
        let baskets = group_into_baskets(&recs).baskets;
        let rows = frequency_table(&baskets);
        for r in &rows {
            let scan = baskets.iter().filter(|b| b.items.contains(&r.value)).count() as u64;
            prop_assert_eq!(r.count, scan);
            prop_assert_eq!(r.total, baskets.len() as u64);
        }
        let distinct: BTreeSet<&String> = baskets.iter().flat_map(|b| &b.items).collect();
        prop_assert_eq!(rows.len(), distinct.len());
    }
}
