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

//! Market-basket mining over point-of-sale receipts.
//!
//! The pipeline runs in the order the modules are listed:
//!
//! * [`dataset`] parses POS CSV, groups records into baskets, injects
//!   virtual items and profiles the corpus.
//! * [`mining`] builds a vertical bitmap index and mines frequent itemsets
//!   with Apriori (plus a brute-force oracle).
//! * [`rules`] turns frequent itemsets into single-consequent rules scored
//!   by support, confidence, lift, J-measure and MDL.
//! * [`evaluation`] splits baskets into train/holdout, re-checks rule
//!   confidence and suggests triage labels.
//! * [`multiweb`] builds the item co-occurrence graph and exports DOT.
//! * [`synth`] generates corpora with planted rules for testing.

pub mod dataset;
pub mod evaluation;
pub mod fmt;
pub mod mining;
pub mod multiweb;
pub mod rules;
pub mod synth;

mod bitmap;

pub use dataset::{
    Basket, Gender, ItemCatalog, PosRecord, VirtualAttribute, VirtualItemSpec, VIRTUAL_PREFIX,
};
pub use mining::{BitmapIndex, FrequentItemsetTable, ItemId, Itemset, MinSupport, MiningParams};
pub use rules::{Measure, Rule, RuleGenParams, RuleMetrics, ScoredRule, SupportMode};
