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

//! Vertical bitmap index and level-wise Apriori.
//!
//! Every item (real or virtual) gets one presence bitmap over the baskets,
//! so the support of an itemset is the popcount of the AND of its members'
//! bitmaps. Item ids are positions in the ascending item order, which means
//! comparing id vectors orders itemsets the same way as comparing names.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::bitmap::Bitmap;
use crate::dataset::{is_virtual, Basket};

pub type ItemId = u32;

/// Largest universe `brute_force_frequent` accepts.
pub const ORACLE_ITEM_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("no baskets to index")]
    EmptyCorpus,
    #[error("unknown item `{0}`")]
    UnknownItem(String),
    #[error("invalid minimum support: {0}")]
    InvalidSupport(String),
    #[error("max_len must be at least 1")]
    InvalidMaxLen,
    #[error("itemsets of mixed sizes passed to candidate generation")]
    MixedSizes,
    #[error("brute-force oracle limited to {limit} distinct items, corpus has {found}")]
    TooManyItems { found: usize, limit: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Sorted, duplicate-free, nonempty set of item ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    pub fn new(items: impl IntoIterator<Item = ItemId>) -> Self {
        let mut items: Vec<ItemId> = items.into_iter().collect();
        items.sort_unstable();
        items.dedup();
        assert!(!items.is_empty(), "itemsets are nonempty");
        Itemset(items)
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The itemset with the member at `pos` removed, or `None` for a
    /// singleton.
    pub fn without(&self, pos: usize) -> Option<Itemset> {
        if self.0.len() < 2 {
            return None;
        }
        let mut items = self.0.clone();
        items.remove(pos);
        Some(Itemset(items))
    }

    fn prefix(&self) -> &[ItemId] {
        &self.0[..self.0.len() - 1]
    }
}

impl From<&[ItemId]> for Itemset {
    fn from(items: &[ItemId]) -> Self {
        Itemset::new(items.iter().copied())
    }
}

/// Item-by-basket presence matrix stored column-major.
#[derive(Debug, Clone)]
pub struct BitmapIndex {
    n_baskets: usize,
    items: Arc<[String]>,
    lookup: HashMap<String, ItemId>,
    bitmaps: Vec<Bitmap>,
}

impl BitmapIndex {
    /// Indexes baskets, treating virtual items as ordinary columns.
    pub fn build(baskets: &[Basket]) -> Result<Self, MiningError> {
        Self::from_transactions(baskets.iter().map(|b| b.all_items()))
    }

    /// Indexes arbitrary transactions given as item-name iterators.
    pub fn from_transactions<T, I, S>(transactions: T) -> Result<Self, MiningError>
    where
        T: IntoIterator<Item = I>,
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let rows: Vec<BTreeSet<String>> = transactions
            .into_iter()
            .map(|t| t.into_iter().map(|s| s.as_ref().to_string()).collect())
            .collect();
        if rows.is_empty() {
            return Err(MiningError::EmptyCorpus);
        }
        let universe: BTreeSet<&String> = rows.iter().flatten().collect();
        let items: Arc<[String]> = universe.into_iter().cloned().collect();
        let lookup: HashMap<String, ItemId> = items
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as ItemId))
            .collect();
        let mut bitmaps = vec![Bitmap::new(rows.len()); items.len()];
        for (row, t) in rows.iter().enumerate() {
            for item in t {
                bitmaps[lookup[item] as usize].set(row);
            }
        }
        Ok(BitmapIndex {
            n_baskets: rows.len(),
            items,
            lookup,
            bitmaps,
        })
    }

    pub fn n_baskets(&self) -> usize {
        self.n_baskets
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    /// Item names in ascending order; position is the item id.
    pub fn item_order(&self) -> &[String] {
        &self.items
    }

    pub fn item_name(&self, id: ItemId) -> &str {
        &self.items[id as usize]
    }

    pub fn item_id(&self, name: &str) -> Option<ItemId> {
        self.lookup.get(name).copied()
    }

    pub fn is_virtual(&self, id: ItemId) -> bool {
        is_virtual(self.item_name(id))
    }

    /// Number of baskets containing the item.
    pub fn item_count(&self, id: ItemId) -> u64 {
        self.bitmaps[id as usize].count_ones()
    }

    /// Resolves names to an itemset of ids.
    pub fn itemset<S: AsRef<str>>(&self, names: &[S]) -> Result<Itemset, MiningError> {
        let ids = names
            .iter()
            .map(|n| {
                self.item_id(n.as_ref())
                    .ok_or_else(|| MiningError::UnknownItem(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Itemset::new(ids))
    }

    pub fn names(&self, itemset: &Itemset) -> Vec<String> {
        itemset
            .items()
            .iter()
            .map(|&id| self.item_name(id).to_string())
            .collect()
    }

    /// Number of baskets containing every named item.
    pub fn support_count<S: AsRef<str>>(&self, names: &[S]) -> Result<u64, MiningError> {
        Ok(self.count(&self.itemset(names)?))
    }

    /// Like [`support_count`](Self::support_count) but an item the index has
    /// never seen simply contributes zero baskets.
    pub fn support_count_lenient<S: AsRef<str>>(&self, names: &[S]) -> u64 {
        match self.itemset(names) {
            Ok(set) => self.count(&set),
            Err(_) => 0,
        }
    }

    /// Popcount of the AND of the members' bitmaps.
    pub fn count(&self, itemset: &Itemset) -> u64 {
        match itemset.items() {
            [] => self.n_baskets as u64,
            [a] => self.item_count(*a),
            [a, b] => self.bitmaps[*a as usize].and_count(&self.bitmaps[*b as usize]),
            [first, rest @ .., last] => {
                let mut acc = self.bitmaps[*first as usize].clone();
                for &id in rest {
                    acc.and_assign(&self.bitmaps[id as usize]);
                }
                acc.and_count(&self.bitmaps[*last as usize])
            }
        }
    }

    pub(crate) fn pair_count(&self, a: ItemId, b: ItemId) -> u64 {
        self.bitmaps[a as usize].and_count(&self.bitmaps[b as usize])
    }

    fn prefix_bitmap(&self, prefix: &[ItemId]) -> Bitmap {
        let mut acc = self.bitmaps[prefix[0] as usize].clone();
        for &id in &prefix[1..] {
            acc.and_assign(&self.bitmaps[id as usize]);
        }
        acc
    }
}

/// Minimum support as an absolute basket count or a fraction of baskets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinSupport {
    Count(u64),
    Fraction(f64),
}

impl MinSupport {
    /// Absolute threshold for a corpus of `n_baskets`. Fractions round up.
    pub fn threshold(self, n_baskets: usize) -> Result<u64, MiningError> {
        match self {
            MinSupport::Count(0) => Err(MiningError::InvalidSupport(
                "count must be at least 1".into(),
            )),
            MinSupport::Count(c) => Ok(c),
            MinSupport::Fraction(f) if !(f > 0.0 && f <= 1.0) => Err(MiningError::InvalidSupport(
                format!("fraction {f} outside (0, 1]"),
            )),
            MinSupport::Fraction(f) => {
                let exact = f * n_baskets as f64;
                // f·n that lands on an integer up to float noise is that integer.
                let nearest = exact.round();
                let t = if (exact - nearest).abs() < 1e-9 {
                    nearest
                } else {
                    exact.ceil()
                };
                Ok((t as u64).max(1))
            }
        }
    }
}

impl FromStr for MinSupport {
    type Err = MiningError;

    /// Integers are counts (`5`); anything with a fraction part is a
    /// proportion (`0.05`, `1.0`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(c) = s.parse::<u64>() {
            return Ok(MinSupport::Count(c));
        }
        s.parse::<f64>()
            .map(MinSupport::Fraction)
            .map_err(|_| MiningError::InvalidSupport(format!("cannot parse `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    pub min_support: MinSupport,
    /// Largest itemset size mined.
    pub max_len: usize,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            min_support: MinSupport::Fraction(0.01),
            max_len: 3,
        }
    }
}

impl MiningParams {
    fn resolve(&self, n_baskets: usize) -> Result<u64, MiningError> {
        if self.max_len == 0 {
            return Err(MiningError::InvalidMaxLen);
        }
        self.min_support.threshold(n_baskets)
    }
}

/// Frequent itemsets with their basket counts, grouped by size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequentItemsetTable {
    items: Arc<[String]>,
    n_baskets: usize,
    /// `levels[k - 1]` holds the frequent itemsets of size `k`.
    levels: Vec<BTreeMap<Itemset, u64>>,
}

impl FrequentItemsetTable {
    pub fn n_baskets(&self) -> usize {
        self.n_baskets
    }

    /// The item universe the ids refer to.
    pub fn item_order(&self) -> &[String] {
        &self.items
    }

    pub fn get(&self, itemset: &Itemset) -> Option<u64> {
        self.levels.get(itemset.len() - 1)?.get(itemset).copied()
    }

    pub fn level(&self, size: usize) -> impl Iterator<Item = (&Itemset, u64)> {
        size.checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .into_iter()
            .flat_map(|m| m.iter().map(|(k, &v)| (k, v)))
    }

    /// All entries, smaller itemsets first, then by item order.
    pub fn iter(&self) -> impl Iterator<Item = (&Itemset, u64)> {
        self.levels
            .iter()
            .flat_map(|m| m.iter().map(|(k, &v)| (k, v)))
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_size(&self) -> usize {
        self.levels
            .iter()
            .rposition(|m| !m.is_empty())
            .map_or(0, |i| i + 1)
    }

    pub fn names(&self, itemset: &Itemset) -> Vec<&str> {
        itemset
            .items()
            .iter()
            .map(|&id| self.items[id as usize].as_str())
            .collect()
    }

    /// Entries keyed by item names, independent of id assignment.
    pub fn to_named(&self) -> BTreeMap<Vec<String>, u64> {
        self.iter()
            .map(|(set, c)| (self.names(set).into_iter().map(String::from).collect(), c))
            .collect()
    }

    /// Writes `items;count` rows, items joined by `|`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), MiningError> {
        let mut writer = csv::WriterBuilder::new().delimiter(b';').from_writer(sink);
        writer.write_record(["items", "count"])?;
        for (set, count) in self.iter() {
            writer.write_record([self.names(set).join("|"), count.to_string()])?;
        }
        writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    fn from_levels(
        items: Arc<[String]>,
        n_baskets: usize,
        mut levels: Vec<BTreeMap<Itemset, u64>>,
    ) -> Self {
        while levels.last().is_some_and(BTreeMap::is_empty) {
            levels.pop();
        }
        FrequentItemsetTable {
            items,
            n_baskets,
            levels,
        }
    }
}

/// Apriori join of size-`k` itemsets sharing a `k-1` prefix, followed by
/// removal of any candidate with an infrequent `k`-subset.
pub fn candidate_join_prune(frequent_k: &[Itemset]) -> Result<Vec<Itemset>, MiningError> {
    let Some(first) = frequent_k.first() else {
        return Ok(Vec::new());
    };
    if frequent_k.iter().any(|s| s.len() != first.len()) {
        return Err(MiningError::MixedSizes);
    }
    let mut sorted = frequent_k.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(join_prune_sorted(&sorted))
}

fn join_prune_sorted(sorted: &[Itemset]) -> Vec<Itemset> {
    let mut out = Vec::new();
    for (i, a) in sorted.iter().enumerate() {
        for b in sorted[i + 1..]
            .iter()
            .take_while(|b| b.prefix() == a.prefix())
        {
            let mut items = a.0.clone();
            items.push(*b.0.last().expect("nonempty"));
            let candidate = Itemset(items);
            // The two subsets dropping either of the last two members are a and b.
            let k = candidate.len();
            let all_frequent = (0..k.saturating_sub(2)).all(|pos| {
                let sub = candidate.without(pos).expect("size >= 2");
                sorted.binary_search(&sub).is_ok()
            });
            if all_frequent {
                out.push(candidate);
            }
        }
    }
    out
}

/// Level-wise Apriori over the bitmap index.
///
/// Candidates of each level are counted in parallel, one task per block of
/// candidates sharing a prefix; the prefix AND is computed once per block.
/// Results are collected in candidate order, so the output does not depend
/// on the number of worker threads.
pub fn apriori(
    index: &BitmapIndex,
    params: &MiningParams,
) -> Result<FrequentItemsetTable, MiningError> {
    let min = params.resolve(index.n_baskets())?;

    let singles: BTreeMap<Itemset, u64> = (0..index.n_items() as ItemId)
        .map(|id| (Itemset(vec![id]), index.item_count(id)))
        .filter(|&(_, c)| c >= min)
        .collect();
    let mut levels = vec![singles];

    while levels.len() < params.max_len {
        let prev: Vec<Itemset> = levels.last().expect("level 1").keys().cloned().collect();
        let candidates = join_prune_sorted(&prev);
        if candidates.is_empty() {
            break;
        }
        let blocks: Vec<&[Itemset]> = candidates
            .chunk_by(|a, b| a.prefix() == b.prefix())
            .collect();
        let counted: Vec<(Itemset, u64)> = blocks
            .par_iter()
            .flat_map_iter(|block| {
                let prefix = index.prefix_bitmap(block[0].prefix());
                block.iter().map(move |c| {
                    let last = *c.0.last().expect("nonempty");
                    (c.clone(), prefix.and_count(&index.bitmaps[last as usize]))
                })
            })
            .collect();
        let next: BTreeMap<Itemset, u64> = counted.into_iter().filter(|&(_, c)| c >= min).collect();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }

    Ok(FrequentItemsetTable::from_levels(
        index.items.clone(),
        index.n_baskets(),
        levels,
    ))
}

/// Reference miner: enumerates every itemset up to `max_len` over the
/// distinct items and counts each by scanning the baskets directly.
pub fn brute_force_frequent(
    baskets: &[Basket],
    params: &MiningParams,
) -> Result<FrequentItemsetTable, MiningError> {
    if baskets.is_empty() {
        return Err(MiningError::EmptyCorpus);
    }
    let universe: BTreeSet<&String> = baskets.iter().flat_map(Basket::all_items).collect();
    if universe.len() > ORACLE_ITEM_LIMIT {
        return Err(MiningError::TooManyItems {
            found: universe.len(),
            limit: ORACLE_ITEM_LIMIT,
        });
    }
    let min = params.resolve(baskets.len())?;
    let items: Arc<[String]> = universe.into_iter().cloned().collect();
    let n = items.len();

    let mut levels = Vec::new();
    for k in 1..=params.max_len.min(n) {
        let mut level = BTreeMap::new();
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let count = baskets
                .iter()
                .filter(|b| combo.iter().all(|&i| b.contains(&items[i])))
                .count() as u64;
            if count >= min {
                level.insert(Itemset(combo.iter().map(|&i| i as ItemId).collect()), count);
            }
            // Advance to the next k-combination in lexicographic order.
            let Some(pos) = (0..k).rev().find(|&p| combo[p] < n - k + p) else {
                break;
            };
            combo[pos] += 1;
            for p in pos + 1..k {
                combo[p] = combo[p - 1] + 1;
            }
        }
        levels.push(level);
    }

    Ok(FrequentItemsetTable::from_levels(
        items,
        baskets.len(),
        levels,
    ))
}
