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

//! POS ingestion, basket grouping, virtual items and corpus profiling.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{Datelike, NaiveDateTime, Weekday};
use thiserror::Error;

use crate::fmt::percent_half_up;

/// Items starting with this character are virtual (derived attributes).
pub const VIRTUAL_PREFIX: char = '@';

/// The exact header line of a POS CSV file.
pub const POS_HEADER: [&str; 9] = [
    "receipt_id",
    "timestamp",
    "gender",
    "age",
    "item_code",
    "item_name",
    "category",
    "quantity",
    "unit_price",
];

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";
const MAX_AGE: i64 = 130;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line 1: expected header `{}`, found `{found}`", POS_HEADER.join(","))]
    BadHeader { found: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unparsable timestamp `{value}` (want YYYY-MM-DDTHH:MM)")]
    BadTimestamp { line: u64, value: String },
    #[error("line {line}: quantity `{value}` is not a positive integer")]
    BadQuantity { line: u64, value: String },
    #[error("line {line}: unit price `{value}` is not a nonnegative number")]
    BadPrice { line: u64, value: String },
    #[error("line {line}: unknown gender code `{value}` (want F, M or empty)")]
    BadGender { line: u64, value: String },
    #[error("line {line}: age `{value}` is not a nonnegative integer")]
    BadAge { line: u64, value: String },
    #[error("line {line}: field `{field}` must not be empty")]
    EmptyField { line: u64, field: &'static str },
    #[error("line {line}: item code `{code}` uses the reserved `@` prefix")]
    ReservedPrefix { line: u64, code: String },
    #[error("age {0} outside [0, 130]")]
    InvalidAge(i64),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Female,
    Male,
    Unknown,
}

impl Gender {
    pub fn code(self) -> &'static str {
        match self {
            Gender::Female => "F",
            Gender::Male => "M",
            Gender::Unknown => "",
        }
    }
}

/// One line of a POS export.
#[derive(Debug, Clone, PartialEq)]
pub struct PosRecord {
    pub receipt_id: String,
    pub timestamp: NaiveDateTime,
    pub gender: Gender,
    pub age: Option<u32>,
    pub item_code: String,
    pub item_name: String,
    pub category: Option<String>,
    pub quantity: u32,
    pub unit_price: f64,
}

/// One receipt reduced to presence flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basket {
    pub receipt_id: String,
    pub timestamp: NaiveDateTime,
    pub gender: Gender,
    pub age_band: Option<String>,
    pub items: BTreeSet<String>,
    pub virtual_items: BTreeSet<String>,
}

impl Basket {
    /// A basket with no demographics, stamped at midnight on 2024-01-01.
    pub fn new<I, S>(receipt_id: impl Into<String>, items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Basket {
            receipt_id: receipt_id.into(),
            timestamp: chrono::NaiveDate::from_ymd_opt(2024, 1, 1)
                .expect("valid date")
                .and_hms_opt(0, 0, 0)
                .expect("valid time"),
            gender: Gender::Unknown,
            age_band: None,
            items: items.into_iter().map(Into::into).collect(),
            virtual_items: BTreeSet::new(),
        }
    }

    /// Real and virtual items together, as seen by the miner.
    pub fn all_items(&self) -> impl Iterator<Item = &String> {
        self.items.iter().chain(self.virtual_items.iter())
    }

    pub fn contains(&self, item: &str) -> bool {
        self.items.contains(item) || self.virtual_items.contains(item)
    }
}

pub fn is_virtual(item: &str) -> bool {
    item.starts_with(VIRTUAL_PREFIX)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub category: Option<String>,
}

/// Display names and categories by item code. The first record seen for a
/// code defines its entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ItemCatalog {
    entries: BTreeMap<String, CatalogEntry>,
}

impl ItemCatalog {
    pub fn from_records(records: &[PosRecord]) -> Self {
        let mut entries = BTreeMap::new();
        for r in records {
            entries
                .entry(r.item_code.clone())
                .or_insert_with(|| CatalogEntry {
                    name: r.item_name.clone(),
                    category: r.category.clone(),
                });
        }
        ItemCatalog { entries }
    }

    pub fn get(&self, code: &str) -> Option<&CatalogEntry> {
        self.entries.get(code)
    }

    /// Display name for `code`, falling back to the code itself.
    pub fn name<'a>(&'a self, code: &'a str) -> &'a str {
        self.entries.get(code).map_or(code, |e| e.name.as_str())
    }

    pub fn has_category(&self, code: &str) -> bool {
        self.entries.get(code).is_some_and(|e| e.category.is_some())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &CatalogEntry)> {
        self.entries.iter()
    }
}

fn optional(field: &str) -> Option<&str> {
    if field.is_empty() {
        None
    } else {
        Some(field)
    }
}

fn parse_row(row: &csv::StringRecord, line: u64) -> Result<PosRecord, DatasetError> {
    if row.len() != POS_HEADER.len() {
        return Err(DatasetError::ColumnCount {
            line,
            expected: POS_HEADER.len(),
            found: row.len(),
        });
    }
    let required = |idx: usize, field: &'static str| -> Result<String, DatasetError> {
        match &row[idx] {
            "" => Err(DatasetError::EmptyField { line, field }),
            s => Ok(s.to_string()),
        }
    };

    let receipt_id = required(0, "receipt_id")?;
    let timestamp = NaiveDateTime::parse_from_str(&row[1], TIMESTAMP_FORMAT).map_err(|_| {
        DatasetError::BadTimestamp {
            line,
            value: row[1].to_string(),
        }
    })?;
    let gender = match &row[2] {
        "F" => Gender::Female,
        "M" => Gender::Male,
        "" => Gender::Unknown,
        other => {
            return Err(DatasetError::BadGender {
                line,
                value: other.to_string(),
            })
        }
    };
    let age = optional(&row[3])
        .map(|s| {
            s.parse::<u32>().map_err(|_| DatasetError::BadAge {
                line,
                value: s.to_string(),
            })
        })
        .transpose()?;
    let item_code = required(4, "item_code")?;
    if is_virtual(&item_code) {
        return Err(DatasetError::ReservedPrefix {
            line,
            code: item_code,
        });
    }
    let item_name = required(5, "item_name")?;
    let category = optional(&row[6]).map(str::to_string);
    let quantity = match row[7].parse::<i64>() {
        Ok(q) if q >= 1 && q <= u32::MAX as i64 => q as u32,
        _ => {
            return Err(DatasetError::BadQuantity {
                line,
                value: row[7].to_string(),
            })
        }
    };
    let unit_price = match row[8].parse::<f64>() {
        Ok(p) if p.is_finite() && p >= 0.0 => p,
        _ => {
            return Err(DatasetError::BadPrice {
                line,
                value: row[8].to_string(),
            })
        }
    };

    Ok(PosRecord {
        receipt_id,
        timestamp,
        gender,
        age,
        item_code,
        item_name,
        category,
        quantity,
        unit_price,
    })
}

/// Parses a whole POS CSV file. Any bad row fails the entire parse.
pub fn parse_pos_csv<R: Read>(source: R) -> Result<Vec<PosRecord>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut rows = reader.records();

    match rows.next() {
        None => return Ok(Vec::new()),
        Some(header) => {
            let header = header?;
            if header.iter().ne(POS_HEADER.iter().copied()) {
                return Err(DatasetError::BadHeader {
                    found: header.iter().collect::<Vec<_>>().join(","),
                });
            }
        }
    }

    let mut records = Vec::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        records.push(parse_row(&row, line)?);
    }
    Ok(records)
}

/// Writes records in the ingestion format.
pub fn write_pos_csv<W: Write>(records: &[PosRecord], sink: W) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(POS_HEADER)?;
    for r in records {
        let age = r.age.map(|a| a.to_string()).unwrap_or_default();
        let ts = r.timestamp.format(TIMESTAMP_FORMAT).to_string();
        let quantity = r.quantity.to_string();
        let price = r.unit_price.to_string();
        writer.write_record([
            r.receipt_id.as_str(),
            ts.as_str(),
            r.gender.code(),
            age.as_str(),
            r.item_code.as_str(),
            r.item_name.as_str(),
            r.category.as_deref().unwrap_or(""),
            quantity.as_str(),
            price.as_str(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// A receipt dropped during grouping, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedReceipt {
    pub receipt_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Grouping {
    pub baskets: Vec<Basket>,
    pub rejected: Vec<RejectedReceipt>,
}

/// Folds records into one basket per receipt, in order of first appearance.
///
/// Receipt attributes come from its first record. A receipt whose records
/// disagree on gender or age, or whose age is out of range, is rejected.
pub fn group_into_baskets(records: &[PosRecord]) -> Grouping {
    struct Pending<'a> {
        first: &'a PosRecord,
        items: BTreeSet<String>,
        conflict: Option<String>,
    }

    let mut order: Vec<&str> = Vec::new();
    let mut pending: HashMap<&str, Pending> = HashMap::new();
    for r in records {
        let p = pending.entry(r.receipt_id.as_str()).or_insert_with(|| {
            order.push(r.receipt_id.as_str());
            Pending {
                first: r,
                items: BTreeSet::new(),
                conflict: None,
            }
        });
        if p.conflict.is_none() {
            if r.gender != p.first.gender {
                p.conflict = Some(format!(
                    "conflicting gender `{}` vs `{}`",
                    p.first.gender.code(),
                    r.gender.code()
                ));
            } else if r.age != p.first.age {
                p.conflict = Some(format!("conflicting age {:?} vs {:?}", p.first.age, r.age));
            }
        }
        p.items.insert(r.item_code.clone());
    }

    let mut out = Grouping::default();
    for id in order {
        let p = pending.remove(id).expect("receipt recorded in order");
        let age_band = p.first.age.map(|a| discretize_age(a as i64)).transpose();
        let reason = match (p.conflict, age_band) {
            (Some(reason), _) => Some(reason),
            (None, Err(e)) => Some(e.to_string()),
            (None, Ok(age_band)) => {
                out.baskets.push(Basket {
                    receipt_id: id.to_string(),
                    timestamp: p.first.timestamp,
                    gender: p.first.gender,
                    age_band,
                    items: p.items,
                    virtual_items: BTreeSet::new(),
                });
                None
            }
        };
        if let Some(reason) = reason {
            out.rejected.push(RejectedReceipt {
                receipt_id: id.to_string(),
                reason,
            });
        }
    }
    out
}

/// Decade band: 25 -> "20s", 7 -> "0s".
pub fn discretize_age(age: i64) -> Result<String, DatasetError> {
    if !(0..=MAX_AGE).contains(&age) {
        return Err(DatasetError::InvalidAge(age));
    }
    Ok(format!("{}s", age / 10 * 10))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VirtualAttribute {
    Gender,
    DayOfWeek,
    AgeBand,
}

impl FromStr for VirtualAttribute {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "gender" => Ok(VirtualAttribute::Gender),
            "dow" | "day_of_week" => Ok(VirtualAttribute::DayOfWeek),
            "age" | "age_band" => Ok(VirtualAttribute::AgeBand),
            other => Err(DatasetError::UnknownAttribute(other.to_string())),
        }
    }
}

/// Which basket attributes become virtual items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualItemSpec {
    pub attributes: BTreeSet<VirtualAttribute>,
    /// Keep virtual items out of rule consequents.
    pub antecedent_only: bool,
}

impl Default for VirtualItemSpec {
    fn default() -> Self {
        VirtualItemSpec {
            attributes: BTreeSet::new(),
            antecedent_only: true,
        }
    }
}

impl VirtualItemSpec {
    pub fn all() -> Self {
        VirtualItemSpec {
            attributes: [
                VirtualAttribute::Gender,
                VirtualAttribute::DayOfWeek,
                VirtualAttribute::AgeBand,
            ]
            .into(),
            antecedent_only: true,
        }
    }

    /// Parses a comma-separated attribute list such as `gender,dow,age`.
    pub fn parse_list(list: &str) -> Result<Self, DatasetError> {
        let attributes = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()?;
        Ok(VirtualItemSpec {
            attributes,
            antecedent_only: true,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }
}

pub fn weekday_code(day: Weekday) -> &'static str {
    match day {
        Weekday::Mon => "MON",
        Weekday::Tue => "TUE",
        Weekday::Wed => "WED",
        Weekday::Thu => "THU",
        Weekday::Fri => "FRI",
        Weekday::Sat => "SAT",
        Weekday::Sun => "SUN",
    }
}

/// Returns a copy of `basket` with the enabled attributes added as
/// `@gender=…`, `@dow=…` and `@age=…` items. Absent values add nothing.
pub fn derive_virtual_items(basket: &Basket, spec: &VirtualItemSpec) -> Basket {
    let mut out = basket.clone();
    for attr in &spec.attributes {
        let item = match attr {
            VirtualAttribute::Gender => match basket.gender {
                Gender::Unknown => None,
                g => Some(format!("{VIRTUAL_PREFIX}gender={}", g.code())),
            },
            VirtualAttribute::DayOfWeek => Some(format!(
                "{VIRTUAL_PREFIX}dow={}",
                weekday_code(basket.timestamp.weekday())
            )),
            VirtualAttribute::AgeBand => basket
                .age_band
                .as_ref()
                .map(|band| format!("{VIRTUAL_PREFIX}age={band}")),
        };
        if let Some(item) = item {
            out.virtual_items.insert(item);
        }
    }
    out
}

pub fn apply_virtual_items(baskets: &[Basket], spec: &VirtualItemSpec) -> Vec<Basket> {
    if spec.is_empty() {
        return baskets.to_vec();
    }
    baskets
        .iter()
        .map(|b| derive_virtual_items(b, spec))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileAttribute {
    Gender,
    DayOfWeek,
    AgeBand,
    Category,
}

impl ProfileAttribute {
    pub const ALL: [ProfileAttribute; 4] = [
        ProfileAttribute::Gender,
        ProfileAttribute::DayOfWeek,
        ProfileAttribute::AgeBand,
        ProfileAttribute::Category,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileAttribute::Gender => "gender",
            ProfileAttribute::DayOfWeek => "day_of_week",
            ProfileAttribute::AgeBand => "age_band",
            ProfileAttribute::Category => "category",
        }
    }
}

impl FromStr for ProfileAttribute {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProfileAttribute::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| DatasetError::UnknownAttribute(s.to_string()))
    }
}

impl fmt::Display for ProfileAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value's share of a population of `total`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareRow {
    pub value: String,
    pub count: u64,
    pub total: u64,
}

impl ShareRow {
    /// Percentage rendered to two decimals, half-up.
    pub fn percent(&self) -> String {
        percent_half_up(self.count, self.total, 2)
    }

    pub fn fraction(&self) -> f64 {
        self.count as f64 / self.total as f64
    }
}

fn share_rows(counts: BTreeMap<String, u64>, total: u64) -> Vec<ShareRow> {
    let mut rows: Vec<ShareRow> = counts
        .into_iter()
        .map(|(value, count)| ShareRow {
            value,
            count,
            total,
        })
        .collect();
    // BTreeMap order is already value-ascending; stable sort keeps it for ties.
    rows.sort_by_key(|r| std::cmp::Reverse(r.count));
    rows
}

/// Distribution of one attribute over the baskets where it is present.
///
/// For `Category` a basket contributes once per distinct category among its
/// items, and items without a category are skipped; percentages are then
/// shares of all basket/category incidences.
pub fn categorical_profile(
    baskets: &[Basket],
    attribute: ProfileAttribute,
    catalog: &ItemCatalog,
) -> Vec<ShareRow> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut bump = |value: &str| *counts.entry(value.to_string()).or_default() += 1;
    for b in baskets {
        match attribute {
            ProfileAttribute::Gender => {
                if b.gender != Gender::Unknown {
                    bump(b.gender.code());
                }
            }
            ProfileAttribute::DayOfWeek => bump(weekday_code(b.timestamp.weekday())),
            ProfileAttribute::AgeBand => {
                if let Some(band) = &b.age_band {
                    bump(band);
                }
            }
            ProfileAttribute::Category => {
                let categories: BTreeSet<&str> = b
                    .items
                    .iter()
                    .filter_map(|code| catalog.get(code)?.category.as_deref())
                    .collect();
                for c in categories {
                    bump(c);
                }
            }
        }
    }
    let total = counts.values().sum();
    share_rows(counts, total)
}

/// Basket counts per real item, most frequent first.
pub fn frequency_table(baskets: &[Basket]) -> Vec<ShareRow> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for b in baskets {
        for item in &b.items {
            *counts.entry(item.clone()).or_default() += 1;
        }
    }
    share_rows(counts, baskets.len() as u64)
}
