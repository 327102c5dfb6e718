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

#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const HEADER: &str =
    "receipt_id,timestamp,gender,age,item_code,item_name,category,quantity,unit_price";

/// One receipt of the POS fixture format.
pub struct Receipt<'a> {
    pub id: String,
    pub gender: &'a str,
    pub age: Option<u32>,
    pub items: Vec<String>,
}

impl<'a> Receipt<'a> {
    pub fn new(id: impl Into<String>, items: &[&str]) -> Self {
        Receipt {
            id: id.into(),
            gender: "",
            age: None,
            items: items.iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub fn pos_csv(receipts: &[Receipt]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in receipts {
        let age = r.age.map(|a| a.to_string()).unwrap_or_default();
        for item in &r.items {
            writeln!(
                out,
                "{},2024-03-02T10:15,{},{},{item},{item} name,misc,1,1.5",
                r.id, r.gender, age
            )
            .unwrap();
        }
    }
    out
}

pub fn write_fixture(dir: &Path, name: &str, receipts: &[Receipt]) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, pos_csv(receipts)).unwrap();
    path
}

pub fn basketry(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_basketry"))
        .args(args)
        .output()
        .expect("spawn basketry")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = basketry(args);
    assert!(
        out.status.success(),
        "basketry {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
