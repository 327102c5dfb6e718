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

//! Command-line surface and `key = value` config-file merging.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "basketry",
    version,
    about = "Market-basket mining over POS receipts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Item frequencies and categorical profiles.
    Profile(ProfileArgs),
    /// Frequent itemsets as `items;count` CSV.
    Mine(MineArgs),
    /// Association rules ranked by each measure.
    Rules(RulesArgs),
    /// Train/holdout validation and rule triage.
    Validate(ValidateArgs),
    /// Co-occurrence graph as DOT plus an edge list.
    Graph(GraphArgs),
    /// Synthetic corpus with planted rules.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// POS CSV file(s).
    #[arg(long, value_name = "FILE")]
    pub input: Vec<PathBuf>,
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads (outputs do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MiningOpts {
    /// Integer count (`5`) or fraction of baskets (`0.01`).
    #[arg(long, default_value = "0.01")]
    pub min_support: String,
    #[arg(long, default_value_t = 3)]
    pub max_len: usize,
    /// Virtual items to inject, e.g. `gender,dow,age`.
    #[arg(long = "virtual", value_name = "ATTRS")]
    pub virtual_items: Option<String>,
}

#[derive(Debug, Args)]
pub struct RuleOpts {
    #[arg(long, default_value_t = 0.5)]
    pub min_confidence: f64,
    /// `antecedent` or `joint`.
    #[arg(long, default_value = "antecedent")]
    pub support_mode: String,
    /// Order of the main rules file.
    #[arg(long, default_value = "confidence")]
    pub rank_by: String,
    /// Keep only this many rules under `--rank-by`.
    #[arg(long)]
    pub max_rules: Option<usize>,
    /// Allow virtual items as consequents.
    #[arg(long)]
    pub virtual_consequents: bool,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub mining: MiningOpts,
    /// Mine with the brute-force reference miner instead of Apriori.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub mining: MiningOpts,
    #[command(flatten)]
    pub rules: RuleOpts,
    /// Rows in each per-measure file.
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub mining: MiningOpts,
    #[command(flatten)]
    pub rules: RuleOpts,
    /// Fraction of receipts held out.
    #[arg(long, default_value_t = 0.3)]
    pub holdout: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest confidence drop still counted as stable.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Known associations, one `a|b => c` pattern per line.
    #[arg(long, value_name = "FILE")]
    pub known: Option<PathBuf>,
    /// Label overrides, one `label: a|b => c` per line.
    #[arg(long, value_name = "FILE")]
    pub annotations: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 5)]
    pub floor_instances: u64,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "virtual", value_name = "ATTRS")]
    pub virtual_items: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub min_pair_count: u64,
    /// `count`, `support` or `lift`.
    #[arg(long, default_value = "lift")]
    pub weight: String,
    /// Both thresholds or neither (terciles).
    #[arg(long, requires = "t_strong")]
    pub t_weak: Option<f64>,
    #[arg(long, requires = "t_weak")]
    pub t_strong: Option<f64>,
    #[arg(long)]
    pub include_virtual: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: Common,
    /// TOML generator spec; the built-in planted-rule corpus when absent.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    /// Overrides the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        let arg = arg.to_string_lossy();
        if arg == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(path) = arg.strip_prefix("--config=") {
            return Some(PathBuf::from(path));
        }
    }
    None
}

/// Turns `key = value` lines into long flags. `true`/`false` values toggle
/// boolean flags; `#` starts a comment.
pub fn config_flags(text: &str) -> Result<Vec<(String, Option<String>)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", n + 1))
        })?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        match value.trim() {
            "true" => out.push((flag, None)),
            "false" => {}
            v => out.push((flag, Some(v.to_string()))),
        }
    }
    Ok(out)
}

/// Parses argv, filling flags the user did not pass from `--config`.
pub fn parse(argv: Vec<OsString>) -> Result<Cli, CliError> {
    let mut argv = argv;
    if let Some(path) = config_path(&argv) {
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let given: Vec<String> = argv
            .iter()
            .map(|a| {
                a.to_string_lossy()
                    .split('=')
                    .next()
                    .unwrap_or("")
                    .to_string()
            })
            .collect();
        for (flag, value) in config_flags(&text)? {
            if given.contains(&flag) {
                continue;
            }
            argv.push(flag.into());
            if let Some(v) = value {
                argv.push(v.into());
            }
        }
    }
    Cli::try_parse_from(argv).map_err(CliError::Clap)
}
