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

//! One function per subcommand. Each writes plain CSV/DOT files into the
//! output directory and a short summary to stdout.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use basketry::dataset::{
    apply_virtual_items, categorical_profile, frequency_table, group_into_baskets, parse_pos_csv,
    write_pos_csv, ProfileAttribute, ShareRow,
};
use basketry::evaluation::{
    parse_annotations, parse_patterns, split_baskets, triage, validate_rules, write_triage_csv,
    write_validation_csv, SplitSpec, TriageThresholds,
};
use basketry::mining::{apriori, brute_force_frequent, FrequentItemsetTable};
use basketry::multiweb::{
    build_multiweb, classify_edges, export_dot, write_edges_csv, MultiwebOptions,
};
use basketry::rules::{generate_rules, rank_rules, write_rules_csv, Measure, ScoredRule};
use basketry::synth::{generate, write_ground_truth_csv, SynthSpec};
use basketry::{
    Basket, BitmapIndex, ItemCatalog, MinSupport, MiningParams, RuleGenParams, VirtualItemSpec,
};

use crate::args::{
    Common, GraphArgs, MineArgs, MiningOpts, ProfileArgs, RuleOpts, RulesArgs, SynthArgs,
    ValidateArgs,
};
use crate::error::{usage, CliError};

type Result<T> = std::result::Result<T, CliError>;

struct Corpus {
    baskets: Vec<Basket>,
    catalog: ItemCatalog,
}

fn load(common: &Common) -> Result<Corpus> {
    if common.input.is_empty() {
        return Err(usage("--input is required"));
    }
    let mut records = Vec::new();
    for path in &common.input {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let recs = parse_pos_csv(file).with_context(|| format!("{}", path.display()))?;
        records.extend(recs);
    }
    let grouping = group_into_baskets(&records);
    for r in &grouping.rejected {
        eprintln!("rejected receipt {}: {}", r.receipt_id, r.reason);
    }
    if grouping.baskets.is_empty() {
        return Err(anyhow::anyhow!("no baskets").into());
    }
    Ok(Corpus {
        baskets: grouping.baskets,
        catalog: ItemCatalog::from_records(&records),
    })
}

fn out_file(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn finish(path: PathBuf, mut w: BufWriter<File>) -> Result<()> {
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_csv<F>(dir: &Path, name: &str, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> anyhow::Result<()>,
{
    let (path, mut w) = out_file(dir, name)?;
    body(&mut w).with_context(|| format!("cannot write {}", path.display()))?;
    finish(path, w)
}

fn virtual_spec(list: &Option<String>, antecedent_only: bool) -> Result<VirtualItemSpec> {
    let mut spec = match list {
        Some(l) => VirtualItemSpec::parse_list(l).map_err(usage)?,
        None => VirtualItemSpec::default(),
    };
    spec.antecedent_only = antecedent_only;
    Ok(spec)
}

fn mining_params(opts: &MiningOpts) -> Result<MiningParams> {
    let min_support: MinSupport = opts.min_support.parse().map_err(usage)?;
    // Validate eagerly so bad values are usage errors, not data errors.
    min_support.threshold(1).map_err(usage)?;
    if opts.max_len == 0 {
        return Err(usage("--max-len must be at least 1"));
    }
    Ok(MiningParams {
        min_support,
        max_len: opts.max_len,
    })
}

fn rule_params(opts: &RuleOpts) -> Result<RuleGenParams> {
    let params = RuleGenParams {
        min_confidence: opts.min_confidence,
        support_mode: opts.support_mode.parse().map_err(usage)?,
        virtual_antecedent_only: !opts.virtual_consequents,
        rank_by: opts.rank_by.parse().map_err(usage)?,
        max_rules: opts.max_rules,
    };
    params.validate().map_err(usage)?;
    Ok(params)
}

fn write_share_rows(
    w: &mut impl Write,
    rows: &[ShareRow],
    catalog: Option<&ItemCatalog>,
) -> anyhow::Result<()> {
    let mut writer = csv_writer(w);
    match catalog {
        Some(_) => writer.write_record(["item", "name", "count", "percent"])?,
        None => writer.write_record(["value", "count", "percent"])?,
    }
    for r in rows {
        let count = r.count.to_string();
        let percent = r.percent();
        match catalog {
            Some(c) => writer.write_record([&r.value, c.name(&r.value), &count, &percent])?,
            None => writer.write_record([&r.value, &count, &percent])?,
        }
    }
    writer.flush()?;
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().delimiter(b';').from_writer(w)
}

pub fn profile(args: &ProfileArgs) -> Result<()> {
    let corpus = load(&args.common)?;
    let dir = &args.common.out_dir;
    let freq = frequency_table(&corpus.baskets);
    write_csv(dir, "frequency.csv", |w| {
        write_share_rows(w, &freq, Some(&corpus.catalog))
    })?;
    for attr in ProfileAttribute::ALL {
        let rows = categorical_profile(&corpus.baskets, attr, &corpus.catalog);
        write_csv(dir, &format!("profile_{}.csv", attr.name()), |w| {
            write_share_rows(w, &rows, None)
        })?;
    }
    println!("{} baskets, {} items", corpus.baskets.len(), freq.len());
    Ok(())
}

fn mine_table(
    baskets: &[Basket],
    params: &MiningParams,
) -> Result<(BitmapIndex, FrequentItemsetTable)> {
    let index = BitmapIndex::build(baskets).context("indexing baskets")?;
    let table = apriori(&index, params).map_err(usage)?;
    Ok((index, table))
}

pub fn mine(args: &MineArgs) -> Result<()> {
    let params = mining_params(&args.mining)?;
    let spec = virtual_spec(&args.mining.virtual_items, true)?;
    let corpus = load(&args.common)?;
    let baskets = apply_virtual_items(&corpus.baskets, &spec);
    let table = if args.oracle {
        brute_force_frequent(&baskets, &params).context("brute-force oracle")?
    } else {
        mine_table(&baskets, &params)?.1
    };
    write_csv(&args.common.out_dir, "itemsets.csv", |w| {
        Ok(table.write_csv(w)?)
    })?;
    println!(
        "{} frequent itemsets over {} baskets",
        table.len(),
        baskets.len()
    );
    Ok(())
}

fn mine_rules(
    baskets: &[Basket],
    mining: &MiningOpts,
    rules: &RuleOpts,
) -> Result<(BitmapIndex, Vec<ScoredRule>)> {
    let params = mining_params(mining)?;
    let rparams = rule_params(rules)?;
    let spec = virtual_spec(&mining.virtual_items, rparams.virtual_antecedent_only)?;
    let baskets = apply_virtual_items(baskets, &spec);
    let (index, table) = mine_table(&baskets, &params)?;
    let scored = generate_rules(&table, &index, &rparams).context("generating rules")?;
    Ok((index, scored))
}

pub fn rules(args: &RulesArgs) -> Result<()> {
    // Parse everything before touching the input.
    mining_params(&args.mining)?;
    rule_params(&args.rules)?;
    let corpus = load(&args.common)?;
    let (_, scored) = mine_rules(&corpus.baskets, &args.mining, &args.rules)?;
    let dir = &args.common.out_dir;
    write_csv(dir, "rules.csv", |w| Ok(write_rules_csv(&scored, w)?))?;
    for measure in Measure::ALL {
        let top = rank_rules(&scored, measure, args.top_k);
        write_csv(dir, &format!("rules_top_{}.csv", measure.name()), |w| {
            Ok(write_rules_csv(&top, w)?)
        })?;
    }
    println!("{} rules", scored.len());
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?)
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    mining_params(&args.mining)?;
    rule_params(&args.rules)?;
    if args.delta.is_nan() || args.delta < 0.0 {
        return Err(usage("--delta must be nonnegative"));
    }
    if !(0.0..1.0).contains(&args.holdout) || args.holdout == 0.0 {
        return Err(usage("--holdout must lie in (0, 1)"));
    }
    let known = match &args.known {
        Some(p) => parse_patterns(&read_text(p)?).map_err(usage)?,
        None => Vec::new(),
    };
    let annotations = match &args.annotations {
        Some(p) => parse_annotations(&read_text(p)?).map_err(usage)?,
        None => Vec::new(),
    };

    let corpus = load(&args.common)?;
    let split = split_baskets(
        &corpus.baskets,
        &SplitSpec {
            holdout_fraction: args.holdout,
            seed: args.seed,
        },
    )
    .context("splitting baskets")?;
    let (_, scored) = mine_rules(&split.train, &args.mining, &args.rules)?;
    let spec = virtual_spec(&args.mining.virtual_items, true)?;
    let holdout = apply_virtual_items(&split.holdout, &spec);
    let report = validate_rules(&scored, &holdout, args.delta).context("validating rules")?;
    let thresholds = TriageThresholds {
        epsilon: args.epsilon,
        floor_instances: args.floor_instances,
    };
    let triaged = triage(&scored, &known, &thresholds, &annotations);

    let dir = &args.common.out_dir;
    write_csv(dir, "validation.csv", |w| {
        Ok(write_validation_csv(&report, w)?)
    })?;
    write_csv(dir, "triage.csv", |w| Ok(write_triage_csv(&triaged, w)?))?;
    println!(
        "split {} train / {} holdout; {} stable, {} unstable, {} unsupported",
        split.train.len(),
        split.holdout.len(),
        report.summary.stable,
        report.summary.unstable,
        report.summary.unsupported
    );
    Ok(())
}

pub fn graph(args: &GraphArgs) -> Result<()> {
    let opts = MultiwebOptions {
        min_pair_count: args.min_pair_count,
        weight_metric: args.weight.parse().map_err(usage)?,
        include_virtual: args.include_virtual,
    };
    if opts.min_pair_count == 0 {
        return Err(usage("--min-pair-count must be at least 1"));
    }
    let thresholds = args.t_weak.zip(args.t_strong);
    if let Some((w, s)) = thresholds {
        if w >= s {
            return Err(usage("--t-weak must be below --t-strong"));
        }
    }
    let spec = virtual_spec(&args.virtual_items, true)?;
    let corpus = load(&args.common)?;
    let baskets = apply_virtual_items(&corpus.baskets, &spec);
    let index = BitmapIndex::build(&baskets).context("indexing baskets")?;
    let mut graph = build_multiweb(&index, &opts).map_err(usage)?;
    graph.label_with(&corpus.catalog);
    let graph = classify_edges(&graph, thresholds).map_err(usage)?;

    let dir = &args.common.out_dir;
    write_csv(dir, "multiweb.dot", |w| {
        Ok(w.write_all(export_dot(&graph).as_bytes())?)
    })?;
    write_csv(dir, "edges.csv", |w| Ok(write_edges_csv(&graph, w)?))?;
    println!("{} nodes, {} edges", graph.nodes.len(), graph.edges.len());
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let mut spec = match &args.spec {
        Some(path) => toml::from_str::<SynthSpec>(&read_text(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => SynthSpec::planted_demo(0),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    spec.validate().map_err(usage)?;
    let corpus = generate(&spec).context("generating corpus")?;
    if corpus.baskets.is_empty() {
        return Err(anyhow::anyhow!("generator produced no baskets").into());
    }
    let dir = &args.common.out_dir;
    write_csv(dir, "corpus.csv", |w| {
        Ok(write_pos_csv(&corpus.records, w)?)
    })?;
    write_csv(dir, "ground_truth.csv", |w| {
        Ok(write_ground_truth_csv(&corpus.truth, w)?)
    })?;
    println!(
        "{} baskets, {} records, {} planted rules",
        corpus.baskets.len(),
        corpus.records.len(),
        corpus.truth.len()
    );
    Ok(())
}
