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

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use args::Command;
use error::CliError;

fn run() -> Result<(), CliError> {
    let cli = args::parse(std::env::args_os().collect())?;
    let common = match &cli.command {
        Command::Profile(a) => &a.common,
        Command::Mine(a) => &a.common,
        Command::Rules(a) => &a.common,
        Command::Validate(a) => &a.common,
        Command::Graph(a) => &a.common,
        Command::Synth(a) => &a.common,
    };
    if let Some(threads) = common.threads {
        if threads == 0 {
            return Err(error::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(error::usage)?;
    }
    match &cli.command {
        Command::Profile(a) => commands::profile(a),
        Command::Mine(a) => commands::mine(a),
        Command::Rules(a) => commands::rules(a),
        Command::Validate(a) => commands::validate(a),
        Command::Graph(a) => commands::graph(a),
        Command::Synth(a) => commands::synth(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Clap(c) => {
                    let _ = c.print();
                }
                other => eprintln!("{other}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
