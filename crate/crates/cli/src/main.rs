// Copyright 2026 The qswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use qswitch_cli::commands::{ExportKind, Model, Task};
use qswitch_cli::{cmd_compare, cmd_export, cmd_resources, cmd_simulate, cmd_verify_table, Outcome};

/// Circuit-model and quantum-switch constructions for programmable orderings
/// of unitary channels. Every command prints one JSON document.
///
/// Exit codes: 0 success, 1 verification failure, 2 usage or input error,
/// 3 resource limit.
#[derive(Debug, Parser)]
#[command(name = "qswitch", version)]
struct Cli {
    /// Write the JSON payload here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate every control assignment of the N-channel switch network.
    VerifyTable {
        #[arg(long)]
        n: usize,
    },
    /// Count gates, qubits and oracle uses and compare with the closed forms.
    Resources {
        #[arg(long, value_enum)]
        task: Task,
        #[arg(long)]
        n: usize,
    },
    /// Simulate a circuit-model or switch-model run.
    Simulate {
        #[arg(long, value_enum)]
        model: Model,
        /// Circuit, program or network JSON.
        #[arg(long)]
        spec: PathBuf,
        /// JSON array of 2x2 unitaries, label j at index j.
        #[arg(long)]
        unitaries: PathBuf,
        /// Input states: {"psi", "control"} or {"state"}.
        #[arg(long)]
        input: PathBuf,
        /// Also report the target state conditioned on each control branch.
        #[arg(long)]
        branches: bool,
        /// Reject programs that select identity padding labels.
        #[arg(long)]
        strict: bool,
    },
    /// Check both models against each other on random unitaries and orderings.
    Compare {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Emit circuit or network JSON.
    Export {
        #[arg(long, value_enum)]
        what: ExportKind,
        #[arg(long)]
        n: usize,
    },
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::VerifyTable { n } => cmd_verify_table(*n),
        Command::Resources { task, n } => cmd_resources(*task, *n),
        Command::Simulate { model, spec, unitaries, input, branches, strict } => {
            cmd_simulate(*model, spec, unitaries, input, *branches, *strict)
        }
        Command::Compare { n, trials, seed } => cmd_compare(*n, *trials, *seed),
        Command::Export { what, n } => cmd_export(*what, *n),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&outcome.payload)? + "\n";
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if let Err(e) = emit(&cli, &outcome) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if let Some(msg) = outcome.payload.get("error").and_then(|m| m.as_str()) {
        eprintln!("error: {msg}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
