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

use std::path::Path;

use clap::ValueEnum;
use qswitch::circuit::{bind_all, check_simulable, count_resources, simulate, ResourceReport};
use qswitch::permcircuits::{
    build_disposition_circuit, build_n_controlled_swap, build_select_circuit, conditional_target_states,
    control_width, pad_to_power_of_two, run_disposition_coherent, DispositionProgram,
};
use qswitch::qcore::StateVector;
use qswitch::switchnet::{
    build_network, check_all_permutations, diff_against_reference_table, simulate_coherent, uses_per_channel,
    ControlAssignment, Permutation, SwitchNetwork,
};
use qswitch::verify::cross_model_check;
use qswitch::{Circuit64, Error, State64};
use serde_json::{json, Value};

use crate::io::{complex_json, state_json, InputFile, StateSpec, UnitariesFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE_LIMIT: i32 = 3;

/// Full tables are printed up to this N; larger runs report the summary only.
pub const MAX_TABLE_ROWS_N: usize = 6;
pub const MAX_SELECT_N: usize = 1024;
pub const MAX_DISPOSITION_N: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub payload: Value,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Outcome { exit_code: EXIT_OK, payload }
    }

    fn checked(passed: bool, payload: Value) -> Self {
        Outcome { exit_code: if passed { EXIT_OK } else { EXIT_VERIFICATION_FAILED }, payload }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn limit(message: impl Into<String>) -> Self {
        Failure { code: EXIT_RESOURCE_LIMIT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::ResourceLimit(_)) { EXIT_RESOURCE_LIMIT } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(format!("invalid JSON: {e}"))
    }
}

impl From<Failure> for Outcome {
    fn from(f: Failure) -> Self {
        Outcome { exit_code: f.code, payload: json!({ "error": f.message }) }
    }
}

fn finish(r: Result<Outcome, Failure>) -> Outcome {
    r.unwrap_or_else(Outcome::from)
}

fn permutation_json(p: &Permutation) -> Value {
    json!({ "sigma": p.sigma(), "product": p.product_string() })
}

/// Exhaustive permutation table of the switch network for `2 <= N <= 8`.
/// For `N = 3` the table is also diffed against the embedded reference rows.
pub fn cmd_verify_table(n: usize) -> Outcome {
    finish((|| {
        if !(2..=8).contains(&n) {
            return Err(Failure::usage(format!("verify-table needs 2 <= N <= 8, got {n}")));
        }
        let net = build_network(n)?;
        let report = check_all_permutations(&net)?;
        let mut payload = json!({
            "N": n,
            "switches": net.switch_count(),
            "assignments": report.assignments,
            "permutations_total": report.permutations_total,
            "permutations_reached": report.permutations_reached,
            "surjective": report.surjective,
            "multiplicities": report.histogram.iter().map(|(&rank, &count)| {
                let p = Permutation::unrank(n, rank).expect("rank in range");
                json!({ "product": p.product_string(), "sigma": p.sigma(), "count": count })
            }).collect::<Vec<_>>(),
        });
        if n <= MAX_TABLE_ROWS_N {
            let rows: Vec<Value> = (0..report.assignments)
                .map(|b| {
                    let a = ControlAssignment::from_index(&net, b);
                    let p = net.evaluate_index(b).expect("index in range");
                    json!({ "assignment": a.ordered_string(), "sigma": p.sigma(), "product": p.product_string() })
                })
                .collect();
            payload["rows"] = Value::Array(rows);
        } else {
            payload["rows_omitted"] = json!(true);
        }
        let mut passed = report.surjective;
        if n == 3 {
            let diffs = diff_against_reference_table(&net)?;
            passed &= diffs.is_empty();
            payload["reference_table"] = json!({
                "matches": diffs.is_empty(),
                "mismatches": diffs.iter().map(|(bits, expected, got)| {
                    json!({ "assignment": bits, "expected": expected, "got": got })
                }).collect::<Vec<_>>(),
            });
        }
        payload["passed"] = json!(passed);
        Ok(Outcome::checked(passed, payload))
    })())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// Apply one programmed U_i (single select stage).
    Select,
    /// Apply a programmed length-N sequence (N select stages).
    Disposition,
    /// Triangular switch network.
    Switch,
}

fn report_json(r: &ResourceReport) -> Value {
    serde_json::to_value(r).expect("report serialises")
}

fn uniform_uses(r: &ResourceReport, n: usize) -> Option<usize> {
    let first = *r.oracle_uses.get(&0)?;
    (r.oracle_uses.len() == n && r.oracle_uses.values().all(|&u| u == first)).then_some(first)
}

/// Counted resources next to their closed forms.
pub fn cmd_resources(task: Task, n: usize) -> Outcome {
    finish((|| {
        let (counted, closed) = match task {
            Task::Select | Task::Disposition => {
                let width = control_width(n).map_err(|e| Failure::usage(e.to_string()))?;
                let (limit, stages) = if task == Task::Select { (MAX_SELECT_N, 1) } else { (MAX_DISPOSITION_N, n) };
                if n > limit {
                    return Err(Failure::limit(format!("N = {n} exceeds the {task:?} limit of {limit}")));
                }
                let c: Circuit64 = if task == Task::Select { build_select_circuit(width)? } else { build_disposition_circuit(n)? };
                let r = count_resources(&c, true);
                let mut counted = report_json(&r);
                counted["uses_per_channel"] = json!(uniform_uses(&r, n));
                let closed = json!({
                    "cnot_count": 16 * stages * (n - 1),
                    "single_qubit_count": 18 * stages * (n - 1),
                    "controlled_swap_count": 2 * stages * (n - 1),
                    "control_qubits": stages * width,
                    "ancilla_qubits": n - 1,
                    "uses_per_channel": stages,
                });
                (counted, closed)
            }
            Task::Switch => {
                if n < 2 {
                    return Err(Failure::usage(format!("switch networks need N >= 2, got {n}")));
                }
                let net = build_network(n)?;
                let uses = uses_per_channel(&net);
                let per_channel = uses.values().all(|&u| u == 1).then_some(1);
                let counted = json!({
                    "switches": net.switch_count(),
                    "control_qubits": net.switch_count(),
                    "uses_per_channel": per_channel,
                });
                let closed = json!({
                    "switches": n * (n - 1) / 2,
                    "control_qubits": n * (n - 1) / 2,
                    "uses_per_channel": 1,
                });
                (counted, closed)
            }
        };
        let matches = closed
            .as_object()
            .expect("object")
            .iter()
            .all(|(k, v)| counted.get(k) == Some(v));
        let task_name = task.to_possible_value().expect("named").get_name().to_string();
        Ok(Outcome::checked(
            matches,
            json!({ "task": task_name, "N": n, "counted": counted, "closed_form": closed, "match": matches }),
        ))
    })())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Circuit,
    Switch,
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn required(spec: &Option<StateSpec>, field: &str) -> Result<State64, Failure> {
    spec.as_ref()
        .ok_or_else(|| Failure::usage(format!("input file needs a \"{field}\" entry")))?
        .resolve()
        .map_err(Failure::from)
}

fn circuit_branches(joint: &State64, system_wires: usize) -> Result<Value, Failure> {
    let branches = conditional_target_states(joint, system_wires)?;
    Ok(Value::Array(
        branches
            .iter()
            .map(|b| {
                let controls = joint.num_qubits() - system_wires;
                json!({
                    "control": qswitch::qcore::ket_label(b.control_value, controls),
                    "probability": b.probability,
                    "target": b.target.amplitudes().iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
                })
            })
            .collect(),
    ))
}

/// Simulates a circuit-model or switch-model run described by three JSON files.
///
/// Circuit model, by shape of the spec file:
/// * `{"num_qubits", "registers", "gates"}`: raw gate list; input `{"state"}`;
/// * `{"N", "indices"}`: disposition program; input `{"psi"}`;
/// * `{"N"}`: disposition circuit under a coherent control; input `{"psi", "control"}`.
///
/// Switch model: spec is `{"N"}` or a full network export; input `{"psi", "control"}`.
pub fn cmd_simulate(
    model: Model,
    spec_file: &Path,
    unitaries_file: &Path,
    input_file: &Path,
    branches: bool,
    strict: bool,
) -> Outcome {
    finish((|| {
        let spec = read_json(spec_file)?;
        let unitaries: UnitariesFile = serde_json::from_value(read_json(unitaries_file)?)?;
        let input: InputFile = serde_json::from_value(read_json(input_file)?)?;
        match model {
            Model::Circuit => simulate_circuit_model(&spec, &unitaries, &input, branches, strict),
            Model::Switch => simulate_switch_model(&spec, &unitaries, &input, branches),
        }
    })())
}

fn simulate_circuit_model(
    spec: &Value,
    unitaries: &UnitariesFile,
    input: &InputFile,
    branches: bool,
    strict: bool,
) -> Result<Outcome, Failure> {
    if spec.get("gates").is_some() {
        let circuit: Circuit64 = serde_json::from_value(spec.clone())?;
        check_simulable(&circuit)?;
        let state = required(&input.state, "state")?;
        let out = simulate(&circuit, &state, &bind_all(unitaries))?;
        return Ok(Outcome::ok(json!({ "model": "circuit", "state": state_json(&out) })));
    }

    let padded = pad_to_power_of_two(unitaries)?;
    let n_channels = padded.unitaries.len();
    let psi = required(&input.psi, "psi")?;
    let mut payload = json!({
        "model": "circuit",
        "N": n_channels,
        "padded_labels": (padded.original_len..n_channels).collect::<Vec<_>>(),
        "layout": "system wires 0..N (target on wire 0), then control_1..control_N, stage 1 lowest",
    });
    let control = if spec.get("indices").is_some() {
        let program: DispositionProgram = serde_json::from_value(spec.clone())?;
        padded.check_program(&program, strict)?;
        let width = control_width(n_channels)?;
        payload["program"] = serde_json::to_value(&program)?;
        StateVector::basis_state(n_channels * width, program.control_value()?)?
    } else {
        let declared = spec.get("N").and_then(Value::as_u64).ok_or_else(|| {
            Failure::usage("circuit spec needs \"gates\", \"indices\" or \"N\"")
        })?;
        if declared as usize != n_channels && declared as usize != padded.original_len {
            return Err(Failure::usage(format!("spec N = {declared} but {} unitaries given", unitaries.len())));
        }
        required(&input.control, "control")?
    };
    let joint = run_disposition_coherent(&padded.unitaries, &control, &psi)?;
    payload["state"] = state_json(&joint);
    if let Ok(target) = joint.pure_qubit(0) {
        payload["target"] = state_json(&target);
    }
    if branches {
        payload["branches"] = circuit_branches(&joint, n_channels)?;
    }
    Ok(Outcome::ok(payload))
}

fn simulate_switch_model(
    spec: &Value,
    unitaries: &UnitariesFile,
    input: &InputFile,
    branches: bool,
) -> Result<Outcome, Failure> {
    let network: SwitchNetwork = if spec.get("wiring").is_some() {
        serde_json::from_value(spec.clone())?
    } else {
        let n = spec.get("N").and_then(Value::as_u64).ok_or_else(|| Failure::usage("switch spec needs \"N\""))?;
        build_network(n as usize)?
    };
    let psi = required(&input.psi, "psi")?;
    let control = required(&input.control, "control")?;
    let joint = simulate_coherent(&network, unitaries, &control, &psi)?;
    let mut payload = json!({
        "model": "switch",
        "N": network.n_channels(),
        "layout": "target on wire 0; control wire w drives the w-th switch in (k, i) order and sits on wire w+1",
        "control_order": network.control_order().iter().map(|id| format!("{}.{}", id.row, id.col)).collect::<Vec<_>>(),
        "state": state_json(&joint),
    });
    if branches {
        let m = network.switch_count();
        let wires: Vec<usize> = (1..=m).collect();
        let mut out = Vec::new();
        for (b, alpha) in control.support(1e-12) {
            let (prob, target) = joint.condition_on(&wires, b)?;
            let perm = network.evaluate_index(b as u64)?;
            out.push(json!({
                "control": qswitch::qcore::ket_label(b, m),
                "assignment": ControlAssignment::from_index(&network, b as u64).ordered_string(),
                "amplitude": complex_json(alpha),
                "probability": prob,
                "permutation": permutation_json(&perm),
                "target": target.amplitudes().iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            }));
        }
        payload["branches"] = Value::Array(out);
    }
    Ok(Outcome::ok(payload))
}

/// Cross-model equivalence for `N` in {2, 4}.
pub fn cmd_compare(n: usize, trials: usize, seed: u64) -> Outcome {
    finish((|| {
        if n != 2 && n != 4 {
            return Err(Failure::usage(format!(
                "compare runs the circuit model coherently and needs N in {{2, 4}}, got {n}"
            )));
        }
        let report = cross_model_check(n, trials, seed)?;
        let mut payload = serde_json::to_value(&report)?;
        payload["seed"] = json!(seed);
        payload["query_complexity"] = json!({
            "circuit": report.uses_per_channel.circuit,
            "switch": report.uses_per_channel.switch,
        });
        payload["passed"] = json!(report.passed());
        Ok(Outcome::checked(report.passed(), payload))
    })())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    /// n-controlled swap over N system wires.
    Nswap,
    Select,
    Disposition,
    /// Switch network.
    Network,
}

/// Circuit or network JSON for `N` channels.
pub fn cmd_export(what: ExportKind, n: usize) -> Outcome {
    finish((|| {
        let payload = match what {
            ExportKind::Network => {
                if n < 2 {
                    return Err(Failure::usage("switch networks need N >= 2"));
                }
                serde_json::to_value(build_network(n)?)?
            }
            _ => {
                let width = control_width(n).map_err(|e| Failure::usage(e.to_string()))?;
                let limit = if what == ExportKind::Disposition { MAX_DISPOSITION_N } else { MAX_SELECT_N };
                if n > limit {
                    return Err(Failure::limit(format!("N = {n} exceeds the export limit of {limit}")));
                }
                let c: Circuit64 = match what {
                    ExportKind::Nswap => build_n_controlled_swap(width)?,
                    ExportKind::Select => build_select_circuit(width)?,
                    _ => build_disposition_circuit(n)?,
                };
                serde_json::to_value(c)?
            }
        };
        Ok(Outcome::ok(payload))
    })())
}
