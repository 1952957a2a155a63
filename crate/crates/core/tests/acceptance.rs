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

//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex;
use qswitch::circuit::{count_resources, lower_controlled_swaps, simulate, Circuit, OracleBindings};
use qswitch::permcircuits::{
    build_disposition_circuit, build_n_controlled_swap, build_select_circuit, conditional_target_states,
    run_disposition, run_disposition_coherent, run_select, DispositionProgram,
};
use qswitch::qcore::{product_in_order, StateVector};
use qswitch::switchnet::{
    build_network, check_all_permutations, factorial, permutation_table, simulate_coherent, uses_per_channel,
    ControlAssignment, Permutation, TABLE_N3,
};
use qswitch::verify::{dense_circuit_matrix, enumerate_dispositions};
use rand::Rng;

use common::{haar_set, random_circuit, random_qubit, random_state, rng};

/// One seed for every randomised criterion.
const SUITE_SEED: u64 = 20_100_405;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table_one() -> Outcome {
    let net = build_network(3).map_err(|e| e.to_string())?;
    let table = permutation_table(&net).map_err(|e| e.to_string())?;
    ensure(table.len() == 8, || format!("{} rows", table.len()))?;
    let mut matched = 0;
    for (index, got) in table.rows() {
        let bits = ControlAssignment::from_index(&net, index).ordered_string();
        let (_, product) = TABLE_N3
            .iter()
            .find(|(b, _)| *b == bits)
            .ok_or_else(|| format!("assignment {bits} missing from reference"))?;
        let expected = Permutation::from_product_string(product).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("{bits}: expected {product}, got {}", got.product_string()))?;
        matched += 1;
    }
    let report = check_all_permutations(&net).map_err(|e| e.to_string())?;
    ensure(report.multiplicities() == vec![2, 2, 1, 1, 1, 1], || {
        format!("multiplicities {:?}", report.multiplicities())
    })?;
    Ok(format!("{matched}/8 rows exact, 6 permutations, multiplicities [2,2,1,1,1,1]"))
}

fn switch_counts() -> Outcome {
    for n in 2..=12 {
        let count = build_network(n).map_err(|e| e.to_string())?.switch_count();
        ensure(count == n * (n - 1) / 2, || format!("N = {n}: {count} switches"))?;
    }
    Ok("N(N-1)/2 switches for N = 2..12".into())
}

fn surjectivity() -> Outcome {
    let mut details = Vec::new();
    for n in 2..=6 {
        let r = check_all_permutations(&build_network(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(r.surjective && r.permutations_reached == factorial(n), || {
            format!("N = {n}: {} of {} permutations", r.permutations_reached, r.permutations_total)
        })?;
        details.push(format!("N={n}: {}/{} via {}", r.permutations_reached, r.permutations_total, r.assignments));
    }
    Ok(details.join(", "))
}

fn resource_formulas() -> Outcome {
    for big_n in [2usize, 4, 8, 16] {
        let n = big_n.trailing_zeros() as usize;
        let log_n = n;

        let swap: Circuit<f64> = build_n_controlled_swap(n).map_err(|e| e.to_string())?;
        let cs = count_resources(&swap, false).controlled_swap_count;
        ensure(cs == big_n - 1, || format!("N = {big_n}: n-controlled swap uses {cs} controlled swaps"))?;
        if big_n == 8 {
            ensure(cs == 7, || "N = 8 must use 7 controlled swaps".into())?;
        }

        let select: Circuit<f64> = build_select_circuit(n).map_err(|e| e.to_string())?;
        for report in [count_resources(&select, true), count_resources(&lower_controlled_swaps(&select), true)] {
            ensure(report.cnot_count == 16 * (big_n - 1), || {
                format!("select N = {big_n}: {} CNOTs", report.cnot_count)
            })?;
            ensure(report.single_qubit_count == 18 * (big_n - 1), || {
                format!("select N = {big_n}: {} single-qubit gates", report.single_qubit_count)
            })?;
        }

        let disp: Circuit<f64> = build_disposition_circuit(big_n).map_err(|e| e.to_string())?;
        for report in [count_resources(&disp, true), count_resources(&lower_controlled_swaps(&disp), true)] {
            ensure(report.cnot_count == 16 * big_n * (big_n - 1), || {
                format!("disposition N = {big_n}: {} CNOTs", report.cnot_count)
            })?;
            ensure(report.single_qubit_count == 18 * big_n * (big_n - 1), || {
                format!("disposition N = {big_n}: {} single-qubit gates", report.single_qubit_count)
            })?;
            ensure(report.control_qubits == big_n * log_n, || {
                format!("disposition N = {big_n}: {} control qubits", report.control_qubits)
            })?;
            ensure(report.ancilla_qubits == big_n - 1, || {
                format!("disposition N = {big_n}: {} ancillas", report.ancilla_qubits)
            })?;
        }
    }
    Ok("16(N-1)/18(N-1), 16N(N-1)/18N(N-1), N log N controls, N-1 ancillas, N-1 cswaps for N in {2,4,8,16}".into())
}

fn select_correctness() -> Outcome {
    let mut r = rng(SUITE_SEED);
    let mut max_err = 0.0f64;
    let mut cases = 0;
    for big_n in [2usize, 4, 8] {
        for _ in 0..20 {
            let us = haar_set(r.gen(), big_n);
            let psi = random_qubit(&mut r);
            for i in 0..big_n {
                let got = run_select(&us, i, &psi).map_err(|e| e.to_string())?;
                let expected = us[i].apply(&psi).map_err(|e| e.to_string())?;
                max_err = max_err.max(got.max_abs_diff_up_to_phase(&expected).map_err(|e| e.to_string())?);
                cases += 1;
            }
        }
    }
    ensure(max_err <= 1e-9, || format!("max amplitude error {max_err:e}"))?;
    Ok(format!("{cases} cases, max amplitude error {max_err:.2e}"))
}

fn disposition_correctness() -> Outcome {
    let mut r = rng(SUITE_SEED + 1);
    let mut max_err = 0.0f64;
    let mut check = |us: &[qswitch::Unitary64], indices: Vec<usize>, psi: &StateVector<f64>| -> Result<(), String> {
        let expected = product_in_order(us, &indices).map_err(|e| e.to_string())?.apply(psi).map_err(|e| e.to_string())?;
        let program = DispositionProgram::new(us.len(), indices).map_err(|e| e.to_string())?;
        let got = run_disposition(us, &program, psi).map_err(|e| e.to_string())?;
        max_err = max_err.max(got.max_abs_diff_up_to_phase(&expected).map_err(|e| e.to_string())?);
        Ok(())
    };
    for big_n in [2usize, 4] {
        for _ in 0..100 {
            let us = haar_set(r.gen(), big_n);
            let psi = random_qubit(&mut r);
            let indices = (0..big_n).map(|_| r.gen_range(0..big_n)).collect();
            check(&us, indices, &psi)?;
        }
    }
    let us = haar_set(r.gen(), 2);
    let psi = random_qubit(&mut r);
    for order in enumerate_dispositions(2).map_err(|e| e.to_string())? {
        check(&us, order, &psi)?;
    }
    ensure(max_err <= 1e-9, || format!("max amplitude error {max_err:e}"))?;
    Ok(format!("200 random programs + 4 exhaustive N=2, max amplitude error {max_err:.2e}"))
}

fn coherent_parallelism() -> Outcome {
    let mut r = rng(SUITE_SEED + 2);
    let us = haar_set(r.gen(), 2);
    let psi = random_qubit(&mut r);
    // (|01> + |10>)/sqrt2 over (C_2, C_1), C_1 on the low wire
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let control = StateVector::from_amplitudes(vec![
        Complex::new(0.0, 0.0),
        Complex::new(h, 0.0),
        Complex::new(h, 0.0),
        Complex::new(0.0, 0.0),
    ])
    .map_err(|e| e.to_string())?;
    let joint = run_disposition_coherent(&us, &control, &psi).map_err(|e| e.to_string())?;
    ensure(joint.num_qubits() == 4, || format!("joint state has {} qubits", joint.num_qubits()))?;
    let branches = conditional_target_states(&joint, 2).map_err(|e| e.to_string())?;
    ensure(branches.len() == 2, || format!("{} branches", branches.len()))?;
    let u01 = (us[0] * us[1]).apply(&psi).map_err(|e| e.to_string())?;
    let u10 = (us[1] * us[0]).apply(&psi).map_err(|e| e.to_string())?;
    let mut max_err = 0.0f64;
    for b in &branches {
        let expected = match b.control_value {
            0b01 => &u01,
            0b10 => &u10,
            other => return Err(format!("unexpected branch {other:02b}")),
        };
        ensure((b.probability - 0.5).abs() <= 1e-9, || format!("branch probability {}", b.probability))?;
        max_err = max_err.max(b.target.max_abs_diff_up_to_phase(expected).map_err(|e| e.to_string())?);
    }
    ensure(max_err <= 1e-9, || format!("max amplitude error {max_err:e}"))?;
    // the ancilla wire keeps a branch-dependent residue, so the full joint
    // state is returned untraced
    let residue = |value: usize| -> Result<StateVector<f64>, String> {
        let (_, sys) = joint.condition_on(&[2, 3], value).map_err(|e| e.to_string())?;
        sys.pure_qubit(1).map_err(|e| e.to_string())
    };
    let overlap = qswitch::qcore::fidelity(&residue(0b01)?, &residue(0b10)?).map_err(|e| e.to_string())?;
    Ok(format!(
        "branch |01> -> U0U1psi, |10> -> U1U0psi, max error {max_err:.2e}; ancilla residue overlap {overlap:.4}"
    ))
}

fn coherent_switch() -> Outcome {
    let mut r = rng(SUITE_SEED + 3);
    let net = build_network(3).map_err(|e| e.to_string())?;
    let us = haar_set(r.gen(), 3);
    let psi = random_qubit(&mut r);
    let control = StateVector::from_ket_label("+++").map_err(|e| e.to_string())?;
    let out = simulate_coherent(&net, &us, &control, &psi).map_err(|e| e.to_string())?;

    let amp = 1.0 / 8f64.sqrt();
    let mut expected = vec![Complex::new(0.0, 0.0); 16];
    for b in 0..8u64 {
        let sigma = qswitch::switchnet::evaluate(&net, &ControlAssignment::from_index(&net, b)).map_err(|e| e.to_string())?;
        let z = product_in_order(&us, sigma.as_order()).map_err(|e| e.to_string())?.apply(&psi).map_err(|e| e.to_string())?;
        expected[(b as usize) << 1] = z.amplitude(0) * amp;
        expected[(b as usize) << 1 | 1] = z.amplitude(1) * amp;
    }
    let expected = StateVector::from_amplitudes(expected).map_err(|e| e.to_string())?;
    let err = out.max_abs_diff(&expected).map_err(|e| e.to_string())?;
    ensure(err <= 1e-10, || format!("max amplitude error {err:e}"))?;
    Ok(format!("|+>^3 control, max amplitude error {err:.2e}"))
}

fn query_contrast() -> Outcome {
    for big_n in [2usize, 4, 8] {
        let disp: Circuit<f64> = build_disposition_circuit(big_n).map_err(|e| e.to_string())?;
        let uses = count_resources(&disp, false).oracle_uses;
        ensure(uses.len() == big_n && uses.values().all(|&u| u == big_n), || {
            format!("circuit N = {big_n}: {uses:?}")
        })?;
        let sw = uses_per_channel(&build_network(big_n).map_err(|e| e.to_string())?);
        ensure(sw.len() == big_n && sw.values().all(|&u| u == 1), || format!("switch N = {big_n}: {sw:?}"))?;
    }
    Ok("circuit model N uses per channel, switch network 1, for N in {2,4,8}".into())
}

fn dense_oracle() -> Outcome {
    let mut r = rng(SUITE_SEED + 4);
    let mut max_err = 0.0f64;
    for _ in 0..200 {
        let q = r.gen_range(1..=6);
        let len = r.gen_range(0..=30);
        let c = random_circuit(&mut r, q, len);
        let s = random_state(&mut r, q);
        let fast = simulate(&c, &s, &OracleBindings::new()).map_err(|e| e.to_string())?;
        let slow = dense_circuit_matrix(&c, &OracleBindings::new())
            .map_err(|e| e.to_string())?
            .apply(&s)
            .map_err(|e| e.to_string())?;
        for (a, b) in fast.amplitudes().iter().zip(&slow) {
            max_err = max_err.max((a - b).norm());
        }
    }
    ensure(max_err <= 1e-10, || format!("max error {max_err:e}"))?;
    Ok(format!("200 circuits, max error {max_err:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("AC1 table reproduction (N=3)", Duration::from_secs(1), table_one),
        ("AC2 switch counts", Duration::from_secs(1), switch_counts),
        ("AC3 surjectivity N=2..6", Duration::from_secs(10), surjectivity),
        ("AC4 resource formulas", Duration::from_secs(1), resource_formulas),
        ("AC5 select correctness", Duration::from_secs(30), select_correctness),
        ("AC6 disposition correctness", Duration::from_secs(30), disposition_correctness),
        ("AC7 coherent parallelism (N=2)", Duration::from_secs(1), coherent_parallelism),
        ("AC8 coherent switch (N=3)", Duration::from_secs(1), coherent_switch),
        ("AC9 query-complexity contrast", Duration::from_secs(1), query_contrast),
        ("AC10 dense-matrix oracle agreement", Duration::from_secs(60), dense_oracle),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= budget {
                Ok(d)
            } else {
                Err(format!("{d}; took {elapsed:?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail} ({elapsed:.2?})"),
            Err(reason) => {
                failed += 1;
                println!("[FAIL] {name}: {reason} ({elapsed:.2?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
