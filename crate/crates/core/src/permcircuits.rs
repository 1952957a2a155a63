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

//! Circuit-model constructions: the n-controlled swap, the select circuit that
//! applies `U_i` for a programmed `i`, and the disposition circuit that chains
//! `N` select stages.
//!
//! Wire layout: system wires `0..N` come first (wire 0 carries the target
//! qubit, wires `1..N` are ancillas prepared in `|0>`), followed by the
//! control registers. Inside a control register, wire `j` holds bit `j` of the
//! programmed index.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::circuit::{invert, simulate, bind_all, Circuit, Gate, CONTROL_PREFIX, SYSTEM_REGISTER};
use crate::error::{domain, Error, Result};
use crate::qcore::{BitString, StateVector, Unitary2};
use crate::scalar::Scalar;

/// One bisection layer of the n-controlled swap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingStep {
    pub step_index: usize,
    pub control_wire: usize,
    pub swap_pairs: Vec<(usize, usize)>,
}

/// `log2(n_channels)` when it is a power of two `>= 2`.
pub fn control_width(n_channels: usize) -> Result<usize> {
    if n_channels < 2 || !n_channels.is_power_of_two() {
        return domain(format!("circuit constructions need N = 2^n >= 2, got {n_channels}"));
    }
    Ok(n_channels.trailing_zeros() as usize)
}

/// Layers of the n-controlled swap for a control register starting at
/// `control_base`. Step `k` is driven by bit `n-1-k` of the control value and
/// swaps system wire `[s]_k 0 [0]` with `[s]_k 1 [0]` for every k-bit `s`.
pub fn routing_steps(n: usize, control_base: usize) -> Vec<RoutingStep> {
    (0..n)
        .map(|k| {
            let tail = BitString::zeros(n - k - 1);
            let swap_pairs = (0..1usize << k)
                .map(|s| {
                    let prefix = BitString::from_value(s, k).expect("s < 2^k");
                    let a = prefix.clone().push(false).concat(&tail);
                    let b = prefix.push(true).concat(&tail);
                    (a.value(), b.value())
                })
                .collect();
            RoutingStep { step_index: k, control_wire: control_base + (n - 1 - k), swap_pairs }
        })
        .collect()
}

fn n_controlled_swap_gates<T: Scalar>(n: usize, control_base: usize) -> Vec<Gate<T>> {
    routing_steps(n, control_base)
        .into_iter()
        .flat_map(|step| {
            let c = step.control_wire;
            step.swap_pairs.into_iter().map(move |(a, b)| Gate::cswap(c, a, b))
        })
        .collect()
}

fn register_layout<T: Scalar>(n_channels: usize, control_registers: &[(String, usize)]) -> Result<Circuit<T>> {
    let total = n_channels + control_registers.iter().map(|(_, w)| w).sum::<usize>();
    let mut c = Circuit::new(total);
    c.add_register(SYSTEM_REGISTER, 0..n_channels)?;
    let mut base = n_channels;
    for (name, width) in control_registers {
        c.add_register(name.clone(), base..base + width)?;
        base += width;
    }
    Ok(c)
}

/// n-controlled swap over `N = 2^n` system wires and an `n`-wire control
/// register. For control value `i` it moves the content of wire 0 to wire `i`.
pub fn build_n_controlled_swap<T: Scalar>(n: usize) -> Result<Circuit<T>> {
    if n < 1 {
        return domain("the n-controlled swap needs n >= 1");
    }
    let big_n = 1usize << n;
    let mut c = register_layout(big_n, &[(CONTROL_PREFIX.to_string(), n)])?;
    c.extend(n_controlled_swap_gates(n, big_n))?;
    Ok(c)
}

fn append_select_stage<T: Scalar>(circuit: &mut Circuit<T>, n: usize, control_base: usize) -> Result<()> {
    let big_n = 1usize << n;
    let mut swap = Circuit::new(circuit.num_qubits());
    swap.extend(n_controlled_swap_gates(n, control_base))?;
    circuit.extend(swap.gates().iter().cloned())?;
    circuit.extend((0..big_n).map(|j| Gate::oracle(j, j)))?;
    circuit.extend(invert(&swap)?.gates().iter().cloned())
}

/// `S`, then `OracleCall(j)` on system wire `j` for every `j`, then `S^-1`.
pub fn build_select_circuit<T: Scalar>(n: usize) -> Result<Circuit<T>> {
    if n < 1 {
        return domain("the select circuit needs n >= 1");
    }
    let big_n = 1usize << n;
    let mut c = register_layout(big_n, &[(CONTROL_PREFIX.to_string(), n)])?;
    append_select_stage(&mut c, n, big_n)?;
    Ok(c)
}

/// Name of the control register of stage `t` (1-based, `t = 1` acts first).
pub fn stage_register_name(t: usize) -> String {
    format!("{CONTROL_PREFIX}_{t}")
}

/// `N` select stages sharing one system register; stage `t` reads its own
/// control register `control_t`.
pub fn build_disposition_circuit<T: Scalar>(n_channels: usize) -> Result<Circuit<T>> {
    let n = control_width(n_channels)?;
    let regs: Vec<_> = (1..=n_channels).map(|t| (stage_register_name(t), n)).collect();
    let mut c = register_layout(n_channels, &regs)?;
    for t in 0..n_channels {
        append_select_stage(&mut c, n, n_channels + t * n)?;
    }
    Ok(c)
}

/// Programmed disposition: stage `t` applies `U_{indices[t]}`, `indices[0]` first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DispositionProgram {
    #[serde(rename = "N")]
    n_channels: usize,
    indices: Vec<usize>,
}

impl DispositionProgram {
    pub fn new(n_channels: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.len() != n_channels {
            return domain(format!("program has {} entries, expected N = {n_channels}", indices.len()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n_channels) {
            return domain(format!("program index {bad} out of range for N = {n_channels}"));
        }
        Ok(DispositionProgram { n_channels, indices })
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Joint value of all control registers, stage 1 in the lowest bits.
    pub fn control_value(&self) -> Result<usize> {
        let n = control_width(self.n_channels)?;
        Ok(self.indices.iter().enumerate().fold(0, |acc, (t, &i)| acc | i << (t * n)))
    }
}

impl<'de> Deserialize<'de> for DispositionProgram {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[serde(rename = "N")]
            n_channels: usize,
            indices: Vec<usize>,
        }
        let r = Repr::deserialize(deserializer)?;
        DispositionProgram::new(r.n_channels, r.indices).map_err(D::Error::custom)
    }
}

/// `|psi> (x) |0>^{N-1}` on the system register, optionally below a control state.
fn system_input<T: Scalar>(n_channels: usize, psi: &StateVector<T>) -> Result<StateVector<T>> {
    if psi.num_qubits() != 1 {
        return domain(format!("psi must be a single qubit, got {} qubits", psi.num_qubits()));
    }
    StateVector::tensor(&StateVector::basis_state(n_channels - 1, 0)?, psi)
}

/// Output of the select circuit on wire 0 for control value `i`: `U_i |psi>`,
/// up to the canonical global phase.
pub fn run_select<T: Scalar>(
    unitaries: &[Unitary2<T>],
    i: usize,
    psi: &StateVector<T>,
) -> Result<StateVector<T>> {
    let n = control_width(unitaries.len())?;
    if i >= unitaries.len() {
        return domain(format!("select index {i} out of range for N = {}", unitaries.len()));
    }
    let circuit = build_select_circuit(n)?;
    let input = StateVector::tensor(&StateVector::basis_state(n, i)?, &system_input(unitaries.len(), psi)?)?;
    let out = simulate(&circuit, &input, &bind_all(unitaries))?;
    out.pure_qubit(0)
}

/// Wire-0 output of the disposition circuit for a classical program:
/// `U_{i_N} ... U_{i_1} |psi>`, up to the canonical global phase.
pub fn run_disposition<T: Scalar>(
    unitaries: &[Unitary2<T>],
    program: &DispositionProgram,
    psi: &StateVector<T>,
) -> Result<StateVector<T>> {
    if program.n_channels() != unitaries.len() {
        return domain(format!(
            "program is for N = {}, got {} unitaries",
            program.n_channels(),
            unitaries.len()
        ));
    }
    let n = control_width(unitaries.len())?;
    let controls = StateVector::basis_state(unitaries.len() * n, program.control_value()?)?;
    let out = run_disposition_coherent(unitaries, &controls, psi)?;
    out.pure_qubit(0)
}

/// Full joint output (system register in the low wires, control registers
/// above it) for an arbitrary control state. Nothing is traced out: the
/// ancilla wires keep their branch-dependent residues.
pub fn run_disposition_coherent<T: Scalar>(
    unitaries: &[Unitary2<T>],
    control_state: &StateVector<T>,
    psi: &StateVector<T>,
) -> Result<StateVector<T>> {
    let big_n = unitaries.len();
    let n = control_width(big_n)?;
    if control_state.num_qubits() != big_n * n {
        return domain(format!(
            "control state has {} qubits, the N = {big_n} circuit needs {}",
            control_state.num_qubits(),
            big_n * n
        ));
    }
    let circuit = build_disposition_circuit(big_n)?;
    let input = StateVector::tensor(control_state, &system_input(big_n, psi)?)?;
    simulate(&circuit, &input, &bind_all(unitaries))
}

/// One control branch of a coherent run.
#[derive(Debug, Clone)]
pub struct Branch<T> {
    /// Joint control value, stage 1 in the lowest bits.
    pub control_value: usize,
    pub probability: T,
    /// Wire-0 state conditioned on this branch (canonical global phase).
    pub target: StateVector<T>,
}

/// Conditional wire-0 states of a joint output whose low `system_wires` wires
/// are the system register and whose remaining wires are controls.
pub fn conditional_target_states<T: Scalar>(
    joint: &StateVector<T>,
    system_wires: usize,
) -> Result<Vec<Branch<T>>> {
    if system_wires == 0 || system_wires >= joint.num_qubits() {
        return domain("need at least one system wire and one control wire");
    }
    let controls: Vec<usize> = (system_wires..joint.num_qubits()).collect();
    let mut branches = Vec::new();
    for value in 0..1usize << controls.len() {
        let weight = (0..1usize << system_wires)
            .map(|s| joint.amplitude(value << system_wires | s).norm_sqr())
            .fold(T::zero(), |a, b| a + b);
        if weight <= T::norm_tol() * T::norm_tol() {
            continue;
        }
        let (probability, rest) = joint.condition_on(&controls, value)?;
        branches.push(Branch { control_value: value, probability, target: rest.pure_qubit(0)? });
    }
    Ok(branches)
}

/// Wire permutation induced by the n-controlled swap for control value `i`:
/// the content of wire `w` ends on wire `pi[w]`.
pub fn routing_permutation(n: usize, i: usize) -> Result<Vec<usize>> {
    if n >= usize::BITS as usize - 1 || i >> n != 0 {
        return domain(format!("control value {i} out of range for n = {n}"));
    }
    let mut contents: Vec<usize> = (0..1usize << n).collect();
    for step in routing_steps(n, 0) {
        if i >> (n - 1 - step.step_index) & 1 == 1 {
            for (a, b) in step.swap_pairs {
                contents.swap(a, b);
            }
        }
    }
    let mut pi = vec![0; contents.len()];
    for (pos, &orig) in contents.iter().enumerate() {
        pi[orig] = pos;
    }
    Ok(pi)
}

/// Unitary set extended with identities up to the next power of two.
#[derive(Debug, Clone)]
pub struct PaddedUnitaries<T> {
    pub unitaries: Vec<Unitary2<T>>,
    pub original_len: usize,
}

pub fn pad_to_power_of_two<T: Scalar>(unitaries: &[Unitary2<T>]) -> Result<PaddedUnitaries<T>> {
    if unitaries.len() < 2 {
        return domain("need at least two unitaries");
    }
    let mut padded = unitaries.to_vec();
    padded.resize(unitaries.len().next_power_of_two(), Unitary2::identity());
    Ok(PaddedUnitaries { unitaries: padded, original_len: unitaries.len() })
}

impl<T: Scalar> PaddedUnitaries<T> {
    /// In strict mode, rejects programs that select one of the padding identities.
    pub fn check_program(&self, program: &DispositionProgram, strict: bool) -> Result<()> {
        if program.n_channels() != self.unitaries.len() {
            return domain(format!(
                "program is for N = {}, padded set has {} unitaries",
                program.n_channels(),
                self.unitaries.len()
            ));
        }
        if strict {
            if let Some(&bad) = program.indices().iter().find(|&&i| i >= self.original_len) {
                return Err(Error::Domain(format!(
                    "program selects padding label {bad} (only {} real unitaries)",
                    self.original_len
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::count_resources;
    use crate::qcore::{haar_random_unitary, product_in_order};

    type C = Circuit<f64>;
    type S = StateVector<f64>;

    #[test]
    fn three_controlled_swap_matches_eight_wire_layout() {
        let steps = routing_steps(3, 8);
        let pairs: Vec<_> = steps.iter().map(|s| s.swap_pairs.clone()).collect();
        assert_eq!(
            pairs,
            vec![vec![(0, 4)], vec![(0, 2), (4, 6)], vec![(0, 1), (2, 3), (4, 5), (6, 7)]]
        );
        // step 0 reads the most significant control bit
        assert_eq!(steps.iter().map(|s| s.control_wire).collect::<Vec<_>>(), vec![10, 9, 8]);
        let c: C = build_n_controlled_swap(3).unwrap();
        assert_eq!(count_resources(&c, false).controlled_swap_count, 7);
        assert_eq!(c.num_qubits(), 11);
    }

    #[test]
    fn smallest_controlled_swap() {
        let c: C = build_n_controlled_swap(1).unwrap();
        assert_eq!(c.gates(), &[Gate::cswap(2, 0, 1)]);
        assert!(build_n_controlled_swap::<f64>(0).is_err());
    }

    #[test]
    fn routing_examples() {
        assert_eq!(routing_permutation(3, 6).unwrap()[0], 6);
        assert_eq!(routing_permutation(2, 2).unwrap()[0], 2);
        assert_eq!(routing_permutation(3, 0).unwrap(), (0..8).collect::<Vec<_>>());
        assert!(routing_permutation(2, 4).is_err());
    }

    #[test]
    fn routing_agrees_with_simulation() {
        // a basis state with one marked system wire is carried along pi_i
        for n in 1..=3usize {
            let big_n = 1 << n;
            let c: C = build_n_controlled_swap(n).unwrap();
            for i in 0..big_n {
                let pi = routing_permutation(n, i).unwrap();
                for w in 0..big_n {
                    let input = S::basis_state(c.num_qubits(), i << big_n | 1 << w).unwrap();
                    let out = simulate(&c, &input, &Default::default()).unwrap();
                    let expect = S::basis_state(c.num_qubits(), i << big_n | 1 << pi[w]).unwrap();
                    assert_eq!(out, expect, "n={n} i={i} w={w}");
                }
            }
        }
    }

    #[test]
    fn n2_routes_psi_to_wire_two() {
        let c: C = build_n_controlled_swap(2).unwrap();
        let psi = S::qubit(num_complex::Complex::new(0.6, 0.0), num_complex::Complex::new(0.0, 0.8)).unwrap();
        // control value 2 = |10>, system |0,0,0,psi>
        let input = S::tensor(&S::basis_state(2, 2).unwrap(), &S::tensor(&S::basis_state(3, 0).unwrap(), &psi).unwrap())
            .unwrap();
        let out = simulate(&c, &input, &Default::default()).unwrap();
        let q = out.pure_qubit(2).unwrap();
        assert!(q.max_abs_diff_up_to_phase(&psi).unwrap() < 1e-12);
    }

    #[test]
    fn select_circuit_n1_gate_list() {
        let c: C = build_select_circuit(1).unwrap();
        assert_eq!(
            c.gates(),
            &[Gate::cswap(2, 0, 1), Gate::oracle(0, 0), Gate::oracle(1, 1), Gate::cswap(2, 0, 1)]
        );
        let r = count_resources(&c, true);
        assert_eq!(r.oracle_uses.values().copied().collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn select_pauli_and_identity() {
        let psi = S::basis_state(1, 0).unwrap();
        let out = run_select(&[Unitary2::identity(), Unitary2::pauli_x()], 1, &psi).unwrap();
        assert!(out.max_abs_diff_up_to_phase(&S::basis_state(1, 1).unwrap()).unwrap() < 1e-12);

        let ids = vec![Unitary2::<f64>::identity(); 4];
        let psi = S::from_ket_label("+").unwrap();
        for i in 0..4 {
            assert!(run_select(&ids, i, &psi).unwrap().max_abs_diff(&psi).unwrap() < 1e-12);
        }
        assert!(matches!(run_select(&ids, 4, &psi), Err(Error::Domain(_))));
        assert!(run_select(&ids[..3], 0, &psi).is_err());
    }

    #[test]
    fn select_haar_n4() {
        let us: Vec<Unitary2<f64>> = (0..4).map(|s| haar_random_unitary(100 + s)).collect();
        let psi = haar_random_unitary::<f64>(7).apply(&S::basis_state(1, 0).unwrap()).unwrap();
        for i in 0..4 {
            let expect = us[i].apply(&psi).unwrap();
            let got = run_select(&us, i, &psi).unwrap();
            assert!(got.max_abs_diff_up_to_phase(&expect).unwrap() < 1e-9);
        }
    }

    #[test]
    fn disposition_n2_hand_example() {
        let us = [Unitary2::ry(0.3), Unitary2::phase(1.1)];
        let psi = S::from_ket_label("+").unwrap();
        let prog = DispositionProgram::new(2, vec![1, 0]).unwrap();
        let got = run_disposition(&us, &prog, &psi).unwrap();
        let expect = (us[0] * us[1]).apply(&psi).unwrap();
        assert!(got.max_abs_diff_up_to_phase(&expect).unwrap() < 1e-12);

        let zeros = DispositionProgram::new(2, vec![0, 0]).unwrap();
        let got = run_disposition(&us, &zeros, &psi).unwrap();
        let expect = (us[0] * us[0]).apply(&psi).unwrap();
        assert!(got.max_abs_diff_up_to_phase(&expect).unwrap() < 1e-12);
        let _ = product_in_order(&us, &[0, 0]).unwrap();
    }

    #[test]
    fn disposition_structure() {
        let c: C = build_disposition_circuit(2).unwrap();
        assert_eq!(c.num_qubits(), 4);
        assert_eq!(c.control_registers().count(), 2);
        let r = count_resources(&c, false);
        assert_eq!(r.control_qubits, 2);
        assert_eq!(r.ancilla_qubits, 1);
        assert_eq!(r.oracle_uses.values().copied().collect::<Vec<_>>(), vec![2, 2]);
        assert!(build_disposition_circuit::<f64>(3).is_err());
    }

    #[test]
    fn program_validation_and_json() {
        assert!(DispositionProgram::new(2, vec![0]).is_err());
        assert!(DispositionProgram::new(2, vec![0, 2]).is_err());
        let p: DispositionProgram = serde_json::from_str(r#"{"N":4,"indices":[3,0,1,1]}"#).unwrap();
        assert_eq!(p.control_value().unwrap(), 3 | 0 << 2 | 1 << 4 | 1 << 6);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"N":4,"indices":[3,0,1,1]}"#);
        assert!(serde_json::from_str::<DispositionProgram>(r#"{"N":2,"indices":[5,0]}"#).is_err());
    }

    #[test]
    fn padding_strict_mode() {
        let us = vec![Unitary2::<f64>::pauli_x(); 3];
        let padded = pad_to_power_of_two(&us).unwrap();
        assert_eq!(padded.unitaries.len(), 4);
        assert_eq!(padded.unitaries[3], Unitary2::identity());
        let p = DispositionProgram::new(4, vec![0, 3, 1, 2]).unwrap();
        assert!(padded.check_program(&p, false).is_ok());
        assert!(padded.check_program(&p, true).is_err());
        let ok = DispositionProgram::new(4, vec![0, 2, 1, 2]).unwrap();
        assert!(padded.check_program(&ok, true).is_ok());
    }
}
