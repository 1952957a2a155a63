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

//! Brute-force oracles: dense circuit matrices, exhaustive enumeration of
//! dispositions and permutations, and the cross-model equivalence check.
//!
//! Nothing here calls the state-vector kernels; the dense matrices are built
//! from Kronecker products and classical basis maps.

use itertools::Itertools;
use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{count_resources, Circuit, Gate, OracleBindings};
use crate::error::{domain, Error, Result};
use crate::permcircuits::{build_disposition_circuit, control_width, run_disposition, DispositionProgram};
use crate::qcore::{haar_random_unitary_with, product_in_order, StateVector, Unitary2};
use crate::scalar::Scalar;
use crate::switchnet::{build_network, simulate_coherent, uses_per_channel, SwitchNetwork};

/// Largest register for which [`dense_circuit_matrix`] will build a matrix.
pub const MAX_DENSE_QUBITS: usize = 12;
pub const MAX_DISPOSITIONS: u64 = 1_000_000;
pub const MAX_PERMUTATION_CHANNELS: usize = 8;
/// Agreement threshold of [`cross_model_check`].
pub const CROSS_MODEL_TOL: f64 = 1e-9;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        DenseMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    fn from_unitary(u: &Unitary2<T>) -> Self {
        let e = u.entries();
        DenseMatrix { dim: 2, data: vec![e[0][0], e[0][1], e[1][0], e[1][1]] }
    }

    /// `self (x) rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let dim = self.dim * rhs.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for (r1, c1) in (0..self.dim).cartesian_product(0..self.dim) {
            let a = self.get(r1, c1);
            for (r2, c2) in (0..rhs.dim).cartesian_product(0..rhs.dim) {
                data[(r1 * rhs.dim + r2) * dim + c1 * rhs.dim + c2] = a * rhs.get(r2, c2);
            }
        }
        DenseMatrix { dim, data }
    }

    /// `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for col in 0..n {
                    data[r * n + col] += a * rhs.get(k, col);
                }
            }
        }
        DenseMatrix { dim: n, data }
    }

    pub fn apply(&self, v: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        if v.dim() != self.dim {
            return domain(format!("vector of length {} for a {}-dim matrix", v.dim(), self.dim));
        }
        Ok((0..self.dim)
            .map(|r| {
                (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, col| acc + self.get(r, col) * v.amplitude(col))
            })
            .collect())
    }

    fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for x in 0..dim {
            data[f(x) * dim + x] = Complex::new(T::one(), T::zero());
        }
        DenseMatrix { dim, data }
    }
}

fn bit(x: usize, w: usize) -> bool {
    x >> w & 1 == 1
}

/// `I (x) .. (x) U (x) .. (x) I` with `U` on `wire`; the leftmost factor is
/// the most significant wire.
fn embed_single<T: Scalar>(u: &Unitary2<T>, wire: usize, num_qubits: usize) -> DenseMatrix<T> {
    let id = DenseMatrix::identity(2);
    let local = DenseMatrix::from_unitary(u);
    (0..num_qubits)
        .rev()
        .map(|w| if w == wire { local.clone() } else { id.clone() })
        .reduce(|acc, m| acc.kron(&m))
        .expect("at least one wire")
}

fn gate_matrix<T: Scalar>(gate: &Gate<T>, num_qubits: usize, bindings: &OracleBindings<T>) -> Result<DenseMatrix<T>> {
    gate.check_wires(num_qubits)?;
    let dim = 1usize << num_qubits;
    Ok(match *gate {
        Gate::SingleQubit { ref unitary, wire } => embed_single(unitary, wire, num_qubits),
        Gate::OracleCall { label, wire } => {
            embed_single(bindings.get(&label).ok_or(Error::UnboundOracle(label))?, wire, num_qubits)
        }
        Gate::Cnot { control, target } => {
            DenseMatrix::permutation(dim, |x| if bit(x, control) { x ^ 1 << target } else { x })
        }
        Gate::Toffoli { control1, control2, target } => DenseMatrix::permutation(dim, |x| {
            if bit(x, control1) && bit(x, control2) {
                x ^ 1 << target
            } else {
                x
            }
        }),
        Gate::ControlledSwap { control, wire_a, wire_b } => DenseMatrix::permutation(dim, |x| {
            if bit(x, control) && bit(x, wire_a) != bit(x, wire_b) {
                x ^ (1 << wire_a | 1 << wire_b)
            } else {
                x
            }
        }),
    })
}

/// Explicit unitary of the whole circuit; later gates multiply on the left.
pub fn dense_circuit_matrix<T: Scalar>(circuit: &Circuit<T>, bindings: &OracleBindings<T>) -> Result<DenseMatrix<T>> {
    let q = circuit.num_qubits();
    if q > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit(format!("dense matrix of {q} qubits exceeds {MAX_DENSE_QUBITS}")));
    }
    if q == 0 {
        return domain("circuit has no qubits");
    }
    let mut m = DenseMatrix::identity(1 << q);
    for g in circuit.gates() {
        m = gate_matrix(g, q, bindings)?.matmul(&m);
    }
    Ok(m)
}

/// All `N^N` order lists over `0..N`, lexicographic.
pub fn enumerate_dispositions(n_channels: usize) -> Result<Vec<Vec<usize>>> {
    if n_channels == 0 {
        return domain("N must be positive");
    }
    let count = (n_channels as u64).checked_pow(n_channels as u32);
    if count.is_none_or(|c| c > MAX_DISPOSITIONS) {
        return Err(Error::ResourceLimit(format!("N^N for N = {n_channels} exceeds {MAX_DISPOSITIONS}")));
    }
    Ok(std::iter::repeat_n(0..n_channels, n_channels).multi_cartesian_product().collect())
}

/// All `N!` permutations of `0..N`, lexicographic.
pub fn enumerate_permutations(n_channels: usize) -> Result<Vec<Vec<usize>>> {
    if n_channels == 0 {
        return domain("N must be positive");
    }
    if n_channels > MAX_PERMUTATION_CHANNELS {
        return Err(Error::ResourceLimit(format!("N! for N = {n_channels} is too large")));
    }
    Ok((0..n_channels).permutations(n_channels).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureCase {
    pub trial: usize,
    pub sigma: Vec<usize>,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UsesPerChannel {
    pub circuit: usize,
    pub switch: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    #[serde(rename = "N")]
    pub n_channels: usize,
    pub cases_run: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub failures: Vec<FailureCase>,
    /// Oracle calls per channel in each model (the same for every channel).
    pub uses_per_channel: UsesPerChannel,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Largest deviation between the two models and the product oracle for one
/// unitary set and ordering.
pub(crate) fn cross_check_case(
    network: &SwitchNetwork,
    assignment_for: &[u64],
    unitaries: &[Unitary2<f64>],
    sigma: &[usize],
    psi: &StateVector<f64>,
) -> Result<f64> {
    let n = unitaries.len();
    let expected = product_in_order(unitaries, sigma)?.apply(psi)?;

    let program = DispositionProgram::new(n, sigma.to_vec())?;
    let circuit_out = run_disposition(unitaries, &program, psi)?;

    let rank = crate::switchnet::Permutation::new(sigma.to_vec())?.rank();
    let b = assignment_for[rank as usize];
    let controls = StateVector::basis_state(network.switch_count(), b as usize)?;
    let joint = simulate_coherent(network, unitaries, &controls, psi)?;
    let control_wires: Vec<usize> = (1..=network.switch_count()).collect();
    let (_, switch_out) = joint.condition_on(&control_wires, b as usize)?;

    let e_circuit = circuit_out.max_abs_diff_up_to_phase(&expected)?;
    let e_switch = switch_out.max_abs_diff(&expected)?;
    let e_models = circuit_out.max_abs_diff_up_to_phase(&switch_out)?;
    Ok(e_circuit.max(e_switch).max(e_models))
}

/// First assignment index realising each permutation rank.
pub(crate) fn assignments_by_rank(network: &SwitchNetwork) -> Result<Vec<u64>> {
    let total = crate::switchnet::factorial(network.n_channels()) as usize;
    let mut first = vec![u64::MAX; total];
    let count = 1u64 << network.switch_count();
    for b in 0..count {
        let r = network.evaluate_index(b)?.rank() as usize;
        if first[r] == u64::MAX {
            first[r] = b;
        }
    }
    if first.contains(&u64::MAX) {
        return Err(Error::Structural("switch network does not reach every permutation".into()));
    }
    Ok(first)
}

/// Runs `trials` random (Haar set, permutation, input) cases through the
/// disposition circuit and through the switch network and compares both with
/// the matrix-product oracle.
pub fn cross_model_check(n_channels: usize, trials: usize, seed: u64) -> Result<EquivalenceReport> {
    control_width(n_channels)?;
    if n_channels > 4 {
        return Err(Error::ResourceLimit(format!(
            "coherent circuit runs are limited to N <= 4, got {n_channels}"
        )));
    }
    let network = build_network(n_channels)?;
    let by_rank = assignments_by_rank(&network)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut max_error = 0.0f64;
    let mut failures = Vec::new();
    for trial in 0..trials {
        let unitaries: Vec<Unitary2<f64>> = (0..n_channels).map(|_| haar_random_unitary_with(&mut rng)).collect();
        let prep: Unitary2<f64> = haar_random_unitary_with(&mut rng);
        let psi = prep.apply(&StateVector::basis_state(1, 0)?)?;
        let mut sigma: Vec<usize> = (0..n_channels).collect();
        sigma.shuffle(&mut rng);
        let _: u8 = rng.gen(); // decorrelate consecutive trials' streams

        let err = cross_check_case(&network, &by_rank, &unitaries, &sigma, &psi)?;
        max_error = max_error.max(err);
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(err <= CROSS_MODEL_TOL) {
            failures.push(FailureCase { trial, sigma, error: err });
        }
    }

    let circuit_uses = count_resources(&build_disposition_circuit::<f64>(n_channels)?, false).oracle_uses;
    let switch_uses = uses_per_channel(&network);
    let uniform = |m: &std::collections::BTreeMap<usize, usize>| -> Result<usize> {
        let v: Vec<usize> = m.values().copied().unique().collect();
        match (v.as_slice(), m.len() == n_channels) {
            ([u], true) => Ok(*u),
            _ => Err(Error::Structural(format!("uneven channel uses {m:?}"))),
        }
    };

    Ok(EquivalenceReport {
        n_channels,
        cases_run: trials,
        max_error,
        tolerance: CROSS_MODEL_TOL,
        failures,
        uses_per_channel: UsesPerChannel { circuit: uniform(&circuit_uses)?, switch: uniform(&switch_uses)? },
    })
}
