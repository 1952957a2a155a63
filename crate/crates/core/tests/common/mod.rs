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

#![allow(dead_code)]

use qswitch::circuit::{Circuit, Gate};
use qswitch::qcore::{haar_random_unitary, haar_random_unitary_with, StateVector, Unitary2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random circuit over every gate kind except oracle calls.
pub fn random_circuit(rng: &mut ChaCha8Rng, q: usize, len: usize) -> Circuit<f64> {
    let mut c = Circuit::new(q);
    let mut attempts = 0;
    while c.gates().len() < len {
        attempts += 1;
        assert!(attempts < 100 * len + 100, "cannot place gates on {q} wires");
        let w: Vec<usize> = (0..3).map(|_| rng.gen_range(0..q)).collect();
        let g = match rng.gen_range(0..4) {
            0 => Gate::single(haar_random_unitary_with(rng), w[0]),
            1 => Gate::cnot(w[0], w[1]),
            2 => Gate::toffoli(w[0], w[1], w[2]),
            _ => Gate::cswap(w[0], w[1], w[2]),
        };
        let _ = c.push(g);
    }
    c
}

/// Random entangled state: Haar layer, CNOT ladder, Haar layer.
pub fn random_state(rng: &mut ChaCha8Rng, q: usize) -> StateVector<f64> {
    let mut s = StateVector::basis_state(q, 0).unwrap();
    for w in 0..q {
        s.apply_gate(&Gate::single(haar_random_unitary_with(rng), w)).unwrap();
    }
    for w in 1..q {
        s.apply_gate(&Gate::cnot(w - 1, w)).unwrap();
    }
    for w in 0..q {
        s.apply_gate(&Gate::single(haar_random_unitary_with(rng), w)).unwrap();
    }
    s
}

pub fn random_qubit(rng: &mut ChaCha8Rng) -> StateVector<f64> {
    let u: Unitary2<f64> = haar_random_unitary_with(rng);
    u.apply(&StateVector::basis_state(1, 0).unwrap()).unwrap()
}

pub fn haar_set(first_seed: u64, n: usize) -> Vec<Unitary2<f64>> {
    (0..n as u64).map(|s| haar_random_unitary(first_seed + s)).collect()
}
