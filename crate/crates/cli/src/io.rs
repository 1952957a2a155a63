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

//! JSON input formats accepted by `simulate`.
//!
//! A state is either a ket label over `{0,1,+,-}` (most significant wire
//! first), a bare amplitude list `[[re, im], ...]`, or an object
//! `{"num_qubits": q, "amplitudes": [[re, im], ...]}`.

use qswitch::qcore::{ket_label, StateVector};
use qswitch::{State64, Unitary64, C64};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Label(String),
    Amplitudes(Vec<[f64; 2]>),
    Full(State64),
}

impl StateSpec {
    pub fn resolve(&self) -> qswitch::Result<State64> {
        match self {
            StateSpec::Label(s) => StateVector::from_ket_label(s),
            StateSpec::Amplitudes(a) => StateVector::from_amplitudes(a.iter().map(|p| C64::new(p[0], p[1])).collect()),
            StateSpec::Full(s) => Ok(s.clone()),
        }
    }
}

/// Contents of the `--input` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    /// Target qubit.
    pub psi: Option<StateSpec>,
    /// Control register.
    pub control: Option<StateSpec>,
    /// Full register, for raw gate-list circuits.
    pub state: Option<StateSpec>,
}

pub type UnitariesFile = Vec<Unitary64>;

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

/// `{"num_qubits", "amplitudes", "nonzero": [{"ket", "amplitude"}]}`.
pub fn state_json(s: &State64) -> Value {
    let nonzero: Vec<Value> = s
        .support(1e-12)
        .map(|(i, z)| json!({"ket": ket_label(i, s.num_qubits()), "amplitude": complex_json(z)}))
        .collect();
    json!({
        "num_qubits": s.num_qubits(),
        "amplitudes": s.amplitudes().iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
        "nonzero": nonzero,
    })
}
