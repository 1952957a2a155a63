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

//! Gate-list circuits: simulation, inversion, controlled-swap lowering and
//! resource accounting.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qcore::{check_register_size, StateVector, Unitary2};
use crate::scalar::Scalar;

/// Elementary operations charged for one Toffoli in its optimal CNOT-based
/// decomposition: (CNOTs, single-qubit gates).
pub const TOFFOLI_CNOTS: usize = 6;
pub const TOFFOLI_SINGLE_QUBIT: usize = 9;

/// Oracle label -> unitary it stands for.
pub type OracleBindings<T> = BTreeMap<usize, Unitary2<T>>;

/// Binds label `j` to `unitaries[j]`.
pub fn bind_all<T: Scalar>(unitaries: &[Unitary2<T>]) -> OracleBindings<T> {
    unitaries.iter().copied().enumerate().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T> {
    SingleQubit { unitary: Unitary2<T>, wire: usize },
    Cnot { control: usize, target: usize },
    Toffoli { control1: usize, control2: usize, target: usize },
    /// Fredkin gate: swaps `wire_a` and `wire_b` when `control` is set.
    ControlledSwap { control: usize, wire_a: usize, wire_b: usize },
    /// One use of the black-box channel bound to `label`.
    OracleCall { label: usize, wire: usize },
}

impl<T: Scalar> Gate<T> {
    pub fn single(unitary: Unitary2<T>, wire: usize) -> Self {
        Gate::SingleQubit { unitary, wire }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn toffoli(control1: usize, control2: usize, target: usize) -> Self {
        Gate::Toffoli { control1, control2, target }
    }

    pub fn cswap(control: usize, wire_a: usize, wire_b: usize) -> Self {
        Gate::ControlledSwap { control, wire_a, wire_b }
    }

    pub fn oracle(label: usize, wire: usize) -> Self {
        Gate::OracleCall { label, wire }
    }

    /// Wires in the order of the JSON `wires` field: controls first, then targets.
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::SingleQubit { wire, .. } | Gate::OracleCall { wire, .. } => vec![wire],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Toffoli { control1, control2, target } => vec![control1, control2, target],
            Gate::ControlledSwap { control, wire_a, wire_b } => vec![control, wire_a, wire_b],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Gate::SingleQubit { .. } => "SingleQubit",
            Gate::Cnot { .. } => "CNOT",
            Gate::Toffoli { .. } => "Toffoli",
            Gate::ControlledSwap { .. } => "ControlledSwap",
            Gate::OracleCall { .. } => "OracleCall",
        }
    }

    pub fn check_wires(&self, num_qubits: usize) -> Result<()> {
        let wires = self.wires();
        for (pos, &w) in wires.iter().enumerate() {
            if w >= num_qubits {
                return Err(Error::Structural(format!(
                    "{} uses wire {w} but the register has {num_qubits} qubits",
                    self.kind_name()
                )));
            }
            if wires[..pos].contains(&w) {
                return Err(Error::Structural(format!("{} repeats wire {w}", self.kind_name())));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Self> {
        match self {
            Gate::SingleQubit { unitary, wire } => Ok(Gate::single(unitary.adjoint(), *wire)),
            Gate::OracleCall { label, .. } => {
                Err(Error::Inversion(format!("oracle {label} has no available adjoint")))
            }
            other => Ok(other.clone()),
        }
    }

    /// Same gate with every wire passed through `f`.
    pub fn map_wires(&self, f: impl Fn(usize) -> usize) -> Self {
        match self {
            Gate::SingleQubit { unitary, wire } => Gate::single(*unitary, f(*wire)),
            Gate::Cnot { control, target } => Gate::cnot(f(*control), f(*target)),
            Gate::Toffoli { control1, control2, target } => Gate::toffoli(f(*control1), f(*control2), f(*target)),
            Gate::ControlledSwap { control, wire_a, wire_b } => Gate::cswap(f(*control), f(*wire_a), f(*wire_b)),
            Gate::OracleCall { label, wire } => Gate::oracle(*label, f(*wire)),
        }
    }
}

/// Named contiguous wire range `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub wires: Range<usize>,
}

impl Register {
    pub fn len(&self) -> usize {
        self.wires.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wires.is_empty()
    }
}

pub const SYSTEM_REGISTER: &str = "system";
pub const CONTROL_PREFIX: &str = "control";

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    num_qubits: usize,
    gates: Vec<Gate<T>>,
    registers: Vec<Register>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, gates: Vec::new(), registers: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.check_wires(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate<T>>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn add_register(&mut self, name: impl Into<String>, wires: Range<usize>) -> Result<()> {
        let name = name.into();
        if wires.end > self.num_qubits || wires.is_empty() {
            return Err(Error::Structural(format!(
                "register {name} = {wires:?} is empty or exceeds {} qubits",
                self.num_qubits
            )));
        }
        if let Some(r) = self.registers.iter().find(|r| r.name == name) {
            return Err(Error::Structural(format!("register {} declared twice", r.name)));
        }
        if let Some(r) = self.registers.iter().find(|r| r.wires.start < wires.end && wires.start < r.wires.end) {
            return Err(Error::Structural(format!("register {name} overlaps {}", r.name)));
        }
        self.registers.push(Register { name, wires });
        Ok(())
    }

    /// Registers, when declared, must tile every wire.
    pub fn check_register_cover(&self) -> Result<()> {
        if self.registers.is_empty() {
            return Ok(());
        }
        let covered: usize = self.registers.iter().map(Register::len).sum();
        if covered != self.num_qubits {
            return Err(Error::Structural(format!(
                "registers cover {covered} of {} wires",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Registers whose name starts with `control`, in declaration order.
    pub fn control_registers(&self) -> impl Iterator<Item = &Register> {
        self.registers.iter().filter(|r| r.name.starts_with(CONTROL_PREFIX))
    }
}

/// Runs the gates in order. `OracleCall(l, w)` applies `bindings[l]` on `w`.
pub fn simulate<T: Scalar>(
    circuit: &Circuit<T>,
    input: &StateVector<T>,
    bindings: &OracleBindings<T>,
) -> Result<StateVector<T>> {
    if input.num_qubits() != circuit.num_qubits {
        return Err(Error::Domain(format!(
            "input has {} qubits, circuit has {}",
            input.num_qubits(),
            circuit.num_qubits
        )));
    }
    // fail before touching the state if any label is unbound
    for g in &circuit.gates {
        if let Gate::OracleCall { label, .. } = g {
            if !bindings.contains_key(label) {
                return Err(Error::UnboundOracle(*label));
            }
        }
    }
    let mut state = input.clone();
    for g in &circuit.gates {
        match g {
            Gate::OracleCall { label, wire } => state.apply_single(*wire, &bindings[label]),
            other => state.apply_gate(other)?,
        }
    }
    Ok(state)
}

/// Reversed gate list with each gate inverted. Oracle calls cannot be inverted.
pub fn invert<T: Scalar>(circuit: &Circuit<T>) -> Result<Circuit<T>> {
    let gates = circuit.gates.iter().rev().map(Gate::inverse).collect::<Result<Vec<_>>>()?;
    Ok(Circuit { num_qubits: circuit.num_qubits, gates, registers: circuit.registers.clone() })
}

/// Replaces every `ControlledSwap(c, a, b)` with `CNOT(b,a) Toffoli(c,a,b) CNOT(b,a)`.
pub fn lower_controlled_swaps<T: Scalar>(circuit: &Circuit<T>) -> Circuit<T> {
    let mut gates = Vec::with_capacity(circuit.gates.len());
    for g in &circuit.gates {
        match *g {
            Gate::ControlledSwap { control, wire_a, wire_b } => {
                gates.push(Gate::cnot(wire_b, wire_a));
                gates.push(Gate::toffoli(control, wire_a, wire_b));
                gates.push(Gate::cnot(wire_b, wire_a));
            }
            ref other => gates.push(other.clone()),
        }
    }
    Circuit { num_qubits: circuit.num_qubits, gates, registers: circuit.registers.clone() }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub cnot_count: usize,
    pub single_qubit_count: usize,
    pub toffoli_count: usize,
    pub controlled_swap_count: usize,
    pub control_qubits: usize,
    pub ancilla_qubits: usize,
    /// Oracle label -> number of calls.
    pub oracle_uses: BTreeMap<usize, usize>,
}

/// Tallies gates by kind.
///
/// With `lower_toffoli`, `cnot_count` and `single_qubit_count` become
/// elementary totals: each Toffoli is charged 6 CNOTs and 9 single-qubit gates,
/// and each controlled swap is charged as its CNOT-Toffoli-CNOT lowering. The
/// Toffoli and controlled-swap tallies always count the gates as written.
/// Oracle calls are only reported under `oracle_uses`.
pub fn count_resources<T: Scalar>(circuit: &Circuit<T>, lower_toffoli: bool) -> ResourceReport {
    let mut r = ResourceReport::default();
    for g in &circuit.gates {
        match g {
            Gate::SingleQubit { .. } => r.single_qubit_count += 1,
            Gate::Cnot { .. } => r.cnot_count += 1,
            Gate::Toffoli { .. } => {
                r.toffoli_count += 1;
                if lower_toffoli {
                    r.cnot_count += TOFFOLI_CNOTS;
                    r.single_qubit_count += TOFFOLI_SINGLE_QUBIT;
                }
            }
            Gate::ControlledSwap { .. } => {
                r.controlled_swap_count += 1;
                if lower_toffoli {
                    r.cnot_count += 2 + TOFFOLI_CNOTS;
                    r.single_qubit_count += TOFFOLI_SINGLE_QUBIT;
                }
            }
            Gate::OracleCall { label, .. } => *r.oracle_uses.entry(*label).or_default() += 1,
        }
    }
    r.control_qubits = circuit.control_registers().map(Register::len).sum();
    r.ancilla_qubits = circuit.register(SYSTEM_REGISTER).map_or(0, |s| s.len().saturating_sub(1));
    r
}

/// Checks that a circuit fits the dense simulator.
pub fn check_simulable<T: Scalar>(circuit: &Circuit<T>) -> Result<()> {
    check_register_size(circuit.num_qubits)
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: String,
    wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unitary: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    num_qubits: usize,
    #[serde(default)]
    registers: BTreeMap<String, [usize; 2]>,
    gates: Vec<GateRepr>,
}

impl<T: Scalar> Gate<T> {
    fn to_repr(&self) -> GateRepr {
        let (unitary, label) = match self {
            Gate::SingleQubit { unitary, .. } => {
                (Some(serde_json::to_value(unitary).expect("unitary serialises")), None)
            }
            Gate::OracleCall { label, .. } => (None, Some(*label)),
            _ => (None, None),
        };
        GateRepr { kind: self.kind_name().to_string(), wires: self.wires(), unitary, label }
    }

    fn from_repr(repr: GateRepr) -> Result<Self> {
        let arity = |n: usize| -> Result<()> {
            if repr.wires.len() == n {
                Ok(())
            } else {
                Err(Error::Structural(format!("{} expects {n} wires, got {}", repr.kind, repr.wires.len())))
            }
        };
        let w = &repr.wires;
        let gate = match repr.kind.as_str() {
            "SingleQubit" => {
                arity(1)?;
                let u = repr
                    .unitary
                    .clone()
                    .ok_or_else(|| Error::Structural("SingleQubit gate without unitary".into()))?;
                Gate::single(serde_json::from_value(u)?, w[0])
            }
            "CNOT" => {
                arity(2)?;
                Gate::cnot(w[0], w[1])
            }
            "Toffoli" => {
                arity(3)?;
                Gate::toffoli(w[0], w[1], w[2])
            }
            "ControlledSwap" => {
                arity(3)?;
                Gate::cswap(w[0], w[1], w[2])
            }
            "OracleCall" => {
                arity(1)?;
                let label = repr.label.ok_or_else(|| Error::Structural("OracleCall without label".into()))?;
                Gate::oracle(label, w[0])
            }
            other => return Err(Error::Structural(format!("unknown gate kind {other:?}"))),
        };
        Ok(gate)
    }
}

impl<T: Scalar> Serialize for Circuit<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CircuitRepr {
            num_qubits: self.num_qubits,
            registers: self.registers.iter().map(|r| (r.name.clone(), [r.wires.start, r.wires.end])).collect(),
            gates: self.gates.iter().map(Gate::to_repr).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Circuit<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CircuitRepr::deserialize(deserializer)?;
        let build = || -> Result<Circuit<T>> {
            let mut c = Circuit::new(repr.num_qubits);
            let mut regs: Vec<_> = repr.registers.into_iter().collect();
            regs.sort_by_key(|(_, [lo, _])| *lo);
            for (name, [lo, hi]) in regs {
                c.add_register(name, lo..hi)?;
            }
            c.check_register_cover()?;
            for g in repr.gates {
                c.push(Gate::from_repr(g)?)?;
            }
            Ok(c)
        };
        build().map_err(D::Error::custom)
    }
}
