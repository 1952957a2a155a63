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

//! Programmable orderings of unitary channels, in two computational models.
//!
//! * The circuit model ([`permcircuits`]): an n-controlled swap routes the
//!   target qubit to one of `N` oracle wires, so selecting `U_i` costs one call
//!   to every oracle, and programming an arbitrary length-`N` sequence chains
//!   `N` such stages (`N` calls per channel).
//! * The switch model ([`switchnet`]): a triangular network of
//!   `N(N-1)/2` quantum switches routes each channel exactly once into an
//!   ordered list of output slots and realises every permutation, coherently
//!   in superposition when its control qubits are.
//!
//! [`verify`] holds brute-force oracles used to cross-check both.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for everyday use.

pub mod circuit;
pub mod error;
pub mod permcircuits;
pub mod qcore;
pub mod scalar;
pub mod switchnet;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type State64 = qcore::StateVector<f64>;
pub type State32 = qcore::StateVector<f32>;
pub type Unitary64 = qcore::Unitary2<f64>;
pub type Unitary32 = qcore::Unitary2<f32>;
pub type Gate64 = circuit::Gate<f64>;
pub type Gate32 = circuit::Gate<f32>;
pub type Circuit64 = circuit::Circuit<f64>;
pub type Circuit32 = circuit::Circuit<f32>;
pub type Bindings64 = circuit::OracleBindings<f64>;
