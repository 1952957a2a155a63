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

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A gate or network is malformed (wire collision, bad wiring, ...).
    #[error("structural error: {0}")]
    Structural(String),
    #[error("oracle label {0} is not bound to a unitary")]
    UnboundOracle(usize),
    #[error("cannot invert circuit: {0}")]
    Inversion(String),
    /// The request would exceed the desk-scale limits of the simulator.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("wire {wire} is not in a pure state (purity {purity})")]
    NotPure { wire: usize, purity: f64 },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
