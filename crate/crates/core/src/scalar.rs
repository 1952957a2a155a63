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

//! Floating-point scalar abstraction shared by every numeric type in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, NumAssign};

/// Real scalar backing the complex amplitudes: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Allowed drift of a state's norm, and the default state-comparison tolerance.
    fn norm_tol() -> Self;

    /// Allowed entrywise deviation of `U^dagger U` from the identity.
    fn unitary_tol() -> Self;

    /// Converts a literal. Panics only if `x` is not representable, which cannot
    /// happen for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn norm_tol() -> Self {
        1e-9
    }
    fn unitary_tol() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn norm_tol() -> Self {
        1e-4
    }
    fn unitary_tol() -> Self {
        1e-5
    }
}
