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

//! Complex linear algebra and state-vector kernels.
//!
//! Basis index bit `j` (least significant = bit 0) is the state of wire `j`.
//! Kets are printed with the most significant wire leftmost, so `|01>` on two
//! wires has wire 0 set.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::Gate;
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Largest register the dense state-vector simulator accepts.
pub const MAX_QUBITS: usize = 26;

#[inline]
fn c<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn complex_to_pair<T: Scalar>(z: Complex<T>) -> [f64; 2] {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
}

pub(crate) fn pair_to_complex<T: Scalar>(p: [f64; 2]) -> Complex<T> {
    c(p[0], p[1])
}

/// Formats `index` as a ket over `num_qubits` wires, most significant wire first.
pub fn ket_label(index: usize, num_qubits: usize) -> String {
    (0..num_qubits)
        .rev()
        .map(|w| if index >> w & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Fixed-width binary string `[i]_n`, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn from_value(value: usize, len: usize) -> Result<Self> {
        if len < usize::BITS as usize && value >> len != 0 {
            return domain(format!("{value} does not fit in {len} bits"));
        }
        let bits = (0..len).rev().map(|b| value >> b & 1 == 1).collect();
        Ok(BitString { bits })
    }

    pub fn zeros(len: usize) -> Self {
        BitString { bits: vec![false; len] }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        BitString { bits: bits.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn value(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| acc << 1 | usize::from(b))
    }

    /// Concatenation `self ++ tail`, `self` supplying the high-order bits.
    pub fn concat(&self, tail: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&tail.bits);
        BitString { bits }
    }

    pub fn push(mut self, bit: bool) -> Self {
        self.bits.push(bit);
        self
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A 2x2 unitary acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2<T> {
    m: [[Complex<T>; 2]; 2],
}

impl<T: Scalar> Unitary2<T> {
    /// Builds a unitary from row-major entries, rejecting non-finite or
    /// non-unitary input.
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Result<Self> {
        let u = Unitary2 { m };
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("unitary has non-finite entries");
        }
        let dev = u.unitarity_deviation();
        if dev > T::unitary_tol() {
            return domain(format!("matrix is not unitary (max |U^dag U - I| = {dev})"));
        }
        Ok(u)
    }

    pub(crate) fn new_unchecked(m: [[Complex<T>; 2]; 2]) -> Self {
        Unitary2 { m }
    }

    pub fn identity() -> Self {
        Self::new_unchecked([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    pub fn pauli_x() -> Self {
        Self::new_unchecked([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn pauli_y() -> Self {
        Self::new_unchecked([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub fn pauli_z() -> Self {
        Self::new_unchecked([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    pub fn hadamard() -> Self {
        let h = T::FRAC_1_SQRT_2();
        let z = T::zero();
        Self::new_unchecked([
            [Complex::new(h, z), Complex::new(h, z)],
            [Complex::new(h, z), Complex::new(-h, z)],
        ])
    }

    /// Rotation `exp(-i theta/2 Y)`; real, so handy for hand-checked examples.
    pub fn ry(theta: T) -> Self {
        let two = T::lit(2.0);
        let (s, co) = ((theta / two).sin(), (theta / two).cos());
        let z = T::zero();
        Self::new_unchecked([
            [Complex::new(co, z), Complex::new(-s, z)],
            [Complex::new(s, z), Complex::new(co, z)],
        ])
    }

    pub fn phase(theta: T) -> Self {
        let z = T::zero();
        Self::new_unchecked([
            [Complex::new(T::one(), z), Complex::new(z, z)],
            [Complex::new(z, z), Complex::from_polar(T::one(), theta)],
        ])
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.m[row][col]
    }

    pub fn entries(&self) -> &[[Complex<T>; 2]; 2] {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new_unchecked([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    /// `max |(U^dag U - I)_{rc}|`.
    pub fn unitarity_deviation(&self) -> T {
        let p = self.adjoint().mul_raw(self);
        let mut dev = T::zero();
        for (r, row) in p.iter().enumerate() {
            for (col, &z) in row.iter().enumerate() {
                let target = if r == col { T::one() } else { T::zero() };
                dev = dev.max((z - Complex::new(target, T::zero())).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()))
    }

    fn mul_raw(&self, rhs: &Self) -> [[Complex<T>; 2]; 2] {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for r in 0..2 {
            for col in 0..2 {
                out[r][col] = a[r][0] * b[0][col] + a[r][1] * b[1][col];
            }
        }
        out
    }

    /// `U |psi>` for a one-qubit state.
    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if psi.num_qubits() != 1 {
            return domain(format!("expected a 1-qubit state, got {} qubits", psi.num_qubits()));
        }
        let a = psi.amplitudes();
        let out = vec![
            self.m[0][0] * a[0] + self.m[0][1] * a[1],
            self.m[1][0] * a[0] + self.m[1][1] * a[1],
        ];
        Ok(StateVector { num_qubits: 1, amps: out })
    }

    pub fn cast<U: Scalar>(&self) -> Unitary2<U> {
        let conv = |z: Complex<T>| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy()));
        let m = &self.m;
        Unitary2::new_unchecked([[conv(m[0][0]), conv(m[0][1])], [conv(m[1][0]), conv(m[1][1])]])
    }
}

impl<T: Scalar> Mul for Unitary2<T> {
    type Output = Unitary2<T>;

    fn mul(self, rhs: Self) -> Self::Output {
        Unitary2::new_unchecked(self.mul_raw(&rhs))
    }
}

impl<T: Scalar> Serialize for Unitary2<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: [[[f64; 2]; 2]; 2] = [
            [complex_to_pair(self.m[0][0]), complex_to_pair(self.m[0][1])],
            [complex_to_pair(self.m[1][0]), complex_to_pair(self.m[1][1])],
        ];
        rows.serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Unitary2<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 2]; 2]>::deserialize(deserializer)?;
        let m = [
            [pair_to_complex(rows[0][0]), pair_to_complex(rows[0][1])],
            [pair_to_complex(rows[1][0]), pair_to_complex(rows[1][1])],
        ];
        Unitary2::new(m).map_err(D::Error::custom)
    }
}

/// Haar-distributed 2x2 unitary, deterministic in `seed`.
///
/// Samples a complex Ginibre matrix, orthonormalises its columns with
/// Gram-Schmidt and rotates each column so that the diagonal of the implied
/// triangular factor is real and positive.
pub fn haar_random_unitary<T: Scalar>(seed: u64) -> Unitary2<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_unitary_with(&mut rng)
}

pub fn haar_random_unitary_with<T: Scalar, R: rand::Rng + ?Sized>(rng: &mut R) -> Unitary2<T> {
    loop {
        let mut g = || {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(re, im)
        };
        let a = [g(), g()];
        let b = [g(), g()];

        let r11 = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
        if r11 < 1e-12 {
            continue;
        }
        let q1 = [a[0] / r11, a[1] / r11];
        let r12 = q1[0].conj() * b[0] + q1[1].conj() * b[1];
        let v = [b[0] - r12 * q1[0], b[1] - r12 * q1[1]];
        let r22 = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if r22 < 1e-12 {
            continue;
        }
        let q2 = [v[0] / r22, v[1] / r22];

        // Gram-Schmidt already yields positive real r11, r22; the phase
        // factors stay explicit so a different orthonormaliser can be swapped in.
        let d1 = Complex::new(r11, 0.0) / Complex::new(r11, 0.0).norm();
        let d2 = Complex::new(r22, 0.0) / Complex::new(r22, 0.0).norm();
        let cols = [[q1[0] * d1, q1[1] * d1], [q2[0] * d2, q2[1] * d2]];
        let conv = |z: Complex<f64>| c::<T>(z.re, z.im);
        return Unitary2::new_unchecked([
            [conv(cols[0][0]), conv(cols[1][0])],
            [conv(cols[0][1]), conv(cols[1][1])],
        ]);
    }
}

/// `U_{order[last]} ... U_{order[0]}`: `order[0]` acts first.
pub fn product_in_order<T: Scalar>(unitaries: &[Unitary2<T>], order: &[usize]) -> Result<Unitary2<T>> {
    let mut acc = Unitary2::identity();
    for &idx in order {
        let u = unitaries
            .get(idx)
            .ok_or_else(|| Error::Domain(format!("order entry {idx} out of range for {} unitaries", unitaries.len())))?;
        acc = *u * acc;
    }
    Ok(acc)
}

/// Pure state of `num_qubits` wires.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        check_register_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return domain(format!("basis index {index} out of range for {num_qubits} qubits"));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { num_qubits, amps })
    }

    /// Wraps explicit amplitudes; the length must be `2^q` with `q >= 1` and the
    /// vector normalised within [`Scalar::norm_tol`].
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return domain(format!("amplitude count {len} is not 2^q with q >= 1"));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_register_size(num_qubits)?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("state has non-finite amplitudes");
        }
        let s = StateVector { num_qubits, amps };
        let norm = s.norm();
        if (norm - T::one()).abs() > T::norm_tol() {
            return domain(format!("state is not normalised (norm {norm})"));
        }
        Ok(s)
    }

    /// Single-qubit state `alpha|0> + beta|1>`, normalised on construction.
    pub fn qubit(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(n > T::zero()) || !n.is_finite() {
            return domain("qubit amplitudes must be finite and not both zero");
        }
        Ok(StateVector { num_qubits: 1, amps: vec![alpha / n, beta / n] })
    }

    /// Product state from a ket label over `{0, 1, +, -}`, leftmost character on
    /// the most significant wire.
    pub fn from_ket_label(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.chars().collect();
        if chars.is_empty() {
            return domain("empty ket label");
        }
        let h = T::FRAC_1_SQRT_2();
        let z = Complex::new(T::zero(), T::zero());
        let mut state: Option<StateVector<T>> = None;
        for ch in chars {
            let (a, b) = match ch {
                '0' => (Complex::new(T::one(), T::zero()), z),
                '1' => (z, Complex::new(T::one(), T::zero())),
                '+' => (Complex::new(h, T::zero()), Complex::new(h, T::zero())),
                '-' => (Complex::new(h, T::zero()), Complex::new(-h, T::zero())),
                other => return domain(format!("unsupported ket symbol {other:?}")),
            };
            let q = StateVector { num_qubits: 1, amps: vec![a, b] };
            state = Some(match state {
                None => q,
                Some(high) => StateVector::tensor(&high, &q)?,
            });
        }
        Ok(state.expect("non-empty label"))
    }

    /// `|high> (x) |low>`: `low` occupies the low wires of the result.
    pub fn tensor(high: &Self, low: &Self) -> Result<Self> {
        let num_qubits = high.num_qubits + low.num_qubits;
        check_register_size(num_qubits)?;
        let mut amps = Vec::with_capacity(1 << num_qubits);
        for h in &high.amps {
            amps.extend(low.amps.iter().map(|l| h * l));
        }
        Ok(StateVector { num_qubits, amps })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    #[inline]
    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn norm(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        StateVector { num_qubits: self.num_qubits, amps: self.amps.iter().map(|z| z * factor).collect() }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        same_size(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        same_size(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm())))
    }

    /// Entrywise distance after rotating `other` by the global phase that best
    /// aligns it with `self`.
    pub fn max_abs_diff_up_to_phase(&self, other: &Self) -> Result<T> {
        let overlap = other.inner(self)?;
        let n = overlap.norm();
        let aligned = if n > T::zero() { other.scaled(overlap / n) } else { other.clone() };
        self.max_abs_diff(&aligned)
    }

    /// Same ray, with the largest-magnitude amplitude rotated onto the positive
    /// real axis (lowest index wins ties within 1e-12 relative).
    pub fn with_canonical_phase(&self) -> Self {
        let max = self.amps.iter().fold(T::zero(), |acc, z| acc.max(z.norm()));
        if max == T::zero() {
            return self.clone();
        }
        let thresh = max * (T::one() - T::lit(1e-12));
        let pivot = self.amps.iter().find(|z| z.norm() >= thresh).copied().expect("max exists");
        self.scaled(pivot.conj() / pivot.norm())
    }

    pub fn apply_gate(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.check_wires(self.num_qubits)?;
        match gate {
            Gate::SingleQubit { unitary, wire } => self.apply_single(*wire, unitary),
            Gate::Cnot { control, target } => self.apply_cnot(*control, *target),
            Gate::Toffoli { control1, control2, target } => self.apply_toffoli(*control1, *control2, *target),
            Gate::ControlledSwap { control, wire_a, wire_b } => self.apply_cswap(*control, *wire_a, *wire_b),
            Gate::OracleCall { label, .. } => return Err(Error::UnboundOracle(*label)),
        }
        Ok(())
    }

    pub(crate) fn apply_single(&mut self, wire: usize, u: &Unitary2<T>) {
        let mask = 1usize << wire;
        let m = u.entries();
        for i0 in 0..self.amps.len() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    fn apply_toffoli(&mut self, c1: usize, c2: usize, target: usize) {
        let cm = (1usize << c1) | (1usize << c2);
        let tm = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cm == cm && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    fn apply_cswap(&mut self, control: usize, a: usize, b: usize) {
        let cm = 1usize << control;
        let (am, bm) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            // visit each swapped pair once: the member with wire a set, wire b clear
            if i & cm != 0 && i & am != 0 && i & bm == 0 {
                self.amps.swap(i, i ^ am ^ bm);
            }
        }
    }

    /// Projects `wires` onto the basis value `value` (bit `j` of `value` for
    /// `wires[j]`) and returns the branch probability together with the
    /// normalised state of the remaining wires, kept in ascending order.
    pub fn condition_on(&self, wires: &[usize], value: usize) -> Result<(T, StateVector<T>)> {
        for (pos, &w) in wires.iter().enumerate() {
            if w >= self.num_qubits {
                return domain(format!("wire {w} out of range for {} qubits", self.num_qubits));
            }
            if wires[..pos].contains(&w) {
                return Err(Error::Structural(format!("wire {w} listed twice")));
            }
        }
        if wires.len() >= self.num_qubits {
            return domain("conditioning must leave at least one wire");
        }
        if wires.len() < usize::BITS as usize && value >> wires.len() != 0 {
            return domain(format!("value {value} does not fit {} wires", wires.len()));
        }
        let rest: Vec<usize> = (0..self.num_qubits).filter(|w| !wires.contains(w)).collect();
        let fixed = wires.iter().enumerate().fold(0usize, |acc, (j, &w)| acc | ((value >> j & 1) << w));
        let mut amps = Vec::with_capacity(1 << rest.len());
        for r in 0..1usize << rest.len() {
            let idx = rest.iter().enumerate().fold(fixed, |acc, (j, &w)| acc | ((r >> j & 1) << w));
            amps.push(self.amps[idx]);
        }
        let prob = amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if prob == T::zero() {
            return domain(format!("branch {value} has zero probability"));
        }
        let n = prob.sqrt();
        for z in &mut amps {
            *z /= n;
        }
        Ok((prob, StateVector { num_qubits: rest.len(), amps }))
    }

    /// State of `wire` when it is unentangled with the rest, returned with the
    /// canonical global phase (see [`StateVector::with_canonical_phase`]).
    pub fn pure_qubit(&self, wire: usize) -> Result<StateVector<T>> {
        if wire >= self.num_qubits {
            return domain(format!("wire {wire} out of range for {} qubits", self.num_qubits));
        }
        let mask = 1usize << wire;
        let zero = Complex::new(T::zero(), T::zero());
        // reduced density matrix rho = [[r00, r01], [r01*, r11]]
        let (mut r00, mut r11, mut r01) = (T::zero(), T::zero(), zero);
        let mut best = (T::zero(), 0usize);
        for i0 in (0..self.amps.len()).filter(|i| i & mask == 0) {
            let (a0, a1) = (self.amps[i0], self.amps[i0 | mask]);
            r00 += a0.norm_sqr();
            r11 += a1.norm_sqr();
            r01 += a0 * a1.conj();
            let w = a0.norm_sqr() + a1.norm_sqr();
            if w > best.0 {
                best = (w, i0);
            }
        }
        let trace = r00 + r11;
        let purity = (r00 * r00 + r11 * r11 + T::lit(2.0) * r01.norm_sqr()) / (trace * trace);
        if (T::one() - purity).abs() > T::norm_tol() {
            return Err(Error::NotPure { wire, purity: purity.to_f64_lossy() });
        }
        let i0 = best.1;
        let q = StateVector::qubit(self.amps[i0], self.amps[i0 | mask])?;
        Ok(q.with_canonical_phase())
    }

    /// Nonzero amplitudes as `(index, amplitude)`.
    pub fn support(&self, tol: T) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        self.amps.iter().copied().enumerate().filter(move |(_, z)| z.norm() > tol)
    }

    pub(crate) fn from_raw(num_qubits: usize, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        StateVector { num_qubits, amps }
    }

    pub fn cast<U: Scalar>(&self) -> StateVector<U> {
        StateVector {
            num_qubits: self.num_qubits,
            amps: self
                .amps
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

impl<T: Scalar> fmt::Display for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, z) in self.support(T::norm_tol()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{}>", z.re, z.im, ket_label(i, self.num_qubits))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct StateVectorRepr {
    num_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl<T: Scalar> Serialize for StateVector<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateVectorRepr {
            num_qubits: self.num_qubits,
            amplitudes: self.amps.iter().map(|&z| complex_to_pair(z)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for StateVector<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = StateVectorRepr::deserialize(deserializer)?;
        let s = StateVector::from_amplitudes(repr.amplitudes.into_iter().map(pair_to_complex).collect())
            .map_err(D::Error::custom)?;
        if s.num_qubits != repr.num_qubits {
            return Err(D::Error::custom(format!(
                "num_qubits {} does not match {} amplitudes",
                repr.num_qubits,
                s.dim()
            )));
        }
        Ok(s)
    }
}

/// `max_k |a_k - b_k| <= tol`. Sensitive to global phase; see [`fidelity`].
pub fn compare_states<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>, tol: T) -> Result<bool> {
    Ok(a.max_abs_diff(b)? <= tol)
}

/// `|<a|b>|`.
pub fn fidelity<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    Ok(a.inner(b)?.norm())
}

pub(crate) fn check_register_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return domain("a register needs at least one qubit");
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "{num_qubits} qubits exceeds the simulator limit of {MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn same_size<T>(a: &StateVector<T>, b: &StateVector<T>) -> Result<()> {
    if a.num_qubits != b.num_qubits {
        return domain(format!("state sizes differ: {} vs {} qubits", a.num_qubits, b.num_qubits));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = StateVector<f64>;

    #[test]
    fn basis_states() {
        assert_eq!(S::basis_state(1, 0).unwrap().amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = S::basis_state(2, 3).unwrap();
        assert_eq!(s.amplitude(3), c(1.0, 0.0));
        assert_eq!(s.support(0.0).count(), 1);
        let s = S::basis_state(3, 5).unwrap();
        assert_eq!(s.amplitude(5), c(1.0, 0.0));
        assert_eq!(ket_label(5, 3), "101");
        assert!(matches!(S::basis_state(2, 4), Err(Error::Domain(_))));
        assert!(matches!(S::basis_state(0, 0), Err(Error::Domain(_))));
        assert!(matches!(S::basis_state(40, 0), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn single_qubit_kernels() {
        let mut s = S::basis_state(2, 0).unwrap();
        s.apply_gate(&Gate::single(Unitary2::pauli_x(), 0)).unwrap();
        assert!(compare_states(&s, &S::basis_state(2, 1).unwrap(), 1e-12).unwrap());

        let mut h = S::basis_state(1, 0).unwrap();
        h.apply_gate(&Gate::single(Unitary2::hadamard(), 0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h.amplitude(0) - c(r, 0.0)).norm() < 1e-15);
        assert!((h.amplitude(1) - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fredkin_on_basis() {
        // |1>_c |10> -> |1>_c |01>
        let mut s = S::basis_state(3, 0b110).unwrap();
        s.apply_gate(&Gate::cswap(2, 0, 1)).unwrap();
        assert_eq!(s.amplitude(0b101), c(1.0, 0.0));
        // control off: untouched
        let mut s = S::basis_state(3, 0b010).unwrap();
        s.apply_gate(&Gate::cswap(2, 0, 1)).unwrap();
        assert_eq!(s.amplitude(0b010), c(1.0, 0.0));
    }

    #[test]
    fn wire_collision_is_structural() {
        let mut s = S::basis_state(3, 0).unwrap();
        assert!(matches!(s.apply_gate(&Gate::cnot(1, 1)), Err(Error::Structural(_))));
        assert!(matches!(s.apply_gate(&Gate::cswap(0, 2, 2)), Err(Error::Structural(_))));
        assert!(matches!(s.apply_gate(&Gate::cnot(0, 3)), Err(Error::Structural(_))));
    }

    #[test]
    fn compare_and_fidelity() {
        let z = S::basis_state(1, 0).unwrap();
        let o = S::basis_state(1, 1).unwrap();
        assert!(compare_states(&z, &z, 1e-9).unwrap());
        assert!(!compare_states(&z, &o, 1e-9).unwrap());
        let v = S::from_ket_label("+").unwrap();
        let flipped = v.scaled(Complex::from_polar(1.0, std::f64::consts::PI));
        assert!(!compare_states(&v, &flipped, 1e-9).unwrap());
        assert!((fidelity(&v, &flipped).unwrap() - 1.0).abs() < 1e-9);
        assert!(v.max_abs_diff_up_to_phase(&flipped).unwrap() < 1e-12);
        assert!(compare_states(&z, &S::basis_state(2, 0).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn product_in_order_examples() {
        let us = [Unitary2::<f64>::identity(), Unitary2::pauli_x()];
        assert_eq!(product_in_order(&us, &[1]).unwrap(), Unitary2::pauli_x());
        let xz = [Unitary2::<f64>::pauli_x(), Unitary2::pauli_z()];
        let zx = product_in_order(&xz, &[0, 1]).unwrap();
        let expected = [[c(0.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(0.0, 0.0)]];
        assert!(zx.max_abs_diff(&Unitary2::new(expected).unwrap()) < 1e-15);
        assert_eq!(product_in_order(&xz, &[]).unwrap(), Unitary2::identity());
        assert!(matches!(product_in_order(&xz, &[2]), Err(Error::Domain(_))));
    }

    #[test]
    fn haar_is_deterministic_and_unitary() {
        for seed in 0..200 {
            let a = haar_random_unitary::<f64>(seed);
            assert_eq!(a, haar_random_unitary::<f64>(seed));
            assert!(a.unitarity_deviation() < 1e-10);
        }
        assert_ne!(haar_random_unitary::<f64>(1), haar_random_unitary::<f64>(2));
    }

    #[test]
    fn haar_second_moment() {
        // Haar average of |tr U|^2 over U(2) equals 1.
        let draws = 10_000;
        let mean = (0..draws).map(|s| haar_random_unitary::<f64>(s).trace().norm_sqr() / 4.0).sum::<f64>()
            / draws as f64;
        assert!((mean - 0.25).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn unitary_json_roundtrip_and_validation() {
        let u = haar_random_unitary::<f64>(9);
        let js = serde_json::to_string(&u).unwrap();
        let back: Unitary2<f64> = serde_json::from_str(&js).unwrap();
        assert!(back.max_abs_diff(&u) < 1e-15);
        let x: Unitary2<f64> = serde_json::from_str("[[[0,0],[1,0]],[[1,0],[0,0]]]").unwrap();
        assert_eq!(x, Unitary2::pauli_x());
        assert!(serde_json::from_str::<Unitary2<f64>>("[[[1,0],[1,0]],[[1,0],[0,0]]]").is_err());
    }

    #[test]
    fn state_json_rejects_unnormalised() {
        let s: S = serde_json::from_str(r#"{"num_qubits":1,"amplitudes":[[0,0],[0,1]]}"#).unwrap();
        assert_eq!(s.amplitude(1), c(0.0, 1.0));
        assert!(serde_json::from_str::<S>(r#"{"num_qubits":1,"amplitudes":[[1,0],[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<S>(r#"{"num_qubits":2,"amplitudes":[[1,0],[0,0]]}"#).is_err());
    }

    #[test]
    fn ket_labels_are_msb_first() {
        let s = S::from_ket_label("01").unwrap();
        assert_eq!(s.amplitude(1), c(1.0, 0.0));
        let p = S::from_ket_label("+0").unwrap();
        assert!((p.amplitude(0b10).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(S::from_ket_label("2").is_err());
    }

    #[test]
    fn pure_qubit_and_conditioning() {
        let psi = S::qubit(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let rest = S::from_ket_label("+1").unwrap();
        let joint = S::tensor(&rest, &psi).unwrap();
        let q = joint.pure_qubit(0).unwrap();
        assert!(q.max_abs_diff_up_to_phase(&psi).unwrap() < 1e-12);

        let bell = S::from_amplitudes(vec![
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap();
        assert!(matches!(bell.pure_qubit(0), Err(Error::NotPure { .. })));
        let (p, branch) = bell.condition_on(&[1], 1).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!(compare_states(&branch, &S::basis_state(1, 1).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn bitstrings() {
        let b = BitString::from_value(6, 3).unwrap();
        assert_eq!(b.to_string(), "110");
        assert_eq!(b.value(), 6);
        assert_eq!(b.concat(&BitString::zeros(2)).value(), 24);
        assert!(BitString::from_value(8, 3).is_err());
    }

    #[test]
    fn f32_backend_works() {
        let mut s = StateVector::<f32>::basis_state(2, 0).unwrap();
        s.apply_gate(&Gate::single(Unitary2::hadamard(), 1)).unwrap();
        s.apply_gate(&Gate::cnot(1, 0)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-6);
        let u = haar_random_unitary::<f32>(3);
        assert!(u.unitarity_deviation() < f32::unitary_tol());
    }
}
