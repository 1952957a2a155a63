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

//! Triangular quantum-switch networks.
//!
//! A switch `S_i^(k)` (row `i`, column `k`, `1 <= i <= k <= N-1`) has two
//! inputs and two outputs. Control bit `c` routes `in_j` to `out_{j xor c}`:
//! `0` passes, `1` crosses. Port orientation:
//!
//! * `in0` is fed along the row (from `U_0`/`S_1^(k-1)` for row 1, from
//!   `S_{i-1}^(k-1)` otherwise), `in1` from the column chain (`U_k` for the
//!   top switch of column `k`, `S_{i+1}^(k)` otherwise);
//! * `out0` continues toward the lower destination (`S_1^(k+1)` or slot 0 for
//!   row 1, `S_{i-1}^(k)` otherwise), `out1` toward the higher one
//!   (`S_{i+1}^(k+1)`, or slot `i` in the last column).
//!
//! Output slot `j` holds channel `sigma(j)`, and the slots are composed as
//! `U_{sigma(N-1)} ... U_{sigma(0)}`.
//!
//! Control assignments are indexed by an integer whose bit `w` drives the
//! `w`-th switch in `(k, i)` order; the same order assigns control wires in
//! coherent simulations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::qcore::{check_register_size, product_in_order, StateVector, Unitary2};
use crate::scalar::Scalar;

/// Largest `N` for which [`permutation_table`] materialises every row.
pub const MAX_TABLE_CHANNELS: usize = 7;
/// Largest `N` for which exhaustive enumeration is attempted at all.
pub const MAX_ENUMERATION_CHANNELS: usize = 8;

/// Switch `S_row^(col)`. Ordered by `(col, row)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwitchId {
    #[serde(rename = "i")]
    pub row: usize,
    #[serde(rename = "k")]
    pub col: usize,
}

impl SwitchId {
    pub fn new(row: usize, col: usize) -> Self {
        SwitchId { row, col }
    }
}

impl Ord for SwitchId {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.col, self.row).cmp(&(other.col, other.row))
    }
}

impl PartialOrd for SwitchId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SwitchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}^({})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    In0,
    In1,
    Out0,
    Out1,
}

impl Side {
    fn is_input(self) -> bool {
        matches!(self, Side::In0 | Side::In1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Port {
    Switch {
        #[serde(flatten)]
        id: SwitchId,
        side: Side,
    },
    /// Where channel `U_label` enters the network.
    Input { label: usize },
    /// Output slot `U'_slot`.
    Output { slot: usize },
}

impl Port {
    fn sw(row: usize, col: usize, side: Side) -> Self {
        Port::Switch { id: SwitchId::new(row, col), side }
    }

    fn is_source(&self) -> bool {
        match self {
            Port::Switch { side, .. } => !side.is_input(),
            Port::Input { .. } => true,
            Port::Output { .. } => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub from: Port,
    pub to: Port,
}

#[derive(Debug, Clone, Copy)]
struct CompiledSwitch {
    inputs: [usize; 2],
    outputs: [usize; 2],
    control_bit: usize,
}

#[derive(Debug, Clone)]
pub struct SwitchNetwork {
    n_channels: usize,
    /// Topological order.
    switches: Vec<SwitchId>,
    /// `(k, i)` order; position = control bit.
    control_order: Vec<SwitchId>,
    links: Vec<Link>,
    compiled: Vec<CompiledSwitch>,
    input_links: Vec<usize>,
    slot_links: Vec<usize>,
}

/// Builds the triangular network on `n_channels >= 2` channels.
pub fn build_network(n_channels: usize) -> Result<SwitchNetwork> {
    use Side::*;
    let big_n = n_channels;
    if big_n < 2 {
        return domain(format!("a switch network needs N >= 2, got {big_n}"));
    }
    let mut links = Vec::new();
    let mut link = |from, to| links.push(Link { from, to });

    // row 1 carries U_0 through every column to slot 0
    link(Port::Input { label: 0 }, Port::sw(1, 1, In0));
    for k in 1..big_n - 1 {
        link(Port::sw(1, k, Out0), Port::sw(1, k + 1, In0));
    }
    link(Port::sw(1, big_n - 1, Out0), Port::Output { slot: 0 });

    // diagonal hand-offs into the next column
    for k in 1..big_n - 1 {
        for i in 1..=k {
            link(Port::sw(i, k, Out1), Port::sw(i + 1, k + 1, In0));
        }
    }

    // U_k enters column k at the top and runs down the chain
    for k in 1..big_n {
        link(Port::Input { label: k }, Port::sw(k, k, In1));
        for i in (2..=k).rev() {
            link(Port::sw(i, k, Out0), Port::sw(i - 1, k, In1));
        }
    }

    // last column feeds slots 1..N-1
    for i in 1..big_n {
        link(Port::sw(i, big_n - 1, Out1), Port::Output { slot: i });
    }

    SwitchNetwork::from_links(big_n, links)
}

impl SwitchNetwork {
    /// Validates an arbitrary wiring and prepares it for evaluation: every
    /// switch port, channel input and output slot must be used exactly once
    /// and the port graph must be acyclic.
    pub fn from_links(n_channels: usize, links: Vec<Link>) -> Result<Self> {
        if n_channels < 2 {
            return domain(format!("a switch network needs N >= 2, got {n_channels}"));
        }
        let bad = |msg: String| Err(Error::Structural(msg));

        let mut seen_from = HashMap::new();
        let mut seen_to = HashMap::new();
        let mut switch_ids = BTreeSet::new();
        for (idx, l) in links.iter().enumerate() {
            if !l.from.is_source() || l.to.is_source() {
                return bad(format!("link {idx} runs from {:?} to {:?}", l.from, l.to));
            }
            for p in [l.from, l.to] {
                match p {
                    Port::Switch { id, .. } => {
                        if id.row == 0 || id.col == 0 {
                            return bad(format!("switch indices start at 1, got {id}"));
                        }
                        switch_ids.insert(id);
                    }
                    Port::Input { label } if label >= n_channels => {
                        return bad(format!("channel label {label} out of range"))
                    }
                    Port::Output { slot } if slot >= n_channels => return bad(format!("slot {slot} out of range")),
                    _ => {}
                }
            }
            if seen_from.insert(l.from, idx).is_some() {
                return bad(format!("port {:?} drives more than one link", l.from));
            }
            if seen_to.insert(l.to, idx).is_some() {
                return bad(format!("port {:?} is fed by more than one link", l.to));
            }
        }
        let expected = 4 * switch_ids.len() + 2 * n_channels;
        if seen_from.len() + seen_to.len() != expected {
            return bad(format!(
                "wiring uses {} port ends, a network with {} switches needs {expected}",
                seen_from.len() + seen_to.len(),
                switch_ids.len()
            ));
        }
        let lookup = |map: &HashMap<Port, usize>, p: Port| -> Result<usize> {
            map.get(&p).copied().ok_or_else(|| Error::Structural(format!("port {p:?} is unconnected")))
        };

        let control_order: Vec<SwitchId> = switch_ids.iter().copied().collect();
        let mut compiled_by_id = HashMap::new();
        for (bit, &id) in control_order.iter().enumerate() {
            let sw = |side| Port::Switch { id, side };
            compiled_by_id.insert(
                id,
                CompiledSwitch {
                    inputs: [lookup(&seen_to, sw(Side::In0))?, lookup(&seen_to, sw(Side::In1))?],
                    outputs: [lookup(&seen_from, sw(Side::Out0))?, lookup(&seen_from, sw(Side::Out1))?],
                    control_bit: bit,
                },
            );
        }
        let input_links =
            (0..n_channels).map(|l| lookup(&seen_from, Port::Input { label: l })).collect::<Result<Vec<_>>>()?;
        let slot_links =
            (0..n_channels).map(|s| lookup(&seen_to, Port::Output { slot: s })).collect::<Result<Vec<_>>>()?;

        let mut net = SwitchNetwork {
            n_channels,
            switches: Vec::new(),
            control_order,
            links,
            compiled: Vec::new(),
            input_links,
            slot_links,
        };
        let order = net.topological_order(false)?;
        net.compiled = order.iter().map(|id| compiled_by_id[id]).collect();
        net.switches = order;
        Ok(net)
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    /// Switches in the topological order used for evaluation.
    pub fn switches(&self) -> &[SwitchId] {
        &self.switches
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    /// Switches sorted by `(k, i)`: entry `w` is driven by control bit `w`.
    pub fn control_order(&self) -> &[SwitchId] {
        &self.control_order
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Kahn's algorithm over switches; ties broken by smallest `(k, i)`, or by
    /// largest when `prefer_last` is set. Fails on a cycle.
    pub fn topological_order(&self, prefer_last: bool) -> Result<Vec<SwitchId>> {
        let mut preds: BTreeMap<SwitchId, BTreeSet<SwitchId>> =
            self.control_order.iter().map(|&id| (id, BTreeSet::new())).collect();
        for l in &self.links {
            if let (Port::Switch { id: a, .. }, Port::Switch { id: b, .. }) = (l.from, l.to) {
                if a == b {
                    return Err(Error::Structural(format!("{a} feeds itself")));
                }
                preds.get_mut(&b).expect("known switch").insert(a);
            }
        }
        let mut ready: BTreeSet<SwitchId> =
            preds.iter().filter(|(_, p)| p.is_empty()).map(|(&id, _)| id).collect();
        let mut order = Vec::with_capacity(preds.len());
        while let Some(next) = if prefer_last { ready.pop_last() } else { ready.pop_first() } {
            order.push(next);
            preds.remove(&next);
            for (&id, p) in preds.iter_mut() {
                if p.remove(&next) && p.is_empty() {
                    ready.insert(id);
                }
            }
        }
        if !preds.is_empty() {
            return Err(Error::Structural("switch wiring contains a cycle".into()));
        }
        Ok(order)
    }

    fn assignment_count(&self) -> Result<u64> {
        let m = self.switch_count();
        if m >= 63 {
            return Err(Error::ResourceLimit(format!("{m} switches cannot be enumerated")));
        }
        Ok(1u64 << m)
    }

    /// Evaluates the assignment with index `bits` into `sigma`, using
    /// `scratch` for the per-link labels.
    fn evaluate_bits_into(&self, bits: u64, scratch: &mut Vec<usize>, sigma: &mut [usize]) {
        scratch.clear();
        scratch.resize(self.links.len(), usize::MAX);
        for (label, &l) in self.input_links.iter().enumerate() {
            scratch[l] = label;
        }
        for sw in &self.compiled {
            let (mut a, mut b) = (scratch[sw.inputs[0]], scratch[sw.inputs[1]]);
            if bits >> sw.control_bit & 1 == 1 {
                std::mem::swap(&mut a, &mut b);
            }
            scratch[sw.outputs[0]] = a;
            scratch[sw.outputs[1]] = b;
        }
        for (slot, &l) in self.slot_links.iter().enumerate() {
            sigma[slot] = scratch[l];
        }
    }

    /// Evaluation by assignment index.
    pub fn evaluate_index(&self, bits: u64) -> Result<Permutation> {
        if bits >= self.assignment_count()? {
            return domain(format!("assignment index {bits} out of range"));
        }
        let mut sigma = vec![0; self.n_channels];
        self.evaluate_bits_into(bits, &mut Vec::new(), &mut sigma);
        Permutation::new(sigma)
    }
}

/// One control bit per switch.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ControlAssignment {
    pub bits: BTreeMap<SwitchId, bool>,
}

impl ControlAssignment {
    /// Bit `w` of `index` drives the `w`-th switch in `(k, i)` order.
    pub fn from_index(network: &SwitchNetwork, index: u64) -> Self {
        let bits = network
            .control_order()
            .iter()
            .enumerate()
            .map(|(w, &id)| (id, index >> w & 1 == 1))
            .collect();
        ControlAssignment { bits }
    }

    /// Bits listed in `(k, i)` order, e.g. `[s_1^(1), s_1^(2), s_2^(2)]` for `N = 3`.
    pub fn from_ordered_bits(network: &SwitchNetwork, bits: &[bool]) -> Result<Self> {
        if bits.len() != network.switch_count() {
            return domain(format!("{} bits for {} switches", bits.len(), network.switch_count()));
        }
        Ok(ControlAssignment { bits: network.control_order().iter().copied().zip(bits.iter().copied()).collect() })
    }

    pub fn to_index(&self, network: &SwitchNetwork) -> Result<u64> {
        network.assignment_count()?;
        let mut index = 0u64;
        for (w, id) in network.control_order().iter().enumerate() {
            match self.bits.get(id) {
                Some(true) => index |= 1 << w,
                Some(false) => {}
                None => return domain(format!("no control bit for {id}")),
            }
        }
        if self.bits.len() != network.switch_count() {
            return domain("assignment names switches that are not in the network");
        }
        Ok(index)
    }

    /// Bits as a `0`/`1` string in `(k, i)` order.
    pub fn ordered_string(&self) -> String {
        self.bits.values().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct AssignmentRepr {
    bits: BTreeMap<String, u8>,
}

impl Serialize for ControlAssignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AssignmentRepr {
            bits: self.bits.iter().map(|(id, &b)| (format!("{}.{}", id.row, id.col), u8::from(b))).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ControlAssignment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = AssignmentRepr::deserialize(deserializer)?;
        let mut bits = BTreeMap::new();
        for (key, v) in repr.bits {
            let (i, k) = key
                .split_once('.')
                .and_then(|(i, k)| Some((i.parse().ok()?, k.parse().ok()?)))
                .ok_or_else(|| D::Error::custom(format!("switch key {key:?} is not \"i.k\"")))?;
            let bit = match v {
                0 => false,
                1 => true,
                other => return Err(D::Error::custom(format!("control bit must be 0 or 1, got {other}"))),
            };
            bits.insert(SwitchId::new(i, k), bit);
        }
        Ok(ControlAssignment { bits })
    }
}

/// Slot `j` carries channel `sigma[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    sigma: Vec<usize>,
}

impl Permutation {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; sigma.len()];
        for &s in &sigma {
            if s >= sigma.len() || std::mem::replace(&mut seen[s], true) {
                return domain(format!("{sigma:?} is not a permutation"));
            }
        }
        Ok(Permutation { sigma })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { sigma: (0..n).collect() }
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Application order for [`product_in_order`]: slot 0 acts first.
    pub fn as_order(&self) -> &[usize] {
        &self.sigma
    }

    /// `"U2U1U0"`-style product, leftmost factor acting last.
    pub fn product_string(&self) -> String {
        self.sigma
            .iter()
            .rev()
            .map(|&l| if l < 10 { format!("U{l}") } else { format!("U{{{l}}}") })
            .collect()
    }

    /// Inverse of [`Permutation::product_string`].
    pub fn from_product_string(s: &str) -> Result<Self> {
        let mut labels = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            rest = rest.strip_prefix('U').ok_or_else(|| Error::Domain(format!("bad product string {s:?}")))?;
            let (num, tail) = if let Some(braced) = rest.strip_prefix('{') {
                braced.split_once('}').ok_or_else(|| Error::Domain(format!("bad product string {s:?}")))?
            } else {
                rest.split_at(rest.chars().next().map_or(0, char::len_utf8))
            };
            labels.push(num.parse::<usize>().map_err(|_| Error::Domain(format!("bad product string {s:?}")))?);
            rest = tail;
        }
        labels.reverse();
        Permutation::new(labels)
    }

    /// Lexicographic rank in `0..n!`.
    pub fn rank(&self) -> u64 {
        rank_of(&self.sigma)
    }

    pub fn unrank(n: usize, mut rank: u64) -> Result<Self> {
        if rank >= factorial(n) {
            return domain(format!("rank {rank} out of range for n = {n}"));
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let mut digits = vec![0; n];
        for i in (0..n).rev() {
            let base = (n - i) as u64;
            digits[i] = (rank % base) as usize;
            rank /= base;
        }
        Ok(Permutation { sigma: digits.into_iter().map(|d| pool.remove(d)).collect() })
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Permutation::new(Vec::deserialize(deserializer)?).map_err(D::Error::custom)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.product_string())
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Permutation routed by `assignment`.
pub fn evaluate(network: &SwitchNetwork, assignment: &ControlAssignment) -> Result<Permutation> {
    network.evaluate_index(assignment.to_index(network)?)
}

/// Label propagation along an explicit switch order, independent of the
/// compiled fast path. The order must respect the wiring.
pub fn evaluate_in_order(
    network: &SwitchNetwork,
    assignment: &ControlAssignment,
    order: &[SwitchId],
) -> Result<Permutation> {
    let mut at: HashMap<Port, usize> = HashMap::new();
    let deliver = |at: &mut HashMap<Port, usize>, from: Port, label: usize| {
        let l = network.links.iter().find(|l| l.from == from).expect("validated wiring");
        at.insert(l.to, label);
    };
    for label in 0..network.n_channels {
        deliver(&mut at, Port::Input { label }, label);
    }
    if order.len() != network.switch_count() {
        return domain("order must list every switch once");
    }
    for &id in order {
        let bit = *assignment.bits.get(&id).ok_or_else(|| Error::Domain(format!("no control bit for {id}")))?;
        let take = |at: &mut HashMap<Port, usize>, side| {
            at.remove(&Port::Switch { id, side })
                .ok_or_else(|| Error::Structural(format!("{id} evaluated before its inputs")))
        };
        let (a, b) = (take(&mut at, Side::In0)?, take(&mut at, Side::In1)?);
        let (o0, o1) = if bit { (b, a) } else { (a, b) };
        deliver(&mut at, Port::Switch { id, side: Side::Out0 }, o0);
        deliver(&mut at, Port::Switch { id, side: Side::Out1 }, o1);
    }
    let sigma = (0..network.n_channels)
        .map(|slot| at.get(&Port::Output { slot }).copied().ok_or_else(|| Error::Structural(format!("slot {slot} empty"))))
        .collect::<Result<Vec<_>>>()?;
    Permutation::new(sigma)
}

/// Every assignment with its permutation, in assignment-index order.
#[derive(Debug, Clone)]
pub struct PermutationTable {
    n_channels: usize,
    /// Lexicographic rank of the permutation of each assignment index.
    ranks: Vec<u32>,
}

impl PermutationTable {
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn get(&self, index: u64) -> Option<Permutation> {
        let r = *self.ranks.get(usize::try_from(index).ok()?)?;
        Some(Permutation::unrank(self.n_channels, r as u64).expect("stored ranks are valid"))
    }

    /// `(assignment index, permutation)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (u64, Permutation)> + '_ {
        (0..self.ranks.len() as u64).map(move |i| (i, self.get(i).expect("in range")))
    }
}

/// Exhaustive table over all `2^{N(N-1)/2}` assignments (`N <= 7`).
pub fn permutation_table(network: &SwitchNetwork) -> Result<PermutationTable> {
    if network.n_channels > MAX_TABLE_CHANNELS {
        return Err(Error::ResourceLimit(format!(
            "a full table for N = {} is too large; the limit is N = {MAX_TABLE_CHANNELS}",
            network.n_channels
        )));
    }
    let mut ranks = Vec::with_capacity(network.assignment_count()? as usize);
    for_each_assignment(network, |_, p| ranks.push(rank_of(p) as u32))?;
    Ok(PermutationTable { n_channels: network.n_channels, ranks })
}

fn rank_of(sigma: &[usize]) -> u64 {
    let n = sigma.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller_after = sigma[i + 1..].iter().filter(|&&x| x < sigma[i]).count() as u64;
        rank = rank * (n - i) as u64 + smaller_after;
    }
    rank
}

fn for_each_assignment(network: &SwitchNetwork, mut f: impl FnMut(u64, &[usize])) -> Result<()> {
    if network.n_channels > MAX_ENUMERATION_CHANNELS {
        return Err(Error::ResourceLimit(format!(
            "exhaustive enumeration is limited to N <= {MAX_ENUMERATION_CHANNELS}"
        )));
    }
    let mut scratch = Vec::with_capacity(network.links.len());
    let mut sigma = vec![0; network.n_channels];
    for bits in 0..network.assignment_count()? {
        network.evaluate_bits_into(bits, &mut scratch, &mut sigma);
        f(bits, &sigma);
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SurjectivityReport {
    #[serde(rename = "N")]
    pub n_channels: usize,
    pub assignments: u64,
    pub permutations_total: u64,
    pub permutations_reached: u64,
    pub surjective: bool,
    /// Assignment count for each reached permutation, keyed by lexicographic rank.
    pub histogram: BTreeMap<u64, u64>,
}

impl SurjectivityReport {
    /// Histogram counts in descending order.
    pub fn multiplicities(&self) -> Vec<u64> {
        let mut m: Vec<u64> = self.histogram.values().copied().collect();
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }
}

/// Streams every assignment (`N <= 8`) and checks that all `N!` orderings occur.
pub fn check_all_permutations(network: &SwitchNetwork) -> Result<SurjectivityReport> {
    let total = factorial(network.n_channels);
    let mut counts = vec![0u64; total as usize];
    for_each_assignment(network, |_, p| counts[rank_of(p) as usize] += 1)?;
    let histogram: BTreeMap<u64, u64> =
        counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(r, &c)| (r as u64, c)).collect();
    let reached = histogram.len() as u64;
    Ok(SurjectivityReport {
        n_channels: network.n_channels,
        assignments: network.assignment_count()?,
        permutations_total: total,
        permutations_reached: reached,
        surjective: reached == total,
        histogram,
    })
}

/// `sum_b alpha_b |b> (x) Z_b |psi>` with `Z_b` the slot product routed by
/// assignment `b`. The target qubit is wire 0; control wire `w` of
/// `control_state` becomes wire `w + 1`.
pub fn simulate_coherent<T: Scalar>(
    network: &SwitchNetwork,
    unitaries: &[Unitary2<T>],
    control_state: &StateVector<T>,
    psi: &StateVector<T>,
) -> Result<StateVector<T>> {
    if unitaries.len() != network.n_channels {
        return domain(format!("{} unitaries for N = {}", unitaries.len(), network.n_channels));
    }
    if control_state.num_qubits() != network.switch_count() {
        return domain(format!(
            "control state has {} qubits, the network has {} switches",
            control_state.num_qubits(),
            network.switch_count()
        ));
    }
    if psi.num_qubits() != 1 {
        return domain("psi must be a single qubit");
    }
    check_register_size(control_state.num_qubits() + 1)?;
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; control_state.dim() * 2];
    let mut scratch = Vec::new();
    let mut sigma = vec![0; network.n_channels];
    let mut cache: HashMap<Vec<usize>, StateVector<T>> = HashMap::new();
    for (b, alpha) in control_state.amplitudes().iter().enumerate() {
        if *alpha == zero {
            continue;
        }
        network.evaluate_bits_into(b as u64, &mut scratch, &mut sigma);
        let zpsi = match cache.get(&sigma) {
            Some(v) => v,
            None => {
                let v = product_in_order(unitaries, &sigma)?.apply(psi)?;
                cache.entry(sigma.clone()).or_insert(v)
            }
        };
        out[b << 1] = alpha * zpsi.amplitude(0);
        out[b << 1 | 1] = alpha * zpsi.amplitude(1);
    }
    Ok(StateVector::from_raw(control_state.num_qubits() + 1, out))
}

/// Number of times each channel enters the network.
pub fn uses_per_channel(network: &SwitchNetwork) -> BTreeMap<usize, usize> {
    let mut uses = BTreeMap::new();
    for l in &network.links {
        if let Port::Input { label } = l.from {
            *uses.entry(label).or_default() += 1;
        }
    }
    uses
}

#[derive(Serialize, Deserialize)]
struct NetworkRepr {
    #[serde(rename = "N")]
    n_channels: usize,
    switches: Vec<SwitchId>,
    wiring: Vec<Link>,
}

impl Serialize for SwitchNetwork {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NetworkRepr { n_channels: self.n_channels, switches: self.switches.clone(), wiring: self.links.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SwitchNetwork {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = NetworkRepr::deserialize(deserializer)?;
        let net = SwitchNetwork::from_links(repr.n_channels, repr.wiring).map_err(D::Error::custom)?;
        let listed: BTreeSet<_> = repr.switches.iter().copied().collect();
        if listed.len() != repr.switches.len() || listed.iter().ne(net.control_order.iter()) {
            return Err(D::Error::custom("switch list does not match the wiring"));
        }
        Ok(net)
    }
}

/// Reference rows for `N = 3`: control bits `s_1^(1) s_1^(2) s_2^(2)` and the
/// resulting slot product `U'_2 U'_1 U'_0`.
pub const TABLE_N3: [(&str, &str); 8] = [
    ("000", "U2U1U0"),
    ("110", "U2U1U0"),
    ("100", "U2U0U1"),
    ("010", "U2U0U1"),
    ("101", "U0U2U1"),
    ("001", "U1U2U0"),
    ("011", "U1U0U2"),
    ("111", "U0U1U2"),
];

/// Compares the `N = 3` network against [`TABLE_N3`]; returns mismatching
/// rows as `(bits, expected, got)`.
pub fn diff_against_reference_table(network: &SwitchNetwork) -> Result<Vec<(String, String, String)>> {
    if network.n_channels != 3 {
        return domain("the reference table is for N = 3");
    }
    let mut diffs = Vec::new();
    for (bits, product) in TABLE_N3 {
        let bits_vec: Vec<bool> = bits.chars().map(|c| c == '1').collect();
        let a = ControlAssignment::from_ordered_bits(network, &bits_vec)?;
        let got = evaluate(network, &a)?;
        let expected = Permutation::from_product_string(product)?;
        if got != expected {
            diffs.push((bits.to_string(), product.to_string(), got.product_string()));
        }
    }
    Ok(diffs)
}
