//! The 3SUM-Indexing problem: preprocess two size-`n` sets of group
//! elements so that a query `z` can be answered with a witness pair
//! `(a1, a2)`, `a1 + a2 = z`, or reported absent.

use crate::cellprobe::{CellProbeSolution, Memory, ProbeHandle};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::inversion::{hellman_build, HellmanTable};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Desk-scale default cap on group orders for table-based solutions.
pub const DEFAULT_GROUP_CAP: u64 = 1 << 24;

/// Two sorted, deduplicated element lists of equal size over one group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TsumInstance {
    pub group: GroupSpec,
    #[serde(rename = "A1")]
    a1: Vec<GroupElement>,
    #[serde(rename = "A2")]
    a2: Vec<GroupElement>,
}

/// Witness pair or absence marker for one query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumsetAnswer {
    pub witness: Option<(GroupElement, GroupElement)>,
}

impl SumsetAnswer {
    pub fn none() -> Self {
        SumsetAnswer { witness: None }
    }

    pub fn pair(a1: GroupElement, a2: GroupElement) -> Self {
        SumsetAnswer { witness: Some((a1, a2)) }
    }
}

fn check_sorted_distinct(list: &[GroupElement], group: &GroupSpec) -> Result<()> {
    for w in list.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidParameters(format!(
                "element list not strictly increasing around id {}",
                w[1].id()
            )));
        }
    }
    for e in list {
        if !group.contains(e) {
            return Err(Error::InvalidElement { id: e.id().clone(), order: group.order() });
        }
    }
    Ok(())
}

impl TsumInstance {
    /// Strict constructor: both lists must already be strictly increasing,
    /// valid in the group, and of equal length.
    pub fn new(group: GroupSpec, mut a1: Vec<GroupElement>, mut a2: Vec<GroupElement>) -> Result<Self> {
        group.validate()?;
        a1.sort();
        a2.sort();
        check_sorted_distinct(&a1, &group)?;
        check_sorted_distinct(&a2, &group)?;
        if a1.len() != a2.len() {
            return Err(Error::InvalidParameters(format!(
                "|A1| = {} but |A2| = {}",
                a1.len(),
                a2.len()
            )));
        }
        Ok(TsumInstance { group, a1, a2 })
    }

    /// Canonicalize multisets: sort, deduplicate, then pad the shorter list
    /// with the smallest ids not already present. Padding is arbitrary and
    /// may create new sums; constructions that need sum-safe padding do it
    /// themselves.
    pub fn canonicalize(
        group: GroupSpec,
        a1: Vec<GroupElement>,
        a2: Vec<GroupElement>,
    ) -> Result<Self> {
        group.validate()?;
        let mut s1: BTreeSet<GroupElement> = a1.into_iter().collect();
        let mut s2: BTreeSet<GroupElement> = a2.into_iter().collect();
        for e in s1.iter().chain(s2.iter()) {
            if !group.contains(e) {
                return Err(Error::InvalidElement { id: e.id().clone(), order: group.order() });
            }
        }
        let n = s1.len().max(s2.len());
        if BigUint::from(n) > group.order() {
            return Err(Error::GroupTooSmall {
                order: group.order(),
                required: BigUint::from(n),
            });
        }
        for set in [&mut s1, &mut s2] {
            let mut candidate = BigUint::zero();
            while set.len() < n {
                let e = GroupElement::new(candidate.clone());
                if !set.contains(&e) {
                    set.insert(e);
                }
                candidate += 1u32;
            }
        }
        Ok(TsumInstance {
            group,
            a1: s1.into_iter().collect(),
            a2: s2.into_iter().collect(),
        })
    }

    /// A seeded random instance with `n` distinct elements per side.
    pub fn random(group: GroupSpec, n: usize, seed: u64) -> Result<Self> {
        if BigUint::from(n) > group.order() {
            return Err(Error::GroupTooSmall { order: group.order(), required: BigUint::from(n) });
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha20Rng| {
            let mut set = BTreeSet::new();
            while set.len() < n {
                set.insert(group.random_element(rng));
            }
            set.into_iter().collect::<Vec<_>>()
        };
        let a1 = draw(&mut rng);
        let a2 = draw(&mut rng);
        TsumInstance::new(group, a1, a2)
    }

    pub fn n(&self) -> usize {
        self.a1.len()
    }

    pub fn a1(&self) -> &[GroupElement] {
        &self.a1
    }

    pub fn a2(&self) -> &[GroupElement] {
        &self.a2
    }

    /// Full sumset `A1 + A2`.
    pub fn sumset(&self) -> Result<BTreeSet<GroupElement>> {
        let mut out = BTreeSet::new();
        for x in &self.a1 {
            for y in &self.a2 {
                out.insert(self.group.add(x, y)?);
            }
        }
        Ok(out)
    }
}

/// Reference oracle. Ties break toward the smallest `a1` id; the matching
/// `a2` is then determined.
pub fn brute_force_query(instance: &TsumInstance, z: &GroupElement) -> Result<SumsetAnswer> {
    if !instance.group.contains(z) {
        return Err(Error::InvalidElement { id: z.id().clone(), order: instance.group.order() });
    }
    let a2_set: BTreeSet<&GroupElement> = instance.a2.iter().collect();
    for a1 in &instance.a1 {
        let need = instance.group.sub(z, a1)?;
        if a2_set.contains(&need) {
            return Ok(SumsetAnswer::pair(a1.clone(), need));
        }
    }
    Ok(SumsetAnswer::none())
}

fn bits_for(v: &BigUint) -> u32 {
    v.bits().max(1) as u32
}

fn order_as_u64(group: &GroupSpec, cap: u64) -> Result<u64> {
    let order = group.order();
    if order > BigUint::from(cap) {
        return Err(Error::GroupTooLarge { order, cap: BigUint::from(cap) });
    }
    Ok(u64::try_from(order).expect("order within cap"))
}

// ---------------------------------------------------------------------------
// Sumset bit-vector solution
// ---------------------------------------------------------------------------

/// Bit vector over the whole group packed little-endian into words, plus a
/// witness cell per group element. Existence costs one probe, witness
/// retrieval two.
pub struct SumsetTableSolution {
    group: GroupSpec,
    order: u64,
    word_bits: u32,
    decision_cells: usize,
}

/// Build the sumset table for the instance's group. Requires the group
/// order within `cap` and a word wide enough to store a witness id.
pub fn build_sumset_table(instance: &TsumInstance, word_bits: u32) -> Result<SumsetTableSolution> {
    build_sumset_table_with_cap(instance, word_bits, DEFAULT_GROUP_CAP)
}

pub fn build_sumset_table_with_cap(
    instance: &TsumInstance,
    word_bits: u32,
    cap: u64,
) -> Result<SumsetTableSolution> {
    let order = order_as_u64(&instance.group, cap)?;
    if word_bits == 0 {
        return Err(Error::InvalidParameters("word size must be >= 1".into()));
    }
    let needed = bits_for(&BigUint::from(order));
    if word_bits < needed {
        return Err(Error::InvalidParameters(format!(
            "word of {} bits cannot hold witness ids ({} bits needed)",
            word_bits, needed
        )));
    }
    let decision_cells = (order as usize).div_ceil(word_bits as usize);
    Ok(SumsetTableSolution { group: instance.group.clone(), order, word_bits, decision_cells })
}

impl SumsetTableSolution {
    pub fn decision_cells(&self) -> usize {
        self.decision_cells
    }

    fn bit_location(&self, g: u64) -> (usize, u32) {
        ((g / self.word_bits as u64) as usize, (g % self.word_bits as u64) as u32)
    }
}

impl CellProbeSolution for SumsetTableSolution {
    fn name(&self) -> &str {
        "sumset-table"
    }

    fn space(&self) -> usize {
        self.decision_cells + self.order as usize
    }

    fn word_bits(&self) -> u32 {
        self.word_bits
    }

    fn probe_budget(&self) -> usize {
        2
    }

    fn preprocess(&self, instance: &TsumInstance) -> Result<Memory> {
        if instance.group != self.group {
            return Err(Error::InvalidParameters("instance group differs from build group".into()));
        }
        let mut cells = vec![BigUint::zero(); self.space()];
        for a1 in instance.a1() {
            for a2 in instance.a2() {
                let z = self.group.add(a1, a2)?;
                let g = z.to_u64().expect("order fits u64");
                let (cell, bit) = self.bit_location(g);
                cells[cell] |= BigUint::one() << bit;
                let slot = self.decision_cells + g as usize;
                // Keep the smallest a1 so witnesses match the oracle.
                let packed = a1.id() + 1u32;
                if cells[slot].is_zero() || packed < cells[slot] {
                    cells[slot] = packed;
                }
            }
        }
        Memory::new(cells, self.word_bits)
    }

    fn query(&self, z: &GroupElement, probes: &mut ProbeHandle<'_>) -> Result<SumsetAnswer> {
        let g = z
            .to_u64()
            .filter(|&g| g < self.order)
            .ok_or_else(|| Error::InvalidElement { id: z.id().clone(), order: self.group.order() })?;
        let (cell, bit) = self.bit_location(g);
        let witness_cell = self.decision_cells + g as usize;
        probes.declare_schedule(vec![cell, witness_cell]);
        let word = probes.read(cell)?;
        if (word >> bit) & BigUint::one() == BigUint::zero() {
            return Ok(SumsetAnswer::none());
        }
        let packed = probes.read(witness_cell)?;
        // A set bit guarantees a stored witness; on garbage contents the
        // cell may hold anything, so stay total and answer empty.
        if packed.is_zero() {
            return Ok(SumsetAnswer::none());
        }
        let a1 = GroupElement::new(packed - 1u32);
        if !self.group.contains(&a1) {
            return Ok(SumsetAnswer::none());
        }
        let a2 = self.group.sub(z, &a1)?;
        Ok(SumsetAnswer::pair(a1, a2))
    }

    fn decide(&self, z: &GroupElement, probes: &mut ProbeHandle<'_>) -> Result<bool> {
        let g = z
            .to_u64()
            .filter(|&g| g < self.order)
            .ok_or_else(|| Error::InvalidElement { id: z.id().clone(), order: self.group.order() })?;
        let (cell, bit) = self.bit_location(g);
        probes.declare_schedule(vec![cell]);
        let word = probes.read(cell)?;
        Ok((word >> bit) & BigUint::one() == BigUint::one())
    }
}

// ---------------------------------------------------------------------------
// Linear-space scan solution
// ---------------------------------------------------------------------------

/// Stores both input lists verbatim and reads all of them on every query:
/// a fixed schedule of 2n probes, so the solution is non-adaptive.
pub struct ScanSolution {
    group: GroupSpec,
    n: usize,
    word_bits: u32,
}

pub fn build_scan_solution(instance: &TsumInstance) -> Result<ScanSolution> {
    let word_bits = bits_for(&instance.group.order());
    Ok(ScanSolution { group: instance.group.clone(), n: instance.n(), word_bits })
}

impl CellProbeSolution for ScanSolution {
    fn name(&self) -> &str {
        "scan"
    }

    fn space(&self) -> usize {
        2 * self.n
    }

    fn word_bits(&self) -> u32 {
        self.word_bits
    }

    fn probe_budget(&self) -> usize {
        2 * self.n
    }

    fn preprocess(&self, instance: &TsumInstance) -> Result<Memory> {
        if instance.group != self.group || instance.n() != self.n {
            return Err(Error::InvalidParameters("instance differs from build shape".into()));
        }
        let cells = instance
            .a1()
            .iter()
            .chain(instance.a2().iter())
            .map(|e| e.id().clone())
            .collect();
        Memory::new(cells, self.word_bits)
    }

    fn query(&self, z: &GroupElement, probes: &mut ProbeHandle<'_>) -> Result<SumsetAnswer> {
        if !self.group.contains(z) {
            return Err(Error::InvalidElement { id: z.id().clone(), order: self.group.order() });
        }
        probes.declare_schedule((0..2 * self.n).collect());
        let mut a1 = Vec::with_capacity(self.n);
        let mut a2 = Vec::with_capacity(self.n);
        for i in 0..self.n {
            a1.push(GroupElement::new(probes.read(i)?));
        }
        for i in self.n..2 * self.n {
            a2.push(GroupElement::new(probes.read(i)?));
        }
        for x in &a1 {
            // Words can exceed the group order only on garbage memory.
            if !self.group.contains(x) {
                continue;
            }
            let need = self.group.sub(z, x)?;
            if a2.binary_search(&need).is_ok() {
                return Ok(SumsetAnswer::pair(x.clone(), need));
            }
        }
        Ok(SumsetAnswer::none())
    }
}

// ---------------------------------------------------------------------------
// Hellman-chain-backed solution
// ---------------------------------------------------------------------------

/// Time-space tradeoff solution: inverts the pair-sum function
/// `p -> A1[p / n] + A2[p mod n]` through a Hellman table stored in memory,
/// with a per-instance table of the sumset points the chains missed so
/// answers stay exact.
///
/// Memory layout: two header cells (stored chain count M, fallback length
/// L), M endpoint cells, M start cells, the two input lists, then L sorted
/// (sum id, pair rank) fallback entries.
pub struct HellmanTsumSolution {
    group: GroupSpec,
    n: usize,
    m: u64,
    t: u64,
    seed: u64,
    word_bits: u32,
    order: u64,
}

pub fn build_hellman_solution(
    instance: &TsumInstance,
    m: u64,
    t: u64,
    seed: u64,
) -> Result<HellmanTsumSolution> {
    build_hellman_solution_with_cap(instance, m, t, seed, DEFAULT_GROUP_CAP)
}

pub fn build_hellman_solution_with_cap(
    instance: &TsumInstance,
    m: u64,
    t: u64,
    seed: u64,
    cap: u64,
) -> Result<HellmanTsumSolution> {
    if m == 0 || t == 0 {
        return Err(Error::InvalidParameters("need m, t >= 1".into()));
    }
    let order = order_as_u64(&instance.group, cap)?;
    let n = instance.n();
    let pair_count = (n as u64) * (n as u64);
    let word_bits = bits_for(&instance.group.order())
        .max(bits_for(&BigUint::from(pair_count.max(1))))
        .max(bits_for(&BigUint::from(order.max(m))));
    Ok(HellmanTsumSolution { group: instance.group.clone(), n, m, t, seed, word_bits, order })
}

struct HellmanLayout {
    n: usize,
    stored: usize,
    fallback: usize,
}

impl HellmanLayout {
    fn endpoints(&self) -> usize {
        2
    }
    fn starts(&self) -> usize {
        2 + self.stored
    }
    fn a1(&self) -> usize {
        2 + 2 * self.stored
    }
    fn a2(&self) -> usize {
        self.a1() + self.n
    }
    fn fallback_keys(&self) -> usize {
        self.a2() + self.n
    }
    fn fallback_ranks(&self) -> usize {
        self.fallback_keys() + self.fallback
    }
    fn total(&self) -> usize {
        self.fallback_ranks() + self.fallback
    }
}

impl HellmanTsumSolution {
    fn pair_count(&self) -> u64 {
        (self.n as u64) * (self.n as u64)
    }

    fn build_table(&self, instance: &TsumInstance) -> Result<HellmanTable> {
        let pair_sum = |p: u64| -> u64 {
            let (i, j) = ((p / self.n as u64) as usize, (p % self.n as u64) as usize);
            self.group
                .add(&instance.a1()[i], &instance.a2()[j])
                .expect("instance elements valid")
                .to_u64()
                .expect("order fits u64")
        };
        hellman_build(pair_sum, self.pair_count(), self.order, self.m, self.t, self.seed)
    }

    /// Binary search over a sorted cell region, probing as it goes.
    fn search_region(
        probes: &mut ProbeHandle<'_>,
        base: usize,
        len: usize,
        key: &BigUint,
    ) -> Result<Option<usize>> {
        let (mut lo, mut hi) = (0usize, len);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let v = probes.read(base + mid)?;
            match v.cmp(key) {
                std::cmp::Ordering::Equal => return Ok(Some(mid)),
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
            }
        }
        Ok(None)
    }

    fn read_pair(
        &self,
        probes: &mut ProbeHandle<'_>,
        layout: &HellmanLayout,
        p: u64,
    ) -> Result<(GroupElement, GroupElement)> {
        let (i, j) = ((p / self.n as u64) as usize, (p % self.n as u64) as usize);
        let x = GroupElement::new(probes.read(layout.a1() + i)?);
        let y = GroupElement::new(probes.read(layout.a2() + j)?);
        Ok((x, y))
    }

    fn reduce(&self, y: &BigUint, salt: u64) -> u64 {
        let p = self.pair_count();
        let r = u64::try_from(y % BigUint::from(p)).expect("mod fits");
        (r + salt) % p
    }
}

impl CellProbeSolution for HellmanTsumSolution {
    fn name(&self) -> &str {
        "hellman-tsum"
    }

    fn space(&self) -> usize {
        // Upper bound: every chain stored, every group element uncovered.
        let layout = HellmanLayout {
            n: self.n,
            stored: self.m as usize,
            fallback: self.order as usize,
        };
        layout.total()
    }

    fn word_bits(&self) -> u32 {
        self.word_bits
    }

    fn probe_budget(&self) -> usize {
        let bs_m = 64 - self.m.leading_zeros() as usize + 1;
        let bs_g = 64 - self.order.leading_zeros() as usize + 1;
        2 + self.t as usize * (bs_m + 5 + 2 * self.t as usize) + bs_g + 3
    }

    fn preprocess(&self, instance: &TsumInstance) -> Result<Memory> {
        if instance.group != self.group || instance.n() != self.n {
            return Err(Error::InvalidParameters("instance differs from build shape".into()));
        }
        if self.n == 0 {
            return Memory::new(vec![BigUint::zero(); self.space()], self.word_bits);
        }
        let table = self.build_table(instance)?;
        let pair_sum = |p: u64| -> u64 {
            let (i, j) = ((p / self.n as u64) as usize, (p % self.n as u64) as usize);
            self.group
                .add(&instance.a1()[i], &instance.a2()[j])
                .expect("valid")
                .to_u64()
                .expect("fits")
        };
        let covered = table.coverage(pair_sum);
        // Sumset points the chains missed, with their smallest pair rank so
        // witnesses stay lexicographic.
        let mut fallback: Vec<(u64, u64)> = Vec::new();
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        for p in 0..self.pair_count() {
            let y = pair_sum(p);
            if !covered.contains(&y) && seen.insert(y) {
                fallback.push((y, p));
            }
        }
        fallback.sort();

        let stored: Vec<(u64, u64)> = table.endpoint_pairs().collect();
        let layout = HellmanLayout { n: self.n, stored: stored.len(), fallback: fallback.len() };
        let mut cells = vec![BigUint::zero(); layout.total()];
        cells[0] = BigUint::from(stored.len());
        cells[1] = BigUint::from(fallback.len());
        for (idx, (end, start)) in stored.iter().enumerate() {
            cells[layout.endpoints() + idx] = BigUint::from(*end);
            cells[layout.starts() + idx] = BigUint::from(*start);
        }
        for (i, e) in instance.a1().iter().enumerate() {
            cells[layout.a1() + i] = e.id().clone();
        }
        for (i, e) in instance.a2().iter().enumerate() {
            cells[layout.a2() + i] = e.id().clone();
        }
        for (i, (y, p)) in fallback.iter().enumerate() {
            cells[layout.fallback_keys() + i] = BigUint::from(*y);
            cells[layout.fallback_ranks() + i] = BigUint::from(*p);
        }
        // Pad out to the declared cell count.
        cells.resize(self.space(), BigUint::zero());
        Memory::new(cells, self.word_bits)
    }

    fn query(&self, z: &GroupElement, probes: &mut ProbeHandle<'_>) -> Result<SumsetAnswer> {
        if !self.group.contains(z) {
            return Err(Error::InvalidElement { id: z.id().clone(), order: self.group.order() });
        }
        let stored = usize::try_from(probes.read(0)?).expect("count fits");
        let fallback = usize::try_from(probes.read(1)?).expect("count fits");
        if self.n == 0 {
            return Ok(SumsetAnswer::none());
        }
        let layout = HellmanLayout { n: self.n, stored, fallback };
        let table_salt = crate::inversion::chain_salt(self.seed, self.pair_count());
        let zid = z.id().clone();

        let mut cur = self.reduce(&zid, table_salt);
        for j in 0..self.t {
            if let Some(idx) =
                Self::search_region(probes, layout.endpoints(), stored, &BigUint::from(cur))?
            {
                let start = u64::try_from(probes.read(layout.starts() + idx)?).expect("rank fits");
                let mut w = start;
                for _ in 0..(self.t - 1 - j) {
                    let (x, y) = self.read_pair(probes, &layout, w)?;
                    let sum = self.group.add(&x, &y)?;
                    w = self.reduce(sum.id(), table_salt);
                }
                let (x, y) = self.read_pair(probes, &layout, w)?;
                if self.group.add(&x, &y)? == *z {
                    return Ok(SumsetAnswer::pair(x, y));
                }
            }
            if j + 1 < self.t {
                let (x, y) = self.read_pair(probes, &layout, cur)?;
                let sum = self.group.add(&x, &y)?;
                cur = self.reduce(sum.id(), table_salt);
            }
        }
        if let Some(idx) = Self::search_region(probes, layout.fallback_keys(), fallback, &zid)? {
            let p = u64::try_from(probes.read(layout.fallback_ranks() + idx)?).expect("rank fits");
            let (x, y) = self.read_pair(probes, &layout, p)?;
            return Ok(SumsetAnswer::pair(x, y));
        }
        Ok(SumsetAnswer::none())
    }
}

// ---------------------------------------------------------------------------
// Two-set / single-set equivalence
// ---------------------------------------------------------------------------

/// A two-set instance rewritten in the same-set form over the direct
/// product of a one-bit XOR group and the original group. Group size and
/// input length both double.
pub struct SingleSetTransform {
    pub instance: TsumInstance,
    base_group: GroupSpec,
    product: GroupSpec,
}

pub fn to_single_set(instance: &TsumInstance) -> Result<SingleSetTransform> {
    let product = GroupSpec::product(GroupSpec::xor(1), instance.group.clone());
    let zero = GroupElement::from_u64(0);
    let one = GroupElement::from_u64(1);
    let mut merged = Vec::with_capacity(2 * instance.n());
    for e in instance.a1() {
        merged.push(product.pair(&zero, e)?);
    }
    for e in instance.a2() {
        merged.push(product.pair(&one, e)?);
    }
    let single = TsumInstance::new(product.clone(), merged.clone(), merged)?;
    Ok(SingleSetTransform { instance: single, base_group: instance.group.clone(), product })
}

impl SingleSetTransform {
    /// Where to ask about the original query `z`.
    pub fn map_query(&self, z: &GroupElement) -> Result<GroupElement> {
        self.product.pair(&GroupElement::from_u64(1), z)
    }

    /// Project a single-set witness back to the original sets, if it is the
    /// cross-side kind.
    pub fn recover_witness(
        &self,
        witness: &(GroupElement, GroupElement),
    ) -> Result<Option<(GroupElement, GroupElement)>> {
        let (l1, r1) = self.product.unpair(&witness.0)?;
        let (l2, r2) = self.product.unpair(&witness.1)?;
        let _ = &self.base_group;
        match (l1.to_u64(), l2.to_u64()) {
            (Some(0), Some(1)) => Ok(Some((r1, r2))),
            (Some(1), Some(0)) => Ok(Some((r2, r1))),
            _ => Ok(None),
        }
    }
}

// ---------------------------------------------------------------------------
// Hardness conjectures, recorded for report annotation only
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Conjecture {
    pub tag: char,
    pub statement: &'static str,
    pub status: &'static str,
}

/// Folklore hardness statements about this problem. Reports may quote them;
/// nothing in the crate asserts them.
pub const CONJECTURES: [Conjecture; 3] = [
    Conjecture {
        tag: 'a',
        statement: "any solution with T = O(1) probes needs space S on the order of n^2",
        status: "open",
    },
    Conjecture {
        tag: 'b',
        statement: "any solution satisfies S*T on the order of n^2",
        status: "open",
    },
    Conjecture {
        tag: 'c',
        statement: "any solution with T = O(n^(1-d)) probes needs space S on the order of n^2",
        status: "refuted: structures with T ~ n^(3d) and S ~ n^(2-d) exist",
    },
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellprobe::run_query;

    fn ge(v: u64) -> GroupElement {
        GroupElement::from_u64(v)
    }

    fn small_instance() -> TsumInstance {
        TsumInstance::new(GroupSpec::cyclic(7), vec![ge(1), ge(2)], vec![ge(2), ge(4)]).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let i = TsumInstance::new(GroupSpec::cyclic(5), vec![ge(0)], vec![ge(0)]).unwrap();
        assert_eq!(brute_force_query(&i, &ge(0)).unwrap(), SumsetAnswer::pair(ge(0), ge(0)));

        let empty = TsumInstance::new(GroupSpec::cyclic(5), vec![], vec![]).unwrap();
        for z in 0..5 {
            assert_eq!(brute_force_query(&empty, &ge(z)).unwrap(), SumsetAnswer::none());
        }

        // 2 + 4 = 6 over Z7; a1 = 1 has no partner since 5 is absent.
        let i = small_instance();
        assert_eq!(brute_force_query(&i, &ge(6)).unwrap(), SumsetAnswer::pair(ge(2), ge(4)));
    }

    #[test]
    fn canonicalize_dedups_and_pads() {
        let i = TsumInstance::canonicalize(
            GroupSpec::cyclic(9),
            vec![ge(5), ge(5), ge(3)],
            vec![ge(7)],
        )
        .unwrap();
        assert_eq!(i.a1(), &[ge(3), ge(5)]);
        assert_eq!(i.a2(), &[ge(0), ge(7)]);
        // Idempotent under re-canonicalization.
        let again = TsumInstance::canonicalize(
            i.group.clone(),
            i.a1().to_vec(),
            i.a2().to_vec(),
        )
        .unwrap();
        assert_eq!(again, i);
    }

    #[test]
    fn strict_constructor_rejects_duplicates() {
        assert!(TsumInstance::new(GroupSpec::cyclic(5), vec![ge(1), ge(1)], vec![ge(0), ge(2)])
            .is_err());
        assert!(TsumInstance::new(GroupSpec::cyclic(5), vec![ge(1)], vec![]).is_err());
    }

    fn sweep_against_oracle(instance: &TsumInstance, solution: &dyn CellProbeSolution) {
        let memory = solution.preprocess(instance).unwrap();
        let order = instance.group.order_u64().unwrap();
        for g in 0..order {
            let z = ge(g);
            let expect = brute_force_query(instance, &z).unwrap();
            let (got, transcript) = run_query(solution, &memory, &z).unwrap();
            assert_eq!(got.witness.is_some(), expect.witness.is_some(), "existence at z={}", g);
            if let Some((x, y)) = &got.witness {
                assert_eq!(instance.group.add(x, y).unwrap(), z);
                assert!(instance.a1().contains(x));
                assert!(instance.a2().contains(y));
            }
            assert!(transcript.len() <= solution.probe_budget());
        }
    }

    #[test]
    fn sumset_table_matches_oracle() {
        let i = TsumInstance::random(GroupSpec::cyclic(101), 8, 77).unwrap();
        let sol = build_sumset_table(&i, 8).unwrap();
        assert_eq!(sol.decision_cells(), 101_usize.div_ceil(8));
        sweep_against_oracle(&i, &sol);
    }

    #[test]
    fn sumset_table_cell_counts() {
        let i = TsumInstance::new(GroupSpec::cyclic(16), vec![], vec![]).unwrap();
        let sol = build_sumset_table(&i, 8).unwrap();
        assert_eq!(sol.decision_cells(), 2);
        // Empty instance: all-zero table, every decision probe says no.
        let mem = sol.preprocess(&i).unwrap();
        for g in 0..16 {
            let (ans, t) = run_query(&sol, &mem, &ge(g)).unwrap();
            assert_eq!(ans, SumsetAnswer::none());
            assert_eq!(t.len(), 1);
            assert!(!t.adaptive);
        }
    }

    #[test]
    fn sumset_table_bitmap_matches_sumset() {
        let i = TsumInstance::random(GroupSpec::xor(6), 5, 3).unwrap();
        let sol = build_sumset_table(&i, 7).unwrap();
        let mem = sol.preprocess(&i).unwrap();
        let sumset = i.sumset().unwrap();
        for g in 0..64u64 {
            let z = ge(g);
            let mut h = ProbeHandle::new(&mem, 1);
            let bit = sol.decide(&z, &mut h).unwrap();
            assert_eq!(bit, sumset.contains(&z));
            assert_eq!(h.probes_so_far(), 1);
        }
    }

    #[test]
    fn scan_solution_matches_oracle_and_counts() {
        let i = TsumInstance::random(GroupSpec::cyclic(101), 8, 5).unwrap();
        let sol = build_scan_solution(&i).unwrap();
        sweep_against_oracle(&i, &sol);

        let one = TsumInstance::random(GroupSpec::cyclic(11), 1, 1).unwrap();
        let sol = build_scan_solution(&one).unwrap();
        let mem = sol.preprocess(&one).unwrap();
        let (_, t) = run_query(&sol, &mem, &ge(3)).unwrap();
        assert!(t.len() <= 2);

        // Fixed schedule on n=4 reads exactly both lists.
        let four = TsumInstance::random(GroupSpec::cyclic(31), 4, 9).unwrap();
        let sol = build_scan_solution(&four).unwrap();
        let mem = sol.preprocess(&four).unwrap();
        let (_, t) = run_query(&sol, &mem, &ge(0)).unwrap();
        assert_eq!(t.len(), 8);
        assert!(!t.adaptive);
    }

    #[test]
    fn hellman_solution_matches_oracle() {
        let i = TsumInstance::random(GroupSpec::cyclic(211), 6, 13).unwrap();
        let sol = build_hellman_solution(&i, 8, 4, 99).unwrap();
        sweep_against_oracle(&i, &sol);
    }

    #[test]
    fn adaptivity_of_registered_solutions() {
        use crate::cellprobe::verify_nonadaptive;
        let i = TsumInstance::random(GroupSpec::cyclic(127), 5, 2).unwrap();
        let sample: Vec<GroupElement> = (0..64).map(ge).collect();
        let sumset = build_sumset_table(&i, 8).unwrap();
        assert!(verify_nonadaptive(&sumset, &i.group, &sample));
        let scan = build_scan_solution(&i).unwrap();
        assert!(verify_nonadaptive(&scan, &i.group, &sample));
        // The chain walk reads addresses computed from cell contents.
        let hellman = build_hellman_solution(&i, 8, 4, 1).unwrap();
        assert!(!verify_nonadaptive(&hellman, &i.group, &sample));
    }

    #[test]
    fn hellman_solution_empty_instance() {
        let i = TsumInstance::new(GroupSpec::cyclic(13), vec![], vec![]).unwrap();
        let sol = build_hellman_solution(&i, 2, 2, 0).unwrap();
        let mem = sol.preprocess(&i).unwrap();
        for g in 0..13 {
            let (ans, _) = run_query(&sol, &mem, &ge(g)).unwrap();
            assert_eq!(ans, SumsetAnswer::none());
        }
    }

    #[test]
    fn single_set_transform_preserves_answers() {
        // Worked example first: A1={1}, A2={2} over Z5, z=3.
        let i = TsumInstance::new(GroupSpec::cyclic(5), vec![ge(1)], vec![ge(2)]).unwrap();
        let t = to_single_set(&i).unwrap();
        assert_eq!(t.instance.n(), 2);
        let q = t.map_query(&ge(3)).unwrap();
        assert_eq!(q, ge(5 + 3));
        let ans = brute_force_query(&t.instance, &q).unwrap();
        let w = ans.witness.expect("witness exists");
        assert_eq!(w, (ge(1), ge(5 + 2)));
        let back = t.recover_witness(&w).unwrap().unwrap();
        assert_eq!(back, (ge(1), ge(2)));

        // Exhaustive equivalence on a random instance.
        let i = TsumInstance::random(GroupSpec::cyclic(37), 5, 21).unwrap();
        let t = to_single_set(&i).unwrap();
        for g in 0..37 {
            let z = ge(g);
            let direct = brute_force_query(&i, &z).unwrap();
            let mapped = brute_force_query(&t.instance, &t.map_query(&z).unwrap()).unwrap();
            assert_eq!(direct.witness.is_some(), mapped.witness.is_some(), "z={}", g);
            if let Some(w) = &mapped.witness {
                let back = t.recover_witness(w).unwrap().expect("cross-side witness");
                assert_eq!(i.group.add(&back.0, &back.1).unwrap(), z);
            }
        }

        let empty = TsumInstance::new(GroupSpec::cyclic(5), vec![], vec![]).unwrap();
        let t = to_single_set(&empty).unwrap();
        assert_eq!(t.instance.n(), 0);
        for g in 0..5 {
            let mapped = brute_force_query(&t.instance, &t.map_query(&ge(g)).unwrap()).unwrap();
            assert_eq!(mapped, SumsetAnswer::none());
        }
    }

    #[test]
    fn instance_json_round_trip() {
        let i = small_instance();
        let js = serde_json::to_string(&i).unwrap();
        assert!(js.contains("\"A1\":[\"1\",\"2\"]"));
        let back: TsumInstance = serde_json::from_str(&js).unwrap();
        assert_eq!(back, i);
    }

    #[test]
    fn conjecture_table_present() {
        assert_eq!(CONJECTURES.len(), 3);
        assert_eq!(CONJECTURES[2].tag, 'c');
        assert!(CONJECTURES[2].status.starts_with("refuted"));
    }

    #[test]
    fn concurrent_queries_share_memory() {
        // Memory is immutable after preprocessing and each query owns its
        // transcript, so parallel sweeps over one memory are safe.
        let instance = TsumInstance::random(GroupSpec::cyclic(251), 8, 4).unwrap();
        let solution = build_sumset_table(&instance, 8).unwrap();
        let memory = solution.preprocess(&instance).unwrap();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for worker in 0..4u64 {
                let (instance, solution, memory) = (&instance, &solution, &memory);
                handles.push(scope.spawn(move || {
                    for g in (worker..251).step_by(4) {
                        let z = ge(g);
                        let expect = brute_force_query(instance, &z).unwrap();
                        let (got, _) = run_query(solution, memory, &z).unwrap();
                        assert_eq!(got.witness.is_some(), expect.witness.is_some());
                    }
                }));
            }
            for h in handles {
                h.join().unwrap();
            }
        });
    }
}
