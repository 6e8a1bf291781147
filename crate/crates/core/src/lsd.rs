//! Blocked lopsided set disjointness compiled into 3SUM-Indexing over a
//! small universe, plus the two-party protocol simulation with bit
//! accounting.
//!
//! The universe `[N] x [B]` is split into groups of `ell` consecutive
//! blocks. Bob's subset becomes `A1` (one element per member, its in-group
//! chunk and index written in base `2B+1` digits), `A2` enumerates the
//! digit vectors with exactly one zero, and Alice asks one query per group.
//! A query sums with an `A1`/`A2` pair exactly when Bob's set meets Alice's
//! inside that group.

use crate::cellprobe::{binomial, run_decision, CellProbeSolution};
use crate::codec::{EncodeMode, MixedRadixCodec};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::tsum::{brute_force_query, TsumInstance};
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use std::collections::BTreeSet;

/// Alice holds exactly one element per block; Bob holds an arbitrary
/// subset of the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsdInstance {
    n_blocks: u64,
    block_size: u64,
    bob: BTreeSet<(u64, u64)>,
    alice: Vec<u64>,
}

impl LsdInstance {
    pub fn new(
        n_blocks: u64,
        block_size: u64,
        bob: BTreeSet<(u64, u64)>,
        alice: Vec<u64>,
    ) -> Result<Self> {
        if n_blocks == 0 || block_size == 0 {
            return Err(Error::InvalidParameters("need N, B >= 1".into()));
        }
        if alice.len() as u64 != n_blocks {
            return Err(Error::InvalidParameters(format!(
                "Alice must pick one element per block: got {} picks for {} blocks",
                alice.len(),
                n_blocks
            )));
        }
        for (&b, i) in alice.iter().zip(0u64..) {
            if b >= block_size {
                return Err(Error::InvalidParameters(format!(
                    "Alice's pick {} in block {} exceeds block size {}",
                    b, i, block_size
                )));
            }
        }
        for &(i, b) in &bob {
            if i >= n_blocks || b >= block_size {
                return Err(Error::InvalidParameters(format!(
                    "Bob's element ({}, {}) outside [{}] x [{}]",
                    i, b, n_blocks, block_size
                )));
            }
        }
        Ok(LsdInstance { n_blocks, block_size, bob, alice })
    }

    pub fn n_blocks(&self) -> u64 {
        self.n_blocks
    }

    pub fn block_size(&self) -> u64 {
        self.block_size
    }

    pub fn bob(&self) -> &BTreeSet<(u64, u64)> {
        &self.bob
    }

    pub fn alice(&self) -> &[u64] {
        &self.alice
    }

    /// Direct intersection test; the oracle the whole reduction answers to.
    pub fn intersects(&self) -> bool {
        self.alice.iter().zip(0u64..).any(|(&b, i)| self.bob.contains(&(i, b)))
    }

    /// Pad with fresh blocks (Alice picks 0, Bob empty) until `ell` divides
    /// the block count. Preserves the disjointness verdict.
    pub fn padded_to_multiple(&self, ell: u64) -> LsdInstance {
        let rem = self.n_blocks % ell;
        let extra = if rem == 0 { 0 } else { ell - rem };
        let mut alice = self.alice.clone();
        alice.extend(std::iter::repeat_n(0, extra as usize));
        LsdInstance {
            n_blocks: self.n_blocks + extra,
            block_size: self.block_size,
            bob: self.bob.clone(),
            alice,
        }
    }
}

/// Digit layout for one (N, B, ell, mode) choice. Least significant first:
/// `ell` data digits, one always-zero digit that padding marks instead, and
/// a wide top digit holding the group index.
#[derive(Debug, Clone)]
pub struct LsdLayout {
    ell: u64,
    block_size: u64,
    blocks: u64,
    mode: EncodeMode,
    codec: MixedRadixCodec,
    group: GroupSpec,
    pad_budget: u64,
}

impl LsdLayout {
    fn new(blocks: u64, block_size: u64, ell: u64, pad_budget: u64, mode: EncodeMode) -> Result<Self> {
        debug_assert_eq!(blocks % ell, 0);
        let radix = 2 * block_size + 1;
        let (digit_base, top_base) = match mode {
            EncodeMode::Cyclic => (radix, blocks.checked_mul(radix).ok_or_else(overflow)?),
            EncodeMode::Xor => {
                let w = 64 - (radix - 1).leading_zeros();
                let top_max = (blocks / ell).max(pad_budget).max(1);
                let wi = 64 - (top_max - 1).max(1).leading_zeros();
                (
                    1u64.checked_shl(w).ok_or_else(overflow)?,
                    1u64.checked_shl(wi).ok_or_else(overflow)?,
                )
            }
        };
        // Top digit must hold group indices and padding ranks, and in the
        // cyclic case also any rank-plus-rank sum, without wrapping.
        let headroom_ok = match mode {
            EncodeMode::Cyclic => pad_budget.checked_mul(2).is_some_and(|x| x <= top_base),
            EncodeMode::Xor => pad_budget <= top_base,
        };
        if !headroom_ok {
            return Err(Error::ParameterOverflow(format!(
                "padding rank budget {} does not fit the top digit base {}; choose a smaller ell",
                pad_budget, top_base
            )));
        }
        let ell_usize = usize::try_from(ell).map_err(|_| overflow())?;
        let mut bases = vec![digit_base; ell_usize + 1];
        bases.push(top_base);
        let codec = MixedRadixCodec::new(bases, mode.codec_mode())?;
        let group = match mode {
            EncodeMode::Cyclic => GroupSpec::cyclic_big(codec.order().clone()),
            EncodeMode::Xor => GroupSpec::xor((codec.order().bits() - 1) as u32),
        };
        codec.matches_group(&group)?;
        Ok(LsdLayout { ell, block_size, blocks, mode, codec, group, pad_budget })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn codec(&self) -> &MixedRadixCodec {
        &self.codec
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn mode(&self) -> EncodeMode {
        self.mode
    }

    pub fn num_queries(&self) -> u64 {
        self.blocks / self.ell
    }

    fn encode_digits(&self, group_index: u64, marker: u64, data: &[u64]) -> Result<GroupElement> {
        let mut digits = vec![0u64; self.codec.num_digits()];
        digits[..data.len()].copy_from_slice(data);
        digits[self.ell as usize] = marker;
        digits[self.ell as usize + 1] = group_index;
        self.codec.encode(&digits)
    }

    /// Bob's element for `(j, b)`: digit `j - i*ell` holds `b + 1` and the
    /// top digit names the group `i`.
    pub fn encode_bob_element(&self, j: u64, b: u64) -> Result<GroupElement> {
        let i = j / self.ell;
        let mut data = vec![0u64; self.ell as usize];
        data[(j - i * self.ell) as usize] = b + 1;
        self.encode_digits(i, 0, &data)
    }

    /// All helper elements: every length-`ell` digit vector over `[0, B]`
    /// with exactly one zero.
    pub fn helper_elements(&self) -> Result<Vec<GroupElement>> {
        let ell = self.ell as usize;
        let mut out = Vec::new();
        for zero_pos in 0..ell {
            let mut data = vec![1u64; ell];
            data[zero_pos] = 0;
            loop {
                out.push(self.encode_digits(0, 0, &data)?);
                // Odometer over the non-zero positions, values 1..=B.
                let mut p = 0;
                loop {
                    if p == ell {
                        break;
                    }
                    if p == zero_pos {
                        p += 1;
                        continue;
                    }
                    if data[p] < self.block_size {
                        data[p] += 1;
                        break;
                    }
                    data[p] = 1;
                    p += 1;
                }
                if p == ell {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Alice's query for group `i`, given her picks in that group's blocks.
    pub fn encode_query(&self, group_index: u64, picks: &[u64]) -> Result<GroupElement> {
        if picks.len() != self.ell as usize {
            return Err(Error::InvalidParameters(format!(
                "group query needs {} picks, got {}",
                self.ell,
                picks.len()
            )));
        }
        let data: Vec<u64> = picks.iter().map(|&b| b + 1).collect();
        self.encode_digits(group_index, 0, &data)
    }

    /// Padding elements: zero data digits, marker digit 1, top digit the
    /// pad rank. Their sums with anything stay outside the query range.
    pub fn pad_element(&self, rank: u64) -> Result<GroupElement> {
        debug_assert!(rank < self.pad_budget);
        self.encode_digits(rank, 1, &[])
    }
}

fn overflow() -> Error {
    Error::ParameterOverflow("encoding parameters exceed u64".into())
}

/// Wait-free view of the whole compiled reduction for one Bob input.
pub struct LsdEncoding {
    pub layout: LsdLayout,
    pub tsum: TsumInstance,
    /// Instance size after padding both sides.
    pub n: u64,
    pub raw_a1: usize,
    pub raw_a2: usize,
}

/// Bob's side: his subset as `A1`, the helper set as `A2`, both padded to a
/// common size with sum-safe elements.
pub fn encode_bob(instance: &LsdInstance, ell: u64, mode: EncodeMode) -> Result<LsdEncoding> {
    if ell == 0 {
        return Err(Error::InvalidParameters("ell must be >= 1".into()));
    }
    let padded = instance.padded_to_multiple(ell);
    // Upper bound on padding ranks: both sides padded to n.
    let helpers = ell * checked_pow_u64(instance.block_size, ell - 1)?;
    let n = (padded.n_blocks * padded.block_size).max(helpers);
    let layout = LsdLayout::new(padded.n_blocks, padded.block_size, ell, n, mode)?;

    let mut a1 = Vec::new();
    for &(j, b) in &padded.bob {
        a1.push(layout.encode_bob_element(j, b)?);
    }
    let mut a2 = layout.helper_elements()?;
    let (raw_a1, raw_a2) = (a1.len(), a2.len());
    for rank in raw_a1 as u64..n {
        a1.push(layout.pad_element(rank)?);
    }
    for rank in raw_a2 as u64..n {
        a2.push(layout.pad_element(rank)?);
    }
    let tsum = TsumInstance::new(layout.group().clone(), a1, a2)?;
    Ok(LsdEncoding { layout, tsum, n, raw_a1, raw_a2 })
}

fn checked_pow_u64(b: u64, e: u64) -> Result<u64> {
    let e = u32::try_from(e).map_err(|_| overflow())?;
    b.checked_pow(e).ok_or_else(overflow)
}

/// Alice's side: one query per group of `ell` blocks, indices shifted down
/// to in-group positions first.
pub fn encode_alice(instance: &LsdInstance, ell: u64, layout: &LsdLayout) -> Result<Vec<GroupElement>> {
    let padded = instance.padded_to_multiple(ell);
    let mut queries = Vec::with_capacity((padded.n_blocks / ell) as usize);
    for i in 0..padded.n_blocks / ell {
        let picks = &padded.alice[(i * ell) as usize..((i + 1) * ell) as usize];
        queries.push(layout.encode_query(i, picks)?);
    }
    Ok(queries)
}

/// The sets are disjoint exactly when every query comes back empty.
pub fn decide_disjointness(
    queries: &[GroupElement],
    mut answer: impl FnMut(&GroupElement) -> Result<bool>,
) -> Result<bool> {
    for q in queries {
        if answer(q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Disjointness via the brute-force oracle on the compiled instance.
pub fn decide_with_oracle(enc: &LsdEncoding, queries: &[GroupElement]) -> Result<bool> {
    decide_disjointness(queries, |q| Ok(brute_force_query(&enc.tsum, q)?.witness.is_some()))
}

/// Communication accounting for the batched protocol simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommStats {
    pub rounds: usize,
    pub alice_bits: u64,
    pub bob_bits: u64,
    pub disjoint: bool,
}

fn ceil_log2(x: &BigUint) -> u64 {
    if x <= &BigUint::one() {
        0
    } else {
        (x - 1u32).bits()
    }
}

/// Alice runs all her queries in lockstep against Bob's data structure,
/// decision path only. Per round she announces the set of new cells she
/// needs (a subset of the `S` cells, charged as `ceil(log2(C(S, k)))`
/// bits) and Bob replies with their contents (`k * w` bits). Cells already
/// fetched are answered from her cache for free.
pub fn simulate_protocol(
    enc: &LsdEncoding,
    queries: &[GroupElement],
    solution: &dyn CellProbeSolution,
) -> Result<CommStats> {
    let memory = solution.preprocess(&enc.tsum)?;
    let mut transcripts = Vec::with_capacity(queries.len());
    let mut disjoint = true;
    for q in queries {
        let (hit, transcript) = run_decision(solution, &memory, q)?;
        if hit {
            disjoint = false;
        }
        transcripts.push(transcript.addresses());
    }
    let rounds = transcripts.iter().map(Vec::len).max().unwrap_or(0);
    let mut cache: BTreeSet<usize> = BTreeSet::new();
    let mut alice_bits = 0u64;
    let mut bob_bits = 0u64;
    for round in 0..rounds {
        let mut wanted: BTreeSet<usize> = BTreeSet::new();
        for t in &transcripts {
            if let Some(&cell) = t.get(round) {
                if !cache.contains(&cell) {
                    wanted.insert(cell);
                }
            }
        }
        let k = wanted.len() as u64;
        alice_bits += ceil_log2(&binomial(solution.space() as u64, k));
        bob_bits += k * solution.word_bits() as u64;
        cache.extend(wanted);
    }
    Ok(CommStats { rounds, alice_bits, bob_bits, disjoint })
}

/// Chunk length `ell = max(1, floor(eps * lg n / lg w))` used when
/// auto-parameterizing.
pub fn default_ell(n: u64, w: u64, eps: f64) -> u64 {
    if n < 2 || w < 2 {
        return 1;
    }
    let v = (eps * (n as f64).log2() / (w as f64).log2()).floor();
    (v as u64).max(1)
}

/// Block size `B = w^4` used when auto-parameterizing.
pub fn default_block_size(w: u64) -> Result<u64> {
    w.checked_pow(4).ok_or_else(overflow)
}

/// Verdict comparison over a family of Bob/Alice inputs: every compiled
/// verdict must match the direct intersection test. Bob subsets are capped
/// at `max_bob` elements and sampled when the population is larger than
/// `x_cap`; every Alice input is always enumerated.
#[derive(Debug, Clone, Serialize)]
pub struct LsdCheckReport {
    pub instances_checked: u64,
    pub violations: u64,
    pub max_helper_count: u64,
    pub helper_bound: u64,
}

pub fn verify_against_intersection(
    n_blocks: u64,
    block_size: u64,
    ell: u64,
    max_bob: usize,
    x_cap: usize,
    seed: u64,
) -> Result<LsdCheckReport> {
    use rand::Rng;
    use rand::SeedableRng;
    let universe: Vec<(u64, u64)> = (0..n_blocks)
        .flat_map(|i| (0..block_size).map(move |b| (i, b)))
        .collect();
    let mut bob_sets: Vec<BTreeSet<(u64, u64)>> = Vec::new();
    let total_small: u64 = (0..=max_bob.min(universe.len()) as u64)
        .map(|k| u64::try_from(binomial(universe.len() as u64, k)).unwrap_or(u64::MAX))
        .sum();
    if total_small <= x_cap as u64 {
        // Exhaustive over all subsets of size <= max_bob.
        let mut stack: Vec<(usize, BTreeSet<(u64, u64)>)> = vec![(0, BTreeSet::new())];
        while let Some((next, cur)) = stack.pop() {
            bob_sets.push(cur.clone());
            if cur.len() >= max_bob {
                continue;
            }
            for (idx, element) in universe.iter().enumerate().skip(next) {
                let mut bigger = cur.clone();
                bigger.insert(*element);
                stack.push((idx + 1, bigger));
            }
        }
    } else {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
        for _ in 0..x_cap {
            let k = rng.gen_range(0..=max_bob.min(universe.len()));
            let mut set = BTreeSet::new();
            while set.len() < k {
                set.insert(universe[rng.gen_range(0..universe.len())]);
            }
            bob_sets.push(set);
        }
    }

    let helper_bound = checked_pow_u64(2 * block_size + 1, ell)?;
    let mut report = LsdCheckReport {
        instances_checked: 0,
        violations: 0,
        max_helper_count: 0,
        helper_bound,
    };
    let alice_total = checked_pow_u64(block_size, n_blocks)?;
    for bob in &bob_sets {
        let probe = LsdInstance::new(n_blocks, block_size, bob.clone(), vec![0; n_blocks as usize])?;
        let enc = encode_bob(&probe, ell, EncodeMode::Cyclic)?;
        report.max_helper_count = report.max_helper_count.max(enc.raw_a2 as u64);
        // u64 mirror of the brute-force oracle; cross-checked below.
        let modulus = enc.layout.group().order_u64().ok_or_else(overflow)?;
        let a1: Vec<u64> = enc.tsum.a1().iter().map(|e| e.to_u64().unwrap()).collect();
        let a2: Vec<u64> = enc.tsum.a2().iter().map(|e| e.to_u64().unwrap()).collect();
        let has_witness = |z: u64| -> bool {
            a1.iter().any(|&x| {
                let need = (z + modulus - x) % modulus;
                a2.binary_search(&need).is_ok()
            })
        };
        for alice_code in 0..alice_total {
            let mut picks = Vec::with_capacity(n_blocks as usize);
            let mut rest = alice_code;
            for _ in 0..n_blocks {
                picks.push(rest % block_size);
                rest /= block_size;
            }
            let inst = LsdInstance::new(n_blocks, block_size, bob.clone(), picks)?;
            let queries = encode_alice(&inst, ell, &enc.layout)?;
            let compiled_disjoint =
                decide_disjointness(&queries, |q| Ok(has_witness(q.to_u64().unwrap())))?;
            report.instances_checked += 1;
            if compiled_disjoint != !inst.intersects() {
                report.violations += 1;
            }
            // Periodically re-derive the verdict through the real oracle to
            // keep the fast path honest.
            if report.instances_checked.is_multiple_of(97) {
                let slow = decide_with_oracle(&enc, &queries)?;
                assert_eq!(slow, compiled_disjoint, "u64 mirror diverged from oracle");
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsum::{build_scan_solution, build_sumset_table};

    fn inst(n: u64, b: u64, bob: &[(u64, u64)], alice: &[u64]) -> LsdInstance {
        LsdInstance::new(n, b, bob.iter().copied().collect(), alice.to_vec()).unwrap()
    }

    #[test]
    fn helper_set_at_ell_one_is_zero_only() {
        // One digit that must be the zero one.
        let i = inst(2, 2, &[], &[0, 0]);
        let enc = encode_bob(&i, 1, EncodeMode::Cyclic).unwrap();
        assert_eq!(enc.raw_a2, 1);
        let helpers = enc.layout.helper_elements().unwrap();
        assert_eq!(helpers, vec![GroupElement::from_u64(0)]);
    }

    #[test]
    fn bob_element_formula() {
        // X = {(0,1)}, B=2, ell=1: 0*(2B+1)^2 + (1+1)*(2B+1)^0 = 2.
        let i = inst(2, 2, &[(0, 1)], &[0, 0]);
        let enc = encode_bob(&i, 1, EncodeMode::Cyclic).unwrap();
        let raw = enc.layout.encode_bob_element(0, 1).unwrap();
        assert_eq!(raw, GroupElement::from_u64(2));
        assert!(enc.tsum.a1().contains(&raw));
    }

    #[test]
    fn helper_count_bound() {
        for (b, ell) in [(2u64, 1u64), (2, 2), (3, 2), (4, 2)] {
            let i = inst(ell, b, &[], &vec![0; ell as usize]);
            let enc = encode_bob(&i, ell, EncodeMode::Cyclic).unwrap();
            let bound = (2 * b + 1).pow(ell as u32);
            assert_eq!(enc.raw_a2 as u64, ell * b.pow(ell as u32 - 1));
            assert!((enc.raw_a2 as u64) <= bound);
        }
    }

    #[test]
    fn query_formula_and_count() {
        // ell=1, b0=0: z0 = (0+1)*(2B+1)^0 = 1.
        let i = inst(2, 2, &[], &[0, 1]);
        let enc = encode_bob(&i, 1, EncodeMode::Cyclic).unwrap();
        let queries = encode_alice(&i, 1, &enc.layout).unwrap();
        assert_eq!(queries.len(), 2);
        assert_eq!(queries[0], GroupElement::from_u64(1));

        // Distinct groups land in disjoint residue ranges.
        let radix_power = BigUint::from(5u64).pow(2);
        let g0 = queries[0].id() / &radix_power;
        let g1 = queries[1].id() / &radix_power;
        assert_eq!(g0, BigUint::from(0u32));
        assert_eq!(g1, BigUint::from(1u32));
    }

    #[test]
    fn disjointness_examples() {
        // Empty Bob: always disjoint.
        let i = inst(2, 3, &[], &[1, 2]);
        let enc = encode_bob(&i, 1, EncodeMode::Cyclic).unwrap();
        let queries = encode_alice(&i, 1, &enc.layout).unwrap();
        assert!(decide_with_oracle(&enc, &queries).unwrap());

        // Bob holds Alice's block-1 element and nothing else that matches.
        let i = inst(2, 3, &[(1, 2), (0, 1)], &[0, 2]);
        assert!(i.intersects());
        let enc = encode_bob(&i, 1, EncodeMode::Cyclic).unwrap();
        let queries = encode_alice(&i, 1, &enc.layout).unwrap();
        assert!(!decide_with_oracle(&enc, &queries).unwrap());
        // Exactly the block-1 query has a witness.
        let w0 = brute_force_query(&enc.tsum, &queries[0]).unwrap().witness;
        let w1 = brute_force_query(&enc.tsum, &queries[1]).unwrap().witness;
        assert!(w0.is_none());
        assert!(w1.is_some());
    }

    #[test]
    fn witnesses_decode_to_the_queried_group() {
        let i = inst(4, 3, &[(0, 1), (1, 2), (2, 0), (3, 1)], &[1, 2, 0, 0]);
        let enc = encode_bob(&i, 2, EncodeMode::Cyclic).unwrap();
        let queries = encode_alice(&i, 2, &enc.layout).unwrap();
        for (gi, q) in queries.iter().enumerate() {
            if let Some((a1, _)) = brute_force_query(&enc.tsum, q).unwrap().witness {
                let digits = enc.layout.codec().decode(&a1).unwrap();
                let top = digits[enc.layout.ell() as usize + 1];
                assert_eq!(top, gi as u64, "witness A1 summand comes from group {}", gi);
            }
        }
    }

    #[test]
    fn padding_preserves_verdicts() {
        // ell does not divide N; fresh blocks must not flip anything.
        let i = inst(3, 2, &[(0, 0), (2, 1)], &[0, 1, 1]);
        let enc = encode_bob(&i, 2, EncodeMode::Cyclic).unwrap();
        let queries = encode_alice(&i, 2, &enc.layout).unwrap();
        assert_eq!(queries.len(), 2);
        assert_eq!(decide_with_oracle(&enc, &queries).unwrap(), !i.intersects());
    }

    #[test]
    fn xor_mode_matches_cyclic_verdicts() {
        for seed in 0..20u64 {
            let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15);
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                s >> 33
            };
            let (n, b) = (2u64, 2u64);
            let bob: BTreeSet<(u64, u64)> =
                (0..n * b).filter(|_| next() % 2 == 0).map(|v| (v / b, v % b)).collect();
            let alice: Vec<u64> = (0..n).map(|_| next() % b).collect();
            let i = LsdInstance::new(n, b, bob, alice).unwrap();
            let mut verdicts = Vec::new();
            for mode in [EncodeMode::Cyclic, EncodeMode::Xor] {
                let enc = encode_bob(&i, 2, mode).unwrap();
                let queries = encode_alice(&i, 2, &enc.layout).unwrap();
                verdicts.push(decide_with_oracle(&enc, &queries).unwrap());
            }
            assert_eq!(verdicts[0], verdicts[1]);
            assert_eq!(verdicts[0], !i.intersects());
        }
    }

    #[test]
    fn protocol_simulation_matches_decision() {
        let i = inst(2, 2, &[(0, 1), (1, 0)], &[1, 1]);
        let enc = encode_bob(&i, 1, EncodeMode::Cyclic).unwrap();
        let queries = encode_alice(&i, 1, &enc.layout).unwrap();
        let solution = build_sumset_table(&enc.tsum, 16).unwrap();
        let stats = simulate_protocol(&enc, &queries, &solution).unwrap();
        assert_eq!(stats.disjoint, decide_with_oracle(&enc, &queries).unwrap());
        // The decision path of the sumset table probes exactly once.
        assert_eq!(stats.rounds, 1);
        assert!(stats.bob_bits <= queries.len() as u64 * 16);
        assert!(stats.alice_bits > 0);

        // A multi-round solution carries the same verdict.
        let scan = build_scan_solution(&enc.tsum).unwrap();
        let scan_stats = simulate_protocol(&enc, &queries, &scan).unwrap();
        assert_eq!(scan_stats.disjoint, stats.disjoint);
        assert_eq!(scan_stats.rounds, 2 * enc.tsum.n());
    }

    #[test]
    fn default_parameters() {
        assert_eq!(default_block_size(4).unwrap(), 256);
        assert_eq!(default_ell(1 << 20, 4, 1.0), 10);
        assert_eq!(default_ell(16, 1 << 20, 0.5), 1);
    }

    #[test]
    fn exhaustive_small_families() {
        let report = verify_against_intersection(2, 2, 1, 4, 10_000, 0).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.instances_checked >= 16);
        assert!(report.max_helper_count <= report.helper_bound);

        let report = verify_against_intersection(2, 2, 2, 4, 10_000, 0).unwrap();
        assert_eq!(report.violations, 0);
    }
}
