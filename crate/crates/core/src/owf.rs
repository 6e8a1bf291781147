//! The immunized one-way function `F'(x1, x2) = R(x1) + R(x2)` over a
//! random oracle `R : [N] -> G`, and a harness pitting preprocessing
//! adversaries against it. An adversary builds advice cells offline with
//! unbounded oracle access, then inverts challenges online through counted
//! handles; advice probes and oracle calls are accounted separately.

use crate::cellprobe::CellProbeSolution;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::inversion::{chain_salt, hellman_build};
use crate::tsum::{build_sumset_table, SumsetTableSolution, TsumInstance};
use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// A fixed uniformly drawn table `R : [N] -> G`.
#[derive(Debug, Clone)]
pub struct RandomOracle {
    n: u64,
    group: GroupSpec,
    table: Vec<GroupElement>,
    seed: u64,
}

impl RandomOracle {
    pub fn new(n: u64, group: GroupSpec, seed: u64) -> Result<Self> {
        group.validate()?;
        if n < 2 {
            return Err(Error::InvalidParameters("oracle domain needs at least 2 points".into()));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let table = (0..n).map(|_| group.random_element(&mut rng)).collect();
        Ok(RandomOracle { n, group, table, seed })
    }

    pub fn domain(&self) -> u64 {
        self.n
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn value(&self, x: u64) -> Result<&GroupElement> {
        self.table
            .get(usize::try_from(x).map_err(|_| Error::OutOfDomain { x, domain: self.n })?)
            .ok_or(Error::OutOfDomain { x, domain: self.n })
    }

    /// Distinct values of the table, sorted.
    pub fn image(&self) -> Vec<GroupElement> {
        let set: BTreeSet<GroupElement> = self.table.iter().cloned().collect();
        set.into_iter().collect()
    }
}

/// `F'(x1, x2) = R(x1) + R(x2)` with `x1 != x2`; symmetric in its inputs.
pub fn immunized_eval(oracle: &RandomOracle, x1: u64, x2: u64) -> Result<GroupElement> {
    if x1 == x2 {
        return Err(Error::EqualHalves);
    }
    oracle.group.add(oracle.value(x1)?, oracle.value(x2)?)
}

/// Number of unordered pairs over `[n]`.
pub fn pair_count(n: u64) -> u64 {
    n * (n - 1) / 2
}

/// Rank of `{x1, x2}` with `x1 < x2` in colex order.
pub fn pair_rank(x1: u64, x2: u64) -> u64 {
    debug_assert!(x1 < x2);
    x2 * (x2 - 1) / 2 + x1
}

pub fn pair_unrank(rank: u64) -> (u64, u64) {
    // x2 = floor((1 + sqrt(1 + 8 rank)) / 2), corrected for fp error.
    let mut x2 = ((1.0 + (1.0 + 8.0 * rank as f64).sqrt()) / 2.0) as u64;
    while x2 * (x2 - 1) / 2 > rank {
        x2 -= 1;
    }
    while (x2 + 1) * x2 / 2 <= rank {
        x2 += 1;
    }
    (rank - x2 * (x2 - 1) / 2, x2)
}

// ---------------------------------------------------------------------------
// Online-phase accounting
// ---------------------------------------------------------------------------

/// Advice cells produced in the offline phase.
#[derive(Debug, Clone)]
pub struct Advice {
    pub cells: Vec<BigUint>,
    pub word_bits: u32,
}

/// Counted access to advice cells.
pub struct AdviceHandle<'a> {
    advice: &'a Advice,
    probes: u64,
}

impl<'a> AdviceHandle<'a> {
    pub fn new(advice: &'a Advice) -> Self {
        AdviceHandle { advice, probes: 0 }
    }

    pub fn read(&mut self, index: usize) -> Result<BigUint> {
        let cell = self
            .advice
            .cells
            .get(index)
            .ok_or(Error::OutOfBoundsProbe { index, cells: self.advice.cells.len() })?;
        self.probes += 1;
        Ok(cell.clone())
    }

    pub fn probes(&self) -> u64 {
        self.probes
    }
}

/// Counted access to the random oracle.
pub struct OracleHandle<'a> {
    oracle: &'a RandomOracle,
    calls: u64,
}

impl<'a> OracleHandle<'a> {
    pub fn new(oracle: &'a RandomOracle) -> Self {
        OracleHandle { oracle, calls: 0 }
    }

    pub fn call(&mut self, x: u64) -> Result<GroupElement> {
        self.calls += 1;
        Ok(self.oracle.value(x)?.clone())
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Accounting {
    pub advice_probes: u64,
    pub oracle_calls: u64,
}

/// An offline advice builder plus an online inverter that may only touch
/// the world through the counted handles.
pub trait PreprocessingAdversary {
    fn name(&self) -> &'static str;

    fn prepare(&self, oracle: &RandomOracle) -> Result<Advice>;

    fn invert(
        &self,
        advice: &mut AdviceHandle<'_>,
        oracle: &mut OracleHandle<'_>,
        y: &GroupElement,
    ) -> Result<Option<(u64, u64)>>;
}

fn bits_for(v: u64) -> u32 {
    (64 - v.leading_zeros()).max(1)
}

fn order_fits(oracle: &RandomOracle) -> Result<u64> {
    oracle.group.order_u64().ok_or_else(|| {
        Error::ParameterOverflow("group order must fit u64 for this adversary".into())
    })
}

// ---------------------------------------------------------------------------
// Full inverse table
// ---------------------------------------------------------------------------

/// Stores, per group element, one preimage pair. One advice probe per
/// inversion and perfect success on image points.
pub struct FullTableAdversary;

impl PreprocessingAdversary for FullTableAdversary {
    fn name(&self) -> &'static str {
        "table"
    }

    fn prepare(&self, oracle: &RandomOracle) -> Result<Advice> {
        let order = order_fits(oracle)?;
        let n = oracle.domain();
        let mut cells = vec![BigUint::zero(); order as usize];
        for x2 in 1..n {
            for x1 in 0..x2 {
                let y = immunized_eval(oracle, x1, x2)?;
                let slot = y.to_u64().expect("order fits") as usize;
                if cells[slot].is_zero() {
                    cells[slot] = BigUint::from(pair_rank(x1, x2) + 1);
                }
            }
        }
        Ok(Advice { cells, word_bits: bits_for(pair_count(n) + 1) })
    }

    fn invert(
        &self,
        advice: &mut AdviceHandle<'_>,
        _oracle: &mut OracleHandle<'_>,
        y: &GroupElement,
    ) -> Result<Option<(u64, u64)>> {
        let slot = match y.to_u64() {
            Some(g) => g as usize,
            None => return Ok(None),
        };
        let packed = advice.read(slot)?;
        if packed.is_zero() {
            return Ok(None);
        }
        let rank = u64::try_from(packed - 1u32).expect("rank fits");
        Ok(Some(pair_unrank(rank)))
    }
}

// ---------------------------------------------------------------------------
// Hellman chains over the pair-sum function
// ---------------------------------------------------------------------------

/// Hellman chains over `h(p) = F'(pair p)`: endpoints in advice, chain
/// steps replayed online through the oracle handle.
pub struct HellmanAdversary {
    pub m: u64,
    pub t: u64,
    pub seed: u64,
}

impl HellmanAdversary {
    fn reduce(&self, y: u64, pairs: u64) -> u64 {
        (y % pairs + chain_salt(self.seed, pairs) % pairs) % pairs
    }

    fn eval_counted(
        oracle: &mut OracleHandle<'_>,
        group: &GroupSpec,
        p: u64,
    ) -> Result<GroupElement> {
        let (x1, x2) = pair_unrank(p);
        group.add(&oracle.call(x1)?, &oracle.call(x2)?)
    }

    /// Exact probability that an inversion succeeds when the challenge is
    /// `F'` of a uniform pair: the mass of the chain-covered image points.
    pub fn exact_success(&self, oracle: &RandomOracle) -> Result<f64> {
        let order = order_fits(oracle)?;
        let n = oracle.domain();
        let pairs = pair_count(n);
        let ids: Vec<u64> = oracle
            .table
            .iter()
            .map(|e| e.to_u64().expect("order fits"))
            .collect();
        let table = self.build_table(oracle)?;
        let covered = table.coverage(|p| {
            let (x1, x2) = pair_unrank(p);
            sum_ids(&oracle.group, ids[x1 as usize], ids[x2 as usize], order)
        });
        let mut covered_bits = vec![false; order as usize];
        for y in covered {
            covered_bits[y as usize] = true;
        }
        let mut hit = 0u64;
        for x2 in 1..n {
            for x1 in 0..x2 {
                let y = sum_ids(&oracle.group, ids[x1 as usize], ids[x2 as usize], order);
                if covered_bits[y as usize] {
                    hit += 1;
                }
            }
        }
        Ok(hit as f64 / pairs as f64)
    }

    fn build_table(&self, oracle: &RandomOracle) -> Result<crate::inversion::HellmanTable> {
        let order = order_fits(oracle)?;
        let n = oracle.domain();
        let ids: Vec<u64> = oracle
            .table
            .iter()
            .map(|e| e.to_u64().expect("order fits"))
            .collect();
        hellman_build(
            |p| {
                let (x1, x2) = pair_unrank(p);
                sum_ids(&oracle.group, ids[x1 as usize], ids[x2 as usize], order)
            },
            pair_count(n),
            order,
            self.m,
            self.t,
            self.seed,
        )
    }
}

/// Group addition on u64 ids; only cyclic and xor groups reach here.
fn sum_ids(group: &GroupSpec, a: u64, b: u64, order: u64) -> u64 {
    match group {
        GroupSpec::Xor { .. } => a ^ b,
        GroupSpec::Cyclic { .. } => ((a as u128 + b as u128) % order as u128) as u64,
        GroupSpec::Product { .. } => group
            .add(&GroupElement::from_u64(a), &GroupElement::from_u64(b))
            .expect("ids valid")
            .to_u64()
            .expect("order fits"),
    }
}

impl PreprocessingAdversary for HellmanAdversary {
    fn name(&self) -> &'static str {
        "hellman"
    }

    fn prepare(&self, oracle: &RandomOracle) -> Result<Advice> {
        let table = self.build_table(oracle)?;
        let stored: Vec<(u64, u64)> = table.endpoint_pairs().collect();
        let pairs = pair_count(oracle.domain());
        let mut cells = Vec::with_capacity(1 + 2 * stored.len());
        cells.push(BigUint::from(stored.len()));
        cells.extend(stored.iter().map(|(end, _)| BigUint::from(*end)));
        cells.extend(stored.iter().map(|(_, start)| BigUint::from(*start)));
        Ok(Advice { cells, word_bits: bits_for(pairs.max(self.m)) })
    }

    fn invert(
        &self,
        advice: &mut AdviceHandle<'_>,
        oracle: &mut OracleHandle<'_>,
        y: &GroupElement,
    ) -> Result<Option<(u64, u64)>> {
        let group = oracle.oracle.group.clone();
        let pairs = pair_count(oracle.oracle.domain());
        let stored = usize::try_from(advice.read(0)?).expect("count fits");
        let y_id = match y.to_u64() {
            Some(v) => v,
            None => return Ok(None),
        };
        let mut z = self.reduce(y_id, pairs);
        for j in 0..self.t {
            // Binary search the endpoint region [1, 1 + stored).
            let (mut lo, mut hi) = (0usize, stored);
            let mut found = None;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                let v = u64::try_from(advice.read(1 + mid)?).expect("endpoint fits");
                match v.cmp(&z) {
                    std::cmp::Ordering::Equal => {
                        found = Some(mid);
                        break;
                    }
                    std::cmp::Ordering::Less => lo = mid + 1,
                    std::cmp::Ordering::Greater => hi = mid,
                }
            }
            if let Some(idx) = found {
                let start = u64::try_from(advice.read(1 + stored + idx)?).expect("start fits");
                let mut w = start;
                for _ in 0..(self.t - 1 - j) {
                    let e = Self::eval_counted(oracle, &group, w)?;
                    w = self.reduce(e.to_u64().expect("order fits"), pairs);
                }
                if Self::eval_counted(oracle, &group, w)? == *y {
                    return Ok(Some(pair_unrank(w)));
                }
            }
            if j + 1 < self.t {
                let e = Self::eval_counted(oracle, &group, z)?;
                z = self.reduce(e.to_u64().expect("order fits"), pairs);
            }
        }
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Inversion through a 3SUM-Indexing data structure
// ---------------------------------------------------------------------------

/// Builds `A1 = A2 = image(R)` per the same-sets problem form, stores a
/// sumset-table data structure over it as advice together with a
/// value-to-preimage index, and answers challenges by querying the
/// structure and resolving the witness back to oracle inputs.
pub struct TsumAdversary;

struct TsumLayout {
    ds_cells: usize,
    values: usize,
}

impl TsumLayout {
    fn values_at(&self) -> usize {
        2 + self.ds_cells
    }
    fn first_at(&self) -> usize {
        self.values_at() + self.values
    }
    fn second_at(&self) -> usize {
        self.first_at() + self.values
    }
    fn total(&self) -> usize {
        self.second_at() + self.values
    }
}

impl TsumAdversary {
    fn solution(&self, oracle: &RandomOracle) -> Result<(SumsetTableSolution, TsumInstance)> {
        let order = order_fits(oracle)?;
        let image = oracle.image();
        let instance =
            TsumInstance::new(oracle.group.clone(), image.clone(), image)?;
        let word_bits = bits_for(order).max(bits_for(oracle.domain() + 1));
        let solution = build_sumset_table(&instance, word_bits)?;
        Ok((solution, instance))
    }
}

impl PreprocessingAdversary for TsumAdversary {
    fn name(&self) -> &'static str {
        "tsum"
    }

    fn prepare(&self, oracle: &RandomOracle) -> Result<Advice> {
        let (solution, instance) = self.solution(oracle)?;
        let memory = solution.preprocess(&instance)?;
        // Per distinct value: the value id, its smallest preimage, and a
        // second distinct preimage or the domain size as sentinel.
        let mut preimages: BTreeMap<&GroupElement, Vec<u64>> = BTreeMap::new();
        for (x, v) in oracle.table.iter().enumerate() {
            preimages.entry(v).or_default().push(x as u64);
        }
        let layout = TsumLayout { ds_cells: memory.num_cells(), values: preimages.len() };
        let mut cells = Vec::with_capacity(layout.total());
        cells.push(BigUint::from(layout.ds_cells));
        cells.push(BigUint::from(layout.values));
        for i in 0..layout.ds_cells {
            cells.push(memory.peek(i).expect("in range").clone());
        }
        for v in preimages.keys() {
            cells.push(v.id().clone());
        }
        for xs in preimages.values() {
            cells.push(BigUint::from(xs[0]));
        }
        for xs in preimages.values() {
            cells.push(BigUint::from(*xs.get(1).unwrap_or(&oracle.domain())));
        }
        Ok(Advice { cells, word_bits: memory.word_bits().max(bits_for(oracle.domain() + 1)) })
    }

    fn invert(
        &self,
        advice: &mut AdviceHandle<'_>,
        oracle: &mut OracleHandle<'_>,
        y: &GroupElement,
    ) -> Result<Option<(u64, u64)>> {
        let group = oracle.oracle.group.clone();
        let order = match group.order_u64() {
            Some(o) => o,
            None => return Ok(None),
        };
        let g = match y.to_u64().filter(|&v| v < order) {
            Some(v) => v,
            None => return Ok(None),
        };
        let ds_cells = usize::try_from(advice.read(0)?).expect("count fits");
        let values = usize::try_from(advice.read(1)?).expect("count fits");
        let layout = TsumLayout { ds_cells, values };
        let word_bits = advice.advice.word_bits as u64;
        let sentinel = BigUint::from(oracle.oracle.domain());

        // Decision probe into the sumset bitmap.
        let (cell, bit) = ((g / word_bits) as usize, (g % word_bits) as u32);
        let word = advice.read(2 + cell)?;
        if (word >> bit) & BigUint::from(1u32) == BigUint::zero() {
            return Ok(None);
        }
        // Witness probe: smallest a1 with a1 + a2 = y over the image sets.
        let decision_cells = (order as usize).div_ceil(word_bits as usize);
        let packed = advice.read(2 + decision_cells + g as usize)?;
        let a1 = GroupElement::new(packed - 1u32);
        let a2 = group.sub(y, &a1)?;

        let search = |advice: &mut AdviceHandle<'_>, key: &GroupElement| -> Result<Option<usize>> {
            let (mut lo, mut hi) = (0usize, layout.values);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                let v = advice.read(layout.values_at() + mid)?;
                match v.cmp(key.id()) {
                    std::cmp::Ordering::Equal => return Ok(Some(mid)),
                    std::cmp::Ordering::Less => lo = mid + 1,
                    std::cmp::Ordering::Greater => hi = mid,
                }
            }
            Ok(None)
        };

        let resolve = |advice: &mut AdviceHandle<'_>,
                           a1: &GroupElement,
                           a2: &GroupElement|
         -> Result<Option<(u64, u64)>> {
            let i1 = match search(advice, a1)? {
                Some(i) => i,
                None => return Ok(None),
            };
            let x1 = u64::try_from(advice.read(layout.first_at() + i1)?).expect("fits");
            if a1 == a2 {
                let second = advice.read(layout.second_at() + i1)?;
                if second == sentinel {
                    return Ok(None);
                }
                let x2 = u64::try_from(second).expect("fits");
                return Ok(Some((x1.min(x2), x1.max(x2))));
            }
            let i2 = match search(advice, a2)? {
                Some(i) => i,
                None => return Ok(None),
            };
            let x2 = u64::try_from(advice.read(layout.first_at() + i2)?).expect("fits");
            Ok(Some((x1.min(x2), x1.max(x2))))
        };

        if let Some(pair) = resolve(advice, &a1, &a2)? {
            return Ok(Some(pair));
        }
        // The stored witness was a doubled value with a unique preimage.
        // Fall back to scanning the image for a resolvable split.
        for i in 0..layout.values {
            let v = GroupElement::new(advice.read(layout.values_at() + i)?);
            let need = group.sub(y, &v)?;
            if let Some(pair) = resolve(advice, &v, &need)? {
                return Ok(Some(pair));
            }
        }
        Ok(None)
    }
}

/// One-shot inversion through the 3SUM-Indexing route.
pub fn invert_via_tsum(
    oracle: &RandomOracle,
    y: &GroupElement,
) -> Result<(Option<(u64, u64)>, Accounting)> {
    let adversary = TsumAdversary;
    let advice = adversary.prepare(oracle)?;
    let mut advice_handle = AdviceHandle::new(&advice);
    let mut oracle_handle = OracleHandle::new(oracle);
    let pair = adversary.invert(&mut advice_handle, &mut oracle_handle, y)?;
    Ok((
        pair,
        Accounting {
            advice_probes: advice_handle.probes(),
            oracle_calls: oracle_handle.calls(),
        },
    ))
}

// ---------------------------------------------------------------------------
// Zero-advice baseline
// ---------------------------------------------------------------------------

/// Keeps no advice at all: checks one fixed guess against the challenge,
/// which succeeds exactly with the guess's image mass.
pub struct NullAdversary;

impl PreprocessingAdversary for NullAdversary {
    fn name(&self) -> &'static str {
        "null"
    }

    fn prepare(&self, _oracle: &RandomOracle) -> Result<Advice> {
        Ok(Advice { cells: Vec::new(), word_bits: 1 })
    }

    fn invert(
        &self,
        _advice: &mut AdviceHandle<'_>,
        oracle: &mut OracleHandle<'_>,
        y: &GroupElement,
    ) -> Result<Option<(u64, u64)>> {
        let guess = oracle.oracle.group.add(&oracle.call(0)?, &oracle.call(1)?)?;
        Ok(if guess == *y { Some((0, 1)) } else { None })
    }
}

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct OwfReport {
    pub adversary: String,
    pub domain: u64,
    pub group_order: String,
    pub advice_cells: usize,
    pub word_bits: u32,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub max_advice_probes: u64,
    pub max_oracle_calls: u64,
    /// Claimed inversions that failed re-evaluation; must stay zero.
    pub exceptions: u64,
    /// Reference curve `T (S w + lg N) / N` for an advice-string inverter.
    pub dtt_line: f64,
    /// Reference curve `S^2 T / N^2` for chain-table inverters.
    pub hellman_line: f64,
}

/// Monte-Carlo success of the adversary over challenges `y = F'(pair)`
/// with the pair uniform. Every claimed preimage is re-evaluated.
pub fn run_experiment(
    adversary: &dyn PreprocessingAdversary,
    oracle: &RandomOracle,
    trials: u64,
    seed: u64,
) -> Result<OwfReport> {
    if trials == 0 {
        return Err(Error::InvalidParameters("need at least one trial".into()));
    }
    let advice = adversary.prepare(oracle)?;
    let pairs = pair_count(oracle.domain());
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x0f17_ed0a);
    let mut successes = 0u64;
    let mut exceptions = 0u64;
    let (mut max_probes, mut max_calls) = (0u64, 0u64);
    for _ in 0..trials {
        let (x1, x2) = pair_unrank(rng.gen_range(0..pairs));
        let y = immunized_eval(oracle, x1, x2)?;
        let mut advice_handle = AdviceHandle::new(&advice);
        let mut oracle_handle = OracleHandle::new(oracle);
        let answer = adversary.invert(&mut advice_handle, &mut oracle_handle, &y)?;
        max_probes = max_probes.max(advice_handle.probes());
        max_calls = max_calls.max(oracle_handle.calls());
        if let Some((z1, z2)) = answer {
            match immunized_eval(oracle, z1, z2) {
                Ok(back) if back == y => successes += 1,
                _ => exceptions += 1,
            }
        }
    }
    let s = advice.cells.len() as f64;
    let w = advice.word_bits as f64;
    let n = oracle.domain() as f64;
    let t_total = (max_probes + max_calls) as f64;
    Ok(OwfReport {
        adversary: adversary.name().to_string(),
        domain: oracle.domain(),
        group_order: oracle.group.order().to_string(),
        advice_cells: advice.cells.len(),
        word_bits: advice.word_bits,
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        max_advice_probes: max_probes,
        max_oracle_calls: max_calls,
        exceptions,
        dtt_line: t_total * (s * w + n.log2()) / n,
        hellman_line: s * s * t_total / (n * n),
    })
}
