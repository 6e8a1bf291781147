//! The cell-probe execution model: preprocessing produces `S` cells of `w`
//! bits, queries may only touch memory through an audited handle, and every
//! read is logged against the declared probe budget.

use crate::error::{Error, Result};
use crate::group::{serde_biguint, GroupElement, GroupSpec};
use crate::tsum::{SumsetAnswer, TsumInstance};
use num_bigint::{BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

/// Preprocessing output: `S` words of exactly `w` bits each.
#[derive(Debug, Clone)]
pub struct Memory {
    cells: Vec<BigUint>,
    word_bits: u32,
}

impl Memory {
    pub fn new(cells: Vec<BigUint>, word_bits: u32) -> Result<Self> {
        if word_bits == 0 {
            return Err(Error::InvalidParameters("word size must be >= 1 bit".into()));
        }
        let limit = BigUint::one() << word_bits;
        for (i, c) in cells.iter().enumerate() {
            if c >= &limit {
                return Err(Error::InvalidParameters(format!(
                    "cell {} holds {} which exceeds {} bits",
                    i, c, word_bits
                )));
            }
        }
        Ok(Memory { cells, word_bits })
    }

    /// Uniformly random contents, used by the non-adaptivity check.
    pub fn random(cells: usize, word_bits: u32, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let limit = BigUint::one() << word_bits;
        let cells = (0..cells).map(|_| rng.gen_biguint_below(&limit)).collect();
        Memory { cells, word_bits }
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    /// Unaudited read, for inspection and tests only. Query algorithms must
    /// go through [`ProbeHandle::read`].
    pub fn peek(&self, index: usize) -> Option<&BigUint> {
        self.cells.get(index)
    }
}

/// Ordered log of (cell index, word read), plus whether any probe address
/// may have depended on previously read contents.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeTranscript {
    pub probes: Vec<ProbeRecord>,
    pub adaptive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRecord {
    pub cell: usize,
    #[serde(with = "serde_biguint")]
    pub word: BigUint,
}

impl ProbeTranscript {
    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn addresses(&self) -> Vec<usize> {
        self.probes.iter().map(|p| p.cell).collect()
    }
}

/// The only gate to memory during a query. Enforces bounds and the probe
/// budget and records the transcript.
///
/// A solution whose probe addresses depend only on the query should declare
/// its schedule up front; reads then count as non-adaptive as long as they
/// follow the declared order. Any undeclared or out-of-order read marks the
/// transcript adaptive.
pub struct ProbeHandle<'a> {
    memory: &'a Memory,
    budget: usize,
    probes: Vec<ProbeRecord>,
    schedule: Option<Vec<usize>>,
    deviated: bool,
}

impl<'a> ProbeHandle<'a> {
    pub fn new(memory: &'a Memory, budget: usize) -> Self {
        ProbeHandle { memory, budget, probes: Vec::new(), schedule: None, deviated: false }
    }

    /// Announce the full probe address sequence as a function of the query
    /// alone. Must be called before any read.
    pub fn declare_schedule(&mut self, addresses: Vec<usize>) {
        if self.probes.is_empty() {
            self.schedule = Some(addresses);
        } else {
            self.deviated = true;
        }
    }

    pub fn read(&mut self, index: usize) -> Result<BigUint> {
        if self.probes.len() >= self.budget {
            return Err(Error::ProbeBudgetExceeded { budget: self.budget });
        }
        let word = self
            .memory
            .peek(index)
            .ok_or(Error::OutOfBoundsProbe { index, cells: self.memory.num_cells() })?
            .clone();
        match &self.schedule {
            Some(s) if s.get(self.probes.len()) == Some(&index) => {}
            Some(_) => self.deviated = true,
            None => {}
        }
        self.probes.push(ProbeRecord { cell: index, word: word.clone() });
        Ok(word)
    }

    pub fn probes_so_far(&self) -> usize {
        self.probes.len()
    }

    pub fn into_transcript(self) -> ProbeTranscript {
        let adaptive = match &self.schedule {
            Some(_) => self.deviated,
            None => !self.probes.is_empty(),
        };
        ProbeTranscript { probes: self.probes, adaptive }
    }
}

/// A static data structure: a preprocessing algorithm that lays out memory
/// and a query algorithm that may touch memory only through the handle.
pub trait CellProbeSolution {
    fn name(&self) -> &str;
    /// Declared cell count S.
    fn space(&self) -> usize;
    /// Declared word size w in bits.
    fn word_bits(&self) -> u32;
    /// Declared worst-case probes T per query.
    fn probe_budget(&self) -> usize;

    fn preprocess(&self, instance: &TsumInstance) -> Result<Memory>;

    fn query(&self, z: &GroupElement, probes: &mut ProbeHandle<'_>) -> Result<SumsetAnswer>;

    /// Decision-only variant; solutions with a cheaper existence path
    /// override this.
    fn decide(&self, z: &GroupElement, probes: &mut ProbeHandle<'_>) -> Result<bool> {
        Ok(self.query(z, probes)?.witness.is_some())
    }
}

/// Run one audited query against preprocessed memory.
pub fn run_query(
    solution: &dyn CellProbeSolution,
    memory: &Memory,
    z: &GroupElement,
) -> Result<(SumsetAnswer, ProbeTranscript)> {
    let mut handle = ProbeHandle::new(memory, solution.probe_budget());
    let answer = solution.query(z, &mut handle)?;
    Ok((answer, handle.into_transcript()))
}

/// Run one audited decision-only query.
pub fn run_decision(
    solution: &dyn CellProbeSolution,
    memory: &Memory,
    z: &GroupElement,
) -> Result<(bool, ProbeTranscript)> {
    let mut handle = ProbeHandle::new(memory, solution.probe_budget());
    let answer = solution.decide(z, &mut handle)?;
    Ok((answer, handle.into_transcript()))
}

/// Behavioral non-adaptivity check: for each sampled query, the probe
/// addresses under several memories with distinct random contents must all
/// follow one content-independent schedule. Contents may still cut a query
/// short (an early no), so the sequences are required to be prefixes of the
/// longest one rather than literally identical. Probe errors on garbage
/// contents count as adaptive behavior.
pub fn verify_nonadaptive(
    solution: &dyn CellProbeSolution,
    _group: &GroupSpec,
    sample_queries: &[GroupElement],
) -> bool {
    let memories: Vec<Memory> = (0..4)
        .map(|i| Memory::random(solution.space(), solution.word_bits(), 0x5eed_0001 + i))
        .collect();
    for z in sample_queries {
        let mut sequences = Vec::with_capacity(memories.len());
        for mem in &memories {
            let mut handle = ProbeHandle::new(mem, solution.probe_budget());
            match solution.query(z, &mut handle) {
                Ok(_) => sequences.push(handle.into_transcript().addresses()),
                Err(_) => return false,
            }
        }
        let longest = sequences.iter().map(Vec::len).max().unwrap_or(0);
        let reference = sequences.iter().find(|s| s.len() == longest).cloned().unwrap_or_default();
        if !sequences.iter().all(|s| reference.starts_with(s)) {
            return false;
        }
    }
    true
}

/// Exact cell-sampling count together with its closed-form relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSamplingCount {
    /// `|G| * C(S-T, D-T) / C(S, D)`: the average number of queries answered
    /// by a subset of D cells when every query probes T cells.
    pub exact: BigRational,
    /// `|G| * ((D - T + 1) / S)^T`, always a lower bound on `exact`.
    pub simplified: BigRational,
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Average number of queries answered by a subset of `delta` cells, over a
/// data structure with `s` cells answering each of `g_order` queries with
/// `t` non-adaptive probes.
pub fn cell_sampling_count(
    g_order: &BigUint,
    s: u64,
    t: u64,
    delta: u64,
) -> Result<CellSamplingCount> {
    if s == 0 || t > delta || delta > s {
        return Err(Error::InvalidParameters(format!(
            "need 0 <= T <= Delta <= S with S >= 1, got S={} T={} Delta={}",
            s, t, delta
        )));
    }
    let g = BigRational::from_integer(g_order.clone().into());
    let exact = &g
        * BigRational::new(binomial(s - t, delta - t).into(), binomial(s, delta).into());
    let ratio = BigRational::new(BigUint::from(delta - t + 1).into(), BigUint::from(s).into());
    let mut pow = BigRational::one();
    for _ in 0..t {
        pow *= &ratio;
    }
    Ok(CellSamplingCount { exact, simplified: g * pow })
}

/// Default subset size `n / (2w)` used by the sampling argument.
pub fn default_delta(n: u64, w: u32) -> u64 {
    n / (2 * w as u64)
}
