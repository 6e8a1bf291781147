//! Function-inversion primitives: full inverse tables and single-table
//! Hellman chains with exact coverage accounting.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// An explicit function `f : [N] -> [M]`.
#[derive(Debug, Clone)]
pub struct FunctionTable {
    values: Vec<u64>,
    codomain: u64,
}

impl FunctionTable {
    pub fn new(values: Vec<u64>, codomain: u64) -> Result<Self> {
        for (x, &v) in values.iter().enumerate() {
            if v >= codomain {
                return Err(Error::InvalidParameters(format!(
                    "f({}) = {} outside codomain [0, {})",
                    x, v, codomain
                )));
            }
        }
        Ok(FunctionTable { values, codomain })
    }

    pub fn domain(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn codomain(&self) -> u64 {
        self.codomain
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        self.values
            .get(usize::try_from(x).map_err(|_| Error::OutOfDomain { x, domain: self.domain() })?)
            .copied()
            .ok_or(Error::OutOfDomain { x, domain: self.domain() })
    }

    pub fn image(&self) -> BTreeSet<u64> {
        self.values.iter().copied().collect()
    }
}

/// Full inverse index: for every image point, the smallest preimage.
#[derive(Debug, Clone)]
pub struct InverseIndex {
    map: BTreeMap<u64, u64>,
}

pub fn build_full_inverse(f: &FunctionTable) -> InverseIndex {
    let mut map = BTreeMap::new();
    for x in 0..f.domain() {
        let y = f.eval(x).expect("x in domain");
        map.entry(y).or_insert(x);
    }
    InverseIndex { map }
}

impl InverseIndex {
    pub fn invert(&self, y: u64) -> Option<u64> {
        self.map.get(&y).copied()
    }

    pub fn image_size(&self) -> u64 {
        self.map.len() as u64
    }
}

/// Single-table Hellman chains over `f : [N] -> [M]`.
///
/// The reduction step maps an image point back into the domain as
/// `(y mod N + salt) mod N`. A chain of length `t` starting at `x_0` visits
/// `x_i = reduce(f(x_{i-1}))`; only `(x_t, x_0)` endpoint pairs are stored.
/// When two chains collide on an endpoint the first insertion wins, so
/// growing `m` under a fixed seed only ever adds coverage.
#[derive(Debug, Clone)]
pub struct HellmanTable {
    m: u64,
    t: u64,
    salt: u64,
    domain: u64,
    codomain: u64,
    /// endpoint -> chain start
    endpoints: BTreeMap<u64, u64>,
}

/// Outcome of one inversion attempt with oracle-call accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HellmanLookup {
    pub preimage: Option<u64>,
    pub oracle_calls: u64,
}

impl HellmanTable {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn codomain(&self) -> u64 {
        self.codomain
    }

    /// Number of stored endpoint pairs.
    pub fn stored_chains(&self) -> u64 {
        self.endpoints.len() as u64
    }

    pub fn endpoint_pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.endpoints.iter().map(|(&e, &s)| (e, s))
    }

    fn reduce(&self, y: u64) -> u64 {
        ((y % self.domain) + self.salt) % self.domain
    }

    /// Worst-case oracle calls per lookup. The forward walk costs at most
    /// `t` calls; each endpoint hit costs at most `t` more to rebuild the
    /// candidate and verify it, and at most `t` hits can occur.
    pub fn oracle_budget(&self) -> u64 {
        self.t * (self.t + 1)
    }

    /// Reduction salt in use; equals `chain_salt(seed, domain)`.
    pub fn salt(&self) -> u64 {
        self.salt
    }

    /// The exact set of image points a lookup will succeed on: every `f`
    /// value along a chain whose stored endpoint maps to its own start.
    pub fn coverage<F: FnMut(u64) -> u64>(&self, mut f: F) -> BTreeSet<u64> {
        let mut covered = BTreeSet::new();
        for (&end, &start) in &self.endpoints {
            let mut x = start;
            for _ in 0..self.t {
                let y = f(x);
                covered.insert(y);
                x = self.reduce(y);
            }
            debug_assert_eq!(x, end);
        }
        covered
    }
}

/// Splitmix-style stream deriving chain starts and the salt from one seed.
struct SeedStream {
    state: u64,
}

impl SeedStream {
    fn new(seed: u64) -> Self {
        SeedStream { state: seed.wrapping_add(0x9e3779b97f4a7c15) }
    }

    fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

/// The reduction salt a table built from `seed` over `domain` will use.
/// Query algorithms that store only endpoints re-derive it from here.
pub fn chain_salt(seed: u64, domain: u64) -> u64 {
    SeedStream::new(seed).next() % domain
}

/// Build a Hellman table with `m` chains of length `t`. Chain starts and
/// the reduction salt are drawn from the seed; the oracle is only consulted
/// during this offline phase.
pub fn hellman_build<F: FnMut(u64) -> u64>(
    mut f: F,
    domain: u64,
    codomain: u64,
    m: u64,
    t: u64,
    seed: u64,
) -> Result<HellmanTable> {
    if domain == 0 || m == 0 || t == 0 {
        return Err(Error::InvalidParameters("need domain, m, t >= 1".into()));
    }
    let mut stream = SeedStream::new(seed);
    let salt = stream.next() % domain;
    let mut table = HellmanTable {
        m,
        t,
        salt,
        domain,
        codomain,
        endpoints: BTreeMap::new(),
    };
    for _ in 0..m {
        let start = stream.next() % domain;
        let mut x = start;
        for _ in 0..t {
            x = table.reduce(f(x));
        }
        table.endpoints.entry(x).or_insert(start);
    }
    Ok(table)
}

/// Invert `y` through the table. False negatives are possible; any returned
/// preimage has been verified against the oracle, so false positives are
/// not.
pub fn hellman_invert<F: FnMut(u64) -> u64>(
    table: &HellmanTable,
    mut f: F,
    y: u64,
) -> HellmanLookup {
    let mut calls = 0u64;
    let call = |f: &mut F, x: u64, calls: &mut u64| -> u64 {
        *calls += 1;
        f(x)
    };
    let mut z = table.reduce(y);
    for j in 0..table.t {
        if let Some(&start) = table.endpoints.get(&z) {
            // Candidate preimage sits t-1-j reduction steps from the start.
            let mut w = start;
            for _ in 0..(table.t - 1 - j) {
                w = table.reduce(call(&mut f, w, &mut calls));
            }
            if call(&mut f, w, &mut calls) == y {
                return HellmanLookup { preimage: Some(w), oracle_calls: calls };
            }
        }
        if j + 1 < table.t {
            z = table.reduce(call(&mut f, z, &mut calls));
        }
    }
    HellmanLookup { preimage: None, oracle_calls: calls }
}
