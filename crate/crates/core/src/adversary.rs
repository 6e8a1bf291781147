//! Constructive input distributions: for a query set `Q`, build inputs
//! whose sumset meets exactly a chosen subset `P` of `Q`, making the `|Q|`
//! membership indicators exact independent fair coins when `P` is drawn
//! uniformly.
//!
//! The greedy construction walks the uncovered elements of `P` in canonical
//! order and, for each, adds the pair `(p - t, t)` with the smallest `t`
//! whose insertion creates no sum inside `Q \ P`; at most `2n^2` candidate
//! values are ever blocked, and padding blocks at most `2n` more, so any
//! group with more than `2n^2 + 2n` elements suffices.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::tsum::TsumInstance;
use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use std::collections::BTreeSet;

/// Inputs realizing exactly the subset `P` of `Q` inside their sumset.
#[derive(Debug, Clone)]
pub struct SubsetRealization {
    pub queries: Vec<GroupElement>,
    pub subset: BTreeSet<GroupElement>,
    pub a1: Vec<GroupElement>,
    pub a2: Vec<GroupElement>,
}

impl SubsetRealization {
    pub fn into_instance(self, group: GroupSpec) -> Result<TsumInstance> {
        TsumInstance::new(group, self.a1, self.a2)
    }

    /// Re-derive the full sumset and confirm the realization invariants.
    pub fn check(&self, group: &GroupSpec) -> Result<()> {
        let mut sumset = BTreeSet::new();
        for a in &self.a1 {
            for b in &self.a2 {
                sumset.insert(group.add(a, b)?);
            }
        }
        for p in &self.subset {
            if !sumset.contains(p) {
                return Err(Error::InvalidParameters(format!(
                    "realization misses required sum {}",
                    p.id()
                )));
            }
        }
        for q in &self.queries {
            if !self.subset.contains(q) && sumset.contains(q) {
                return Err(Error::InvalidParameters(format!(
                    "realization leaks excluded sum {}",
                    q.id()
                )));
            }
        }
        Ok(())
    }
}

fn required_order(n: usize) -> BigUint {
    let n = BigUint::from(n);
    &n * &n * 2u32 + &n * 2u32 + 1u32
}

struct Builder<'a> {
    group: &'a GroupSpec,
    blocked: BTreeSet<GroupElement>,
    a1: BTreeSet<GroupElement>,
    a2: BTreeSet<GroupElement>,
}

impl<'a> Builder<'a> {
    /// Would inserting the pair create any blocked sum? Covers cross terms
    /// against both existing sets and the new pair's own sum.
    fn pair_is_safe(&self, x: &GroupElement, y: &GroupElement) -> Result<bool> {
        if self.a1.contains(x) || self.a2.contains(y) {
            return Ok(false);
        }
        for b in self.a2.iter().chain(std::iter::once(y)) {
            if self.blocked.contains(&self.group.add(x, b)?) {
                return Ok(false);
            }
        }
        for a in &self.a1 {
            if self.blocked.contains(&self.group.add(a, y)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn insert(&mut self, x: GroupElement, y: GroupElement) {
        self.a1.insert(x);
        self.a2.insert(y);
    }

    fn sumset_contains(&self, p: &GroupElement) -> Result<bool> {
        for a in &self.a1 {
            if self.a2.contains(&self.group.sub(p, a)?) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Build `(A1, A2)` of size exactly `n` whose sumset contains every element
/// of `P` and no element of `Q \ P`.
pub fn realize_subset(
    group: &GroupSpec,
    queries: &[GroupElement],
    subset: &BTreeSet<GroupElement>,
    n: usize,
) -> Result<SubsetRealization> {
    let order = group.order();
    if order < required_order(n) {
        return Err(Error::GroupTooSmall { order, required: required_order(n) });
    }
    let distinct: BTreeSet<&GroupElement> = queries.iter().collect();
    if distinct.len() != queries.len() {
        return Err(Error::InvalidParameters("query set contains duplicates".into()));
    }
    if queries.len() > n {
        return Err(Error::InvalidParameters(format!(
            "|Q| = {} exceeds n = {}",
            queries.len(),
            n
        )));
    }
    for q in queries {
        if !group.contains(q) {
            return Err(Error::InvalidElement { id: q.id().clone(), order: group.order() });
        }
    }
    for p in subset {
        if !distinct.contains(p) {
            return Err(Error::InvalidParameters(format!(
                "subset element {} is not a query",
                p.id()
            )));
        }
    }

    let blocked: BTreeSet<GroupElement> =
        queries.iter().filter(|q| !subset.contains(q)).cloned().collect();
    let mut builder = Builder { group, blocked, a1: BTreeSet::new(), a2: BTreeSet::new() };

    for p in subset {
        if builder.sumset_contains(p)? {
            continue;
        }
        let mut found = false;
        let mut t_id = BigUint::zero();
        while t_id < group.order() {
            let t = GroupElement::new(t_id.clone());
            let x = group.sub(p, &t)?;
            if builder.pair_is_safe(&x, &t)? {
                builder.insert(x, t);
                found = true;
                break;
            }
            t_id += 1u32;
        }
        if !found {
            return Err(Error::GroupTooSmall { order: group.order(), required: required_order(n) });
        }
    }

    // Pad with the smallest safe pairs until both sides have n elements.
    while builder.a1.len() < n {
        let mut placed = false;
        let mut x_id = BigUint::zero();
        'outer: while x_id < group.order() {
            let x = GroupElement::new(x_id.clone());
            if !builder.a1.contains(&x) {
                let mut y_id = BigUint::zero();
                while y_id < group.order() {
                    let y = GroupElement::new(y_id.clone());
                    if builder.pair_is_safe(&x, &y)? {
                        builder.insert(x, y);
                        placed = true;
                        break 'outer;
                    }
                    y_id += 1u32;
                }
            }
            x_id += 1u32;
        }
        if !placed {
            return Err(Error::GroupTooSmall { order: group.order(), required: required_order(n) });
        }
    }

    Ok(SubsetRealization {
        queries: queries.to_vec(),
        subset: subset.clone(),
        a1: builder.a1.into_iter().collect(),
        a2: builder.a2.into_iter().collect(),
    })
}

/// Draw `P` uniformly from the subsets of `Q` and realize it.
pub fn sample_adversarial_instance(
    group: &GroupSpec,
    queries: &[GroupElement],
    n: usize,
    seed: u64,
) -> Result<TsumInstance> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let subset: BTreeSet<GroupElement> =
        queries.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    realize_subset(group, queries, &subset, n)?.into_instance(group.clone())
}

/// Exact Shannon entropy of the query-answer bits over a realization
/// family.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub query_count: usize,
    pub realization_count: u64,
    pub distinct_patterns: u64,
    pub entropy_bits: f64,
    pub expected_bits: f64,
    /// Set when the family fails to witness the full uniform law.
    pub flagged: bool,
}

/// Audit a family that claims to cover every subset of `Q`: membership
/// patterns are recomputed from scratch and their empirical entropy must be
/// exactly `|Q|` bits.
pub fn entropy_audit(
    queries: &[GroupElement],
    realizations: &[TsumInstance],
) -> Result<EntropyReport> {
    let k = queries.len();
    if k >= 64 {
        return Err(Error::InvalidParameters("query sets beyond 63 bits are not auditable".into()));
    }
    let expected = 1u64 << k;
    if realizations.len() as u64 != expected {
        return Err(Error::IncompleteCover { expected, got: realizations.len() as u64 });
    }
    let mut counts = vec![0u64; expected as usize];
    for inst in realizations {
        let sumset = inst.sumset()?;
        let mut pattern = 0u64;
        for (bit, q) in queries.iter().enumerate() {
            if sumset.contains(q) {
                pattern |= 1 << bit;
            }
        }
        counts[pattern as usize] += 1;
    }
    let total = expected as f64;
    let mut entropy = 0.0;
    let mut distinct = 0u64;
    for &c in &counts {
        if c > 0 {
            distinct += 1;
            let p = c as f64 / total;
            entropy -= p * p.log2();
        }
    }
    Ok(EntropyReport {
        query_count: k,
        realization_count: expected,
        distinct_patterns: distinct,
        entropy_bits: entropy,
        expected_bits: k as f64,
        flagged: distinct != expected,
    })
}
