//! Reachability oracles in butterfly graphs, compiled into 3SUM-Indexing
//! instances and queries over cyclic or XOR groups.
//!
//! Nodes of a degree-`B`, depth-`d` butterfly carry `d`-digit base-`B`
//! labels; an edge at layer `k` joins labels that differ only in digit `k`,
//! so each (source, sink) pair has a unique path. Every template edge
//! becomes one element of `A1` carrying a presence digit, `A2` enumerates
//! wildcard completions per layer, and a query element per (s, t) sums with
//! exactly the elements describing its path edges. A sum hits the query
//! value precisely when some path edge is missing.

use crate::codec::{CodecMode, EncodeMode, MixedRadixCodec};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::tsum::{brute_force_query, TsumInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

/// Edge of the butterfly template: from `node` on layer `layer` to the node
/// whose digit `layer` is replaced by `digit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeIndex {
    pub layer: u32,
    pub node: u64,
    pub digit: u64,
}

/// A subset of the edges of a degree-`b`, depth-`d` butterfly template.
#[derive(Debug, Clone)]
pub struct ButterflyInstance {
    b: u64,
    d: u32,
    present: Vec<bool>,
}

fn checked_pow(b: u64, e: u32) -> Result<u64> {
    b.checked_pow(e)
        .ok_or_else(|| Error::ParameterOverflow(format!("{}^{} exceeds u64", b, e)))
}

impl ButterflyInstance {
    pub fn full(b: u64, d: u32) -> Result<Self> {
        Self::with_edges(b, d, |_| true)
    }

    pub fn empty(b: u64, d: u32) -> Result<Self> {
        Self::with_edges(b, d, |_| false)
    }

    /// Each template edge kept independently with probability 1/2.
    pub fn random(b: u64, d: u32, seed: u64) -> Result<Self> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut inst = Self::empty(b, d)?;
        for flag in inst.present.iter_mut() {
            *flag = rng.gen_bool(0.5);
        }
        Ok(inst)
    }

    pub fn with_edges(b: u64, d: u32, f: impl Fn(usize) -> bool) -> Result<Self> {
        if b < 2 || d < 1 {
            return Err(Error::InvalidParameters(format!(
                "butterfly needs degree >= 2 and depth >= 1, got B={} d={}",
                b, d
            )));
        }
        let count = edge_count(b, d)?;
        let count = usize::try_from(count)
            .map_err(|_| Error::ParameterOverflow("edge count exceeds usize".into()))?;
        Ok(ButterflyInstance { b, d, present: (0..count).map(f).collect() })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn nodes_per_layer(&self) -> u64 {
        checked_pow(self.b, self.d).expect("validated at construction")
    }

    pub fn num_edges(&self) -> usize {
        self.present.len()
    }

    pub fn edge_flat(&self, e: EdgeIndex) -> usize {
        let per_layer = self.nodes_per_layer();
        ((e.layer as u64 * per_layer + e.node) * self.b + e.digit) as usize
    }

    pub fn contains(&self, e: EdgeIndex) -> bool {
        self.present[self.edge_flat(e)]
    }

    pub fn set(&mut self, e: EdgeIndex, present: bool) {
        let idx = self.edge_flat(e);
        self.present[idx] = present;
    }

    /// Template edges in (layer, node, digit) lexicographic order.
    pub fn template_edges(&self) -> impl Iterator<Item = EdgeIndex> + '_ {
        let per_layer = self.nodes_per_layer();
        let b = self.b;
        (0..self.d as u64).flat_map(move |layer| {
            (0..per_layer).flat_map(move |node| {
                (0..b).map(move |digit| EdgeIndex { layer: layer as u32, node, digit })
            })
        })
    }

    /// Label of the edge's head on the next layer.
    pub fn target_node(&self, e: EdgeIndex) -> u64 {
        set_digit(e.node, e.layer, e.digit, self.b)
    }
}

/// Total template edges `d * B^(d+1)`.
pub fn edge_count(b: u64, d: u32) -> Result<u64> {
    (d as u64)
        .checked_mul(checked_pow(b, d + 1)?)
        .ok_or_else(|| Error::ParameterOverflow("edge count exceeds u64".into()))
}

fn digit_of(label: u64, pos: u32, b: u64) -> u64 {
    (label / b.pow(pos)) % b
}

fn set_digit(label: u64, pos: u32, value: u64, b: u64) -> u64 {
    let w = b.pow(pos);
    label - digit_of(label, pos, b) * w + value * w
}

/// The unique source-to-sink path: edge `k` leaves the node agreeing with
/// `s` on digits >= k and with `t` below, and sets digit `k` to `t`'s.
pub fn canonical_path(b: u64, d: u32, s: u64, t: u64) -> Result<Vec<EdgeIndex>> {
    let limit = checked_pow(b, d)?;
    for label in [s, t] {
        if label >= limit {
            return Err(Error::LabelOutOfRange { label, limit });
        }
    }
    let mut path = Vec::with_capacity(d as usize);
    for k in 0..d {
        let w = b.pow(k);
        let node = (s / w) * w + t % w;
        path.push(EdgeIndex { layer: k, node, digit: digit_of(t, k, b) });
    }
    Ok(path)
}

/// True iff every edge of the canonical path is present.
pub fn reachable(instance: &ButterflyInstance, s: u64, t: u64) -> Result<bool> {
    Ok(canonical_path(instance.b, instance.d, s, t)?
        .into_iter()
        .all(|e| instance.contains(e)))
}

/// Digit layout shared by the instance and query encoders. Most significant
/// first, the `2(d+2)` digits are: one layer digit in base `4d`, one
/// presence digit (base 3 cyclic, base 2 XOR), then `2d + 2` base-`B`
/// digits split into the two label blocks and a two-digit tail that only
/// equalizes the set sizes.
#[derive(Debug, Clone)]
pub struct ButterflyLayout {
    b: u64,
    d: u32,
    mode: EncodeMode,
    codec: MixedRadixCodec,
    group: GroupSpec,
}

impl ButterflyLayout {
    pub fn new(b: u64, d: u32, mode: EncodeMode) -> Result<Self> {
        if b < 2 || d < 1 {
            return Err(Error::InvalidParameters(format!(
                "butterfly needs degree >= 2 and depth >= 1, got B={} d={}",
                b, d
            )));
        }
        let ms_base = 4 * d as u64;
        let (codec_mode, presence_base) = match mode {
            EncodeMode::Cyclic => (CodecMode::CyclicCarry, 3),
            EncodeMode::Xor => {
                if !b.is_power_of_two() || !d.is_power_of_two() {
                    return Err(Error::UnsupportedMode(format!(
                        "XOR encoding needs B and d to be powers of two, got B={} d={}",
                        b, d
                    )));
                }
                (CodecMode::XorDigitwise, 2)
            }
        };
        // Least significant first: the two tail digits, the j block, the i
        // block, presence, layer.
        let mut bases = vec![b; 2 * d as usize + 2];
        bases.push(presence_base);
        bases.push(ms_base);
        let codec = MixedRadixCodec::new(bases, codec_mode)?;
        let group = match mode {
            EncodeMode::Cyclic => GroupSpec::cyclic_big(codec.order().clone()),
            EncodeMode::Xor => {
                let width = codec.order().bits() - 1;
                GroupSpec::xor(width as u32)
            }
        };
        codec.matches_group(&group)?;
        Ok(ButterflyLayout { b, d, mode, codec, group })
    }

    pub fn mode(&self) -> EncodeMode {
        self.mode
    }

    pub fn codec(&self) -> &MixedRadixCodec {
        &self.codec
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn num_digits(&self) -> usize {
        self.codec.num_digits()
    }

    fn ms_pos(&self) -> usize {
        self.num_digits() - 1
    }

    /// Encode a most-significant-first digit string.
    fn encode_msb(&self, digits: &[u64]) -> Result<GroupElement> {
        let lsb: Vec<u64> = digits.iter().rev().copied().collect();
        self.codec.encode(&lsb)
    }

    /// Element of `A1` describing one template edge and its presence bit.
    pub fn encode_edge(&self, e: EdgeIndex, present: bool) -> Result<GroupElement> {
        let (b, d, k) = (self.b, self.d, e.layer);
        let mut digits = Vec::with_capacity(self.num_digits());
        digits.push(k as u64);
        digits.push(if present { 1 } else { 0 });
        // i block: top d-k digits of the tail node, then k zeroes.
        for pos in (k..d).rev() {
            digits.push(digit_of(e.node, pos, b));
        }
        digits.extend(std::iter::repeat_n(0, k as usize));
        // j block: d-k-1 zeroes, then the k+1 low digits of the head node.
        let j = set_digit(e.node, k, e.digit, b);
        digits.extend(std::iter::repeat_n(0, (d - k - 1) as usize));
        for pos in (0..=k).rev() {
            digits.push(digit_of(j, pos, b));
        }
        digits.push(0);
        digits.push(0);
        self.encode_msb(&digits)
    }

    /// All of `A2`: for each layer `k`, every wildcard completion of the
    /// pattern (-k, 0, 0..0, *..*, 0..0, *, *).
    pub fn helper_elements(&self) -> Result<Vec<GroupElement>> {
        let (b, d) = (self.b, self.d as u64);
        let mut out = Vec::new();
        let wild_count = d - 1;
        let wild_total = checked_pow(b, wild_count as u32)?;
        for k in 0..d {
            let neg_k = self.codec.negate_digit(self.ms_pos(), k)?;
            for wild in 0..wild_total {
                for tail in 0..b * b {
                    let mut digits = Vec::with_capacity(self.num_digits());
                    digits.push(neg_k);
                    digits.push(0);
                    digits.extend(std::iter::repeat_n(0, (d - k) as usize));
                    for pos in (0..wild_count).rev() {
                        digits.push(digit_of(wild, pos as u32, b));
                    }
                    digits.extend(std::iter::repeat_n(0, (k + 1) as usize));
                    digits.push(tail / b);
                    digits.push(tail % b);
                    out.push(self.encode_msb(&digits)?);
                }
            }
        }
        Ok(out)
    }

    /// Query element `(−0, 0, s digits, t digits, 0, 0)`. The leading digit
    /// is the encoding of zero's negation, which is literal zero in cyclic
    /// mode and the all-ones complement in XOR mode.
    pub fn encode_query(&self, s: u64, t: u64) -> Result<GroupElement> {
        let (b, d) = (self.b, self.d);
        let limit = checked_pow(b, d)?;
        for label in [s, t] {
            if label >= limit {
                return Err(Error::LabelOutOfRange { label, limit });
            }
        }
        let mut digits = Vec::with_capacity(self.num_digits());
        digits.push(self.codec.negate_digit(self.ms_pos(), 0)?);
        digits.push(0);
        for pos in (0..d).rev() {
            digits.push(digit_of(s, pos, b));
        }
        for pos in (0..d).rev() {
            digits.push(digit_of(t, pos, b));
        }
        digits.push(0);
        digits.push(0);
        self.encode_msb(&digits)
    }
}

/// The compiled reduction: instance sets plus the layout that produced
/// them.
pub struct ButterflyEncoding {
    pub layout: ButterflyLayout,
    pub tsum: TsumInstance,
}

/// Compile a butterfly edge set into a 3SUM-Indexing instance. Both sides
/// have exactly `d * B^(d+1)` elements by construction.
pub fn encode_instance(instance: &ButterflyInstance, mode: EncodeMode) -> Result<ButterflyEncoding> {
    let layout = ButterflyLayout::new(instance.b, instance.d, mode)?;
    let mut a1 = Vec::with_capacity(instance.num_edges());
    for e in instance.template_edges() {
        a1.push(layout.encode_edge(e, instance.contains(e))?);
    }
    let a2 = layout.helper_elements()?;
    debug_assert_eq!(a1.len(), a2.len());
    let tsum = TsumInstance::new(layout.group().clone(), a1, a2)?;
    Ok(ButterflyEncoding { layout, tsum })
}

/// One disagreement between the compiled instance and the reachability
/// semantics.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceViolation {
    pub s: u64,
    pub t: u64,
    pub reachable: bool,
    pub witness_found: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub mode: String,
    pub pairs_checked: u64,
    pub violations: Vec<EquivalenceViolation>,
}

impl EquivalenceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check, for every (s, t) pair, that the compiled query has a witness
/// exactly when the pair is not reachable.
pub fn check_equivalence(instance: &ButterflyInstance, mode: EncodeMode) -> Result<EquivalenceReport> {
    let enc = encode_instance(instance, mode)?;
    let per_layer = instance.nodes_per_layer();
    let mut report = EquivalenceReport {
        mode: mode.as_str().to_string(),
        pairs_checked: 0,
        violations: Vec::new(),
    };
    for s in 0..per_layer {
        for t in 0..per_layer {
            let q = enc.layout.encode_query(s, t)?;
            let witness = brute_force_query(&enc.tsum, &q)?.witness.is_some();
            let reach = reachable(instance, s, t)?;
            report.pairs_checked += 1;
            if witness == reach {
                report.violations.push(EquivalenceViolation {
                    s,
                    t,
                    reachable: reach,
                    witness_found: witness,
                });
            }
        }
    }
    Ok(report)
}

/// Parameter wiring for the tradeoff analysis: the degree setting
/// `B = S * w^2 / n` and the resulting query-time bound, reported as a
/// formula rather than asserted.
#[derive(Debug, Clone, Serialize)]
pub struct ButterflyAnalysis {
    pub s_cells: u64,
    pub word_bits: u64,
    pub n: u64,
    pub degree_setting: u64,
    pub degree_is_omega_w2: bool,
    pub query_time_bound: String,
}

pub fn analysis(s_cells: u64, word_bits: u64, n: u64) -> Result<ButterflyAnalysis> {
    if n == 0 || word_bits == 0 {
        return Err(Error::InvalidParameters("need n, w >= 1".into()));
    }
    let degree = s_cells
        .checked_mul(word_bits)
        .and_then(|x| x.checked_mul(word_bits))
        .ok_or_else(|| Error::ParameterOverflow("S*w^2 exceeds u64".into()))?
        / n;
    Ok(ButterflyAnalysis {
        s_cells,
        word_bits,
        n,
        degree_setting: degree,
        degree_is_omega_w2: degree >= word_bits * word_bits,
        query_time_bound: "T = Omega(log n / log(S*w/n))".to_string(),
    })
}
