//! Mixed-radix digit codec shared by the reduction encoders.
//!
//! Digits are stored least-significant first; the positional weight of digit
//! `i` is the product of all bases below it. Encoders that think in
//! most-significant-first block layouts must reverse before calling in.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use num_bigint::BigUint;
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodecMode {
    /// Plain positional arithmetic; digit sums may carry.
    CyclicCarry,
    /// Digits live in power-of-two bases and combine by XOR.
    XorDigitwise,
}

/// Which group flavor an encoder should target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeMode {
    Cyclic,
    Xor,
}

impl EncodeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EncodeMode::Cyclic => "cyclic",
            EncodeMode::Xor => "xor",
        }
    }

    pub fn codec_mode(&self) -> CodecMode {
        match self {
            EncodeMode::Cyclic => CodecMode::CyclicCarry,
            EncodeMode::Xor => CodecMode::XorDigitwise,
        }
    }
}

/// Outcome of a digit-wise addition attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitwiseSum {
    Sum(GroupElement),
    /// The lowest position whose digits would interact.
    CarryDetected { position: usize },
}

#[derive(Debug, Clone)]
pub struct MixedRadixCodec {
    bases: Vec<u64>,
    mode: CodecMode,
    weights: Vec<BigUint>,
    order: BigUint,
}

impl MixedRadixCodec {
    /// `bases` are per-digit bases, least-significant first, each >= 2.
    /// XorDigitwise mode additionally requires every base to be a power of
    /// two.
    pub fn new(bases: Vec<u64>, mode: CodecMode) -> Result<Self> {
        let mut weights = Vec::with_capacity(bases.len());
        let mut order = BigUint::one();
        for (i, &b) in bases.iter().enumerate() {
            if b < 2 {
                return Err(Error::InvalidParameters(format!(
                    "base {} at position {} must be >= 2",
                    b, i
                )));
            }
            if mode == CodecMode::XorDigitwise && !b.is_power_of_two() {
                return Err(Error::InvalidParameters(format!(
                    "XOR digit base {} at position {} is not a power of two",
                    b, i
                )));
            }
            weights.push(order.clone());
            order *= b;
        }
        Ok(MixedRadixCodec { bases, mode, weights, order })
    }

    pub fn mode(&self) -> CodecMode {
        self.mode
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    pub fn num_digits(&self) -> usize {
        self.bases.len()
    }

    /// Product of all bases.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Errors unless the codec covers the group exactly.
    pub fn matches_group(&self, group: &GroupSpec) -> Result<()> {
        let g = group.order();
        if g == self.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch { codec_order: self.order.clone(), group_order: g })
        }
    }

    pub fn encode(&self, digits: &[u64]) -> Result<GroupElement> {
        if digits.len() != self.bases.len() {
            return Err(Error::LengthMismatch { expected: self.bases.len(), got: digits.len() });
        }
        let mut id = BigUint::zero();
        for (i, (&d, &b)) in digits.iter().zip(&self.bases).enumerate() {
            if d >= b {
                return Err(Error::DigitOutOfRange { position: i, digit: d, base: b });
            }
            if d != 0 {
                id += &self.weights[i] * d;
            }
        }
        Ok(GroupElement::new(id))
    }

    pub fn decode(&self, e: &GroupElement) -> Result<Vec<u64>> {
        if e.id() >= &self.order {
            return Err(Error::InvalidElement { id: e.id().clone(), order: self.order.clone() });
        }
        let mut rest = e.id().clone();
        let mut digits = Vec::with_capacity(self.bases.len());
        for &b in &self.bases {
            let big_b = BigUint::from(b);
            let d = &rest % &big_b;
            rest /= big_b;
            digits.push(u64::try_from(&d).expect("digit below u64 base"));
        }
        Ok(digits)
    }

    /// Digit-wise sum when no position interacts: in CyclicCarry mode every
    /// digit sum must stay below its base, in XorDigitwise mode at most one
    /// operand may be non-zero per position. Otherwise reports the offending
    /// position; that is a signal, not a failure.
    pub fn digitwise_add_carry_free(
        &self,
        a: &GroupElement,
        b: &GroupElement,
    ) -> Result<DigitwiseSum> {
        let da = self.decode(a)?;
        let db = self.decode(b)?;
        let mut out = Vec::with_capacity(da.len());
        for (i, ((&x, &y), &base)) in da.iter().zip(&db).zip(&self.bases).enumerate() {
            match self.mode {
                CodecMode::CyclicCarry => {
                    if x + y >= base {
                        return Ok(DigitwiseSum::CarryDetected { position: i });
                    }
                    out.push(x + y);
                }
                CodecMode::XorDigitwise => {
                    if x != 0 && y != 0 {
                        return Ok(DigitwiseSum::CarryDetected { position: i });
                    }
                    out.push(x ^ y);
                }
            }
        }
        Ok(DigitwiseSum::Sum(self.encode(&out)?))
    }

    /// Per-digit negation: the modular complement in CyclicCarry mode, the
    /// bitwise complement within the digit width in XorDigitwise mode. Note
    /// the two disagree at zero (`base - 0` wraps to 0, `!0` is all ones).
    pub fn negate_digit(&self, position: usize, digit: u64) -> Result<u64> {
        let base = *self.bases.get(position).ok_or(Error::LengthMismatch {
            expected: self.bases.len(),
            got: position + 1,
        })?;
        if digit >= base {
            return Err(Error::DigitOutOfRange { position, digit, base });
        }
        Ok(match self.mode {
            CodecMode::CyclicCarry => (base - digit) % base,
            CodecMode::XorDigitwise => (base - 1) ^ digit,
        })
    }
}
