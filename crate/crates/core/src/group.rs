//! Finite abelian groups with elements as canonical integer ids.
//!
//! Three kinds are supported: integers modulo `m`, bit vectors of width `k`
//! under XOR, and direct products. Element ids are arbitrary precision since
//! the reduction universes outgrow 64 bits for modest parameters. For the
//! XOR kind the id's binary representation is the bit vector itself; for a
//! product, `id = left_id * order(right) + right_id`.

use crate::error::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Serialize big integers as decimal strings so instance files stay
/// readable and safe for 64-bit consumers.
pub mod serde_biguint {
    use num_bigint::BigUint;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse::<BigUint>()
            .map_err(|e| de::Error::custom(format!("bad decimal integer {:?}: {}", raw, e)))
    }
}

/// A group element, stored as its canonical id. Validity is checked against
/// a [`GroupSpec`] at each operation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    #[serde(with = "serde_biguint")]
    id: BigUint,
}

impl GroupElement {
    pub fn new(id: BigUint) -> Self {
        GroupElement { id }
    }

    pub fn from_u64(id: u64) -> Self {
        GroupElement { id: BigUint::from(id) }
    }

    pub fn id(&self) -> &BigUint {
        &self.id
    }

    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.id).ok()
    }
}

/// Description of a finite abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic {
        #[serde(with = "serde_biguint")]
        modulus: BigUint,
    },
    Xor {
        width: u32,
    },
    Product {
        left: Box<GroupSpec>,
        right: Box<GroupSpec>,
    },
}

impl GroupSpec {
    pub fn cyclic(m: u64) -> Self {
        GroupSpec::Cyclic { modulus: BigUint::from(m) }
    }

    pub fn cyclic_big(m: BigUint) -> Self {
        GroupSpec::Cyclic { modulus: m }
    }

    pub fn xor(width: u32) -> Self {
        GroupSpec::Xor { width }
    }

    pub fn product(left: GroupSpec, right: GroupSpec) -> Self {
        GroupSpec::Product { left: Box::new(left), right: Box::new(right) }
    }

    /// Number of elements in the group.
    pub fn order(&self) -> BigUint {
        match self {
            GroupSpec::Cyclic { modulus } => modulus.clone(),
            GroupSpec::Xor { width } => BigUint::one() << *width,
            GroupSpec::Product { left, right } => left.order() * right.order(),
        }
    }

    /// Group order as u64 when it fits; sweeps over all elements use this.
    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(self.order()).ok()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Cyclic { modulus } => {
                if modulus.is_zero() {
                    return Err(Error::InvalidParameters("cyclic modulus must be >= 1".into()));
                }
            }
            GroupSpec::Xor { .. } => {}
            GroupSpec::Product { left, right } => {
                left.validate()?;
                right.validate()?;
            }
        }
        Ok(())
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        e.id < self.order()
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::InvalidElement { id: e.id.clone(), order: self.order() })
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(BigUint::zero())
    }

    /// Group law.
    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    fn add_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match self {
            GroupSpec::Cyclic { modulus } => GroupElement::new((&a.id + &b.id) % modulus),
            GroupSpec::Xor { .. } => GroupElement::new(&a.id ^ &b.id),
            GroupSpec::Product { left, right } => {
                let r_ord = right.order();
                let (al, ar) = (&a.id / &r_ord, &a.id % &r_ord);
                let (bl, br) = (&b.id / &r_ord, &b.id % &r_ord);
                let l = left.add_unchecked(&GroupElement::new(al), &GroupElement::new(bl));
                let r = right.add_unchecked(&GroupElement::new(ar), &GroupElement::new(br));
                GroupElement::new(l.id * r_ord + r.id)
            }
        }
    }

    /// Inverse element: `add(a, negate(a))` is the identity.
    pub fn negate(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(self.negate_unchecked(a))
    }

    fn negate_unchecked(&self, a: &GroupElement) -> GroupElement {
        match self {
            GroupSpec::Cyclic { modulus } => {
                if a.id.is_zero() {
                    GroupElement::new(BigUint::zero())
                } else {
                    GroupElement::new(modulus - &a.id)
                }
            }
            // Every element is its own inverse under XOR.
            GroupSpec::Xor { .. } => a.clone(),
            GroupSpec::Product { left, right } => {
                let r_ord = right.order();
                let l = left.negate_unchecked(&GroupElement::new(&a.id / &r_ord));
                let r = right.negate_unchecked(&GroupElement::new(&a.id % &r_ord));
                GroupElement::new(l.id * r_ord + r.id)
            }
        }
    }

    /// `a - b`.
    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let nb = self.negate(b)?;
        self.add(a, &nb)
    }

    /// Pack a (left, right) pair into a product element id.
    pub fn pair(&self, l: &GroupElement, r: &GroupElement) -> Result<GroupElement> {
        match self {
            GroupSpec::Product { left, right } => {
                left.check(l)?;
                right.check(r)?;
                Ok(GroupElement::new(&l.id * right.order() + &r.id))
            }
            _ => Err(Error::InvalidParameters("pair() requires a product group".into())),
        }
    }

    /// Split a product element id into its components.
    pub fn unpair(&self, e: &GroupElement) -> Result<(GroupElement, GroupElement)> {
        match self {
            GroupSpec::Product { right, .. } => {
                self.check(e)?;
                let r_ord = right.order();
                Ok((GroupElement::new(&e.id / &r_ord), GroupElement::new(&e.id % &r_ord)))
            }
            _ => Err(Error::InvalidParameters("unpair() requires a product group".into())),
        }
    }

    /// Iterate all elements in canonical id order. Intended for desk-scale
    /// sweeps; callers should check `order_u64()` first.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        let order = self.order();
        let mut next = BigUint::zero();
        std::iter::from_fn(move || {
            if next < order {
                let e = GroupElement::new(next.clone());
                next += 1u32;
                Some(e)
            } else {
                None
            }
        })
    }

    /// A uniformly random element from a seeded generator.
    pub fn random_element<R: rand::Rng>(&self, rng: &mut R) -> GroupElement {
        GroupElement::new(rng.gen_biguint_below(&self.order()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(v: u64) -> GroupElement {
        GroupElement::from_u64(v)
    }

    #[test]
    fn cyclic_add_wraps() {
        let g = GroupSpec::cyclic(5);
        assert_eq!(g.add(&ge(3), &ge(4)).unwrap(), ge(2));
    }

    #[test]
    fn xor_add_is_bitwise() {
        let g = GroupSpec::xor(3);
        assert_eq!(g.add(&ge(0b101), &ge(0b011)).unwrap(), ge(0b110));
    }

    #[test]
    fn product_add_componentwise() {
        // (0,1) + (1,2) over Z2 x Z5, encoded 1 and 7, is (1,3) encoded 8.
        let g = GroupSpec::product(GroupSpec::cyclic(2), GroupSpec::cyclic(5));
        assert_eq!(g.add(&ge(1), &ge(7)).unwrap(), ge(8));
        // Oracle: componentwise addition over all pairs.
        let n = g.order_u64().unwrap();
        for a in 0..n {
            for b in 0..n {
                let (al, ar) = (a / 5, a % 5);
                let (bl, br) = (b / 5, b % 5);
                let expect = ((al + bl) % 2) * 5 + (ar + br) % 5;
                assert_eq!(g.add(&ge(a), &ge(b)).unwrap(), ge(expect));
            }
        }
    }

    #[test]
    fn negate_examples() {
        assert_eq!(GroupSpec::cyclic(7).negate(&ge(3)).unwrap(), ge(4));
        let x = GroupSpec::xor(4);
        for v in 0..16 {
            assert_eq!(x.negate(&ge(v)).unwrap(), ge(v));
        }
        assert_eq!(GroupSpec::cyclic(1).negate(&ge(0)).unwrap(), ge(0));
    }

    #[test]
    fn invalid_element_rejected() {
        let g = GroupSpec::cyclic(5);
        assert!(matches!(g.add(&ge(5), &ge(0)), Err(Error::InvalidElement { .. })));
        assert!(matches!(g.negate(&ge(9)), Err(Error::InvalidElement { .. })));
    }

    fn sample_specs() -> Vec<GroupSpec> {
        vec![
            GroupSpec::cyclic(1),
            GroupSpec::cyclic(2),
            GroupSpec::cyclic(12),
            GroupSpec::cyclic(37),
            GroupSpec::xor(0),
            GroupSpec::xor(1),
            GroupSpec::xor(5),
            GroupSpec::product(GroupSpec::cyclic(2), GroupSpec::cyclic(5)),
            GroupSpec::product(GroupSpec::xor(2), GroupSpec::cyclic(3)),
            GroupSpec::product(
                GroupSpec::cyclic(3),
                GroupSpec::product(GroupSpec::xor(1), GroupSpec::cyclic(4)),
            ),
        ]
    }

    #[test]
    fn group_axioms_exhaustive() {
        for g in sample_specs() {
            let n = g.order_u64().unwrap();
            let id = g.identity();
            for a in 0..n {
                let ea = ge(a);
                assert_eq!(g.add(&ea, &id).unwrap(), ea, "identity in {:?}", g);
                let inv = g.negate(&ea).unwrap();
                assert_eq!(g.add(&ea, &inv).unwrap(), id, "inverse in {:?}", g);
                for b in 0..n {
                    let eb = ge(b);
                    let ab = g.add(&ea, &eb).unwrap();
                    assert!(g.contains(&ab), "closure in {:?}", g);
                    assert_eq!(ab, g.add(&eb, &ea).unwrap(), "commutativity in {:?}", g);
                }
            }
            // Associativity over all triples for the small specs, a fixed
            // stride sample for the rest.
            let step = if n <= 16 { 1 } else { (n / 8).max(1) };
            for a in (0..n).step_by(step as usize) {
                for b in (0..n).step_by(step as usize) {
                    for c in (0..n).step_by(step as usize) {
                        let l = g.add(&g.add(&ge(a), &ge(b)).unwrap(), &ge(c)).unwrap();
                        let r = g.add(&ge(a), &g.add(&ge(b), &ge(c)).unwrap()).unwrap();
                        assert_eq!(l, r, "associativity in {:?}", g);
                    }
                }
            }
        }
    }

    #[test]
    fn elements_iterates_in_order() {
        let g = GroupSpec::product(GroupSpec::cyclic(2), GroupSpec::cyclic(3));
        let got: Vec<_> = g.elements().collect();
        assert_eq!(got.len(), 6);
        for (i, e) in got.iter().enumerate() {
            assert_eq!(*e, ge(i as u64));
        }
    }

    #[test]
    fn spec_serde_round_trip() {
        let g = GroupSpec::product(GroupSpec::cyclic(101), GroupSpec::xor(4));
        let js = serde_json::to_string(&g).unwrap();
        assert!(js.contains("\"kind\":\"product\""));
        assert!(js.contains("\"modulus\":\"101\""));
        let back: GroupSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, g);
    }
}
