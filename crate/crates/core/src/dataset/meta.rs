use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{AttributeType, ObjectType, RelationType, Structure, Triple};

pub const META_BITS: usize = 12;

/// Bit labels, leftmost first.
pub const META_LABELS: [&str; META_BITS] = [
    "shape",
    "line",
    "color",
    "number",
    "position",
    "size",
    "type",
    "progression",
    "XOR",
    "OR",
    "AND",
    "consistent_union",
];

/// 12-bit label naming the objects, attributes and relations a structure
/// uses. Element `i` of the bit string is bit `i` of the inner value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct MetaTarget(u16);

fn object_bit(o: ObjectType) -> usize {
    match o {
        ObjectType::Shape => 0,
        ObjectType::Line => 1,
    }
}

fn attribute_bit(a: AttributeType) -> usize {
    match a {
        AttributeType::Colour => 2,
        AttributeType::Number => 3,
        AttributeType::Position => 4,
        AttributeType::Size => 5,
        AttributeType::Type => 6,
    }
}

fn relation_bit(r: RelationType) -> usize {
    match r {
        RelationType::Progression => 7,
        RelationType::Xor => 8,
        RelationType::Or => 9,
        RelationType::And => 10,
        RelationType::ConsistentUnion => 11,
    }
}

impl MetaTarget {
    pub fn from_bits(bits: u16) -> Self {
        MetaTarget(bits & ((1 << META_BITS) - 1))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn bit(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn count_ones(self) -> u32 {
        self.0.count_ones()
    }

    pub fn for_triple(t: &Triple) -> Self {
        MetaTarget(
            (1 << object_bit(t.object)) | (1 << attribute_bit(t.attribute)) | (1 << relation_bit(t.relation)),
        )
    }

    pub fn from_triples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> Self {
        triples
            .into_iter()
            .fold(MetaTarget::default(), |acc, t| acc | MetaTarget::for_triple(t))
    }

    pub fn with_flipped(self, i: usize) -> Self {
        MetaTarget(self.0 ^ (1 << i))
    }
}

pub fn encode_meta(s: &Structure) -> MetaTarget {
    MetaTarget::from_triples(s.triples())
}

impl std::ops::BitOr for MetaTarget {
    type Output = MetaTarget;

    fn bitor(self, rhs: Self) -> Self {
        MetaTarget(self.0 | rhs.0)
    }
}

impl fmt::Display for MetaTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..META_BITS {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for MetaTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetaTarget({self})")
    }
}

impl FromStr for MetaTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim_matches(|c| c == '[' || c == ']');
        if s.len() != META_BITS {
            return Err(format!("expected {META_BITS} bits, got '{s}'"));
        }
        let mut bits = 0u16;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => return Err(format!("invalid bit '{c}'")),
            }
        }
        Ok(MetaTarget(bits))
    }
}

impl From<MetaTarget> for String {
    fn from(m: MetaTarget) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for MetaTarget {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::enumerate_viable_triples;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        let a: MetaTarget = "101000010000".parse().unwrap();
        let b: MetaTarget = "[100100010000]".parse().unwrap();
        assert_eq!((a | b).to_string(), "101100010000");
        // The two operands are [progression, shape, colour] and
        // [progression, shape, number].
        let pc = Triple::new(RelationType::Progression, ObjectType::Shape, AttributeType::Colour)
            .unwrap();
        let pn = Triple::new(RelationType::Progression, ObjectType::Shape, AttributeType::Number)
            .unwrap();
        assert_eq!(MetaTarget::for_triple(&pc), a);
        assert_eq!(MetaTarget::for_triple(&pn), b);
        assert_eq!(encode_meta(&Structure::new([pc, pn]).unwrap()).to_string(), "101100010000");
    }

    #[test]
    fn single_triples_have_three_bits() {
        for t in enumerate_viable_triples() {
            assert_eq!(MetaTarget::for_triple(&t).count_ones(), 3);
        }
        let t = Triple::new(RelationType::Xor, ObjectType::Line, AttributeType::Colour).unwrap();
        assert_eq!(MetaTarget::for_triple(&t).to_string(), "011000001000");
    }

    proptest! {
        #[test]
        fn order_and_duplicates_do_not_matter(
            picks in proptest::collection::vec(0usize..29, 1..6),
            rot in 0usize..6,
        ) {
            let all = enumerate_viable_triples();
            let ts: Vec<Triple> = picks.iter().map(|i| all[*i]).collect();
            let mut rotated = ts.clone();
            rotated.rotate_left(rot % ts.len());
            let mut doubled = ts.clone();
            doubled.extend(ts.iter().copied());
            let m = MetaTarget::from_triples(&ts);
            prop_assert_eq!(m, MetaTarget::from_triples(&rotated));
            prop_assert_eq!(m, MetaTarget::from_triples(&doubled));
        }
    }
}
