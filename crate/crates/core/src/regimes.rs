//! The eight train/test split disciplines, expressed as predicates over a
//! structure and the ordered values a puzzle uses.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    enumerate_viable_attribute_pairs, enumerate_viable_triple_pairs, viable_triples, Dimension,
    Structure, Triple, LEVELS,
};
use crate::valueset::ValueSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeId {
    Neutral,
    Interpolation,
    Extrapolation,
    HoldoutShapeColour,
    HoldoutLineType,
    HoldoutTriples,
    HoldoutTriplePairs,
    HoldoutAttributePairs,
}

impl RegimeId {
    pub const ALL: [RegimeId; 8] = [
        RegimeId::Neutral,
        RegimeId::Interpolation,
        RegimeId::Extrapolation,
        RegimeId::HoldoutShapeColour,
        RegimeId::HoldoutLineType,
        RegimeId::HoldoutTriples,
        RegimeId::HoldoutTriplePairs,
        RegimeId::HoldoutAttributePairs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegimeId::Neutral => "neutral",
            RegimeId::Interpolation => "interpolation",
            RegimeId::Extrapolation => "extrapolation",
            RegimeId::HoldoutShapeColour => "holdout_shape_colour",
            RegimeId::HoldoutLineType => "holdout_line_type",
            RegimeId::HoldoutTriples => "holdout_triples",
            RegimeId::HoldoutTriplePairs => "holdout_triple_pairs",
            RegimeId::HoldoutAttributePairs => "holdout_attribute_pairs",
        }
    }

    pub fn tag(self) -> u8 {
        RegimeId::ALL.iter().position(|r| *r == self).unwrap() as u8
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        RegimeId::ALL.get(tag as usize).copied()
    }
}

impl fmt::Display for RegimeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegimeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.replace('-', "_");
        RegimeId::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown regime '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }

    pub fn tag(self) -> u8 {
        self as u8
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Split::ALL.get(tag as usize).copied()
    }

    /// Validation draws from the training distribution.
    fn is_test(self) -> bool {
        self == Split::Test
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split '{s}'")),
        }
    }
}

pub const HELD_OUT_TRIPLE_PAIRS: usize = 40;
pub const HELD_OUT_ATTRIBUTE_PAIRS: usize = 4;

/// The randomly chosen held-out sets of regimes 6–8.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoldoutPlan {
    pub selection_seed: u64,
    /// One triple per dimension, in dimension order.
    pub held_out_triples: Vec<Triple>,
    pub held_out_triple_pairs: Vec<(Triple, Triple)>,
    pub held_out_attribute_pairs: Vec<(Dimension, Dimension)>,
}

pub fn build_holdout_plan(selection_seed: u64) -> HoldoutPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(selection_seed);

    let held_out_triples = Dimension::ALL
        .iter()
        .map(|d| {
            let choices: Vec<Triple> = viable_triples()
                .iter()
                .copied()
                .filter(|t| t.dimension() == *d)
                .collect();
            *choices.choose(&mut rng).unwrap()
        })
        .collect();

    // Only pairs that can share a structure (distinct dimensions) are worth
    // holding out: a same-dimension pair never occurs in any split.
    let mut pairs: Vec<(Triple, Triple)> = enumerate_viable_triple_pairs()
        .into_iter()
        .filter(|(a, b)| a.dimension() != b.dimension())
        .collect();
    pairs.shuffle(&mut rng);
    pairs.truncate(HELD_OUT_TRIPLE_PAIRS);
    pairs.sort();

    let mut attr_pairs = enumerate_viable_attribute_pairs();
    attr_pairs.shuffle(&mut rng);
    attr_pairs.truncate(HELD_OUT_ATTRIBUTE_PAIRS);
    attr_pairs.sort_by_key(|(a, b)| (a.index(), b.index()));

    HoldoutPlan {
        selection_seed,
        held_out_triples,
        held_out_triple_pairs: pairs,
        held_out_attribute_pairs: attr_pairs,
    }
}

impl HoldoutPlan {
    pub fn training_triple_pairs(&self) -> Vec<(Triple, Triple)> {
        enumerate_viable_triple_pairs()
            .into_iter()
            .filter(|p| !self.held_out_triple_pairs.contains(p))
            .collect()
    }
}

/// Colour (shape and line) and size indices a puzzle uses anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValueUsage {
    pub colours: ValueSet,
    pub sizes: ValueSet,
}

impl ValueUsage {
    pub fn from_panels<'a>(panels: impl IntoIterator<Item = &'a crate::panel::PanelSpec>) -> Self {
        let mut u = ValueUsage::default();
        for p in panels {
            let (c, s) = p.ordered_usage();
            u.colours = u.colours.union(c);
            u.sizes = u.sizes.union(s);
        }
        u
    }
}

fn evens() -> ValueSet {
    (0..LEVELS as u8).filter(|i| i % 2 == 0).collect()
}

fn odds() -> ValueSet {
    (0..LEVELS as u8).filter(|i| i % 2 == 1).collect()
}

fn lower_half() -> ValueSet {
    ValueSet::range(0, LEVELS as u8 / 2 - 1)
}

fn upper_half() -> ValueSet {
    ValueSet::range(LEVELS as u8 / 2, LEVELS as u8 - 1)
}

/// Value indices of `dim` a puzzle in (`regime`, `split`) may use. Only the
/// ordered attributes (colour, size) are ever restricted.
pub fn allowed_value_indices(regime: RegimeId, split: Split, dim: Dimension) -> ValueSet {
    let full = dim.domain().full();
    if !dim.attribute.is_ordered() {
        return full;
    }
    match (regime, split.is_test()) {
        (RegimeId::Interpolation, false) => evens(),
        (RegimeId::Interpolation, true) => odds(),
        (RegimeId::Extrapolation, false) => lower_half(),
        (RegimeId::Extrapolation, true) => upper_half(),
        _ => full,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegimePredicate<'a> {
    pub regime: RegimeId,
    pub split: Split,
    pub plan: &'a HoldoutPlan,
}

pub fn regime_predicate(regime: RegimeId, split: Split, plan: &HoldoutPlan) -> RegimePredicate<'_> {
    RegimePredicate { regime, split, plan }
}

fn co_occurs(s: &Structure, a: Dimension, b: Dimension) -> bool {
    s.has_dimension(a) && s.has_dimension(b)
}

impl RegimePredicate<'_> {
    pub fn admits_structure(&self, s: &Structure) -> bool {
        let test = self.split.is_test();
        let plan = self.plan;
        match self.regime {
            RegimeId::Neutral | RegimeId::Interpolation => true,
            RegimeId::Extrapolation => {
                !test || s.iter().any(|t| t.attribute.is_ordered())
            }
            RegimeId::HoldoutShapeColour => s.has_dimension(Dimension::SHAPE_COLOUR) == test,
            RegimeId::HoldoutLineType => s.has_dimension(Dimension::LINE_TYPE) == test,
            RegimeId::HoldoutTriples => {
                s.iter().any(|t| plan.held_out_triples.contains(t)) == test
            }
            RegimeId::HoldoutTriplePairs => {
                let hit = plan
                    .held_out_triple_pairs
                    .iter()
                    .any(|(a, b)| s.contains(a) && s.contains(b));
                s.len() >= 2 && hit == test
            }
            RegimeId::HoldoutAttributePairs => {
                let hit = plan
                    .held_out_attribute_pairs
                    .iter()
                    .any(|(a, b)| co_occurs(s, *a, *b));
                s.len() >= 2 && hit == test
            }
        }
    }

    pub fn admits_values(&self, usage: &ValueUsage) -> bool {
        let restricted = |dim| allowed_value_indices(self.regime, self.split, dim);
        let colours = restricted(Dimension::SHAPE_COLOUR);
        let sizes = restricted(Dimension::SHAPE_SIZE);
        let within = usage.colours.is_subset(colours) && usage.sizes.is_subset(sizes);
        match self.regime {
            // Every puzzle shows at least one coloured object, so an empty
            // colour set means the usage was not collected.
            RegimeId::Interpolation | RegimeId::Extrapolation => {
                within && !usage.colours.is_empty()
            }
            _ => within,
        }
    }

    pub fn admits(&self, s: &Structure, usage: &ValueUsage) -> bool {
        self.admits_structure(s) && self.admits_values(usage)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{enumerate_viable_triples, AttributeType, ObjectType, RelationType};
    use proptest::prelude::*;

    fn t(r: RelationType, o: ObjectType, a: AttributeType) -> Triple {
        Triple::new(r, o, a).unwrap()
    }

    #[test]
    fn allowed_indices_examples() {
        use RegimeId::*;
        assert_eq!(
            allowed_value_indices(Interpolation, Split::Train, Dimension::SHAPE_COLOUR).to_vec(),
            vec![0, 2, 4, 6, 8]
        );
        assert_eq!(
            allowed_value_indices(Extrapolation, Split::Test, Dimension::SHAPE_SIZE).to_vec(),
            vec![5, 6, 7, 8, 9]
        );
        assert_eq!(
            allowed_value_indices(Neutral, Split::Test, Dimension::SHAPE_TYPE),
            ValueSet::full(7)
        );
        assert_eq!(
            allowed_value_indices(Interpolation, Split::Validation, Dimension::LINE_COLOUR),
            evens()
        );
        assert_eq!(
            allowed_value_indices(Interpolation, Split::Test, Dimension::SHAPE_NUMBER),
            ValueSet::full(10)
        );
    }

    #[test]
    fn plan_shape() {
        let plan = build_holdout_plan(7);
        assert_eq!(plan, build_holdout_plan(7));
        assert_eq!(plan.held_out_triples.len(), 7);
        for (t, d) in plan.held_out_triples.iter().zip(Dimension::ALL) {
            assert_eq!(t.dimension(), d);
        }
        assert_eq!(plan.held_out_triple_pairs.len(), 40);
        assert_eq!(plan.training_triple_pairs().len(), 360);
        assert_eq!(plan.held_out_attribute_pairs.len(), 4);
        let all_pairs = enumerate_viable_triple_pairs();
        assert!(plan.held_out_triple_pairs.iter().all(|p| all_pairs.contains(p)));
    }

    #[test]
    fn plans_for_many_seeds() {
        let attr = enumerate_viable_attribute_pairs();
        for seed in 0..100 {
            let plan = build_holdout_plan(seed);
            let dims: Vec<Dimension> = plan.held_out_triples.iter().map(|t| t.dimension()).collect();
            assert_eq!(dims, Dimension::ALL.to_vec());
            let mut pairs = plan.held_out_triple_pairs.clone();
            pairs.dedup();
            assert_eq!(pairs.len(), 40);
            assert!(plan.held_out_attribute_pairs.iter().all(|p| attr.contains(p)));
        }
    }

    #[test]
    fn predicate_examples() {
        let plan = build_holdout_plan(0);
        let s = Structure::new([t(
            RelationType::Progression,
            ObjectType::Shape,
            AttributeType::Size,
        )])
        .unwrap();
        let interp_train = regime_predicate(RegimeId::Interpolation, Split::Train, &plan);
        let usage = ValueUsage { colours: ValueSet::singleton(2), sizes: ValueSet::singleton(3) };
        assert!(!interp_train.admits(&s, &usage));

        let hsc_test = regime_predicate(RegimeId::HoldoutShapeColour, Split::Test, &plan);
        assert!(!hsc_test.admits_structure(&s));

        for split in Split::ALL {
            assert!(regime_predicate(RegimeId::Neutral, split, &plan).admits_structure(&s));
        }

        let extra_test = regime_predicate(RegimeId::Extrapolation, Split::Test, &plan);
        let lines_only = Structure::new([t(RelationType::Xor, ObjectType::Line, AttributeType::Type)])
            .unwrap();
        assert!(!extra_test.admits_structure(&lines_only));
        assert!(extra_test.admits_structure(&s));
    }

    fn arb_structure() -> impl Strategy<Value = Structure> {
        proptest::sample::subsequence(enumerate_viable_triples(), 1..=4)
            .prop_filter_map("invalid structure", |ts| Structure::new(ts).ok())
    }

    fn arb_usage() -> impl Strategy<Value = ValueUsage> {
        (0u16..1024, 0u16..1024).prop_map(|(c, s)| ValueUsage {
            colours: ValueSet::from_bits(c),
            sizes: ValueSet::from_bits(s),
        })
    }

    proptest! {
        #[test]
        fn train_and_test_are_disjoint(s in arb_structure(), u in arb_usage(), seed in 0u64..50) {
            let plan = build_holdout_plan(seed);
            for regime in RegimeId::ALL.into_iter().skip(1) {
                let train = regime_predicate(regime, Split::Train, &plan).admits(&s, &u);
                let test = regime_predicate(regime, Split::Test, &plan).admits(&s, &u);
                prop_assert!(!(train && test), "{regime} admits {s} in both splits");
            }
        }
    }
}
