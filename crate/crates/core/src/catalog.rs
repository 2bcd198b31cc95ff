//! Relation, object and attribute catalogs, their value domains, and the
//! enumerations of viable triples and pairs.
//!
//! Canonical ordering is fixed here and everything downstream (meta-target
//! bit order aside, which has its own fixed order) inherits it:
//!
//! * dimensions follow the attribute table order: shape size, shape colour,
//!   shape number, shape position, shape type, line colour, line type;
//! * within a dimension, relations follow `RelationType::ALL`;
//! * value indices follow the catalog lists in [`ValueDomain`].

use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::CatalogError;
use crate::valueset::ValueSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationType {
    Progression,
    Xor,
    Or,
    And,
    ConsistentUnion,
}

impl RelationType {
    pub const ALL: [RelationType; 5] = [
        RelationType::Progression,
        RelationType::Xor,
        RelationType::Or,
        RelationType::And,
        RelationType::ConsistentUnion,
    ];

    pub fn arity(self) -> Arity {
        classify_arity(self)
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationType::Progression => "progression",
            RelationType::Xor => "XOR",
            RelationType::Or => "OR",
            RelationType::And => "AND",
            RelationType::ConsistentUnion => "consistent_union",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectType {
    Shape,
    Line,
}

impl ObjectType {
    pub const ALL: [ObjectType; 2] = [ObjectType::Shape, ObjectType::Line];

    pub fn name(self) -> &'static str {
        match self {
            ObjectType::Shape => "shape",
            ObjectType::Line => "line",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeType {
    Size,
    Type,
    Colour,
    Position,
    Number,
}

impl AttributeType {
    pub const ALL: [AttributeType; 5] = [
        AttributeType::Size,
        AttributeType::Type,
        AttributeType::Colour,
        AttributeType::Position,
        AttributeType::Number,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttributeType::Size => "size",
            AttributeType::Type => "type",
            AttributeType::Colour => "colour",
            AttributeType::Position => "position",
            AttributeType::Number => "number",
        }
    }

    /// Colour and size: the attributes whose values carry an order that the
    /// interpolation and extrapolation regimes restrict.
    pub fn is_ordered(self) -> bool {
        matches!(self, AttributeType::Colour | AttributeType::Size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arity {
    Unary,
    Binary,
    Ternary,
}

pub fn classify_arity(relation: RelationType) -> Arity {
    match relation {
        RelationType::Progression => Arity::Unary,
        RelationType::Xor | RelationType::Or | RelationType::And => Arity::Binary,
        RelationType::ConsistentUnion => Arity::Ternary,
    }
}

/// An object-qualified attribute, e.g. shape-colour. There are seven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dimension {
    pub object: ObjectType,
    pub attribute: AttributeType,
}

impl Dimension {
    pub const SHAPE_SIZE: Dimension = Dimension::new(ObjectType::Shape, AttributeType::Size);
    pub const SHAPE_COLOUR: Dimension = Dimension::new(ObjectType::Shape, AttributeType::Colour);
    pub const SHAPE_NUMBER: Dimension = Dimension::new(ObjectType::Shape, AttributeType::Number);
    pub const SHAPE_POSITION: Dimension =
        Dimension::new(ObjectType::Shape, AttributeType::Position);
    pub const SHAPE_TYPE: Dimension = Dimension::new(ObjectType::Shape, AttributeType::Type);
    pub const LINE_COLOUR: Dimension = Dimension::new(ObjectType::Line, AttributeType::Colour);
    pub const LINE_TYPE: Dimension = Dimension::new(ObjectType::Line, AttributeType::Type);

    pub const ALL: [Dimension; 7] = [
        Dimension::SHAPE_SIZE,
        Dimension::SHAPE_COLOUR,
        Dimension::SHAPE_NUMBER,
        Dimension::SHAPE_POSITION,
        Dimension::SHAPE_TYPE,
        Dimension::LINE_COLOUR,
        Dimension::LINE_TYPE,
    ];

    pub const fn new(object: ObjectType, attribute: AttributeType) -> Self {
        Dimension { object, attribute }
    }

    /// Position in `Dimension::ALL`; `None` for the three combinations that
    /// do not exist (line size, line position, line number).
    pub fn index(self) -> Option<usize> {
        Dimension::ALL.iter().position(|d| *d == self)
    }

    pub fn is_valid(self) -> bool {
        self.index().is_some()
    }

    pub fn relations(self) -> &'static [RelationType] {
        use RelationType::*;
        match (self.object, self.attribute) {
            (ObjectType::Shape, AttributeType::Size)
            | (ObjectType::Shape, AttributeType::Colour)
            | (ObjectType::Shape, AttributeType::Type)
            | (ObjectType::Line, AttributeType::Colour) => &RelationType::ALL,
            (ObjectType::Shape, AttributeType::Number) => &[Progression, ConsistentUnion],
            (ObjectType::Shape, AttributeType::Position) => &[Xor, Or, And],
            (ObjectType::Line, AttributeType::Type) => &[Xor, Or, And, ConsistentUnion],
            (ObjectType::Line, _) => &[],
        }
    }

    pub fn domain(self) -> &'static ValueDomain {
        &DOMAINS[self.index().expect("domain requested for invalid dimension")]
    }

    /// Whether cells of this dimension count objects: shape number and
    /// position determine how many shapes a panel holds, line type how many
    /// lines.
    pub fn is_count_bearing(self) -> bool {
        self == Dimension::SHAPE_NUMBER
            || self == Dimension::SHAPE_POSITION
            || self == Dimension::LINE_TYPE
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.object.name(), self.attribute.name())
    }
}

pub fn is_compatible(relation: RelationType, object: ObjectType, attribute: AttributeType) -> bool {
    Dimension::new(object, attribute)
        .relations()
        .contains(&relation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct Triple {
    pub relation: RelationType,
    pub object: ObjectType,
    pub attribute: AttributeType,
}

#[derive(Serialize, Deserialize)]
struct RawTriple {
    relation: RelationType,
    object: ObjectType,
    attribute: AttributeType,
}

impl TryFrom<RawTriple> for Triple {
    type Error = CatalogError;

    fn try_from(raw: RawTriple) -> Result<Self, Self::Error> {
        Triple::new(raw.relation, raw.object, raw.attribute)
    }
}

impl From<Triple> for RawTriple {
    fn from(t: Triple) -> Self {
        RawTriple {
            relation: t.relation,
            object: t.object,
            attribute: t.attribute,
        }
    }
}

impl Triple {
    pub fn new(
        relation: RelationType,
        object: ObjectType,
        attribute: AttributeType,
    ) -> Result<Self, CatalogError> {
        if !is_compatible(relation, object, attribute) {
            return Err(CatalogError::IncompatibleTriple {
                relation,
                object,
                attribute,
            });
        }
        Ok(Triple {
            relation,
            object,
            attribute,
        })
    }

    pub fn dimension(&self) -> Dimension {
        Dimension::new(self.object, self.attribute)
    }

    /// Index into `enumerate_viable_triples()`.
    pub fn canonical_index(&self) -> usize {
        viable_triples()
            .iter()
            .position(|t| t == self)
            .expect("triple constructed through Triple::new is viable")
    }
}

impl PartialOrd for Triple {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Triple {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_index().cmp(&other.canonical_index())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}, {}]",
            self.relation.name(),
            self.object.name(),
            self.attribute.name()
        )
    }
}

/// Number and position are tied (the count of shapes is the size of the
/// occupied-slot set), so triples over the two never share a structure.
pub fn number_position_clash(a: &Triple, b: &Triple) -> bool {
    let na = a.attribute == AttributeType::Number && a.object == ObjectType::Shape;
    let pa = a.attribute == AttributeType::Position && a.object == ObjectType::Shape;
    let nb = b.attribute == AttributeType::Number && b.object == ObjectType::Shape;
    let pb = b.attribute == AttributeType::Position && b.object == ObjectType::Shape;
    (na && pb) || (pa && nb)
}

pub const MAX_STRUCTURE_LEN: usize = 4;

/// A set of 1–4 triples, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Triple>", into = "Vec<Triple>")]
pub struct Structure(Vec<Triple>);

impl Structure {
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Result<Self, CatalogError> {
        let mut triples: Vec<Triple> = triples.into_iter().collect();
        if triples.is_empty() || triples.len() > MAX_STRUCTURE_LEN {
            return Err(CatalogError::StructureSize(triples.len()));
        }
        triples.sort();
        for w in triples.windows(2) {
            if w[0] == w[1] {
                return Err(CatalogError::DuplicateTriple(w[0]));
            }
        }
        for (i, a) in triples.iter().enumerate() {
            for b in &triples[i + 1..] {
                if number_position_clash(a, b) {
                    return Err(CatalogError::NumberPositionClash);
                }
            }
        }
        Ok(Structure(triples))
    }

    pub fn triples(&self) -> &[Triple] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.0.contains(t)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triple> {
        self.0.iter()
    }

    pub fn triple_for(&self, dim: Dimension) -> Option<&Triple> {
        self.0.iter().find(|t| t.dimension() == dim)
    }

    pub fn has_dimension(&self, dim: Dimension) -> bool {
        self.triple_for(dim).is_some()
    }

    pub fn mentions_object(&self, object: ObjectType) -> bool {
        self.0.iter().any(|t| t.object == object)
    }
}

impl TryFrom<Vec<Triple>> for Structure {
    type Error = CatalogError;

    fn try_from(v: Vec<Triple>) -> Result<Self, Self::Error> {
        Structure::new(v)
    }
}

impl From<Structure> for Vec<Triple> {
    fn from(s: Structure) -> Self {
        s.0
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Circle,
    Triangle,
    Square,
    Pentagon,
    Hexagon,
    Octagon,
    Star,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 7] = [
        ShapeKind::Circle,
        ShapeKind::Triangle,
        ShapeKind::Square,
        ShapeKind::Pentagon,
        ShapeKind::Hexagon,
        ShapeKind::Octagon,
        ShapeKind::Star,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    DiagonalDown,
    DiagonalUp,
    Vertical,
    Horizontal,
    Diamond,
    Circle,
}

impl LineKind {
    pub const ALL: [LineKind; 6] = [
        LineKind::DiagonalDown,
        LineKind::DiagonalUp,
        LineKind::Vertical,
        LineKind::Horizontal,
        LineKind::Diamond,
        LineKind::Circle,
    ];
}

/// Slot coordinates in a unit plot with y pointing up, in catalog order.
pub const POSITIONS: [(f64, f64); 9] = [
    (0.25, 0.75),
    (0.75, 0.75),
    (0.75, 0.25),
    (0.25, 0.25),
    (0.5, 0.5),
    (0.5, 0.25),
    (0.5, 0.75),
    (0.25, 0.5),
    (0.75, 0.5),
];

pub const LEVELS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DomainValue {
    Intensity(f64),
    Scale(f64),
    Count(u8),
    Coordinate((f64, f64)),
    Shape(ShapeKind),
    Line(LineKind),
}

/// The ordered value catalog of one dimension. Value index `i` is the
/// `i`-th entry of `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueDomain {
    pub dimension: Dimension,
    pub values: Vec<DomainValue>,
}

impl ValueDomain {
    fn build(dimension: Dimension) -> Self {
        let even = |f: fn(f64) -> DomainValue| -> Vec<DomainValue> {
            (0..LEVELS).map(|i| f(i as f64 / (LEVELS - 1) as f64)).collect()
        };
        let values = match (dimension.object, dimension.attribute) {
            (_, AttributeType::Colour) => even(DomainValue::Intensity),
            (ObjectType::Shape, AttributeType::Size) => even(DomainValue::Scale),
            (ObjectType::Shape, AttributeType::Number) => {
                (0..LEVELS as u8).map(DomainValue::Count).collect()
            }
            (ObjectType::Shape, AttributeType::Position) => {
                POSITIONS.iter().copied().map(DomainValue::Coordinate).collect()
            }
            (ObjectType::Shape, AttributeType::Type) => {
                ShapeKind::ALL.iter().copied().map(DomainValue::Shape).collect()
            }
            (ObjectType::Line, AttributeType::Type) => {
                LineKind::ALL.iter().copied().map(DomainValue::Line).collect()
            }
            _ => unreachable!("no domain for {dimension}"),
        };
        ValueDomain { dimension, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn full(&self) -> ValueSet {
        ValueSet::full(self.len())
    }
}

static DOMAINS: LazyLock<Vec<ValueDomain>> =
    LazyLock::new(|| Dimension::ALL.iter().map(|d| ValueDomain::build(*d)).collect());

pub fn value_domains() -> &'static [ValueDomain] {
    &DOMAINS
}

static VIABLE_TRIPLES: LazyLock<Vec<Triple>> = LazyLock::new(|| {
    Dimension::ALL
        .iter()
        .flat_map(|d| {
            d.relations().iter().map(move |r| Triple {
                relation: *r,
                object: d.object,
                attribute: d.attribute,
            })
        })
        .collect()
});

pub(crate) fn viable_triples() -> &'static [Triple] {
    &VIABLE_TRIPLES
}

/// Every compatible triple in canonical order (29 of them).
pub fn enumerate_viable_triples() -> Vec<Triple> {
    VIABLE_TRIPLES.clone()
}

/// Unordered pairs of distinct viable triples that may share a structure:
/// all of them except number/position crosses (400).
pub fn enumerate_viable_triple_pairs() -> Vec<(Triple, Triple)> {
    let ts = viable_triples();
    let mut out = Vec::new();
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            if !number_position_clash(a, b) {
                out.push((*a, *b));
            }
        }
    }
    out
}

/// Unordered pairs of distinct dimensions realised by at least one viable
/// triple pair (20).
pub fn enumerate_viable_attribute_pairs() -> Vec<(Dimension, Dimension)> {
    let pairs = enumerate_viable_triple_pairs();
    let mut out = Vec::new();
    for (i, a) in Dimension::ALL.iter().enumerate() {
        for b in &Dimension::ALL[i + 1..] {
            let realised = pairs.iter().any(|(x, y)| {
                (x.dimension() == *a && y.dimension() == *b)
                    || (x.dimension() == *b && y.dimension() == *a)
            });
            if realised {
                out.push((*a, *b));
            }
        }
    }
    out
}
