//! Executable semantics of the five relations over 3×3 grids of cells.
//!
//! Every cell is a [`ValueSet`]. Scalar attributes (a single size, colour,
//! type or count per panel) are singleton cells; position cells and the
//! set-lifted values of multi-object panels hold several indices.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{Dimension, RelationType, Triple, ValueDomain};
use crate::error::GenerateError;
use crate::valueset::ValueSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Rows,
    Columns,
}

impl Orientation {
    pub const ALL: [Orientation; 2] = [Orientation::Rows, Orientation::Columns];

    /// Cell indices (row-major) of line `i`, in reading order along the line.
    /// The bottom-right cell is always the last cell of line 2.
    pub fn line(self, i: usize) -> [usize; 3] {
        match self {
            Orientation::Rows => [i * 3, i * 3 + 1, i * 3 + 2],
            Orientation::Columns => [i, 3 + i, 6 + i],
        }
    }
}

/// A 3×3 grid of cells in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AttributeGrid {
    pub cells: [ValueSet; 9],
}

impl AttributeGrid {
    pub fn new(cells: [ValueSet; 9]) -> Self {
        AttributeGrid { cells }
    }

    pub fn from_scalars(values: [u8; 9]) -> Self {
        AttributeGrid {
            cells: values.map(ValueSet::singleton),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> ValueSet {
        self.cells[row * 3 + col]
    }

    fn line(&self, orient: Orientation, i: usize) -> [ValueSet; 3] {
        orient.line(i).map(|k| self.cells[k])
    }

    pub fn is_constant(&self) -> bool {
        self.cells.iter().all(|c| *c == self.cells[0])
    }

    /// Whether the eight cells other than the bottom-right one are all equal.
    pub fn context_is_constant(&self) -> bool {
        self.cells[..8].iter().all(|c| *c == self.cells[0])
    }

    pub fn with_last(mut self, cell: ValueSet) -> Self {
        self.cells[8] = cell;
        self
    }
}

fn binary_op(relation: RelationType, a: ValueSet, b: ValueSet) -> ValueSet {
    match relation {
        RelationType::Xor => a.symmetric_difference(b),
        RelationType::Or => a.union(b),
        RelationType::And => a.intersection(b),
        _ => unreachable!("{relation:?} is not binary"),
    }
}

fn increasing(cells: [ValueSet; 3]) -> bool {
    match (cells[0].single(), cells[1].single(), cells[2].single()) {
        (Some(a), Some(b), Some(c)) => a < b && b < c,
        _ => false,
    }
}

fn line_union(cells: [ValueSet; 3]) -> ValueSet {
    cells[0].union(cells[1]).union(cells[2])
}

fn line_holds(relation: RelationType, cells: [ValueSet; 3]) -> bool {
    match relation {
        RelationType::Progression => increasing(cells),
        RelationType::Xor | RelationType::Or | RelationType::And => {
            binary_op(relation, cells[0], cells[1]) == cells[2]
        }
        RelationType::ConsistentUnion => unreachable!("consistent union spans lines"),
    }
}

/// Whether `relation` holds on all three lines of `grid` along `orient`.
///
/// Progression: every cell a singleton, strictly increasing along the line.
/// XOR/OR/AND: the third cell is the set operation of the first two.
/// Consistent union: the three lines draw on the same common set (the union
/// of each line's cells is identical).
pub fn check_relation(grid: &AttributeGrid, relation: RelationType, orient: Orientation) -> bool {
    match relation {
        RelationType::ConsistentUnion => {
            let u = line_union(grid.line(orient, 0));
            (1..3).all(|i| line_union(grid.line(orient, i)) == u)
        }
        _ => (0..3).all(|i| line_holds(relation, grid.line(orient, i))),
    }
}

pub fn holds_any_orientation(grid: &AttributeGrid, relation: RelationType) -> bool {
    Orientation::ALL
        .iter()
        .any(|o| check_relation(grid, relation, *o))
}

/// Whether `relation` holds on the two complete lines of a context and the
/// partial third line can still be completed by some cell drawn from
/// `universe`. The bottom-right cell of `grid` is ignored.
pub fn holds_on_context(
    grid: &AttributeGrid,
    relation: RelationType,
    orient: Orientation,
    universe: ValueSet,
) -> bool {
    let [a, b, _] = grid.line(orient, 2);
    match relation {
        RelationType::ConsistentUnion => {
            let u = line_union(grid.line(orient, 0));
            line_union(grid.line(orient, 1)) == u && a.union(b).is_subset(u)
        }
        RelationType::Progression => {
            let complete = (0..2).all(|i| increasing(grid.line(orient, i)));
            let partial = match (a.single(), b.single(), universe.max()) {
                (Some(x), Some(y), Some(top)) => x < y && y < top,
                _ => false,
            };
            complete && partial
        }
        _ => (0..2).all(|i| line_holds(relation, grid.line(orient, i))),
    }
}

const ATTEMPTS: usize = 100;

fn sample_subset<R: Rng + ?Sized>(rng: &mut R, pool: ValueSet, k: usize) -> ValueSet {
    let items = pool.to_vec();
    items.choose_multiple(rng, k).copied().collect()
}

fn infeasible(triple: Triple, reason: impl Into<String>) -> GenerateError {
    GenerateError::InfeasibleRealization {
        triple,
        reason: reason.into(),
    }
}

/// Sample a grid realising `triple` using only `allowed` value indices.
///
/// The grid is non-degenerate: its context is never constant, binary
/// operands overlap without either containing the other (so XOR, OR and AND
/// stay distinguishable), and no other relation compatible with the
/// dimension holds in either orientation. Count-bearing dimensions (shape
/// number, shape position, line type) produce non-empty cells.
pub fn realize_relation<R: Rng + ?Sized>(
    triple: &Triple,
    domain: &ValueDomain,
    allowed: ValueSet,
    rng: &mut R,
) -> Result<(AttributeGrid, Orientation), GenerateError> {
    realize_relation_with_min_counts(triple, domain, allowed, &[1; 9], rng)
}

/// As [`realize_relation`], with a per-panel lower bound on the number of
/// objects for count-bearing dimensions: the count itself for shape number,
/// the cell size for shape position and line type. Ignored elsewhere.
pub fn realize_relation_with_min_counts<R: Rng + ?Sized>(
    triple: &Triple,
    domain: &ValueDomain,
    allowed: ValueSet,
    min_counts: &[u8; 9],
    rng: &mut R,
) -> Result<(AttributeGrid, Orientation), GenerateError> {
    let dim = triple.dimension();
    debug_assert_eq!(domain.dimension, dim);
    let mut allowed = allowed.intersection(domain.full());
    let mut min = [1u8; 9];
    if dim.is_count_bearing() {
        for (m, lb) in min.iter_mut().zip(min_counts) {
            *m = (*lb).max(1);
        }
    }
    if dim == Dimension::SHAPE_NUMBER {
        allowed.remove(0);
    }
    let others: Vec<RelationType> = dim
        .relations()
        .iter()
        .copied()
        .filter(|r| *r != triple.relation)
        .collect();

    for _ in 0..ATTEMPTS {
        let (grid, orient) = match triple.relation {
            RelationType::Progression => {
                if allowed.len() < 3 {
                    return Err(infeasible(
                        *triple,
                        format!("progression needs 3 ordered values, {} allowed", allowed.len()),
                    ));
                }
                let orient = *Orientation::ALL.choose(rng).unwrap();
                (sample_progression(triple, dim, allowed, &min, orient, rng)?, orient)
            }
            RelationType::ConsistentUnion => {
                if allowed.len() < 3 {
                    return Err(infeasible(
                        *triple,
                        format!("consistent union needs 3 values, {} allowed", allowed.len()),
                    ));
                }
                (sample_union(triple, dim, allowed, &min, rng)?, Orientation::Rows)
            }
            _ => {
                if allowed.len() < 3 {
                    return Err(infeasible(
                        *triple,
                        format!("set operations need 3 values, {} allowed", allowed.len()),
                    ));
                }
                (sample_binary(triple, dim, allowed, &min, rng)?, Orientation::Rows)
            }
        };
        if grid.context_is_constant() {
            continue;
        }
        if others.iter().any(|r| holds_any_orientation(&grid, *r)) {
            continue;
        }
        return Ok((grid, orient));
    }
    Err(infeasible(
        *triple,
        format!("no non-degenerate grid within {ATTEMPTS} attempts"),
    ))
}

fn meets_min(dim: Dimension, cell: ValueSet, min: u8) -> bool {
    if !dim.is_count_bearing() {
        return true;
    }
    if dim == Dimension::SHAPE_NUMBER {
        cell.single().is_some_and(|n| n >= min)
    } else {
        cell.len() >= min as usize
    }
}

fn sample_progression<R: Rng + ?Sized>(
    triple: &Triple,
    dim: Dimension,
    allowed: ValueSet,
    min: &[u8; 9],
    orient: Orientation,
    rng: &mut R,
) -> Result<AttributeGrid, GenerateError> {
    let mut cells = [ValueSet::EMPTY; 9];
    for i in 0..3 {
        let idx = orient.line(i);
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let mut vals = sample_subset(rng, allowed, 3).to_vec();
            vals.sort_unstable();
            let line = [0, 1, 2].map(|k| ValueSet::singleton(vals[k]));
            if (0..3).all(|k| meets_min(dim, line[k], min[idx[k]])) {
                for k in 0..3 {
                    cells[idx[k]] = line[k];
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(infeasible(*triple, "progression cannot meet object counts"));
        }
    }
    Ok(AttributeGrid::new(cells))
}

fn operand_size_cap(dim: Dimension) -> usize {
    if dim == Dimension::SHAPE_POSITION {
        5
    } else {
        3
    }
}

fn sample_binary<R: Rng + ?Sized>(
    triple: &Triple,
    dim: Dimension,
    allowed: ValueSet,
    min: &[u8; 9],
    rng: &mut R,
) -> Result<AttributeGrid, GenerateError> {
    let relation = triple.relation;
    let mut cells = [ValueSet::EMPTY; 9];
    for row in 0..3 {
        let idx = Orientation::Rows.line(row);
        // An intersection of m values needs operands of at least m + 1.
        let floor = match relation {
            RelationType::And => min[idx[2]] as usize + 1,
            _ => 1,
        };
        let cap = operand_size_cap(dim).max(floor).min(allowed.len() - 1);
        let mut placed = false;
        for _ in 0..ATTEMPTS * 2 {
            let lo = |k: usize| (min[idx[k]] as usize).max(floor).clamp(1, cap);
            let k1 = rng.random_range(lo(0)..=cap);
            let k2 = rng.random_range(lo(1)..=cap);
            let a = sample_subset(rng, allowed, k1);
            let b = sample_subset(rng, allowed, k2);
            let c = binary_op(relation, a, b);
            let overlap = !a.intersection(b).is_empty();
            let nested = a.is_subset(b) || b.is_subset(a);
            let ok = match relation {
                RelationType::Xor => overlap && a != b,
                _ => overlap && !nested,
            };
            if !ok || c.is_empty() {
                continue;
            }
            let line = [a, b, c];
            if (0..3).all(|k| meets_min(dim, line[k], min[idx[k]])) {
                for k in 0..3 {
                    cells[idx[k]] = line[k];
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(infeasible(*triple, "no operand pair meets the constraints"));
        }
    }
    Ok(AttributeGrid::new(cells))
}

fn sample_union<R: Rng + ?Sized>(
    triple: &Triple,
    dim: Dimension,
    allowed: ValueSet,
    min: &[u8; 9],
    rng: &mut R,
) -> Result<AttributeGrid, GenerateError> {
    let mut cells = [ValueSet::EMPTY; 9];
    let set_valued = dim == Dimension::LINE_TYPE;
    if !set_valued {
        // Singleton cells: every line is a permutation of a common 3-set.
        for _ in 0..ATTEMPTS {
            let common = sample_subset(rng, allowed, 3).to_vec();
            let mut ok = true;
            for row in 0..3 {
                let idx = Orientation::Rows.line(row);
                let mut perm = common.clone();
                perm.shuffle(rng);
                for k in 0..3 {
                    cells[idx[k]] = ValueSet::singleton(perm[k]);
                    ok &= meets_min(dim, cells[idx[k]], min[idx[k]]);
                }
            }
            if ok {
                return Ok(AttributeGrid::new(cells));
            }
        }
        return Err(infeasible(*triple, "consistent union cannot meet object counts"));
    }

    let need = min.iter().copied().max().unwrap_or(1).max(3) as usize;
    if need > allowed.len() {
        return Err(infeasible(*triple, "common set larger than the domain"));
    }
    let common = sample_subset(rng, allowed, need);
    for row in 0..3 {
        let idx = Orientation::Rows.line(row);
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let line: [ValueSet; 3] = std::array::from_fn(|k| {
                let lo = (min[idx[k]] as usize).max(1);
                let hi = lo.max(2).min(common.len());
                let size = rng.random_range(lo..=hi);
                sample_subset(rng, common, size)
            });
            if line_union(line) == common && !(line[0] == line[1] && line[1] == line[2]) {
                for k in 0..3 {
                    cells[idx[k]] = line[k];
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(infeasible(*triple, "no covering of the common set"));
        }
    }
    Ok(AttributeGrid::new(cells))
}
