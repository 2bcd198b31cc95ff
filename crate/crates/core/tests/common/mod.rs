//! Naive reference implementations over `BTreeSet`, written without reuse of
//! library internals. Used to cross-check the optimised code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use pgm_core::catalog::{AttributeType, ObjectType, RelationType, Triple};
use pgm_core::panel::PanelSpec;
use pgm_core::relations::Orientation;

pub type Cell = BTreeSet<u8>;

use AttributeType as A;
use ObjectType as O;
use RelationType as R;

pub const ALL_R: [R; 5] = [R::Progression, R::Xor, R::Or, R::And, R::ConsistentUnion];

/// The attribute-to-relation table, transcribed literally.
pub fn table() -> Vec<(O, A, Vec<R>)> {
    vec![
        (O::Shape, A::Size, ALL_R.to_vec()),
        (O::Shape, A::Colour, ALL_R.to_vec()),
        (O::Shape, A::Number, vec![R::Progression, R::ConsistentUnion]),
        (O::Shape, A::Position, vec![R::Xor, R::Or, R::And]),
        (O::Shape, A::Type, ALL_R.to_vec()),
        (O::Line, A::Colour, ALL_R.to_vec()),
        (O::Line, A::Type, vec![R::Xor, R::Or, R::And, R::ConsistentUnion]),
    ]
}

/// Number of values in each dimension's domain.
pub fn domain_len(o: O, a: A) -> u8 {
    match (o, a) {
        (O::Shape, A::Size | A::Colour | A::Number) | (O::Line, A::Colour) => 10,
        (O::Shape, A::Position) => 9,
        (O::Shape, A::Type) => 7,
        (O::Line, A::Type) => 6,
        _ => unreachable!(),
    }
}

pub fn naive_triples() -> Vec<(R, O, A)> {
    let mut out = Vec::new();
    for o in [O::Shape, O::Line] {
        for a in [A::Size, A::Type, A::Colour, A::Position, A::Number] {
            for r in ALL_R {
                if table().iter().any(|(to, ta, rs)| *to == o && *ta == a && rs.contains(&r)) {
                    out.push((r, o, a));
                }
            }
        }
    }
    out
}

fn is_num_pos(a: &(R, O, A), b: &(R, O, A)) -> bool {
    let np = |x: &(R, O, A)| x.1 == O::Shape && matches!(x.2, A::Number | A::Position);
    np(a) && np(b) && a.2 != b.2
}

pub fn naive_triple_pairs() -> Vec<((R, O, A), (R, O, A))> {
    let ts = naive_triples();
    let mut out = Vec::new();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            if !is_num_pos(&ts[i], &ts[j]) {
                out.push((ts[i], ts[j]));
            }
        }
    }
    out
}

pub fn naive_attribute_pairs() -> BTreeSet<((u8, u8), (u8, u8))> {
    let key = |t: &(R, O, A)| (t.1 as u8, t.2 as u8);
    naive_triple_pairs()
        .iter()
        .filter(|(a, b)| key(a) != key(b))
        .map(|(a, b)| {
            let (x, y) = (key(a), key(b));
            (x.min(y), x.max(y))
        })
        .collect()
}

pub fn cell(p: &PanelSpec, o: O, a: A) -> Cell {
    match (o, a) {
        (O::Shape, A::Size) => p.shapes.iter().map(|s| s.size_idx).collect(),
        (O::Shape, A::Colour) => p.shapes.iter().map(|s| s.colour_idx).collect(),
        (O::Shape, A::Type) => p.shapes.iter().map(|s| s.type_idx).collect(),
        (O::Shape, A::Position) => p.shapes.iter().map(|s| s.slot).collect(),
        (O::Shape, A::Number) => [p.shapes.len() as u8].into_iter().collect(),
        (O::Line, A::Colour) => p.lines.iter().map(|l| l.colour_idx).collect(),
        (O::Line, A::Type) => p.lines.iter().map(|l| l.type_idx).collect(),
        _ => unreachable!(),
    }
}

pub fn line_indices(orient: Orientation, i: usize) -> [usize; 3] {
    match orient {
        Orientation::Rows => [3 * i, 3 * i + 1, 3 * i + 2],
        Orientation::Columns => [i, i + 3, i + 6],
    }
}

fn single(c: &Cell) -> Option<u8> {
    if c.len() == 1 {
        c.iter().next().copied()
    } else {
        None
    }
}

fn op(r: R, a: &Cell, b: &Cell) -> Cell {
    match r {
        R::Xor => a.symmetric_difference(b).copied().collect(),
        R::Or => a.union(b).copied().collect(),
        R::And => a.intersection(b).copied().collect(),
        _ => unreachable!(),
    }
}

fn union3(g: &[Cell], idx: [usize; 3]) -> Cell {
    idx.iter().flat_map(|i| g[*i].iter().copied()).collect()
}

fn line_ok(g: &[Cell], r: R, l: [usize; 3]) -> bool {
    match r {
        R::Progression => matches!(
            (single(&g[l[0]]), single(&g[l[1]]), single(&g[l[2]])),
            (Some(a), Some(b), Some(c)) if a < b && b < c
        ),
        R::Xor | R::Or | R::And => op(r, &g[l[0]], &g[l[1]]) == g[l[2]],
        R::ConsistentUnion => unreachable!(),
    }
}

pub fn naive_check(g: &[Cell], r: R, orient: Orientation) -> bool {
    let lines: Vec<[usize; 3]> = (0..3).map(|i| line_indices(orient, i)).collect();
    match r {
        R::ConsistentUnion => {
            let u = union3(g, lines[0]);
            union3(g, lines[1]) == u && union3(g, lines[2]) == u
        }
        _ => lines.iter().all(|l| line_ok(g, r, *l)),
    }
}

/// Some value for the missing cell could complete the relation: checked by
/// trying every subset of the domain.
pub fn naive_completable(g: &[Cell], r: R, orient: Orientation, domain: u8) -> bool {
    let last = line_indices(orient, 2)[2];
    (0u32..(1 << domain)).any(|mask| {
        let candidate: Cell = (0..domain).filter(|v| mask & (1 << v) != 0).collect();
        let mut full = g.to_vec();
        full[last] = candidate;
        naive_check(&full, r, orient)
    })
}

/// Every (triple, orientation) the context exhibits, skipping dimensions
/// whose eight context cells are all equal.
pub fn naive_induce(context: &[PanelSpec]) -> BTreeSet<(R, O, A, bool)> {
    let mut out = BTreeSet::new();
    for (o, a, rs) in table() {
        let mut g: Vec<Cell> = context.iter().map(|p| cell(p, o, a)).collect();
        g.push(Cell::new());
        if g[..8].iter().all(|c| *c == g[0]) {
            continue;
        }
        for r in rs {
            for orient in [Orientation::Rows, Orientation::Columns] {
                if naive_completable(&g, r, orient, domain_len(o, a)) {
                    out.insert((r, o, a, orient == Orientation::Rows));
                }
            }
        }
    }
    out
}

pub fn naive_consistent(context: &[PanelSpec], candidates: &[PanelSpec]) -> Vec<usize> {
    let induced = naive_induce(context);
    (0..candidates.len())
        .filter(|i| {
            induced.iter().all(|(r, o, a, rows)| {
                let mut g: Vec<Cell> = context.iter().map(|p| cell(p, *o, *a)).collect();
                g.push(cell(&candidates[*i], *o, *a));
                let orient = if *rows { Orientation::Rows } else { Orientation::Columns };
                naive_check(&g, *r, orient)
            })
        })
        .collect()
}

pub fn key(t: &Triple) -> (R, O, A) {
    (t.relation, t.object, t.attribute)
}
