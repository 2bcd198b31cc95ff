//! End-to-end puzzle synthesis.
//!
//! 1. sample a structure admitted by the regime;
//! 2. realise a grid for each of its triples;
//! 3. fill the remaining attributes, either constant or randomly varying,
//!    rejecting fills that make any other triple hold;
//! 4. build seven foils the solver rejects and render.
//!
//! Every panel that carries an object type carries at least one object of it:
//! shape counts run 1–9 and line panels hold 1–6 lines. Objects absent from
//! the structure are left out in non-distracting mode and added with
//! probability one half in distracting mode.

use log::debug;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    number_position_clash, viable_triples, Dimension, ObjectType, Structure, Triple,
    MAX_STRUCTURE_LEN,
};
use crate::dataset::meta::encode_meta;
use crate::error::GenerateError;
use crate::panel::{extract_grid, LineSpec, PanelSpec, ShapeSpec};
use crate::regimes::{allowed_value_indices, regime_predicate, HoldoutPlan, RegimeId, Split};
use crate::relations::{
    check_relation, holds_any_orientation, realize_relation_with_min_counts, AttributeGrid,
    Orientation,
};
use crate::record::PuzzleRecord;
use crate::solver::induce_structure;
use crate::valueset::ValueSet;

/// Retry budget for each rejection-sampling stage.
pub const ATTEMPTS: usize = 100;

pub const CANDIDATES: usize = 8;

/// Colour and size values used by the human-readable mode.
pub const HUMAN_READABLE_VALUES: [u8; 4] = [0, 3, 6, 9];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Relative weights of structure sizes 1, 2, 3 and 4.
    pub size_weights: [u32; MAX_STRUCTURE_LEN],
    /// Restrict colour and size to four well-separated values.
    pub human_readable: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            size_weights: [1; MAX_STRUCTURE_LEN],
            human_readable: false,
        }
    }
}

/// Value indices each dimension may draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValuePolicy {
    allowed: [ValueSet; 7],
}

impl ValuePolicy {
    pub fn unrestricted() -> Self {
        ValuePolicy {
            allowed: Dimension::ALL.map(|d| d.domain().full()),
        }
    }

    pub fn new(regime: RegimeId, split: Split, human_readable: bool) -> Result<Self, GenerateError> {
        let readable: ValueSet = HUMAN_READABLE_VALUES.into_iter().collect();
        let mut allowed = Dimension::ALL.map(|d| allowed_value_indices(regime, split, d));
        if human_readable {
            for (d, a) in Dimension::ALL.iter().zip(allowed.iter_mut()) {
                if d.attribute.is_ordered() {
                    *a = a.intersection(readable);
                }
            }
        }
        for (d, a) in Dimension::ALL.iter().zip(&allowed) {
            if a.len() < 3 {
                return Err(GenerateError::Config(format!(
                    "{d} has only {} usable values in {regime}/{split}",
                    a.len()
                )));
            }
        }
        Ok(ValuePolicy { allowed })
    }

    pub fn allowed(&self, dim: Dimension) -> ValueSet {
        self.allowed[dim.index().expect("valid dimension")]
    }
}

/// A fully specified 3×3 matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub structure: Structure,
    pub panels: Vec<PanelSpec>,
    /// Parallel to `structure`.
    pub orientations: Vec<Orientation>,
    pub distracting: bool,
}

impl MatrixSpec {
    pub fn context(&self) -> &[PanelSpec] {
        &self.panels[..8]
    }

    pub fn answer(&self) -> &PanelSpec {
        &self.panels[8]
    }

    pub fn grid(&self, dim: Dimension) -> AttributeGrid {
        extract_grid(&self.panels, dim)
    }
}

/// Dimensions that are neither governed by a triple nor tied to one (shape
/// number and position determine each other, so activating one frees the
/// other).
pub fn nonactive_dimensions(s: &Structure) -> Vec<Dimension> {
    Dimension::ALL
        .into_iter()
        .filter(|d| !s.has_dimension(*d))
        .filter(|d| {
            let tied = match *d {
                Dimension::SHAPE_NUMBER => Dimension::SHAPE_POSITION,
                Dimension::SHAPE_POSITION => Dimension::SHAPE_NUMBER,
                _ => return true,
            };
            !s.has_dimension(tied)
        })
        .collect()
}

/// Viable triples outside `s` that hold on the full matrix along either
/// orientation, ignoring dimensions constant over all nine panels.
pub fn spurious_triples(s: &Structure, panels: &[PanelSpec]) -> Vec<Triple> {
    viable_triples()
        .iter()
        .filter(|t| !s.contains(t))
        .filter(|t| {
            let g = extract_grid(panels, t.dimension());
            !g.is_constant() && holds_any_orientation(&g, t.relation)
        })
        .copied()
        .collect()
}

pub fn sample_structure<R: Rng + ?Sized>(
    rng: &mut R,
    filter: impl Fn(&Structure) -> bool,
    size_weights: &[u32; MAX_STRUCTURE_LEN],
) -> Result<Structure, GenerateError> {
    let total: u32 = size_weights.iter().sum();
    if total == 0 {
        return Err(GenerateError::Config("all structure size weights are zero".into()));
    }
    let mut pool = viable_triples().to_vec();
    for _ in 0..ATTEMPTS {
        let mut pick = rng.random_range(0..total);
        let mut len = 1;
        for (i, w) in size_weights.iter().enumerate() {
            if pick < *w {
                len = i + 1;
                break;
            }
            pick -= w;
        }
        pool.shuffle(rng);
        let mut chosen: Vec<Triple> = Vec::with_capacity(len);
        for t in &pool {
            if chosen.len() == len {
                break;
            }
            let fits = chosen
                .iter()
                .all(|c| c.dimension() != t.dimension() && !number_position_clash(c, t));
            if fits {
                chosen.push(*t);
            }
        }
        let s = Structure::new(chosen).expect("sampled triples form a valid structure");
        if filter(&s) {
            return Ok(s);
        }
    }
    Err(GenerateError::FilterExhausted { attempts: ATTEMPTS })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveGrid {
    pub triple: Triple,
    pub grid: AttributeGrid,
    pub orientation: Orientation,
}

fn min_objects(grids: &[ActiveGrid], object: ObjectType) -> [u8; 9] {
    let mut min = [1u8; 9];
    for g in grids.iter().filter(|g| g.triple.object == object) {
        if g.triple.dimension().is_count_bearing() {
            continue;
        }
        for (m, c) in min.iter_mut().zip(&g.grid.cells) {
            *m = (*m).max(c.len() as u8);
        }
    }
    min
}

/// Realise one grid per triple. Value attributes come first so that the
/// count-bearing dimensions can be sampled with enough objects per panel to
/// display every value set.
pub fn sample_active_values<R: Rng + ?Sized>(
    s: &Structure,
    rng: &mut R,
    policy: &ValuePolicy,
) -> Result<Vec<ActiveGrid>, GenerateError> {
    let mut out: Vec<ActiveGrid> = Vec::with_capacity(s.len());
    let (counts, values): (Vec<&Triple>, Vec<&Triple>) =
        s.iter().partition(|t| t.dimension().is_count_bearing());
    for t in values {
        let dim = t.dimension();
        let (grid, orientation) =
            realize_relation_with_min_counts(t, dim.domain(), policy.allowed(dim), &[1; 9], rng)?;
        out.push(ActiveGrid { triple: *t, grid, orientation });
    }
    for t in counts {
        let dim = t.dimension();
        let min = min_objects(&out, t.object);
        let (grid, orientation) =
            realize_relation_with_min_counts(t, dim.domain(), policy.allowed(dim), &min, rng)?;
        out.push(ActiveGrid { triple: *t, grid, orientation });
    }
    out.sort_by_key(|g| g.triple);
    Ok(out)
}

fn random_value<R: Rng + ?Sized>(rng: &mut R, pool: ValueSet) -> u8 {
    *pool.to_vec().choose(rng).expect("non-empty value pool")
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, pool: ValueSet, k: usize) -> ValueSet {
    pool.to_vec().choose_multiple(rng, k).copied().collect()
}

/// Values for `n` objects whose distinct values are exactly `cell`.
fn cover<R: Rng + ?Sized>(rng: &mut R, cell: ValueSet, n: usize) -> Vec<u8> {
    let mut vals = cell.to_vec();
    debug_assert!(!vals.is_empty() && vals.len() <= n);
    while vals.len() < n {
        let extra = *cell.to_vec().choose(rng).unwrap();
        vals.push(extra);
    }
    vals.shuffle(rng);
    vals
}

/// A grid for a dimension no triple governs.
fn filler_grid<R: Rng + ?Sized>(rng: &mut R, pool: ValueSet, distracting: bool) -> AttributeGrid {
    if distracting {
        AttributeGrid::new(std::array::from_fn(|_| ValueSet::singleton(random_value(rng, pool))))
    } else {
        AttributeGrid::new([ValueSet::singleton(random_value(rng, pool)); 9])
    }
}

/// Object sets (slots or line types) with at least `min[k]` members.
fn filler_sets<R: Rng + ?Sized>(
    rng: &mut R,
    pool: ValueSet,
    min: &[u8; 9],
    soft_cap: usize,
    distracting: bool,
) -> AttributeGrid {
    let size = |rng: &mut R, lo: usize| rng.random_range(lo..=lo.max(soft_cap).min(pool.len()));
    if distracting {
        AttributeGrid::new(std::array::from_fn(|k| {
            let n = size(rng, min[k] as usize);
            random_subset(rng, pool, n)
        }))
    } else {
        let lo = *min.iter().max().unwrap() as usize;
        let n = size(rng, lo);
        AttributeGrid::new([random_subset(rng, pool, n); 9])
    }
}

fn grid_for(active: &[ActiveGrid], dim: Dimension) -> Option<AttributeGrid> {
    active.iter().find(|g| g.triple.dimension() == dim).map(|g| g.grid)
}

fn build_panels<R: Rng + ?Sized>(
    s: &Structure,
    active: &[ActiveGrid],
    distracting: bool,
    policy: &ValuePolicy,
    rng: &mut R,
) -> Vec<PanelSpec> {
    let mut panels = vec![PanelSpec::default(); 9];
    let present = |rng: &mut R, o| s.mentions_object(o) || (distracting && rng.random_bool(0.5));

    if present(rng, ObjectType::Shape) {
        let value_grid = |dim: Dimension, rng: &mut R| {
            grid_for(active, dim).unwrap_or_else(|| filler_grid(rng, policy.allowed(dim), distracting))
        };
        let types = value_grid(Dimension::SHAPE_TYPE, rng);
        let sizes = value_grid(Dimension::SHAPE_SIZE, rng);
        let colours = value_grid(Dimension::SHAPE_COLOUR, rng);
        let mut min = [1u8; 9];
        for k in 0..9 {
            min[k] = [types, sizes, colours]
                .iter()
                .map(|g| g.cells[k].len() as u8)
                .max()
                .unwrap()
                .max(1);
        }
        let slots = if let Some(pos) = grid_for(active, Dimension::SHAPE_POSITION) {
            pos
        } else if let Some(num) = grid_for(active, Dimension::SHAPE_NUMBER) {
            AttributeGrid::new(std::array::from_fn(|k| {
                let n = num.cells[k].single().unwrap() as usize;
                random_subset(rng, ValueSet::full(9), n)
            }))
        } else {
            filler_sets(rng, ValueSet::full(9), &min, 5, distracting)
        };
        for k in 0..9 {
            let slot_list = slots.cells[k].to_vec();
            let n = slot_list.len();
            let t = cover(rng, types.cells[k], n);
            let z = cover(rng, sizes.cells[k], n);
            let c = cover(rng, colours.cells[k], n);
            panels[k].shapes = (0..n)
                .map(|i| ShapeSpec {
                    slot: slot_list[i],
                    type_idx: t[i],
                    size_idx: z[i],
                    colour_idx: c[i],
                })
                .collect();
        }
    }

    if present(rng, ObjectType::Line) {
        let colours = grid_for(active, Dimension::LINE_COLOUR)
            .unwrap_or_else(|| filler_grid(rng, policy.allowed(Dimension::LINE_COLOUR), distracting));
        let min: [u8; 9] = std::array::from_fn(|k| colours.cells[k].len().max(1) as u8);
        let types = grid_for(active, Dimension::LINE_TYPE).unwrap_or_else(|| {
            filler_sets(rng, policy.allowed(Dimension::LINE_TYPE), &min, 2, distracting)
        });
        for k in 0..9 {
            let kinds = types.cells[k].to_vec();
            let c = cover(rng, colours.cells[k], kinds.len());
            panels[k].lines = kinds
                .iter()
                .zip(c)
                .map(|(t, c)| LineSpec { type_idx: *t, colour_idx: c })
                .collect();
        }
    }

    for p in &mut panels {
        p.normalize();
    }
    panels
}

/// Every triple the solver would read off the context must belong to the
/// structure and survive the true answer, and nothing outside the structure
/// may hold on the full matrix.
fn is_clean(s: &Structure, active: &[ActiveGrid], panels: &[PanelSpec]) -> bool {
    for g in active {
        let full = extract_grid(panels, g.triple.dimension());
        if full != g.grid || !check_relation(&full, g.triple.relation, g.orientation) {
            return false;
        }
    }
    if !spurious_triples(s, panels).is_empty() {
        return false;
    }
    let induced = induce_structure(&panels[..8]);
    for g in active {
        if !induced.satisfied.contains(&(g.triple, g.orientation)) {
            return false;
        }
    }
    induced.satisfied.iter().all(|(t, o)| {
        s.contains(t) && check_relation(&extract_grid(panels, t.dimension()), t.relation, *o)
    })
}

pub fn fill_nonactive<R: Rng + ?Sized>(
    s: &Structure,
    active: &[ActiveGrid],
    distracting: bool,
    policy: &ValuePolicy,
    rng: &mut R,
) -> Result<MatrixSpec, GenerateError> {
    for _ in 0..ATTEMPTS {
        let panels = build_panels(s, active, distracting, policy, rng);
        if is_clean(s, active, &panels) {
            return Ok(MatrixSpec {
                structure: s.clone(),
                orientations: active.iter().map(|g| g.orientation).collect(),
                panels,
                distracting,
            });
        }
    }
    Err(GenerateError::SpuriousUnavoidable { attempts: ATTEMPTS })
}

fn recolour<R: Rng + ?Sized>(
    rng: &mut R,
    values: &mut [&mut u8],
    pool: ValueSet,
) -> bool {
    if values.is_empty() {
        return false;
    }
    let present: ValueSet = values.iter().map(|v| **v).collect();
    let from = random_value(rng, present);
    let Some(to) = pool.difference(ValueSet::singleton(from)).to_vec().choose(rng).copied() else {
        return false;
    };
    if rng.random_bool(0.5) {
        for v in values.iter_mut().filter(|v| ***v == from) {
            **v = to;
        }
    } else {
        let holders: Vec<usize> = (0..values.len()).filter(|i| *values[*i] == from).collect();
        let i = *holders.choose(rng).unwrap();
        *values[i] = to;
    }
    true
}

fn edit<R: Rng + ?Sized>(p: &mut PanelSpec, dim: Dimension, policy: &ValuePolicy, rng: &mut R) -> bool {
    let pool = policy.allowed(dim);
    match dim {
        Dimension::SHAPE_SIZE => {
            let mut v: Vec<&mut u8> = p.shapes.iter_mut().map(|s| &mut s.size_idx).collect();
            recolour(rng, &mut v, pool)
        }
        Dimension::SHAPE_COLOUR => {
            let mut v: Vec<&mut u8> = p.shapes.iter_mut().map(|s| &mut s.colour_idx).collect();
            recolour(rng, &mut v, pool)
        }
        Dimension::SHAPE_TYPE => {
            let mut v: Vec<&mut u8> = p.shapes.iter_mut().map(|s| &mut s.type_idx).collect();
            recolour(rng, &mut v, pool)
        }
        Dimension::LINE_COLOUR => {
            let mut v: Vec<&mut u8> = p.lines.iter_mut().map(|l| &mut l.colour_idx).collect();
            recolour(rng, &mut v, pool)
        }
        Dimension::SHAPE_NUMBER => {
            // Jump to any other count: progressions only require increase,
            // so single-step changes can stay consistent.
            let n = p.shapes.len();
            if n == 0 {
                return false;
            }
            let target = loop {
                let t = rng.random_range(1..=9usize);
                if t != n {
                    break t;
                }
            };
            while p.shapes.len() > target {
                let i = rng.random_range(0..p.shapes.len());
                p.shapes.remove(i);
            }
            while p.shapes.len() < target {
                let occupied: ValueSet = p.shapes.iter().map(|s| s.slot).collect();
                let mut s = *p.shapes.choose(rng).unwrap();
                s.slot = random_value(rng, ValueSet::full(9).difference(occupied));
                p.shapes.push(s);
            }
            true
        }
        Dimension::SHAPE_POSITION => {
            let occupied: ValueSet = p.shapes.iter().map(|s| s.slot).collect();
            let free = ValueSet::full(9).difference(occupied);
            if p.shapes.is_empty() || free.is_empty() {
                return false;
            }
            let i = rng.random_range(0..p.shapes.len());
            p.shapes[i].slot = random_value(rng, free);
            true
        }
        Dimension::LINE_TYPE => {
            let present: ValueSet = p.lines.iter().map(|l| l.type_idx).collect();
            let free = pool.difference(present);
            if p.lines.is_empty() {
                return false;
            }
            match rng.random_range(0..3) {
                0 if !free.is_empty() => {
                    let mut l = *p.lines.choose(rng).unwrap();
                    l.type_idx = random_value(rng, free);
                    p.lines.push(l);
                }
                1 if p.lines.len() > 1 => {
                    let i = rng.random_range(0..p.lines.len());
                    p.lines.remove(i);
                }
                _ if !free.is_empty() => {
                    let i = rng.random_range(0..p.lines.len());
                    p.lines[i].type_idx = random_value(rng, free);
                }
                _ => return false,
            }
            true
        }
        _ => false,
    }
}

/// Change one or two attribute values of the answer, preferring the
/// dimensions the structure governs.
fn perturb<R: Rng + ?Sized>(
    answer: &PanelSpec,
    s: &Structure,
    policy: &ValuePolicy,
    rng: &mut R,
) -> PanelSpec {
    let mut p = answer.clone();
    let edits = rng.random_range(1..=2);
    let mut done = 0;
    for _ in 0..8 {
        if done == edits {
            break;
        }
        let dim = if rng.random_bool(0.75) {
            s.triples().choose(rng).unwrap().dimension()
        } else {
            *Dimension::ALL.choose(rng).unwrap()
        };
        if edit(&mut p, dim, policy, rng) {
            done += 1;
        }
    }
    p.normalize();
    p
}

/// Seven solver-rejected foils plus the answer at a uniformly random index.
pub fn generate_candidates<R: Rng + ?Sized>(
    m: &MatrixSpec,
    policy: &ValuePolicy,
    rng: &mut R,
) -> Result<(Vec<PanelSpec>, usize), GenerateError> {
    let context = m.context();
    let answer = m.answer();
    let induced = induce_structure(context);
    let mut foils: Vec<PanelSpec> = Vec::with_capacity(CANDIDATES - 1);
    let budget = ATTEMPTS * (CANDIDATES - 1);
    let mut attempts = 0;
    while foils.len() < CANDIDATES - 1 {
        if attempts == budget {
            return Err(GenerateError::FoilExhausted { found: foils.len(), attempts });
        }
        attempts += 1;
        let foil = perturb(answer, &m.structure, policy, rng);
        if foil == *answer || foils.contains(&foil) {
            continue;
        }
        if induced.score(context, &foil).consistent {
            continue;
        }
        foils.push(foil);
    }
    let answer_index = rng.random_range(0..CANDIDATES);
    let mut candidates = foils;
    candidates.insert(answer_index, answer.clone());
    Ok((candidates, answer_index))
}

/// Puzzle factory bound to one holdout plan and configuration.
#[derive(Debug, Clone)]
pub struct Generator {
    pub plan: HoldoutPlan,
    pub config: GeneratorConfig,
}

impl Generator {
    pub fn new(plan: HoldoutPlan, config: GeneratorConfig) -> Self {
        Generator { plan, config }
    }

    /// Generate and render one puzzle. Pure in its arguments.
    pub fn generate_puzzle(
        &self,
        seed: u64,
        regime: RegimeId,
        split: Split,
        distracting: bool,
    ) -> Result<PuzzleRecord, GenerateError> {
        Ok(self.generate_symbolic(seed, regime, split, distracting)?.rendered())
    }

    /// As `generate_puzzle` without rendering; `images` is left empty.
    pub fn generate_symbolic(
        &self,
        seed: u64,
        regime: RegimeId,
        split: Split,
        distracting: bool,
    ) -> Result<PuzzleRecord, GenerateError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.generate_matrix(&mut rng, regime, split, distracting)?;
        let policy = ValuePolicy::new(regime, split, self.config.human_readable)?;
        let (candidates, answer_index) = generate_candidates(&m, &policy, &mut rng)?;
        Ok(PuzzleRecord {
            seed,
            regime,
            split,
            distracting,
            meta_target: encode_meta(&m.structure),
            orientations: m.orientations.clone(),
            context: m.panels[..8].to_vec(),
            structure: m.structure,
            candidates,
            answer_index: answer_index as u8,
            images: Vec::new(),
        })
    }

    pub fn generate_matrix<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        regime: RegimeId,
        split: Split,
        distracting: bool,
    ) -> Result<MatrixSpec, GenerateError> {
        let policy = ValuePolicy::new(regime, split, self.config.human_readable)?;
        let predicate = regime_predicate(regime, split, &self.plan);
        let s = sample_structure(rng, |s| predicate.admits_structure(s), &self.config.size_weights)?;
        let mut last = GenerateError::SpuriousUnavoidable { attempts: 0 };
        for attempt in 0..ATTEMPTS {
            let active = match sample_active_values(&s, rng, &policy) {
                Ok(a) => a,
                Err(e) => {
                    last = e;
                    continue;
                }
            };
            match fill_nonactive(&s, &active, distracting, &policy, rng) {
                Ok(m) => return Ok(m),
                Err(e) => {
                    debug!("{s}: fill attempt {attempt} failed: {e}");
                    last = e;
                }
            }
        }
        Err(last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AttributeType, RelationType};
    use crate::regimes::build_holdout_plan;
    use crate::solver::solve;

    fn generator() -> Generator {
        Generator::new(build_holdout_plan(0), GeneratorConfig::default())
    }

    fn t(r: RelationType, o: ObjectType, a: AttributeType) -> Triple {
        Triple::new(r, o, a).unwrap()
    }

    #[test]
    fn structure_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut sizes = [0; 4];
        for _ in 0..400 {
            let s = sample_structure(&mut rng, |_| true, &[1; 4]).unwrap();
            sizes[s.len() - 1] += 1;
            let dims: Vec<Dimension> = s.iter().map(|t| t.dimension()).collect();
            let mut dedup = dims.clone();
            dedup.dedup();
            assert_eq!(dims, dedup);
        }
        assert!(sizes.iter().all(|n| *n > 60), "{sizes:?}");
        assert!(matches!(
            sample_structure(&mut rng, |_| false, &[1; 4]),
            Err(GenerateError::FilterExhausted { .. })
        ));
    }

    #[test]
    fn active_values_respect_policy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = Structure::new([t(RelationType::Xor, ObjectType::Shape, AttributeType::Size)]).unwrap();
        let policy = ValuePolicy::new(RegimeId::Interpolation, Split::Train, false).unwrap();
        for _ in 0..50 {
            let grids = sample_active_values(&s, &mut rng, &policy).unwrap();
            assert!(grids[0].grid.cells.iter().all(|c| c.iter().all(|v| v % 2 == 0)));
        }
        let lines = Structure::new([
            t(RelationType::Progression, ObjectType::Line, AttributeType::Colour),
            t(RelationType::Or, ObjectType::Line, AttributeType::Type),
        ])
        .unwrap();
        let grids = sample_active_values(&lines, &mut rng, &ValuePolicy::unrestricted()).unwrap();
        assert_eq!(grids.len(), 2);
        assert!(check_relation(&grids[0].grid, RelationType::Progression, grids[0].orientation));
        assert!(check_relation(&grids[1].grid, RelationType::Or, Orientation::Rows));
    }

    #[test]
    fn nondistracting_fill_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = Structure::new([t(RelationType::ConsistentUnion, ObjectType::Shape, AttributeType::Colour)])
            .unwrap();
        let policy = ValuePolicy::unrestricted();
        let active = sample_active_values(&s, &mut rng, &policy).unwrap();
        let m = fill_nonactive(&s, &active, false, &policy, &mut rng).unwrap();
        for d in nonactive_dimensions(&s) {
            assert!(m.grid(d).is_constant(), "{d}");
        }
        assert!(m.panels.iter().all(|p| p.lines.is_empty()));
    }

    #[test]
    fn distracting_fill_has_no_spurious_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = Structure::new([t(RelationType::Progression, ObjectType::Shape, AttributeType::Number)])
            .unwrap();
        let policy = ValuePolicy::unrestricted();
        for _ in 0..20 {
            let active = sample_active_values(&s, &mut rng, &policy).unwrap();
            let m = fill_nonactive(&s, &active, true, &policy, &mut rng).unwrap();
            assert!(spurious_triples(&s, &m.panels).is_empty());
        }
    }

    #[test]
    fn candidates_are_distinct_and_unique() {
        let g = generator();
        for seed in 0..50 {
            let rec = g.generate_symbolic(seed, RegimeId::Neutral, Split::Train, seed % 2 == 0).unwrap();
            assert_eq!(rec.candidates.len(), 8);
            for i in 0..8 {
                for j in i + 1..8 {
                    assert_ne!(rec.candidates[i], rec.candidates[j]);
                }
            }
            assert_eq!(solve(&rec.context, &rec.candidates), Ok(rec.answer_index as usize));
        }
    }

    #[test]
    fn number_progression_foils_break_counts() {
        let g = generator();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = Structure::new([t(RelationType::Progression, ObjectType::Shape, AttributeType::Number)])
            .unwrap();
        let policy = ValuePolicy::unrestricted();
        let active = sample_active_values(&s, &mut rng, &policy).unwrap();
        let m = fill_nonactive(&s, &active, false, &policy, &mut rng).unwrap();
        let (cands, answer) = generate_candidates(&m, &policy, &mut rng).unwrap();
        assert_eq!(cands[answer], *m.answer());
        let induced = induce_structure(m.context());
        for (i, c) in cands.iter().enumerate() {
            assert_eq!(induced.score(m.context(), c).consistent, i == answer);
        }
        let _ = g;
    }

    #[test]
    fn deterministic() {
        let g = generator();
        let a = g.generate_puzzle(77, RegimeId::Neutral, Split::Train, true).unwrap();
        let b = g.generate_puzzle(77, RegimeId::Neutral, Split::Train, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.images.len(), 16);
    }

    #[test]
    fn extrapolation_test_uses_upper_half() {
        let g = generator();
        for seed in 0..40 {
            let rec = g.generate_symbolic(seed, RegimeId::Extrapolation, Split::Test, true).unwrap();
            let u = rec.value_usage();
            assert!(u.colours.iter().all(|c| c >= 5));
            assert!(u.sizes.iter().all(|c| c >= 5));
            assert!(rec.structure.iter().any(|t| t.attribute.is_ordered()));
        }
    }

    #[test]
    fn human_readable_policy() {
        let p = ValuePolicy::new(RegimeId::Neutral, Split::Train, true).unwrap();
        assert_eq!(p.allowed(Dimension::SHAPE_SIZE).to_vec(), vec![0, 3, 6, 9]);
        assert!(ValuePolicy::new(RegimeId::Interpolation, Split::Train, true).is_err());
    }
}
