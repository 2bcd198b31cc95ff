//! Symbolic oracle: which triples does a context exhibit, and which
//! candidates keep all of them intact?
//!
//! A dimension whose eight context cells are all equal is skipped entirely.
//! Constant grids satisfy AND, OR and consistent union for free, so such
//! triples carry no information; the generator applies the same exclusion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{viable_triples, Dimension, Triple};
use crate::dataset::meta::encode_meta;
use crate::generator::spurious_triples;
use crate::panel::{extract_context_grid, extract_grid, PanelSpec};
use crate::record::PuzzleRecord;
use crate::regimes::{regime_predicate, HoldoutPlan};
use crate::relations::{check_relation, holds_on_context, Orientation};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InducedStructure {
    pub satisfied: Vec<(Triple, Orientation)>,
}

impl InducedStructure {
    pub fn len(&self) -> usize {
        self.satisfied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.satisfied.is_empty()
    }

    pub fn contains_triple(&self, t: &Triple) -> bool {
        self.satisfied.iter().any(|(x, _)| x == t)
    }

    pub fn triples(&self) -> Vec<Triple> {
        let mut ts: Vec<Triple> = self.satisfied.iter().map(|(t, _)| *t).collect();
        ts.dedup();
        ts
    }

    /// How many induced relations survive with `candidate` in the
    /// bottom-right cell.
    pub fn score(&self, context: &[PanelSpec], candidate: &PanelSpec) -> CandidateScore {
        let mut satisfied_count = 0;
        for (t, o) in &self.satisfied {
            let dim = t.dimension();
            let grid = extract_context_grid(context, dim).with_last(candidate.cell(dim));
            if check_relation(&grid, t.relation, *o) {
                satisfied_count += 1;
            }
        }
        CandidateScore {
            consistent: satisfied_count == self.satisfied.len(),
            satisfied_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub consistent: bool,
    pub satisfied_count: usize,
}

pub fn induce_structure(context: &[PanelSpec]) -> InducedStructure {
    let mut satisfied = Vec::new();
    for dim in Dimension::ALL {
        let grid = extract_context_grid(context, dim);
        if grid.context_is_constant() {
            continue;
        }
        let universe = dim.domain().full();
        for t in viable_triples().iter().filter(|t| t.dimension() == dim) {
            for o in Orientation::ALL {
                if holds_on_context(&grid, t.relation, o, universe) {
                    satisfied.push((*t, o));
                }
            }
        }
    }
    InducedStructure { satisfied }
}

pub fn score_candidate(context: &[PanelSpec], candidate: &PanelSpec) -> CandidateScore {
    induce_structure(context).score(context, candidate)
}

/// Zero or several candidates were consistent with the context.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("ambiguous puzzle: consistent candidates {consistent:?}")]
pub struct Ambiguous {
    pub consistent: Vec<usize>,
}

/// Index of the unique consistent candidate.
pub fn solve(context: &[PanelSpec], candidates: &[PanelSpec]) -> Result<usize, Ambiguous> {
    let induced = induce_structure(context);
    let consistent: Vec<usize> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| induced.score(context, c).consistent)
        .map(|(i, _)| i)
        .collect();
    match consistent.as_slice() {
        [only] => Ok(*only),
        _ => Err(Ambiguous { consistent }),
    }
}

/// Outcome of one named validation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult { name: name.to_string(), passed, detail: detail.into() });
    }
}

/// Re-derive everything a record claims. Pixels are checked only when the
/// record carries images.
pub fn validate_record(rec: &PuzzleRecord, plan: &HoldoutPlan) -> ValidationReport {
    let mut report = ValidationReport::default();

    let shape_ok = rec.context.len() == 8
        && rec.candidates.len() == 8
        && (rec.answer_index as usize) < rec.candidates.len()
        && rec.orientations.len() == rec.structure.len();
    let panel_errors: Vec<String> = rec
        .panels()
        .enumerate()
        .filter_map(|(i, p)| p.validate().err().map(|e| format!("panel {i}: {e}")))
        .collect();
    report.push(
        "well_formed",
        shape_ok && panel_errors.is_empty(),
        if shape_ok { panel_errors.join("; ") } else { "wrong panel, answer or orientation count".into() },
    );
    if !shape_ok {
        return report;
    }

    match solve(&rec.context, &rec.candidates) {
        Ok(i) if i == rec.answer_index as usize => report.push("solve", true, format!("answer {i}")),
        Ok(i) => report.push("solve", false, format!("solver chose {i}, record says {}", rec.answer_index)),
        Err(e) => report.push("solve", false, e.to_string()),
    }

    let meta = encode_meta(&rec.structure);
    report.push(
        "meta_target",
        meta == rec.meta_target,
        format!("stored {}, recomputed {meta}", rec.meta_target),
    );

    let predicate = regime_predicate(rec.regime, rec.split, plan);
    let usage = rec.value_usage();
    let admits_s = predicate.admits_structure(&rec.structure);
    let admits_v = predicate.admits_values(&usage);
    report.push(
        "regime",
        admits_s && admits_v,
        format!("{}/{}: structure {admits_s}, values {admits_v}", rec.regime, rec.split),
    );

    let matrix = rec.matrix();
    let broken: Vec<String> = rec
        .structure
        .iter()
        .zip(&rec.orientations)
        .filter(|(t, o)| !check_relation(&extract_grid(&matrix, t.dimension()), t.relation, **o))
        .map(|(t, o)| format!("{t} ({o:?})"))
        .collect();
    let spurious = spurious_triples(&rec.structure, &matrix);
    report.push(
        "structure",
        broken.is_empty() && spurious.is_empty(),
        format!(
            "broken: [{}], spurious: [{}]",
            broken.join(", "),
            spurious.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
        ),
    );

    if !rec.images.is_empty() {
        report.push("pixels", rec.pixels_match_symbols(), format!("{} images", rec.images.len()));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AttributeType, ObjectType, RelationType};
    use crate::panel::ShapeSpec;

    fn shapes(n: u8, colour: u8) -> PanelSpec {
        PanelSpec::new(
            (0..n)
                .map(|slot| ShapeSpec { slot, type_idx: 0, size_idx: 4, colour_idx: colour })
                .collect(),
            vec![],
        )
    }

    /// Number progression along rows: 1,2,3 / 2,3,4 / 3,4,5.
    fn number_matrix() -> Vec<PanelSpec> {
        [1, 2, 3, 2, 3, 4, 3, 4, 5].iter().map(|n| shapes(*n, 2)).collect()
    }

    fn number_progression() -> Triple {
        Triple::new(RelationType::Progression, ObjectType::Shape, AttributeType::Number).unwrap()
    }

    #[test]
    fn induces_generating_triple() {
        let m = number_matrix();
        let induced = induce_structure(&m[..8]);
        assert!(induced.contains_triple(&number_progression()));
        // Colour, size and type are constant and therefore skipped.
        assert!(induced
            .satisfied
            .iter()
            .all(|(t, _)| t.dimension() != Dimension::SHAPE_COLOUR));
        let score = induced.score(&m[..8], &m[8]);
        assert!(score.consistent);
        assert_eq!(score.satisfied_count, induced.len());
    }

    #[test]
    fn context_panel_as_candidate_breaks_progression() {
        let m = number_matrix();
        let s = score_candidate(&m[..8], &m[3]);
        assert!(!s.consistent);
    }

    #[test]
    fn two_triples_on_one_grid_both_reported() {
        // Colour 0,1,2 in each row is both a progression and a consistent
        // union along rows.
        let m: Vec<PanelSpec> = [0, 1, 2, 0, 1, 2, 0, 1, 2].iter().map(|c| shapes(1, *c)).collect();
        let induced = induce_structure(&m[..8]);
        let prog = Triple::new(RelationType::Progression, ObjectType::Shape, AttributeType::Colour)
            .unwrap();
        let cu =
            Triple::new(RelationType::ConsistentUnion, ObjectType::Shape, AttributeType::Colour)
                .unwrap();
        assert!(induced.satisfied.contains(&(prog, Orientation::Rows)));
        assert!(induced.satisfied.contains(&(cu, Orientation::Rows)));
    }

    #[test]
    fn solve_unique_and_ambiguous() {
        let m = number_matrix();
        let ctx = &m[..8];
        let mut cands: Vec<PanelSpec> = (1..=8).map(|n| shapes(n, 2)).collect();
        cands[0] = m[8].clone();
        // Counts 1..8 plus the true answer (5 shapes): 6, 7, 8 also continue
        // the progression.
        let err = solve(ctx, &cands).unwrap_err();
        assert_eq!(err.consistent, vec![0, 4, 5, 6, 7]);

        let cands: Vec<PanelSpec> = (1..=4).map(|n| shapes(n, 2)).collect();
        assert_eq!(solve(ctx, &cands).unwrap_err().consistent, Vec::<usize>::new());

        let mut cands: Vec<PanelSpec> = (1..=4).map(|n| shapes(n, 2)).collect();
        cands.push(m[8].clone());
        assert_eq!(solve(ctx, &cands), Ok(4));
    }

    mod validation {
        use super::*;
        use crate::generator::{Generator, GeneratorConfig};
        use crate::regimes::{build_holdout_plan, RegimeId, Split};

        fn record() -> (PuzzleRecord, HoldoutPlan) {
            let plan = build_holdout_plan(3);
            let g = Generator::new(plan.clone(), GeneratorConfig::default());
            (g.generate_puzzle(5, RegimeId::Neutral, Split::Train, true).unwrap(), plan)
        }

        #[test]
        fn fresh_record_passes() {
            let (rec, plan) = record();
            let report = validate_record(&rec, &plan);
            assert!(report.all_passed(), "{report:?}");
            assert!(report.check("pixels").unwrap().passed);
        }

        #[test]
        fn flipped_meta_bit_fails_meta_only() {
            let (mut rec, plan) = record();
            rec.meta_target = rec.meta_target.with_flipped(4);
            let report = validate_record(&rec, &plan);
            assert!(!report.check("meta_target").unwrap().passed);
            assert!(report.check("solve").unwrap().passed);
        }

        #[test]
        fn wrong_answer_index_fails_solve() {
            let (mut rec, plan) = record();
            rec.answer_index = (rec.answer_index + 1) % 8;
            let report = validate_record(&rec, &plan);
            assert!(!report.check("solve").unwrap().passed);
        }

        #[test]
        fn tampered_pixels_fail() {
            let (mut rec, plan) = record();
            let mut px = rec.images[3].pixels().to_vec();
            px[100] ^= 1;
            rec.images[3] = crate::render::PanelImage::from_pixels(px).unwrap();
            assert!(!validate_record(&rec, &plan).check("pixels").unwrap().passed);
        }

        #[test]
        fn regime_mismatch_fails() {
            let (mut rec, plan) = record();
            rec.regime = RegimeId::Interpolation;
            let usage = rec.value_usage();
            let odd = usage.colours.iter().chain(usage.sizes.iter()).any(|v| v % 2 == 1);
            assert_eq!(validate_record(&rec, &plan).check("regime").unwrap().passed, !odd);
        }
    }

    #[test]
    fn more_constraints_never_admit_more_candidates() {
        let m = number_matrix();
        let ctx = &m[..8];
        let induced = induce_structure(ctx);
        let cands: Vec<PanelSpec> = (1..=9).flat_map(|n| [shapes(n, 2), shapes(n, 5)]).collect();
        for k in 0..=induced.len() {
            let weaker = InducedStructure { satisfied: induced.satisfied[..k.saturating_sub(1)].to_vec() };
            let stronger = InducedStructure { satisfied: induced.satisfied[..k].to_vec() };
            for c in &cands {
                if stronger.score(ctx, c).consistent {
                    assert!(weaker.score(ctx, c).consistent);
                }
            }
        }
    }
}
