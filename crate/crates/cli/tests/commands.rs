use std::fs;
use std::path::Path;

use pgm_cli::commands::{cmd_generate, cmd_render, cmd_solve, cmd_stats, cmd_validate};
use pgm_core::dataset::manifest::{load_manifest, DatasetConfig, SplitSizes};
use pgm_core::regimes::{RegimeId, Split};
use tempfile::TempDir;

fn config(regime: RegimeId, train: usize, validation: usize, test: usize) -> DatasetConfig {
    DatasetConfig {
        regime,
        sizes: SplitSizes { train, validation, test },
        shard_size: 16,
        threads: Some(2),
        ..DatasetConfig::default()
    }
}

fn shard_hashes(dir: &Path) -> Vec<(String, String)> {
    let m = load_manifest(dir).unwrap();
    m.splits.iter().flat_map(|s| s.shards.iter().map(|sh| (sh.file.clone(), sh.sha256.clone()))).collect()
}

#[test]
fn neutral_example_sizes_and_full_validation() {
    let dir = TempDir::new().unwrap();
    let m = cmd_generate(&config(RegimeId::Neutral, 100, 10, 20), dir.path()).unwrap();
    let sizes: Vec<_> = m.splits.iter().map(|s| (s.split, s.size)).collect();
    assert_eq!(sizes, vec![(Split::Train, 100), (Split::Validation, 10), (Split::Test, 20)]);

    let report = cmd_validate(dir.path()).unwrap();
    assert_eq!(report.records, 130);
    assert!(report.ok(), "{:?}", report.failures);
    for name in ["well_formed", "solve", "meta_target", "regime", "structure", "pixels"] {
        assert_eq!(report.checks[name].passed, 130, "{name}");
    }

    let stats = cmd_stats(dir.path(), None).unwrap();
    assert_eq!(stats.records, 130);
    assert_eq!(stats.answer_histogram.iter().sum::<usize>(), 130);
    let test_only = cmd_stats(dir.path(), Some(Split::Test)).unwrap();
    assert_eq!(test_only.records, 20);
}

#[test]
fn generation_is_deterministic_across_runs_and_thread_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    cmd_generate(&config(RegimeId::Interpolation, 40, 5, 10), a.path()).unwrap();
    let mut c = config(RegimeId::Interpolation, 40, 5, 10);
    c.threads = Some(1);
    cmd_generate(&c, b.path()).unwrap();
    assert_eq!(shard_hashes(a.path()), shard_hashes(b.path()));
}

#[test]
fn infeasible_config_fails_fast() {
    let dir = TempDir::new().unwrap();
    let mut c = config(RegimeId::HoldoutTriplePairs, 5, 1, 5);
    c.size_weights = [1, 0, 0, 0];
    let err = cmd_generate(&c, dir.path()).unwrap_err();
    assert!(format!("{err:#}").contains("regime filter"), "{err:#}");
}

#[test]
fn empty_sizes_are_rejected() {
    let dir = TempDir::new().unwrap();
    assert!(cmd_generate(&config(RegimeId::Neutral, 0, 0, 0), dir.path()).is_err());
}

#[test]
fn solve_agrees_with_stored_answers() {
    let dir = TempDir::new().unwrap();
    cmd_generate(&config(RegimeId::HoldoutShapeColour, 8, 4, 12), dir.path()).unwrap();
    for (split, n) in [(Split::Train, 8), (Split::Validation, 4), (Split::Test, 12)] {
        for i in 0..n {
            let r = cmd_solve(dir.path(), split, i).unwrap();
            assert!(r.agrees(), "{split}[{i}] {r:?}");
            assert_eq!(r.consistent, vec![r.stored_answer]);
        }
    }
    assert!(cmd_solve(dir.path(), Split::Test, 12).is_err());
}

fn png_size(bytes: &[u8]) -> (u32, u32) {
    assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
    let w = u32::from_be_bytes(bytes[16..20].try_into().unwrap());
    let h = u32::from_be_bytes(bytes[20..24].try_into().unwrap());
    (w, h)
}

#[test]
fn render_writes_sheet_and_panels() {
    let dir = TempDir::new().unwrap();
    cmd_generate(&config(RegimeId::Neutral, 2, 1, 2), dir.path()).unwrap();
    let out = dir.path().join("sheet.png");
    cmd_render(dir.path(), Split::Test, 1, None, &out).unwrap();
    assert_eq!(png_size(&fs::read(&out).unwrap()), (348, 468));

    let panel = dir.path().join("p.png");
    cmd_render(dir.path(), Split::Test, 1, Some(15), &panel).unwrap();
    assert_eq!(png_size(&fs::read(&panel).unwrap()), (80, 80));

    let pgm = dir.path().join("p.pgm");
    cmd_render(dir.path(), Split::Train, 0, Some(0), &pgm).unwrap();
    let bytes = fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5"));
    assert!(bytes.len() >= 6400);

    assert!(cmd_render(dir.path(), Split::Test, 0, Some(16), &panel).is_err());
}

#[test]
fn validate_reports_corruption() {
    let dir = TempDir::new().unwrap();
    cmd_generate(&config(RegimeId::Neutral, 4, 1, 1), dir.path()).unwrap();
    let m = load_manifest(dir.path()).unwrap();
    let shard = dir.path().join(&m.splits[0].shards[0].file);
    let mut bytes = fs::read(&shard).unwrap();
    bytes[24 + 500] ^= 0xFF;
    fs::write(&shard, bytes).unwrap();
    let report = cmd_validate(dir.path()).unwrap();
    assert!(!report.ok());
    assert!(!report.integrity.is_empty());
}
