//! Batch subcommands: generate, validate, stats, render, solve.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use serde::Serialize;

use pgm_core::dataset::manifest::{
    generate_dataset, load_manifest, read_indexed, read_shard, verify_checksums, DatasetConfig,
    DatasetManifest, IntegrityIssue,
};
use pgm_core::dataset::stats::{corpus_stats, CorpusStats};
use pgm_core::record::PuzzleRecord;
use pgm_core::regimes::Split;
use pgm_core::render::{render_puzzle_sheet, GrayImage};
use pgm_core::solver::{solve, validate_record};

/// Full-scale split sizes: train, validation, test.
pub const FULL_SCALE_SIZES: [usize; 3] = [1_200_000, 20_000, 200_000];

pub fn cmd_generate(config: &DatasetConfig, out: &Path) -> Result<DatasetManifest> {
    if config.sizes.total() == 0 {
        bail!("at least one split needs a positive size");
    }
    let manifest = generate_dataset(config, out)
        .with_context(|| format!("generating {} dataset into {}", config.regime, out.display()))?;
    for s in &manifest.splits {
        info!("{}: {} records in {} shards, {} retries", s.split, s.size, s.shards.len(), s.retries);
    }
    Ok(manifest)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckTally {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidateReport {
    pub records: usize,
    pub integrity: Vec<IntegrityIssue>,
    pub checks: BTreeMap<String, CheckTally>,
    /// At most 20 failure descriptions.
    pub failures: Vec<String>,
}

impl ValidateReport {
    pub fn ok(&self) -> bool {
        self.integrity.is_empty() && self.checks.values().all(|t| t.failed == 0)
    }
}

pub fn cmd_validate(dir: &Path) -> Result<ValidateReport> {
    let manifest = load_manifest(dir)?;
    let mut report = ValidateReport { integrity: verify_checksums(dir, &manifest)?, ..Default::default() };
    let plan = manifest.plan.clone();
    for s in &manifest.splits {
        for shard in &s.shards {
            let records = match read_shard(&dir.join(&shard.file)) {
                Ok(r) => r,
                Err(e) => {
                    report.checks.entry("decode".into()).or_default().failed += 1;
                    report.failures.push(format!("{}: {e}", shard.file));
                    continue;
                }
            };
            report.checks.entry("decode".into()).or_default().passed += 1;
            for (i, rec) in records.iter().enumerate() {
                report.records += 1;
                for c in validate_record(rec, &plan).checks {
                    let t = report.checks.entry(c.name.clone()).or_default();
                    if c.passed {
                        t.passed += 1;
                    } else {
                        t.failed += 1;
                        if report.failures.len() < 20 {
                            report.failures.push(format!("{} record {i}: {} ({})", shard.file, c.name, c.detail));
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

pub fn load_records(dir: &Path, split: Option<Split>) -> Result<Vec<PuzzleRecord>> {
    let manifest = load_manifest(dir)?;
    let mut out = Vec::new();
    for s in manifest.splits.iter().filter(|s| split.is_none_or(|x| x == s.split)) {
        for shard in &s.shards {
            out.extend(read_shard(&dir.join(&shard.file))?);
        }
    }
    Ok(out)
}

pub fn cmd_stats(dir: &Path, split: Option<Split>) -> Result<CorpusStats> {
    Ok(corpus_stats(&load_records(dir, split)?))
}

pub fn write_image(img: &GrayImage, out: &Path) -> Result<()> {
    let is_pgm = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        let mut buf = Vec::new();
        img.write_pgm(&mut buf)?;
        fs::write(out, buf)?;
    } else {
        fs::write(out, img.encode_png()?)?;
    }
    Ok(())
}

/// Write the puzzle sheet, or a single panel (0–7 context, 8–15
/// candidates), as PNG or PGM depending on the extension.
pub fn cmd_render(dir: &Path, split: Split, index: usize, panel: Option<usize>, out: &Path) -> Result<PathBuf> {
    let manifest = load_manifest(dir)?;
    let rec = read_indexed(dir, &manifest, split, index)?;
    let img = match panel {
        Some(p) if p < rec.images.len() => GrayImage::from_panel(&rec.images[p]),
        Some(p) => bail!("panel {p} out of range (0-15)"),
        None => render_puzzle_sheet(&rec),
    };
    write_image(&img, out)?;
    Ok(out.to_path_buf())
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub split: Split,
    pub index: usize,
    pub solved: Option<usize>,
    pub consistent: Vec<usize>,
    pub stored_answer: usize,
}

impl SolveReport {
    pub fn agrees(&self) -> bool {
        self.solved == Some(self.stored_answer)
    }
}

pub fn cmd_solve(dir: &Path, split: Split, index: usize) -> Result<SolveReport> {
    let manifest = load_manifest(dir)?;
    let rec = read_indexed(dir, &manifest, split, index)?;
    let (solved, consistent) = match solve(&rec.context, &rec.candidates) {
        Ok(i) => (Some(i), vec![i]),
        Err(e) => (None, e.consistent),
    };
    Ok(SolveReport { split, index, solved, consistent, stored_answer: rec.answer_index as usize })
}
