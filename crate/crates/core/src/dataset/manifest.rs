//! Sharded on-disk corpora.
//!
//! A dataset directory holds `manifest.json` plus shard files named
//! `{split}-{shard:05}.pgmr`, each a concatenation of binary records. Record
//! `i` of a split draws its seed from `base_seed + (split_tag << 56) + 64 i +
//! attempt`, so the three splits use disjoint seed ranges and a failed
//! generation retries with the next of 64 attempt seeds.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::{value_domains, ValueDomain, MAX_STRUCTURE_LEN};
use crate::dataset::format::{encode_record, read_record_at, FORMAT_VERSION};
use crate::error::{DatasetError, GenerateError};
use crate::generator::{Generator, GeneratorConfig};
use crate::record::PuzzleRecord;
use crate::regimes::{build_holdout_plan, HoldoutPlan, RegimeId, Split};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const GENERATOR_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SEED_ATTEMPTS: u64 = 64;
pub const DEFAULT_SHARD_SIZE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl SplitSizes {
    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Validation => self.validation,
            Split::Test => self.test,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.validation + self.test
    }
}

impl Default for SplitSizes {
    fn default() -> Self {
        SplitSizes { train: 10_000, validation: 1_000, test: 2_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub regime: RegimeId,
    pub sizes: SplitSizes,
    pub distracting: bool,
    pub base_seed: u64,
    pub selection_seed: u64,
    pub human_readable: bool,
    pub size_weights: [u32; MAX_STRUCTURE_LEN],
    pub shard_size: usize,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            regime: RegimeId::Neutral,
            sizes: SplitSizes::default(),
            distracting: true,
            base_seed: 0,
            selection_seed: 0,
            human_readable: false,
            size_weights: [1; MAX_STRUCTURE_LEN],
            shard_size: DEFAULT_SHARD_SIZE,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardEntry {
    pub file: String,
    pub records: usize,
    pub bytes: u64,
    pub sha256: String,
    pub record_seeds: Vec<u64>,
    pub record_sha256: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub split: Split,
    pub size: usize,
    /// Generation attempts that failed and were retried with the next seed.
    pub retries: u64,
    pub shards: Vec<ShardEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u16,
    pub generator_version: String,
    pub regime: RegimeId,
    pub distracting: bool,
    pub human_readable: bool,
    pub base_seed: u64,
    pub selection_seed: u64,
    pub size_weights: [u32; MAX_STRUCTURE_LEN],
    pub plan: HoldoutPlan,
    pub value_domains: Vec<ValueDomain>,
    pub splits: Vec<SplitEntry>,
}

impl DatasetManifest {
    pub fn split(&self, split: Split) -> Option<&SplitEntry> {
        self.splits.iter().find(|s| s.split == split)
    }

    pub fn total_records(&self) -> usize {
        self.splits.iter().map(|s| s.size).sum()
    }

    pub fn generator(&self) -> Generator {
        Generator::new(
            self.plan.clone(),
            GeneratorConfig { size_weights: self.size_weights, human_readable: self.human_readable },
        )
    }
}

pub fn record_seed(base: u64, split: Split, index: u64, attempt: u64) -> u64 {
    base.wrapping_add((split.tag() as u64) << 56)
        .wrapping_add(index * SEED_ATTEMPTS)
        .wrapping_add(attempt)
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Generate record `index` of a split, retrying with successive seeds.
/// Returns the record and the number of failed attempts.
pub fn generate_indexed(
    generator: &Generator,
    config: &DatasetConfig,
    split: Split,
    index: u64,
) -> Result<(PuzzleRecord, u64), GenerateError> {
    let mut last = None;
    for attempt in 0..SEED_ATTEMPTS {
        let seed = record_seed(config.base_seed, split, index, attempt);
        match generator.generate_puzzle(seed, config.regime, split, config.distracting) {
            Ok(rec) => return Ok((rec, attempt)),
            // A configuration that no seed can satisfy fails immediately.
            Err(e @ (GenerateError::FilterExhausted { .. } | GenerateError::Config(_))) => return Err(e),
            Err(e) => {
                warn!("{split} record {index}, seed {seed}: {e}");
                last = Some(e);
            }
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Generate a dataset into `out_dir` and write its manifest.
pub fn generate_dataset(config: &DatasetConfig, out_dir: &Path) -> Result<DatasetManifest, DatasetError> {
    if config.shard_size == 0 {
        return Err(DatasetError::Manifest("shard size must be at least 1".into()));
    }
    fs::create_dir_all(out_dir)?;
    let plan = build_holdout_plan(config.selection_seed);
    let gen_config = GeneratorConfig { size_weights: config.size_weights, human_readable: config.human_readable };
    let generator = Generator::new(plan.clone(), gen_config);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().map_err(|e| DatasetError::Manifest(e.to_string()))?;

    let mut splits = Vec::new();
    for split in Split::ALL {
        let size = config.sizes.get(split);
        let mut entry = SplitEntry { split, size, retries: 0, shards: Vec::new() };
        for (shard_no, start) in (0..size).step_by(config.shard_size).enumerate() {
            let end = (start + config.shard_size).min(size);
            let results: Vec<Result<(PuzzleRecord, u64), GenerateError>> = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|i| generate_indexed(&generator, config, split, i as u64))
                    .collect()
            });
            let file = format!("{split}-{shard_no:05}.pgmr");
            let mut writer = BufWriter::new(File::create(out_dir.join(&file))?);
            let mut shard_hash = Sha256::new();
            let mut shard = ShardEntry {
                file,
                records: 0,
                bytes: 0,
                sha256: String::new(),
                record_seeds: Vec::new(),
                record_sha256: Vec::new(),
            };
            for r in results {
                let (rec, retries) = r?;
                entry.retries += retries;
                let bytes = encode_record(&rec)?;
                writer.write_all(&bytes)?;
                shard_hash.update(&bytes);
                shard.records += 1;
                shard.bytes += bytes.len() as u64;
                shard.record_seeds.push(rec.seed);
                shard.record_sha256.push(sha_hex(&bytes));
            }
            writer.flush()?;
            shard.sha256 = hex::encode(shard_hash.finalize());
            entry.shards.push(shard);
        }
        info!("{split}: {size} records, {} retries", entry.retries);
        splits.push(entry);
    }

    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        generator_version: GENERATOR_VERSION.to_string(),
        regime: config.regime,
        distracting: config.distracting,
        human_readable: config.human_readable,
        base_seed: config.base_seed,
        selection_seed: config.selection_seed,
        size_weights: config.size_weights,
        plan,
        value_domains: value_domains().to_vec(),
        splits,
    };
    write_manifest(&manifest, out_dir)?;
    Ok(manifest)
}

pub fn write_manifest(m: &DatasetManifest, dir: &Path) -> Result<(), DatasetError> {
    let mut text = serde_json::to_string_pretty(m)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(())
}

pub fn load_manifest(dir: &Path) -> Result<DatasetManifest, DatasetError> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let m: DatasetManifest = serde_json::from_str(&text)?;
    if m.format_version != FORMAT_VERSION {
        return Err(DatasetError::Manifest(format!("unsupported format version {}", m.format_version)));
    }
    for s in &m.splits {
        let counted: usize = s.shards.iter().map(|sh| sh.records).sum();
        if counted != s.size {
            return Err(DatasetError::Manifest(format!(
                "{}: size {} but shards list {counted} records",
                s.split, s.size
            )));
        }
    }
    Ok(m)
}

/// Read every record of one shard, verifying pixels against sidecars.
pub fn read_shard(path: &Path) -> Result<Vec<PuzzleRecord>, DatasetError> {
    let bytes = fs::read(path)?;
    let mut src = bytes.as_slice();
    let mut out = Vec::new();
    loop {
        let offset = (bytes.len() - src.len()) as u64;
        match read_record_at(&mut src, offset)? {
            Some(r) => out.push(r),
            None => return Ok(out),
        }
    }
}

/// All records of one split, in order.
pub fn read_split(dir: &Path, m: &DatasetManifest, split: Split) -> Result<Vec<PuzzleRecord>, DatasetError> {
    let mut out = Vec::new();
    if let Some(entry) = m.split(split) {
        for shard in &entry.shards {
            out.extend(read_shard(&dir.join(&shard.file))?);
        }
    }
    Ok(out)
}

/// Load the record at `index` within a split without decoding its shard
/// neighbours.
pub fn read_indexed(
    dir: &Path,
    m: &DatasetManifest,
    split: Split,
    index: usize,
) -> Result<PuzzleRecord, DatasetError> {
    let entry = m
        .split(split)
        .ok_or_else(|| DatasetError::Manifest(format!("no {split} split")))?;
    let mut remaining = index;
    for shard in &entry.shards {
        if remaining < shard.records {
            let mut reader = BufReader::new(File::open(dir.join(&shard.file))?);
            let mut offset = 0u64;
            for _ in 0..remaining {
                let skipped = read_record_at(&mut reader, offset)?
                    .ok_or_else(|| DatasetError::Manifest(format!("{} ends early", shard.file)))?;
                offset += encode_record(&skipped)?.len() as u64;
            }
            return read_record_at(&mut reader, offset)?
                .ok_or_else(|| DatasetError::Manifest(format!("{} ends early", shard.file)));
        }
        remaining -= shard.records;
    }
    Err(DatasetError::Manifest(format!("{split} has {} records, index {index} out of range", entry.size)))
}

/// A problem found while checking a dataset against its manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityIssue {
    pub file: String,
    pub record: Option<usize>,
    pub message: String,
}

/// Check shard and per-record checksums and record counts.
pub fn verify_checksums(dir: &Path, m: &DatasetManifest) -> Result<Vec<IntegrityIssue>, DatasetError> {
    let mut issues = Vec::new();
    for s in &m.splits {
        for shard in &s.shards {
            let path: PathBuf = dir.join(&shard.file);
            let bytes = match fs::read(&path) {
                Ok(b) => b,
                Err(e) => {
                    issues.push(IntegrityIssue { file: shard.file.clone(), record: None, message: e.to_string() });
                    continue;
                }
            };
            if sha_hex(&bytes) != shard.sha256 {
                issues.push(IntegrityIssue {
                    file: shard.file.clone(),
                    record: None,
                    message: "shard checksum mismatch".into(),
                });
            }
            if bytes.len() as u64 != shard.bytes {
                issues.push(IntegrityIssue {
                    file: shard.file.clone(),
                    record: None,
                    message: format!("expected {} bytes, found {}", shard.bytes, bytes.len()),
                });
            }
            // Locate records by their sidecar lengths so a corrupted record
            // can be named even when it no longer decodes.
            let mut offset = 0usize;
            let mut i = 0;
            while offset < bytes.len() {
                let len = record_len_at(&bytes, offset);
                let Some(len) = len else {
                    issues.push(IntegrityIssue {
                        file: shard.file.clone(),
                        record: Some(i),
                        message: format!("cannot frame record at byte {offset}"),
                    });
                    break;
                };
                let digest = sha_hex(&bytes[offset..offset + len]);
                if shard.record_sha256.get(i) != Some(&digest) {
                    issues.push(IntegrityIssue {
                        file: shard.file.clone(),
                        record: Some(i),
                        message: "record checksum mismatch".into(),
                    });
                }
                offset += len;
                i += 1;
            }
            if i != shard.records {
                issues.push(IntegrityIssue {
                    file: shard.file.clone(),
                    record: None,
                    message: format!("manifest lists {} records, shard frames {i}", shard.records),
                });
            }
        }
    }
    Ok(issues)
}

fn record_len_at(bytes: &[u8], offset: usize) -> Option<usize> {
    use crate::dataset::format::{FIXED_LEN, HEADER_LEN};
    let header = bytes.get(offset..offset + HEADER_LEN)?;
    let n = u32::from_le_bytes(header[20..24].try_into().ok()?) as usize;
    let len = FIXED_LEN + n;
    (offset + len <= bytes.len()).then_some(len)
}
