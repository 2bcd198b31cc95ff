//! Binary record format, version 1. All integers little-endian.
//!
//! | offset  | size    | field                                              |
//! |---------|---------|----------------------------------------------------|
//! | 0       | 4       | magic `PGMR`                                       |
//! | 4       | 2       | format version (1)                                 |
//! | 6       | 1       | regime tag (0–7)                                   |
//! | 7       | 1       | split tag (0 train, 1 validation, 2 test)          |
//! | 8       | 1       | flags; bit 0 = distracting, other bits zero        |
//! | 9       | 1       | answer index (0–7)                                 |
//! | 10      | 2       | meta-target, bit `i` = element `i` of the string   |
//! | 12      | 8       | seed                                               |
//! | 20      | 4       | sidecar length `n` in bytes                        |
//! | 24      | 102400  | 16 panels × 6400 pixels, row-major, 8 context      |
//! |         |         | panels (row-major matrix order) then 8 candidates  |
//! | 102424  | `n`     | UTF-8 JSON sidecar: structure, orientations,       |
//! |         |         | context and candidate panel specs                  |
//!
//! A record therefore occupies exactly `102424 + n` bytes. Reading
//! re-renders the sidecar panels and rejects any pixel mismatch.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::catalog::Structure;
use crate::dataset::meta::MetaTarget;
use crate::error::{DatasetError, FormatError};
use crate::panel::PanelSpec;
use crate::record::PuzzleRecord;
use crate::regimes::{RegimeId, Split};
use crate::relations::Orientation;
use crate::render::{render_panel, PanelImage, PANEL_PIXELS};

pub const MAGIC: [u8; 4] = *b"PGMR";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 24;
pub const PANEL_COUNT: usize = 16;
pub const PIXEL_BYTES: usize = PANEL_COUNT * PANEL_PIXELS;
/// Bytes of a record excluding its sidecar.
pub const FIXED_LEN: usize = HEADER_LEN + PIXEL_BYTES;
/// Upper bound on the sidecar, as a corruption guard.
pub const MAX_SIDECAR_LEN: u32 = 1 << 20;

const FLAG_DISTRACTING: u8 = 1;

#[derive(Serialize, Deserialize)]
struct Sidecar {
    structure: Structure,
    orientations: Vec<Orientation>,
    context: Vec<PanelSpec>,
    candidates: Vec<PanelSpec>,
}

/// Serialise one record; returns the number of bytes written. Unrendered
/// records are rendered on the fly.
pub fn write_record<W: Write>(rec: &PuzzleRecord, sink: &mut W) -> Result<usize, DatasetError> {
    let bytes = encode_record(rec)?;
    sink.write_all(&bytes)?;
    Ok(bytes.len())
}

pub fn encode_record(rec: &PuzzleRecord) -> Result<Vec<u8>, DatasetError> {
    if rec.context.len() != 8 || rec.candidates.len() != 8 {
        return Err(DatasetError::InvalidRecord("records need 8 context and 8 candidate panels".into()));
    }
    let sidecar = serde_json::to_vec(&Sidecar {
        structure: rec.structure.clone(),
        orientations: rec.orientations.clone(),
        context: rec.context.clone(),
        candidates: rec.candidates.clone(),
    })?;
    let mut out = Vec::with_capacity(FIXED_LEN + sidecar.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(rec.regime.tag());
    out.push(rec.split.tag());
    out.push(if rec.distracting { FLAG_DISTRACTING } else { 0 });
    out.push(rec.answer_index);
    out.extend_from_slice(&rec.meta_target.bits().to_le_bytes());
    out.extend_from_slice(&rec.seed.to_le_bytes());
    out.extend_from_slice(&(sidecar.len() as u32).to_le_bytes());
    if rec.images.len() == PANEL_COUNT {
        for img in &rec.images {
            out.extend_from_slice(img.pixels());
        }
    } else {
        for p in rec.panels() {
            out.extend_from_slice(render_panel(p).pixels());
        }
    }
    out.extend_from_slice(&sidecar);
    Ok(out)
}

struct Cursor<'a, R> {
    inner: &'a mut R,
    offset: u64,
}

impl<R: Read> Cursor<'_, R> {
    fn take(&mut self, buf: &mut [u8], what: &str) -> Result<(), FormatError> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => {
                    return Err(FormatError::new(
                        self.offset + filled as u64,
                        format!("truncated {what}: expected {} bytes, got {filled}", buf.len()),
                    ))
                }
                Ok(n) => filled += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(FormatError::new(self.offset + filled as u64, e.to_string())),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }
}

/// Read and fully verify one record. Returns `Ok(None)` on a clean end of
/// stream before the first byte.
pub fn read_record<R: Read>(source: &mut R) -> Result<Option<PuzzleRecord>, FormatError> {
    read_record_at(source, 0)
}

/// As `read_record`, reporting offsets relative to `base`.
pub fn read_record_at<R: Read>(source: &mut R, base: u64) -> Result<Option<PuzzleRecord>, FormatError> {
    let mut first = [0u8; 1];
    loop {
        match source.read(&mut first) {
            Ok(0) => return Ok(None),
            Ok(_) => break,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(FormatError::new(base, e.to_string())),
        }
    }
    let mut header = [0u8; HEADER_LEN];
    header[0] = first[0];
    let mut cur = Cursor { inner: source, offset: base + 1 };
    cur.take(&mut header[1..], "header")?;
    let at = |o: usize| base + o as u64;

    if header[0..4] != MAGIC {
        return Err(FormatError::new(at(0), "bad magic"));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != FORMAT_VERSION {
        return Err(FormatError::new(at(4), format!("unsupported version {version}")));
    }
    let regime = RegimeId::from_tag(header[6])
        .ok_or_else(|| FormatError::new(at(6), format!("unknown regime tag {}", header[6])))?;
    let split = Split::from_tag(header[7])
        .ok_or_else(|| FormatError::new(at(7), format!("unknown split tag {}", header[7])))?;
    if header[8] & !FLAG_DISTRACTING != 0 {
        return Err(FormatError::new(at(8), format!("reserved flag bits set: {:#04x}", header[8])));
    }
    let distracting = header[8] & FLAG_DISTRACTING != 0;
    let answer_index = header[9];
    if answer_index >= 8 {
        return Err(FormatError::new(at(9), format!("answer index {answer_index} out of range")));
    }
    let meta_bits = u16::from_le_bytes([header[10], header[11]]);
    if meta_bits >> 12 != 0 {
        return Err(FormatError::new(at(10), format!("meta-target {meta_bits:#06x} exceeds 12 bits")));
    }
    let seed = u64::from_le_bytes(header[12..20].try_into().unwrap());
    let sidecar_len = u32::from_le_bytes(header[20..24].try_into().unwrap());
    if sidecar_len > MAX_SIDECAR_LEN {
        return Err(FormatError::new(at(20), format!("sidecar length {sidecar_len} too large")));
    }

    let mut pixels = vec![0u8; PIXEL_BYTES];
    cur.take(&mut pixels, "pixel payload")?;
    let mut sidecar = vec![0u8; sidecar_len as usize];
    cur.take(&mut sidecar, "sidecar")?;
    let side: Sidecar = serde_json::from_slice(&sidecar)
        .map_err(|e| FormatError::new(at(FIXED_LEN), format!("sidecar: {e}")))?;
    if side.context.len() != 8 || side.candidates.len() != 8 {
        return Err(FormatError::new(at(FIXED_LEN), "sidecar must hold 8 context and 8 candidate panels"));
    }
    if side.orientations.len() != side.structure.len() {
        return Err(FormatError::new(at(FIXED_LEN), "orientation count differs from structure size"));
    }
    for (i, p) in side.context.iter().chain(&side.candidates).enumerate() {
        if let Err(e) = p.validate() {
            return Err(FormatError::new(at(FIXED_LEN), format!("sidecar panel {i}: {e}")));
        }
    }

    let images: Vec<PanelImage> = pixels
        .chunks_exact(PANEL_PIXELS)
        .map(|c| PanelImage::from_pixels(c.to_vec()).unwrap())
        .collect();
    for (i, (p, img)) in side.context.iter().chain(&side.candidates).zip(&images).enumerate() {
        let fresh = render_panel(p);
        if let Some(k) = fresh.pixels().iter().zip(img.pixels()).position(|(a, b)| a != b) {
            return Err(FormatError::new(
                at(HEADER_LEN + i * PANEL_PIXELS + k),
                format!("panel {i} pixels disagree with its sidecar"),
            ));
        }
    }

    Ok(Some(PuzzleRecord {
        seed,
        regime,
        split,
        distracting,
        structure: side.structure,
        orientations: side.orientations,
        context: side.context,
        candidates: side.candidates,
        answer_index,
        meta_target: MetaTarget::from_bits(meta_bits),
        images,
    }))
}

/// Decode a record from a byte slice that must contain exactly one record.
pub fn decode_record(bytes: &[u8]) -> Result<PuzzleRecord, FormatError> {
    let mut slice = bytes;
    let rec = read_record(&mut slice)?.ok_or_else(|| FormatError::new(0, "empty input"))?;
    if !slice.is_empty() {
        return Err(FormatError::new((bytes.len() - slice.len()) as u64, "trailing bytes"));
    }
    Ok(rec)
}
