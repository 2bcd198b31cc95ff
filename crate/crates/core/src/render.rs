//! Integer-only rasterization of panels into 80×80 greyscale images.
//!
//! All geometry is fixed point at 1/16384 px. A pixel is painted when its
//! centre falls inside the primitive; there is no anti-aliasing, so output is
//! bit-identical on every platform.
//!
//! Rendering constants:
//!
//! | quantity            | value                                        |
//! |---------------------|----------------------------------------------|
//! | background          | 255                                          |
//! | colour index `c`    | grey level `225 - 25c` (0 → 225, 9 → 0)      |
//! | size index `s`      | circumradius `(64 + 10s) / 16` px (4–9.625)  |
//! | slot centres        | catalog coordinates × 80, y flipped          |
//! | line half-width     | 0.75 px                                      |
//! | polygon tilt        | about 9 degrees clockwise                    |
//! | circle line radius  | 32 px around the panel centre                |
//! | diamond line        | through (40,6), (74,40), (40,74), (6,40)     |

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::catalog::{LineKind, ShapeKind};
use crate::panel::{LineSpec, PanelSpec, ShapeSpec};
use crate::record::PuzzleRecord;

pub const PANEL_SIZE: usize = 80;
pub const PANEL_PIXELS: usize = PANEL_SIZE * PANEL_SIZE;
pub const BACKGROUND: u8 = 255;

const UNIT: i64 = 16384;
const HALF: i64 = UNIT / 2;
const LINE_HALF_WIDTH: i64 = UNIT * 3 / 4;

/// Slot centres in pixels, in catalog order.
const SLOT_CENTRES: [(i64, i64); 9] = [
    (20, 20),
    (60, 20),
    (60, 60),
    (20, 60),
    (40, 40),
    (40, 60),
    (40, 20),
    (20, 40),
    (60, 40),
];

// Unit-circumradius vertices at 1/1024 scale, y down, starting at the top.
// Polygons are drawn tilted by about 9 degrees so that no edge is
// axis-aligned; otherwise consecutive sizes can cover the same pixel centres.
const TILT_COS: i64 = 1011;
const TILT_SIN: i64 = 160;
const TRIANGLE: [(i64, i64); 3] = [(0, -1024), (887, 512), (-887, 512)];
const SQUARE: [(i64, i64); 4] = [(-724, -724), (724, -724), (724, 724), (-724, 724)];
const PENTAGON: [(i64, i64); 5] = [(0, -1024), (974, -316), (602, 828), (-602, 828), (-974, -316)];
const HEXAGON: [(i64, i64); 6] = [
    (0, -1024),
    (887, -512),
    (887, 512),
    (0, 1024),
    (-887, 512),
    (-887, -512),
];
const OCTAGON: [(i64, i64); 8] = [
    (-392, -946),
    (392, -946),
    (946, -392),
    (946, 392),
    (392, 946),
    (-392, 946),
    (-946, 392),
    (-946, -392),
];
// Five points, inner radius 0.45.
const STAR: [(i64, i64); 10] = [
    (0, -1024),
    (271, -373),
    (974, -316),
    (438, 142),
    (602, 828),
    (0, 461),
    (-602, 828),
    (-438, 142),
    (-974, -316),
    (-271, -373),
];

pub fn grey_level(colour_idx: u8) -> u8 {
    225 - 25 * colour_idx.min(9)
}

/// Circumradius in 1/16 px.
pub fn radius_sixteenths(size_idx: u8) -> i64 {
    64 + 10 * size_idx.min(9) as i64
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PanelImage {
    pixels: Vec<u8>,
}

impl std::fmt::Debug for PanelImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ink = self.pixels.iter().filter(|p| **p != BACKGROUND).count();
        write!(f, "PanelImage({PANEL_SIZE}x{PANEL_SIZE}, {ink} ink pixels)")
    }
}

impl PanelImage {
    pub fn blank() -> Self {
        PanelImage {
            pixels: vec![BACKGROUND; PANEL_PIXELS],
        }
    }

    pub fn from_pixels(pixels: Vec<u8>) -> Option<Self> {
        (pixels.len() == PANEL_PIXELS).then_some(PanelImage { pixels })
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * PANEL_SIZE + x]
    }

    pub fn mean_intensity(&self) -> f64 {
        self.pixels.iter().map(|p| *p as f64).sum::<f64>() / PANEL_PIXELS as f64
    }

    fn paint(&mut self, level: u8, bbox: (i64, i64, i64, i64), inside: impl Fn(i64, i64) -> bool) {
        let size = PANEL_SIZE as i64;
        let (x0, y0, x1, y1) = bbox;
        for py in y0.max(0)..=y1.min(size - 1) {
            for px in x0.max(0)..=x1.min(size - 1) {
                if inside(px * UNIT + HALF, py * UNIT + HALF) {
                    self.pixels[(py * size + px) as usize] = level;
                }
            }
        }
    }
}

fn cross(o: (i64, i64), a: (i64, i64), p: (i64, i64)) -> i64 {
    (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0)
}

fn in_triangle(a: (i64, i64), b: (i64, i64), c: (i64, i64), p: (i64, i64)) -> bool {
    let d1 = cross(a, b, p);
    let d2 = cross(b, c, p);
    let d3 = cross(c, a, p);
    (d1 >= 0 && d2 >= 0 && d3 >= 0) || (d1 <= 0 && d2 <= 0 && d3 <= 0)
}

fn outline(kind: ShapeKind) -> &'static [(i64, i64)] {
    match kind {
        ShapeKind::Circle => &[],
        ShapeKind::Triangle => &TRIANGLE,
        ShapeKind::Square => &SQUARE,
        ShapeKind::Pentagon => &PENTAGON,
        ShapeKind::Hexagon => &HEXAGON,
        ShapeKind::Octagon => &OCTAGON,
        ShapeKind::Star => &STAR,
    }
}

fn draw_shape(img: &mut PanelImage, s: &ShapeSpec) {
    let (sx, sy) = SLOT_CENTRES[s.slot as usize];
    let centre = (sx * UNIT, sy * UNIT);
    let r16 = radius_sixteenths(s.size_idx);
    let r = r16 * 1024;
    let bbox = (
        (centre.0 - r) / UNIT - 1,
        (centre.1 - r) / UNIT - 1,
        (centre.0 + r) / UNIT + 1,
        (centre.1 + r) / UNIT + 1,
    );
    let level = grey_level(s.colour_idx);
    let kind = ShapeKind::ALL[s.type_idx as usize];
    if kind == ShapeKind::Circle {
        img.paint(level, bbox, |x, y| {
            let (dx, dy) = (x - centre.0, y - centre.1);
            dx * dx + dy * dy <= r * r
        });
        return;
    }
    // Every outline is star-shaped about its centre, so a triangle fan from
    // the centre covers it exactly.
    let verts: Vec<(i64, i64)> = outline(kind)
        .iter()
        .map(|(ux, uy)| {
            let rx = ux * TILT_COS - uy * TILT_SIN;
            let ry = ux * TILT_SIN + uy * TILT_COS;
            (centre.0 + r16 * rx / 1024, centre.1 + r16 * ry / 1024)
        })
        .collect();
    img.paint(level, bbox, |x, y| {
        (0..verts.len()).any(|i| in_triangle(centre, verts[i], verts[(i + 1) % verts.len()], (x, y)))
    });
}

fn near_segment(a: (i64, i64), b: (i64, i64), p: (i64, i64), half_width: i64) -> bool {
    let (dx, dy) = ((b.0 - a.0) as i128, (b.1 - a.1) as i128);
    let (px, py) = ((p.0 - a.0) as i128, (p.1 - a.1) as i128);
    let len2 = dx * dx + dy * dy;
    let t = px * dx + py * dy;
    if t < 0 || t > len2 {
        return false;
    }
    let c = px * dy - py * dx;
    let hw = half_width as i128;
    c * c <= hw * hw * len2
}

fn px(x: i64, y: i64) -> (i64, i64) {
    (x * UNIT, y * UNIT)
}

fn draw_line(img: &mut PanelImage, l: &LineSpec) {
    let level = grey_level(l.colour_idx);
    let full = (0, 0, PANEL_SIZE as i64 - 1, PANEL_SIZE as i64 - 1);
    let segments: Vec<((i64, i64), (i64, i64))> = match LineKind::ALL[l.type_idx as usize] {
        LineKind::DiagonalDown => vec![(px(0, 0), px(80, 80))],
        LineKind::DiagonalUp => vec![(px(0, 80), px(80, 0))],
        LineKind::Vertical => vec![(px(40, 0), px(40, 80))],
        LineKind::Horizontal => vec![(px(0, 40), px(80, 40))],
        LineKind::Diamond => {
            let c = [px(40, 6), px(74, 40), px(40, 74), px(6, 40)];
            (0..4).map(|i| (c[i], c[(i + 1) % 4])).collect()
        }
        LineKind::Circle => {
            let centre = px(40, 40);
            let (lo, hi) = (32 * UNIT - LINE_HALF_WIDTH, 32 * UNIT + LINE_HALF_WIDTH);
            img.paint(level, full, |x, y| {
                let (dx, dy) = (x - centre.0, y - centre.1);
                let d2 = dx * dx + dy * dy;
                lo * lo <= d2 && d2 <= hi * hi
            });
            return;
        }
    };
    img.paint(level, full, |x, y| {
        segments
            .iter()
            .any(|(a, b)| near_segment(*a, *b, (x, y), LINE_HALF_WIDTH))
    });
}

/// Lines first, then shapes on top.
pub fn render_panel(p: &PanelSpec) -> PanelImage {
    let mut img = PanelImage::blank();
    for l in &p.lines {
        draw_line(&mut img, l);
    }
    for s in &p.shapes {
        draw_shape(&mut img, s);
    }
    img
}

/// A greyscale image of arbitrary size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn filled(width: usize, height: usize, level: u8) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![level; width * height],
        }
    }

    pub fn from_panel(p: &PanelImage) -> Self {
        GrayImage {
            width: PANEL_SIZE,
            height: PANEL_SIZE,
            pixels: p.pixels().to_vec(),
        }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    fn set(&mut self, x: usize, y: usize, v: u8) {
        if x < self.width && y < self.height {
            self.pixels[y * self.width + x] = v;
        }
    }

    fn blit(&mut self, x0: usize, y0: usize, p: &PanelImage) {
        for y in 0..PANEL_SIZE {
            let row = &p.pixels()[y * PANEL_SIZE..(y + 1) * PANEL_SIZE];
            let start = (y0 + y) * self.width + x0;
            self.pixels[start..start + PANEL_SIZE].copy_from_slice(row);
        }
    }

    fn frame(&mut self, x0: usize, y0: usize, w: usize, h: usize, v: u8) {
        for x in x0..x0 + w {
            self.set(x, y0, v);
            self.set(x, y0 + h - 1, v);
        }
        for y in y0..y0 + h {
            self.set(x0, y, v);
            self.set(x0 + w - 1, y, v);
        }
    }

    pub fn write_pgm<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, image::ImageError> {
        let img = image::GrayImage::from_raw(self.width as u32, self.height as u32, self.pixels.clone())
            .expect("pixel buffer matches dimensions");
        let mut out = io::Cursor::new(Vec::new());
        img.write_to(&mut out, image::ImageFormat::Png)?;
        Ok(out.into_inner())
    }
}

// 3×5 digit glyphs, one row per entry, bit 2 = leftmost column.
const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

fn draw_digit(img: &mut GrayImage, x0: usize, y0: usize, d: usize) {
    for (row, bits) in DIGITS[d].iter().enumerate() {
        for col in 0..3 {
            if bits & (0b100 >> col) != 0 {
                for dy in 0..2 {
                    for dx in 0..2 {
                        img.set(x0 + col * 2 + dx, y0 + row * 2 + dy, 0);
                    }
                }
            }
        }
    }
}

/// Sheet layout: 3×3 context (bottom-right cell left blank and framed)
/// centred above a 2×4 strip of candidates labelled 1–8 in record order.
pub mod sheet {
    pub const MARGIN: usize = 8;
    pub const GAP: usize = 4;
    pub const LABEL_HEIGHT: usize = 12;
    pub const SEPARATOR: usize = 16;
    pub const BACKGROUND: u8 = 170;
    pub const CONTEXT_WIDTH: usize = 3 * super::PANEL_SIZE + 2 * GAP;
    pub const STRIP_WIDTH: usize = 4 * super::PANEL_SIZE + 3 * GAP;
    pub const WIDTH: usize = STRIP_WIDTH + 2 * MARGIN;
    pub const CONTEXT_X: usize = MARGIN + (STRIP_WIDTH - CONTEXT_WIDTH) / 2;
    pub const CONTEXT_Y: usize = MARGIN;
    pub const STRIP_Y: usize = CONTEXT_Y + CONTEXT_WIDTH + SEPARATOR;
    pub const STRIP_ROW: usize = LABEL_HEIGHT + super::PANEL_SIZE + GAP;
    pub const HEIGHT: usize = STRIP_Y + 2 * STRIP_ROW - GAP + MARGIN;

    pub fn context_origin(k: usize) -> (usize, usize) {
        let step = super::PANEL_SIZE + GAP;
        (CONTEXT_X + (k % 3) * step, CONTEXT_Y + (k / 3) * step)
    }

    pub fn candidate_origin(i: usize) -> (usize, usize) {
        let step = super::PANEL_SIZE + GAP;
        (MARGIN + (i % 4) * step, STRIP_Y + (i / 4) * STRIP_ROW + LABEL_HEIGHT)
    }
}

pub fn render_puzzle_sheet(rec: &PuzzleRecord) -> GrayImage {
    let images: Vec<PanelImage> = if rec.images.len() == 16 {
        rec.images.clone()
    } else {
        rec.context.iter().chain(&rec.candidates).map(render_panel).collect()
    };
    let mut img = GrayImage::filled(sheet::WIDTH, sheet::HEIGHT, sheet::BACKGROUND);
    for (k, panel) in images[..8].iter().enumerate() {
        let (x, y) = sheet::context_origin(k);
        img.blit(x, y, panel);
    }
    let (bx, by) = sheet::context_origin(8);
    img.frame(bx, by, PANEL_SIZE, PANEL_SIZE, 0);
    for (i, panel) in images[8..].iter().enumerate() {
        let (x, y) = sheet::candidate_origin(i);
        img.blit(x, y, panel);
        draw_digit(&mut img, x + PANEL_SIZE / 2 - 3, y - sheet::LABEL_HEIGHT + 1, i + 1);
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use sha2::{Digest, Sha256};

    fn one_shape(slot: u8, type_idx: u8, size_idx: u8, colour_idx: u8) -> PanelSpec {
        PanelSpec::new(vec![ShapeSpec { slot, type_idx, size_idx, colour_idx }], vec![])
    }

    #[test]
    fn empty_panel_is_background() {
        let img = render_panel(&PanelSpec::default());
        assert!(img.pixels().iter().all(|p| *p == BACKGROUND));
    }

    #[test]
    fn centred_max_circle_extent() {
        let img = render_panel(&one_shape(4, 0, 9, 9));
        let row: Vec<usize> = (0..PANEL_SIZE).filter(|x| img.get(*x, 40) == 0).collect();
        assert_eq!(row.first(), Some(&30));
        assert_eq!(row.last(), Some(&49));
        let col: Vec<usize> = (0..PANEL_SIZE).filter(|y| img.get(40, *y) == 0).collect();
        assert_eq!((col[0], *col.last().unwrap()), (30, 49));
        // Symmetric about the centre.
        for y in 0..PANEL_SIZE {
            for x in 0..PANEL_SIZE {
                assert_eq!(img.get(x, y), img.get(79 - x, y));
            }
        }
    }

    #[test]
    fn deterministic() {
        let p = PanelSpec::new(
            vec![
                ShapeSpec { slot: 0, type_idx: 6, size_idx: 5, colour_idx: 3 },
                ShapeSpec { slot: 4, type_idx: 1, size_idx: 9, colour_idx: 7 },
            ],
            vec![LineSpec { type_idx: 4, colour_idx: 2 }],
        );
        assert_eq!(render_panel(&p), render_panel(&p));
    }

    #[test]
    fn golden_hash() {
        let p = PanelSpec::new(
            (0..7)
                .map(|k| ShapeSpec { slot: k, type_idx: k, size_idx: k + 2, colour_idx: k + 1 })
                .collect(),
            (0..6).map(|k| LineSpec { type_idx: k, colour_idx: k }).collect(),
        );
        let digest = hex::encode(Sha256::digest(render_panel(&p).pixels()));
        assert_eq!(digest, GOLDEN);
    }

    const GOLDEN: &str = "f96cb3d133df7f3e378f3871f0c163f150e0a71d2e39fc8e8fb367885c8038d7";

    #[test]
    fn adjacent_values_are_distinguishable() {
        for kind in 0..7u8 {
            for size in 0..9u8 {
                assert_ne!(
                    render_panel(&one_shape(4, kind, size, 5)),
                    render_panel(&one_shape(4, kind, size + 1, 5)),
                    "type {kind} size {size}"
                );
            }
            for colour in 0..9u8 {
                assert_ne!(
                    render_panel(&one_shape(4, kind, 0, colour)),
                    render_panel(&one_shape(4, kind, 0, colour + 1))
                );
            }
        }
        for kind in 0..6u8 {
            let a = render_panel(&one_shape(4, kind, 0, 3));
            let b = render_panel(&one_shape(4, kind + 1, 0, 3));
            assert_ne!(a, b, "shape type {kind}");
        }
        for slot in 0..8u8 {
            assert_ne!(render_panel(&one_shape(slot, 0, 0, 0)), render_panel(&one_shape(slot + 1, 0, 0, 0)));
        }
        let line = |t: u8, c: u8| PanelSpec::new(vec![], vec![LineSpec { type_idx: t, colour_idx: c }]);
        for t in 0..5u8 {
            assert_ne!(render_panel(&line(t, 4)), render_panel(&line(t + 1, 4)));
        }
        for c in 0..9u8 {
            assert_ne!(render_panel(&line(0, c)), render_panel(&line(0, c + 1)));
        }
        let count = |n: u8| {
            PanelSpec::new(
                (0..n).map(|slot| ShapeSpec { slot, type_idx: 0, size_idx: 4, colour_idx: 4 }).collect(),
                vec![],
            )
        };
        for n in 0..9u8 {
            assert_ne!(render_panel(&count(n)), render_panel(&count(n + 1)));
        }
    }

    #[test]
    fn darker_with_higher_colour_index() {
        for kind in 0..7u8 {
            let means: Vec<f64> = (0..10u8)
                .map(|c| render_panel(&one_shape(4, kind, 9, c)).mean_intensity())
                .collect();
            assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
        }
    }

    #[test]
    fn pgm_header() {
        let img = GrayImage::from_panel(&PanelImage::blank());
        let mut buf = Vec::new();
        img.write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n80 80\n255\n"));
        assert_eq!(buf.len(), 13 + PANEL_PIXELS);
        let png = img.encode_png().unwrap();
        assert!(png.starts_with(b"\x89PNG"));
    }
}
