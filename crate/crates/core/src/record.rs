use serde::{Deserialize, Serialize};

use crate::catalog::Structure;
use crate::dataset::meta::MetaTarget;
use crate::panel::PanelSpec;
use crate::regimes::{RegimeId, Split, ValueUsage};
use crate::relations::Orientation;
use crate::render::{render_panel, PanelImage};

/// One generated puzzle.
///
/// `images` holds the 16 rendered panels (context then candidates) for
/// records produced by `Generator::generate_puzzle`; symbolic-only records
/// leave it empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzleRecord {
    pub seed: u64,
    pub regime: RegimeId,
    pub split: Split,
    pub distracting: bool,
    pub structure: Structure,
    /// Orientation of each structure triple, parallel to `structure`.
    pub orientations: Vec<Orientation>,
    pub context: Vec<PanelSpec>,
    pub candidates: Vec<PanelSpec>,
    pub answer_index: u8,
    pub meta_target: MetaTarget,
    #[serde(skip)]
    pub images: Vec<PanelImage>,
}

impl PuzzleRecord {
    /// The full 3×3 matrix with the correct answer in place.
    pub fn matrix(&self) -> Vec<PanelSpec> {
        let mut m = self.context.clone();
        m.push(self.candidates[self.answer_index as usize].clone());
        m
    }

    pub fn panels(&self) -> impl Iterator<Item = &PanelSpec> {
        self.context.iter().chain(&self.candidates)
    }

    pub fn value_usage(&self) -> ValueUsage {
        ValueUsage::from_panels(self.panels())
    }

    pub fn render(&mut self) {
        self.images = self.panels().map(render_panel).collect();
    }

    pub fn rendered(mut self) -> Self {
        self.render();
        self
    }

    /// Whether the stored pixels match a fresh render of the symbolic panels.
    pub fn pixels_match_symbols(&self) -> bool {
        self.images.len() == 16
            && self
                .panels()
                .zip(&self.images)
                .all(|(p, img)| render_panel(p) == *img)
    }
}
