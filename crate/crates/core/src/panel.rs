//! Symbolic panel content and the extraction of attribute cells from it.

use serde::{Deserialize, Serialize};

use crate::catalog::{AttributeType, Dimension, ObjectType};
use crate::relations::AttributeGrid;
use crate::valueset::ValueSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub slot: u8,
    pub type_idx: u8,
    pub size_idx: u8,
    pub colour_idx: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineSpec {
    pub type_idx: u8,
    pub colour_idx: u8,
}

/// One panel: shapes sorted by slot, lines sorted by type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PanelSpec {
    pub shapes: Vec<ShapeSpec>,
    pub lines: Vec<LineSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PanelError {
    #[error("slot {0} out of range")]
    SlotOutOfRange(u8),
    #[error("two shapes share slot {0}")]
    DuplicateSlot(u8),
    #[error("{0} value {1} out of range")]
    ValueOutOfRange(Dimension, u8),
    #[error("line type {0} drawn twice")]
    DuplicateLineType(u8),
}

impl PanelSpec {
    pub fn new(mut shapes: Vec<ShapeSpec>, mut lines: Vec<LineSpec>) -> Self {
        shapes.sort();
        lines.sort();
        PanelSpec { shapes, lines }
    }

    /// Re-sort into canonical order after in-place edits.
    pub fn normalize(&mut self) {
        self.shapes.sort();
        self.lines.sort();
    }

    pub fn validate(&self) -> Result<(), PanelError> {
        let mut slots = ValueSet::EMPTY;
        for s in &self.shapes {
            if s.slot >= 9 {
                return Err(PanelError::SlotOutOfRange(s.slot));
            }
            if slots.contains(s.slot) {
                return Err(PanelError::DuplicateSlot(s.slot));
            }
            slots.insert(s.slot);
            for (dim, v) in [
                (Dimension::SHAPE_TYPE, s.type_idx),
                (Dimension::SHAPE_SIZE, s.size_idx),
                (Dimension::SHAPE_COLOUR, s.colour_idx),
            ] {
                if v as usize >= dim.domain().len() {
                    return Err(PanelError::ValueOutOfRange(dim, v));
                }
            }
        }
        let mut types = ValueSet::EMPTY;
        for l in &self.lines {
            if l.type_idx as usize >= Dimension::LINE_TYPE.domain().len() {
                return Err(PanelError::ValueOutOfRange(Dimension::LINE_TYPE, l.type_idx));
            }
            if l.colour_idx as usize >= Dimension::LINE_COLOUR.domain().len() {
                return Err(PanelError::ValueOutOfRange(Dimension::LINE_COLOUR, l.colour_idx));
            }
            if types.contains(l.type_idx) {
                return Err(PanelError::DuplicateLineType(l.type_idx));
            }
            types.insert(l.type_idx);
        }
        Ok(())
    }

    /// The cell this panel contributes to the grid of `dim`. Scalar
    /// attributes are lifted to the set of distinct values present; number is
    /// the singleton shape count.
    pub fn cell(&self, dim: Dimension) -> ValueSet {
        match (dim.object, dim.attribute) {
            (ObjectType::Shape, AttributeType::Size) => {
                self.shapes.iter().map(|s| s.size_idx).collect()
            }
            (ObjectType::Shape, AttributeType::Colour) => {
                self.shapes.iter().map(|s| s.colour_idx).collect()
            }
            (ObjectType::Shape, AttributeType::Type) => {
                self.shapes.iter().map(|s| s.type_idx).collect()
            }
            (ObjectType::Shape, AttributeType::Position) => {
                self.shapes.iter().map(|s| s.slot).collect()
            }
            (ObjectType::Shape, AttributeType::Number) => {
                ValueSet::singleton(self.shapes.len() as u8)
            }
            (ObjectType::Line, AttributeType::Colour) => {
                self.lines.iter().map(|l| l.colour_idx).collect()
            }
            (ObjectType::Line, AttributeType::Type) => {
                self.lines.iter().map(|l| l.type_idx).collect()
            }
            _ => ValueSet::EMPTY,
        }
    }

    /// Colour and size indices used anywhere in the panel.
    pub fn ordered_usage(&self) -> (ValueSet, ValueSet) {
        let colours = self
            .shapes
            .iter()
            .map(|s| s.colour_idx)
            .chain(self.lines.iter().map(|l| l.colour_idx))
            .collect();
        let sizes = self.shapes.iter().map(|s| s.size_idx).collect();
        (colours, sizes)
    }
}

/// Grid of `dim` over nine panels (row-major).
pub fn extract_grid(panels: &[PanelSpec], dim: Dimension) -> AttributeGrid {
    assert_eq!(panels.len(), 9, "a matrix has nine panels");
    AttributeGrid::new(std::array::from_fn(|k| panels[k].cell(dim)))
}

/// Grid of `dim` over eight context panels; the bottom-right cell is empty.
pub fn extract_context_grid(context: &[PanelSpec], dim: Dimension) -> AttributeGrid {
    assert_eq!(context.len(), 8, "a context has eight panels");
    AttributeGrid::new(std::array::from_fn(|k| {
        if k < 8 {
            context[k].cell(dim)
        } else {
            ValueSet::EMPTY
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel() -> PanelSpec {
        PanelSpec::new(
            vec![
                ShapeSpec { slot: 4, type_idx: 2, size_idx: 3, colour_idx: 5 },
                ShapeSpec { slot: 0, type_idx: 2, size_idx: 6, colour_idx: 5 },
            ],
            vec![LineSpec { type_idx: 3, colour_idx: 1 }],
        )
    }

    #[test]
    fn cells() {
        let p = panel();
        assert_eq!(p.shapes[0].slot, 0);
        assert_eq!(p.cell(Dimension::SHAPE_NUMBER), ValueSet::singleton(2));
        assert_eq!(p.cell(Dimension::SHAPE_POSITION).to_vec(), vec![0, 4]);
        assert_eq!(p.cell(Dimension::SHAPE_SIZE).to_vec(), vec![3, 6]);
        assert_eq!(p.cell(Dimension::SHAPE_COLOUR), ValueSet::singleton(5));
        assert_eq!(p.cell(Dimension::LINE_TYPE), ValueSet::singleton(3));
        assert_eq!(PanelSpec::default().cell(Dimension::SHAPE_NUMBER), ValueSet::singleton(0));
    }

    #[test]
    fn validation() {
        assert!(panel().validate().is_ok());
        let mut p = panel();
        p.shapes[1].slot = 0;
        assert_eq!(p.validate(), Err(PanelError::DuplicateSlot(0)));
        let mut p = panel();
        p.shapes[0].type_idx = 7;
        assert!(matches!(p.validate(), Err(PanelError::ValueOutOfRange(..))));
        let mut p = panel();
        p.lines.push(LineSpec { type_idx: 3, colour_idx: 0 });
        assert_eq!(p.validate(), Err(PanelError::DuplicateLineType(3)));
    }
}
