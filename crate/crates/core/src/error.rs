use thiserror::Error;

use crate::catalog::{AttributeType, ObjectType, RelationType, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("[{relation:?}, {object:?}, {attribute:?}] is not a viable triple")]
    IncompatibleTriple {
        relation: RelationType,
        object: ObjectType,
        attribute: AttributeType,
    },
    #[error("structure must hold 1 to 4 triples, got {0}")]
    StructureSize(usize),
    #[error("duplicate triple {0}")]
    DuplicateTriple(Triple),
    #[error("number and position triples cannot share a structure")]
    NumberPositionClash,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("cannot realise {triple}: {reason}")]
    InfeasibleRealization { triple: Triple, reason: String },
    #[error("no structure passed the regime filter after {attempts} attempts")]
    FilterExhausted { attempts: usize },
    #[error("could not avoid spurious relations after {attempts} attempts")]
    SpuriousUnavoidable { attempts: usize },
    #[error("found only {found} of 7 inconsistent foils after {attempts} attempts")]
    FoilExhausted { found: usize, attempts: usize },
    #[error("invalid generator configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("record format error at byte {offset}: {message}")]
pub struct FormatError {
    pub offset: u64,
    pub message: String,
}

impl FormatError {
    pub fn new(offset: u64, message: impl Into<String>) -> Self {
        FormatError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
