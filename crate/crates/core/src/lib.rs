pub mod catalog;
pub mod dataset;
pub mod error;
pub mod generator;
pub mod panel;
pub mod record;
pub mod regimes;
pub mod relations;
pub mod render;
pub mod solver;
pub mod valueset;
