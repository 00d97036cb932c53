//! Chart-corpus factory and evaluation toolkit.
//!
//! Synthesizes visually diverse SVG charts from tables, recovers tables
//! from SVG charts, emits pretraining task records, builds distillation
//! prompts and scores chart-model outputs.

pub mod corpus;
pub mod distill;
pub mod extract;
pub mod geom;
pub mod metrics;
pub mod number;
pub mod synth;
pub mod table;
pub mod tasks;
