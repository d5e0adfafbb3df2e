//! Experiment harnesses, file formats and the command-line interface built
//! on `pacdmc-core`.

pub mod cli;
pub mod exact_par;
pub mod files;
pub mod manifest;
pub mod montecarlo;
pub mod output;
