//! Exact-constant checks, experiment drivers, the verification suite and the
//! command-line interface.

pub mod checks;
pub mod cli;
pub mod experiments;
pub mod report;
pub mod verify;

pub use checks::{
    carry_bound_check, carry_sweep, crt_density, density_check, density_sweep, gap_structure_check,
};
pub use experiments::{
    pseudorandomness_experiment, spectrum_experiment, ExperimentConfig, OutputFormat,
    PseudorandomnessReport, SpectrumReport, Tabular,
};
pub use report::{CheckReport, FailureRecord};
pub use verify::{verify_all, VerifyConfig, VerifyReport};
