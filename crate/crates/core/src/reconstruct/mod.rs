//! Reconstruction of the jump function from finitely many coefficients.
//!
//! The pipeline is: expansion coefficients `c_n` in extended precision,
//! partial energies `M_m`, plateau detection to pick the truncation index
//! `m_t`, and the truncated Laguerre-type expansion sampled on a grid.
//! Independent checks (transforms of the reconstruction, density, growth of
//! the energies past the plateau) live in [`checks`].

pub mod checks;
mod expansion;
mod plateau;
mod report;
mod synthesis;

pub use checks::{
    cauchy_check, density_check, energy_growth_slope, l2_error, l2_error_quadrature,
    mellin_of_reconstruction, plancherel_sides, series_sum, DensityCheck, ErrorMetrics,
};
pub use expansion::{basis_phi, reconstruct_jump, JumpExpansion, SampleGrid};
pub use plateau::{detect_plateau, relative_growth, PlateauDetection, PlateauMode, PlateauPolicy};
pub use report::{
    run_reconstruction, samples_csv, ReconstructOptions, ReconstructionReport, Sample,
    SCHEMA_VERSION,
};
pub use synthesis::{
    partial_energies, rotated_sums, synthesize_at, synthesize_coefficients, Synthesis,
    DEFAULT_DOUBLINGS, STABILITY_FLOOR, STABILITY_TOL,
};
