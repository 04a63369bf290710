//! Dense complex linear algebra and the quantum-information primitives built
//! on it: tensor products, partial traces, spectral functions, root fidelity,
//! trace norm and minimum-error discrimination.
//!
//! Fidelity is the root fidelity `F = Tr √(√ρ σ √ρ)` throughout, so that for
//! pure states it is `|⟨ψ|φ⟩|`.

mod discrimination;
mod linalg;
mod matrix;
mod state;

pub use discrimination::{
    discrimination_error, helstrom_error, helstrom_measurement, square_root_measurement, Povm,
    COMPLETENESS_TOL, PRIOR_TOL,
};
pub use linalg::{
    fidelity, hermitian_eigensystem, psd_sqrt, psd_sqrt_matrix, span_coordinates, trace_norm,
    Eigensystem, NEGATIVE_EIGEN_FLOOR,
};
pub use matrix::{inner, kron, kron_vec, ComplexMatrix};
pub use state::{
    partial_trace, random_density_operator, random_hermitian, random_pure_state, DensityOperator,
    PureStateVector, HERMITIAN_TOL, NORM_TOL, PSD_TOL, TRACE_TOL,
};

pub use num_complex::Complex64;
