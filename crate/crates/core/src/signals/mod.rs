//! Deterministic signal math: complex vectors, truncated Toeplitz convolution,
//! the DFT, frequency responses, and the H-infinity norm.

mod dft;
mod hinf;
mod opnorm;
mod toeplitz;
mod vector;

pub use dft::{dft, dft_matrix, dft_norm_lower_bound, freq_response, idft, DftMatrix};
pub use hinf::{grid_max, grid_sup_gap, hinf_norm, hinf_norm_with, HinfOptions, HinfResult};
pub use opnorm::{operator_norm, OPNORM_MAX_ITERATIONS};
pub use toeplitz::{convolve_truncated, toeplitz_matrix, ToeplitzSection};
pub use vector::{adjoint_reverse, time_reverse, ComplexVec, FirFilter};

pub(crate) use toeplitz::toeplitz_of_vec;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;

/// Whether filters, inputs and noise are complex or constrained to the reals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Complex,
    Real,
}
