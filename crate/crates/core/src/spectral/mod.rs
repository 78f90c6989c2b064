//! Discrete fields on the periodic box `[-L/2, L/2)^d x [0, 2pi)`.
//!
//! Coefficients are stored row-major with the `y` index innermost and
//! frequencies in the usual wrapped order. The forward transform is
//! unnormalized, so a plane wave of amplitude `A` has coefficient `A * N`
//! where `N` is the total point count.

mod cube;
mod densities;
mod fft;
mod field;
mod grid;
mod hs_y;
mod norms;
mod snapshot;

use thiserror::Error;

pub use cube::{
    cube_cells, cube_density, cube_sup_mass, cube_sup_mass_rho, edge_cube_sup, localized_gn_check,
    GnCheck,
};
pub use densities::{densities, DensitySet};
pub use fft::{transform, transform_axes, Direction};
pub use field::{abs_pow, free_evolve, SpectralField};
pub use grid::Grid;
pub use hs_y::{difference_quotient_hs_y, fractional_constant, HsYNorms};
pub use norms::{
    fractional_leibniz_ratio, homogeneous_hs_y, hs_x_hgamma_y, lebesgue_norm, mixed_norm,
    mixed_norm_profile, sobolev_h1,
};
pub use snapshot::{read_snapshot, write_snapshot};

pub use rustfft::num_complex::Complex64;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("non-finite sample at flat index {0}")]
    NonFinite(usize),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),
    #[error("snapshot format: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SpectralError>;
