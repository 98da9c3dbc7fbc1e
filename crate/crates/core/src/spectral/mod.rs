//! Periodic grid, Fourier-coefficient fields and the multiplier operators
//! built on them.

mod field;
mod grid;
mod ops;

pub(crate) use field::truncate_2_3;
pub use field::SpectralField;
pub use grid::Grid;
pub use ops::{
    divergence, fractional_laplacian, gradient, lambda_s, pointwise_map, pointwise_product,
};
