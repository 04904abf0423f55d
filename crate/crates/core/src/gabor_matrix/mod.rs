//! Gabor matrices of Fourier multipliers, their off-diagonal decay and the
//! sparsity of their columns.

mod decay;
mod matrix;
mod quadrature;

pub use decay::{
    bound_column, column_decay, figure_data, matrix_column_decay, offdiag_candidates, offdiag_fit,
    offdiag_samples, sorted_exponent, sorted_magnitudes, wave_bound, ColumnDecay, FigureKind,
    FigureParams, FigureSeries, OffdiagFit, ENTRY_FLOOR,
};
pub use matrix::{
    assemble, assemble_column, assemble_derivative, assemble_multiplier, matrix_entry,
    AssemblyOptions, EntryValue, GaborColumn, GaborMatrix, MatrixMetadata, Mode,
};
pub use quadrature::{QuadratureConfig, SpectralWindow, PRODUCT_CUTOFF};
