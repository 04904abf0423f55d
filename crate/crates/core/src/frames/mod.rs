//! Gabor frames: windows, lattices, analysis and synthesis, frame bounds and
//! canonical dual windows on periodic grids.

mod gabor;
mod lattice;
mod operator;
mod window;

pub use gabor::{
    analysis, analysis_with, grid_steps, shift_sampled, synthesis, time_frequency_shift, GridSteps,
};
pub use lattice::{CoefficientArray, Lattice, LatticeIndex};
pub use operator::{
    dual_window, frame_bounds, frame_bounds_with, EigenConfig, FrameBounds, FrameOperator,
    DUAL_TOLERANCE, NOT_A_FRAME,
};
pub use window::{hermite_function, Window, WindowKind};
