//! Exact mixing-distance curves for walks on concrete Cayley graphs.

pub mod curve;
pub mod isoperimetric;
pub mod kernel;
pub mod spectrum;

pub use curve::{default_grid, l2_distance, mixing_time, separation_distance, tv_distance, DistanceCurve, MixingTime};
pub use isoperimetric::isoperimetric_exhaustive;
pub use kernel::{abelian_kernel, heat_kernel_abelian, heat_kernel_general, DistributionVector, KernelMethod};
pub use spectrum::{spectrum, SpectralTable};
