//! Numerical evaluation of the lower and upper bound machinery.

pub mod gcd;
pub mod lower;
pub mod mc;
pub mod nilpotent;
pub mod typicality;
pub mod wilson;

pub use gcd::{gcd_distribution_mc, modified_l2_estimate, BoundReport, GcdDistribution, GammaComponent};
pub use lower::{gaussian_tail, lower_bound_value, q_distribution_mc, LowerBoundEstimate};
pub use nilpotent::{compare_nilpotent_abelian, prod_decomp_check, DecompCase, NilpotentComparison};
pub use typicality::{build_typicality, Strategy, TypicalityParams};
pub use wilson::{wilson_scan, WilsonScan};
