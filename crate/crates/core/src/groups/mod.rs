//! Finite Abelian groups, concrete nilpotent groups and their quotient structure.

pub mod abelian;
pub mod descriptor;
pub mod nilpotent;

pub use abelian::{GeneratorMultiset, GroupElement, InvariantFactorGroup, ScaledSubgroup, SubgroupClass, SubgroupLattice};
pub use descriptor::GroupDescriptor;
pub use nilpotent::{GroupLaw, Level, NilpotentPresentation};
