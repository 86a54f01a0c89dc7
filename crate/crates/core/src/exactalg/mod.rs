//! Exact integer linear algebra and finitely generated abelian groups.

pub mod group;
pub mod lattice;
pub mod matrix;
pub mod snf;
pub mod subgroup;

pub use group::{invert_unimodular, FpGroup, GroupHom, Invariants};
pub use lattice::{column_echelon, integer_kernel, unit, Lattice};
pub use matrix::{int, int_vec, IntMatrix, IntVector};
pub use snf::{smith_diagonal, smith_normal_form, Snf};
pub use subgroup::{
    cohomology_at, cokernel, hom_parts, image, image_of, kernel, preimage, subgroup_lattice,
    HomParts, SubQuotient, Subgroup, SubgroupLattice,
};
