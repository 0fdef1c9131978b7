//! Bilinear finite elements for the cell problem on the translated cell.
//!
//! The mesh is a structured grid of quadrilaterals whose columns are fitted
//! between the two inclusions, so the bottom node row lies on `Γ₋` and the
//! top node row on `Γ₊`. Sides `x₁ = ±L₁` carry no constraint.

mod assemble;
mod mesh;
mod post;
mod solve;

pub use assemble::{assemble, element_stiffness, CsrMatrix, StiffnessSystem};
pub use mesh::{build_mesh, refine, GapMesh, NodeClass};
pub use post::{aux_interpolant, effective_moduli, energy, gap_gradient_stats, pinned_work, GradientStats};
pub use solve::{
    boundary_data, iteration_cap, solve_cell, solve_with_data, DisplacementField, Preconditioner, SolveInfo,
};
