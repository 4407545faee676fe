//! First homology of finite-index subgroups through two presentations: the
//! Reidemeister–Schreier presentation of the full Schreier complex and the
//! presentation read off the rewired complex. Both are abelianized and
//! reduced to Smith normal form.

mod matrix;
mod presentation;
mod snf;

pub use matrix::{abelianized_matrix, SparseIntegerMatrix};
pub use presentation::{rewired_complex, schreier_presentation, Cell, SubgroupPresentation};
pub use snf::{
    hadamard_bound, ln_big, smith_normal_form, torsion_growth_stat, within_hadamard, SnfResult,
};

/// Abelian invariants of the group presented by `p`.
pub fn first_homology(p: &SubgroupPresentation) -> SnfResult {
    smith_normal_form(&abelianized_matrix(p))
}
