//! The Chow ring of the matroid `PG(n, q)`: polynomials in `x_F` over proper flats
//! `F`, modulo the differences of hyperplane sums and the products of incomparable
//! flats.
//!
//! Flats are subspaces of `F_q^{n+1}`; a flat of rank `r` has projective
//! codimension `n + 1 - r`, so points have codimension `n`.

mod chow;
mod field;
mod flats;

pub use chow::{
    alpha_for_hyperplane, alpha_is_hyperplane_independent, chow_degree, class_alpha, class_gamma, class_l,
    graded_basis, verify_gamma_l, verify_klyachko_relation, verify_l_relation, verify_theorem1, Assignment,
    CandidateReport, ChowClass, ChowRing, GradedPiece, Monomial, Poly, Theorem1Report, MAX_PIECE_COLUMNS,
};
pub use field::GaloisField;
pub use flats::{enumerate_flats, gaussian_binomial, Flat, FlatLattice, MAX_PROJECTIVE_DIM};
