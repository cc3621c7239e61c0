//! Dense small-matrix toolkit: storage, LU, eigenvalues and the generator
//! constructions built on them.

mod eigen;
mod generator;
mod lu;
mod matrix;

pub use eigen::{is_hurwitz, spectrum, Spectrum};
pub use generator::{
    companion_from_coeffs, condition_limit, gamma, hankel, hankel_condition, mn_pair,
    poles_to_coeffs, q_matrix, solve_a, sylvester_residual, sylvester_solve_oracle,
    vandermonde_factor, xi_first_row, xi_first_row_jacobian, xi_matrix, CoeffVector, ComplexMatrix,
    VandermondeFactor,
};
pub use lu::{solve, Lu, COND_LIMIT};
pub use matrix::Matrix;
