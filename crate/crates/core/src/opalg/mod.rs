// SPDX-License-Identifier: Apache-2.0

//! Dense complex operator algebra.

mod eig;
mod fock;
mod matrix;
pub mod pauli;

pub use eig::{
    eig_hermitian, eig_unitary, eigvals_hermitian, quasi_energies, unitary_exp,
    unitary_exp_in_sectors, wrap_symmetric, wrap_zone, HermitianEigen, QuasiSpectrum,
};
pub use fock::{binomial, fock_operators, FockBasis, FockOperators};
pub(crate) use matrix::check_capacity;
pub use matrix::{
    inner, kron, max_dim, ComplexMatrix, HermitianOperator, StateVector, UnitaryOperator,
    HARD_MAX_DIM, HERMITIAN_TOL, NORM_TOL, UNITARY_TOL,
};
pub use pauli::{pauli_site, pauli_string, Axis, PauliSum};
