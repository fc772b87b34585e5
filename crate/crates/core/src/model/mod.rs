//! Fermi-Hubbard chain in the qubit encoding: Hamiltonian, conserved
//! charges, observables and the Néel product state.

mod basis;
mod hubbard;
mod pauli;

pub use basis::BasisState;
pub use hubbard::{
    build_hamiltonian, build_hamiltonian_with, neel_operator, neel_state, site_spin_xy_operator,
    total_number_operator, total_sz_operator, HubbardParams, SpinAxis,
};
pub(crate) use pauli::i_pow;
pub use pauli::{Pauli, PauliString, PauliTermSum};
