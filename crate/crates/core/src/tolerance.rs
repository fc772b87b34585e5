//! Numerical tolerances shared by checks across the crate.

/// Allowed deviation of a state norm from one.
pub const NORM: f64 = 1e-10;

/// Largest imaginary residue accepted when evaluating a Hermitian observable.
pub const IMAG_RESIDUE: f64 = 1e-10;

/// Deviation allowed when comparing unitaries up to a global phase.
pub const UNITARY_EQ: f64 = 1e-10;

/// Elementwise agreement of exact dense constructions.
pub const DENSE_EQ: f64 = 1e-12;

/// Default local error target for Krylov propagation.
pub const KRYLOV_TOL: f64 = 1e-10;

/// Widest circuit accepted by [`crate::circuit::circuit_unitary`].
pub const MAX_UNITARY_QUBITS: usize = 10;
