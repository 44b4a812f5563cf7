//! Dense statevector simulator for small registers.
//!
//! Conventions, fixed across the whole crate:
//!
//! * Qubit 0 is the most significant bit of a basis index, so `|q0 q1 .. >`
//!   reads left to right. Qubit `q` of an `n`-qubit register owns bit
//!   `1 << (n - 1 - q)`.
//! * `Ry(theta)` is the real rotation `[[cos(t/2), sin(t/2)], [-sin(t/2), cos(t/2)]]`,
//!   chosen so that `Ry(theta)|1> = sin(t/2)|0> + cos(t/2)|1>` and
//!   `Ry(a) Ry(b) = Ry(a + b)`. Angle checks below always measure after the
//!   inverse rotation, so acceptance probability is `cos^2((a - b)/2)`.
//! * Registers are capped at [`MAX_QUBITS`] qubits; constructors reject
//!   anything larger.

mod gate;
mod measure;
mod state;

pub use gate::{random_unitary, Gate, UnitaryOp};
pub use measure::{
    measure_bell, measure_bell_remainder, measure_computational, measure_index, swap_test,
    tomography_estimate, BellOutcome,
};
pub use state::{amplitude_encode, random_state, StateVector};

/// Hard cap on register width; 2^12 amplitudes keep every experiment dense and fast.
pub const MAX_QUBITS: usize = 12;

/// Tolerance for "this state is normalized" checks.
pub const NORM_TOL: f64 = 1e-9;
