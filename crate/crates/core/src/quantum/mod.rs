//! Exact finite-dimensional quantum states.
//!
//! Qubit ordering is big-endian throughout: qubit 0 is the most significant
//! bit of a basis label. EPR registers are laid out `C₁A₁C₂A₂…`.

pub mod density;
pub mod extractor;
pub mod measure;
pub mod state;
pub mod tagged;

pub use density::{hermitian_trace_norm, trace_distance, DensityMatrix};
pub use extractor::{
    hadamard_distribution, pi_accepts, pi_projector_probability, uniform_parity_reference,
    xor_parity_channel,
};
pub use measure::{
    measure, measure_all_branches, measure_and_discard, measure_and_discard_all_branches,
    MeasurementBranch, ResidualBranch,
};
pub use state::{bb84_prepare, epr_a_qubits, epr_c_qubits, epr_pairs, StateVector};
pub use tagged::{TaggedBranch, TaggedState};

/// Complex amplitude type.
pub type C64 = nalgebra::Complex<f64>;

/// Tolerance for state identities (normalization, equality of states).
pub const STATE_TOL: f64 = 1e-10;

/// Tolerance for derived metric properties (triangle inequality, TD = 0).
pub const METRIC_TOL: f64 = 1e-9;

/// Value of qubit `q` in basis label `idx` of an `n`-qubit register.
#[inline]
pub(crate) fn bit_of(idx: usize, q: usize, n: usize) -> bool {
    (idx >> (n - 1 - q)) & 1 == 1
}
