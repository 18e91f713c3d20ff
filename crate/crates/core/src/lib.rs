//! Spin-Hamiltonian engineering for arrays of electrons in micro-Penning
//! traps.
//!
//! The crate turns trap parameters into effective spin-spin couplings,
//! compiles target spin models (Ising, XY, tunable-range, field-scaled)
//! into programs of electromagnetic pulses alternated with free evolution,
//! and verifies each program by exact unitary simulation against the ideal
//! evolution.
//!
//! Pipeline: [`physics`] derives frequencies and couplings; [`hamiltonian`]
//! and [`operator`] provide the dense spin algebra; [`pulse`] builds the
//! ideal pulse unitaries; [`schedule`] defines the pulse-program IR, its
//! compiler and text format; [`verify`] measures errors, fits scaling laws
//! and produces reports.

pub mod constants;
pub mod physics;

mod matrix;
pub mod operator;
pub mod pauli;
pub mod hamiltonian;
pub mod pulse;
pub mod suzuki;
pub mod schedule;
pub mod compile;
pub mod bands;
pub mod verify;

pub use constants::Constants;
pub use bands::effective_neighbor_strengths;
pub use compile::compile;
pub use operator::{spectral_distance, Operator, Unitary};
pub use pauli::{pauli_string, Axis};
pub use physics::{
    canonical_error_bound, coupling_constants, derive_frequencies, CouplingMatrix, FrequencySet,
    TrapParams,
};
pub use pulse::{pulse_unitary, rabi_evolve, DriveField, PulseSpec};
pub use schedule::{schedule_unitary, PulseSchedule, TargetKind, TargetSpec};
pub use verify::{accumulation_check, iterations_bound, sequence_error, VerificationReport};

pub use num_complex::Complex64;
