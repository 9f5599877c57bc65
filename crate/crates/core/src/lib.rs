//! Unconventional geometric two-qubit phase gate for two Λ-type atoms in a
//! cavity.
//!
//! Two atoms share a cavity mode through a two-channel Raman interaction. Under
//! strong classical driving the effective Hamiltonian is
//! `½(g(t) a + g*(t) a†)(σ₁ˣ + σ₂ˣ)`, diagonal in the σˣ product basis. A
//! coupling `g(t)` that drives the cavity amplitude around a closed loop in
//! phase space leaves the cavity untouched and imprints a phase proportional
//! to the enclosed area on the `|++⟩` and `|−−⟩` branches.
//!
//! Modules:
//! - [`fock`]: truncated ladder operators, displacements, coherent states
//! - [`model`]: pulses, Raman couplings, the three Hamiltonian tiers
//! - [`evolve`]: numeric and displacement-product propagators
//! - [`phase`]: geometric, dynamical and total phases
//! - [`gate`]: gate construction, quality, nontriviality and pulse design
//! - [`validate`]: rotating-wave and truncation scans
//!
//! Units have `ħ = 1`; frequencies and times are in matching reference units.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod evolve;
pub mod fock;
pub mod gate;
mod grid;
pub mod linalg;
pub mod model;
pub mod phase;
pub mod validate;

pub use error::{Error, Result, Warned, Warning};
pub use evolve::{
    alpha_trajectory, evolve_state, loop_closure_residual, propagate_block, propagate_displacement,
    propagate_numeric, DisplacementPropagation, NumericPropagation, Trajectory,
};
pub use fock::{
    annihilation, coherent_state, compose_phase, creation, displacement, number, Amplitude,
    FockSpace,
};
pub use gate::{
    design_circular_pulse, entangling_check, gate_fidelity, gate_matrix, gate_matrix_with,
    ideal_gate, nontriviality, numeric_branch_phases, DesignConstraint, GateMethod, GateOptions,
    GateReport,
};
pub use linalg::{CMatrix, SparseMatrix};
pub use model::{
    effective_couplings, hamiltonian_full, hamiltonian_rotating, hamiltonian_rwa, lambda_values,
    sigma_x_basis_change, Branch, HamiltonianTier, PulseShape, PulseSpec, RamanParams, Segment,
};
pub use phase::{
    big_g, dynamical_phase, enclosed_area, geometric_phase, total_phase, total_phase_with,
    PhaseBreakdown, PhaseOptions,
};
pub use validate::{rwa_error_scan, truncation_scan, ValidationReport, ValidationRow};

pub use num_complex::Complex64 as C64;
