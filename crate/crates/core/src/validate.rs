//! Cross-tier checks: rotating-wave error versus drive strength, and Fock
//! truncation convergence of the numeric gate.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::evolve::{trajectory_on, CLOSURE_PANELS};
use crate::fock::FockSpace;
use crate::gate::{
    branch_matrix, diagonality_residual, distance_to_trivial, gate_fidelity, gate_matrix_with,
    ideal_gate, GateMethod, GateOptions,
};
use crate::grid::panels;
use crate::model::{Branch, HamiltonianTier, PulseSpec};
use crate::phase::total_phase;

/// Largest `dt · r0` for which the `e^{i2r0t}` terms count as resolved.
pub const MAX_DT_R0: f64 = 0.1;
/// Successive fidelity change below which a truncation scan is converged.
pub const TRUNCATION_CONVERGENCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationRow {
    pub parameter_value: f64,
    pub infidelity: f64,
    pub diagonality_residual: f64,
    pub phase_error: f64,
    /// Truncation scans only: `|F(dim) − F(previous dim)|`.
    pub fidelity_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    /// Infidelity is non-increasing along the scan.
    pub monotone_flag: bool,
    /// Truncation scans only: the last fidelity change is below
    /// [`TRUNCATION_CONVERGENCE`].
    pub converged: Option<bool>,
}

fn non_increasing(rows: &[ValidationRow], slack: f64) -> bool {
    rows.windows(2)
        .all(|w| w[1].infidelity <= w[0].infidelity + slack)
}

fn phase_gap(a: f64, b: f64) -> f64 {
    distance_to_trivial(a - b)
}

/// Compares the rotating-frame gate against the rotating-wave gate for each
/// drive strength `r0`.
pub fn rwa_error_scan(
    pulse: &PulseSpec,
    r0_values: &[f64],
    space: FockSpace,
    dt: f64,
) -> Result<ValidationReport> {
    if r0_values.is_empty() {
        return Err(Error::InvalidParameter {
            field: "r0_values",
            reason: "scan list is empty".into(),
        });
    }
    if r0_values.iter().any(|r| !(*r > 0.0) || !r.is_finite())
        || r0_values.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::InvalidParameter {
            field: "r0_values",
            reason: "values must be positive and strictly ascending".into(),
        });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("must be finite and > 0, got {dt}"),
        });
    }
    let r_max = r0_values[r0_values.len() - 1];
    if !(dt * r_max < MAX_DT_R0) {
        return Err(Error::StepTooCoarse {
            product: dt * r_max,
            limit: MAX_DT_R0,
        });
    }
    let (reference, _) = branch_matrix(HamiltonianTier::RwaEffective, pulse, space, dt)?;
    let mut rows = Vec::with_capacity(r0_values.len());
    for &r0 in r0_values {
        let driven = pulse.clone().with_r0(r0)?;
        let (m, _) = branch_matrix(HamiltonianTier::RotatingFrame, &driven, space, dt)?;
        rows.push(ValidationRow {
            parameter_value: r0,
            infidelity: (1.0 - gate_fidelity(&reference, &m)).max(0.0),
            diagonality_residual: diagonality_residual(&m),
            phase_error: phase_gap(m[(0, 0)].arg(), reference[(0, 0)].arg()),
            fidelity_change: None,
        });
    }
    let monotone_flag = non_increasing(&rows, 0.0);
    Ok(ValidationReport {
        rows,
        monotone_flag,
        converged: None,
    })
}

/// Smallest Fock dimension the scan accepts for this pulse: `4·max|α|²`.
pub fn required_dim(pulse: &PulseSpec) -> f64 {
    let traj = trajectory_on(pulse, Branch::PlusPlus, &panels(pulse, CLOSURE_PANELS));
    4.0 * traj.max_abs() * traj.max_abs()
}

/// Numeric RWA gate at each Fock dimension, compared with the analytic gate.
pub fn truncation_scan(pulse: &PulseSpec, dims: &[usize], dt: f64) -> Result<ValidationReport> {
    if dims.is_empty() {
        return Err(Error::InvalidParameter {
            field: "dims",
            reason: "scan list is empty".into(),
        });
    }
    if dims.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            field: "dims",
            reason: "dimensions must be strictly ascending".into(),
        });
    }
    let required = required_dim(pulse);
    if let Some(&d) = dims.iter().find(|&&d| (d as f64) < required) {
        return Err(Error::DimensionTooSmall { dim: d, required });
    }
    let gamma = total_phase(pulse, Branch::PlusPlus, GateOptions::default().n_steps)?.gamma_total;
    let ideal = ideal_gate(gamma);
    let mut rows: Vec<ValidationRow> = Vec::with_capacity(dims.len());
    let mut last_fidelity: Option<f64> = None;
    for &d in dims {
        let space = FockSpace::new(d)?;
        let report = gate_matrix_with(
            pulse,
            space,
            GateMethod::NumericRwa,
            dt,
            &GateOptions::default(),
        )?;
        let fidelity = gate_fidelity(&ideal, &report.matrix);
        rows.push(ValidationRow {
            parameter_value: d as f64,
            infidelity: (1.0 - fidelity).max(0.0),
            diagonality_residual: report.diagonality_residual,
            phase_error: phase_gap(report.extracted_gamma, gamma),
            fidelity_change: last_fidelity.map(|f| Float::abs(fidelity - f)),
        });
        last_fidelity = Some(fidelity);
    }
    let converged = rows
        .last()
        .and_then(|r| r.fidelity_change)
        .is_none_or(|c| c < TRUNCATION_CONVERGENCE);
    // roundoff-level wiggles do not count as a regression
    let monotone_flag = non_increasing(&rows, 1e-12);
    Ok(ValidationReport {
        rows,
        monotone_flag,
        converged: Some(converged),
    })
}
