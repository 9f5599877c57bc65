//! The two-qubit phase gate: construction from either engine, quality
//! measures, nontriviality, entangling power and closed-form pulse design.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result, Warned, Warning};
use crate::evolve::{propagate_block, trajectory_on, CLOSURE_PANELS};
use crate::fock::FockSpace;
use crate::grid::panels;
use crate::linalg::CMatrix;
use crate::model::{
    branch_vacuum_state, sigma_x_basis_change, Branch, HamiltonianTier, PulseShape, PulseSpec,
};
use crate::phase::{default_closure_tolerance, total_phase_with, PhaseOptions};

/// Default tolerance for the distance of γ to the nearest multiple of 2π.
pub const NONTRIVIAL_TOLERANCE: f64 = 1e-6;
/// Minimum `|⟨kl,0|U|kl,0⟩|` accepted as "cavity returned to vacuum".
pub const VACUUM_RETURN_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateMethod {
    /// `diag(e^{iγ₊₊}, 1, 1, e^{iγ₋₋})` from the phase integrals.
    Analytic,
    /// Numeric propagation of the rotating-wave Hamiltonian.
    NumericRwa,
    /// Numeric propagation of the rotating-frame Hamiltonian (no RWA).
    NumericRotating,
}

impl GateMethod {
    pub fn label(self) -> &'static str {
        match self {
            GateMethod::Analytic => "analytic",
            GateMethod::NumericRwa => "numeric_rwa",
            GateMethod::NumericRotating => "numeric_rotating",
        }
    }

    pub fn tier(self) -> Option<HamiltonianTier> {
        match self {
            GateMethod::Analytic => None,
            GateMethod::NumericRwa => Some(HamiltonianTier::RwaEffective),
            GateMethod::NumericRotating => Some(HamiltonianTier::RotatingFrame),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateOptions {
    /// Quadrature panels for the analytic phases.
    pub n_steps: usize,
    pub closure_tol: Option<f64>,
    pub nontrivial_tol: f64,
    pub vacuum_threshold: f64,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self {
            n_steps: 100_000,
            closure_tol: None,
            nontrivial_tol: NONTRIVIAL_TOLERANCE,
            vacuum_threshold: VACUUM_RETURN_THRESHOLD,
        }
    }
}

/// 4×4 gate in branch order (++, +−, −+, −−) with quality measures.
#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub method: GateMethod,
    pub matrix: CMatrix,
    pub extracted_gamma: f64,
    pub diagonality_residual: f64,
    pub closure_residual: f64,
    pub unitarity_residual: f64,
    /// `|tr(U_ideal† U)|/4` against the ideal gate built from `extracted_gamma`.
    pub fidelity: f64,
    pub nontrivial: bool,
}

/// `diag(e^{iγ}, 1, 1, e^{iγ})`.
pub fn ideal_gate(gamma: f64) -> CMatrix {
    let p = C64::from_polar(1.0, gamma);
    let one = C64::new(1.0, 0.0);
    CMatrix::diagonal(&[p, one, one, p])
}

/// Normalized trace overlap `|tr(A†B)|/n`.
pub fn gate_fidelity(reference: &CMatrix, actual: &CMatrix) -> f64 {
    reference.adjoint().matmul(actual).trace().norm() / reference.rows() as f64
}

/// Largest off-diagonal magnitude.
pub fn diagonality_residual(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

fn wrap_to_pi(x: f64) -> f64 {
    let y = x - TAU * Float::round(x / TAU);
    if y <= -core::f64::consts::PI {
        y + TAU
    } else {
        y
    }
}

/// Distance from `gamma` to the nearest multiple of 2π.
pub fn distance_to_trivial(gamma: f64) -> f64 {
    Float::abs(wrap_to_pi(gamma))
}

/// True iff `gamma` is farther than [`NONTRIVIAL_TOLERANCE`] from every 2nπ.
pub fn nontriviality(gamma: f64) -> bool {
    nontriviality_with(gamma, NONTRIVIAL_TOLERANCE)
}

pub fn nontriviality_with(gamma: f64, tol: f64) -> bool {
    distance_to_trivial(gamma) > tol
}

/// Closure residual on branch ++ and the tolerance it is judged against.
fn closure(pulse: &PulseSpec, closure_tol: Option<f64>) -> (f64, f64) {
    let traj = trajectory_on(pulse, Branch::PlusPlus, &panels(pulse, CLOSURE_PANELS));
    let tol = closure_tol.unwrap_or_else(|| default_closure_tolerance(&traj));
    (traj.end().norm(), tol)
}

fn raw_branch_matrix(
    tier: HamiltonianTier,
    pulse: &PulseSpec,
    space: FockSpace,
    dt: f64,
) -> Result<(CMatrix, f64)> {
    let d = space.dim();
    let mut initial = CMatrix::zeros(4 * d, 4);
    for b in Branch::ALL {
        for (q, v) in branch_vacuum_state(b, space).into_iter().enumerate() {
            initial[(q, b.index())] = v;
        }
    }
    let prop = propagate_block(tier, pulse, space, 0.0, pulse.period(), dt, &initial)?;
    let basis = sigma_x_basis_change();
    let m = CMatrix::from_fn(4, 4, |row, col| {
        (0..4)
            .map(|q| basis[(q, row)].conj() * prop.unitary[(q * d, col)])
            .sum()
    });
    Ok((m, prop.unitarity_residual))
}

/// Numerically propagated branch matrix `⟨k'l',0|U(T)|kl,0⟩`, pinned so that
/// the `+−` entry has zero phase. No vacuum-return or closure checks.
pub fn branch_matrix(
    tier: HamiltonianTier,
    pulse: &PulseSpec,
    space: FockSpace,
    dt: f64,
) -> Result<(CMatrix, f64)> {
    let (mut m, residual) = raw_branch_matrix(tier, pulse, space, dt)?;
    let pin = m[(1, 1)];
    if pin.norm() > 0.0 {
        m = m.scale(pin.conj() / pin.norm());
    }
    Ok((m, residual))
}

/// `arg⟨kl,0|U(T)|kl,0⟩` per branch from the numeric rotating-wave propagator,
/// without any gauge pinning.
pub fn numeric_branch_phases(pulse: &PulseSpec, space: FockSpace, dt: f64) -> Result<[f64; 4]> {
    let (m, _) = raw_branch_matrix(HamiltonianTier::RwaEffective, pulse, space, dt)?;
    Ok(Branch::ALL.map(|b| m[(b.index(), b.index())].arg()))
}

/// Gate with default options.
pub fn gate_matrix(
    pulse: &PulseSpec,
    space: FockSpace,
    method: GateMethod,
    dt: f64,
) -> Result<GateReport> {
    gate_matrix_with(pulse, space, method, dt, &GateOptions::default())
}

pub fn gate_matrix_with(
    pulse: &PulseSpec,
    space: FockSpace,
    method: GateMethod,
    dt: f64,
    opts: &GateOptions,
) -> Result<GateReport> {
    let (closure_residual, tolerance) = closure(pulse, opts.closure_tol);
    if closure_residual > tolerance {
        return Err(Error::OpenLoop {
            residual: closure_residual,
            tolerance,
        });
    }
    let (matrix, extracted_gamma) = match method.tier() {
        None => {
            let phase_opts = PhaseOptions {
                closure_tol: opts.closure_tol,
            };
            let mut phases = [0.0; 4];
            for b in Branch::ALL {
                phases[b.index()] =
                    total_phase_with(pulse, b, opts.n_steps, &phase_opts)?.gamma_total;
            }
            let diag: Vec<C64> = phases.iter().map(|&g| C64::from_polar(1.0, g)).collect();
            (CMatrix::diagonal(&diag), phases[Branch::PlusPlus.index()])
        }
        Some(tier) => {
            let (m, _) = branch_matrix(tier, pulse, space, dt)?;
            for b in Branch::ALL {
                let overlap = m[(b.index(), b.index())].norm();
                if !(overlap > opts.vacuum_threshold) {
                    return Err(Error::CavityNotReturned {
                        branch: b.label(),
                        overlap,
                    });
                }
            }
            let gamma = m[(0, 0)].arg();
            (m, gamma)
        }
    };
    let fidelity = gate_fidelity(&ideal_gate(extracted_gamma), &matrix);
    Ok(GateReport {
        method,
        diagonality_residual: diagonality_residual(&matrix),
        unitarity_residual: matrix.unitarity_residual(),
        matrix,
        extracted_gamma,
        closure_residual,
        fidelity,
        nontrivial: nontriviality_with(extracted_gamma, opts.nontrivial_tol),
    })
}

/// Which circle parameter the designer holds fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignConstraint {
    FixedG0(f64),
    FixedPeriod(f64),
}

/// Circular pulse running `loops` turns whose total phase is `target_gamma`.
///
/// Each turn contributes `2π g0²/ν²` on the λ = ±2 branches, so with `g0`
/// fixed `ν = g0·√(2π·loops/γ)`, and with `T` fixed `ν = 2π·loops/T` and
/// `g0 = ν·√(γ/(2π·loops))`. The traversal is counterclockwise (`ν > 0`).
pub fn design_circular_pulse(
    target_gamma: f64,
    constraint: DesignConstraint,
    loops: u32,
) -> Result<Warned<PulseSpec>> {
    if !(target_gamma > 0.0) || !target_gamma.is_finite() {
        return Err(Error::InfeasibleConstraint(format!(
            "target phase must be finite and > 0, got {target_gamma}"
        )));
    }
    if loops == 0 {
        return Err(Error::InfeasibleConstraint("loops must be >= 1".into()));
    }
    let per_loop = target_gamma / loops as f64;
    let (g0, nu, period) = match constraint {
        DesignConstraint::FixedG0(g0) => {
            if !(g0 > 0.0) || !g0.is_finite() {
                return Err(Error::InfeasibleConstraint(format!(
                    "g0 must be finite and > 0, got {g0}"
                )));
            }
            let nu = g0 * Float::sqrt(TAU / per_loop);
            (g0, nu, loops as f64 * TAU / nu)
        }
        DesignConstraint::FixedPeriod(period) => {
            if !(period > 0.0) || !period.is_finite() {
                return Err(Error::InfeasibleConstraint(format!(
                    "period must be finite and > 0, got {period}"
                )));
            }
            let nu = loops as f64 * TAU / period;
            (nu * Float::sqrt(per_loop / TAU), nu, period)
        }
    };
    if !(nu > 0.0 && nu.is_finite() && g0 > 0.0 && g0.is_finite()) {
        return Err(Error::InfeasibleConstraint(format!(
            "solution degenerates: g0 = {g0}, nu = {nu}"
        )));
    }
    let pulse = PulseSpec::new(
        PulseShape::Circular {
            g0,
            nu,
            phase0: 0.0,
        },
        0.0,
        period,
    )
    .map_err(|e| Error::InfeasibleConstraint(format!("{e}")))?;
    let mut out = Warned::clean(pulse);
    if !nontriviality(target_gamma) {
        out.warnings.push(Warning::TrivialTarget {
            gamma: target_gamma,
        });
    }
    Ok(out)
}

/// Von Neumann entropy (bits) of one qubit after applying `gate` to
/// `(|+⟩+|−⟩)(|+⟩+|−⟩)/2`.
pub fn entanglement_entropy(gate: &CMatrix) -> f64 {
    let input = [C64::new(0.5, 0.0); 4];
    let out = gate.mul_vec(&input);
    // ρ₁ = M M† with M[k][l] = ψ_{kl}
    let rho00 = out[0].norm_sqr() + out[1].norm_sqr();
    let rho11 = out[2].norm_sqr() + out[3].norm_sqr();
    let rho01 = out[0] * out[2].conj() + out[1] * out[3].conj();
    let trace = rho00 + rho11;
    let gap = Float::sqrt((rho00 - rho11) * (rho00 - rho11) + 4.0 * rho01.norm_sqr());
    [(trace + gap) / 2.0 / trace, (trace - gap) / 2.0 / trace]
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * Float::log2(p))
        .sum::<f64>()
        .max(0.0)
}

/// Entangling capability of a gate report; zero iff the gate maps product
/// states to product states on the probe input.
pub fn entangling_check(report: &GateReport) -> f64 {
    entanglement_entropy(&report.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn nontriviality_examples() {
        assert!(nontriviality(FRAC_PI_2));
        assert!(!nontriviality(4.0 * PI));
        assert!(!nontriviality(TAU - 1e-9));
        assert!(!nontriviality(0.0));
        assert!(nontriviality(-FRAC_PI_2));
        assert!(nontriviality(PI));
    }

    #[test]
    fn designer_examples() {
        let p = design_circular_pulse(FRAC_PI_2, DesignConstraint::FixedG0(0.1), 1).unwrap();
        assert!(!p.has_warnings());
        match p.value.shape() {
            PulseShape::Circular { g0, nu, .. } => {
                assert_eq!(*g0, 0.1);
                assert!((nu - 0.2).abs() < 1e-15);
            }
            other => panic!("unexpected shape {other:?}"),
        }
        assert!((p.value.period() - 10.0 * PI).abs() < 1e-12);

        let p = design_circular_pulse(PI, DesignConstraint::FixedG0(0.1), 2)
            .unwrap()
            .value;
        match p.shape() {
            PulseShape::Circular { nu, .. } => assert!((nu - 0.2).abs() < 1e-15),
            _ => unreachable!(),
        }
        assert!((p.period() - 2.0 * TAU / 0.2).abs() < 1e-12);

        let trivial = design_circular_pulse(TAU, DesignConstraint::FixedG0(0.1), 1).unwrap();
        assert_eq!(
            trivial.warnings,
            alloc::vec![Warning::TrivialTarget { gamma: TAU }]
        );
    }

    #[test]
    fn designer_fixed_period() {
        let p = design_circular_pulse(FRAC_PI_2, DesignConstraint::FixedPeriod(10.0 * PI), 1)
            .unwrap()
            .value;
        match p.shape() {
            PulseShape::Circular { g0, nu, .. } => {
                assert!((nu - 0.2).abs() < 1e-15);
                assert!((g0 - 0.1).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn designer_rejects_infeasible() {
        for (target, c) in [
            (0.0, DesignConstraint::FixedG0(0.1)),
            (-1.0, DesignConstraint::FixedG0(0.1)),
            (1.0, DesignConstraint::FixedG0(0.0)),
            (1.0, DesignConstraint::FixedPeriod(-3.0)),
            (f64::NAN, DesignConstraint::FixedG0(0.1)),
        ] {
            assert!(matches!(
                design_circular_pulse(target, c, 1),
                Err(Error::InfeasibleConstraint(_))
            ));
        }
        assert!(design_circular_pulse(1.0, DesignConstraint::FixedG0(0.1), 0).is_err());
    }

    #[test]
    fn zero_pulse_gives_identity_gate() {
        let p = PulseSpec::zero(5.0).unwrap();
        let sp = FockSpace::new(4).unwrap();
        for method in [GateMethod::Analytic, GateMethod::NumericRwa] {
            let r = gate_matrix(&p, sp, method, 0.05).unwrap();
            assert!((&r.matrix - &CMatrix::identity(4)).max_abs() < 1e-12);
            assert_eq!(r.extracted_gamma, 0.0);
            assert!((r.fidelity - 1.0).abs() < 1e-12);
            assert!(!r.nontrivial);
        }
    }

    #[test]
    fn analytic_circle_gate() {
        let p = PulseSpec::circular(0.1, 0.2, 0.0, 1).unwrap();
        let r = gate_matrix(&p, FockSpace::new(8).unwrap(), GateMethod::Analytic, 0.1).unwrap();
        let want = CMatrix::diagonal(&[
            C64::new(0.0, 1.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
        ]);
        assert!((&r.matrix - &want).max_abs() < 1e-6);
        assert!(r.nontrivial);
        assert_eq!(r.diagonality_residual, 0.0);
    }

    #[test]
    fn open_loop_gate_is_rejected() {
        let p = PulseSpec::new(
            PulseShape::Circular {
                g0: 0.1,
                nu: 0.2,
                phase0: 0.0,
            },
            0.0,
            20.0,
        )
        .unwrap();
        let err =
            gate_matrix(&p, FockSpace::new(8).unwrap(), GateMethod::Analytic, 0.1).unwrap_err();
        assert!(matches!(err, Error::OpenLoop { .. }));
    }

    #[test]
    fn entropy_of_identity_and_quarter_turn() {
        assert!(entanglement_entropy(&CMatrix::identity(4)) < 1e-10);
        assert!(entanglement_entropy(&ideal_gate(TAU)) < 1e-10);
        assert!((entanglement_entropy(&ideal_gate(FRAC_PI_2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_helpers() {
        assert!((distance_to_trivial(TAU + 0.25) - 0.25).abs() < 1e-15);
        assert!((distance_to_trivial(-0.25) - 0.25).abs() < 1e-15);
        assert!((distance_to_trivial(PI) - PI).abs() < 1e-15);
    }
}
