//! Geometric, dynamical and total phases of the cyclic evolution.
//!
//! The geometric phase is integrated along the sampled trajectory `α_kl(t)`.
//! The dynamical phase goes through `G(t) = g(t)∫g* − g*(t)∫g`, with its own
//! running integrals of `g` and `g*`. Both use the trapezoidal rule on the
//! piece-aligned grid, which is exact for piecewise-constant couplings.

use alloc::format;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::evolve::{trajectory_on, Trajectory};
use crate::grid::{panels, panels_between};
use crate::model::{Branch, PulseSpec};

/// Panels used by [`big_g`] for its inner integrals.
pub const BIG_G_PANELS: usize = 1 << 16;
/// Tolerance on the relations `γ = −γᵍ = γᵈ/2`, scaled by `max(1, |γ|)`.
pub const RELATION_TOLERANCE: f64 = 1e-9;

/// Phases acquired on one branch over the cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    pub branch: Branch,
    pub gamma_g: f64,
    pub gamma_d: f64,
    pub gamma_total: f64,
    /// Largest imaginary residue of the geometric or dynamical integral before
    /// the real part was taken.
    pub leakage: f64,
}

/// Knobs for [`total_phase_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseOptions {
    /// Absolute closure tolerance on `|α(T)|`. Defaults to
    /// `1e-6 · max(1, max_t |α(t)|)`.
    pub closure_tol: Option<f64>,
}

impl PhaseOptions {
    pub fn closure_tolerance(&self, traj: &Trajectory) -> f64 {
        self.closure_tol
            .unwrap_or_else(|| default_closure_tolerance(traj))
    }
}

pub fn default_closure_tolerance(traj: &Trajectory) -> f64 {
    1e-6 * traj.max_abs().max(1.0)
}

fn lambda(branch: Branch) -> f64 {
    branch.lambda() as f64
}

fn check_steps(n_steps: usize) -> Result<()> {
    if n_steps < 2 {
        return Err(Error::InvalidParameter {
            field: "n_steps",
            reason: format!("need >= 2, got {n_steps}"),
        });
    }
    Ok(())
}

/// `G(t)` with inner integrals by trapezoidal quadrature on [`BIG_G_PANELS`].
pub fn big_g(pulse: &PulseSpec, t: f64) -> C64 {
    big_g_with(pulse, t, BIG_G_PANELS)
}

pub fn big_g_with(pulse: &PulseSpec, t: f64, panels_n: usize) -> C64 {
    let t = t.clamp(0.0, pulse.period());
    let mut int_g = C64::new(0.0, 0.0);
    let mut int_g_conj = C64::new(0.0, 0.0);
    for p in panels_between(pulse, 0.0, t, panels_n) {
        let (ga, gb) = p.g_ends(pulse);
        int_g += (ga + gb) * (0.5 * p.width());
        int_g_conj += (ga.conj() + gb.conj()) * (0.5 * p.width());
    }
    let g = pulse.g(t);
    g * int_g_conj - g.conj() * int_g
}

/// `(i/2)∫(α*α̇ − α̇*α)dt` along the sampled trajectory, as a complex number
/// whose imaginary part is quadrature leakage.
fn geometric_integral(pulse: &PulseSpec, branch: Branch, n_steps: usize) -> (C64, Trajectory) {
    let grid = panels(pulse, n_steps);
    let traj = trajectory_on(pulse, branch, &grid);
    let lam = lambda(branch);
    if lam == 0.0 {
        return (C64::new(0.0, 0.0), traj);
    }
    let integrand = |alpha: C64, g: C64| {
        let alpha_dot = C64::new(0.0, -0.5 * lam) * g.conj();
        C64::new(0.0, 0.5) * (alpha.conj() * alpha_dot - alpha_dot.conj() * alpha)
    };
    let mut sum = C64::new(0.0, 0.0);
    for (k, p) in grid.iter().enumerate() {
        let (ga, gb) = p.g_ends(pulse);
        let a0 = traj.alphas()[k].value();
        let a1 = traj.alphas()[k + 1].value();
        sum += (integrand(a0, ga) + integrand(a1, gb)) * (0.5 * p.width());
    }
    (sum, traj)
}

/// `(i/4)λ²∫G(t)dt`, complex before the real part is taken.
fn dynamical_integral(pulse: &PulseSpec, branch: Branch, n_steps: usize) -> C64 {
    let lam = lambda(branch);
    if lam == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let mut int_g = C64::new(0.0, 0.0);
    let mut int_g_conj = C64::new(0.0, 0.0);
    let mut int_big_g = C64::new(0.0, 0.0);
    for p in panels(pulse, n_steps) {
        let (ga, gb) = p.g_ends(pulse);
        let big_a = ga * int_g_conj - ga.conj() * int_g;
        int_g += (ga + gb) * (0.5 * p.width());
        int_g_conj += (ga.conj() + gb.conj()) * (0.5 * p.width());
        let big_b = gb * int_g_conj - gb.conj() * int_g;
        int_big_g += (big_a + big_b) * (0.5 * p.width());
    }
    C64::new(0.0, 0.25 * lam * lam) * int_big_g
}

/// Geometric phase `γᵍ` from the trajectory.
pub fn geometric_phase(pulse: &PulseSpec, branch: Branch, n_steps: usize) -> Result<f64> {
    check_steps(n_steps)?;
    Ok(geometric_integral(pulse, branch, n_steps).0.re)
}

/// Dynamical phase `γᵈ` through `G(t)`.
pub fn dynamical_phase(pulse: &PulseSpec, branch: Branch, n_steps: usize) -> Result<f64> {
    check_steps(n_steps)?;
    Ok(dynamical_integral(pulse, branch, n_steps).re)
}

/// Dynamical phase as `−∫⟨α|H_kl|α⟩dt` with `⟨α|H_kl|α⟩ = (λ/2)(gα + g*α*)`,
/// evaluated along the trajectory instead of through `G(t)`.
pub fn dynamical_phase_from_energy(
    pulse: &PulseSpec,
    branch: Branch,
    n_steps: usize,
) -> Result<f64> {
    check_steps(n_steps)?;
    let grid = panels(pulse, n_steps);
    let traj = trajectory_on(pulse, branch, &grid);
    let lam = lambda(branch);
    let energy = |g: C64, a: C64| 0.5 * lam * (g * a + g.conj() * a.conj()).re;
    let mut sum = 0.0;
    for (k, p) in grid.iter().enumerate() {
        let (ga, gb) = p.g_ends(pulse);
        sum += (energy(ga, traj.alphas()[k].value()) + energy(gb, traj.alphas()[k + 1].value()))
            * 0.5
            * p.width();
    }
    Ok(-sum)
}

/// All three phases without the closure check. Use when reporting on open
/// paths, where the relations between the phases are not asserted.
pub fn phase_breakdown_unchecked(
    pulse: &PulseSpec,
    branch: Branch,
    n_steps: usize,
) -> Result<(PhaseBreakdown, Trajectory)> {
    check_steps(n_steps)?;
    let (geo, traj) = geometric_integral(pulse, branch, n_steps);
    let dyn_ = dynamical_integral(pulse, branch, n_steps);
    let breakdown = PhaseBreakdown {
        branch,
        gamma_g: geo.re,
        gamma_d: dyn_.re,
        gamma_total: geo.re + dyn_.re,
        leakage: Float::abs(geo.im).max(Float::abs(dyn_.im)),
    };
    Ok((breakdown, traj))
}

/// Total phase with default options.
pub fn total_phase(pulse: &PulseSpec, branch: Branch, n_steps: usize) -> Result<PhaseBreakdown> {
    total_phase_with(pulse, branch, n_steps, &PhaseOptions::default())
}

/// `γ = γᵍ + γᵈ` for a closed path, enforcing `γ = −γᵍ = γᵈ/2`.
pub fn total_phase_with(
    pulse: &PulseSpec,
    branch: Branch,
    n_steps: usize,
    opts: &PhaseOptions,
) -> Result<PhaseBreakdown> {
    let (b, traj) = phase_breakdown_unchecked(pulse, branch, n_steps)?;
    let residual = traj.end().norm();
    let tolerance = opts.closure_tolerance(&traj);
    if residual > tolerance {
        return Err(Error::OpenLoop {
            residual,
            tolerance,
        });
    }
    let tol = RELATION_TOLERANCE * Float::abs(b.gamma_total).max(1.0);
    let geo_gap = b.gamma_total + b.gamma_g;
    let dyn_gap = b.gamma_total - 0.5 * b.gamma_d;
    if Float::abs(geo_gap) > tol || Float::abs(dyn_gap) > tol {
        return Err(Error::RelationViolated {
            branch: branch.label(),
            detail: format!("gamma + gamma_g = {geo_gap:e}, gamma - gamma_d/2 = {dyn_gap:e}"),
        });
    }
    Ok(b)
}

/// Signed area enclosed by a closed trajectory (shoelace rule, positive for
/// counterclockwise traversal).
pub fn enclosed_area(traj: &Trajectory) -> Result<f64> {
    enclosed_area_with(traj, default_closure_tolerance(traj))
}

pub fn enclosed_area_with(traj: &Trajectory, closure_tol: f64) -> Result<f64> {
    let alphas = traj.alphas();
    let residual = (traj.end().value() - alphas[0].value()).norm();
    if residual > closure_tol {
        return Err(Error::OpenLoop {
            residual,
            tolerance: closure_tol,
        });
    }
    let n = alphas.len();
    let mut twice = 0.0;
    for k in 0..n {
        let a = alphas[k];
        let b = alphas[(k + 1) % n];
        twice += a.re() * b.im() - b.re() * a.im();
    }
    Ok(0.5 * twice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{alpha_trajectory, propagate_displacement};
    use crate::model::{PulseShape, Segment};
    use core::f64::consts::{FRAC_PI_2, PI, TAU};

    fn circle() -> PulseSpec {
        PulseSpec::circular(0.1, 0.2, 0.0, 1).unwrap()
    }

    #[test]
    fn big_g_at_zero_vanishes() {
        assert_eq!(big_g(&circle(), 0.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn big_g_matches_circular_closed_form() {
        let (g0, nu) = (0.1, 0.2);
        let p = circle();
        for &t in &[0.5, 3.0, 10.0, 17.3, p.period()] {
            let want = C64::new(0.0, -2.0 * g0 * g0 * (1.0 - (nu * t).cos()) / nu);
            let got = big_g(&p, t);
            assert!((got - want).norm() < 1e-8, "t = {t}: {got} vs {want}");
        }
    }

    #[test]
    fn big_g_vanishes_for_real_constant_coupling() {
        let p = PulseSpec::piecewise(alloc::vec![Segment {
            duration: 4.0,
            g: C64::new(0.3, 0.0)
        }])
        .unwrap();
        for &t in &[0.0, 1.0, 2.5, 4.0] {
            assert!(big_g(&p, t).norm() < 1e-15);
        }
    }

    #[test]
    fn circle_phases() {
        let b = total_phase(&circle(), Branch::PlusPlus, 100_000).unwrap();
        assert!((b.gamma_g + FRAC_PI_2).abs() < 1e-6);
        assert!((b.gamma_d - PI).abs() < 1e-6);
        assert!((b.gamma_total - FRAC_PI_2).abs() < 1e-6);
        assert!(b.leakage < 1e-10);
        let mm = total_phase(&circle(), Branch::MinusMinus, 100_000).unwrap();
        assert!((mm.gamma_total - b.gamma_total).abs() < 1e-9);
        assert!((mm.gamma_d - b.gamma_d).abs() < 1e-9);
    }

    #[test]
    fn zero_lambda_branches_are_exactly_zero() {
        for br in [Branch::PlusMinus, Branch::MinusPlus] {
            let b = total_phase(&circle(), br, 1000).unwrap();
            assert_eq!((b.gamma_g, b.gamma_d, b.gamma_total), (0.0, 0.0, 0.0));
            assert_eq!(geometric_phase(&circle(), br, 10).unwrap(), 0.0);
            assert_eq!(dynamical_phase(&circle(), br, 10).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_loops_double_the_geometric_phase() {
        let one = geometric_phase(&circle(), Branch::PlusPlus, 100_000).unwrap();
        let two = geometric_phase(
            &PulseSpec::circular(0.1, 0.2, 0.0, 2).unwrap(),
            Branch::PlusPlus,
            200_000,
        )
        .unwrap();
        assert!((two - 2.0 * one).abs() < 1e-6);
        assert!((one + FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn phase_scales_with_coupling_squared() {
        let base = PulseSpec::circular(0.1, 0.2, 0.0, 1).unwrap();
        let doubled = PulseSpec::circular(0.2, 0.2, 0.0, 1).unwrap();
        let a = total_phase(&base, Branch::PlusPlus, 100_000)
            .unwrap()
            .gamma_total;
        let b = total_phase(&doubled, Branch::PlusPlus, 100_000)
            .unwrap()
            .gamma_total;
        assert!((b - 4.0 * a).abs() < 1e-6);
    }

    #[test]
    fn energy_route_agrees_with_big_g_route() {
        let p = PulseSpec::circular(0.13, -0.31, 0.4, 2).unwrap();
        let via_g = dynamical_phase(&p, Branch::PlusPlus, 50_000).unwrap();
        let via_energy = dynamical_phase_from_energy(&p, Branch::PlusPlus, 50_000).unwrap();
        assert!((via_g - via_energy).abs() < 1e-9);
    }

    #[test]
    fn open_loop_is_rejected() {
        let p = PulseSpec::new(
            PulseShape::Circular {
                g0: 0.1,
                nu: 0.2,
                phase0: 0.0,
            },
            0.0,
            0.75 * TAU / 0.2,
        )
        .unwrap();
        assert!(matches!(
            total_phase(&p, Branch::PlusPlus, 1000),
            Err(Error::OpenLoop { .. })
        ));
        let traj = alpha_trajectory(&p, Branch::PlusPlus, 1000).unwrap();
        assert!(matches!(enclosed_area(&traj), Err(Error::OpenLoop { .. })));
        // λ = 0 branches never leave the origin
        assert!(total_phase(&p, Branch::PlusMinus, 1000).is_ok());
    }

    #[test]
    fn agrees_with_displacement_engine() {
        let p = PulseSpec::circular(0.07, 0.15, 1.0, 3).unwrap();
        let n = 60_000;
        let a = total_phase(&p, Branch::PlusPlus, n).unwrap().gamma_total;
        let b = propagate_displacement(&p, Branch::PlusPlus, n)
            .unwrap()
            .phase;
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn area_of_sampled_circle() {
        let r: f64 = 0.8;
        let n = 10_000;
        let times = (0..=n).map(|k| k as f64 / n as f64).collect();
        // circle through the origin, counterclockwise
        let alphas = (0..=n)
            .map(|k| {
                let z = C64::new(r, 0.0) - C64::from_polar(r, TAU * k as f64 / n as f64);
                crate::fock::Amplitude::new(if k == 0 || k == n {
                    C64::new(0.0, 0.0)
                } else {
                    z
                })
                .unwrap()
            })
            .collect();
        let traj = Trajectory::new(times, alphas, Branch::PlusPlus).unwrap();
        let area = enclosed_area(&traj).unwrap();
        assert!((area - PI * r * r).abs() / (PI * r * r) < 1e-6);
        assert!((enclosed_area(&traj.reversed()).unwrap() + area).abs() < 1e-12);
    }

    #[test]
    fn degenerate_trajectory_has_zero_area() {
        let traj = alpha_trajectory(&PulseSpec::zero(1.0).unwrap(), Branch::PlusPlus, 10).unwrap();
        assert_eq!(enclosed_area(&traj).unwrap(), 0.0);
    }
}
