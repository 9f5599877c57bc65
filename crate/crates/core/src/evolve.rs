//! Propagation engines.
//!
//! The numeric engine multiplies short-time exponentials of `H(t)` sampled at
//! step midpoints and works for every [`HamiltonianTier`]. The displacement
//! engine works per branch with scalars only: the RWA propagator is a
//! time-ordered product of displacements, which collapses to a phase times a
//! single displacement.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{compose_phase, Amplitude, FockSpace};
use crate::grid::{panels, Panel};
use crate::linalg::CMatrix;
use crate::model::{Branch, HamiltonianTier, PulseSpec};

/// Per-step accuracy the numeric engine advertises.
pub const STEP_TOLERANCE: f64 = 1e-9;
/// Unitarity bound checked after numeric propagation (`10 · STEP_TOLERANCE`).
pub const UNITARITY_TOLERANCE: f64 = 10.0 * STEP_TOLERANCE;
/// Grid used by [`loop_closure_residual`].
pub const CLOSURE_PANELS: usize = 1 << 16;

/// Result of the numeric engine.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPropagation {
    /// Propagated block; the full unitary when started from the identity.
    pub unitary: CMatrix,
    pub step_count: usize,
    pub unitarity_residual: f64,
}

/// Result of the displacement engine on one branch: `U = e^{iγ} D(residual)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementPropagation {
    pub branch: Branch,
    pub phase: f64,
    pub residual_displacement: Amplitude,
    pub step_count: usize,
}

/// Sampled phase-space path `α_kl(t)` of the cavity amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    alphas: Vec<Amplitude>,
    branch: Branch,
}

impl Trajectory {
    /// Checks that times start at 0 and strictly increase, and that the path
    /// starts at the origin.
    pub fn new(times: Vec<f64>, alphas: Vec<Amplitude>, branch: Branch) -> Result<Self> {
        if times.is_empty() || times.len() != alphas.len() {
            return Err(Error::InvalidParameter {
                field: "trajectory",
                reason: format!("{} times vs {} amplitudes", times.len(), alphas.len()),
            });
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter {
                field: "trajectory",
                reason: "times must start at 0 and strictly increase".into(),
            });
        }
        if alphas[0] != Amplitude::ZERO {
            return Err(Error::InvalidParameter {
                field: "trajectory",
                reason: "path must start at alpha = 0".into(),
            });
        }
        Ok(Self {
            times,
            alphas,
            branch,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn alphas(&self) -> &[Amplitude] {
        &self.alphas
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn end(&self) -> Amplitude {
        *self.alphas.last().expect("trajectory is non-empty")
    }

    pub fn max_abs(&self) -> f64 {
        self.alphas.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Same path traversed backwards, translated to start at the origin.
    pub fn reversed(&self) -> Self {
        let total = *self.times.last().expect("non-empty");
        let end = self.end().value();
        let times = self.times.iter().rev().map(|t| total - t).collect();
        let alphas = self
            .alphas
            .iter()
            .rev()
            .map(|a| Amplitude::new(a.value() - end).expect("finite difference of finite values"))
            .collect();
        Self {
            times,
            alphas,
            branch: self.branch,
        }
    }
}

fn rate(branch: Branch, g: C64) -> C64 {
    // dα/dt = −(i/2) λ g*(t)
    C64::new(0.0, -0.5 * branch.lambda() as f64) * g.conj()
}

pub(crate) fn trajectory_on(pulse: &PulseSpec, branch: Branch, grid: &[Panel]) -> Trajectory {
    let mut times = Vec::with_capacity(grid.len() + 1);
    let mut alphas = Vec::with_capacity(grid.len() + 1);
    times.push(0.0);
    alphas.push(Amplitude::ZERO);
    let mut alpha = C64::new(0.0, 0.0);
    if branch.lambda() != 0 {
        for p in grid {
            let (ga, gb) = p.g_ends(pulse);
            alpha += (rate(branch, ga) + rate(branch, gb)) * (0.5 * p.width());
            times.push(p.b);
            alphas.push(Amplitude::new(alpha).expect("finite pulse gives finite amplitude"));
        }
    } else {
        for p in grid {
            times.push(p.b);
            alphas.push(Amplitude::ZERO);
        }
    }
    Trajectory {
        times,
        alphas,
        branch,
    }
}

/// `α_kl(t)` by cumulative trapezoidal quadrature (exact for piecewise-constant
/// couplings) on a grid of about `n_samples − 1` panels.
pub fn alpha_trajectory(pulse: &PulseSpec, branch: Branch, n_samples: usize) -> Result<Trajectory> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter {
            field: "n_samples",
            reason: format!("need >= 2, got {n_samples}"),
        });
    }
    Ok(trajectory_on(pulse, branch, &panels(pulse, n_samples - 1)))
}

/// `|α(T)|` on a fine grid; zero means the evolution is cyclic.
pub fn loop_closure_residual(pulse: &PulseSpec, branch: Branch) -> f64 {
    trajectory_on(pulse, branch, &panels(pulse, CLOSURE_PANELS))
        .end()
        .norm()
}

/// Accumulates `Π_n D(Δα_n)` over midpoint-sampled steps, composing each new
/// displacement on the left.
pub fn propagate_displacement(
    pulse: &PulseSpec,
    branch: Branch,
    n_steps: usize,
) -> Result<DisplacementPropagation> {
    if n_steps < 1 {
        return Err(Error::InvalidParameter {
            field: "n_steps",
            reason: "need >= 1".into(),
        });
    }
    let grid = panels(pulse, n_steps);
    let mut alpha = Amplitude::ZERO;
    let mut phase = 0.0;
    if branch.lambda() != 0 {
        for p in &grid {
            let step = Amplitude::new(rate(branch, pulse.g_in(&p.piece, p.midpoint())) * p.width())
                .expect("finite pulse gives finite step");
            phase += compose_phase(step, alpha);
            alpha = Amplitude::new(alpha.value() + step.value()).expect("finite sum");
        }
    }
    Ok(DisplacementPropagation {
        branch,
        phase,
        residual_displacement: alpha,
        step_count: grid.len(),
    })
}

fn check_window(pulse: &PulseSpec, t0: f64, t1: f64, dt: f64) -> Result<usize> {
    let slack = 1e-12 * pulse.period().max(1.0);
    if !(t0 >= -slack && t1 > t0 && t1 <= pulse.period() + slack) {
        return Err(Error::InvalidParameter {
            field: "t0/t1",
            reason: format!(
                "need 0 <= t0 < t1 <= T = {}, got [{t0}, {t1}]",
                pulse.period()
            ),
        });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: format!("must be finite and > 0, got {dt}"),
        });
    }
    Ok((Float::ceil((t1 - t0) / dt - 1e-9) as usize).max(1))
}

/// Propagates a block of column states from `t0` to `t1` with midpoint steps
/// of at most `dt`.
pub fn propagate_block(
    tier: HamiltonianTier,
    pulse: &PulseSpec,
    space: FockSpace,
    t0: f64,
    t1: f64,
    dt: f64,
    initial: &CMatrix,
) -> Result<NumericPropagation> {
    assert_eq!(
        initial.rows(),
        4 * space.dim(),
        "initial block has the wrong row count"
    );
    let steps = check_window(pulse, t0, t1, dt)?;
    let h = (t1 - t0) / steps as f64;
    let mut block = initial.clone();
    let scale = C64::new(0.0, -h);
    for n in 0..steps {
        let t_mid = t0 + (n as f64 + 0.5) * h;
        tier.sparse(pulse, t_mid, space)
            .expm_apply(scale, &mut block);
    }
    let gram0 = initial.adjoint().matmul(initial);
    let residual = (&block.adjoint().matmul(&block) - &gram0).max_abs();
    if !(residual < UNITARITY_TOLERANCE) {
        return Err(Error::NonUnitaryResult {
            residual,
            tolerance: UNITARITY_TOLERANCE,
        });
    }
    Ok(NumericPropagation {
        unitary: block,
        step_count: steps,
        unitarity_residual: residual,
    })
}

/// `U(t1, t0) ≈ Π_n exp(−i H(t_n) Δt)` with `t_n = t0 + (n − ½)Δt`.
pub fn propagate_numeric(
    tier: HamiltonianTier,
    pulse: &PulseSpec,
    space: FockSpace,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<NumericPropagation> {
    propagate_block(
        tier,
        pulse,
        space,
        t0,
        t1,
        dt,
        &CMatrix::identity(4 * space.dim()),
    )
}

/// Propagates a single state over the full cycle.
pub fn evolve_state(
    tier: HamiltonianTier,
    pulse: &PulseSpec,
    space: FockSpace,
    dt: f64,
    psi0: &[C64],
) -> Result<Vec<C64>> {
    let block = CMatrix::from_rows(psi0.len(), 1, psi0.to_vec());
    Ok(
        propagate_block(tier, pulse, space, 0.0, pulse.period(), dt, &block)?
            .unitary
            .column(0),
    )
}
