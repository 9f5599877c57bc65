//! Pulse shapes, effective Raman couplings and the three Hamiltonian tiers on
//! the composite space qubit₁ ⊗ qubit₂ ⊗ Fock(dim).
//!
//! Bare qubit basis is `{|g⟩, |e⟩}` (index 0 and 1), `σ⁺ = |e⟩⟨g|`. The
//! composite index of `|q₁ q₂ n⟩` is `(2 q₁ + q₂)·dim + n`. Computational
//! branches are the σˣ eigenproducts in the order (++, +−, −+, −−), with
//! `|±⟩ = (|g⟩ ± |e⟩)/√2`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::linalg::{CMatrix, SparseMatrix};

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Absolute tolerance on `Σ durations − T` for segmented pulses.
pub const DURATION_TOLERANCE: f64 = 1e-12;

/// Computational-basis branch `|k⟩₁|l⟩₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch::PlusPlus,
        Branch::PlusMinus,
        Branch::MinusPlus,
        Branch::MinusMinus,
    ];

    /// Eigenvalue of `σ₁ˣ + σ₂ˣ` on this branch.
    pub fn lambda(self) -> i32 {
        match self {
            Branch::PlusPlus => 2,
            Branch::PlusMinus | Branch::MinusPlus => 0,
            Branch::MinusMinus => -2,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::PlusPlus => "++",
            Branch::PlusMinus => "+-",
            Branch::MinusPlus => "-+",
            Branch::MinusMinus => "--",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.label() == label)
    }
}

impl core::fmt::Display for Branch {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// `λ_kl` in branch order (++, +−, −+, −−).
pub fn lambda_values() -> [i32; 4] {
    Branch::ALL.map(Branch::lambda)
}

/// Raman-transition parameters, with the dipole–field products supplied as
/// scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanParams {
    pub omega_p: f64,
    pub omega_s: f64,
    pub omega_g: f64,
    pub omega_c: f64,
    pub omega_0: f64,
    pub rabi_p: C64,
    pub rabi_s: C64,
    pub rabi_g: C64,
    pub kappa_e: C64,
    pub delta_1: f64,
    pub delta_2: f64,
}

impl RamanParams {
    /// Validates Raman resonance on both channels and nonzero detunings.
    pub fn validate(&self) -> Result<()> {
        let scale = [
            self.omega_p,
            self.omega_s,
            self.omega_g,
            self.omega_c,
            self.omega_0,
            1.0,
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);
        let tol = 1e-12 * scale;
        let classical = (self.omega_p - self.omega_s) - self.omega_0;
        if !(Float::abs(classical) <= tol) {
            return Err(Error::InvalidParameter {
                field: "omega_p",
                reason: format!("classical channel off Raman resonance by {classical}"),
            });
        }
        let quantum = (self.omega_g - self.omega_c) - self.omega_0;
        if !(Float::abs(quantum) <= tol) {
            return Err(Error::InvalidParameter {
                field: "omega_g",
                reason: format!("quantum channel off Raman resonance by {quantum}"),
            });
        }
        for (field, d) in [("delta_1", self.delta_1), ("delta_2", self.delta_2)] {
            if d == 0.0 || !d.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("detuning must be finite and nonzero, got {d}"),
                });
            }
        }
        Ok(())
    }
}

/// Effective classical and quantum couplings `(r, g)` after eliminating the
/// excited level.
pub fn effective_couplings(params: &RamanParams) -> Result<(C64, C64)> {
    params.validate()?;
    let r = -(params.rabi_p * params.rabi_s.conj()) / params.delta_1;
    let g = -(params.rabi_g * params.kappa_e.conj()) / params.delta_2;
    Ok((r, g))
}

/// One constant stretch of a piecewise-constant coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub g: C64,
}

/// Time dependence of the effective quantum coupling `g(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// `g(t) = g0·exp(i(phase0 − nu·t))`.
    Circular { g0: f64, nu: f64, phase0: f64 },
    /// Right-continuous steps.
    PiecewiseConstant { segments: Vec<Segment> },
    /// Samples at `t = k·dt`, linearly interpolated.
    Sampled { dt: f64, values: Vec<C64> },
}

/// Coupling shape plus constant classical drive `r0` and cycle duration.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    shape: PulseShape,
    r0: f64,
    period: f64,
}

fn invalid(field: &'static str, reason: alloc::string::String) -> Error {
    Error::InvalidParameter { field, reason }
}

impl PulseSpec {
    pub fn new(shape: PulseShape, r0: f64, period: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(invalid(
                "period",
                format!("must be finite and > 0, got {period}"),
            ));
        }
        if !(r0 >= 0.0) || !r0.is_finite() {
            return Err(invalid("r0", format!("must be finite and >= 0, got {r0}")));
        }
        match &shape {
            PulseShape::Circular { g0, nu, phase0 } => {
                if !(*g0 > 0.0) || !g0.is_finite() {
                    return Err(invalid("g0", format!("must be finite and > 0, got {g0}")));
                }
                if *nu == 0.0 || !nu.is_finite() {
                    return Err(invalid(
                        "nu",
                        format!("must be finite and nonzero, got {nu}"),
                    ));
                }
                if !phase0.is_finite() {
                    return Err(invalid("phase0", format!("must be finite, got {phase0}")));
                }
            }
            PulseShape::PiecewiseConstant { segments } => {
                if segments.is_empty() {
                    return Err(invalid(
                        "segments",
                        "at least one segment is required".into(),
                    ));
                }
                for s in segments {
                    if !(s.duration > 0.0) || !s.duration.is_finite() {
                        return Err(invalid(
                            "segments",
                            format!("durations must be finite and > 0, got {}", s.duration),
                        ));
                    }
                    if !(s.g.re.is_finite() && s.g.im.is_finite()) {
                        return Err(invalid("segments", format!("non-finite coupling {}", s.g)));
                    }
                }
                let total: f64 = segments.iter().map(|s| s.duration).sum();
                if Float::abs(total - period) > DURATION_TOLERANCE * period.max(1.0) {
                    return Err(invalid(
                        "segments",
                        format!("durations sum to {total}, period is {period}"),
                    ));
                }
            }
            PulseShape::Sampled { dt, values } => {
                if !(*dt > 0.0) || !dt.is_finite() {
                    return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
                }
                if values.len() < 2 {
                    return Err(invalid(
                        "values",
                        "at least two samples are required".into(),
                    ));
                }
                if values
                    .iter()
                    .any(|v| !(v.re.is_finite() && v.im.is_finite()))
                {
                    return Err(invalid("values", "non-finite sample".into()));
                }
                let total = dt * (values.len() - 1) as f64;
                if Float::abs(total - period) > DURATION_TOLERANCE * period.max(1.0) {
                    return Err(invalid(
                        "values",
                        format!("samples span {total}, period is {period}"),
                    ));
                }
            }
        }
        Ok(Self { shape, r0, period })
    }

    /// Circular pulse running for `loops` full turns.
    pub fn circular(g0: f64, nu: f64, phase0: f64, loops: u32) -> Result<Self> {
        if loops == 0 {
            return Err(invalid("loops", "must be >= 1".into()));
        }
        let period = loops as f64 * core::f64::consts::TAU / Float::abs(nu);
        Self::new(PulseShape::Circular { g0, nu, phase0 }, 0.0, period)
    }

    /// Piecewise-constant pulse whose period is the sum of the durations.
    pub fn piecewise(segments: Vec<Segment>) -> Result<Self> {
        let period = segments.iter().map(|s| s.duration).sum();
        Self::new(PulseShape::PiecewiseConstant { segments }, 0.0, period)
    }

    /// `g ≡ 0` for the given duration.
    pub fn zero(period: f64) -> Result<Self> {
        Self::piecewise(vec![Segment {
            duration: period,
            g: C64::new(0.0, 0.0),
        }])
    }

    pub fn with_r0(mut self, r0: f64) -> Result<Self> {
        if !(r0 >= 0.0) || !r0.is_finite() {
            return Err(invalid("r0", format!("must be finite and >= 0, got {r0}")));
        }
        self.r0 = r0;
        Ok(self)
    }

    pub fn shape(&self) -> &PulseShape {
        &self.shape
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// `g(t)`. Times outside `[0, T]` are clamped.
    pub fn g(&self, t: f64) -> C64 {
        let t = t.clamp(0.0, self.period);
        match &self.shape {
            PulseShape::Circular { g0, nu, phase0 } => C64::from_polar(*g0, phase0 - nu * t),
            PulseShape::PiecewiseConstant { segments } => {
                let mut start = 0.0;
                for s in segments {
                    if t < start + s.duration {
                        return s.g;
                    }
                    start += s.duration;
                }
                segments.last().expect("validated non-empty").g
            }
            PulseShape::Sampled { dt, values } => {
                let last = values.len() - 1;
                let k = Float::floor(t / dt) as usize;
                if k >= last {
                    return values[last];
                }
                let w = t / dt - k as f64;
                values[k] * (1.0 - w) + values[k + 1] * w
            }
        }
    }

    /// Intervals on which `g` is smooth, with `g` on each closed interval.
    ///
    /// Quadratures and step grids are aligned to these so that jumps in a
    /// piecewise-constant coupling never fall inside a panel.
    pub(crate) fn pieces(&self) -> Vec<Piece> {
        match &self.shape {
            PulseShape::Circular { .. } => vec![Piece {
                start: 0.0,
                end: self.period,
                kind: PieceKind::Smooth,
            }],
            PulseShape::PiecewiseConstant { segments } => {
                let mut start = 0.0;
                let mut out = Vec::with_capacity(segments.len());
                for (i, s) in segments.iter().enumerate() {
                    let end = if i + 1 == segments.len() {
                        self.period
                    } else {
                        start + s.duration
                    };
                    out.push(Piece {
                        start,
                        end,
                        kind: PieceKind::Constant(s.g),
                    });
                    start = end;
                }
                out
            }
            PulseShape::Sampled { dt, values } => (0..values.len() - 1)
                .map(|k| Piece {
                    start: k as f64 * dt,
                    end: if k + 2 == values.len() {
                        self.period
                    } else {
                        (k + 1) as f64 * dt
                    },
                    kind: PieceKind::Linear(values[k], values[k + 1]),
                })
                .collect(),
        }
    }

    /// `g(t)` evaluated within `piece`, so endpoint values use that piece's
    /// one-sided limit.
    pub(crate) fn g_in(&self, piece: &Piece, t: f64) -> C64 {
        match piece.kind {
            PieceKind::Smooth => self.g(t),
            PieceKind::Constant(g) => g,
            PieceKind::Linear(a, b) => {
                let w = ((t - piece.start) / (piece.end - piece.start)).clamp(0.0, 1.0);
                a * (1.0 - w) + b * w
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub start: f64,
    pub end: f64,
    pub kind: PieceKind,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum PieceKind {
    Smooth,
    Constant(C64),
    Linear(C64, C64),
}

/// Model level used to build `H(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianTier {
    /// Classical plus quantum Raman couplings in the bare frame.
    FullEffective,
    /// Interaction picture with respect to the classical drive, before the
    /// rotating-wave approximation.
    RotatingFrame,
    /// Rotating-wave approximation: `½(g a + g* a†)(σ₁ˣ + σ₂ˣ)`.
    RwaEffective,
}

impl HamiltonianTier {
    pub fn sparse(self, pulse: &PulseSpec, t: f64, space: FockSpace) -> SparseMatrix {
        self.sparse_with_g(pulse, pulse.g(t), t, space)
    }

    pub(crate) fn sparse_with_g(
        self,
        pulse: &PulseSpec,
        g: C64,
        t: f64,
        space: FockSpace,
    ) -> SparseMatrix {
        match self {
            HamiltonianTier::FullEffective => full_terms(pulse.r0(), g, space),
            HamiltonianTier::RotatingFrame => rotating_terms(pulse.r0(), g, t, space),
            HamiltonianTier::RwaEffective => rwa_terms(g, space),
        }
    }

    pub fn hamiltonian(self, pulse: &PulseSpec, t: f64, space: FockSpace) -> CMatrix {
        self.sparse(pulse, t, space).to_dense()
    }
}

#[derive(Clone, Copy)]
enum Ladder {
    Identity,
    Lower,
    Raise,
}

/// Accumulates `Σ coeff · Q ⊗ F` where `Q` is a two-qubit operator and `F` a
/// Fock-space ladder operator.
struct TermBuilder {
    dim: usize,
    triplets: Vec<(usize, usize, C64)>,
}

impl TermBuilder {
    fn new(space: FockSpace) -> Self {
        Self {
            dim: space.dim(),
            triplets: Vec::new(),
        }
    }

    fn add(&mut self, qubits: &[[C64; 4]; 4], ladder: Ladder, coeff: C64) {
        if coeff == C64::new(0.0, 0.0) {
            return;
        }
        let d = self.dim;
        for (qi, row) in qubits.iter().enumerate() {
            for (qj, &q) in row.iter().enumerate() {
                if q == C64::new(0.0, 0.0) {
                    continue;
                }
                let c = coeff * q;
                match ladder {
                    Ladder::Identity => {
                        for n in 0..d {
                            self.triplets.push((qi * d + n, qj * d + n, c));
                        }
                    }
                    // ⟨n−1|a|n⟩ = √n
                    Ladder::Lower => {
                        for n in 1..d {
                            self.triplets.push((
                                qi * d + n - 1,
                                qj * d + n,
                                c * Float::sqrt(n as f64),
                            ));
                        }
                    }
                    Ladder::Raise => {
                        for n in 1..d {
                            self.triplets.push((
                                qi * d + n,
                                qj * d + n - 1,
                                c * Float::sqrt(n as f64),
                            ));
                        }
                    }
                }
            }
        }
    }

    fn finish(self) -> SparseMatrix {
        SparseMatrix::from_triplets(4 * self.dim, self.triplets)
    }
}

type Qubit = [[C64; 2]; 2];

const fn c(re: f64, im: f64) -> C64 {
    C64 { re, im }
}

const ZERO: C64 = c(0.0, 0.0);
const ONE: C64 = c(1.0, 0.0);
const HALF: C64 = c(0.5, 0.0);
const SIGMA_PLUS: Qubit = [[ZERO, ZERO], [ONE, ZERO]];
const SIGMA_MINUS: Qubit = [[ZERO, ONE], [ZERO, ZERO]];
const EYE: Qubit = [[ONE, ZERO], [ZERO, ONE]];
const SIGMA_X: Qubit = [[ZERO, ONE], [ONE, ZERO]];
// |+⟩⟨−| and |−⟩⟨+| written in the bare basis.
const PLUS_MINUS: Qubit = [[HALF, c(-0.5, 0.0)], [HALF, c(-0.5, 0.0)]];
const MINUS_PLUS: Qubit = [[HALF, HALF], [c(-0.5, 0.0), c(-0.5, 0.0)]];

fn kron2(a: &Qubit, b: &Qubit) -> [[C64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

fn on_qubit(j: usize, op: &Qubit) -> [[C64; 4]; 4] {
    if j == 0 {
        kron2(op, &EYE)
    } else {
        kron2(&EYE, op)
    }
}

fn full_terms(r: f64, g: C64, space: FockSpace) -> SparseMatrix {
    let mut b = TermBuilder::new(space);
    let r = C64::new(r, 0.0);
    for j in 0..2 {
        b.add(&on_qubit(j, &SIGMA_PLUS), Ladder::Identity, r);
        b.add(&on_qubit(j, &SIGMA_MINUS), Ladder::Identity, r.conj());
        b.add(&on_qubit(j, &SIGMA_PLUS), Ladder::Lower, g);
        b.add(&on_qubit(j, &SIGMA_MINUS), Ladder::Raise, g.conj());
    }
    b.finish()
}

fn rotating_terms(r0: f64, g: C64, t: f64, space: FockSpace) -> SparseMatrix {
    // K = |+⟩⟨+| − |−⟩⟨−| + e^{i2r0t}|+⟩⟨−| − e^{−i2r0t}|−⟩⟨+|, H = ½ Σ_j K_j g a + h.c.
    let phase = C64::from_polar(1.0, 2.0 * r0 * t);
    let mut k: Qubit = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            k[i][j] = SIGMA_X[i][j] + phase * PLUS_MINUS[i][j] - phase.conj() * MINUS_PLUS[i][j];
        }
    }
    let k_dag: Qubit = [
        [k[0][0].conj(), k[1][0].conj()],
        [k[0][1].conj(), k[1][1].conj()],
    ];
    let mut b = TermBuilder::new(space);
    for j in 0..2 {
        b.add(&on_qubit(j, &k), Ladder::Lower, g * 0.5);
        b.add(&on_qubit(j, &k_dag), Ladder::Raise, g.conj() * 0.5);
    }
    b.finish()
}

fn rwa_terms(g: C64, space: FockSpace) -> SparseMatrix {
    let mut b = TermBuilder::new(space);
    for j in 0..2 {
        b.add(&on_qubit(j, &SIGMA_X), Ladder::Lower, g * 0.5);
        b.add(&on_qubit(j, &SIGMA_X), Ladder::Raise, g.conj() * 0.5);
    }
    b.finish()
}

/// Bare-frame Hamiltonian: classical drive `r0` plus quantum coupling `g(t)`.
pub fn hamiltonian_full(pulse: &PulseSpec, t: f64, space: FockSpace) -> CMatrix {
    HamiltonianTier::FullEffective.hamiltonian(pulse, t, space)
}

/// Quantum coupling in the interaction picture of the classical drive
/// (keeps the terms oscillating at `2·r0`).
pub fn hamiltonian_rotating(pulse: &PulseSpec, t: f64, space: FockSpace) -> CMatrix {
    HamiltonianTier::RotatingFrame.hamiltonian(pulse, t, space)
}

/// Rotating-wave Hamiltonian `½(g a + g* a†)(σ₁ˣ + σ₂ˣ)`.
pub fn hamiltonian_rwa(pulse: &PulseSpec, t: f64, space: FockSpace) -> CMatrix {
    HamiltonianTier::RwaEffective.hamiltonian(pulse, t, space)
}

/// Change of basis whose columns are `|++⟩, |+−⟩, |−+⟩, |−−⟩` expressed in the
/// bare basis `|gg⟩, |ge⟩, |eg⟩, |ee⟩`.
pub fn sigma_x_basis_change() -> CMatrix {
    let h = CMatrix::from_rows(
        2,
        2,
        vec![
            c(FRAC_1_SQRT_2, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
            c(-FRAC_1_SQRT_2, 0.0),
        ],
    );
    h.kron(&h)
}

/// `|kl⟩ ⊗ |0⟩` on the composite space.
pub fn branch_vacuum_state(branch: Branch, space: FockSpace) -> Vec<C64> {
    let basis = sigma_x_basis_change();
    let mut psi = vec![ZERO; 4 * space.dim()];
    for q in 0..4 {
        psi[q * space.dim()] = basis[(q, branch.index())];
    }
    psi
}

/// Single-qubit operator embedded on the composite space (identity on the
/// other qubit and the cavity).
pub fn qubit_operator(qubit: usize, op: &CMatrix, space: FockSpace) -> CMatrix {
    assert!(qubit < 2 && op.rows() == 2 && op.cols() == 2);
    let eye2 = CMatrix::identity(2);
    let two = if qubit == 0 {
        op.kron(&eye2)
    } else {
        eye2.kron(op)
    };
    two.kron(&CMatrix::identity(space.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{annihilation, creation};

    fn space(d: usize) -> FockSpace {
        FockSpace::new(d).unwrap()
    }

    fn raman() -> RamanParams {
        RamanParams {
            omega_p: 10.0,
            omega_s: 7.0,
            omega_g: 9.0,
            omega_c: 6.0,
            omega_0: 3.0,
            rabi_p: c(1.0, 0.0),
            rabi_s: c(1.0, 0.0),
            rabi_g: c(0.0, 0.0),
            kappa_e: c(0.3, 0.1),
            delta_1: 2.0,
            delta_2: 5.0,
        }
    }

    #[test]
    fn effective_couplings_examples() {
        let (r, g) = effective_couplings(&raman()).unwrap();
        assert_eq!(r, c(-0.5, 0.0));
        assert_eq!(g, c(0.0, 0.0));
        let p = RamanParams {
            rabi_p: c(2.0, 0.0),
            rabi_s: c(0.0, 1.0),
            delta_1: 4.0,
            ..raman()
        };
        let (r, _) = effective_couplings(&p).unwrap();
        assert!((r - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn raman_validation_rejects_detuned_or_zero_delta() {
        assert!(effective_couplings(&RamanParams {
            omega_s: 6.5,
            ..raman()
        })
        .is_err());
        assert!(effective_couplings(&RamanParams {
            omega_c: 6.5,
            ..raman()
        })
        .is_err());
        assert!(effective_couplings(&RamanParams {
            delta_1: 0.0,
            ..raman()
        })
        .is_err());
        assert!(effective_couplings(&RamanParams {
            delta_2: 0.0,
            ..raman()
        })
        .is_err());
    }

    #[test]
    fn lambda_values_in_branch_order() {
        assert_eq!(lambda_values(), [2, 0, 0, -2]);
        assert_eq!(lambda_values().iter().sum::<i32>(), 0);
        assert_eq!(Branch::PlusPlus.lambda(), 2);
        assert_eq!(Branch::PlusMinus.lambda(), 0);
    }

    #[test]
    fn pulse_validation() {
        assert!(PulseSpec::new(
            PulseShape::Circular {
                g0: 0.0,
                nu: 0.2,
                phase0: 0.0
            },
            0.0,
            1.0
        )
        .is_err());
        assert!(PulseSpec::new(
            PulseShape::Circular {
                g0: 0.1,
                nu: 0.0,
                phase0: 0.0
            },
            0.0,
            1.0
        )
        .is_err());
        assert!(PulseSpec::new(
            PulseShape::Circular {
                g0: 0.1,
                nu: 0.2,
                phase0: 0.0
            },
            -1.0,
            1.0
        )
        .is_err());
        let segs = vec![
            Segment {
                duration: 1.0,
                g: ONE,
            },
            Segment {
                duration: 2.0,
                g: ONE,
            },
        ];
        assert!(PulseSpec::new(
            PulseShape::PiecewiseConstant {
                segments: segs.clone()
            },
            0.0,
            3.5
        )
        .is_err());
        assert!(PulseSpec::new(PulseShape::PiecewiseConstant { segments: segs }, 0.0, 3.0).is_ok());
        assert!(PulseSpec::new(
            PulseShape::Sampled {
                dt: 0.5,
                values: vec![ONE; 5]
            },
            0.0,
            2.0
        )
        .is_ok());
        assert!(PulseSpec::new(
            PulseShape::Sampled {
                dt: 0.5,
                values: vec![ONE; 5]
            },
            0.0,
            2.1
        )
        .is_err());
    }

    #[test]
    fn piecewise_is_right_continuous() {
        let p = PulseSpec::piecewise(vec![
            Segment {
                duration: 1.0,
                g: ONE,
            },
            Segment {
                duration: 1.0,
                g: c(0.0, 2.0),
            },
        ])
        .unwrap();
        assert_eq!(p.g(0.999), ONE);
        assert_eq!(p.g(1.0), c(0.0, 2.0));
        assert_eq!(p.g(2.0), c(0.0, 2.0));
    }

    #[test]
    fn sampled_is_linearly_interpolated() {
        let p = PulseSpec::new(
            PulseShape::Sampled {
                dt: 1.0,
                values: vec![ZERO, c(2.0, -2.0), ZERO],
            },
            0.0,
            2.0,
        )
        .unwrap();
        assert_eq!(p.g(0.25), c(0.5, -0.5));
        assert_eq!(p.g(1.5), c(1.0, -1.0));
        assert_eq!(p.g(2.0), ZERO);
    }

    #[test]
    fn circular_pulse_values() {
        let p = PulseSpec::circular(0.1, 0.2, 0.3, 1).unwrap();
        let t = 1.7;
        assert!((p.g(t) - C64::from_polar(0.1, 0.3 - 0.2 * t)).norm() < 1e-16);
        assert_eq!(p.g(t), p.g(t));
    }

    fn sample_pulse() -> PulseSpec {
        PulseSpec::circular(0.13, -0.37, 0.8, 1)
            .unwrap()
            .with_r0(1.9)
            .unwrap()
    }

    #[test]
    fn all_tiers_are_hermitian() {
        let p = sample_pulse();
        let sp = space(6);
        for &t in &[0.0, 0.31, 4.2, p.period()] {
            for tier in [
                HamiltonianTier::FullEffective,
                HamiltonianTier::RotatingFrame,
                HamiltonianTier::RwaEffective,
            ] {
                let h = tier.hamiltonian(&p, t, sp);
                assert_eq!(h.rows(), 24);
                assert!(h.hermiticity_residual() < 1e-14, "{tier:?} at t={t}");
            }
        }
    }

    #[test]
    fn zero_coupling_gives_zero_matrix() {
        let p = PulseSpec::zero(3.0).unwrap();
        let sp = space(4);
        assert_eq!(hamiltonian_full(&p, 1.0, sp).max_abs(), 0.0);
        let p = p.with_r0(2.0).unwrap();
        assert_eq!(hamiltonian_rotating(&p, 1.0, sp).max_abs(), 0.0);
        assert_eq!(hamiltonian_rwa(&p, 1.0, sp).max_abs(), 0.0);
    }

    #[test]
    fn full_tier_explicit_form() {
        // Σ_j [r σ_j⁺ + r σ_j⁻] + Σ_j [g a σ_j⁺ + g* a† σ_j⁻] assembled with dense krons.
        let p = sample_pulse();
        let sp = space(5);
        let t = 2.3;
        let g = p.g(t);
        let a = annihilation(sp);
        let ad = creation(sp);
        let sp_m = CMatrix::from_rows(2, 2, vec![ZERO, ZERO, ONE, ZERO]);
        let sm_m = sp_m.adjoint();
        let mut want = CMatrix::zeros(20, 20);
        for j in 0..2 {
            let splus = qubit_operator(j, &sp_m, sp);
            let sminus = qubit_operator(j, &sm_m, sp);
            let a_full = CMatrix::identity(4).kron(&a);
            let ad_full = CMatrix::identity(4).kron(&ad);
            want = &want + &(&splus + &sminus).scale(c(p.r0(), 0.0));
            want = &want + &splus.matmul(&a_full).scale(g);
            want = &want + &sminus.matmul(&ad_full).scale(g.conj());
        }
        assert!((&hamiltonian_full(&p, t, sp) - &want).max_abs() < 1e-15);
    }

    #[test]
    fn rotating_at_zero_drive_equals_quantum_part_of_full() {
        let p = sample_pulse().with_r0(0.0).unwrap();
        let sp = space(6);
        for &t in &[0.0, 1.1, 7.5] {
            let diff = &hamiltonian_rotating(&p, t, sp) - &hamiltonian_full(&p, t, sp);
            assert!(diff.max_abs() < 1e-15);
        }
    }

    #[test]
    fn rwa_commutes_with_each_sigma_x() {
        let p = sample_pulse();
        let sp = space(6);
        let sx = CMatrix::from_rows(2, 2, vec![ZERO, ONE, ONE, ZERO]);
        let h = hamiltonian_rwa(&p, 3.3, sp);
        for j in 0..2 {
            let x = qubit_operator(j, &sx, sp);
            assert!(h.commutator(&x).max_abs() < 1e-13);
        }
    }

    #[test]
    fn rwa_is_time_independent_part_of_rotating() {
        // Averaging the rotating tier over one drive period 2π/(2r0) removes the
        // oscillating terms; g is held fixed for the comparison.
        let shape = PulseShape::PiecewiseConstant {
            segments: vec![Segment {
                duration: 100.0,
                g: c(0.07, -0.02),
            }],
        };
        let p = PulseSpec::new(shape, 1.5, 100.0).unwrap();
        let sp = space(5);
        let period = core::f64::consts::PI / p.r0();
        let n = 64;
        let mut avg = CMatrix::zeros(20, 20);
        for k in 0..n {
            let t = (k as f64 + 0.5) * period / n as f64;
            avg = &avg + &hamiltonian_rotating(&p, t, sp).scale(c(1.0 / n as f64, 0.0));
        }
        assert!((&avg - &hamiltonian_rwa(&p, 0.0, sp)).max_abs() < 1e-15);
    }

    #[test]
    fn rwa_blocks_in_sigma_x_basis_carry_half_lambda() {
        let p = sample_pulse();
        let sp = space(4);
        let t = 0.9;
        let g = p.g(t);
        let h = hamiltonian_rwa(&p, t, sp);
        let u = sigma_x_basis_change().kron(&CMatrix::identity(4));
        let hx = u.adjoint().matmul(&h).matmul(&u);
        let a = annihilation(sp);
        let field = &a.scale(g) + &creation(sp).scale(g.conj());
        for (bi, &lam) in lambda_values().iter().enumerate() {
            for bj in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        let got = hx[(bi * 4 + m, bj * 4 + n)];
                        let want = if bi == bj {
                            field[(m, n)] * (lam as f64 / 2.0)
                        } else {
                            ZERO
                        };
                        assert!((got - want).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn basis_change_properties() {
        let u = sigma_x_basis_change();
        assert!(u.unitarity_residual() < 1e-14);
        assert!((&u.matmul(&u) - &CMatrix::identity(4)).max_abs() < 1e-14);
        for q in 0..4 {
            assert!((u[(q, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn branch_states_are_sigma_x_eigenvectors() {
        let sp = space(3);
        let sx = CMatrix::from_rows(2, 2, vec![ZERO, ONE, ONE, ZERO]);
        for b in Branch::ALL {
            let psi = branch_vacuum_state(b, sp);
            let total = &qubit_operator(0, &sx, sp) + &qubit_operator(1, &sx, sp);
            let out = total.mul_vec(&psi);
            for (o, p) in out.iter().zip(&psi) {
                assert!((o - p * b.lambda() as f64).norm() < 1e-15);
            }
        }
    }
}
