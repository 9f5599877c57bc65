//! Truncated bosonic Fock space: ladder operators, displacement operators and
//! coherent states.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result, Warned, Warning};
use crate::linalg::{normalize, CMatrix};

/// Fock space truncated to the levels `|0⟩ … |dim−1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter {
                field: "dim",
                reason: format!("need dim >= 2, got {dim}"),
            });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when `|alpha|²` is small enough that the truncated operators are
    /// trustworthy.
    pub fn supports(&self, alpha: Amplitude) -> bool {
        alpha.norm_sqr() <= self.dim as f64 / 4.0
    }

    fn guard(&self, alpha: Amplitude) -> Option<Warning> {
        (!self.supports(alpha)).then(|| Warning::Truncation {
            alpha_sq: alpha.norm_sqr(),
            dim: self.dim,
        })
    }
}

/// A finite complex phase-space amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Amplitude(C64);

impl Amplitude {
    pub const ZERO: Self = Self(C64 { re: 0.0, im: 0.0 });

    pub fn new(value: C64) -> Result<Self> {
        if value.re.is_finite() && value.im.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter {
                field: "amplitude",
                reason: format!("non-finite value {value}"),
            })
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(C64::new(re, im))
    }

    pub fn value(self) -> C64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(self) -> f64 {
        self.0.norm_sqr()
    }
}

impl From<Amplitude> for C64 {
    fn from(a: Amplitude) -> C64 {
        a.0
    }
}

/// Annihilation operator `a`, with `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(space: FockSpace) -> CMatrix {
    let mut a = CMatrix::zeros(space.dim, space.dim);
    for n in 1..space.dim {
        a[(n - 1, n)] = C64::new(Float::sqrt(n as f64), 0.0);
    }
    a
}

/// Creation operator `a†`.
pub fn creation(space: FockSpace) -> CMatrix {
    annihilation(space).adjoint()
}

/// Number operator `a†a`, built directly as `diag(0, 1, …, dim−1)`.
pub fn number(space: FockSpace) -> CMatrix {
    let diag: Vec<C64> = (0..space.dim).map(|n| C64::new(n as f64, 0.0)).collect();
    CMatrix::diagonal(&diag)
}

/// Displacement operator `D(α) = exp(α a† − α* a)` in the truncated space.
pub fn displacement(alpha: Amplitude, space: FockSpace) -> Warned<CMatrix> {
    let a = annihilation(space);
    let generator = &creation(space).scale(alpha.value()) - &a.scale(alpha.value().conj());
    Warned {
        value: generator.expm(),
        warnings: space.guard(alpha).into_iter().collect(),
    }
}

/// Phase picked up when composing displacements:
/// `D(α)D(β) = exp(i·Im(αβ*)) D(α+β)`.
pub fn compose_phase(alpha: Amplitude, beta: Amplitude) -> f64 {
    (alpha.value() * beta.value().conj()).im
}

/// Coherent state `|α⟩`, renormalized after truncation.
pub fn coherent_state(alpha: Amplitude, space: FockSpace) -> Warned<Vec<C64>> {
    let a = alpha.value();
    let prefactor = Float::exp(-0.5 * alpha.norm_sqr());
    let mut coeffs = Vec::with_capacity(space.dim);
    // αⁿ/√n! built iteratively to avoid overflow in n!.
    let mut c = C64::new(prefactor, 0.0);
    coeffs.push(c);
    for n in 1..space.dim {
        c = c * a / Float::sqrt(n as f64);
        coeffs.push(c);
    }
    normalize(&mut coeffs);
    Warned {
        value: coeffs,
        warnings: space.guard(alpha).into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;

    fn amp(re: f64, im: f64) -> Amplitude {
        Amplitude::from_parts(re, im).unwrap()
    }

    #[test]
    fn dimension_must_be_at_least_two() {
        assert!(FockSpace::new(1).is_err());
        assert!(FockSpace::new(0).is_err());
        assert!(FockSpace::new(2).is_ok());
    }

    #[test]
    fn non_finite_amplitude_rejected() {
        assert!(Amplitude::from_parts(f64::NAN, 0.0).is_err());
        assert!(Amplitude::from_parts(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn annihilation_dim2() {
        let a = annihilation(FockSpace::new(2).unwrap());
        assert_eq!(a[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(a[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(a[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(a[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn annihilation_dim3_entries() {
        let a = annihilation(FockSpace::new(3).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let want = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 2) => 2f64.sqrt(),
                    _ => 0.0,
                };
                assert_eq!(a[(i, j)], C64::new(want, 0.0), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn number_operator_spectrum_is_exact() {
        let space = FockSpace::new(7).unwrap();
        let a = annihilation(space);
        let n = a.adjoint().matmul(&a);
        for k in 0..7 {
            assert!((n[(k, k)] - C64::new(k as f64, 0.0)).norm() < 1e-14);
        }
        let exact = number(space);
        for k in 0..7 {
            assert_eq!(exact[(k, k)], C64::new(k as f64, 0.0));
        }
    }

    #[test]
    fn zero_displacement_is_identity() {
        let space = FockSpace::new(8).unwrap();
        let d = displacement(Amplitude::ZERO, space).value;
        assert!((&d - &CMatrix::identity(8)).max_abs() < 1e-15);
    }

    #[test]
    fn displacement_inverse() {
        let space = FockSpace::new(32).unwrap();
        let alpha = amp(0.3, 0.4);
        let d = displacement(alpha, space).value;
        let dinv = displacement(amp(-0.3, -0.4), space).value;
        assert!((&d.matmul(&dinv) - &CMatrix::identity(32)).max_abs() < 1e-10);
    }

    #[test]
    fn displacement_column_zero_is_closed_form_coherent_state() {
        let space = FockSpace::new(32).unwrap();
        let alpha = amp(0.3, -0.4);
        let d = displacement(alpha, space).value;
        // closed form e^{-|α|²/2} αⁿ/√n!, with n! accumulated as a float
        let mut fact = 1.0;
        for n in 0..32 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-0.5 * alpha.norm_sqr()).exp() * alpha.value().powu(n as u32) / fact.sqrt();
            assert!((d[(n, 0)] - want).norm() < 1e-10, "n = {n}");
        }
        let coh = coherent_state(alpha, space).value;
        for n in 0..32 {
            assert!((d[(n, 0)] - coh[n]).norm() < 1e-10);
        }
    }

    #[test]
    fn compose_phase_examples() {
        assert_eq!(compose_phase(amp(1.0, 0.0), amp(0.0, 1.0)), -1.0);
        let a = amp(0.7, -1.3);
        assert_eq!(compose_phase(a, a), 0.0);
    }

    #[test]
    fn composition_identity_holds_in_truncated_space() {
        let space = FockSpace::new(32).unwrap();
        let a = amp(0.2, 0.45);
        let b = amp(-0.35, 0.1);
        let lhs = displacement(a, space)
            .value
            .matmul(&displacement(b, space).value);
        let sum = Amplitude::new(a.value() + b.value()).unwrap();
        let rhs = displacement(sum, space)
            .value
            .scale(C64::from_polar(1.0, compose_phase(a, b)));
        // [a, a†] = 1 fails on the top level, so only the lower half is compared.
        for i in 0..16 {
            for j in 0..16 {
                assert!((lhs[(i, j)] - rhs[(i, j)]).norm() < 1e-8, "({i},{j})");
            }
        }
    }

    #[test]
    fn coherent_state_vacuum_and_norm() {
        let space = FockSpace::new(16).unwrap();
        let vac = coherent_state(Amplitude::ZERO, space).value;
        assert_eq!(vac[0], C64::new(1.0, 0.0));
        assert!(vac[1..].iter().all(|z| *z == C64::new(0.0, 0.0)));
        let psi = coherent_state(amp(1.1, 0.3), space).value;
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_is_eigenvector_of_annihilation() {
        let space = FockSpace::new(32).unwrap();
        let alpha = amp(0.4, 0.3);
        let psi = coherent_state(alpha, space).value;
        let a_psi = annihilation(space).mul_vec(&psi);
        assert!((inner(&psi, &a_psi) - alpha.value()).norm() < 1e-8);
    }

    #[test]
    fn truncation_warning_threshold() {
        let space = FockSpace::new(16).unwrap();
        assert!(!displacement(amp(2.0, 0.0), space).has_warnings());
        assert!(displacement(amp(2.01, 0.0), space).has_warnings());
        assert!(coherent_state(amp(0.0, 2.5), space).has_warnings());
    }
}
