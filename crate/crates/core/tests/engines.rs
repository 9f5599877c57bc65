//! Agreement between the numeric propagator and the displacement product, and
//! the convergence behavior of the numeric engine.

use geophase_core::gate::{branch_matrix, distance_to_trivial};
use geophase_core::*;
use std::f64::consts::FRAC_PI_2;

fn square_loop() -> PulseSpec {
    // four sides of a square in α-space
    let side = |re: f64, im: f64| Segment {
        duration: 2.5,
        g: C64::new(re, im),
    };
    PulseSpec::piecewise(vec![
        side(0.1, 0.0),
        side(0.0, 0.1),
        side(-0.1, 0.0),
        side(0.0, -0.1),
    ])
    .unwrap()
}

fn circle() -> PulseSpec {
    PulseSpec::circular(0.1, 0.2, 0.0, 1).unwrap()
}

#[test]
fn numeric_phases_match_displacement_product_on_every_branch() {
    let space = FockSpace::new(24).unwrap();
    for pulse in [circle(), square_loop()] {
        let numeric = numeric_branch_phases(&pulse, space, pulse.period() / 4000.0).unwrap();
        for b in Branch::ALL {
            let product = propagate_displacement(&pulse, b, 4000).unwrap();
            let gap = distance_to_trivial(numeric[b.index()] - product.phase);
            assert!(
                gap < 1e-5,
                "branch {b}: numeric {} vs {}",
                numeric[b.index()],
                product.phase
            );
        }
    }
}

#[test]
fn cavity_returns_to_vacuum_on_every_branch() {
    let space = FockSpace::new(24).unwrap();
    let pulse = circle();
    let (m, _) = branch_matrix(
        HamiltonianTier::RwaEffective,
        &pulse,
        space,
        pulse.period() / 2000.0,
    )
    .unwrap();
    for b in Branch::ALL {
        let overlap = m[(b.index(), b.index())].norm();
        assert!(
            overlap > 1.0 - 1e-4,
            "branch {b}: |<kl,0|U|kl,0>| = {overlap}"
        );
    }
}

#[test]
fn midpoint_steps_converge_at_second_order() {
    let space = FockSpace::new(16).unwrap();
    let pulse = circle();
    let t = pulse.period();
    let phase = |n: f64| numeric_branch_phases(&pulse, space, t / n).unwrap()[0];
    let reference = phase(2000.0);
    let coarse = (phase(250.0) - reference).abs();
    let fine = (phase(500.0) - reference).abs();
    assert!(coarse / fine >= 3.0, "error ratio {}", coarse / fine);
    assert!((reference - FRAC_PI_2).abs() < 1e-5);
}

#[test]
fn displacement_product_closes_the_loop() {
    for pulse in [circle(), square_loop()] {
        let run = propagate_displacement(&pulse, Branch::PlusPlus, 1000).unwrap();
        assert!(run.residual_displacement.norm() < 1e-12);
        assert!(loop_closure_residual(&pulse, Branch::MinusMinus) < 1e-12);
    }
}

#[test]
fn rotating_frame_becomes_diagonal_as_drive_grows() {
    let pulse = circle();
    let space = FockSpace::new(16).unwrap();
    let report = rwa_error_scan(&pulse, &[1.0, 5.0, 25.0], space, pulse.period() / 8000.0).unwrap();
    let residuals: Vec<f64> = report.rows.iter().map(|r| r.diagonality_residual).collect();
    assert!(
        residuals.windows(2).all(|w| w[1] < w[0]),
        "diagonality residuals {residuals:?}"
    );
}

#[test]
fn scans_are_bit_identical_across_runs() {
    let pulse = circle();
    let space = FockSpace::new(12).unwrap();
    let dt = pulse.period() / 1500.0;
    let a = rwa_error_scan(&pulse, &[2.0, 4.0], space, dt).unwrap();
    let b = rwa_error_scan(&pulse, &[2.0, 4.0], space, dt).unwrap();
    assert_eq!(a, b);
    let a = truncation_scan(&pulse, &[16, 20], dt).unwrap();
    let b = truncation_scan(&pulse, &[16, 20], dt).unwrap();
    assert_eq!(a, b);
}
