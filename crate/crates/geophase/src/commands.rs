//! The five subcommands. Each builds a [`Table`] from library calls; writing
//! it out is left to the caller.

use geophase_core::gate::{entangling_check, nontriviality, GateOptions};
use geophase_core::phase::{
    default_closure_tolerance, enclosed_area_with, phase_breakdown_unchecked, total_phase_with,
    PhaseOptions,
};
use geophase_core::{
    design_circular_pulse, gate_matrix_with, rwa_error_scan, truncation_scan, Branch,
    DesignConstraint, Error, FockSpace, ValidationReport,
};
use rayon::prelude::*;

use crate::config::{circular_pulse_text, RunConfig, SWEEPABLE};
use crate::error::CliError;
use crate::output::{Cell, Table};

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn space(cfg: &RunConfig) -> Result<FockSpace, CliError> {
    FockSpace::new(cfg.dim).map_err(|e| CliError::config("space.dim", e.to_string()))
}

/// Per-branch phase breakdown. Without `allow_open` an open path is a guard
/// failure; with it the residual is reported and the relations are skipped.
pub fn phases(cfg: &RunConfig, allow_open: bool) -> Result<Table, CliError> {
    let mut table = Table::new(
        "phases",
        columns(&[
            "branch",
            "lambda",
            "gamma_g",
            "gamma_d",
            "gamma",
            "closure_residual",
            "enclosed_area",
        ]),
    );
    let opts = PhaseOptions {
        closure_tol: cfg.closure_tol,
    };
    let mut all_closed = true;
    for b in Branch::ALL {
        if !allow_open {
            total_phase_with(&cfg.pulse, b, cfg.n_steps, &opts)?;
        }
        let (p, traj) = phase_breakdown_unchecked(&cfg.pulse, b, cfg.n_steps)?;
        let residual = traj.end().norm();
        let closed = residual <= opts.closure_tolerance(&traj);
        all_closed &= closed;
        // the shoelace sum includes the closing edge back to the origin
        let area = enclosed_area_with(&traj, f64::INFINITY)?;
        table.push(vec![
            b.label().into(),
            Cell::Int(b.lambda() as i64),
            p.gamma_g.into(),
            p.gamma_d.into(),
            p.gamma_total.into(),
            residual.into(),
            area.into(),
        ]);
    }
    if !all_closed {
        eprintln!("warning: open path, the phases are not gauge-invariant and the phase relations were not checked");
    }
    table.summary.push(("closed".into(), all_closed.into()));
    table
        .summary
        .push(("n_steps".into(), Cell::Int(cfg.n_steps as i64)));
    Ok(table)
}

pub fn gate(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut names = columns(&[
        "method",
        "gamma",
        "fidelity",
        "diagonality_residual",
        "closure_residual",
        "unitarity_residual",
        "nontrivial",
        "entanglement_entropy",
    ]);
    for i in 0..4 {
        for j in 0..4 {
            names.push(format!("m{i}{j}_re"));
            names.push(format!("m{i}{j}_im"));
        }
    }
    let opts = GateOptions {
        n_steps: cfg.n_steps,
        closure_tol: cfg.closure_tol,
        ..GateOptions::default()
    };
    let report = gate_matrix_with(&cfg.pulse, space(cfg)?, cfg.method, cfg.step(), &opts)?;
    let mut row = vec![
        report.method.label().into(),
        report.extracted_gamma.into(),
        report.fidelity.into(),
        report.diagonality_residual.into(),
        report.closure_residual.into(),
        report.unitarity_residual.into(),
        report.nontrivial.into(),
        entangling_check(&report).into(),
    ];
    for i in 0..4 {
        for j in 0..4 {
            row.push(report.matrix[(i, j)].re.into());
            row.push(report.matrix[(i, j)].im.into());
        }
    }
    let mut table = Table::new("gate", names);
    table.push(row);
    if report.method.tier().is_some() {
        table.summary.push(("dt".into(), cfg.step().into()));
        table
            .summary
            .push(("dim".into(), Cell::Int(cfg.dim as i64)));
    }
    Ok(table)
}

/// Solves for a circular pulse and returns it in config syntax.
pub fn design(
    target: f64,
    g0: Option<f64>,
    period: Option<f64>,
    loops: u32,
) -> Result<String, CliError> {
    let constraint = match (g0, period) {
        (Some(g0), None) => DesignConstraint::FixedG0(g0),
        (None, Some(t)) => DesignConstraint::FixedPeriod(t),
        _ => {
            return Err(CliError::config(
                "design",
                "give exactly one of --g0 or --period",
            ))
        }
    };
    let designed = design_circular_pulse(target, constraint, loops)?;
    for w in &designed.warnings {
        eprintln!("warning: {w}");
    }
    let body = circular_pulse_text(&designed.value).expect("designer returns a circular pulse");
    Ok(format!(
        "# total phase {target:?} over {loops} loop(s)\n{body}"
    ))
}

fn push_report(table: &mut Table, scan: &str, report: &ValidationReport) {
    for r in &report.rows {
        table.push(vec![
            scan.into(),
            r.parameter_value.into(),
            r.infidelity.into(),
            r.diagonality_residual.into(),
            r.phase_error.into(),
            r.fidelity_change.into(),
        ]);
    }
    table
        .summary
        .push((format!("{scan}_monotone"), report.monotone_flag.into()));
    if let Some(c) = report.converged {
        table.summary.push((format!("{scan}_converged"), c.into()));
    }
}

/// Runs the configured scans. The table is returned even on a regression so
/// that it can be written before the run exits with code 3.
pub fn validate(cfg: &RunConfig) -> Result<(Table, Option<CliError>), CliError> {
    if cfg.r0_values.is_none() && cfg.dims.is_none() {
        return Err(CliError::config("validate", "give r0_values and/or dims"));
    }
    let mut table = Table::new(
        "validate",
        columns(&[
            "scan",
            "parameter",
            "infidelity",
            "diagonality_residual",
            "phase_error",
            "fidelity_change",
        ]),
    );
    let mut regressions = Vec::new();
    if let Some(r0s) = &cfg.r0_values {
        let report = rwa_error_scan(&cfg.pulse, r0s, space(cfg)?, cfg.step())?;
        if !report.monotone_flag {
            regressions.push("rotating-wave infidelity does not decrease with r0");
        }
        push_report(&mut table, "rwa", &report);
    }
    if let Some(dims) = &cfg.dims {
        let report = truncation_scan(&cfg.pulse, dims, cfg.step())?;
        if !report.monotone_flag {
            regressions.push("infidelity grows with the Fock dimension");
        }
        if report.converged == Some(false) {
            eprintln!("warning: truncation scan has not converged at the largest dimension");
        }
        push_report(&mut table, "truncation", &report);
    }
    let regression =
        (!regressions.is_empty()).then(|| CliError::Regression(regressions.join("; ")));
    Ok((table, regression))
}

/// Grid points in row-major order: the first axis varies slowest.
fn grid(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for values in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

pub fn sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let axes = &cfg.sweep_axes;
    if axes.is_empty() {
        return Err(CliError::config(
            "sweep.axis",
            format!("no axes (sweepable fields: {})", SWEEPABLE.join(", ")),
        ));
    }
    for (i, a) in axes.iter().enumerate() {
        if a.values.is_empty() {
            return Err(CliError::config(
                format!("sweep.axis[{i}].values"),
                "empty grid",
            ));
        }
        if axes[..i].iter().any(|b| b.field == a.field) {
            return Err(CliError::config(
                format!("sweep.axis[{i}].field"),
                format!("`{}` appears twice", a.field),
            ));
        }
    }
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()))
        .unwrap_or(usize::MAX);
    if total > cfg.max_points {
        return Err(CliError::config(
            "sweep.max_points",
            format!("grid has {total} points, limit is {}", cfg.max_points),
        ));
    }
    let values: Vec<Vec<f64>> = axes.iter().map(|a| a.values.clone()).collect();
    let points = grid(&values);
    let pulses = points
        .iter()
        .map(|point| {
            let mut params = cfg.pulse_params.clone();
            for (axis, &v) in axes.iter().zip(point) {
                params.set(&axis.field, v)?;
            }
            params.build()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n_steps = cfg.n_steps;
    let closure_tol = cfg.closure_tol;
    let results: Vec<Result<Vec<Cell>, Error>> = pulses
        .par_iter()
        .map(|pulse| {
            let (p, traj) = phase_breakdown_unchecked(pulse, Branch::PlusPlus, n_steps)?;
            let residual = traj.end().norm();
            let closed =
                residual <= closure_tol.unwrap_or_else(|| default_closure_tolerance(&traj));
            Ok(vec![
                pulse.period().into(),
                p.gamma_total.into(),
                p.gamma_g.into(),
                p.gamma_d.into(),
                residual.into(),
                closed.into(),
                (closed && nontriviality(p.gamma_total)).into(),
            ])
        })
        .collect();
    let mut names: Vec<String> = axes.iter().map(|a| a.field.clone()).collect();
    names.extend(columns(&[
        "period_used",
        "gamma",
        "gamma_g",
        "gamma_d",
        "closure_residual",
        "closed",
        "nontrivial",
    ]));
    let mut table = Table::new("sweep", names);
    for (point, result) in points.iter().zip(results) {
        let mut row: Vec<Cell> = point.iter().map(|&v| v.into()).collect();
        row.extend(result?);
        table.push(row);
    }
    table
        .summary
        .push(("points".into(), Cell::Int(total as i64)));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_order_is_row_major() {
        let g = grid(&[vec![1.0, 2.0], vec![10.0, 20.0, 30.0]]);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![1.0, 10.0]);
        assert_eq!(g[2], vec![1.0, 30.0]);
        assert_eq!(g[3], vec![2.0, 10.0]);
    }

    #[test]
    fn design_needs_one_constraint() {
        assert_eq!(design(1.0, None, None, 1).unwrap_err().exit_code(), 1);
        assert_eq!(design(0.0, Some(0.1), None, 1).unwrap_err().exit_code(), 2);
    }
}
