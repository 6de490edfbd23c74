//! Deterministic serialization: 17-significant-digit floats, CSV writers
//! and key/value report files (valid TOML, hand-written so byte layout is
//! fixed). Data files carry no timestamps.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;
use stefan_core::profile::TabulatedCurve;
use stefan_core::solver::{ParaboloidSolution, PlanarSolution};
use stefan_core::verify::ResidualReport;

/// Decimal, 17 significant digits: lossless for f64 round trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::parse(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display())))
}

fn profile_rows(out: &mut String, curve: &TabulatedCurve, phase: &str) {
    for (x, y) in curve.knots() {
        let _ = writeln!(out, "{},{},{phase}", fmt_f64(x), fmt_f64(y));
    }
}

/// Profile CSV: `omega,value,phase` (for planar solutions the first column
/// carries the traveling coordinate z).
pub fn profiles_csv_paraboloid(sol: &ParaboloidSolution) -> String {
    let mut out = String::from("omega,value,phase\n");
    profile_rows(&mut out, &sol.u_profile, "liquid");
    profile_rows(&mut out, &sol.v_profile, "solid");
    out
}

pub fn profiles_csv_planar(sol: &PlanarSolution) -> String {
    let mut out = String::from("omega,value,phase\n");
    profile_rows(&mut out, &sol.u_profile, "liquid");
    profile_rows(&mut out, &sol.v_profile, "solid");
    out
}

pub fn solution_report_paraboloid(sol: &ParaboloidSolution, flux_q: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema = 1");
    let _ = writeln!(out, "kind = \"paraboloid-solution\"");
    let _ = writeln!(out);
    let _ = writeln!(out, "[parameters]");
    let _ = writeln!(out, "solver = \"{}\"", sol.solver_tag.name());
    let _ = writeln!(out, "omega1 = {}", fmt_f64(sol.evaporation_radius));
    let _ = writeln!(out, "omega2 = {}", fmt_f64(sol.omega2));
    let _ = writeln!(out, "mu = {}", fmt_f64(sol.mu));
    let _ = writeln!(out, "omega_max = {}", fmt_f64(sol.omega_max));
    let _ = writeln!(out, "flux_q = {}", fmt_f64(flux_q));
    let _ = writeln!(out);
    let _ = writeln!(out, "[diagnostics]");
    let _ = writeln!(out, "residual_f1 = {}", fmt_f64(sol.diagnostics.residual_f1));
    let _ = writeln!(out, "residual_f2 = {}", fmt_f64(sol.diagnostics.residual_f2));
    let _ = writeln!(out, "iterations = {}", sol.diagnostics.iterations);
    let _ = writeln!(
        out,
        "multiple_roots = {}",
        sol.diagnostics.multiple_roots()
    );
    let _ = writeln!(
        out,
        "roots_found = {}",
        sol.diagnostics.roots_found.len()
    );
    for (i, (o, m)) in sol.diagnostics.roots_found.iter().enumerate() {
        let _ = writeln!(out, "root_{i} = [{}, {}]", fmt_f64(*o), fmt_f64(*m));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[pose]");
    let _ = writeln!(out, "t_origin = {}", fmt_f64(sol.pose.t_origin));
    let _ = writeln!(out, "x3_origin = {}", fmt_f64(sol.pose.x3_origin));
    let _ = writeln!(out, "angle = {}", fmt_f64(sol.pose.angle));
    out
}

pub fn solution_report_planar(sol: &PlanarSolution, flux_q: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema = 1");
    let _ = writeln!(out, "kind = \"planar-solution\"");
    let _ = writeln!(out);
    let _ = writeln!(out, "[parameters]");
    let _ = writeln!(out, "solver = \"shooting\"");
    let _ = writeln!(out, "z1 = {}", fmt_f64(sol.z1));
    let _ = writeln!(out, "z2 = {}", fmt_f64(sol.z2));
    let _ = writeln!(out, "mu = {}", fmt_f64(sol.mu));
    let _ = writeln!(out, "z_max = {}", fmt_f64(sol.z_max));
    let _ = writeln!(out, "flux_q = {}", fmt_f64(flux_q));
    let _ = writeln!(out);
    let _ = writeln!(out, "[diagnostics]");
    let _ = writeln!(out, "residual_f1 = {}", fmt_f64(sol.diagnostics.residual_f1));
    let _ = writeln!(out, "residual_f2 = {}", fmt_f64(sol.diagnostics.residual_f2));
    let _ = writeln!(out, "iterations = {}", sol.diagnostics.iterations);
    out
}

/// Verify report with pass/fail against the problem file's thresholds.
pub fn verify_report(
    report: &ResidualReport,
    thresholds: &std::collections::BTreeMap<String, f64>,
    passed: bool,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema = 1");
    let _ = writeln!(out, "kind = \"residual-report\"");
    let _ = writeln!(out, "passed = {passed}");
    let _ = writeln!(out);
    let _ = writeln!(out, "[residuals]");
    for (name, value) in report.fields() {
        let _ = writeln!(out, "{name} = {}", fmt_f64(value));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[grid]");
    let _ = writeln!(out, "grid_spacing = {}", fmt_f64(report.grid_spacing));
    let _ = writeln!(out, "points_liquid = {}", report.points_liquid);
    let _ = writeln!(out, "points_solid = {}", report.points_solid);
    if let Some(p) = report.convergence_order_liquid {
        let _ = writeln!(out, "convergence_order_liquid = {}", fmt_f64(p));
    }
    if let Some(p) = report.convergence_order_solid {
        let _ = writeln!(out, "convergence_order_solid = {}", fmt_f64(p));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[thresholds]");
    for (name, value) in thresholds {
        let _ = writeln!(out, "{name} = {}", fmt_f64(*value));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[checks]");
    for (name, value) in report.fields() {
        if let Some(limit) = thresholds.get(name) {
            let ok = value <= *limit;
            let _ = writeln!(out, "{name} = \"{}\"", if ok { "pass" } else { "FAIL" });
        }
    }
    out
}

/// Classification report (also printed to standard output).
pub fn classify_report(
    table2_case: u8,
    generators: &[stefan_core::symmetry::GeneratorTag],
    dimension: usize,
    table1_case: u8,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema = 1");
    let _ = writeln!(out, "kind = \"symmetry-report\"");
    let _ = writeln!(out);
    let _ = writeln!(out, "[flux-classification]");
    let _ = writeln!(out, "table2_case = {table2_case}");
    let _ = writeln!(out, "dimension = {dimension}");
    let names: Vec<String> = generators
        .iter()
        .map(|g| format!("\"{}\"", g.name()))
        .collect();
    let _ = writeln!(out, "generators = [{}]", names.join(", "));
    for g in generators {
        let _ = writeln!(out, "# {} = {}", g.name(), g.describe());
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[diffusivity-classification]");
    let _ = writeln!(out, "table1_case = {table1_case}");
    out
}

/// Surface-sample CSV: `x1,x2,x3,surface_id,t`.
pub fn surfaces_csv(samples: &[(f64, f64, f64, u8)], t: f64) -> String {
    let mut out = String::from("x1,x2,x3,surface_id,t\n");
    for (x1, x2, x3, id) in samples {
        let _ = writeln!(
            out,
            "{},{},{},{id},{}",
            fmt_f64(*x1),
            fmt_f64(*x2),
            fmt_f64(*x3),
            fmt_f64(t)
        );
    }
    out
}
