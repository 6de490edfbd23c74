//! The four commands: classify, solve, verify, export.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::problem::{load_problem, AnsatzKind, LoadedProblem};
use crate::report;
use crate::CliError;
use stefan_core::material::{invert_enthalpy, Phase};
use stefan_core::profile::TabulatedCurve;
use stefan_core::reduction::{
    reconstruct_field_posed, surface_points_posed, FieldSample, Pose, SurfaceKind,
};
use stefan_core::solver::{
    solve_paraboloid, solve_planar, ParaboloidSolution, SolveDiagnostics, SolveMethod,
    SolverError, SolverTag,
};
use stefan_core::symmetry::{classify_diffusivities, classify_flux};
use stefan_core::verify::audit;

fn out_dir_for(problem_path: &Path, loaded: &LoadedProblem, flag: &Option<PathBuf>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.clone();
    }
    let base = problem_path.parent().unwrap_or(Path::new("."));
    match &loaded.out_dir {
        Some(dir) => base.join(dir),
        None => base.join("out"),
    }
}

pub fn cmd_classify(problem_path: &Path) -> Result<(), CliError> {
    let loaded = load_problem(problem_path)?;
    let flux_report = classify_flux(&loaded.flux);
    let table1 = classify_diffusivities(&loaded.model.d1, &loaded.model.d2);
    let text = report::classify_report(
        flux_report.table2_case,
        &flux_report.generators,
        flux_report.dimension,
        table1,
    );
    print!("{text}");
    println!("# flux invariance: Table 2 case {}", flux_report.table2_case);
    println!("# diffusivity pair: Table 1 case {table1}");
    Ok(())
}

fn map_solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::NoRoot(msg) => CliError::no_root(msg),
        SolverError::Unsupported(msg) => CliError::unsupported(msg),
        other => CliError::parse(other.to_string()),
    }
}

pub fn cmd_solve(
    problem_path: &Path,
    method: SolveMethod,
    out_dir: &Option<PathBuf>,
) -> Result<(), CliError> {
    let loaded = load_problem(problem_path)?;
    let flux_report = classify_flux(&loaded.flux);
    let Some(q) = loaded.flux.constant_axial_magnitude() else {
        return Err(CliError::unsupported(format!(
            "reduction not implemented for Table 2 case {}; the solver consumes case 5 (constant axial flux)",
            flux_report.table2_case
        )));
    };
    let dir = out_dir_for(problem_path, &loaded, out_dir);
    let problem = stefan_core::solver::ReducedStefanProblem::new(
        loaded.model.clone(),
        loaded.evaporation_radius,
        q,
        loaded.geometry_kind(),
    )
    .map_err(map_solver_error)?;

    match loaded.ansatz {
        AnsatzKind::Paraboloid => {
            let sol = solve_paraboloid(&problem, &loaded.solver_cfg, method)
                .map_err(map_solver_error)?;
            report::write_file(
                &dir.join("profiles.csv"),
                &report::profiles_csv_paraboloid(&sol),
            )?;
            report::write_file(
                &dir.join("solution.report"),
                &report::solution_report_paraboloid(&sol, q),
            )?;
            println!("solver = {}", sol.solver_tag.name());
            println!("omega2 = {}", report::fmt_f64(sol.omega2));
            println!("mu = {}", report::fmt_f64(sol.mu));
            if sol.diagnostics.multiple_roots() {
                println!(
                    "note: {} admissible roots found; returned the smallest front speed",
                    sol.diagnostics.roots_found.len()
                );
            }
            log::info!(
                "root residuals: f1 = {:e}, f2 = {:e} after {} iterations",
                sol.diagnostics.residual_f1,
                sol.diagnostics.residual_f2,
                sol.diagnostics.iterations
            );
        }
        AnsatzKind::Planar => {
            let sol = solve_planar(&problem, &loaded.solver_cfg).map_err(map_solver_error)?;
            report::write_file(
                &dir.join("profiles.csv"),
                &report::profiles_csv_planar(&sol),
            )?;
            report::write_file(
                &dir.join("solution.report"),
                &report::solution_report_planar(&sol, q),
            )?;
            println!("solver = shooting (planar)");
            println!("z2 = {}", report::fmt_f64(sol.z2));
            println!("mu = {}", report::fmt_f64(sol.mu));
        }
    }
    println!("wrote {}", dir.join("profiles.csv").display());
    println!("wrote {}", dir.join("solution.report").display());
    Ok(())
}

/// Read a solved paraboloid back from `profiles.csv` + `solution.report`.
pub fn read_solution(dir: &Path) -> Result<(ParaboloidSolution, f64), CliError> {
    let report_path = dir.join("solution.report");
    let text = std::fs::read_to_string(&report_path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", report_path.display())))?;
    let value: toml::Value = toml::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", report_path.display())))?;
    let kind = value.get("kind").and_then(|v| v.as_str()).unwrap_or("");
    if kind != "paraboloid-solution" {
        return Err(CliError::parse(format!(
            "{}: verification audits paraboloid solutions; found kind = \"{kind}\"",
            report_path.display()
        )));
    }
    let params = value
        .get("parameters")
        .and_then(|v| v.as_table())
        .ok_or_else(|| CliError::parse("solution.report: missing [parameters]".into()))?;
    let get = |key: &str| -> Result<f64, CliError> {
        params
            .get(key)
            .and_then(|v| v.as_float())
            .ok_or_else(|| CliError::parse(format!("solution.report: missing parameter {key}")))
    };
    let omega1 = get("omega1")?;
    let omega2 = get("omega2")?;
    let mu = get("mu")?;
    let omega_max = get("omega_max")?;
    let flux_q = get("flux_q")?;
    let solver = params
        .get("solver")
        .and_then(|v| v.as_str())
        .unwrap_or("shooting");
    let solver_tag = match solver {
        "closed-form-constant" => SolverTag::ClosedFormConstant,
        "closed-form-fast-diffusion" => SolverTag::ClosedFormFastDiffusion,
        _ => SolverTag::Shooting,
    };
    let pose = match value.get("pose").and_then(|v| v.as_table()) {
        Some(t) => Pose {
            t_origin: t.get("t_origin").and_then(|v| v.as_float()).unwrap_or(0.0),
            x3_origin: t.get("x3_origin").and_then(|v| v.as_float()).unwrap_or(0.0),
            angle: t.get("angle").and_then(|v| v.as_float()).unwrap_or(0.0),
        },
        None => Pose::default(),
    };

    let csv_path = dir.join("profiles.csv");
    let text = std::fs::read_to_string(&csv_path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", csv_path.display())))?;
    let mut liquid: Vec<(f64, f64)> = Vec::new();
    let mut solid: Vec<(f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "omega,value,phase" {
                return Err(CliError::parse(format!(
                    "{}: unexpected header {line:?}",
                    csv_path.display()
                )));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(CliError::parse(format!(
                "{}: line {}: expected 3 columns",
                csv_path.display(),
                i + 1
            )));
        }
        let x: f64 = cols[0]
            .parse()
            .map_err(|_| CliError::parse(format!("{}: line {}: bad omega", csv_path.display(), i + 1)))?;
        let y: f64 = cols[1]
            .parse()
            .map_err(|_| CliError::parse(format!("{}: line {}: bad value", csv_path.display(), i + 1)))?;
        match cols[2] {
            "liquid" => liquid.push((x, y)),
            "solid" => solid.push((x, y)),
            other => {
                return Err(CliError::parse(format!(
                    "{}: line {}: unknown phase {other:?}",
                    csv_path.display(),
                    i + 1
                )))
            }
        }
    }
    let u_profile = TabulatedCurve::new(&liquid)
        .map_err(|e| CliError::parse(format!("liquid profile: {e}")))?;
    let v_profile =
        TabulatedCurve::new(&solid).map_err(|e| CliError::parse(format!("solid profile: {e}")))?;

    let sol = ParaboloidSolution {
        u_profile,
        v_profile,
        evaporation_radius: omega1,
        omega2,
        mu,
        omega_max,
        solver_tag,
        pose,
        diagnostics: SolveDiagnostics {
            residual_f1: 0.0,
            residual_f2: 0.0,
            iterations: 0,
            roots_found: vec![(omega2, mu)],
        },
    };
    Ok((sol, flux_q))
}

pub fn cmd_verify(
    problem_path: &Path,
    solution_dir: &Option<PathBuf>,
    grid: Option<f64>,
    levels: Option<u8>,
    out_dir: &Option<PathBuf>,
) -> Result<(), CliError> {
    let loaded = load_problem(problem_path)?;
    let dir = match solution_dir {
        Some(d) => d.clone(),
        None => out_dir_for(problem_path, &loaded, out_dir),
    };
    let (solution, flux_q) = read_solution(&dir)?;

    // The solution must belong to this problem.
    let Some(q) = loaded.flux.constant_axial_magnitude() else {
        return Err(CliError::parse(
            "problem flux is not the constant axial case the solution was computed for".into(),
        ));
    };
    if (q - flux_q).abs() > 1e-12 * q.abs().max(1.0) {
        return Err(CliError::parse(format!(
            "solution flux {flux_q} does not match problem flux {q}"
        )));
    }
    if (solution.evaporation_radius - loaded.evaporation_radius).abs()
        > 1e-12 * loaded.evaporation_radius
    {
        return Err(CliError::parse(format!(
            "solution omega1 {} does not match geometry.R {}",
            solution.evaporation_radius, loaded.evaporation_radius
        )));
    }

    let mut cfg = loaded.verify_cfg.clone();
    if let Some(h) = grid {
        cfg.grid_h = h;
    }
    if let Some(l) = levels {
        cfg.levels = l;
    }
    let rep = audit(&solution, &loaded.model, q, &cfg)
        .map_err(|e| CliError::parse(format!("audit: {e}")))?;

    let passed = check_thresholds(&rep, &loaded.tolerance);
    let text = report::verify_report(&rep, &loaded.tolerance, passed);
    let report_dir = out_dir
        .clone()
        .unwrap_or_else(|| dir.clone());
    report::write_file(&report_dir.join("verify.report"), &text)?;
    print!("{text}");
    println!("# wrote {}", report_dir.join("verify.report").display());
    if passed {
        Ok(())
    } else {
        Err(CliError::audit_failure(
            "one or more residuals exceed the problem file's tolerance section".into(),
        ))
    }
}

fn check_thresholds(
    rep: &stefan_core::verify::ResidualReport,
    thresholds: &BTreeMap<String, f64>,
) -> bool {
    if thresholds.is_empty() {
        return true;
    }
    rep.fields().iter().all(|(name, value)| {
        thresholds
            .get(*name)
            .map(|limit| value <= limit)
            .unwrap_or(true)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportWhat {
    Surfaces,
    FieldSlice,
}

pub fn cmd_export(
    problem_path: &Path,
    solution_dir: &Option<PathBuf>,
    what: ExportWhat,
    t: f64,
    plane: &Option<String>,
    out_dir: &Option<PathBuf>,
) -> Result<(), CliError> {
    let loaded = load_problem(problem_path)?;
    let dir = match solution_dir {
        Some(d) => d.clone(),
        None => out_dir_for(problem_path, &loaded, out_dir),
    };
    let (solution, _) = read_solution(&dir)?;
    let target_dir = out_dir.clone().unwrap_or_else(|| dir.clone());

    match what {
        ExportWhat::Surfaces => {
            let geom = solution.geometry();
            let mut samples = Vec::new();
            for (kind, id) in [(SurfaceKind::Evaporation, 1u8), (SurfaceKind::Melting, 2u8)] {
                for p in surface_points_posed(&geom, &solution.pose, kind, t, 2000) {
                    samples.push((p.0, p.1, p.2, id));
                }
            }
            let path = target_dir.join("surfaces.csv");
            report::write_file(&path, &report::surfaces_csv(&samples, t))?;
            println!("wrote {}", path.display());
        }
        ExportWhat::FieldSlice => {
            let spec = plane
                .as_deref()
                .ok_or_else(|| CliError::parse("--plane is required for field-slice".into()))?;
            let path = target_dir.join("slice.csv");
            let csv = field_slice_csv(&loaded, &solution, t, spec)?;
            report::write_file(&path, &csv)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// Plane spec: `axis=value[,half_extent[,n]]` with axis ∈ {x1, x2, x3}.
fn parse_plane(spec: &str) -> Result<(usize, f64, Option<f64>, usize), CliError> {
    let bad = |m: &str| CliError::parse(format!("malformed plane spec {spec:?}: {m}"));
    let mut parts = spec.split(',');
    let eq = parts.next().ok_or_else(|| bad("empty"))?;
    let (axis_name, value) = eq
        .split_once('=')
        .ok_or_else(|| bad("expected axis=value"))?;
    let axis = match axis_name.trim() {
        "x1" => 0,
        "x2" => 1,
        "x3" => 2,
        other => return Err(bad(&format!("unknown axis {other:?}"))),
    };
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| bad("plane offset is not a number"))?;
    let half_extent = match parts.next() {
        Some(s) => Some(
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad("half extent is not a number"))?,
        ),
        None => None,
    };
    let n = match parts.next() {
        Some(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| bad("sample count is not an integer"))?,
        None => 81,
    };
    if parts.next().is_some() {
        return Err(bad("too many fields"));
    }
    if n < 2 {
        return Err(bad("sample count must be at least 2"));
    }
    Ok((axis, value, half_extent, n))
}

fn field_slice_csv(
    loaded: &LoadedProblem,
    sol: &ParaboloidSolution,
    t: f64,
    plane: &str,
) -> Result<String, CliError> {
    use std::fmt::Write as _;
    let (axis, offset, half_extent, n) = parse_plane(plane)?;
    let half = half_extent.unwrap_or(1.5 * sol.omega2);
    let free: Vec<usize> = (0..3).filter(|a| *a != axis).collect();
    let names = ["x1", "x2", "x3"];
    // Center the window on the front position along x3.
    let center = |a: usize| -> f64 {
        if a == 2 {
            sol.pose.x3_origin + sol.mu * (t - sol.pose.t_origin)
        } else {
            0.0
        }
    };
    let mut out = format!("{},{},value,phase\n", names[free[0]], names[free[1]]);
    let geom = sol.geometry();
    for i in 0..n {
        for j in 0..n {
            let a = center(free[0]) - half + 2.0 * half * i as f64 / (n - 1) as f64;
            let b = center(free[1]) - half + 2.0 * half * j as f64 / (n - 1) as f64;
            let mut x = [0.0f64; 3];
            x[axis] = offset;
            x[free[0]] = a;
            x[free[1]] = b;
            let sample = reconstruct_field_posed(
                &sol.u_profile,
                &sol.v_profile,
                &geom,
                &sol.pose,
                (t, (x[0], x[1], x[2])),
            )
            .map_err(|e| CliError::parse(format!("field reconstruction: {e}")))?;
            let (phase, value) = match sample {
                FieldSample::Gas => ("gas", None),
                FieldSample::Liquid(u) => ("liquid", Some((Phase::Liquid, u))),
                FieldSample::Interface { u, .. } => ("interface", Some((Phase::Liquid, u))),
                FieldSample::Solid(v) => ("solid", Some((Phase::Solid, v))),
                FieldSample::FarField(v) => ("farfield", Some((Phase::Solid, v))),
            };
            let rendered = match value {
                None => String::new(),
                Some((phase_sel, v)) => {
                    if loaded.has_material {
                        let temp = invert_enthalpy(&loaded.model, phase_sel, v)
                            .map_err(|e| CliError::parse(format!("temperature map: {e}")))?;
                        report::fmt_f64(temp)
                    } else {
                        report::fmt_f64(v)
                    }
                }
            };
            let _ = writeln!(
                out,
                "{},{},{rendered},{phase}",
                report::fmt_f64(a),
                report::fmt_f64(b)
            );
        }
    }
    Ok(out)
}
