//! Shooting solver against the closed forms, and the planar traveling wave
//! against its elementary solution.
//!
//! The planar oracle: with constant diffusivities the liquid profile is
//! `u = A + B e^(−μz/a₁)` and the solid `v = v_inf + C e^(−μz/a₂)`; pushing
//! those through the boundary conditions collapses to an energy balance
//! `μ = q / (H_v + H_m + (u_v − u_m) + (v_m − v_inf))` with
//! `z₂ = (a₁/μ) ln(Σ/(H_m + v_m − v_inf))`, `Σ = u_v − u_m + H_m + v_m − v_inf`.

use approx::assert_relative_eq;
use stefan_core::material::EnthalpyModel;
use stefan_core::profile::FunctionProfile;
use stefan_core::solver::{
    planar_ode_residual_max, solve_constant_diffusivity, solve_fast_diffusion, solve_planar,
    solve_shooting, GeometryKind, ReducedStefanProblem, RootSolveConfig,
};

fn constant_problem(u_v: f64, q: f64, geometry: GeometryKind) -> ReducedStefanProblem {
    let model = EnthalpyModel::new(
        FunctionProfile::Constant(1.0),
        FunctionProfile::Constant(1.0),
        u_v,
        1.0,
        1.0,
        0.0,
        1.0,
        1.0,
    )
    .unwrap();
    ReducedStefanProblem::new(model, 1.0, q, geometry).unwrap()
}

fn fast_diffusion_problem() -> ReducedStefanProblem {
    let model = EnthalpyModel::new(
        FunctionProfile::Power {
            coeff: 1.0,
            exponent: -1.0,
            shift: 0.0,
        },
        FunctionProfile::Constant(1.0),
        1.0,
        1.4,
        0.0,
        0.8,
        1.0,
        1.0,
    )
    .unwrap();
    ReducedStefanProblem::new(model, 1.0, 0.2, GeometryKind::ParaboloidOmega).unwrap()
}

#[test]
fn shooting_matches_constant_closed_form() {
    let p = constant_problem(2.0, 2.0, GeometryKind::ParaboloidOmega);
    let cfg = RootSolveConfig::default_for(1.0);
    let cf = solve_constant_diffusivity(&p, &cfg).unwrap();
    let sh = solve_shooting(&p, &cfg).unwrap();
    assert_relative_eq!(sh.omega2, cf.omega2, max_relative = 1e-6);
    assert_relative_eq!(sh.mu, cf.mu, max_relative = 1e-6);
    // Profiles agree pointwise.
    for k in 0..40 {
        let w = p.evaporation_radius
            + (cf.omega2.min(sh.omega2) - p.evaporation_radius) * k as f64 / 39.0;
        let a = cf.u_profile.eval(w).unwrap();
        let b = sh.u_profile.eval(w).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-6);
    }
    for k in 0..40 {
        let w = cf.omega2.max(sh.omega2) + 10.0 * k as f64 / 39.0;
        let a = cf.v_profile.eval(w).unwrap();
        let b = sh.v_profile.eval(w).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-6, epsilon = 1e-9);
    }
}

#[test]
fn shooting_matches_fast_diffusion_closed_form() {
    let p = fast_diffusion_problem();
    let cfg = RootSolveConfig::default_for(1.0);
    let cf = solve_fast_diffusion(&p, &cfg).unwrap();
    let sh = solve_shooting(&p, &cfg).unwrap();
    assert_relative_eq!(sh.omega2, cf.omega2, max_relative = 1e-5);
    assert_relative_eq!(sh.mu, cf.mu, max_relative = 1e-5);
    for k in 0..40 {
        let w = p.evaporation_radius
            + (cf.omega2.min(sh.omega2) - p.evaporation_radius) * k as f64 / 39.0;
        let a = cf.u_profile.eval(w).unwrap();
        let b = sh.u_profile.eval(w).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-5);
    }
}

#[test]
fn liquid_shell_collapses_as_thresholds_merge() {
    // u_v → u_m: the liquid shell thickness ω₂ − R shrinks monotonically.
    let cfg = RootSolveConfig::default_for(1.0);
    let mut widths = Vec::new();
    for gap in [0.5, 0.25, 0.125] {
        let p = constant_problem(1.0 + gap, 2.0, GeometryKind::ParaboloidOmega);
        let sol = solve_shooting(&p, &cfg).unwrap();
        widths.push(sol.omega2 - p.evaporation_radius);
    }
    assert!(
        widths[0] > widths[1] && widths[1] > widths[2],
        "shell widths not monotone: {widths:?}"
    );
}

#[test]
fn planar_matches_elementary_closed_form() {
    let p = constant_problem(2.0, 2.0, GeometryKind::PlanarWave);
    let cfg = RootSolveConfig::default_for(1.0);
    let sol = solve_planar(&p, &cfg).unwrap();
    let m = &p.model;

    let sigma = (m.u_v - m.u_m) + m.latent_melting + (m.v_m - m.v_inf);
    let mu_exact = p.flux_magnitude / (sigma + m.latent_evaporation);
    let z2_exact = (1.0 / mu_exact) * (sigma / (m.latent_melting + m.v_m - m.v_inf)).ln();
    assert_relative_eq!(sol.mu, mu_exact, max_relative = 1e-6);
    assert_relative_eq!(sol.z2, z2_exact, max_relative = 1e-6);
    assert_eq!(sol.z1, 0.0);

    // u(z) = A + B e^(−μz/a₁) through the boundary values.
    let b = p.flux_magnitude / mu_exact - m.latent_evaporation;
    let a = m.u_v - b;
    for k in 0..50 {
        let z = z2_exact * k as f64 / 49.0;
        let exact = a + b * (-mu_exact * z).exp();
        let got = sol.u_profile.eval(z.min(sol.z2)).unwrap();
        assert_relative_eq!(got, exact, max_relative = 1e-6);
    }

    // Stefan balance at z₂ from the stored slopes.
    let du = *sol.u_profile.slopes().last().unwrap();
    let dv = sol.v_profile.slopes()[0];
    let stefan = m.d2m * dv - m.d1m * du - sol.mu * m.latent_melting;
    assert!(stefan.abs() <= 1e-9, "planar melting balance {stefan:e}");

    // Far field reached.
    assert!((sol.v_profile.last_value() - m.v_inf).abs() <= 1e-6);

    // The profiles satisfy the planar reduced equation.
    let res = planar_ode_residual_max(&sol.u_profile, &m.d1, sol.mu).unwrap();
    assert!(res <= 1e-8, "planar liquid residual {res:e}");
}

#[test]
fn planar_evaporation_balance() {
    let p = constant_problem(2.0, 2.0, GeometryKind::PlanarWave);
    let sol = solve_planar(&p, &RootSolveConfig::default_for(1.0)).unwrap();
    let m = &p.model;
    let du0 = sol.u_profile.slopes()[0];
    let evap = m.d1v * du0 - (sol.mu * m.latent_evaporation - p.flux_magnitude);
    assert!(evap.abs() <= 1e-9, "planar evaporation balance {evap:e}");
}

#[test]
fn shooting_handles_tabulated_diffusivities() {
    // A mild nonlinearity given as data: d₁ rises with u, d₂ constant.
    let knots: Vec<(f64, f64)> = (0..=64)
        .map(|i| {
            let u = 0.8 + 1.4 * i as f64 / 64.0;
            (u, 1.0 + 0.3 * (u - 1.0))
        })
        .collect();
    let model = EnthalpyModel::new(
        FunctionProfile::Tabulated(stefan_core::profile::TabulatedCurve::new(&knots).unwrap()),
        FunctionProfile::Constant(1.0),
        2.0,
        1.0,
        1.0,
        0.0,
        1.0,
        1.0,
    )
    .unwrap();
    let p = ReducedStefanProblem::new(model, 1.0, 2.0, GeometryKind::ParaboloidOmega).unwrap();
    let sol = solve_shooting(&p, &RootSolveConfig::default_for(1.0)).unwrap();
    assert!(sol.omega2 > 1.0 && sol.mu > 0.0);
    // Boundary values still hit to the root tolerance.
    assert_relative_eq!(sol.u_profile.last_value(), 1.0, max_relative = 1e-8);
    assert!((sol.v_profile.last_value() - 0.0).abs() <= 1e-6);
}
