//! Shooting solvers for arbitrary positive diffusivities.
//!
//! Both phase equations are integrated in flux form. On the paraboloid
//! coordinate the state is `(u, w)` with `w = ω d₁(u) u'`, so
//! `u' = w/(ω d₁(u))` and `w' = −μ w/(2 d₁(u))`; the flux variable never
//! changes sign, which keeps outward integration of the solid phase stable.
//! For a trial `(ω₂, μ)`:
//!
//! - the liquid is integrated from `ω = R` with `u = u_v` and the slope
//!   fixed by the evaporation balance `2 d₁ᵥ u'(R) = μH_v − q`;
//! - the solid starts at `ω₂` from `v = v_m` with the slope fixed by the
//!   melting balance `2 d₂ₘ v' = 2 d₁ₘ u' + μH_m` using the liquid slope
//!   just computed, and runs out to the truncation level;
//!
//! leaving two defects, `u(ω₂) − u_m` and `v(ω_max) − v_inf`, for the 2×2
//! root search. Every boundary condition is therefore satisfied by
//! construction or to the root tolerance. The planar variant drops the
//! geometric factors (`w = d(u) u'`, `w' = −μ w/d(u)`, no factor 2).

use super::root2d::solve2;
use super::{
    grid_left_clustered, grid_two_sided, ode, omega_max_rule, ParaboloidSolution, PlanarSolution,
    ReducedStefanProblem, RootSolveConfig, SolveDiagnostics, SolverError, SolverTag,
    PROFILE_KNOTS,
};
use crate::material::EnthalpyModel;
use crate::profile::TabulatedCurve;
use crate::reduction::Pose;

const ODE_TOL: f64 = 1e-10;

/// Shooting context shared by the paraboloid and planar variants.
struct ShooterCtx<'a> {
    model: &'a EnthalpyModel,
    start: f64,
    q: f64,
    geometric: bool,
}

impl<'a> ShooterCtx<'a> {
    fn geom(&self, x: f64) -> f64 {
        if self.geometric {
            x
        } else {
            1.0
        }
    }

    fn bc_factor(&self) -> f64 {
        if self.geometric {
            2.0
        } else {
            1.0
        }
    }

    fn drift(&self) -> f64 {
        // coefficient of u' in the reduced equation: μω/2 or μ.
        if self.geometric {
            0.5
        } else {
            1.0
        }
    }

    fn liquid_start(&self, mu: f64) -> [f64; 2] {
        let m = self.model;
        let up = (mu * m.latent_evaporation - self.q) / (self.bc_factor() * m.d1v);
        [m.u_v, self.geom(self.start) * m.d1.eval_clamped(m.u_v) * up]
    }

    fn liquid_rhs(&self, mu: f64, x: f64, y: [f64; 2]) -> [f64; 2] {
        let d = self.model.d1.eval_clamped(y[0]).max(1e-300);
        [y[1] / (self.geom(x) * d), -mu * self.drift() * y[1] / d]
    }

    fn solid_rhs(&self, mu: f64, x: f64, y: [f64; 2]) -> [f64; 2] {
        let d = self.model.d2.eval_clamped(y[0]).max(1e-300);
        [y[1] / (self.geom(x) * d), -mu * self.drift() * y[1] / d]
    }

    /// Solid state at the melting surface from the liquid state there.
    fn solid_start(&self, mu: f64, x2: f64, liquid: [f64; 2]) -> [f64; 2] {
        let m = self.model;
        let up = liquid[1] / (self.geom(x2) * m.d1.eval_clamped(liquid[0]).max(1e-300));
        let vp =
            (self.bc_factor() * m.d1m * up + mu * m.latent_melting) / (self.bc_factor() * m.d2m);
        [m.v_m, self.geom(x2) * m.d2.eval_clamped(m.v_m) * vp]
    }

    fn far_level(&self, x2: f64, mu: f64) -> f64 {
        if self.geometric {
            omega_max_rule(x2, self.model.d2m, mu)
        } else {
            x2 + super::FAR_FIELD_EFOLDS * self.model.d2m / mu
        }
    }

    /// The two shooting defects at a trial point.
    fn defects(&self, x2: f64, mu: f64) -> Result<(f64, f64), SolverError> {
        if !(x2 > self.start) || !(mu > 0.0) {
            return Err(SolverError::Domain(
                "trial point outside the admissible region".into(),
            ));
        }
        let m = self.model;
        let rhs_l = |x: f64, y: [f64; 2]| self.liquid_rhs(mu, x, y);
        let liquid = ode::integrate_path(&rhs_l, self.start, self.liquid_start(mu), &[x2], ODE_TOL)?
            [0];
        let g1 = liquid[0] - m.u_m;
        let rhs_s = |x: f64, y: [f64; 2]| self.solid_rhs(mu, x, y);
        let far = self.far_level(x2, mu);
        let solid =
            ode::integrate_path(&rhs_s, x2, self.solid_start(mu, x2, liquid), &[far], ODE_TOL)?[0];
        let g2 = solid[0] - m.v_inf;
        if !g1.is_finite() || !g2.is_finite() {
            return Err(SolverError::Domain("non-finite shooting defect".into()));
        }
        Ok((g1, g2))
    }
}

/// Numerically solve the paraboloid problem for arbitrary positive
/// diffusivity profiles.
pub fn solve_shooting(
    problem: &ReducedStefanProblem,
    cfg: &RootSolveConfig,
) -> Result<ParaboloidSolution, SolverError> {
    let ctx = ShooterCtx {
        model: &problem.model,
        start: problem.evaporation_radius,
        q: problem.flux_magnitude,
        geometric: true,
    };
    let f = |o: f64, m: f64| ctx.defects(o, m);
    let search = solve2(&f, cfg)?;
    let (omega2, mu) = search.best;
    let m = &problem.model;

    // Tabulate the liquid phase along the clustered grid.
    let grid_u = grid_two_sided(ctx.start, omega2, PROFILE_KNOTS);
    let rhs_l = |x: f64, y: [f64; 2]| ctx.liquid_rhs(mu, x, y);
    let states = ode::integrate_path(&rhs_l, ctx.start, ctx.liquid_start(mu), &grid_u, ODE_TOL)?;
    let (us, dus): (Vec<f64>, Vec<f64>) = grid_u
        .iter()
        .zip(states.iter())
        .map(|(&w, y)| (y[0], rhs_l(w, *y)[0]))
        .unzip();
    let liquid_end = *states.last().unwrap();
    let u_profile = TabulatedCurve::with_slopes(grid_u, us, dus)?;

    // Solid phase from the melting surface outward.
    let omega_max = ctx.far_level(omega2, mu);
    let grid_v = grid_left_clustered(omega2, omega_max, PROFILE_KNOTS);
    let rhs_s = |x: f64, y: [f64; 2]| ctx.solid_rhs(mu, x, y);
    let start_v = ctx.solid_start(mu, omega2, liquid_end);
    let states = ode::integrate_path(&rhs_s, omega2, start_v, &grid_v, ODE_TOL)?;
    let (vs, dvs): (Vec<f64>, Vec<f64>) = grid_v
        .iter()
        .zip(states.iter())
        .map(|(&w, y)| (y[0], rhs_s(w, *y)[0]))
        .unzip();
    let v_profile = TabulatedCurve::with_slopes(grid_v, vs, dvs)?;

    // Converged trajectories must have stayed inside the declared
    // diffusivity ranges (trial iterates may clamp; the solution may not).
    check_profile_range(&m.d1, u_profile.ys(), "d1")?;
    check_profile_range(&m.d2, v_profile.ys(), "d2")?;

    Ok(ParaboloidSolution {
        u_profile,
        v_profile,
        evaporation_radius: problem.evaporation_radius,
        omega2,
        mu,
        omega_max,
        solver_tag: SolverTag::Shooting,
        pose: Pose::default(),
        diagnostics: SolveDiagnostics {
            residual_f1: search.residuals.0,
            residual_f2: search.residuals.1,
            iterations: search.iterations,
            roots_found: search.roots,
        },
    })
}

/// Solve the planar traveling-wave problem (`z₁ = 0` by translation
/// invariance; unknowns `z₂` and μ).
pub fn solve_planar(
    problem: &ReducedStefanProblem,
    cfg: &RootSolveConfig,
) -> Result<PlanarSolution, SolverError> {
    let ctx = ShooterCtx {
        model: &problem.model,
        start: 0.0,
        q: problem.flux_magnitude,
        geometric: false,
    };
    // The shell-thickness bracket: reuse the ω₂ bracket measured from R.
    let mut cfg = cfg.clone();
    let r = problem.evaporation_radius;
    cfg.omega2_bracket = (
        (cfg.omega2_bracket.0 - r).max(1e-9 * r),
        (cfg.omega2_bracket.1 - r).max(2e-9 * r),
    );
    let f = |z2: f64, m: f64| ctx.defects(z2, m);
    let search = solve2(&f, &cfg)?;
    let (z2, mu) = search.best;
    let m = &problem.model;

    let grid_u = grid_two_sided(0.0, z2, PROFILE_KNOTS);
    let rhs_l = |x: f64, y: [f64; 2]| ctx.liquid_rhs(mu, x, y);
    let states = ode::integrate_path(&rhs_l, 0.0, ctx.liquid_start(mu), &grid_u, ODE_TOL)?;
    let (us, dus): (Vec<f64>, Vec<f64>) = grid_u
        .iter()
        .zip(states.iter())
        .map(|(&z, y)| (y[0], rhs_l(z, *y)[0]))
        .unzip();
    let liquid_end = *states.last().unwrap();
    let u_profile = TabulatedCurve::with_slopes(grid_u, us, dus)?;

    let z_max = ctx.far_level(z2, mu);
    let grid_v = grid_left_clustered(z2, z_max, PROFILE_KNOTS);
    let rhs_s = |x: f64, y: [f64; 2]| ctx.solid_rhs(mu, x, y);
    let states = ode::integrate_path(&rhs_s, z2, ctx.solid_start(mu, z2, liquid_end), &grid_v, ODE_TOL)?;
    let (vs, dvs): (Vec<f64>, Vec<f64>) = grid_v
        .iter()
        .zip(states.iter())
        .map(|(&z, y)| (y[0], rhs_s(z, *y)[0]))
        .unzip();
    let v_profile = TabulatedCurve::with_slopes(grid_v, vs, dvs)?;

    check_profile_range(&m.d1, u_profile.ys(), "d1")?;
    check_profile_range(&m.d2, v_profile.ys(), "d2")?;

    Ok(PlanarSolution {
        u_profile,
        v_profile,
        z1: 0.0,
        z2,
        mu,
        z_max,
        diagnostics: SolveDiagnostics {
            residual_f1: search.residuals.0,
            residual_f2: search.residuals.1,
            iterations: search.iterations,
            roots_found: search.roots,
        },
    })
}

/// A converged trajectory must not have relied on the clamped extension of
/// a tabulated diffusivity.
fn check_profile_range(
    d: &crate::profile::FunctionProfile,
    values: &[f64],
    label: &str,
) -> Result<(), SolverError> {
    if let crate::profile::FunctionProfile::Tabulated(curve) = d {
        let (lo, hi) = curve.range();
        let pad = 1e-9 * (hi - lo).abs().max(1.0);
        for &v in values {
            if v < lo - pad || v > hi + pad {
                return Err(SolverError::Domain(format!(
                    "converged solution leaves the tabulated range of {label}: value {v} outside [{lo}, {hi}]"
                )));
            }
        }
    }
    Ok(())
}
