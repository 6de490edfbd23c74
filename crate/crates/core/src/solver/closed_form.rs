//! Closed-form solutions of the reduced paraboloid system.
//!
//! Constant diffusivities `d₁ = a₁`, `d₂ = a₂`: the general solution of each
//! phase equation is affine in `Φ_k(ω) = E₁(μω/(2a_k))`, so the boundary
//! values pin the profiles to
//!
//! ```text
//! u(ω) = (u_v − u_m)/(Φ₁(R) − Φ₁(ω₂)) · Φ₁(ω)
//!        + (u_m Φ₁(R) − u_v Φ₁(ω₂))/(Φ₁(R) − Φ₁(ω₂))
//! v(ω) = (v_m − v_inf)/Φ₂(ω₂) · Φ₂(ω) + v_inf
//! ```
//!
//! and substituting `Φ_k'(ω) = −ω⁻¹ e^(−μω/(2a_k))` into the two flux
//! conditions gives the transcendental system `F₁ = F₂ = 0` solved here for
//! `(ω₂, μ)`.
//!
//! Fast diffusion `d₁(u) = u⁻¹`, `d₂ = 1`: the liquid equation has the first
//! integral `ln g + g = 𝒜(ωu)` with `g = (ω/u) du/dω` and
//! `𝒜(ν) = −(μ/2)ν + ln((μH_v − q)R/2) + (μH_v − q)R/2 + (μ/2)R u_v`,
//! so `g = W(e^𝒜)` and the profile satisfies the implicit relation
//! `∫_{R u_v}^{ωu} dν/(ν(1 + W(e^𝒜(ν)))) = ln(ω/R)` (the integrand uses the
//! identity `e^(−W(e^𝒜)+𝒜) = W(e^𝒜)`). The logarithm in `𝒜` restricts the
//! search to `μ > q/H_v`; candidates violating it are rejected and the
//! search continues.

use super::root2d::solve2;
use super::{
    constant_pair, grid_left_clustered, grid_two_sided, is_fast_diffusion_pair, ode,
    omega_max_rule, tabulate, ParaboloidSolution, ReducedStefanProblem, RootSolveConfig,
    SolveDiagnostics, SolverError, SolverTag, PROFILE_KNOTS,
};
use crate::reduction::Pose;
use crate::specialfn::{adaptive_integrate, exp_integral_e1, lambert_w_exp, QuadratureConfig};

/// Quadrature settings for residual evaluations inside the root search:
/// tighter than the root tolerance so the residuals are clean.
fn residual_quadrature() -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_subdivisions: 20_000,
    }
}

struct ConstantCase {
    a1: f64,
    a2: f64,
    r: f64,
    q: f64,
}

impl ConstantCase {
    fn from(problem: &ReducedStefanProblem) -> Result<Self, SolverError> {
        let (a1, a2) = constant_pair(&problem.model).ok_or_else(|| {
            SolverError::Unsupported(
                "constant-diffusivity closed form requires constant d1 and d2".into(),
            )
        })?;
        Ok(Self {
            a1,
            a2,
            r: problem.evaporation_radius,
            q: problem.flux_magnitude,
        })
    }

    /// `(F₁, F₂)` at a trial point. `C₁` multiplies a decreasing `Φ₁`, so
    /// the profile derivatives carry a minus sign relative to the positive
    /// amplitude `C₁ ω⁻¹ e^(−μω/(2a₁))`.
    fn residuals(
        &self,
        m: &crate::material::EnthalpyModel,
        omega2: f64,
        mu: f64,
    ) -> Result<(f64, f64), SolverError> {
        if !(omega2 > self.r) || !(mu > 0.0) {
            return Err(SolverError::Domain(format!(
                "front parameters outside the admissible region: omega2 = {omega2}, mu = {mu}"
            )));
        }
        let phi1_r = exp_integral_e1(mu * self.r / (2.0 * self.a1))?;
        let phi1_o = exp_integral_e1(mu * omega2 / (2.0 * self.a1))?;
        let phi2_o = exp_integral_e1(mu * omega2 / (2.0 * self.a2))?;
        let denom = phi1_r - phi1_o;
        if denom == 0.0 || phi2_o == 0.0 {
            return Err(SolverError::Domain(
                "kernel integral underflow at this trial point".into(),
            ));
        }
        let c1 = (m.u_v - m.u_m) / denom;
        let c3 = (m.v_m - m.v_inf) / phi2_o;
        let k1r = (-mu * self.r / (2.0 * self.a1)).exp();
        let k1o = (-mu * omega2 / (2.0 * self.a1)).exp();
        let k2o = (-mu * omega2 / (2.0 * self.a2)).exp();
        let f1 = -2.0 * m.d1v * c1 * k1r / self.r - (mu * m.latent_evaporation - self.q);
        let f2 = -2.0 * m.d2m * c3 * k2o / omega2 + 2.0 * m.d1m * c1 * k1o / omega2
            - mu * m.latent_melting;
        if !f1.is_finite() || !f2.is_finite() {
            return Err(SolverError::Domain(
                "non-finite residual at this trial point".into(),
            ));
        }
        Ok((f1, f2))
    }
}

/// Solve the constant-diffusivity problem in closed form.
pub fn solve_constant_diffusivity(
    problem: &ReducedStefanProblem,
    cfg: &RootSolveConfig,
) -> Result<ParaboloidSolution, SolverError> {
    let case = ConstantCase::from(problem)?;
    let model = &problem.model;
    let f = |o: f64, m: f64| case.residuals(model, o, m);
    let search = solve2(&f, cfg)?;
    let (omega2, mu) = search.best;

    let phi1 = |w: f64| exp_integral_e1(mu * w / (2.0 * case.a1)).unwrap_or(0.0);
    let phi2 = |w: f64| exp_integral_e1(mu * w / (2.0 * case.a2)).unwrap_or(0.0);
    let denom = phi1(case.r) - phi1(omega2);
    let c1 = (model.u_v - model.u_m) / denom;
    let c2 = (model.u_m * phi1(case.r) - model.u_v * phi1(omega2)) / denom;
    let c3 = (model.v_m - model.v_inf) / phi2(omega2);

    let omega_max = omega_max_rule(omega2, model.d2m, mu);
    let u_profile = tabulate(
        grid_two_sided(case.r, omega2, PROFILE_KNOTS),
        |w| c1 * phi1(w) + c2,
        |w| -c1 * (-mu * w / (2.0 * case.a1)).exp() / w,
    )?;
    let v_profile = tabulate(
        grid_left_clustered(omega2, omega_max, PROFILE_KNOTS),
        |w| c3 * phi2(w) + model.v_inf,
        |w| -c3 * (-mu * w / (2.0 * case.a2)).exp() / w,
    )?;

    Ok(ParaboloidSolution {
        u_profile,
        v_profile,
        evaporation_radius: case.r,
        omega2,
        mu,
        omega_max,
        solver_tag: SolverTag::ClosedFormConstant,
        pose: Pose::default(),
        diagnostics: SolveDiagnostics {
            residual_f1: search.residuals.0,
            residual_f2: search.residuals.1,
            iterations: search.iterations,
            roots_found: search.roots,
        },
    })
}

struct FastDiffusionCase {
    r: f64,
    q: f64,
    quad: QuadratureConfig,
}

impl FastDiffusionCase {
    fn from(problem: &ReducedStefanProblem) -> Result<Self, SolverError> {
        if !is_fast_diffusion_pair(&problem.model) {
            return Err(SolverError::Unsupported(
                "fast-diffusion closed form requires d1(u) = 1/u and d2 = 1".into(),
            ));
        }
        Ok(Self {
            r: problem.evaporation_radius,
            q: problem.flux_magnitude,
            quad: residual_quadrature(),
        })
    }

    /// Exponent of the first integral at `ν = ωu`.
    fn a_of(&self, m: &crate::material::EnthalpyModel, mu: f64, nu: f64) -> f64 {
        let g_r = (mu * m.latent_evaporation - self.q) * self.r / 2.0;
        -0.5 * mu * nu + g_r.ln() + g_r + 0.5 * mu * self.r * m.u_v
    }

    fn check_mu(
        &self,
        m: &crate::material::EnthalpyModel,
        mu: f64,
    ) -> Result<(), SolverError> {
        if !(mu * m.latent_evaporation - self.q > 0.0) {
            return Err(SolverError::Domain(format!(
                "mu*H_v - q must be positive for the fast-diffusion form (mu = {mu})"
            )));
        }
        Ok(())
    }

    /// The implicit-relation integral `∫ dν/(ν(1 + W(e^𝒜(ν))))`.
    fn implicit_integral(
        &self,
        m: &crate::material::EnthalpyModel,
        mu: f64,
        nu_lo: f64,
        nu_hi: f64,
    ) -> Result<f64, SolverError> {
        if (nu_hi - nu_lo).abs() <= 1e-15 * nu_hi.abs().max(1.0) {
            return Ok(0.0);
        }
        let (lo, hi, sign) = if nu_lo < nu_hi {
            (nu_lo, nu_hi, 1.0)
        } else {
            (nu_hi, nu_lo, -1.0)
        };
        let integrand = |nu: f64| 1.0 / (nu * (1.0 + lambert_w_exp(self.a_of(m, mu, nu))));
        Ok(sign * adaptive_integrate(integrand, lo, hi, &self.quad)?)
    }

    fn residuals(
        &self,
        m: &crate::material::EnthalpyModel,
        omega2: f64,
        mu: f64,
    ) -> Result<(f64, f64), SolverError> {
        if !(omega2 > self.r) || !(mu > 0.0) {
            return Err(SolverError::Domain(
                "front parameters outside the admissible region".into(),
            ));
        }
        self.check_mu(m, mu)?;
        let f1 = self.implicit_integral(m, mu, self.r * m.u_v, omega2 * m.u_m)?
            - (omega2 / self.r).ln();
        let phi2_o = exp_integral_e1(mu * omega2 / 2.0)?;
        if phi2_o == 0.0 {
            return Err(SolverError::Domain("solid kernel underflow".into()));
        }
        let c3 = (m.v_m - m.v_inf) / phi2_o;
        let w2 = lambert_w_exp(self.a_of(m, mu, omega2 * m.u_m));
        let f2 = -2.0 * c3 * (-mu * omega2 / 2.0).exp() - 2.0 * w2
            - mu * omega2 * m.latent_melting;
        if !f1.is_finite() || !f2.is_finite() {
            return Err(SolverError::Domain("non-finite residual".into()));
        }
        Ok((f1, f2))
    }
}

/// Solve the fast-diffusion problem (`d₁ = u⁻¹`, `d₂ = 1`).
///
/// The liquid profile is recovered pointwise from the first integral by
/// integrating `du/dω = (u/ω) W(e^𝒜(ωu))` from `u(R) = u_v`; the implicit
/// quadrature relation serves as the independent residual route.
pub fn solve_fast_diffusion(
    problem: &ReducedStefanProblem,
    cfg: &RootSolveConfig,
) -> Result<ParaboloidSolution, SolverError> {
    let case = FastDiffusionCase::from(problem)?;
    let model = &problem.model;

    // The logarithm in 𝒜 needs mu > q/H_v; lift the bracket accordingly.
    let mut cfg = cfg.clone();
    let mu_floor = case.q / model.latent_evaporation;
    if mu_floor > 0.0 && cfg.mu_bracket.0 <= mu_floor {
        cfg.mu_bracket.0 = mu_floor * (1.0 + 1e-9) + 1e-12;
        if cfg.mu_bracket.1 <= cfg.mu_bracket.0 {
            return Err(SolverError::NoRoot(format!(
                "mu bracket lies entirely below the domain floor q/H_v = {mu_floor}"
            )));
        }
    }

    let f = |o: f64, m: f64| case.residuals(model, o, m);
    let search = solve2(&f, &cfg)?;
    let (omega2, mu) = search.best;

    // Liquid profile by integrating the first-integral ODE.
    let grid = grid_two_sided(case.r, omega2, PROFILE_KNOTS);
    let slope = |w: f64, u: f64| u / w * lambert_w_exp(case.a_of(model, mu, w * u));
    let rhs = |w: f64, y: [f64; 2]| [slope(w, y[0]), 0.0];
    let states = ode::integrate_path(&rhs, case.r, [model.u_v, 0.0], &grid, 1e-12)?;
    let us: Vec<f64> = states.iter().map(|y| y[0]).collect();
    let dus: Vec<f64> = grid
        .iter()
        .zip(us.iter())
        .map(|(&w, &u)| slope(w, u))
        .collect();
    let u_profile = crate::profile::TabulatedCurve::with_slopes(grid, us, dus)?;
    let u_end = u_profile.last_value();
    if (u_end - model.u_m).abs() > 1e-7 * model.u_m.abs().max(1.0) {
        return Err(SolverError::Internal(format!(
            "profile integration disagrees with the implicit relation: u(omega2) = {u_end}, expected {}",
            model.u_m
        )));
    }

    let phi2 = |w: f64| exp_integral_e1(mu * w / 2.0).unwrap_or(0.0);
    let c3 = (model.v_m - model.v_inf) / phi2(omega2);
    let omega_max = omega_max_rule(omega2, model.d2m, mu);
    let v_profile = tabulate(
        grid_left_clustered(omega2, omega_max, PROFILE_KNOTS),
        |w| c3 * phi2(w) + model.v_inf,
        |w| -c3 * (-mu * w / 2.0).exp() / w,
    )?;

    Ok(ParaboloidSolution {
        u_profile,
        v_profile,
        evaporation_radius: case.r,
        omega2,
        mu,
        omega_max,
        solver_tag: SolverTag::ClosedFormFastDiffusion,
        pose: Pose::default(),
        diagnostics: SolveDiagnostics {
            residual_f1: search.residuals.0,
            residual_f2: search.residuals.1,
            iterations: search.iterations,
            roots_found: search.roots,
        },
    })
}

/// The pair of transcendental residuals at `(ω₂, μ)`, dispatched on the
/// diffusivity family (constant pair or fast diffusion). Exposed so root
/// landscapes can be plotted and roots audited externally.
pub fn transcendental_residuals(
    problem: &ReducedStefanProblem,
    omega2: f64,
    mu: f64,
) -> Result<(f64, f64), SolverError> {
    if constant_pair(&problem.model).is_some() {
        let case = ConstantCase::from(problem)?;
        case.residuals(&problem.model, omega2, mu)
    } else if is_fast_diffusion_pair(&problem.model) {
        let case = FastDiffusionCase::from(problem)?;
        case.residuals(&problem.model, omega2, mu)
    } else {
        Err(SolverError::Unsupported(
            "no closed-form residual system for this diffusivity family".into(),
        ))
    }
}
