//! Independent residual audit of reconstructed space-time fields.
//!
//! The auditor consumes only the tabulated ω-profiles, the solved
//! `(ω₂, μ)` and the model — never solver internals. It reconstructs
//! `u(t, x)` and `v(t, x)` through the invariant coordinate and measures:
//!
//! - interior residuals of `∂u/∂t − ∇·(d₁(u)∇u)` (and the solid analogue)
//!   by second-order central differences in flux form, in both space and
//!   time — the time derivative is deliberately finite-differenced rather
//!   than evaluated through the traveling structure;
//! - boundary residuals on the two moving paraboloids, in the gradient
//!   form `d₁ᵥ ∇u·∇S₁ + H_v ∂S₁/∂t + Q·∇S₁` on the evaporation surface and
//!   `d₂ₘ ∇v·∇S₂ − d₁ₘ ∇u·∇S₂ + H_m ∂S₂/∂t` on the melting surface, with
//!   the field gradients taken from the ω-profiles by the chain rule
//!   (`∇ω` is known analytically) plus the Dirichlet and far-field defects;
//! - a convergence order estimate `p = log₂(res_h / res_{h/2})` when two
//!   grid levels are requested, on identical sample points.
//!
//! Sample points are drawn by a seeded generator inside each phase,
//! excluding a band around both surfaces so no stencil straddles a
//! boundary; everything is deterministic for a fixed configuration.

use crate::material::EnthalpyModel;
use crate::solver::ParaboloidSolution;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("grid error: {0}")]
    Grid(String),
    #[error("verify error: {0}")]
    Other(String),
}

/// Audit configuration.
#[derive(Debug, Clone)]
pub struct AuditConfig {
    /// Stencil spacing h (space and time).
    pub grid_h: f64,
    /// 1 = single grid; 2 = also run at h/2 and report convergence order.
    pub levels: u8,
    /// Interior sample points per phase.
    pub points_per_phase: usize,
    /// Sample count per boundary surface.
    pub surface_samples: usize,
    /// Audit time.
    pub time: f64,
    /// Seed for the deterministic sampler.
    pub seed: u64,
    /// Half-width of the surface exclusion band, in units of h.
    pub exclusion_band: f64,
    /// Optional explicit ω-ranges per phase; checked against the band.
    pub liquid_region: Option<(f64, f64)>,
    pub solid_region: Option<(f64, f64)>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            grid_h: 0.05,
            levels: 1,
            points_per_phase: 1200,
            surface_samples: 400,
            time: 0.35,
            seed: 0x5ef4_a510,
            exclusion_band: 3.0,
            liquid_region: None,
            solid_region: None,
        }
    }
}

/// Residual norms of the audit. All entries are nonnegative; the
/// convergence orders are present only when two grid levels were run.
#[derive(Debug, Clone, Default)]
pub struct ResidualReport {
    pub pde_liquid_max: f64,
    pub pde_liquid_l2: f64,
    pub pde_solid_max: f64,
    pub pde_solid_l2: f64,
    pub bc_evaporation_flux: f64,
    pub bc_evaporation_dirichlet: f64,
    pub bc_stefan_flux: f64,
    pub bc_stefan_dirichlet_u: f64,
    pub bc_stefan_dirichlet_v: f64,
    pub farfield: f64,
    pub grid_spacing: f64,
    pub convergence_order_liquid: Option<f64>,
    pub convergence_order_solid: Option<f64>,
    pub points_liquid: usize,
    pub points_solid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhaseSel {
    Liquid,
    Solid,
}

/// A field sampler bound to one phase profile in the solution's frame.
struct PhaseField<'a> {
    solution: &'a ParaboloidSolution,
    model: &'a EnthalpyModel,
    phase: PhaseSel,
}

impl<'a> PhaseField<'a> {
    fn omega(&self, t: f64, x: [f64; 3]) -> f64 {
        let pose = &self.solution.pose;
        let z = pose.comoving_z(t, x[2], self.solution.mu);
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        omega_zr(z, r)
    }

    /// Profile evaluation with clamped extension: audits of deliberately
    /// corrupted solutions (perturbed ω₂ or μ) must produce large residuals
    /// rather than range errors.
    fn value(&self, t: f64, x: [f64; 3]) -> Result<f64, VerifyError> {
        let w = self.omega(t, x);
        let profile = match self.phase {
            PhaseSel::Liquid => &self.solution.u_profile,
            PhaseSel::Solid => &self.solution.v_profile,
        };
        Ok(profile.eval_clamped(w))
    }

    fn diffusivity(&self, value: f64) -> f64 {
        match self.phase {
            PhaseSel::Liquid => self.model.d1.eval_clamped(value),
            PhaseSel::Solid => self.model.d2.eval_clamped(value),
        }
    }

    /// Second-order residual of `∂f/∂t − ∇·(d(f)∇f)` at one point.
    fn pde_residual_at(&self, t: f64, x: [f64; 3], h: f64) -> Result<f64, VerifyError> {
        let f0 = self.value(t, x)?;
        let dt = (self.value(t + h, x)? - self.value(t - h, x)?) / (2.0 * h);
        let mut div = 0.0;
        for axis in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += h;
            xm[axis] -= h;
            let fp = self.value(t, xp)?;
            let fm = self.value(t, xm)?;
            let flux_p = self.diffusivity(0.5 * (f0 + fp)) * (fp - f0) / h;
            let flux_m = self.diffusivity(0.5 * (f0 + fm)) * (f0 - fm) / h;
            div += (flux_p - flux_m) / h;
        }
        Ok(dt - div)
    }
}

fn omega_zr(z: f64, r: f64) -> f64 {
    let rho = z.hypot(r);
    if z >= 0.0 {
        z + rho
    } else if rho - z > 0.0 {
        r * r / (rho - z)
    } else {
        0.0
    }
}

/// Spatial gradient of ω and its time derivative at a point in the
/// solution frame. `∇ω = (x₁/ρ, x₂/ρ, ω/ρ)`, `∂ω/∂t = −μ ω/ρ`.
fn omega_derivatives(sol: &ParaboloidSolution, t: f64, x: [f64; 3]) -> (f64, [f64; 3], f64) {
    let z = sol.pose.comoving_z(t, x[2], sol.mu);
    let r2 = x[0] * x[0] + x[1] * x[1];
    let rho = z.hypot(r2.sqrt());
    let w = omega_zr(z, r2.sqrt());
    let grad = [x[0] / rho, x[1] / rho, w / rho];
    let dt = -sol.mu * w / rho;
    (w, grad, dt)
}

/// How strongly ω varies at a point: used to convert the ω-band into a
/// spatial exclusion distance for the stencil.
fn omega_sensitivity(sol: &ParaboloidSolution, t: f64, x: [f64; 3]) -> f64 {
    let (_, grad, dt) = omega_derivatives(sol, t, x);
    let g = (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]).sqrt();
    (3.0f64).sqrt() * g + dt.abs()
}

fn sample_phase_points(
    sol: &ParaboloidSolution,
    cfg: &AuditConfig,
    phase: PhaseSel,
    band_width: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<[f64; 3]>, VerifyError> {
    let (mut w_lo, mut w_hi) = match phase {
        PhaseSel::Liquid => (sol.evaporation_radius, sol.omega2),
        PhaseSel::Solid => {
            // Sample where the solid actually varies: a few decay lengths.
            let decay = 2.0 * 6.0 / sol.mu; // 6 e-folds of e^(−μω/2·…) scale
            (sol.omega2, (sol.omega2 + decay).min(sol.omega_max))
        }
    };
    if let Some((lo, hi)) = match phase {
        PhaseSel::Liquid => cfg.liquid_region,
        PhaseSel::Solid => cfg.solid_region,
    } {
        w_lo = lo;
        w_hi = hi;
    }
    let t = cfg.time;
    // Bounding box around the ω-annulus near the surfaces, in the frame.
    let z_apex = w_hi / 2.0;
    let z_lo = -1.2 * w_hi;
    let r_hi = 1.8 * w_hi;
    let mut out = Vec::with_capacity(cfg.points_per_phase);
    let mut attempts = 0usize;
    let max_attempts = 20_000 * cfg.points_per_phase.max(1);
    while out.len() < cfg.points_per_phase {
        attempts += 1;
        if attempts > max_attempts {
            return Err(VerifyError::Grid(format!(
                "could not place {} sample points in the {:?} region [{w_lo}, {w_hi}]",
                cfg.points_per_phase, phase
            )));
        }
        let z = rng.gen_range(z_lo..z_apex);
        let r = rng.gen_range(0.0..r_hi);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let x3 = z + sol.pose.x3_origin + sol.mu * (t - sol.pose.t_origin);
        let x = [r * theta.cos(), r * theta.sin(), x3];
        let w = omega_zr(z, r);
        if w <= w_lo || w >= w_hi {
            continue;
        }
        // The whole stencil must stay inside the same phase.
        let sens = omega_sensitivity(sol, t, x);
        let margin = band_width * sens;
        let clear = [sol.evaporation_radius, sol.omega2, sol.omega_max]
            .iter()
            .all(|lvl| (w - lvl).abs() > margin);
        if !clear || w - margin < w_lo.min(sol.evaporation_radius) {
            continue;
        }
        out.push(x);
    }
    Ok(out)
}

fn norms(residuals: &[f64]) -> (f64, f64) {
    let max = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let l2 = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len().max(1) as f64).sqrt();
    (max, l2)
}

/// Interior PDE residuals. With `levels = 2` the same sample points are
/// evaluated at `h` and `h/2` and the reported norms are those at `h`,
/// with the per-phase convergence order attached.
pub fn pde_residual(
    solution: &ParaboloidSolution,
    model: &EnthalpyModel,
    cfg: &AuditConfig,
) -> Result<ResidualReport, VerifyError> {
    validate_regions(solution, cfg)?;
    let h = cfg.grid_h;
    let band = cfg.exclusion_band * h;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = ResidualReport {
        grid_spacing: h,
        ..ResidualReport::default()
    };
    for phase in [PhaseSel::Liquid, PhaseSel::Solid] {
        let pts = sample_phase_points(solution, cfg, phase, band, &mut rng)?;
        let field = PhaseField {
            solution,
            model,
            phase,
        };
        let res_h: Vec<f64> = pts
            .iter()
            .map(|&x| field.pde_residual_at(cfg.time, x, h))
            .collect::<Result<_, _>>()?;
        let (max, l2) = norms(&res_h);
        let order = if cfg.levels >= 2 {
            let res_h2: Vec<f64> = pts
                .iter()
                .map(|&x| field.pde_residual_at(cfg.time, x, h / 2.0))
                .collect::<Result<_, _>>()?;
            let (_, l2_fine) = norms(&res_h2);
            Some((l2 / l2_fine).log2())
        } else {
            None
        };
        match phase {
            PhaseSel::Liquid => {
                report.pde_liquid_max = max;
                report.pde_liquid_l2 = l2;
                report.convergence_order_liquid = order;
                report.points_liquid = pts.len();
            }
            PhaseSel::Solid => {
                report.pde_solid_max = max;
                report.pde_solid_l2 = l2;
                report.convergence_order_solid = order;
                report.points_solid = pts.len();
            }
        }
    }
    Ok(report)
}

fn validate_regions(sol: &ParaboloidSolution, cfg: &AuditConfig) -> Result<(), VerifyError> {
    let band = cfg.exclusion_band * cfg.grid_h;
    // ω varies at unit-order rate near the axis apex; a region that comes
    // within ~2·band of a surface level cannot host full stencils.
    let guard = 2.0 * band;
    if let Some((lo, hi)) = cfg.liquid_region {
        if lo < sol.evaporation_radius + guard || hi > sol.omega2 - guard || lo >= hi {
            return Err(VerifyError::Grid(format!(
                "liquid region [{lo}, {hi}] intersects the exclusion band around the surfaces"
            )));
        }
    }
    if let Some((lo, hi)) = cfg.solid_region {
        if lo < sol.omega2 + guard || hi > sol.omega_max - guard || lo >= hi {
            return Err(VerifyError::Grid(format!(
                "solid region [{lo}, {hi}] intersects the exclusion band around the surfaces"
            )));
        }
    }
    Ok(())
}

/// Boundary residuals on the two surfaces, the Dirichlet defects and the
/// far-field defect. Field gradients come from the profiles by the chain
/// rule; the surfaces are realized as
/// `S_k = (x₁² + x₂²)/ω_k² + 2(x₃ − μt)/ω_k − 1` (so `∇ω·∇S_k = 4/ω_k` on
/// the surface and `∂S_k/∂t = −2μ/ω_k`).
pub fn boundary_residual(
    solution: &ParaboloidSolution,
    model: &EnthalpyModel,
    flux_magnitude: f64,
    n_surface_samples: usize,
) -> Result<ResidualReport, VerifyError> {
    let sol = solution;
    let n = n_surface_samples.max(2);
    let mut report = ResidualReport {
        grid_spacing: 0.0,
        ..ResidualReport::default()
    };
    let geometry = sol.geometry();
    let t = 0.4;

    let u_p = &sol.u_profile;
    let v_p = &sol.v_profile;
    // Clamped evaluation so perturbed geometries audit as large residuals.
    let eval =
        |c: &crate::profile::TabulatedCurve, w: f64| -> Result<f64, VerifyError> { Ok(c.eval_clamped(w)) };
    let deriv = |c: &crate::profile::TabulatedCurve, w: f64| -> Result<f64, VerifyError> {
        Ok(c.eval_deriv_clamped(w))
    };

    // Evaporation surface: d₁ᵥ ∇u·∇S₁ + H_v ∂S₁/∂t + Q·∇S₁ = 0 and u = u_v.
    let pts = crate::reduction::surface_points_posed(
        &geometry,
        &sol.pose,
        crate::reduction::SurfaceKind::Evaporation,
        t,
        n,
    );
    let w1 = sol.evaporation_radius;
    let mut flux_res = 0.0f64;
    let mut dir_res = 0.0f64;
    for p in &pts {
        let x = [p.0, p.1, p.2];
        let (_, grad_s, st) = surface_derivatives(sol, t, x, w1);
        let up = deriv(u_p, w1)?;
        let (_, grad_w, _) = omega_derivatives(sol, t, x);
        let grad_u = [up * grad_w[0], up * grad_w[1], up * grad_w[2]];
        let dot = grad_u[0] * grad_s[0] + grad_u[1] * grad_s[1] + grad_u[2] * grad_s[2];
        let res = model.d1v * dot + model.latent_evaporation * st + flux_magnitude * grad_s[2];
        flux_res = flux_res.max(res.abs());
        dir_res = dir_res.max((eval(u_p, w1)? - model.u_v).abs());
    }
    report.bc_evaporation_flux = flux_res;
    report.bc_evaporation_dirichlet = dir_res;

    // Melting surface: d₂ₘ ∇v·∇S₂ − d₁ₘ ∇u·∇S₂ + H_m ∂S₂/∂t = 0,
    // u = u_m, v = v_m.
    let pts = crate::reduction::surface_points_posed(
        &geometry,
        &sol.pose,
        crate::reduction::SurfaceKind::Melting,
        t,
        n,
    );
    let w2 = sol.omega2;
    let mut stefan_res = 0.0f64;
    let mut dir_u = 0.0f64;
    let mut dir_v = 0.0f64;
    for p in &pts {
        let x = [p.0, p.1, p.2];
        let (_, grad_s, st) = surface_derivatives(sol, t, x, w2);
        let (_, grad_w, _) = omega_derivatives(sol, t, x);
        let up = deriv(u_p, w2)?;
        let vp = deriv(v_p, w2)?;
        let dot_u = (0..3).map(|i| up * grad_w[i] * grad_s[i]).sum::<f64>();
        let dot_v = (0..3).map(|i| vp * grad_w[i] * grad_s[i]).sum::<f64>();
        let res = model.d2m * dot_v - model.d1m * dot_u + model.latent_melting * st;
        stefan_res = stefan_res.max(res.abs());
        dir_u = dir_u.max((eval(u_p, w2)? - model.u_m).abs());
        dir_v = dir_v.max((eval(v_p, w2)? - model.v_m).abs());
    }
    report.bc_stefan_flux = stefan_res;
    report.bc_stefan_dirichlet_u = dir_u;
    report.bc_stefan_dirichlet_v = dir_v;

    // Far field: |v − v_inf| at the truncation level.
    let far = eval(v_p, sol.omega_max)?;
    report.farfield = (far - model.v_inf).abs();
    Ok(report)
}

/// Derivatives of the realized surface function `S_k` at a point on it.
fn surface_derivatives(
    sol: &ParaboloidSolution,
    t: f64,
    x: [f64; 3],
    level: f64,
) -> (f64, [f64; 3], f64) {
    let z = sol.pose.comoving_z(t, x[2], sol.mu);
    let s = (x[0] * x[0] + x[1] * x[1]) / (level * level) + 2.0 * z / level - 1.0;
    let grad = [
        2.0 * x[0] / (level * level),
        2.0 * x[1] / (level * level),
        2.0 / level,
    ];
    let st = -2.0 * sol.mu / level;
    (s, grad, st)
}

/// Full audit: interior PDE residuals plus boundary/far-field residuals.
pub fn audit(
    solution: &ParaboloidSolution,
    model: &EnthalpyModel,
    flux_magnitude: f64,
    cfg: &AuditConfig,
) -> Result<ResidualReport, VerifyError> {
    let mut report = pde_residual(solution, model, cfg)?;
    let bc = boundary_residual(solution, model, flux_magnitude, cfg.surface_samples)?;
    report.bc_evaporation_flux = bc.bc_evaporation_flux;
    report.bc_evaporation_dirichlet = bc.bc_evaporation_dirichlet;
    report.bc_stefan_flux = bc.bc_stefan_flux;
    report.bc_stefan_dirichlet_u = bc.bc_stefan_dirichlet_u;
    report.bc_stefan_dirichlet_v = bc.bc_stefan_dirichlet_v;
    report.farfield = bc.farfield;
    Ok(report)
}

impl ResidualReport {
    /// Iterate the named residual fields (for serialization and threshold
    /// checks).
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("pde_liquid_max", self.pde_liquid_max),
            ("pde_liquid_l2", self.pde_liquid_l2),
            ("pde_solid_max", self.pde_solid_max),
            ("pde_solid_l2", self.pde_solid_l2),
            ("bc_evaporation_flux", self.bc_evaporation_flux),
            ("bc_evaporation_dirichlet", self.bc_evaporation_dirichlet),
            ("bc_stefan_flux", self.bc_stefan_flux),
            ("bc_stefan_dirichlet_u", self.bc_stefan_dirichlet_u),
            ("bc_stefan_dirichlet_v", self.bc_stefan_dirichlet_v),
            ("farfield", self.farfield),
        ]
    }
}
