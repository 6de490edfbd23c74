//! Solvers for the reduced free-boundary ODE system.
//!
//! On the paraboloid invariant coordinate the two-phase problem becomes
//!
//! ```text
//! (ω d₁(u) u')' + (μω/2) u' = 0,   R < ω < ω₂      (liquid)
//! (ω d₂(v) v')' + (μω/2) v' = 0,   ω > ω₂          (solid)
//! ω = R:   2 d₁ᵥ u' = μH_v − q,    u = u_v
//! ω = ω₂:  2 d₂ₘ v' = 2 d₁ₘ u' + μH_m,  u = u_m,  v = v_m
//! ω → ∞:   v → v_inf
//! ```
//!
//! with the melting-surface level ω₂ and the front speed μ determined
//! together by a 2×2 transcendental system. Closed forms exist for constant
//! diffusivities (profiles in the exponential integral) and the
//! fast-diffusion pair `d₁ = u⁻¹`, `d₂ = 1` (an implicit Lambert-W profile);
//! arbitrary positive diffusivities are handled by shooting. The same
//! machinery with the geometric `ω` factors dropped solves the planar
//! traveling-wave reduction.

mod closed_form;
mod ode;
mod root2d;
mod shooting;

use crate::material::{EnthalpyModel, MaterialError};
use crate::profile::{lagrange_derivative_at, FunctionProfile, ProfileError, TabulatedCurve};
use crate::reduction::{
    reconstruct_field_posed, FieldSample, Pose, ReductionError, SurfaceGeometry,
};
use crate::specialfn::SpecialFnError;
use crate::symmetry::{GeneratorTag, GroupElement};
use thiserror::Error;

pub use closed_form::{solve_constant_diffusivity, solve_fast_diffusion, transcendental_residuals};
pub use shooting::{solve_planar, solve_shooting};

/// Knots per tabulated phase profile, geometrically clustered toward the
/// surfaces where the kernel `e^(−μω/(2a))` makes gradients largest.
pub(crate) const PROFILE_KNOTS: usize = 512;

/// Far-field truncation in e-folding lengths of the solid-phase kernel.
pub(crate) const FAR_FIELD_EFOLDS: f64 = 40.0;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("stiffness error: {0}")]
    Stiffness(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Which reduced geometry the problem lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    ParaboloidOmega,
    PlanarWave,
}

/// The reduced free-boundary problem: a transformed model, the
/// evaporation-surface level `R`, the flux magnitude `q` and the geometry.
#[derive(Debug, Clone)]
pub struct ReducedStefanProblem {
    pub model: EnthalpyModel,
    pub evaporation_radius: f64,
    pub flux_magnitude: f64,
    pub geometry: GeometryKind,
}

impl ReducedStefanProblem {
    pub fn new(
        model: EnthalpyModel,
        evaporation_radius: f64,
        flux_magnitude: f64,
        geometry: GeometryKind,
    ) -> Result<Self, SolverError> {
        if !(evaporation_radius > 0.0) {
            return Err(SolverError::InvalidProblem(format!(
                "evaporation radius must be positive, got {evaporation_radius}"
            )));
        }
        if flux_magnitude == 0.0 || !flux_magnitude.is_finite() {
            return Err(SolverError::InvalidProblem(
                "flux magnitude must be nonzero and finite".into(),
            ));
        }
        model.validate()?;
        Ok(Self {
            model,
            evaporation_radius,
            flux_magnitude,
            geometry,
        })
    }
}

/// Root-search configuration for the `(ω₂, μ)` system.
#[derive(Debug, Clone)]
pub struct RootSolveConfig {
    pub abs_tol: f64,
    pub max_iters: usize,
    /// Bracket for the melting-surface level (planar: the shell thickness).
    pub omega2_bracket: (f64, f64),
    pub mu_bracket: (f64, f64),
    pub multistart: usize,
}

impl RootSolveConfig {
    /// Defaults scaled to the evaporation radius.
    pub fn default_for(evaporation_radius: f64) -> Self {
        Self {
            abs_tol: 1e-10,
            max_iters: 100,
            omega2_bracket: (evaporation_radius * (1.0 + 1e-6), evaporation_radius * 60.0),
            mu_bracket: (1e-4, 40.0),
            multistart: 8,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.abs_tol > 0.0) {
            return Err(SolverError::InvalidProblem(
                "abs_tol must be positive".into(),
            ));
        }
        let (olo, ohi) = self.omega2_bracket;
        let (mlo, mhi) = self.mu_bracket;
        if !(olo > 0.0 && olo < ohi) || !(mlo > 0.0 && mlo < mhi) {
            return Err(SolverError::InvalidProblem(format!(
                "invalid brackets: omega2 in [{olo}, {ohi}], mu in [{mlo}, {mhi}]"
            )));
        }
        if self.max_iters == 0 || self.multistart == 0 {
            return Err(SolverError::InvalidProblem(
                "max_iters and multistart must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Which path produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverTag {
    ClosedFormConstant,
    ClosedFormFastDiffusion,
    Shooting,
}

impl SolverTag {
    pub fn name(&self) -> &'static str {
        match self {
            SolverTag::ClosedFormConstant => "closed-form-constant",
            SolverTag::ClosedFormFastDiffusion => "closed-form-fast-diffusion",
            SolverTag::Shooting => "shooting",
        }
    }
}

/// Root-finder diagnostics attached to a solution.
#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    pub residual_f1: f64,
    pub residual_f2: f64,
    pub iterations: usize,
    /// All distinct admissible roots found; the solution uses the one with
    /// the smallest μ. More than one entry is a multiplicity flag, not an
    /// error.
    pub roots_found: Vec<(f64, f64)>,
}

impl SolveDiagnostics {
    pub fn multiple_roots(&self) -> bool {
        self.roots_found.len() > 1
    }
}

/// A solved paraboloid problem: tabulated phase profiles over ω, the solved
/// `(ω₂, μ)`, the far-field truncation level and the transport pose.
#[derive(Debug, Clone)]
pub struct ParaboloidSolution {
    pub u_profile: TabulatedCurve,
    pub v_profile: TabulatedCurve,
    pub evaporation_radius: f64,
    pub omega2: f64,
    pub mu: f64,
    pub omega_max: f64,
    pub solver_tag: SolverTag,
    pub pose: Pose,
    pub diagnostics: SolveDiagnostics,
}

impl ParaboloidSolution {
    pub fn geometry(&self) -> SurfaceGeometry {
        SurfaceGeometry {
            omega1: self.evaporation_radius,
            omega2: self.omega2,
            mu: self.mu,
        }
    }

    /// Field value at a space-time point, honoring the transport pose.
    pub fn sample(&self, t: f64, x: (f64, f64, f64)) -> Result<FieldSample, ReductionError> {
        reconstruct_field_posed(
            &self.u_profile,
            &self.v_profile,
            &self.geometry(),
            &self.pose,
            (t, x),
        )
    }

    /// Transport the solution by a time translation, an axial translation
    /// or a rotation; the other invariance groups are not solution
    /// transports of a fixed case-5 problem.
    pub fn transported(&self, elem: &GroupElement) -> Result<Self, SolverError> {
        let mut out = self.clone();
        match elem.tag {
            GeneratorTag::T0 => out.pose.t_origin += elem.parameter,
            GeneratorTag::T3 => out.pose.x3_origin += elem.parameter,
            GeneratorTag::T5 => out.pose.angle += elem.parameter,
            other => {
                return Err(SolverError::Unsupported(format!(
                    "transport by {} is not a solution map of a fixed constant-flux problem",
                    other.name()
                )))
            }
        }
        Ok(out)
    }
}

/// A solved planar traveling wave: profiles over `z`, interface positions
/// `z₁ = 0` (evaporation, fixed by translation invariance) and `z₂`
/// (melting), and the front speed μ.
#[derive(Debug, Clone)]
pub struct PlanarSolution {
    pub u_profile: TabulatedCurve,
    pub v_profile: TabulatedCurve,
    pub z1: f64,
    pub z2: f64,
    pub mu: f64,
    pub z_max: f64,
    pub diagnostics: SolveDiagnostics,
}

/// Solution method requested through the command surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Auto,
    ClosedForm,
    Shooting,
}

pub(crate) fn constant_pair(model: &EnthalpyModel) -> Option<(f64, f64)> {
    match (&model.d1, &model.d2) {
        (FunctionProfile::Constant(a1), FunctionProfile::Constant(a2)) => Some((*a1, *a2)),
        _ => None,
    }
}

pub(crate) fn is_fast_diffusion_pair(model: &EnthalpyModel) -> bool {
    let d1_ok = matches!(
        model.d1,
        FunctionProfile::Power { coeff, exponent, shift }
            if (coeff - 1.0).abs() <= 1e-12
                && (exponent + 1.0).abs() <= 1e-12
                && shift.abs() <= 1e-12
    );
    let d2_ok = matches!(model.d2, FunctionProfile::Constant(c) if (c - 1.0).abs() <= 1e-12);
    d1_ok && d2_ok
}

/// Dispatch on the requested method and the diffusivity family. `Auto`
/// takes a closed form when one applies and falls back to shooting.
pub fn solve_paraboloid(
    problem: &ReducedStefanProblem,
    cfg: &RootSolveConfig,
    method: SolveMethod,
) -> Result<ParaboloidSolution, SolverError> {
    if problem.geometry != GeometryKind::ParaboloidOmega {
        return Err(SolverError::Unsupported(
            "problem geometry is planar; use solve_planar".into(),
        ));
    }
    match method {
        SolveMethod::Auto => {
            if constant_pair(&problem.model).is_some() {
                solve_constant_diffusivity(problem, cfg)
            } else if is_fast_diffusion_pair(&problem.model) {
                solve_fast_diffusion(problem, cfg)
            } else {
                solve_shooting(problem, cfg)
            }
        }
        SolveMethod::ClosedForm => {
            if constant_pair(&problem.model).is_some() {
                solve_constant_diffusivity(problem, cfg)
            } else if is_fast_diffusion_pair(&problem.model) {
                solve_fast_diffusion(problem, cfg)
            } else {
                Err(SolverError::Unsupported(
                    "no closed form for this diffusivity family; use shooting".into(),
                ))
            }
        }
        SolveMethod::Shooting => solve_shooting(problem, cfg),
    }
}

/// Far-field truncation level for the solid phase.
pub(crate) fn omega_max_rule(omega2: f64, d2m: f64, mu: f64) -> f64 {
    omega2 + FAR_FIELD_EFOLDS * (2.0 * d2m / mu)
}

/// Grid over `[lo, hi]` clustered toward both ends (liquid phase).
pub(crate) fn grid_two_sided(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let c: f64 = 2.0;
    let th = c.tanh();
    let mut xs: Vec<f64> = (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            let xi = 0.5 * (1.0 + (c * (2.0 * s - 1.0)).tanh() / th);
            lo + (hi - lo) * xi
        })
        .collect();
    xs[0] = lo;
    xs[n - 1] = hi;
    xs
}

/// Grid over `[lo, hi]` clustered toward the left end (solid phase).
pub(crate) fn grid_left_clustered(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let c: f64 = 5.0;
    let denom = c.exp_m1();
    let mut xs: Vec<f64> = (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            let xi = (c * s).exp_m1() / denom;
            lo + (hi - lo) * xi
        })
        .collect();
    xs[0] = lo;
    xs[n - 1] = hi;
    xs
}

/// Tabulate value/derivative closures over a grid.
pub(crate) fn tabulate(
    xs: Vec<f64>,
    value: impl Fn(f64) -> f64,
    deriv: impl Fn(f64) -> f64,
) -> Result<TabulatedCurve, SolverError> {
    let ys: Vec<f64> = xs.iter().map(|&x| value(x)).collect();
    let slopes: Vec<f64> = xs.iter().map(|&x| deriv(x)).collect();
    if ys.iter().chain(slopes.iter()).any(|v| !v.is_finite()) {
        return Err(SolverError::Internal(
            "non-finite profile values during tabulation".into(),
        ));
    }
    Ok(TabulatedCurve::with_slopes(xs, ys, slopes)?)
}

/// Maximum residual of the reduced equation `(ω d(u) u')' + (μω/2) u' = 0`
/// over the interior knots of a tabulated profile, using a five-point
/// Lagrange derivative of the flux variable `w = ω d(u) u'`. Fourth-order
/// accurate on the stored knot data.
pub fn reduced_ode_residual_max(
    profile: &TabulatedCurve,
    d: &FunctionProfile,
    mu: f64,
) -> Result<f64, SolverError> {
    ode_residual_max_impl(profile, d, mu, true)
}

/// Same check for the planar equation `(d(u) u')' + μ u' = 0`.
pub fn planar_ode_residual_max(
    profile: &TabulatedCurve,
    d: &FunctionProfile,
    mu: f64,
) -> Result<f64, SolverError> {
    ode_residual_max_impl(profile, d, mu, false)
}

fn ode_residual_max_impl(
    profile: &TabulatedCurve,
    d: &FunctionProfile,
    mu: f64,
    geometric: bool,
) -> Result<f64, SolverError> {
    let xs = profile.xs();
    let us = profile.ys();
    let dus = profile.slopes();
    let n = xs.len();
    if n < 5 {
        return Err(SolverError::InvalidProblem(
            "profile too short for a residual check".into(),
        ));
    }
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let geom = if geometric { xs[i] } else { 1.0 };
        w.push(geom * d.eval(us[i])? * dus[i]);
    }
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        let wp = lagrange_derivative_at(xs, &w, 5, i);
        let drift = if geometric {
            mu * xs[i] / 2.0 * dus[i]
        } else {
            mu * dus[i]
        };
        worst = worst.max((wp + drift).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::EnthalpyModel;

    fn problem_with(d1: FunctionProfile, u_v: f64, u_m: f64, v_m: f64, v_inf: f64, q: f64) -> ReducedStefanProblem {
        let model = EnthalpyModel::new(
            d1,
            FunctionProfile::Constant(1.0),
            u_v,
            u_m,
            v_m,
            v_inf,
            1.0,
            1.0,
        )
        .unwrap();
        ReducedStefanProblem::new(model, 1.0, q, GeometryKind::ParaboloidOmega).unwrap()
    }

    #[test]
    fn auto_method_dispatches_on_the_diffusivity_family() {
        let cfg = RootSolveConfig::default_for(1.0);
        let constant = problem_with(FunctionProfile::Constant(1.0), 2.0, 1.0, 1.0, 0.0, 2.0);
        let sol = solve_paraboloid(&constant, &cfg, SolveMethod::Auto).unwrap();
        assert_eq!(sol.solver_tag, SolverTag::ClosedFormConstant);

        let fast = problem_with(
            FunctionProfile::Power {
                coeff: 1.0,
                exponent: -1.0,
                shift: 0.0,
            },
            1.0,
            1.4,
            0.0,
            0.8,
            0.2,
        );
        let sol = solve_paraboloid(&fast, &cfg, SolveMethod::Auto).unwrap();
        assert_eq!(sol.solver_tag, SolverTag::ClosedFormFastDiffusion);

        let nonlinear = problem_with(
            FunctionProfile::Exponential {
                coeff: 0.5,
                rate: 1.0,
            },
            2.0,
            1.0,
            1.0,
            0.0,
            2.0,
        );
        let sol = solve_paraboloid(&nonlinear, &cfg, SolveMethod::Auto).unwrap();
        assert_eq!(sol.solver_tag, SolverTag::Shooting);
        // Requesting a closed form for it is refused.
        assert!(matches!(
            solve_paraboloid(&nonlinear, &cfg, SolveMethod::ClosedForm),
            Err(SolverError::Unsupported(_))
        ));
    }

    #[test]
    fn grids_hit_endpoints_and_are_increasing() {
        for xs in [grid_two_sided(1.0, 3.0, 64), grid_left_clustered(2.0, 160.0, 64)] {
            assert_eq!(xs[0], xs[0].min(xs[63]));
            for w in xs.windows(2) {
                assert!(w[1] > w[0]);
            }
        }
        let xs = grid_left_clustered(2.0, 162.0, 512);
        // Clustering: first spacing much finer than the last.
        assert!(xs[1] - xs[0] < (xs[511] - xs[510]) / 20.0);
    }

    #[test]
    fn reduced_residual_vanishes_on_manufactured_solution() {
        // d = 1: u = E₁(μω/2) solves (ω u')' + (μω/2) u' = 0.
        let mu = 0.8;
        let xs = grid_two_sided(1.0, 3.0, 256);
        let curve = tabulate(
            xs,
            |w| crate::specialfn::exp_integral_e1(mu * w / 2.0).unwrap(),
            |w| -(-mu * w / 2.0_f64).exp() / w,
        )
        .unwrap();
        let res =
            reduced_ode_residual_max(&curve, &FunctionProfile::Constant(1.0), mu).unwrap();
        assert!(res < 1e-8, "residual {res:e}");
    }

    #[test]
    fn planar_residual_vanishes_on_exponential_solution() {
        // d = a: u = e^(−μz/a) solves (a u')' + μ u' = 0.
        let (mu, a) = (0.6, 1.3);
        let xs = grid_two_sided(0.0, 2.0, 256);
        let curve = tabulate(
            xs,
            |z| (-mu * z / a).exp(),
            |z| -mu / a * (-mu * z / a).exp(),
        )
        .unwrap();
        let res = planar_ode_residual_max(&curve, &FunctionProfile::Constant(a), mu).unwrap();
        assert!(res < 1e-9, "residual {res:e}");
    }
}
