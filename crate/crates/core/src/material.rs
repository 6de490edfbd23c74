//! Physical material description and the enthalpy substitution.
//!
//! A [`MaterialSpec`] carries temperature-dependent conductivities and
//! volumetric heat capacities for the liquid (phase 1) and solid (phase 2)
//! together with latent heats and the three characteristic temperatures.
//! [`goodman_transform`] changes dependent variables to
//! `u = φ₁(T₁) = ∫₀^T C₁(ζ) dζ` (and `v = φ₂(T₂)`), which puts the heat
//! equations in divergence form with diffusivities `d_k = λ_k/C_k` expressed
//! as functions of the new variables. The integrals start at 0 regardless of
//! the far-field temperature.

use crate::profile::{FunctionProfile, ProfileError, TabulatedCurve};
use crate::specialfn::{adaptive_integrate, QuadratureConfig, SpecialFnError};
use thiserror::Error;

/// Knot count for tabulated transforms over the active temperature range.
const TRANSFORM_KNOTS: usize = 512;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("invalid material: {0}")]
    Invalid(String),
    #[error("transform error: {0}")]
    Transform(String),
    #[error("value {value} outside the tabulated range [{lo}, {hi}] of phase {phase:?}")]
    Range {
        phase: Phase,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("model carries no temperature map (built directly from diffusivities)")]
    NoTemperatureMap,
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Quadrature(#[from] SpecialFnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Liquid,
    Solid,
}

/// Physical material of the two-phase melting/evaporation problem.
#[derive(Debug, Clone)]
pub struct MaterialSpec {
    /// Thermal conductivity of the liquid, W·m⁻¹·K⁻¹, as a function of T.
    pub lambda1: FunctionProfile,
    /// Thermal conductivity of the solid.
    pub lambda2: FunctionProfile,
    /// Volumetric heat capacity of the liquid, J·m⁻³·K⁻¹.
    pub c1: FunctionProfile,
    /// Volumetric heat capacity of the solid.
    pub c2: FunctionProfile,
    /// Latent heat of evaporation per unit volume, J·m⁻³.
    pub latent_evaporation: f64,
    /// Latent heat of melting per unit volume, J·m⁻³.
    pub latent_melting: f64,
    /// Evaporation temperature, K.
    pub t_evaporation: f64,
    /// Melting temperature, K.
    pub t_melting: f64,
    /// Far-field (initial solid) temperature, K.
    pub t_far: f64,
}

impl MaterialSpec {
    pub fn validate(&self) -> Result<(), MaterialError> {
        for (p, name) in [
            (&self.lambda1, "lambda1"),
            (&self.lambda2, "lambda2"),
            (&self.c1, "c1"),
            (&self.c2, "c2"),
        ] {
            p.validate()
                .map_err(|e| MaterialError::Invalid(format!("{name}: {e}")))?;
        }
        if !(self.latent_evaporation > 0.0) || !(self.latent_melting > 0.0) {
            return Err(MaterialError::Invalid(
                "latent heats must be positive".into(),
            ));
        }
        if !(self.t_evaporation > self.t_melting && self.t_melting > self.t_far) {
            return Err(MaterialError::Invalid(format!(
                "temperatures must satisfy T_v > T_m > T_inf, got ({}, {}, {})",
                self.t_evaporation, self.t_melting, self.t_far
            )));
        }
        // Conductivities must be positive over each phase's active range.
        self.lambda1
            .validate_positive(self.t_melting, self.t_evaporation, "lambda1")?;
        self.lambda2
            .validate_positive(self.t_far, self.t_melting, "lambda2")?;
        Ok(())
    }
}

/// The transformed model: diffusivities as functions of the enthalpy
/// variables, the four enthalpy thresholds, the boundary diffusivity
/// constants and the latent heats.
///
/// `d1v`, `d1m`, `d2m` equal `d₁(u_v)`, `d₁(u_m)`, `d₂(v_m)` on construction;
/// equivalence scalings may later move them by their own scaling law, which
/// is why they are stored explicitly rather than recomputed.
#[derive(Debug, Clone)]
pub struct EnthalpyModel {
    pub d1: FunctionProfile,
    pub d2: FunctionProfile,
    pub u_v: f64,
    pub u_m: f64,
    pub v_m: f64,
    pub v_inf: f64,
    pub d1v: f64,
    pub d1m: f64,
    pub d2m: f64,
    pub latent_evaporation: f64,
    pub latent_melting: f64,
    /// Enthalpy-vs-temperature maps, present when built from a material.
    phi1: Option<TabulatedCurve>,
    phi2: Option<TabulatedCurve>,
}

impl EnthalpyModel {
    /// Build from diffusivity profiles; boundary constants are evaluated
    /// from the profiles at the thresholds.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d1: FunctionProfile,
        d2: FunctionProfile,
        u_v: f64,
        u_m: f64,
        v_m: f64,
        v_inf: f64,
        latent_evaporation: f64,
        latent_melting: f64,
    ) -> Result<Self, MaterialError> {
        let d1v = d1.eval(u_v)?;
        let d1m = d1.eval(u_m)?;
        let d2m = d2.eval(v_m)?;
        Self::with_constants(
            d1,
            d2,
            u_v,
            u_m,
            v_m,
            v_inf,
            d1v,
            d1m,
            d2m,
            latent_evaporation,
            latent_melting,
        )
    }

    /// Build with explicit boundary constants (used by the equivalence
    /// normalizer, whose scalings move the constants independently).
    #[allow(clippy::too_many_arguments)]
    pub fn with_constants(
        d1: FunctionProfile,
        d2: FunctionProfile,
        u_v: f64,
        u_m: f64,
        v_m: f64,
        v_inf: f64,
        d1v: f64,
        d1m: f64,
        d2m: f64,
        latent_evaporation: f64,
        latent_melting: f64,
    ) -> Result<Self, MaterialError> {
        let model = Self {
            d1,
            d2,
            u_v,
            u_m,
            v_m,
            v_inf,
            d1v,
            d1m,
            d2m,
            latent_evaporation,
            latent_melting,
            phi1: None,
            phi2: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        self.d1.validate()?;
        self.d2.validate()?;
        if self.u_v == self.u_m {
            return Err(MaterialError::Invalid("u_v must differ from u_m".into()));
        }
        if self.v_m == self.v_inf {
            return Err(MaterialError::Invalid("v_m must differ from v_inf".into()));
        }
        let (ulo, uhi) = sorted(self.u_v, self.u_m);
        let (vlo, vhi) = sorted(self.v_m, self.v_inf);
        self.d1.validate_positive(ulo, uhi, "d1")?;
        self.d2.validate_positive(vlo, vhi, "d2")?;
        for (c, name) in [(self.d1v, "d1v"), (self.d1m, "d1m"), (self.d2m, "d2m")] {
            if !(c > 0.0) {
                return Err(MaterialError::Invalid(format!("{name} must be positive")));
            }
        }
        if !(self.latent_evaporation > 0.0) || !(self.latent_melting > 0.0) {
            return Err(MaterialError::Invalid(
                "latent heats must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn has_temperature_map(&self) -> bool {
        self.phi1.is_some() && self.phi2.is_some()
    }
}

fn sorted(a: f64, b: f64) -> (f64, f64) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Enthalpy of a phase at temperature `t`: `∫₀^t C(ζ) dζ`, exact for
/// constant capacities.
fn enthalpy_at(c: &FunctionProfile, t: f64, quad: &QuadratureConfig) -> Result<f64, MaterialError> {
    if let FunctionProfile::Constant(cv) = c {
        return Ok(cv * t);
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if t > 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
    let v = adaptive_integrate(|z| c.eval_clamped(z), lo, hi, quad)?;
    Ok(sign * v)
}

/// Cumulative enthalpy map over `[t_lo, t_hi]`: a curve `T ↦ φ(T)` with
/// exact slopes `φ' = C`, anchored so that `φ(0) = 0`.
fn build_phi_curve(
    c: &FunctionProfile,
    t_lo: f64,
    t_hi: f64,
    quad: &QuadratureConfig,
) -> Result<TabulatedCurve, MaterialError> {
    let n = TRANSFORM_KNOTS;
    let mut ts = Vec::with_capacity(n);
    let mut phis = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    let mut acc = enthalpy_at(c, t_lo, quad)?;
    for i in 0..n {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (n - 1) as f64;
        if i > 0 {
            let prev = t_lo + (t_hi - t_lo) * (i - 1) as f64 / (n - 1) as f64;
            acc += adaptive_integrate(|z| c.eval_clamped(z), prev, t, quad)?;
        }
        ts.push(t);
        phis.push(acc);
        slopes.push(c.eval_clamped(t));
    }
    Ok(TabulatedCurve::with_slopes(ts, phis, slopes)?)
}

/// Change of variables from temperature to enthalpy densities.
///
/// Thresholds are the capacity integrals from 0 to the characteristic
/// temperatures; the diffusivities `d_k = λ_k/C_k` are re-expressed in the
/// enthalpy variables, as exact constants when both inputs are constant and
/// as tabulated curves over the active range otherwise.
pub fn goodman_transform(
    spec: &MaterialSpec,
    quad: &QuadratureConfig,
) -> Result<EnthalpyModel, MaterialError> {
    spec.validate()?;

    // Monotone invertibility of the enthalpy maps needs positive capacities
    // on the closed integration spans (their interiors).
    let span1_lo = 0.0f64.min(spec.t_melting);
    let span1_hi = spec.t_evaporation.max(0.0);
    spec.c1
        .validate_positive(span1_lo, span1_hi, "c1")
        .map_err(|e| MaterialError::Transform(e.to_string()))?;
    let span2_lo = 0.0f64.min(spec.t_far);
    let span2_hi = spec.t_melting.max(0.0);
    spec.c2
        .validate_positive(span2_lo, span2_hi, "c2")
        .map_err(|e| MaterialError::Transform(e.to_string()))?;

    let u_v = enthalpy_at(&spec.c1, spec.t_evaporation, quad)?;
    let u_m = enthalpy_at(&spec.c1, spec.t_melting, quad)?;
    let v_m = enthalpy_at(&spec.c2, spec.t_melting, quad)?;
    let v_inf = enthalpy_at(&spec.c2, spec.t_far, quad)?;

    let phi1 = build_phi_curve(&spec.c1, span1_lo, span1_hi, quad)?;
    let phi2 = build_phi_curve(&spec.c2, span2_lo, span2_hi, quad)?;

    let d1 = build_diffusivity(
        &spec.lambda1,
        &spec.c1,
        spec.t_melting,
        spec.t_evaporation,
        quad,
    )?;
    let d2 = build_diffusivity(&spec.lambda2, &spec.c2, spec.t_far, spec.t_melting, quad)?;

    let d_at = |lam: &FunctionProfile, c: &FunctionProfile, t: f64| -> Result<f64, MaterialError> {
        Ok(lam.eval(t)? / c.eval(t)?)
    };
    let d1v = d_at(&spec.lambda1, &spec.c1, spec.t_evaporation)?;
    let d1m = d_at(&spec.lambda1, &spec.c1, spec.t_melting)?;
    let d2m = d_at(&spec.lambda2, &spec.c2, spec.t_melting)?;

    let mut model = EnthalpyModel::with_constants(
        d1,
        d2,
        u_v,
        u_m,
        v_m,
        v_inf,
        d1v,
        d1m,
        d2m,
        spec.latent_evaporation,
        spec.latent_melting,
    )?;
    model.phi1 = Some(phi1);
    model.phi2 = Some(phi2);
    Ok(model)
}

/// Diffusivity `d(u) = λ(φ⁻¹(u))/C(φ⁻¹(u))` tabulated over the active range
/// `[t_lo, t_hi]`, or an exact constant when both profiles are constant.
fn build_diffusivity(
    lambda: &FunctionProfile,
    c: &FunctionProfile,
    t_lo: f64,
    t_hi: f64,
    quad: &QuadratureConfig,
) -> Result<FunctionProfile, MaterialError> {
    if let (FunctionProfile::Constant(l), FunctionProfile::Constant(cv)) = (lambda, c) {
        return Ok(FunctionProfile::Constant(l / cv));
    }
    let n = TRANSFORM_KNOTS;
    let mut us = Vec::with_capacity(n);
    let mut ds = Vec::with_capacity(n);
    let mut acc = enthalpy_at(c, t_lo, quad)?;
    let mut prev_t = t_lo;
    for i in 0..n {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (n - 1) as f64;
        if i > 0 {
            acc += adaptive_integrate(|z| c.eval_clamped(z), prev_t, t, quad)?;
        }
        prev_t = t;
        let cv = c.eval(t)?;
        if !(cv > 0.0) {
            return Err(MaterialError::Transform(format!(
                "capacity is nonpositive ({cv}) at T = {t}"
            )));
        }
        us.push(acc);
        ds.push(lambda.eval(t)? / cv);
    }
    Ok(FunctionProfile::Tabulated(TabulatedCurve::new(
        &us.into_iter().zip(ds).collect::<Vec<_>>(),
    )?))
}

/// Invert the enthalpy map of one phase: temperature `T` with `φ(T) = value`.
pub fn invert_enthalpy(
    model: &EnthalpyModel,
    phase: Phase,
    value: f64,
) -> Result<f64, MaterialError> {
    let curve = match phase {
        Phase::Liquid => model.phi1.as_ref(),
        Phase::Solid => model.phi2.as_ref(),
    }
    .ok_or(MaterialError::NoTemperatureMap)?;
    curve.invert(value).map_err(|e| match e {
        ProfileError::OutOfRange { arg, lo, hi } => MaterialError::Range {
            phase,
            value: arg,
            lo,
            hi,
        },
        other => MaterialError::Profile(other),
    })
}
