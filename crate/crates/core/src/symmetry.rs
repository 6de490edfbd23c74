//! Invariance-group classification and equivalence transformations.
//!
//! Two lookup tables drive everything downstream. The diffusivity-pair table
//! assigns one of ten invariance-algebra cases to `(d₁, d₂)` by family. The
//! flux table assigns one of six cases to the flux vector `Q(t)` by the
//! declared structure of its components; case 5 (constant flux along the
//! axis, `Q = (0, 0, q)`, `q ≠ 0`) is the one the reduction and solvers
//! consume. Classification is pattern matching on declared family tags,
//! never function identification from samples.
//!
//! The module also provides the eight finite point transformations `T0..T7`
//! acting on `(t, x₁, x₂, x₃)` (all of them leave the dependent variables
//! and the surface functions fixed) and the equivalence scalings
//! `t ↦ αt`, `x ↦ βx`, `u ↦ δ₁u + γ₄`, `v ↦ δ₂v + γ₅` with their induced
//! action on diffusivities, thresholds, latent heats and boundary constants,
//! used to bring a problem to a canonical gauge and back.

use crate::material::{EnthalpyModel, MaterialError};
use crate::profile::{FunctionProfile, TabulatedCurve};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("invalid flux: {0}")]
    InvalidFlux(String),
    #[error("gauge error: {0}")]
    Gauge(String),
    #[error("equivalence transformation not applicable: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Material(#[from] MaterialError),
}

/// Structure of one component of the energy-flux vector `Q(t)`.
///
/// The rotating families couple components 1 and 2 and must be declared on
/// both with identical parameters: component 1 carries
/// `q₁ cos(λt) + q₂ sin(λt)` and component 2 `−q₁ sin(λt) + q₂ cos(λt)`
/// (with the additional `1/√t` factor and logarithmic phase for the
/// scaling-invariant variant).
#[derive(Debug, Clone, PartialEq)]
pub enum FluxComponent {
    Zero,
    /// Constant value, nonzero.
    Const(f64),
    /// `q/√t`, q nonzero.
    InvSqrtT(f64),
    /// Rotating with constant amplitude: `Θ(λt)`.
    RotConst { q1: f64, q2: f64, lambda: f64 },
    /// Rotating, decaying: `Θ(½λ ln t)/√t`.
    RotInvSqrtT { q1: f64, q2: f64, lambda: f64 },
    /// Sampled, no declared structure.
    Arbitrary(Vec<(f64, f64)>),
}

impl FluxComponent {
    fn is_zero(&self) -> bool {
        matches!(self, FluxComponent::Zero)
    }

    fn is_nonzero_arbitrary(&self) -> bool {
        match self {
            FluxComponent::Arbitrary(samples) => samples.iter().any(|(_, v)| *v != 0.0),
            _ => false,
        }
    }
}

/// The flux vector `Q(t) = (Q₁, Q₂, Q₃)` by component family.
#[derive(Debug, Clone)]
pub struct FluxSpec {
    pub q1: FluxComponent,
    pub q2: FluxComponent,
    pub q3: FluxComponent,
}

impl FluxSpec {
    /// Constant axial flux `(0, 0, q)`.
    pub fn constant_axial(q: f64) -> Result<Self, SymmetryError> {
        let spec = Self {
            q1: FluxComponent::Zero,
            q2: FluxComponent::Zero,
            q3: FluxComponent::Const(q),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SymmetryError> {
        for (c, name) in [(&self.q1, "q1"), (&self.q2, "q2"), (&self.q3, "q3")] {
            match c {
                FluxComponent::Const(q) | FluxComponent::InvSqrtT(q) => {
                    if *q == 0.0 {
                        return Err(SymmetryError::InvalidFlux(format!(
                            "{name}: zero amplitude; use the Zero family instead"
                        )));
                    }
                    if !q.is_finite() {
                        return Err(SymmetryError::InvalidFlux(format!(
                            "{name}: amplitude must be finite"
                        )));
                    }
                }
                FluxComponent::RotConst { q1, q2, lambda }
                | FluxComponent::RotInvSqrtT { q1, q2, lambda }
                    if *lambda != 0.0 && q1 * q1 + q2 * q2 == 0.0 =>
                {
                    return Err(SymmetryError::InvalidFlux(format!(
                        "{name}: rotating family with nonzero phase rate requires q1 or q2 nonzero"
                    )));
                }
                _ => {}
            }
        }
        // Rotating families live on components 1 and 2 jointly.
        let rot1 = matches!(
            self.q1,
            FluxComponent::RotConst { .. } | FluxComponent::RotInvSqrtT { .. }
        );
        let rot2 = matches!(
            self.q2,
            FluxComponent::RotConst { .. } | FluxComponent::RotInvSqrtT { .. }
        );
        if rot1 != rot2 || (rot1 && self.q1 != self.q2) {
            return Err(SymmetryError::InvalidFlux(
                "rotating families must be declared on components 1 and 2 with equal parameters"
                    .into(),
            ));
        }
        if matches!(
            self.q3,
            FluxComponent::RotConst { .. } | FluxComponent::RotInvSqrtT { .. }
        ) {
            return Err(SymmetryError::InvalidFlux(
                "component 3 cannot carry a rotating family".into(),
            ));
        }
        Ok(())
    }

    /// Magnitude of a constant axial flux, if this is one.
    pub fn constant_axial_magnitude(&self) -> Option<f64> {
        match (&self.q1, &self.q2, &self.q3) {
            (FluxComponent::Zero, FluxComponent::Zero, FluxComponent::Const(q)) => Some(*q),
            _ => None,
        }
    }
}

/// Tags of the finite one-parameter invariance groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GeneratorTag {
    T0,
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
}

impl GeneratorTag {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorTag::T0 => "T0",
            GeneratorTag::T1 => "T1",
            GeneratorTag::T2 => "T2",
            GeneratorTag::T3 => "T3",
            GeneratorTag::T4 => "T4",
            GeneratorTag::T5 => "T5",
            GeneratorTag::T6 => "T6",
            GeneratorTag::T7 => "T7",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            GeneratorTag::T0 => "time translation",
            GeneratorTag::T1 => "x1 translation",
            GeneratorTag::T2 => "x2 translation",
            GeneratorTag::T3 => "x3 translation",
            GeneratorTag::T4 => "space-time scaling",
            GeneratorTag::T5 => "rotation about the x3 axis",
            GeneratorTag::T6 => "time translation with co-rotation",
            GeneratorTag::T7 => "scaling with co-rotation",
        }
    }
}

/// Outcome of the flux classification: the case number, the generators of
/// the invariance group and its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub table2_case: u8,
    pub generators: Vec<GeneratorTag>,
    pub dimension: usize,
}

/// Classify the flux vector into one of the six invariance cases.
///
/// Only declared family tags are inspected; sampled (`Arbitrary`) components
/// are never promoted to a structured family, so they can match only the
/// generic case 1 or — when axial and nonzero — case 2. Case 1 is the
/// universal fallback.
pub fn classify_flux(flux: &FluxSpec) -> SymmetryReport {
    use FluxComponent as F;
    use GeneratorTag::*;
    let transverse_zero = flux.q1.is_zero() && flux.q2.is_zero();
    let (case, generators): (u8, Vec<GeneratorTag>) = match (&flux.q1, &flux.q2, &flux.q3) {
        (F::Zero, F::Zero, F::Const(_)) => (5, vec![T0, T1, T2, T3, T5]),
        (F::Zero, F::Zero, F::InvSqrtT(_)) => (6, vec![T1, T2, T3, T4, T5]),
        (
            F::RotConst { lambda, .. },
            F::RotConst { .. },
            F::Const(_),
        ) if *lambda != 0.0 => (3, vec![T1, T2, T3, T6]),
        (
            F::RotInvSqrtT { lambda, .. },
            F::RotInvSqrtT { .. },
            F::InvSqrtT(_),
        ) if *lambda != 0.0 => (4, vec![T1, T2, T3, T7]),
        _ if transverse_zero && flux.q3.is_nonzero_arbitrary() => (2, vec![T1, T2, T3, T5]),
        _ => (1, vec![T1, T2, T3]),
    };
    let dimension = generators.len();
    SymmetryReport {
        table2_case: case,
        generators,
        dimension,
    }
}

/// Classify the diffusivity pair `(d₁, d₂)` into its invariance-algebra
/// case (1–10). Families are matched up to equivalence scalings, so shifts
/// and rate constants are immaterial; tabulated profiles count as arbitrary.
pub fn classify_diffusivities(d1: &FunctionProfile, d2: &FunctionProfile) -> u8 {
    use FunctionProfile as P;
    const CONFORMAL_EXPONENT: f64 = -0.8;
    let is_conformal = |e: f64| (e - CONFORMAL_EXPONENT).abs() <= 1e-12;
    match (d1, d2) {
        (P::Constant(k1), P::Constant(k2)) => {
            if (k1 - k2).abs() <= 1e-12 * k1.abs().max(k2.abs()) {
                10
            } else {
                9
            }
        }
        (P::Constant(_), _) => 2,
        (_, P::Constant(_)) => 3,
        (P::Exponential { .. }, P::Exponential { .. }) => 4,
        (P::Exponential { .. }, P::Power { .. }) => 5,
        (P::Power { .. }, P::Exponential { .. }) => 6,
        (P::Power { exponent: n, .. }, P::Power { exponent: m, .. }) => {
            if is_conformal(*n) && is_conformal(*m) {
                8
            } else {
                7
            }
        }
        _ => 1,
    }
}

/// One finite group element: which one-parameter group, and its parameter.
/// The co-rotating groups carry the flux rotation rate λ.
#[derive(Debug, Clone, Copy)]
pub struct GroupElement {
    pub tag: GeneratorTag,
    pub parameter: f64,
    /// Rotation rate for T6/T7; ignored by the other groups.
    pub lambda: f64,
}

impl GroupElement {
    pub fn new(tag: GeneratorTag, parameter: f64) -> Self {
        Self {
            tag,
            parameter,
            lambda: 0.0,
        }
    }

    pub fn with_lambda(tag: GeneratorTag, parameter: f64, lambda: f64) -> Self {
        Self {
            tag,
            parameter,
            lambda,
        }
    }
}

/// Apply a finite group element to a space-time point. The dependent
/// variables and surface functions are unchanged by all eight groups.
pub fn apply_group(elem: &GroupElement, point: (f64, f64, f64, f64)) -> (f64, f64, f64, f64) {
    let (t, x1, x2, x3) = point;
    let e = elem.parameter;
    let rotate = |x1: f64, x2: f64, tau: f64| {
        (
            x1 * tau.cos() + x2 * tau.sin(),
            -x1 * tau.sin() + x2 * tau.cos(),
        )
    };
    match elem.tag {
        GeneratorTag::T0 => (t + e, x1, x2, x3),
        GeneratorTag::T1 => (t, x1 + e, x2, x3),
        GeneratorTag::T2 => (t, x1, x2 + e, x3),
        GeneratorTag::T3 => (t, x1, x2, x3 + e),
        GeneratorTag::T4 => {
            let s = e.exp();
            ((2.0 * e).exp() * t, s * x1, s * x2, s * x3)
        }
        GeneratorTag::T5 => {
            let (y1, y2) = rotate(x1, x2, e);
            (t, y1, y2, x3)
        }
        GeneratorTag::T6 => {
            let (y1, y2) = rotate(x1, x2, elem.lambda * e);
            (t + e, y1, y2, x3)
        }
        GeneratorTag::T7 => {
            let s = e.exp();
            let (y1, y2) = rotate(x1, x2, elem.lambda * e);
            ((2.0 * e).exp() * t, s * y1, s * y2, s * x3)
        }
    }
}

/// Parameters of one equivalence scaling:
/// `t̃ = αt`, `x̃ = βx`, `ũ = δ₁u + γ₄`, `ṽ = δ₂v + γ₅`.
///
/// Induced action on the arbitrary elements: `d̃ₖ = (β²/α) dₖ` (as functions
/// of the new variables), `H̃ = (α/β) H`, `d̃₁ᵥ = (β/δ₁) d₁ᵥ`,
/// `d̃₁ₘ = (β/δ₁) d₁ₘ`, `d̃₂ₘ = (β/δ₂) d₂ₘ`, thresholds affinely via
/// `(δ, γ)`, and the flux vector is untouched (only rotations act on it,
/// and the normalizer uses none).
#[derive(Debug, Clone, Copy)]
pub struct EquivalenceScaling {
    pub alpha: f64,
    pub beta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma4: f64,
    pub gamma5: f64,
}

impl EquivalenceScaling {
    pub fn identity() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            delta1: 1.0,
            delta2: 1.0,
            gamma4: 0.0,
            gamma5: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SymmetryError> {
        let ok = self.alpha > 0.0
            && self.beta > 0.0
            && self.delta1 > 0.0
            && self.delta2 > 0.0
            && self.gamma4.is_finite()
            && self.gamma5.is_finite();
        if ok {
            Ok(())
        } else {
            Err(SymmetryError::Gauge(format!(
                "scaling parameters must be positive and finite: {self:?}"
            )))
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            alpha: 1.0 / self.alpha,
            beta: 1.0 / self.beta,
            delta1: 1.0 / self.delta1,
            delta2: 1.0 / self.delta2,
            gamma4: -self.gamma4 / self.delta1,
            gamma5: -self.gamma5 / self.delta2,
        }
    }

    /// How lengths (hence surface levels ω) scale.
    pub fn length_scale(&self) -> f64 {
        self.beta
    }

    /// How the traveling-front speed scales.
    pub fn speed_scale(&self) -> f64 {
        self.beta / self.alpha
    }
}

/// Record of the scaling applied by [`normalize_problem`], sufficient to map
/// results back to the original gauge.
#[derive(Debug, Clone, Copy)]
pub struct GaugeRecord {
    pub scaling: EquivalenceScaling,
}

/// Push a diffusivity function through the scaling: the transformed profile
/// satisfies `d̃(δu + γ) = (β²/α) d(u)`.
fn transform_diffusivity(
    d: &FunctionProfile,
    factor: f64,
    delta: f64,
    gamma: f64,
) -> Result<FunctionProfile, SymmetryError> {
    let out = match d {
        FunctionProfile::Constant(c) => FunctionProfile::Constant(factor * c),
        FunctionProfile::Power {
            coeff,
            exponent,
            shift,
        } => FunctionProfile::Power {
            coeff: factor * coeff * delta.powf(-exponent),
            exponent: *exponent,
            shift: delta * shift - gamma,
        },
        FunctionProfile::Exponential { coeff, rate } => FunctionProfile::Exponential {
            coeff: factor * coeff * (-rate * gamma / delta).exp(),
            rate: rate / delta,
        },
        FunctionProfile::Tabulated(curve) => {
            let xs: Vec<f64> = curve.xs().iter().map(|u| delta * u + gamma).collect();
            let ys: Vec<f64> = curve.ys().iter().map(|d| factor * d).collect();
            let slopes: Vec<f64> = curve.slopes().iter().map(|s| factor * s / delta).collect();
            FunctionProfile::Tabulated(
                TabulatedCurve::with_slopes(xs, ys, slopes)
                    .map_err(|e| SymmetryError::Gauge(e.to_string()))?,
            )
        }
    };
    Ok(out)
}

/// Apply an equivalence scaling to a model and flux. The flux must be
/// time-scaling compatible when `α ≠ 1` (constant or zero components);
/// rotations are not used, so the components are otherwise unchanged.
pub fn apply_equivalence(
    model: &EnthalpyModel,
    flux: &FluxSpec,
    s: &EquivalenceScaling,
) -> Result<(EnthalpyModel, FluxSpec), SymmetryError> {
    s.validate()?;
    if s.alpha != 1.0 {
        let time_ok = |c: &FluxComponent| matches!(c, FluxComponent::Zero | FluxComponent::Const(_));
        if !(time_ok(&flux.q1) && time_ok(&flux.q2) && time_ok(&flux.q3)) {
            return Err(SymmetryError::Unsupported(
                "time rescaling of a time-dependent flux is not supported".into(),
            ));
        }
    }
    let factor = s.beta * s.beta / s.alpha;
    let d1 = transform_diffusivity(&model.d1, factor, s.delta1, s.gamma4)?;
    let d2 = transform_diffusivity(&model.d2, factor, s.delta2, s.gamma5)?;
    let transformed = EnthalpyModel::with_constants(
        d1,
        d2,
        s.delta1 * model.u_v + s.gamma4,
        s.delta1 * model.u_m + s.gamma4,
        s.delta2 * model.v_m + s.gamma5,
        s.delta2 * model.v_inf + s.gamma5,
        s.beta / s.delta1 * model.d1v,
        s.beta / s.delta1 * model.d1m,
        s.beta / s.delta2 * model.d2m,
        s.alpha / s.beta * model.latent_evaporation,
        s.alpha / s.beta * model.latent_melting,
    )?;
    Ok((transformed, flux.clone()))
}

/// Bring a model to the canonical gauge `u_m = 0`, `u_v = 1`, `v_inf = 0`,
/// `v_m = 1` (time and space unscaled), returning the applied scaling so the
/// results can be mapped back.
pub fn normalize_problem(
    model: &EnthalpyModel,
    flux: &FluxSpec,
) -> Result<(EnthalpyModel, FluxSpec, GaugeRecord), SymmetryError> {
    let delta1 = 1.0 / (model.u_v - model.u_m);
    let delta2 = 1.0 / (model.v_m - model.v_inf);
    if !(delta1 > 0.0) {
        return Err(SymmetryError::Gauge(format!(
            "canonical gauge needs delta1 > 0 but u_v - u_m = {}",
            model.u_v - model.u_m
        )));
    }
    if !(delta2 > 0.0) {
        return Err(SymmetryError::Gauge(format!(
            "canonical gauge needs delta2 > 0 but v_m - v_inf = {}",
            model.v_m - model.v_inf
        )));
    }
    let scaling = EquivalenceScaling {
        alpha: 1.0,
        beta: 1.0,
        delta1,
        delta2,
        gamma4: -delta1 * model.u_m,
        gamma5: -delta2 * model.v_inf,
    };
    let (m, f) = apply_equivalence(model, flux, &scaling)?;
    Ok((m, f, GaugeRecord { scaling }))
}

/// Undo a normalization.
pub fn denormalize_problem(
    model: &EnthalpyModel,
    flux: &FluxSpec,
    record: &GaugeRecord,
) -> Result<(EnthalpyModel, FluxSpec), SymmetryError> {
    apply_equivalence(model, flux, &record.scaling.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample_model() -> EnthalpyModel {
        EnthalpyModel::new(
            FunctionProfile::Constant(1.0),
            FunctionProfile::Constant(2.0),
            2.0,
            1.0,
            1.0,
            0.0,
            1.0,
            0.8,
        )
        .unwrap()
    }

    #[test]
    fn flux_table_all_six_cases() {
        use FluxComponent as F;
        use GeneratorTag::*;
        let arb = |vals: &[(f64, f64)]| F::Arbitrary(vals.to_vec());

        let case5 = FluxSpec::constant_axial(2.0).unwrap();
        let r = classify_flux(&case5);
        assert_eq!(r.table2_case, 5);
        assert_eq!(r.generators, vec![T0, T1, T2, T3, T5]);
        assert_eq!(r.dimension, 5);

        let case6 = FluxSpec {
            q1: F::Zero,
            q2: F::Zero,
            q3: F::InvSqrtT(1.5),
        };
        case6.validate().unwrap();
        let r = classify_flux(&case6);
        assert_eq!(r.table2_case, 6);
        assert_eq!(r.generators, vec![T1, T2, T3, T4, T5]);

        let rot = F::RotConst {
            q1: 1.0,
            q2: 0.5,
            lambda: 2.0,
        };
        let case3 = FluxSpec {
            q1: rot.clone(),
            q2: rot,
            q3: F::Const(0.7),
        };
        case3.validate().unwrap();
        let r = classify_flux(&case3);
        assert_eq!(r.table2_case, 3);
        assert_eq!(r.generators, vec![T1, T2, T3, T6]);

        let rot = F::RotInvSqrtT {
            q1: 0.0,
            q2: 1.0,
            lambda: 1.0,
        };
        let case4 = FluxSpec {
            q1: rot.clone(),
            q2: rot,
            q3: F::InvSqrtT(0.4),
        };
        case4.validate().unwrap();
        let r = classify_flux(&case4);
        assert_eq!(r.table2_case, 4);
        assert_eq!(r.generators, vec![T1, T2, T3, T7]);

        let case2 = FluxSpec {
            q1: F::Zero,
            q2: F::Zero,
            q3: arb(&[(0.0, 1.0), (1.0, 2.0)]),
        };
        case2.validate().unwrap();
        let r = classify_flux(&case2);
        assert_eq!(r.table2_case, 2);
        assert_eq!(r.generators, vec![T1, T2, T3, T5]);

        let case1 = FluxSpec {
            q1: arb(&[(0.0, 1.0)]),
            q2: arb(&[(0.0, -1.0)]),
            q3: arb(&[(0.0, 0.3)]),
        };
        case1.validate().unwrap();
        let r = classify_flux(&case1);
        assert_eq!(r.table2_case, 1);
        assert_eq!(r.generators, vec![T1, T2, T3]);
        assert_eq!(r.dimension, 3);
    }

    #[test]
    fn flux_side_conditions() {
        use FluxComponent as F;
        // Zero-amplitude structured components are rejected.
        assert!(FluxSpec::constant_axial(0.0).is_err());
        assert!(FluxSpec {
            q1: F::Zero,
            q2: F::Zero,
            q3: F::InvSqrtT(0.0),
        }
        .validate()
        .is_err());
        // Rotating family with nonzero rate needs q1² + q2² ≠ 0.
        let bad_rot = F::RotConst {
            q1: 0.0,
            q2: 0.0,
            lambda: 1.0,
        };
        assert!(FluxSpec {
            q1: bad_rot.clone(),
            q2: bad_rot,
            q3: F::Const(1.0),
        }
        .validate()
        .is_err());
        // Rotating family must appear on both transverse components.
        let rot = F::RotConst {
            q1: 1.0,
            q2: 0.0,
            lambda: 1.0,
        };
        assert!(FluxSpec {
            q1: rot,
            q2: F::Zero,
            q3: F::Const(1.0),
        }
        .validate()
        .is_err());
        // All-zero arbitrary samples do not qualify as case 2.
        let all_zero = FluxSpec {
            q1: F::Zero,
            q2: F::Zero,
            q3: F::Arbitrary(vec![(0.0, 0.0), (1.0, 0.0)]),
        };
        assert_eq!(classify_flux(&all_zero).table2_case, 1);
        // A zero-rate rotating declaration does not match the rotating rows.
        let static_rot = F::RotConst {
            q1: 1.0,
            q2: 0.0,
            lambda: 0.0,
        };
        let f = FluxSpec {
            q1: static_rot.clone(),
            q2: static_rot,
            q3: F::Const(1.0),
        };
        f.validate().unwrap();
        assert_eq!(classify_flux(&f).table2_case, 1);
    }

    #[test]
    fn diffusivity_table_all_ten_cases() {
        use FunctionProfile as P;
        let k1 = P::Constant(1.3);
        let k2 = P::Constant(0.6);
        let expo = P::Exponential {
            coeff: 1.0,
            rate: 1.0,
        };
        let pow = |e: f64| P::Power {
            coeff: 1.0,
            exponent: e,
            shift: 0.0,
        };
        let tab = P::Tabulated(
            TabulatedCurve::new(&[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]).unwrap(),
        );

        assert_eq!(classify_diffusivities(&tab, &tab), 1);
        assert_eq!(classify_diffusivities(&k1, &tab), 2);
        assert_eq!(classify_diffusivities(&k1, &expo), 2);
        assert_eq!(classify_diffusivities(&tab, &k2), 3);
        assert_eq!(classify_diffusivities(&pow(2.0), &k2), 3);
        assert_eq!(classify_diffusivities(&expo, &expo), 4);
        assert_eq!(classify_diffusivities(&expo, &pow(2.0)), 5);
        assert_eq!(classify_diffusivities(&pow(0.5), &expo), 6);
        assert_eq!(classify_diffusivities(&pow(2.0), &pow(-1.0)), 7);
        assert_eq!(classify_diffusivities(&pow(-0.8), &pow(-0.8)), 8);
        // The special exponent must hold on both sides.
        assert_eq!(classify_diffusivities(&pow(-0.8), &pow(-0.5)), 7);
        assert_eq!(classify_diffusivities(&k1, &k2), 9);
        assert_eq!(classify_diffusivities(&k1, &P::Constant(1.3)), 10);
        // Exponential vs tabulated has no special row.
        assert_eq!(classify_diffusivities(&expo, &tab), 1);
    }

    #[test]
    fn group_actions_match_explicit_forms() {
        let p = (0.3, 1.0, 0.0, 2.0);
        let t3 = GroupElement::new(GeneratorTag::T3, 0.5);
        assert_eq!(apply_group(&t3, p), (0.3, 1.0, 0.0, 2.5));

        let t5 = GroupElement::new(GeneratorTag::T5, 0.0);
        assert_eq!(apply_group(&t5, p), p);

        let eps = 0.7;
        let t5 = GroupElement::new(GeneratorTag::T5, eps);
        let (t, x1, x2, x3) = apply_group(&t5, (0.1, 1.0, 0.0, 5.0));
        assert_eq!(t, 0.1);
        assert_relative_eq!(x1, eps.cos());
        assert_relative_eq!(x2, -eps.sin());
        assert_eq!(x3, 5.0);

        let t4 = GroupElement::new(GeneratorTag::T4, 0.2);
        let (t, x1, ..) = apply_group(&t4, (1.0, 1.0, 1.0, 1.0));
        assert_relative_eq!(t, (0.4f64).exp());
        assert_relative_eq!(x1, (0.2f64).exp());
    }

    #[test]
    fn group_composition_is_additive_in_parameter() {
        use GeneratorTag::*;
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for tag in [T0, T1, T2, T3, T4, T5] {
            for _ in 0..100 {
                let p = (next(), next(), next(), next());
                let (e1, e2) = (next() * 0.5, next() * 0.5);
                let a = apply_group(
                    &GroupElement::new(tag, e1),
                    apply_group(&GroupElement::new(tag, e2), p),
                );
                let b = apply_group(&GroupElement::new(tag, e1 + e2), p);
                for (u, v) in [
                    (a.0, b.0),
                    (a.1, b.1),
                    (a.2, b.2),
                    (a.3, b.3),
                ] {
                    assert!(
                        (u - v).abs() <= 1e-12 * u.abs().max(1.0),
                        "{tag:?}: composition mismatch {u} vs {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn rotations_preserve_transverse_radius() {
        let p = (0.0, 3.0, 4.0, 1.0);
        for i in 0..50 {
            let eps = -3.0 + 0.123 * i as f64;
            let (_, x1, x2, _) = apply_group(&GroupElement::new(GeneratorTag::T5, eps), p);
            assert!((x1 * x1 + x2 * x2 - 25.0).abs() < 1e-13);
        }
    }

    #[test]
    fn scaling_laws_of_the_equivalence_group() {
        let model = sample_model();
        let flux = FluxSpec::constant_axial(2.0).unwrap();
        // α = 4, β = 2 leaves the diffusivities alone and doubles latent heats.
        let s = EquivalenceScaling {
            alpha: 4.0,
            beta: 2.0,
            delta1: 1.0,
            delta2: 1.0,
            gamma4: 0.0,
            gamma5: 0.0,
        };
        let (m, _) = apply_equivalence(&model, &flux, &s).unwrap();
        match m.d1 {
            FunctionProfile::Constant(c) => assert_relative_eq!(c, 1.0),
            _ => unreachable!(),
        }
        assert_relative_eq!(m.latent_evaporation, 2.0 * model.latent_evaporation);
        assert_relative_eq!(m.latent_melting, 2.0 * model.latent_melting);
        assert_relative_eq!(m.d1v, 2.0 * model.d1v);
    }

    #[test]
    fn normalize_establishes_canonical_thresholds_and_round_trips() {
        let model = sample_model();
        let flux = FluxSpec::constant_axial(2.0).unwrap();
        let (normed, nflux, record) = normalize_problem(&model, &flux).unwrap();
        assert_relative_eq!(normed.u_v, 1.0);
        assert_relative_eq!(normed.u_m, 0.0);
        assert_relative_eq!(normed.v_m, 1.0);
        assert_relative_eq!(normed.v_inf, 0.0);
        // Case number is unchanged by the gauge.
        assert_eq!(classify_flux(&nflux).table2_case, 5);

        let (back, _) = denormalize_problem(&normed, &nflux, &record).unwrap();
        assert_relative_eq!(back.u_v, model.u_v, max_relative = 1e-12);
        assert_relative_eq!(back.u_m, model.u_m, max_relative = 1e-12, epsilon = 1e-12);
        assert_relative_eq!(back.v_m, model.v_m, max_relative = 1e-12);
        assert_relative_eq!(back.v_inf, model.v_inf, epsilon = 1e-12);
        assert_relative_eq!(back.d1v, model.d1v, max_relative = 1e-12);
        assert_relative_eq!(back.d1m, model.d1m, max_relative = 1e-12);
        assert_relative_eq!(back.d2m, model.d2m, max_relative = 1e-12);
        assert_relative_eq!(
            back.latent_evaporation,
            model.latent_evaporation,
            max_relative = 1e-12
        );
    }

    #[test]
    fn identity_scaling_changes_nothing() {
        let model = sample_model();
        let flux = FluxSpec::constant_axial(1.0).unwrap();
        let (m, _) = apply_equivalence(&model, &flux, &EquivalenceScaling::identity()).unwrap();
        assert_eq!(m.u_v, model.u_v);
        assert_eq!(m.d1v, model.d1v);
        assert_eq!(m.latent_melting, model.latent_melting);
    }

    #[test]
    fn gauge_error_when_thresholds_reversed() {
        // u_m > u_v: canonical gauge would need a negative delta1.
        let model = EnthalpyModel::new(
            FunctionProfile::Power {
                coeff: 1.0,
                exponent: -1.0,
                shift: 0.0,
            },
            FunctionProfile::Constant(1.0),
            1.0,
            2.0,
            0.0,
            1.0,
            1.0,
            1.0,
        )
        .unwrap();
        let flux = FluxSpec::constant_axial(0.2).unwrap();
        assert!(matches!(
            normalize_problem(&model, &flux),
            Err(SymmetryError::Gauge(_))
        ));
    }

    #[test]
    fn diffusivity_transform_tracks_composition() {
        // The transformed profile must satisfy d̃(δu + γ) = (β²/α) d(u).
        let s = EquivalenceScaling {
            alpha: 2.0,
            beta: 3.0,
            delta1: 0.5,
            delta2: 2.0,
            gamma4: 0.7,
            gamma5: -0.2,
        };
        let factor = s.beta * s.beta / s.alpha;
        for d in [
            FunctionProfile::Constant(1.4),
            FunctionProfile::Power {
                coeff: 2.0,
                exponent: -1.0,
                shift: 0.3,
            },
            FunctionProfile::Exponential {
                coeff: 0.5,
                rate: 0.8,
            },
            FunctionProfile::Tabulated(
                TabulatedCurve::new(&[(0.5, 1.0), (1.0, 1.5), (2.0, 2.5), (3.0, 4.0)]).unwrap(),
            ),
        ] {
            let transformed = transform_diffusivity(&d, factor, s.delta1, s.gamma4).unwrap();
            for i in 0..20 {
                let u = 0.6 + i as f64 * 0.1;
                let lhs = transformed.eval(s.delta1 * u + s.gamma4).unwrap();
                let rhs = factor * d.eval(u).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            }
        }
    }
}
