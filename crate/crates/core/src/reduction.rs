//! Subalgebra catalog, ansatz construction and paraboloid geometry.
//!
//! For the constant axial flux the invariance algebra is spanned by
//! `P_t, P₁, P₂, P₃, J₁₂`. This module stores the complete Lie–Goursat
//! catalog of its subalgebras by dimension, applies the physical
//! admissibility filter (the free surfaces must move, the flux must have a
//! nonzero normal projection, and a spatial invariant must exist), and maps
//! the surviving families to solution ansätze:
//!
//! - three- and four-dimensional families → traveling plane waves in
//!   `z = α* x₁ + x₃ − μt`;
//! - the two-dimensional rotation family → helical invariants `(r, z)` for
//!   `β ≠ 0`, upgraded for `β = 0` to the single invariant
//!   `ω = z + √(z² + r²)`, whose level sets `ω = ω_k` are paraboloids of
//!   revolution `(x₁² + x₂²)/ω_k² = 1 − 2z/ω_k`.
//!
//! The evaporation surface level is fixed to the exposure radius,
//! `ω₁ = R`, which costs no generality.

use crate::profile::TabulatedCurve;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("subalgebra {id} is not admissible: {reason}")]
    Inadmissible { id: String, reason: String },
    #[error("no reduction implemented for subalgebra {id} ({description})")]
    UnsupportedSubalgebra { id: String, description: String },
    #[error("invalid geometry: {0}")]
    Geometry(String),
}

/// Coefficients of one subalgebra generator over the basis
/// `(P_t, P₁, P₂, P₃, J₁₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorCoeffs {
    pub p_t: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub j12: f64,
}

impl GeneratorCoeffs {
    /// The vector field evaluated at a space-time point, as components
    /// along `(∂_t, ∂_{x₁}, ∂_{x₂}, ∂_{x₃})`. `J₁₂ = x₂∂_{x₁} − x₁∂_{x₂}`.
    fn at(&self, x1: f64, x2: f64) -> [f64; 4] {
        [
            self.p_t,
            self.p1 + self.j12 * x2,
            self.p2 - self.j12 * x1,
            self.p3,
        ]
    }

    fn describe(&self) -> String {
        let mut terms = Vec::new();
        for (c, name) in [
            (self.j12, "J12"),
            (self.p1, "P1"),
            (self.p2, "P2"),
            (self.p3, "P3"),
            (self.p_t, "Pt"),
        ] {
            if c == 0.0 {
                continue;
            }
            if c == 1.0 {
                terms.push(name.to_string());
            } else {
                terms.push(format!("{c:.4}*{name}"));
            }
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Which parameters a catalog family carries and which rotation angles are
/// excluded by the admissibility filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiConstraint {
    /// φ unconstrained in [0, π).
    Free,
    /// φ ∉ {0, π/2}.
    ExcludesAxes,
    /// φ ∉ {0, π/2} required only when β ≠ 0.
    ExcludesAxesIfBetaNonzero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FamilyKind {
    // one-dimensional
    AxialWaveLine,     // ⟨P₃ cosφ + P_t sinφ⟩
    ObliqueLine,       // ⟨P₁ + α(P₃ cosφ + P_t sinφ)⟩
    RotationLine,      // ⟨J₁₂ + β(P₃ cosφ + P_t sinφ)⟩
    // two-dimensional
    TranslationPair,   // ⟨P₃, P_t⟩ (unfiltered only)
    ObliquePlusP2,     // ⟨P₁ + α(..), P₂⟩
    ObliquePlusWave,   // ⟨P₁ + α(..), P₃ sinφ − P_t cosφ⟩
    RotationPlusWave,  // ⟨J₁₂ + β(..), P₃ sinφ − P_t cosφ⟩
    // three-dimensional
    TranslationTriple, // ⟨P₁, P₃, P_t⟩ (unfiltered only)
    RotationP3Pt,      // ⟨J₁₂, P₃, P_t⟩ (unfiltered only)
    ObliqueP2Wave,     // ⟨P₁ + α(..), P₂, P₃ sinφ − P_t cosφ⟩
    RotationP1P2,      // ⟨J₁₂ + β(..), P₁, P₂⟩
    // four-dimensional
    TranslationQuad,   // ⟨P₁, P₂, P₃, P_t⟩ (unfiltered only)
    RotationAllTransWave, // ⟨J₁₂ + β(..), P₁, P₂, P₃ sinφ − P_t cosφ⟩ (unfiltered form)
    RotationWaveQuad,  // ⟨J₁₂, P₁, P₂, P₃ sinφ − P_t cosφ⟩ (filtered form)
    // five-dimensional
    FullAlgebra,       // ⟨J₁₂, P₁, P₂, P₃, P_t⟩ (unfiltered only)
}

/// One family of the subalgebra catalog, possibly parameterized by
/// `α ≥ 0`, `β ∈ ℝ` and `φ ∈ [0, π)`.
#[derive(Debug, Clone)]
pub struct SubalgebraFamily {
    pub id: &'static str,
    pub dimension: usize,
    pub description: &'static str,
    pub uses_alpha: bool,
    pub uses_beta: bool,
    pub uses_phi: bool,
    pub phi_constraint: PhiConstraint,
    kind: FamilyKind,
}

impl SubalgebraFamily {
    /// Materialize the family at concrete parameter values. Unused
    /// parameters are ignored; constraint violations are errors.
    pub fn instantiate(&self, alpha: f64, beta: f64, phi: f64) -> Result<Subalgebra, ReductionError> {
        if self.uses_alpha && alpha < 0.0 {
            return Err(ReductionError::InvalidParameter(format!(
                "{}: alpha must be nonnegative",
                self.id
            )));
        }
        if self.uses_phi && !(0.0..std::f64::consts::PI).contains(&phi) {
            return Err(ReductionError::InvalidParameter(format!(
                "{}: phi must lie in [0, pi)",
                self.id
            )));
        }
        let excluded = phi_is_excluded(phi);
        match self.phi_constraint {
            PhiConstraint::ExcludesAxes if excluded => {
                return Err(ReductionError::InvalidParameter(format!(
                    "{}: phi must avoid 0 and pi/2",
                    self.id
                )));
            }
            PhiConstraint::ExcludesAxesIfBetaNonzero if beta != 0.0 && excluded => {
                return Err(ReductionError::InvalidParameter(format!(
                    "{}: phi must avoid 0 and pi/2 when beta != 0",
                    self.id
                )));
            }
            _ => {}
        }
        Ok(Subalgebra {
            id: self.id.to_string(),
            dimension: self.dimension,
            alpha: self.uses_alpha.then_some(alpha),
            beta: self.uses_beta.then_some(beta),
            phi: self.uses_phi.then_some(phi),
            generators: self.kind.generators(alpha, beta, phi),
            kind: self.kind,
        })
    }

    /// Materialize ignoring the φ exclusions — used to feed the
    /// admissibility check with the raw algebraic catalog entries.
    pub fn instantiate_unchecked(&self, alpha: f64, beta: f64, phi: f64) -> Subalgebra {
        Subalgebra {
            id: self.id.to_string(),
            dimension: self.dimension,
            alpha: self.uses_alpha.then_some(alpha),
            beta: self.uses_beta.then_some(beta),
            phi: self.uses_phi.then_some(phi),
            generators: self.kind.generators(alpha, beta, phi),
            kind: self.kind,
        }
    }
}

fn phi_is_excluded(phi: f64) -> bool {
    let half_pi = std::f64::consts::FRAC_PI_2;
    phi.abs() < 1e-12 || (phi - half_pi).abs() < 1e-12
}

impl FamilyKind {
    fn generators(&self, alpha: f64, beta: f64, phi: f64) -> Vec<GeneratorCoeffs> {
        let zero = GeneratorCoeffs {
            p_t: 0.0,
            p1: 0.0,
            p2: 0.0,
            p3: 0.0,
            j12: 0.0,
        };
        let pt = GeneratorCoeffs { p_t: 1.0, ..zero };
        let p1 = GeneratorCoeffs { p1: 1.0, ..zero };
        let p2 = GeneratorCoeffs { p2: 1.0, ..zero };
        let p3 = GeneratorCoeffs { p3: 1.0, ..zero };
        let j12 = GeneratorCoeffs { j12: 1.0, ..zero };
        // P₃ cosφ + P_t sinφ and the transversal P₃ sinφ − P_t cosφ.
        let axial = GeneratorCoeffs {
            p3: phi.cos(),
            p_t: phi.sin(),
            ..zero
        };
        let wave = GeneratorCoeffs {
            p3: phi.sin(),
            p_t: -phi.cos(),
            ..zero
        };
        let scaled = |g: GeneratorCoeffs, c: f64| GeneratorCoeffs {
            p_t: c * g.p_t,
            p1: c * g.p1,
            p2: c * g.p2,
            p3: c * g.p3,
            j12: c * g.j12,
        };
        let plus = |a: GeneratorCoeffs, b: GeneratorCoeffs| GeneratorCoeffs {
            p_t: a.p_t + b.p_t,
            p1: a.p1 + b.p1,
            p2: a.p2 + b.p2,
            p3: a.p3 + b.p3,
            j12: a.j12 + b.j12,
        };
        match self {
            FamilyKind::AxialWaveLine => vec![axial],
            FamilyKind::ObliqueLine => vec![plus(p1, scaled(axial, alpha))],
            FamilyKind::RotationLine => vec![plus(j12, scaled(axial, beta))],
            FamilyKind::TranslationPair => vec![p3, pt],
            FamilyKind::ObliquePlusP2 => vec![plus(p1, scaled(axial, alpha)), p2],
            FamilyKind::ObliquePlusWave => vec![plus(p1, scaled(axial, alpha)), wave],
            FamilyKind::RotationPlusWave => vec![plus(j12, scaled(axial, beta)), wave],
            FamilyKind::TranslationTriple => vec![p1, p3, pt],
            FamilyKind::RotationP3Pt => vec![j12, p3, pt],
            FamilyKind::ObliqueP2Wave => vec![plus(p1, scaled(axial, alpha)), p2, wave],
            FamilyKind::RotationP1P2 => vec![plus(j12, scaled(axial, beta)), p1, p2],
            FamilyKind::TranslationQuad => vec![p1, p2, p3, pt],
            FamilyKind::RotationAllTransWave => {
                vec![plus(j12, scaled(axial, beta)), p1, p2, wave]
            }
            FamilyKind::RotationWaveQuad => vec![j12, p1, p2, wave],
            FamilyKind::FullAlgebra => vec![j12, p1, p2, p3, pt],
        }
    }
}

/// A materialized subalgebra.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    pub id: String,
    pub dimension: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub phi: Option<f64>,
    pub generators: Vec<GeneratorCoeffs>,
    kind: FamilyKind,
}

impl Subalgebra {
    pub fn describe(&self) -> String {
        let gens: Vec<String> = self.generators.iter().map(|g| g.describe()).collect();
        format!("<{}>", gens.join(", "))
    }
}

/// The admissible catalog for one dimension (1–4). Parameterized entries
/// are returned as families carrying their parameter constraints.
pub fn enumerate_subalgebras(dimension: usize) -> Vec<SubalgebraFamily> {
    filtered_catalog()
        .into_iter()
        .filter(|f| f.dimension == dimension)
        .collect()
}

/// The raw Lie–Goursat catalog (dimensions 1–5) before the physical
/// admissibility filter; includes the entries the filter rejects and does
/// not impose the φ exclusions.
pub fn unfiltered_subalgebras(dimension: usize) -> Vec<SubalgebraFamily> {
    unfiltered_catalog()
        .into_iter()
        .filter(|f| f.dimension == dimension)
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn family(
    id: &'static str,
    dimension: usize,
    description: &'static str,
    uses_alpha: bool,
    uses_beta: bool,
    uses_phi: bool,
    phi_constraint: PhiConstraint,
    kind: FamilyKind,
) -> SubalgebraFamily {
    SubalgebraFamily {
        id,
        dimension,
        description,
        uses_alpha,
        uses_beta,
        uses_phi,
        phi_constraint,
        kind,
    }
}

fn filtered_catalog() -> Vec<SubalgebraFamily> {
    use FamilyKind::*;
    use PhiConstraint::*;
    vec![
        family("1a", 1, "<P3 cos(phi) + Pt sin(phi)>", false, false, true, ExcludesAxes, AxialWaveLine),
        family("1b", 1, "<P1 + alpha (P3 cos(phi) + Pt sin(phi))>", true, false, true, Free, ObliqueLine),
        family("1c", 1, "<J12 + beta (P3 cos(phi) + Pt sin(phi))>", false, true, true, Free, RotationLine),
        family("2a", 2, "<P1 + alpha (P3 cos(phi) + Pt sin(phi)), P2>", true, false, true, Free, ObliquePlusP2),
        family("2b", 2, "<P1 + alpha (P3 cos(phi) + Pt sin(phi)), P3 sin(phi) - Pt cos(phi)>", true, false, true, ExcludesAxes, ObliquePlusWave),
        family("2c", 2, "<J12 + beta (P3 cos(phi) + Pt sin(phi)), P3 sin(phi) - Pt cos(phi)>", false, true, true, ExcludesAxes, RotationPlusWave),
        family("3a", 3, "<P1 + alpha (P3 cos(phi) + Pt sin(phi)), P2, P3 sin(phi) - Pt cos(phi)>", true, false, true, ExcludesAxes, ObliqueP2Wave),
        family("3b", 3, "<J12 + beta (P3 cos(phi) + Pt sin(phi)), P1, P2>", false, true, true, ExcludesAxesIfBetaNonzero, RotationP1P2),
        family("4a", 4, "<J12, P1, P2, P3 sin(phi) - Pt cos(phi)>", false, false, true, ExcludesAxes, RotationWaveQuad),
    ]
}

fn unfiltered_catalog() -> Vec<SubalgebraFamily> {
    use FamilyKind::*;
    use PhiConstraint::*;
    vec![
        family("u1a", 1, "<P3 cos(phi) + Pt sin(phi)>", false, false, true, Free, AxialWaveLine),
        family("u1b", 1, "<P1 + alpha (P3 cos(phi) + Pt sin(phi))>", true, false, true, Free, ObliqueLine),
        family("u1c", 1, "<J12 + beta (P3 cos(phi) + Pt sin(phi))>", false, true, true, Free, RotationLine),
        family("u2-translations", 2, "<P3, Pt>", false, false, false, Free, TranslationPair),
        family("u2a", 2, "<P1 + alpha (P3 cos(phi) + Pt sin(phi)), P2>", true, false, true, Free, ObliquePlusP2),
        family("u2b", 2, "<P1 + alpha (P3 cos(phi) + Pt sin(phi)), P3 sin(phi) - Pt cos(phi)>", true, false, true, Free, ObliquePlusWave),
        family("u2c", 2, "<J12 + beta (P3 cos(phi) + Pt sin(phi)), P3 sin(phi) - Pt cos(phi)>", false, true, true, Free, RotationPlusWave),
        family("u3-translations", 3, "<P1, P3, Pt>", false, false, false, Free, TranslationTriple),
        family("u3-rotation", 3, "<J12, P3, Pt>", false, false, false, Free, RotationP3Pt),
        family("u3a", 3, "<P1 + alpha (P3 cos(phi) + Pt sin(phi)), P2, P3 sin(phi) - Pt cos(phi)>", true, false, true, Free, ObliqueP2Wave),
        family("u3b", 3, "<J12 + beta (P3 cos(phi) + Pt sin(phi)), P1, P2>", false, true, true, Free, RotationP1P2),
        family("u4-translations", 4, "<P1, P2, P3, Pt>", false, false, false, Free, TranslationQuad),
        family("u4-rotation-wave", 4, "<J12 + beta (P3 cos(phi) + Pt sin(phi)), P1, P2, P3 sin(phi) - Pt cos(phi)>", false, true, true, Free, RotationAllTransWave),
        family("u5", 5, "<J12, P1, P2, P3, Pt>", false, false, false, Free, FullAlgebra),
    ]
}

/// Outcome of the admissibility check.
#[derive(Debug, Clone)]
pub struct Admissibility {
    pub admissible: bool,
    pub reason: String,
}

/// Sample points for the pointwise span tests; generic (off the rotation
/// axis, distinct radii and heights).
const GENERIC_POINTS: [(f64, f64); 3] = [(0.731, -0.402), (1.313, 0.577), (-0.911, 1.209)];

/// Check whether the induced ansatz can satisfy the physical restrictions:
/// the free surfaces must move (`∂S/∂t ≠ 0`), the axial flux must have a
/// nonzero projection on the evaporation-surface normal (`Q·n₁ ≠ 0`), and a
/// nonconstant spatial invariant must exist (`|∇S| ≠ 0`).
///
/// Implemented as a rank test of the generator distribution at generic
/// sample points: if `∂_t` (resp. `∂_{x₃}`) lies in the pointwise span of
/// the generator vector fields, every invariant is independent of `t`
/// (resp. `x₃`) and the corresponding restriction fails.
pub fn check_restrictions(subalg: &Subalgebra) -> Admissibility {
    let mut t_killed = true;
    let mut x3_killed = true;
    let mut no_spatial = true;
    let mut full_rank = true;
    for &(x1, x2) in &GENERIC_POINTS {
        let rows: Vec<[f64; 4]> = subalg.generators.iter().map(|g| g.at(x1, x2)).collect();
        let r = rank(&rows);
        t_killed &= in_span(&rows, [1.0, 0.0, 0.0, 0.0]);
        x3_killed &= in_span(&rows, [0.0, 0.0, 0.0, 1.0]);
        no_spatial &= in_span(&rows, [0.0, 1.0, 0.0, 0.0])
            && in_span(&rows, [0.0, 0.0, 1.0, 0.0])
            && in_span(&rows, [0.0, 0.0, 0.0, 1.0]);
        full_rank &= r == 4;
    }
    let mut reasons = Vec::new();
    if full_rank {
        reasons.push("the subalgebra admits no nonconstant invariants".to_string());
    } else {
        if t_killed {
            reasons.push("dS_k/dt = 0 (free surfaces cannot move)".to_string());
        }
        if x3_killed {
            reasons.push("q.n_1 = 0 (axial flux has no normal projection)".to_string());
        }
        if no_spatial && !t_killed {
            reasons.push("|grad S_k| = 0 (no spatial invariant)".to_string());
        }
    }
    if reasons.is_empty() {
        Admissibility {
            admissible: true,
            reason: "all four physical restrictions are satisfiable".to_string(),
        }
    } else {
        Admissibility {
            admissible: false,
            reason: reasons.join(" and "),
        }
    }
}

fn rank(rows: &[[f64; 4]]) -> usize {
    let mut m: Vec<[f64; 4]> = rows.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, &b| a.max(b.abs()))
        .max(1.0);
    let tol = 1e-9 * scale;
    let mut rank = 0;
    for col in 0..4 {
        let pivot = (rank..m.len()).max_by(|&i, &j| {
            m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()
        });
        let Some(p) = pivot else { break };
        if m[p][col].abs() <= tol {
            continue;
        }
        m.swap(rank, p);
        let pv = m[rank][col];
        for i in 0..m.len() {
            if i != rank {
                let f = m[i][col] / pv;
                let pivot_row = m[rank];
                for (c, cell) in m[i].iter_mut().enumerate() {
                    *cell -= f * pivot_row[c];
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn in_span(rows: &[[f64; 4]], target: [f64; 4]) -> bool {
    let base = rank(rows);
    let mut extended = rows.to_vec();
    extended.push(target);
    rank(&extended) == base
}

/// A solution ansatz in invariant variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Ansatz {
    /// `u = u(z)`, `z = α* x₁ + x₃ − μt`; the melting and evaporation
    /// surfaces are parallel planes moving with speed μ.
    PlanarWave {
        alpha_star: f64,
        /// The wave speed induced by the subalgebra angle, when determined.
        wave_speed_hint: Option<f64>,
    },
    /// `u = u(r, z)`, `z = x₃ − μt − β·atan(x₁/x₂)`: a two-dimensional
    /// reduction this artifact represents but does not solve.
    HelicalRZ { beta: f64 },
    /// `u = u(ω)`, `ω = z + √(z² + r²)`, `z = x₃ − μt`.
    ParaboloidOmega,
}

impl Ansatz {
    pub fn invariant_description(&self) -> String {
        match self {
            Ansatz::PlanarWave { alpha_star, .. } if *alpha_star == 0.0 => {
                "z = x3 - mu*t".to_string()
            }
            Ansatz::PlanarWave { alpha_star, .. } => {
                format!("z = {alpha_star:.6}*x1 + x3 - mu*t")
            }
            Ansatz::HelicalRZ { beta } => {
                format!("r = sqrt(x1^2 + x2^2), z = x3 - mu*t - {beta:.6}*atan(x1/x2)")
            }
            Ansatz::ParaboloidOmega => {
                "omega = z + sqrt(z^2 + r^2), z = x3 - mu*t, r = sqrt(x1^2 + x2^2)".to_string()
            }
        }
    }
}

/// Map an admissible subalgebra to its ansatz.
///
/// Three- and four-dimensional families give plane waves; the
/// two-dimensional rotation family gives the helical reduction, which for
/// `β = 0` is upgraded to the paraboloid ansatz (a non-Lie ansatz: the
/// reduced two-dimensional system with nonconstant diffusivities has no
/// symmetry producing it). Admissible families the solvers do not consume
/// are reported as unsupported.
pub fn build_ansatz(subalg: &Subalgebra) -> Result<Ansatz, ReductionError> {
    let adm = check_restrictions(subalg);
    if !adm.admissible {
        return Err(ReductionError::Inadmissible {
            id: subalg.id.clone(),
            reason: adm.reason,
        });
    }
    let phi = subalg.phi.unwrap_or(0.0);
    match subalg.kind {
        FamilyKind::RotationWaveQuad => Ok(Ansatz::PlanarWave {
            alpha_star: 0.0,
            wave_speed_hint: Some(-phi.tan()),
        }),
        FamilyKind::RotationP1P2 => {
            let beta = subalg.beta.unwrap_or(0.0);
            let hint = if beta != 0.0 && phi.tan() != 0.0 {
                Some(1.0 / phi.tan())
            } else {
                None
            };
            Ok(Ansatz::PlanarWave {
                alpha_star: 0.0,
                wave_speed_hint: hint,
            })
        }
        FamilyKind::ObliqueP2Wave => {
            let alpha = subalg.alpha.unwrap_or(0.0);
            Ok(Ansatz::PlanarWave {
                alpha_star: -alpha / phi.cos(),
                wave_speed_hint: Some(-phi.tan()),
            })
        }
        FamilyKind::RotationPlusWave => {
            let beta = subalg.beta.unwrap_or(0.0);
            if beta == 0.0 {
                Ok(Ansatz::ParaboloidOmega)
            } else {
                Ok(Ansatz::HelicalRZ { beta })
            }
        }
        _ => Err(ReductionError::UnsupportedSubalgebra {
            id: subalg.id.clone(),
            description: subalg.describe(),
        }),
    }
}

/// The invariant coordinate `ω = z + √(z² + r²)` with `z = x₃ − μt`.
/// Computed in the cancellation-free form for `z < 0`, which also realizes
/// the continuous limit `ω → 0` on the negative axis.
pub fn omega_of_point(x: (f64, f64, f64), t: f64, mu: f64) -> f64 {
    omega_of_zr(x.2 - mu * t, (x.0 * x.0 + x.1 * x.1).sqrt())
}

pub(crate) fn omega_of_zr(z: f64, r: f64) -> f64 {
    let rho = z.hypot(r);
    if z >= 0.0 {
        z + rho
    } else if rho - z > 0.0 {
        r * r / (rho - z)
    } else {
        0.0
    }
}

/// Transport state of a solution: time/axis shifts and a phase angle.
/// Translations along `t` and `x₃` shift the traveling frame; rotations
/// about the axis act on exported surface samples but leave the
/// axisymmetric fields unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub t_origin: f64,
    pub x3_origin: f64,
    pub angle: f64,
}

impl Default for Pose {
    fn default() -> Self {
        Self {
            t_origin: 0.0,
            x3_origin: 0.0,
            angle: 0.0,
        }
    }
}

impl Pose {
    /// Co-moving coordinate of a query point.
    pub fn comoving_z(&self, t: f64, x3: f64, mu: f64) -> f64 {
        (x3 - self.x3_origin) - mu * (t - self.t_origin)
    }
}

/// The two-paraboloid surface geometry: `ω₁ = R` (evaporation), `ω₂`
/// (melting), and the common front speed μ.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceGeometry {
    pub omega1: f64,
    pub omega2: f64,
    pub mu: f64,
}

impl SurfaceGeometry {
    pub fn new(omega1: f64, omega2: f64, mu: f64) -> Result<Self, ReductionError> {
        if !(omega2 > omega1 && omega1 > 0.0) {
            return Err(ReductionError::Geometry(format!(
                "surface levels must satisfy omega2 > omega1 > 0, got ({omega1}, {omega2})"
            )));
        }
        if !(mu > 0.0) {
            return Err(ReductionError::Geometry(format!(
                "front speed must be positive, got {mu}"
            )));
        }
        Ok(Self {
            omega1,
            omega2,
            mu,
        })
    }

    pub fn level(&self, which: SurfaceKind) -> f64 {
        match which {
            SurfaceKind::Evaporation => self.omega1,
            SurfaceKind::Melting => self.omega2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Evaporation,
    Melting,
}

/// Points on the paraboloid `ω = ω_k` at time `t`, in the canonical pose.
pub fn surface_points(
    geom: &SurfaceGeometry,
    which: SurfaceKind,
    t: f64,
    n_samples: usize,
) -> Vec<(f64, f64, f64)> {
    surface_points_posed(geom, &Pose::default(), which, t, n_samples)
}

/// Points on the paraboloid `ω = ω_k` at time `t`, transported by `pose`.
/// Sampling is an area-uniform spiral from the apex down to the depth
/// `z = −ω_k/2` (transverse radius `√2·ω_k`); every point satisfies
/// `ω(point) = ω_k` up to roundoff.
pub fn surface_points_posed(
    geom: &SurfaceGeometry,
    pose: &Pose,
    which: SurfaceKind,
    t: f64,
    n_samples: usize,
) -> Vec<(f64, f64, f64)> {
    const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
    let omega_k = geom.level(which);
    let r_max = std::f64::consts::SQRT_2 * omega_k;
    let mut out = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let frac = if n_samples > 1 {
            i as f64 / (n_samples - 1) as f64
        } else {
            0.0
        };
        let r = r_max * frac.sqrt();
        let theta = i as f64 * GOLDEN_ANGLE + pose.angle;
        let z = 0.5 * (omega_k - r * r / omega_k);
        let x3 = z + pose.x3_origin + geom.mu * (t - pose.t_origin);
        out.push((r * theta.cos(), r * theta.sin(), x3));
    }
    out
}

/// Phase tag and field value at a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSample {
    /// `ω < ω₁`: gas region, not modeled.
    Gas,
    /// Liquid enthalpy `u(ω)`.
    Liquid(f64),
    /// Exactly on the melting surface: both one-sided values.
    Interface { u: f64, v: f64 },
    /// Solid enthalpy `v(ω)`.
    Solid(f64),
    /// Beyond the tabulated solid range: far-field value substituted.
    FarField(f64),
}

/// Evaluate the reconstructed field at `(t, x)` in the canonical pose.
pub fn reconstruct_field(
    u_profile: &TabulatedCurve,
    v_profile: &TabulatedCurve,
    geom: &SurfaceGeometry,
    query: (f64, (f64, f64, f64)),
) -> Result<FieldSample, ReductionError> {
    reconstruct_field_posed(u_profile, v_profile, geom, &Pose::default(), query)
}

/// Evaluate the reconstructed field at `(t, x)` transported by `pose`.
pub fn reconstruct_field_posed(
    u_profile: &TabulatedCurve,
    v_profile: &TabulatedCurve,
    geom: &SurfaceGeometry,
    pose: &Pose,
    query: (f64, (f64, f64, f64)),
) -> Result<FieldSample, ReductionError> {
    let (t, x) = query;
    let z = pose.comoving_z(t, x.2, geom.mu);
    let r = (x.0 * x.0 + x.1 * x.1).sqrt();
    let omega = omega_of_zr(z, r);
    let tol = 1e-12 * geom.omega2.max(1.0);
    let eval = |p: &TabulatedCurve, w: f64| {
        p.eval(w)
            .map_err(|e| ReductionError::Geometry(e.to_string()))
    };
    if omega < geom.omega1 - tol {
        return Ok(FieldSample::Gas);
    }
    if (omega - geom.omega2).abs() <= tol {
        return Ok(FieldSample::Interface {
            u: eval(u_profile, geom.omega2)?,
            v: eval(v_profile, geom.omega2)?,
        });
    }
    if omega < geom.omega2 {
        let w = omega.max(geom.omega1);
        return Ok(FieldSample::Liquid(eval(u_profile, w)?));
    }
    let (_, omega_max) = v_profile.range();
    if omega > omega_max {
        return Ok(FieldSample::FarField(v_profile.last_value()));
    }
    Ok(FieldSample::Solid(eval(v_profile, omega)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn filtered_catalog_has_paper_family_counts() {
        assert_eq!(enumerate_subalgebras(1).len(), 3);
        assert_eq!(enumerate_subalgebras(2).len(), 3);
        assert_eq!(enumerate_subalgebras(3).len(), 2);
        assert_eq!(enumerate_subalgebras(4).len(), 1);
        assert_eq!(enumerate_subalgebras(5).len(), 0);
        // The single four-dimensional family is the rotation + wave one.
        let f = &enumerate_subalgebras(4)[0];
        assert_eq!(f.id, "4a");
        assert_eq!(f.phi_constraint, PhiConstraint::ExcludesAxes);
    }

    #[test]
    fn filter_reproduces_the_rejected_entries() {
        // Entries absent from the filtered catalog are rejected with a
        // stated reason; parameterized entries are rejected exactly at the
        // excluded angles.
        let generic_phi = 0.7;
        for fam in unfiltered_catalog() {
            let sub = fam.instantiate_unchecked(0.9, 0.8, generic_phi);
            let adm = check_restrictions(&sub);
            let expected_admissible = !matches!(
                fam.id,
                "u2-translations" | "u3-translations" | "u3-rotation" | "u4-translations"
                    | "u4-rotation-wave" | "u5"
            );
            assert_eq!(
                adm.admissible, expected_admissible,
                "family {} at generic parameters: {}",
                fam.id, adm.reason
            );
        }
        // The unfiltered 4-dim rotation family becomes admissible at β = 0,
        // where it coincides with the filtered four-dimensional family.
        let fam = unfiltered_catalog()
            .into_iter()
            .find(|f| f.id == "u4-rotation-wave")
            .unwrap();
        assert!(check_restrictions(&fam.instantiate_unchecked(0.0, 0.0, generic_phi)).admissible);
    }

    #[test]
    fn excluded_angles_match_the_span_tests() {
        // Families with the φ ∉ {0, π/2} side condition fail the physical
        // restrictions exactly at those angles.
        for fam in unfiltered_catalog() {
            if !fam.uses_phi {
                continue;
            }
            let filtered_equiv = filtered_catalog()
                .into_iter()
                .find(|f| f.kind == fam.kind);
            let Some(filtered) = filtered_equiv else { continue };
            for (phi, label) in [(0.0, "phi = 0"), (PI / 2.0, "phi = pi/2")] {
                let sub = fam.instantiate_unchecked(0.9, 0.8, phi);
                let adm = check_restrictions(&sub);
                let excluded = match filtered.phi_constraint {
                    PhiConstraint::ExcludesAxes => true,
                    PhiConstraint::ExcludesAxesIfBetaNonzero => true, // β = 0.8 here
                    PhiConstraint::Free => false,
                };
                assert_eq!(
                    adm.admissible, !excluded,
                    "family {} at {label}: {}",
                    fam.id, adm.reason
                );
            }
        }
    }

    #[test]
    fn rotation_p3_pt_rejected_with_both_reasons() {
        let fam = unfiltered_catalog()
            .into_iter()
            .find(|f| f.id == "u3-rotation")
            .unwrap();
        let adm = check_restrictions(&fam.instantiate_unchecked(0.0, 0.0, 0.0));
        assert!(!adm.admissible);
        assert!(adm.reason.contains("dS_k/dt = 0"), "{}", adm.reason);
        assert!(adm.reason.contains("q.n_1 = 0"), "{}", adm.reason);
    }

    #[test]
    fn rotation_family_with_beta_admissible_at_generic_angle() {
        let fam = filtered_catalog()
            .into_iter()
            .find(|f| f.id == "2c")
            .unwrap();
        let sub = fam.instantiate(0.0, 1.2, 0.9).unwrap();
        assert!(check_restrictions(&sub).admissible);
        // φ = π/2 is excluded by the catalog constraint.
        assert!(fam.instantiate(0.0, 1.2, PI / 2.0).is_err());
    }

    #[test]
    fn ansatz_mapping() {
        let paraboloid = filtered_catalog()
            .into_iter()
            .find(|f| f.id == "2c")
            .unwrap()
            .instantiate(0.0, 0.0, 0.9)
            .unwrap();
        assert_eq!(build_ansatz(&paraboloid).unwrap(), Ansatz::ParaboloidOmega);

        let helical = filtered_catalog()
            .into_iter()
            .find(|f| f.id == "2c")
            .unwrap()
            .instantiate(0.0, 1.5, 0.9)
            .unwrap();
        assert_eq!(
            build_ansatz(&helical).unwrap(),
            Ansatz::HelicalRZ { beta: 1.5 }
        );

        let wave4 = filtered_catalog()
            .into_iter()
            .find(|f| f.id == "4a")
            .unwrap()
            .instantiate(0.0, 0.0, 0.65)
            .unwrap();
        match build_ansatz(&wave4).unwrap() {
            Ansatz::PlanarWave {
                alpha_star,
                wave_speed_hint,
            } => {
                assert_eq!(alpha_star, 0.0);
                assert_relative_eq!(wave_speed_hint.unwrap(), -(0.65f64).tan());
            }
            other => panic!("expected planar wave, got {other:?}"),
        }

        let oblique = filtered_catalog()
            .into_iter()
            .find(|f| f.id == "3a")
            .unwrap()
            .instantiate(0.8, 0.0, 0.65)
            .unwrap();
        match build_ansatz(&oblique).unwrap() {
            Ansatz::PlanarWave { alpha_star, .. } => {
                assert_relative_eq!(alpha_star, -0.8 / (0.65f64).cos());
            }
            other => panic!("expected planar wave, got {other:?}"),
        }

        // One-dimensional families are admissible but not consumed.
        let line = filtered_catalog()
            .into_iter()
            .find(|f| f.id == "1b")
            .unwrap()
            .instantiate(1.0, 0.0, 0.3)
            .unwrap();
        assert!(matches!(
            build_ansatz(&line),
            Err(ReductionError::UnsupportedSubalgebra { .. })
        ));

        // Inadmissible input is refused outright.
        let bad = unfiltered_catalog()
            .into_iter()
            .find(|f| f.id == "u2-translations")
            .unwrap()
            .instantiate_unchecked(0.0, 0.0, 0.0);
        assert!(matches!(
            build_ansatz(&bad),
            Err(ReductionError::Inadmissible { .. })
        ));
    }

    #[test]
    fn omega_basic_identities() {
        // r = 0, z > 0: ω = 2z.
        assert_relative_eq!(omega_of_point((0.0, 0.0, 3.0), 0.0, 1.0), 6.0);
        // z = 0: ω = r; Pythagorean triple.
        assert_relative_eq!(omega_of_point((3.0, 4.0, 0.0), 0.0, 0.7), 5.0);
        // r = 0, z < 0: limit value 0.
        assert_eq!(omega_of_point((0.0, 0.0, -2.0), 0.0, 1.0), 0.0);
        // traveling: z = x3 − μt.
        assert_relative_eq!(omega_of_point((0.0, 0.0, 5.0), 2.0, 1.5), 4.0);
    }

    #[test]
    fn surface_points_lie_on_their_level_set() {
        let geom = SurfaceGeometry::new(1.0, 2.5, 0.8).unwrap();
        let t = 0.6;
        for which in [SurfaceKind::Evaporation, SurfaceKind::Melting] {
            let level = geom.level(which);
            let pts = surface_points(&geom, which, t, 1000);
            assert_eq!(pts.len(), 1000);
            for p in &pts {
                let w = omega_of_point(*p, t, geom.mu);
                assert!(
                    (w - level).abs() <= 1e-12,
                    "omega(point) = {w}, expected {level}"
                );
                // Algebraic surface form vanishes too.
                let z = p.2 - geom.mu * t;
                let s = (p.0 * p.0 + p.1 * p.1) / (level * level) + 2.0 * z / level - 1.0;
                assert!(s.abs() <= 1e-12, "surface form residual {s}");
            }
            // Apex is the first sample.
            let apex = pts[0];
            assert_eq!((apex.0, apex.1), (0.0, 0.0));
            assert_relative_eq!(apex.2, level / 2.0 + geom.mu * t);
        }
    }

    #[test]
    fn evaporation_surface_meets_z_zero_at_radius_r() {
        // ω₁ = R: at z = 0 the surface is the circle of radius R.
        let geom = SurfaceGeometry::new(1.3, 2.0, 0.5).unwrap();
        let t = 0.25;
        let pts = surface_points(&geom, SurfaceKind::Evaporation, t, 4000);
        let mut found = false;
        for p in pts {
            let z = p.2 - geom.mu * t;
            if z.abs() < 5e-3 {
                let r = (p.0 * p.0 + p.1 * p.1).sqrt();
                assert!((r - 1.3).abs() < 2e-2);
                found = true;
            }
        }
        assert!(found, "no sample near z = 0");
    }

    #[test]
    fn geometry_invariants_enforced() {
        assert!(SurfaceGeometry::new(1.0, 0.9, 1.0).is_err());
        assert!(SurfaceGeometry::new(-1.0, 2.0, 1.0).is_err());
        assert!(SurfaceGeometry::new(1.0, 2.0, 0.0).is_err());
        assert!(SurfaceGeometry::new(1.0, 2.0, -0.5).is_err());
    }

    fn linear_profiles() -> (TabulatedCurve, TabulatedCurve) {
        // u from 2 at ω=1 down to 1 at ω=2; v from 1 at ω=2 down to 0 at ω=6.
        let u = TabulatedCurve::new(
            &(0..=64)
                .map(|i| {
                    let w = 1.0 + i as f64 / 64.0;
                    (w, 3.0 - w)
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let v = TabulatedCurve::new(
            &(0..=64)
                .map(|i| {
                    let w = 2.0 + 4.0 * i as f64 / 64.0;
                    (w, (6.0 - w) / 4.0)
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        (u, v)
    }

    #[test]
    fn reconstruct_phases_and_interface_values() {
        let (u, v) = linear_profiles();
        let geom = SurfaceGeometry::new(1.0, 2.0, 0.5).unwrap();
        // Apex of the melting surface at t = 0: ω = 2 ⇒ interface.
        let q = (0.0, (0.0, 0.0, 1.0));
        match reconstruct_field(&u, &v, &geom, q).unwrap() {
            FieldSample::Interface { u: uv, v: vv } => {
                assert_relative_eq!(uv, 1.0);
                assert_relative_eq!(vv, 1.0);
            }
            other => panic!("expected interface, got {other:?}"),
        }
        // ω = ω₁: liquid at the evaporation value.
        match reconstruct_field(&u, &v, &geom, (0.0, (0.0, 0.0, 0.5))).unwrap() {
            FieldSample::Liquid(val) => assert_relative_eq!(val, 2.0),
            other => panic!("expected liquid, got {other:?}"),
        }
        // Far field beyond the tabulated solid range.
        match reconstruct_field(&u, &v, &geom, (0.0, (0.0, 0.0, 50.0))).unwrap() {
            FieldSample::FarField(val) => assert_relative_eq!(val, 0.0),
            other => panic!("expected far field, got {other:?}"),
        }
        // Inside the gas paraboloid.
        assert_eq!(
            reconstruct_field(&u, &v, &geom, (0.0, (0.0, 0.0, 0.2))).unwrap(),
            FieldSample::Gas
        );
    }

    #[test]
    fn reconstruct_translation_covariance_is_exact() {
        let (u, v) = linear_profiles();
        let geom = SurfaceGeometry::new(1.0, 2.0, 0.5).unwrap();
        // μδ and all sums chosen exactly representable.
        let (t, x) = (0.25, (0.5, -0.25, 0.75));
        let delta = 2.0;
        let a = reconstruct_field(&u, &v, &geom, (t, x)).unwrap();
        let b = reconstruct_field(
            &u,
            &v,
            &geom,
            (t + delta, (x.0, x.1, x.2 + geom.mu * delta)),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn paraboloid_level_sets_match_algebraic_form() {
        // 1000 random-ish points on each surface satisfy the quadric form.
        let geom = SurfaceGeometry::new(0.7, 1.9, 1.1).unwrap();
        for which in [SurfaceKind::Evaporation, SurfaceKind::Melting] {
            let pts = surface_points(&geom, which, 1.5, 1000);
            let wk = geom.level(which);
            for p in pts {
                let z = p.2 - geom.mu * 1.5;
                let form = (p.0 * p.0 + p.1 * p.1) / (wk * wk) + 2.0 * z / wk - 1.0;
                assert!(form.abs() <= 1e-12);
            }
        }
    }
}
