//! Problem-file schema and conversion into library types.
//!
//! Problem files are TOML with a mandatory `schema = 1` key, exactly one of
//! `[material]` / `[enthalpy]`, a `[flux]` section, `[geometry]`, plus
//! optional `[solver]`, `[verify]`, `[tolerance]` and `[output]` sections.
//! All quantities are SI; the tool never converts units.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use stefan_core::material::{goodman_transform, EnthalpyModel, MaterialSpec};
use stefan_core::profile::{FunctionProfile, TabulatedCurve};
use stefan_core::solver::{GeometryKind, RootSolveConfig};
use stefan_core::specialfn::QuadratureConfig;
use stefan_core::symmetry::{FluxComponent, FluxSpec};
use stefan_core::verify::AuditConfig;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub material: Option<MaterialSection>,
    pub enthalpy: Option<EnthalpySection>,
    pub flux: FluxSection,
    pub geometry: GeometrySection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub tolerance: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub lambda1: ProfileSpec,
    pub lambda2: ProfileSpec,
    pub c1: ProfileSpec,
    pub c2: ProfileSpec,
    #[serde(rename = "H_v")]
    pub h_v: f64,
    #[serde(rename = "H_m")]
    pub h_m: f64,
    #[serde(rename = "T_v")]
    pub t_v: f64,
    #[serde(rename = "T_m")]
    pub t_m: f64,
    #[serde(rename = "T_inf")]
    pub t_inf: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnthalpySection {
    pub d1: ProfileSpec,
    pub d2: ProfileSpec,
    pub u_v: f64,
    pub u_m: f64,
    pub v_m: f64,
    pub v_inf: f64,
    #[serde(rename = "H_v")]
    pub h_v: f64,
    #[serde(rename = "H_m")]
    pub h_m: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant { value: f64 },
    Power { coeff: f64, exponent: f64, shift: f64 },
    Exponential { coeff: f64, rate: f64 },
    Tabulated { knots: Vec<[f64; 2]> },
}

impl ProfileSpec {
    pub fn to_profile(&self, key: &str) -> Result<FunctionProfile, CliError> {
        let profile = match self {
            ProfileSpec::Constant { value } => FunctionProfile::Constant(*value),
            ProfileSpec::Power {
                coeff,
                exponent,
                shift,
            } => FunctionProfile::Power {
                coeff: *coeff,
                exponent: *exponent,
                shift: *shift,
            },
            ProfileSpec::Exponential { coeff, rate } => FunctionProfile::Exponential {
                coeff: *coeff,
                rate: *rate,
            },
            ProfileSpec::Tabulated { knots } => {
                let pairs: Vec<(f64, f64)> = knots.iter().map(|k| (k[0], k[1])).collect();
                FunctionProfile::Tabulated(
                    TabulatedCurve::new(&pairs)
                        .map_err(|e| CliError::parse(format!("{key}: {e}")))?,
                )
            }
        };
        profile
            .validate()
            .map_err(|e| CliError::parse(format!("{key}: {e}")))?;
        Ok(profile)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FluxComponentSpec {
    Zero,
    Const { value: f64 },
    InvSqrtT { value: f64 },
    RotConst { q1: f64, q2: f64, lambda: f64 },
    RotInvSqrtT { q1: f64, q2: f64, lambda: f64 },
    Arbitrary { samples: Vec<[f64; 2]> },
}

impl FluxComponentSpec {
    fn to_component(&self) -> FluxComponent {
        match self {
            FluxComponentSpec::Zero => FluxComponent::Zero,
            FluxComponentSpec::Const { value } => FluxComponent::Const(*value),
            FluxComponentSpec::InvSqrtT { value } => FluxComponent::InvSqrtT(*value),
            FluxComponentSpec::RotConst { q1, q2, lambda } => FluxComponent::RotConst {
                q1: *q1,
                q2: *q2,
                lambda: *lambda,
            },
            FluxComponentSpec::RotInvSqrtT { q1, q2, lambda } => FluxComponent::RotInvSqrtT {
                q1: *q1,
                q2: *q2,
                lambda: *lambda,
            },
            FluxComponentSpec::Arbitrary { samples } => {
                FluxComponent::Arbitrary(samples.iter().map(|s| (s[0], s[1])).collect())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxSection {
    pub q1: FluxComponentSpec,
    pub q2: FluxComponentSpec,
    pub q3: FluxComponentSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(rename = "R")]
    pub r: f64,
    pub ansatz: AnsatzKind,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    Paraboloid,
    Planar,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub abs_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub multistart: Option<usize>,
    pub omega2_bracket: Option<[f64; 2]>,
    pub mu_bracket: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub grid_h: Option<f64>,
    pub levels: Option<u8>,
    pub points_per_phase: Option<usize>,
    pub surface_samples: Option<usize>,
    pub time: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub out_dir: Option<String>,
}

/// Everything the commands need, converted and validated.
pub struct LoadedProblem {
    pub model: EnthalpyModel,
    pub flux: FluxSpec,
    pub ansatz: AnsatzKind,
    pub evaporation_radius: f64,
    pub solver_cfg: RootSolveConfig,
    pub verify_cfg: AuditConfig,
    pub tolerance: BTreeMap<String, f64>,
    pub out_dir: Option<String>,
    pub has_material: bool,
}

pub fn load_problem(path: &Path) -> Result<LoadedProblem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    let file: ProblemFile = toml::from_str(&text).map_err(|e| {
        // toml errors carry line/column spans in their display form.
        CliError::parse(format!("{}: {e}", path.display()))
    })?;
    if file.schema != 1 {
        return Err(CliError::parse(format!(
            "schema: expected 1, got {}",
            file.schema
        )));
    }
    let (model, has_material) = match (&file.material, &file.enthalpy) {
        (Some(_), Some(_)) => {
            return Err(CliError::parse(
                "material/enthalpy: exactly one of the two sections must be present, found both"
                    .into(),
            ))
        }
        (None, None) => {
            return Err(CliError::parse(
                "material/enthalpy: exactly one of the two sections must be present, found neither"
                    .into(),
            ))
        }
        (Some(mat), None) => {
            let spec = MaterialSpec {
                lambda1: mat.lambda1.to_profile("material.lambda1")?,
                lambda2: mat.lambda2.to_profile("material.lambda2")?,
                c1: mat.c1.to_profile("material.c1")?,
                c2: mat.c2.to_profile("material.c2")?,
                latent_evaporation: mat.h_v,
                latent_melting: mat.h_m,
                t_evaporation: mat.t_v,
                t_melting: mat.t_m,
                t_far: mat.t_inf,
            };
            let model = goodman_transform(&spec, &QuadratureConfig::default())
                .map_err(|e| CliError::parse(format!("material: {e}")))?;
            (model, true)
        }
        (None, Some(ent)) => {
            let model = EnthalpyModel::new(
                ent.d1.to_profile("enthalpy.d1")?,
                ent.d2.to_profile("enthalpy.d2")?,
                ent.u_v,
                ent.u_m,
                ent.v_m,
                ent.v_inf,
                ent.h_v,
                ent.h_m,
            )
            .map_err(|e| CliError::parse(format!("enthalpy: {e}")))?;
            (model, false)
        }
    };

    let flux = FluxSpec {
        q1: file.flux.q1.to_component(),
        q2: file.flux.q2.to_component(),
        q3: file.flux.q3.to_component(),
    };
    flux.validate()
        .map_err(|e| CliError::parse(format!("flux: {e}")))?;

    // Negated form also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(file.geometry.r > 0.0) {
        return Err(CliError::parse(format!(
            "geometry.R: must be positive, got {}",
            file.geometry.r
        )));
    }

    let mut solver_cfg = RootSolveConfig::default_for(file.geometry.r);
    if let Some(v) = file.solver.abs_tol {
        solver_cfg.abs_tol = v;
    }
    if let Some(v) = file.solver.max_iters {
        solver_cfg.max_iters = v;
    }
    if let Some(v) = file.solver.multistart {
        solver_cfg.multistart = v;
    }
    if let Some(v) = file.solver.omega2_bracket {
        solver_cfg.omega2_bracket = (v[0], v[1]);
    }
    if let Some(v) = file.solver.mu_bracket {
        solver_cfg.mu_bracket = (v[0], v[1]);
    }
    solver_cfg
        .validate()
        .map_err(|e| CliError::parse(format!("solver: {e}")))?;

    let mut verify_cfg = AuditConfig::default();
    if let Some(v) = file.verify.grid_h {
        verify_cfg.grid_h = v;
    }
    if let Some(v) = file.verify.levels {
        verify_cfg.levels = v;
    }
    if let Some(v) = file.verify.points_per_phase {
        verify_cfg.points_per_phase = v;
    }
    if let Some(v) = file.verify.surface_samples {
        verify_cfg.surface_samples = v;
    }
    if let Some(v) = file.verify.time {
        verify_cfg.time = v;
    }
    if let Some(v) = file.verify.seed {
        verify_cfg.seed = v;
    }

    Ok(LoadedProblem {
        model,
        flux,
        ansatz: file.geometry.ansatz,
        evaporation_radius: file.geometry.r,
        solver_cfg,
        verify_cfg,
        tolerance: file.tolerance,
        out_dir: file.output.out_dir,
        has_material,
    })
}

impl LoadedProblem {
    pub fn geometry_kind(&self) -> GeometryKind {
        match self.ansatz {
            AnsatzKind::Paraboloid => GeometryKind::ParaboloidOmega,
            AnsatzKind::Planar => GeometryKind::PlanarWave,
        }
    }
}
