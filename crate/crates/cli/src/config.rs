//! Experiment configs: the JSON the user writes, and the fully resolved
//! form that every report echoes back.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use hh_core::constants::{conjugate_exponent, Mode};
use hh_core::group::{HomogeneousGroup, QuasiNormKind};
use hh_core::kernels::{catalog, CatalogKernel, Kernel};
use hh_core::quad::{McConfig, Tolerance};
use hh_core::verify::{theorem31_kernel, RadialFunction};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const CONFIG_SCHEMA: &str = include_str!("../../../docs/config.schema.json");

pub const DEFAULT_P: f64 = 2.0;
pub const DEFAULT_BETAS: [f64; 5] = [0.5, 0.2, 0.1, 0.05, 0.02];
pub const DEFAULT_SCALES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const DEFAULT_RADII: [f64; 2] = [1.0, 2.0];
const DEFAULT_CUTOFF_BETAS: [f64; 3] = [0.5, 0.3, 0.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    /// Kernels of order −1 on the half line.
    Classical,
    /// Kernels of order −Q on a homogeneous group.
    Group,
    /// The sphere-averaged Hilbert form on a group, with constant `Qπ/sin(π/p)`.
    Theorem31,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<QuasiNormKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_measure_override: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExprKernel {
    pub expr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelSpec {
    Catalog(CatalogKernel),
    Expr(ExprKernel),
}

/// A radial test function, by its profile in `r = |x|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `r^{−dim/exponent − β}` for `r > 1`. The exponent defaults to `p` for
    /// `f` and to `q` for `g`; the dimension defaults to `Q`.
    PowerCutoff {
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<f64>,
    },
    Indicator {
        lo: f64,
        hi: f64,
    },
    Expr {
        expr: String,
    },
    Zero {},
    /// `φ(a r)`.
    Scaled {
        a: f64,
        inner: Box<FunctionSpec>,
    },
    /// `φ(r)` for `r < r_max`, zero beyond.
    Truncated {
        r_max: f64,
        inner: Box<FunctionSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub f: FunctionSpec,
    pub g: FunctionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionEntry {
    Pair(PairSpec),
    Single(FunctionSpec),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdiv: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// The config file as written. Everything is optional; see
/// [`ResolvedConfig`] for the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<FunctionEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_subdiv: Option<usize>,
    pub mc_samples: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedTolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdiv: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedMc {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedOutput {
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// A config with every default filled in. It is itself a valid config and
/// reproduces the run when fed back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub mode: ModeSpec,
    pub group: GroupSpec,
    pub kernel: KernelSpec,
    pub p: f64,
    pub functions: Vec<PairSpec>,
    pub betas: Vec<f64>,
    pub scales: Vec<f64>,
    pub radii: Vec<f64>,
    pub tolerance: ResolvedTolerance,
    pub mc: ResolvedMc,
    pub output: ResolvedOutput,
}

/// A resolved config together with the library objects it describes.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ResolvedConfig,
    pub q: f64,
    pub group: HomogeneousGroup,
    pub kernel: Kernel,
    pub tol: Tolerance,
    pub mc: McConfig,
    pub pairs: Vec<(RadialFunction, RadialFunction)>,
}

impl Experiment {
    /// The library mode; theorem31 runs in group mode.
    pub fn mode(&self) -> Mode {
        match self.config.mode {
            ModeSpec::Classical => Mode::Classical,
            ModeSpec::Group | ModeSpec::Theorem31 => Mode::Group,
        }
    }

    pub fn theorem31(&self) -> bool {
        self.config.mode == ModeSpec::Theorem31
    }
}

fn schema_validator() -> &'static jsonschema::Validator {
    static VALIDATOR: OnceLock<jsonschema::Validator> = OnceLock::new();
    VALIDATOR.get_or_init(|| {
        let schema: serde_json::Value = serde_json::from_str(CONFIG_SCHEMA).expect("config schema is valid JSON");
        jsonschema::validator_for(&schema).expect("config schema compiles")
    })
}

/// Checks raw JSON against the published config schema.
pub fn validate_against_schema(value: &serde_json::Value) -> Result<()> {
    let problems: Vec<String> = schema_validator()
        .iter_errors(value)
        .take(8)
        .map(|e| {
            let at = e.instance_path().to_string();
            if at.is_empty() {
                e.to_string()
            } else {
                format!("{at}: {e}")
            }
        })
        .collect();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Config(problems.join("; ")))
    }
}

/// Parses and schema-checks a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("not valid JSON: {e}")))?;
    validate_against_schema(&value)?;
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_positive_list(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid(format!("`{name}` must not be empty")));
    }
    match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(v) => Err(invalid(format!("`{name}` entries must be finite and positive, got {v}"))),
        None => Ok(()),
    }
}

impl FunctionSpec {
    /// Fills in the exponent and dimension of every power cutoff.
    fn resolve(&self, exponent: f64, q_dim: f64) -> FunctionSpec {
        match self {
            FunctionSpec::PowerCutoff { beta, exponent: e, dim } => {
                FunctionSpec::PowerCutoff { beta: *beta, exponent: Some(e.unwrap_or(exponent)), dim: Some(dim.unwrap_or(q_dim)) }
            }
            FunctionSpec::Scaled { a, inner } => FunctionSpec::Scaled { a: *a, inner: Box::new(inner.resolve(exponent, q_dim)) },
            FunctionSpec::Truncated { r_max, inner } => {
                FunctionSpec::Truncated { r_max: *r_max, inner: Box::new(inner.resolve(exponent, q_dim)) }
            }
            other => other.clone(),
        }
    }

    /// Builds the library function; expects a resolved spec.
    pub fn build(&self) -> Result<RadialFunction> {
        Ok(match self {
            FunctionSpec::PowerCutoff { beta, exponent, dim } => {
                let (Some(exponent), Some(dim)) = (exponent, dim) else {
                    return Err(invalid("power_cutoff needs its exponent and dimension resolved"));
                };
                RadialFunction::power_cutoff(*beta, *exponent, *dim)?
            }
            FunctionSpec::Indicator { lo, hi } => RadialFunction::indicator(*lo, *hi)?,
            FunctionSpec::Expr { expr } => RadialFunction::expr(expr)?,
            FunctionSpec::Zero {} => RadialFunction::zero(),
            FunctionSpec::Scaled { a, inner } => inner.build()?.scaled(*a)?,
            FunctionSpec::Truncated { r_max, inner } => inner.build()?.truncated(*r_max)?,
        })
    }
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel> {
        Ok(match self {
            KernelSpec::Catalog(c) => catalog(c)?,
            KernelSpec::Expr(e) => Kernel::parse(&e.expr, e.order)?,
        })
    }
}

fn resolve_group(mode: ModeSpec, spec: Option<GroupSpec>) -> Result<(GroupSpec, HomogeneousGroup)> {
    match mode {
        ModeSpec::Classical => {
            if let Some(g) = &spec {
                let half_line = g.weights == [1.0]
                    && matches!(g.norm, None | Some(QuasiNormKind::MaxAnisotropic))
                    && matches!(g.sphere_measure_override, None | Some(1.0));
                if !half_line {
                    return Err(invalid("classical mode runs on the half line; drop `group` or use mode \"group\""));
                }
            }
            let resolved = GroupSpec { weights: vec![1.0], norm: Some(QuasiNormKind::MaxAnisotropic), sphere_measure_override: Some(1.0) };
            Ok((resolved, HomogeneousGroup::half_line()))
        }
        ModeSpec::Group | ModeSpec::Theorem31 => {
            let Some(g) = spec else {
                return Err(invalid("group and theorem31 modes need a `group`"));
            };
            let norm = g.norm.unwrap_or(QuasiNormKind::MaxAnisotropic);
            let mut group = HomogeneousGroup::new(g.weights.clone(), norm)?;
            if let Some(v) = g.sphere_measure_override {
                group = group.with_sphere_override(v)?;
            }
            Ok((GroupSpec { norm: Some(norm), ..g }, group))
        }
    }
}

impl ExperimentConfig {
    pub fn apply(&mut self, o: &Overrides) {
        let tol = self.tolerance.get_or_insert_with(Default::default);
        tol.rel = o.rel_tol.or(tol.rel);
        tol.abs = o.abs_tol.or(tol.abs);
        tol.max_subdiv = o.max_subdiv.or(tol.max_subdiv);
        let mc = self.mc.get_or_insert_with(Default::default);
        mc.samples = o.mc_samples.or(mc.samples);
        mc.seed = o.seed.or(mc.seed);
        let out = self.output.get_or_insert_with(Default::default);
        out.format = o.format.or(out.format);
        out.path = o.output.clone().or(out.path.take());
    }

    /// Validates the config, fills defaults and builds the library objects.
    /// All checks run before anything expensive: the only computation is a
    /// Monte Carlo sphere measure for groups that need one.
    pub fn resolve(self) -> Result<Experiment> {
        let defaults = Tolerance::default();
        let t = self.tolerance.unwrap_or_default();
        let tol =
            Tolerance::new(t.rel.unwrap_or(defaults.rel), t.abs.unwrap_or(defaults.abs), t.max_subdiv.unwrap_or(defaults.max_subdiv))?;

        let mc_defaults = McConfig::default();
        let m = self.mc.unwrap_or_default();
        let chunk_size = m.chunk_size.or(mc_defaults.chunk_size).unwrap_or(1 << 16);
        if chunk_size == 0 {
            return Err(invalid("`mc.chunk_size` must be positive"));
        }
        let mc = McConfig {
            samples: m.samples.unwrap_or(mc_defaults.samples),
            seed: m.seed.unwrap_or(mc_defaults.seed),
            chunk_size: Some(chunk_size),
        };
        if mc.samples == 0 {
            return Err(invalid("`mc.samples` must be positive"));
        }

        let p = self.p.unwrap_or(DEFAULT_P);
        let q = conjugate_exponent(p).map_err(|e| invalid(format!("`p`: {e}")))?;

        let betas = self.betas.unwrap_or_else(|| DEFAULT_BETAS.to_vec());
        check_positive_list("betas", &betas)?;
        if betas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("`betas` must be strictly decreasing"));
        }
        let scales = self.scales.unwrap_or_else(|| DEFAULT_SCALES.to_vec());
        check_positive_list("scales", &scales)?;
        if scales.len() < 3 {
            return Err(invalid(format!("`scales` needs at least 3 values, got {}", scales.len())));
        }
        let radii = self.radii.unwrap_or_else(|| DEFAULT_RADII.to_vec());
        check_positive_list("radii", &radii)?;

        let mode = self.mode.unwrap_or(if self.group.is_some() { ModeSpec::Group } else { ModeSpec::Classical });
        let (group_spec, group) = resolve_group(mode, self.group)?;
        let q_dim = group.homogeneous_dim();

        let user_kernel = match mode {
            ModeSpec::Theorem31 => None,
            ModeSpec::Classical => Some(self.kernel.clone().unwrap_or(KernelSpec::Catalog(CatalogKernel::Hilbert {}))),
            ModeSpec::Group => Some(self.kernel.clone().unwrap_or(KernelSpec::Catalog(CatalogKernel::HilbertLambda { lambda: q_dim }))),
        };
        let built_kernel = user_kernel.as_ref().map(KernelSpec::build).transpose()?;

        let entries = self.functions.unwrap_or_else(|| {
            DEFAULT_CUTOFF_BETAS
                .iter()
                .map(|&beta| FunctionEntry::Single(FunctionSpec::PowerCutoff { beta, exponent: None, dim: None }))
                .collect()
        });
        if entries.is_empty() {
            return Err(invalid("`functions` must not be empty"));
        }
        let functions: Vec<PairSpec> = entries
            .iter()
            .map(|e| match e {
                FunctionEntry::Pair(pair) => PairSpec { f: pair.f.resolve(p, q_dim), g: pair.g.resolve(q, q_dim) },
                FunctionEntry::Single(spec) => PairSpec { f: spec.resolve(p, q_dim), g: spec.resolve(q, q_dim) },
            })
            .collect();
        let pairs = functions
            .iter()
            .enumerate()
            .map(|(i, pair)| {
                let f = pair.f.build().map_err(|e| invalid(format!("functions[{i}].f: {e}")))?;
                let g = pair.g.build().map_err(|e| invalid(format!("functions[{i}].g: {e}")))?;
                Ok((f, g))
            })
            .collect::<Result<Vec<_>>>()?;

        let o = self.output.unwrap_or_default();
        let output = ResolvedOutput { format: o.format.unwrap_or(Format::Json), path: o.path };

        // everything is validated; the sphere measure may need sampling
        let group = group.with_sphere_measure(&mc)?;
        let (kernel_spec, kernel) = match (user_kernel, built_kernel) {
            (Some(spec), Some(kernel)) => (spec, kernel),
            _ => {
                let sphere = group.sphere_value()?;
                let spec = KernelSpec::Catalog(CatalogKernel::GroupWeightedHilbert { p, q_dim, c: q_dim / sphere });
                // an echoed config carries the fixed kernel; anything else is a mistake
                if self.kernel.as_ref().is_some_and(|k| *k != spec) {
                    return Err(invalid("theorem31 mode fixes its own kernel; drop `kernel`"));
                }
                (spec, theorem31_kernel(p, &group)?)
            }
        };

        let config = ResolvedConfig {
            mode,
            group: group_spec,
            kernel: kernel_spec,
            p,
            functions,
            betas,
            scales,
            radii,
            tolerance: ResolvedTolerance { rel: tol.rel, abs: tol.abs, max_subdiv: tol.max_subdiv },
            mc: ResolvedMc { samples: mc.samples, seed: mc.seed, chunk_size },
            output,
        };
        Ok(Experiment { config, q, group, kernel, tol, mc, pairs })
    }
}

/// Reads, validates and resolves the config at `path`, or the defaults
/// when no path is given.
pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Experiment> {
    let mut config = match path {
        Some(p) => read_config(p)?,
        None => ExperimentConfig::default(),
    };
    config.apply(overrides);
    // flag values go through the same schema as file values
    validate_against_schema(&serde_json::to_value(&config).map_err(|e| invalid(e.to_string()))?)?;
    config.resolve()
}
