use std::f64::consts::PI;

use hh_core::group::{euclidean_sphere_area, gamma_half_integer, QuasiNormKind, SphereMeasure, SphereMethod};
use serde::{Deserialize, Serialize};

use super::CommandOutput;
use crate::config::{Experiment, ModeSpec};
use crate::error::Result;
use crate::report::{flag, num, Diagnostic, Outcome, Table};

const SCALING_SAMPLES: usize = 1000;
const SCALING_TOL: f64 = 1e-12;
/// Closed-form paths must agree to a few ulps.
const EXACT_TOL: f64 = 4.0 * f64::EPSILON;
const MC_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloCheck {
    pub value: f64,
    pub err_estimate: f64,
    pub samples: u64,
    pub seed: u64,
    /// `|MC − |𝔖|| / standard error`.
    #[serde(with = "hh_core::num_serde")]
    pub deviation_sigmas: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallEntry {
    pub radius: f64,
    pub volume: f64,
    /// `π^{n/2}/Γ(n/2+1)·rⁿ` in the Euclidean case.
    pub closed_form: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryResult {
    pub weights: Vec<f64>,
    pub norm: QuasiNormKind,
    pub dim: usize,
    pub q_dim: f64,
    pub sphere: SphereMeasure,
    /// `2π^{n/2}/Γ(n/2)` in the Euclidean case.
    pub sphere_closed_form: Option<f64>,
    pub monte_carlo: Option<MonteCarloCheck>,
    pub balls: Vec<BallEntry>,
    /// Largest relative defect of `|D_λ x| = λ|x|` over random points.
    pub scaling_residual: f64,
    pub scaling_ok: bool,
    pub all_ok: bool,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXACT_TOL * a.abs().max(b.abs())
}

pub fn cmd_geometry(exp: &Experiment) -> Result<CommandOutput> {
    let group = &exp.group;
    let sphere = group.sphere().expect("resolved groups carry a sphere measure");
    let n = group.dim() as u32;
    let euclidean = group.norm_kind() == QuasiNormKind::Euclidean;
    let mut diagnostics = Vec::new();

    let sphere_closed_form = euclidean.then(|| euclidean_sphere_area(n));
    // the half line fixes |𝔖| = 1 by convention, which no hit count reproduces
    let monte_carlo = if sphere.method != SphereMethod::MonteCarlo && exp.config.mode != ModeSpec::Classical {
        let mc = group.sphere_measure_mc(&exp.mc)?;
        diagnostics.push(Diagnostic::new("sphere measure: hit count", mc));
        let deviation_sigmas = if mc.err_estimate > 0.0 {
            (mc.value - sphere.value).abs() / mc.err_estimate
        } else if mc.value == sphere.value {
            0.0
        } else {
            f64::INFINITY
        };
        Some(MonteCarloCheck {
            value: mc.value,
            err_estimate: mc.err_estimate,
            samples: exp.mc.samples,
            seed: exp.mc.seed,
            deviation_sigmas,
            ok: deviation_sigmas <= MC_SIGMAS,
        })
    } else {
        None
    };

    let balls = exp
        .config
        .radii
        .iter()
        .map(|&radius| {
            let volume = group.ball_volume(radius)?;
            let closed_form = euclidean.then(|| PI.powf(n as f64 / 2.0) / gamma_half_integer(n + 2) * radius.powi(n as i32));
            let ok = closed_form.is_none_or(|c| close(c, volume));
            Ok(BallEntry { radius, volume, closed_form, ok })
        })
        .collect::<Result<Vec<_>>>()?;

    let scaling_residual = group.scaling_residual(SCALING_SAMPLES, exp.mc.seed)?;
    let scaling_ok = scaling_residual <= SCALING_TOL;
    let all_ok = scaling_ok
        && balls.iter().all(|b| b.ok)
        && monte_carlo.as_ref().is_none_or(|m| m.ok)
        && sphere_closed_form.is_none_or(|c| close(c, sphere.value));

    let mut table = Table::new(
        format!("geometry of weights {:?} with norm {}", group.weights(), group.norm_kind()),
        &["quantity", "value", "reference", "ok"],
    );
    table.push(vec!["Q".into(), group.homogeneous_dim().to_string(), "-".into(), flag(true)]);
    let method = format!("{:?}", sphere.method).to_lowercase();
    table.push(vec![
        format!("|S| ({method})"),
        num(sphere.value, true),
        sphere_closed_form.map_or("-".into(), |c| num(c, true)),
        flag(sphere_closed_form.is_none_or(|c| close(c, sphere.value))),
    ]);
    if let Some(m) = &monte_carlo {
        table.push(vec![
            "|S| (hit count)".into(),
            format!("{} ± {:.2e}", num(m.value, true), m.err_estimate),
            format!("{:.2} sigma", m.deviation_sigmas),
            flag(m.ok),
        ]);
    }
    for b in &balls {
        table.push(vec![
            format!("|B(0, {})|", b.radius),
            num(b.volume, true),
            b.closed_form.map_or("-".into(), |c| num(c, true)),
            flag(b.ok),
        ]);
    }
    table.push(vec!["scaling residual".into(), format!("{scaling_residual:.2e}"), format!("<= {SCALING_TOL:.0e}"), flag(scaling_ok)]);

    let result = GeometryResult {
        weights: group.weights().to_vec(),
        norm: group.norm_kind(),
        dim: group.dim(),
        q_dim: group.homogeneous_dim(),
        sphere,
        sphere_closed_form,
        monte_carlo,
        balls,
        scaling_residual,
        scaling_ok,
        all_ok,
    };
    let outcome = if all_ok { Outcome::Ok } else { Outcome::CheckFailed };
    CommandOutput::new(&result, diagnostics, outcome, table)
}
