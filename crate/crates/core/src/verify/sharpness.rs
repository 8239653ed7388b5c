use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{cstar_classical, cstar_group, Mode, SharpConstant};
use crate::group::HomogeneousGroup;
use crate::kernels::Kernel;
use crate::quad::{try_integrate_half_line, QuadResult, Tolerance};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub beta: f64,
    /// Lower bound for the constant at this β, divided by `C*_p`.
    #[serde(with = "crate::num_serde")]
    pub ratio: f64,
    pub converged: bool,
    pub quad: QuadResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSweep {
    pub constant: SharpConstant,
    pub entries: Vec<SweepEntry>,
    /// Ratios never decrease as β decreases, up to `2·tol`.
    pub monotone: bool,
    /// Every ratio is at most `1 + slack`.
    pub bounded: bool,
    /// The last ratio exceeds the first.
    pub improves: bool,
    #[serde(with = "crate::num_serde")]
    pub slack: f64,
}

impl SharpnessSweep {
    pub fn passes(&self) -> bool {
        self.monotone && self.bounded && (self.entries.len() < 2 || self.improves) && self.entries.iter().all(|e| e.converged)
    }
}

/// Drives the extremal family `f_β = |x|^{−Q/p−β} χ_{|x|>1}` through the
/// lower bound `|𝔖| ∫_0^∞ k(1,t) t^{Q−1−Q/p−β} max(1, 1/t)^{−βp} dt ≤ C`
/// and reports each bound relative to `C*_p`. Entries run in parallel and
/// come back in input order.
pub fn sharpness_sweep(
    kernel: &Kernel,
    p: f64,
    mode: Mode,
    group: &HomogeneousGroup,
    betas: &[f64],
    tol: &Tolerance,
) -> Result<SharpnessSweep> {
    if betas.is_empty() {
        return Err(Error::InvalidInput("sharpness sweep needs at least one beta".into()));
    }
    if betas.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
        return Err(Error::InvalidInput("betas must be positive".into()));
    }
    if betas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("betas must be strictly decreasing".into()));
    }
    let (constant, group) = match mode {
        Mode::Classical => (cstar_classical(kernel, p, tol)?, HomogeneousGroup::half_line()),
        Mode::Group => (cstar_group(kernel, p, group, tol)?, group.clone()),
    };
    if !constant.is_finite() {
        return Err(Error::Precondition(format!("C*_p is infinite for `{}` at p = {p}", kernel.text())));
    }
    let sphere = group.sphere_value()?;
    let q_dim = group.homogeneous_dim();

    let entries: Vec<SweepEntry> = betas
        .par_iter()
        .map(|&beta| {
            let quad = try_integrate_half_line(
                |t| {
                    let cut = if t < 1.0 { t.powf(beta * p) } else { 1.0 };
                    Ok(kernel.eval(1.0, t)? * t.powf(q_dim - 1.0 - q_dim / p - beta) * cut)
                },
                tol,
            )?
            .scaled(sphere);
            let ratio = if quad.is_divergent() { f64::INFINITY } else { quad.value / constant.value };
            Ok(SweepEntry { beta, ratio, converged: quad.converged, quad })
        })
        .collect::<Result<_>>()?;

    let errs: f64 = entries.iter().map(|e| e.quad.rel_err()).fold(0.0, f64::max) + constant.rel_err();
    let slack = 10.0 * tol.rel.max(errs);
    let step_slack = 2.0 * tol.rel.max(errs);
    let monotone = entries.windows(2).all(|w| w[1].ratio >= w[0].ratio * (1.0 - step_slack));
    let bounded = entries.iter().all(|e| e.ratio <= 1.0 + slack);
    let improves = entries.len() >= 2 && entries[entries.len() - 1].ratio > entries[0].ratio;
    Ok(SharpnessSweep { constant, entries, monotone, bounded, improves, slack })
}
