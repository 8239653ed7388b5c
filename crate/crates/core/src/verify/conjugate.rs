//! The extremal partner `g(y) = (∫ k(|x|,|y|) f(x) dx)^{p−1}` of `f`,
//! tabulated on a log grid and interpolated.
//!
//! Values at the nodes come from quadrature. Between nodes the table is a
//! monotonicity-limited cubic Hermite interpolant in `(ln s, ln g)` (or in
//! `(ln s, g)` when `g` vanishes somewhere). Outside the grid `g` is
//! evaluated directly and memoized.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::RadialFunction;
use crate::group::HomogeneousGroup;
use crate::kernels::Kernel;
use crate::quad::{try_integrate_half_line_with_breaks, QuadResult, Tolerance};
use crate::{Error, Result};

pub const GRID_NODES: usize = 4096;
pub const GRID_MIN: f64 = 1e-6;
pub const GRID_MAX: f64 = 1e6;
const ERROR_PROBE_STRIDE: usize = 64;

#[derive(Debug)]
pub struct ConjugateFunction {
    kernel: Kernel,
    base: RadialFunction,
    p: f64,
    sphere: f64,
    q_dim: f64,
    tol: Tolerance,
    x0: f64,
    h: f64,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    log_values: bool,
    node_rel_err: f64,
    interp_rel_err: f64,
    memo: Mutex<HashMap<u64, f64>>,
}

/// Tabulates `g(s) = (|𝔖| ∫_0^∞ k(r,s) φ(r) r^{Q−1} dr)^{p−1}`.
pub fn conjugate_function(
    kernel: &Kernel,
    f: &RadialFunction,
    p: f64,
    group: &HomogeneousGroup,
    tol: &Tolerance,
) -> Result<RadialFunction> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("exponent must be > 1, got {p}")));
    }
    let x0 = GRID_MIN.ln();
    let h = (GRID_MAX.ln() - x0) / (GRID_NODES - 1) as f64;
    let mut table = ConjugateFunction {
        kernel: kernel.clone(),
        base: f.clone(),
        p,
        sphere: group.sphere_value()?,
        q_dim: group.homogeneous_dim(),
        tol: tol.inner(),
        x0,
        h,
        ys: Vec::new(),
        slopes: Vec::new(),
        log_values: false,
        node_rel_err: 0.0,
        interp_rel_err: 0.0,
        memo: Mutex::new(HashMap::new()),
    };

    let node = |i: usize| (x0 + h * i as f64).exp();
    let inner: Vec<QuadResult> = (0..GRID_NODES)
        .into_par_iter()
        .map(|i| {
            let res = table.inner(node(i))?;
            if res.is_divergent() {
                return Err(Error::InnerDivergence { lo: node(i.saturating_sub(1)), hi: node((i + 1).min(GRID_NODES - 1)) });
            }
            Ok(res)
        })
        .collect::<Result<_>>()?;

    table.node_rel_err = inner.iter().filter(|r| r.value != 0.0).map(|r| (table.p - 1.0) * r.rel_err()).fold(0.0, f64::max);
    let values: Vec<f64> = inner.iter().map(|r| table.power(r.value)).collect();
    table.log_values = values.iter().all(|v| *v > 0.0);
    table.ys = if table.log_values { values.iter().map(|v| v.ln()).collect() } else { values };
    table.slopes = limited_slopes(&table.ys, h);

    // compare against direct evaluation halfway between nodes
    let probes: Vec<(f64, f64)> = (0..GRID_NODES - 1)
        .step_by(ERROR_PROBE_STRIDE)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i| {
            let s = (x0 + h * (i as f64 + 0.5)).exp();
            Ok((table.interpolate(s), table.exact(s)?))
        })
        .collect::<Result<_>>()?;
    table.interp_rel_err = probes.iter().map(|&(a, b)| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) }).fold(0.0, f64::max);

    Ok(RadialFunction::Conjugate(Arc::new(table)))
}

/// Five-point node derivatives, limited per interval in the manner of
/// Fritsch and Carlson so the interpolant keeps the data's monotonicity.
fn limited_slopes(ys: &[f64], h: f64) -> Vec<f64> {
    let n = ys.len();
    let mut d = vec![0.0; n];
    for i in 0..n {
        d[i] = if i >= 2 && i + 2 < n {
            (ys[i - 2] - 8.0 * ys[i - 1] + 8.0 * ys[i + 1] - ys[i + 2]) / (12.0 * h)
        } else if i >= 1 && i + 1 < n {
            (ys[i + 1] - ys[i - 1]) / (2.0 * h)
        } else if i == 0 {
            (-3.0 * ys[0] + 4.0 * ys[1] - ys[2]) / (2.0 * h)
        } else {
            (3.0 * ys[n - 1] - 4.0 * ys[n - 2] + ys[n - 3]) / (2.0 * h)
        };
    }
    for k in 0..n - 1 {
        let delta = (ys[k + 1] - ys[k]) / h;
        if delta == 0.0 {
            d[k] = 0.0;
            d[k + 1] = 0.0;
            continue;
        }
        let alpha = d[k] / delta;
        let beta = d[k + 1] / delta;
        if alpha < 0.0 {
            d[k] = 0.0;
        }
        if beta < 0.0 {
            d[k + 1] = 0.0;
        }
        let norm = alpha * alpha + beta * beta;
        if norm > 9.0 {
            let tau = 3.0 / norm.sqrt();
            d[k] = tau * alpha * delta;
            d[k + 1] = tau * beta * delta;
        }
    }
    d
}

impl ConjugateFunction {
    fn power(&self, inner: f64) -> f64 {
        let t = inner.max(0.0);
        if t == 0.0 {
            0.0
        } else {
            t.powf(self.p - 1.0)
        }
    }

    /// `|𝔖| ∫_0^∞ k(r,s) φ(r) r^{Q−1} dr`.
    fn inner(&self, s: f64) -> Result<QuadResult> {
        let q1 = self.q_dim - 1.0;
        let mut breaks = self.base.breakpoints();
        breaks.push(s);
        let res = try_integrate_half_line_with_breaks(
            |r| {
                let v = self.base.eval(r)?;
                if v == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.kernel.eval(r, s)? * v * r.powf(q1))
            },
            &breaks,
            &self.tol,
        )?;
        Ok(res.scaled(self.sphere))
    }

    fn exact(&self, s: f64) -> Result<f64> {
        let res = self.inner(s)?;
        if res.is_divergent() {
            return Err(Error::InnerDivergence { lo: s, hi: s });
        }
        Ok(self.power(res.value))
    }

    fn interpolate(&self, s: f64) -> f64 {
        let x = s.ln();
        let pos = (x - self.x0) / self.h;
        let k = (pos.floor() as usize).min(self.ys.len() - 2);
        let t = pos - k as f64;
        let (t2, t3) = (t * t, t * t * t);
        let y = (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[k]
            + (t3 - 2.0 * t2 + t) * self.h * self.slopes[k]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[k + 1]
            + (t3 - t2) * self.h * self.slopes[k + 1];
        if self.log_values {
            y.exp()
        } else {
            y.max(0.0)
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if (GRID_MIN..=GRID_MAX).contains(&s) {
            return Ok(self.interpolate(s));
        }
        let key = s.to_bits();
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let v = self.exact(s)?;
        self.memo.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }

    /// Largest relative deviation between the interpolant and direct
    /// evaluation over the probe points.
    pub fn interpolation_error(&self) -> f64 {
        self.interp_rel_err
    }

    /// Largest relative quadrature error at a node, after the power.
    pub fn node_error(&self) -> f64 {
        self.node_rel_err
    }

    pub fn describe(&self) -> String {
        format!("k = {}, f = {}, p = {}", self.kernel.text(), self.base, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{catalog, CatalogKernel};

    fn hilbert() -> Kernel {
        catalog(&CatalogKernel::Hilbert {}).unwrap()
    }

    #[test]
    fn hilbert_indicator_gives_log() {
        let chi = RadialFunction::indicator(0.0, 1.0).unwrap();
        let g = conjugate_function(&hilbert(), &chi, 2.0, &HomogeneousGroup::half_line(), &Tolerance::default()).unwrap();
        for s in [1e-9f64, 1e-5, 0.013, 0.5, 1.0, 7.7, 1234.5, 3e7] {
            let exact = (1.0 + 1.0 / s).ln();
            let v = g.eval(s).unwrap();
            assert!((v - exact).abs() < 1e-9 * exact + 1e-14, "s = {s}: {v} vs {exact}");
        }
        match g {
            RadialFunction::Conjugate(c) => assert!(c.interpolation_error() < 1e-9),
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_function_gives_zero() {
        let g =
            conjugate_function(&hilbert(), &RadialFunction::zero(), 3.0, &HomogeneousGroup::half_line(), &Tolerance::default()).unwrap();
        for s in [1e-8, 1.0, 10.0, 1e8] {
            assert_eq!(g.eval(s).unwrap(), 0.0);
        }
    }

    #[test]
    fn divergent_inner_integral_names_the_range() {
        let f = RadialFunction::expr("1").unwrap();
        let err = conjugate_function(&hilbert(), &f, 2.0, &HomogeneousGroup::half_line(), &Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::InnerDivergence { .. }), "{err:?}");
    }

    #[test]
    fn slopes_respect_monotone_data() {
        let ys: Vec<f64> = (0..20).map(|i| if i < 10 { 0.0 } else { 1.0 }).collect();
        let d = limited_slopes(&ys, 1.0);
        assert!(d.iter().all(|v| *v >= 0.0));
        assert_eq!(d[0], 0.0);
        assert_eq!(d[19], 0.0);
    }
}
