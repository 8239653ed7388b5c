//! Numerical integration: improper integrals over `(0, ∞)` with algebraic
//! endpoint behaviour, iterated integrals over `(0, ∞)²`, seeded Monte Carlo
//! and the Gamma function.
//!
//! The half line is split at 1 and the tail `[1, ∞)` is folded onto `(0, 1]`
//! by `y = 1/u`. Each unit piece is cut into dyadic slices
//! `[2^{-k-1}, 2^{-k}]`, every slice is integrated with an adaptive
//! Gauss–Kronrod (10/21) rule, and the partial sums over `k` are accelerated
//! with Wynn's epsilon algorithm. A power law `u^a` at the endpoint turns
//! into a geometric sequence of slice values with ratio `2^{-(a+1)}`, so
//! divergence (`a <= -1`) shows up as slice values that stop shrinking.

mod extrapolation;
mod gamma;
mod gauss_kronrod;
mod monte_carlo;

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use gamma::gamma_fn;
pub use monte_carlo::{mc_integrate, Interval, McConfig};

use extrapolation::wynn_epsilon;

/// Accuracy request for a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdiv: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-14, max_subdiv: 2000 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_subdiv: usize) -> Result<Self> {
        let tol = Self { rel, abs, max_subdiv };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel > 0.0 && self.rel.is_finite()) {
            return Err(Error::InvalidInput(format!("relative tolerance must be positive, got {}", self.rel)));
        }
        if !(self.abs > 0.0 && self.abs.is_finite()) {
            return Err(Error::InvalidInput(format!("absolute tolerance must be positive, got {}", self.abs)));
        }
        if self.max_subdiv < 1 {
            return Err(Error::InvalidInput("max_subdiv must be at least 1".into()));
        }
        Ok(())
    }

    /// Error allowed for an integral whose value is `value`.
    pub fn target(&self, value: f64) -> f64 {
        (self.rel * value.abs()).max(self.abs)
    }

    /// Tolerance for integrals nested inside an outer quadrature. Purely
    /// relative: inner values far out in the outer variable are tiny, and an
    /// absolute floor there would swamp the relative error carried outward.
    pub fn inner(&self) -> Self {
        Self { rel: (self.rel * 0.1).max(1e-14), abs: 1e-300, max_subdiv: self.max_subdiv }
    }
}

/// Outcome of any integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    #[serde(with = "crate::num_serde")]
    pub value: f64,
    #[serde(with = "crate::num_serde")]
    pub err_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

impl QuadResult {
    /// A value known in closed form.
    pub fn exact(value: f64) -> Self {
        Self { value, err_estimate: 0.0, evaluations: 0, converged: true }
    }

    /// Divergence detected: the integral has no finite value.
    pub fn is_divergent(&self) -> bool {
        !self.converged && self.err_estimate.is_infinite()
    }

    /// Relative error estimate; zero for an exactly-zero converged value.
    pub fn rel_err(&self) -> f64 {
        if self.err_estimate == 0.0 {
            0.0
        } else if self.value == 0.0 {
            f64::INFINITY
        } else {
            self.err_estimate / self.value.abs()
        }
    }

    /// `value^power` with the error propagated to first order.
    pub fn powf(&self, power: f64) -> Self {
        let value = self.value.powf(power);
        let err_estimate = if self.err_estimate == 0.0 {
            0.0
        } else if self.value == 0.0 {
            self.err_estimate.powf(power)
        } else {
            (power * self.rel_err()).abs() * value.abs()
        };
        Self { value, err_estimate, ..*self }
    }

    /// `scale * self` with the error scaled alongside.
    pub fn scaled(&self, scale: f64) -> Self {
        Self { value: self.value * scale, err_estimate: self.err_estimate * scale.abs(), ..*self }
    }
}

const MIN_LEVELS: usize = 10;
/// Slices keep growing for a while when the integrand has a knee far out
/// (`s^a/(r+s)` with large `r`), so growth is only called divergence this deep.
const DIVERGENCE_LEVEL: usize = 64;
const MAX_LEVELS: usize = 200;
/// Growth past the deepest breakpoint is called divergence after this many levels.
const LEVELS_PAST_BREAKS: usize = 16;
/// Slices below `2^-1070` would be subnormal.
const LEVEL_CAP: usize = 1070;
const WYNN_WINDOW: usize = 11;

#[derive(Debug, Clone, Copy)]
struct UnitPiece {
    value: f64,
    error: f64,
    evaluations: u64,
    divergent: bool,
    converged: bool,
}

/// `∫_0^1 f(u) du` for `f` with at most algebraic behaviour at `u = 0`.
fn integrate_unit<F>(f: &mut F, breaks: &[f64], tol: &Tolerance, budget: &mut usize) -> Result<UnitPiece>
where
    F: FnMut(f64) -> Result<f64>,
{
    let target = |v: f64| 0.5 * tol.target(v);
    let mut sums: Vec<f64> = Vec::new();
    let mut terms: Vec<f64> = Vec::new();
    let mut estimates: Vec<f64> = Vec::new();
    let mut slice_error = 0.0;
    let mut evaluations = 0;
    let mut last_ext_error = f64::INFINITY;
    // first term of the current run of shrinking slices
    let mut run_start = 0;
    // no verdict before every known feature has been integrated through
    let deepest = breaks.iter().map(|b| (-b.log2()).ceil() as usize).max().unwrap_or(0);
    let min_levels = MIN_LEVELS.max(deepest + 2);
    let divergence_level = DIVERGENCE_LEVEL.max(deepest + LEVELS_PAST_BREAKS);
    let max_levels = MAX_LEVELS.max(deepest + 100).min(LEVEL_CAP);

    for level in 0..max_levels {
        if *budget == 0 {
            break;
        }
        let hi = 0.5f64.powi(level as i32);
        let lo = 0.5 * hi;
        let running = sums.last().copied().unwrap_or(0.0);
        let slice_target = |v: f64| (0.05 * tol.rel * v.abs()).max(0.005 * tol.rel * running.abs()).max(0.01 * tol.abs);
        // a kink close to a slice end slips past the error estimate, so
        // known breakpoints become piece boundaries
        let mut edges = vec![lo];
        edges.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        edges.push(hi);
        let mut term = 0.0;
        for w in edges.windows(2) {
            if *budget == 0 {
                break;
            }
            let out = gauss_kronrod::adaptive(f, w[0], w[1], slice_target, *budget - 1)?;
            *budget = budget.saturating_sub(1 + out.bisections);
            evaluations += out.evaluations;
            slice_error += out.error;
            term += out.value;
        }
        terms.push(term);
        sums.push(running + term);

        if level + 1 < min_levels {
            continue;
        }
        let k = terms.len() - 1;
        let sum = sums[k];
        let t = |i: usize| terms[i].abs();

        if t(k) == 0.0 && t(k - 1) == 0.0 && t(k - 2) == 0.0 {
            return Ok(UnitPiece { value: sum, error: slice_error, evaluations, divergent: false, converged: slice_error <= target(sum) });
        }

        if !sum.is_finite() {
            return Ok(UnitPiece { value: sum, error: f64::INFINITY, evaluations, divergent: true, converged: false });
        }
        let not_shrinking = (k - 3..k).all(|i| t(i + 1) >= (1.0 - 1e-9) * t(i) && t(i + 1) > 0.0);
        if not_shrinking && level >= divergence_level {
            return Ok(UnitPiece { value: sum, error: f64::INFINITY, evaluations, divergent: true, converged: false });
        }

        let ratio = |i: usize| {
            if t(i - 1) == 0.0 {
                if t(i) == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                t(i) / t(i - 1)
            }
        };
        let rho = ratio(k).max(ratio(k - 1));
        if rho < 0.9 {
            let tail = t(k) * rho / (1.0 - rho);
            if tail + slice_error <= target(sum) {
                return Ok(UnitPiece { value: sum, error: tail + slice_error, evaluations, divergent: false, converged: true });
            }
        }

        // the antilimit of a growing series is not an answer, and sums from
        // before the peak would steer epsilon towards it
        if t(k) >= t(k - 1) && t(k) > 0.0 {
            estimates.clear();
            run_start = k + 1;
            continue;
        }
        let window = &sums[run_start.saturating_sub(1).max(sums.len().saturating_sub(WYNN_WINDOW))..];
        if window.len() < 3 {
            continue;
        }
        let estimate = wynn_epsilon(window);
        estimates.push(estimate);
        let m = estimates.len();
        if m >= 3 {
            let ext_error = (estimate - estimates[m - 2]).abs() + (estimate - estimates[m - 3]).abs();
            last_ext_error = ext_error;
            if ext_error + slice_error <= target(estimate) {
                return Ok(UnitPiece { value: estimate, error: ext_error + slice_error, evaluations, divergent: false, converged: true });
            }
        }
    }

    let value = estimates.last().or(sums.last()).copied().unwrap_or(0.0);
    // budget ran out: fall back to the last slice size when no
    // extrapolation error exists, and to "unknown but finite" when nothing ran
    let fallback = match terms.last() {
        Some(t) => 10.0 * t.abs(),
        None => f64::MAX,
    };
    let error = (if last_ext_error.is_finite() { last_ext_error } else { fallback } + slice_error).min(f64::MAX);
    Ok(UnitPiece { value, error, evaluations, divergent: false, converged: false })
}

fn checked<F>(f: &mut F, y: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let v = f(y)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { at: y, value: v })
    }
}

/// `∫_0^∞ f(y) dy` for an integrand that may fail.
///
/// Divergence is reported through `converged = false` with an infinite
/// error estimate; `value` then holds the partial sum reached.
pub fn try_integrate_half_line<F>(f: F, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_half_line_with_breaks(f, &[], tol)
}

/// [`try_integrate_half_line`] for an integrand with kinks or jumps at the
/// given points.
pub fn try_integrate_half_line_with_breaks<F>(mut f: F, breaks: &[f64], tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    tol.validate()?;
    let mut head_breaks: Vec<f64> = breaks.iter().copied().filter(|&b| b > 0.0 && b < 1.0).collect();
    let mut tail_breaks: Vec<f64> = breaks.iter().filter(|&&b| b > 1.0 && b.is_finite()).map(|b| 1.0 / b).collect();
    head_breaks.sort_by(f64::total_cmp);
    tail_breaks.sort_by(f64::total_cmp);
    let mut budget = tol.max_subdiv;
    let head = integrate_unit(&mut |y| checked(&mut f, y), &head_breaks, tol, &mut budget)?;
    let mut folded = |u: f64| {
        let y = 1.0 / u;
        let v = checked(&mut f, y)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        let w = v / (u * u);
        if w.is_finite() {
            Ok(w)
        } else {
            Err(Error::Evaluation { at: y, value: w })
        }
    };
    let tail = integrate_unit(&mut folded, &tail_breaks, tol, &mut budget)?;

    let value = head.value + tail.value;
    let evaluations = head.evaluations + tail.evaluations;
    if head.divergent || tail.divergent {
        return Ok(QuadResult { value, err_estimate: f64::INFINITY, evaluations, converged: false });
    }
    let err_estimate = (head.error + tail.error).min(f64::MAX);
    let converged = (head.converged && tail.converged) || err_estimate <= tol.target(value);
    Ok(QuadResult { value, err_estimate, evaluations, converged: converged && err_estimate <= tol.target(value) })
}

/// `∫_0^∞ f(y) dy`. See [`try_integrate_half_line`].
pub fn integrate_half_line<F>(mut f: F, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_half_line(|y| Ok(f(y)), tol)
}

/// Bookkeeping for integrals nested inside an outer quadrature: keeps the
/// worst inner relative error and whether every inner integral converged.
#[derive(Debug, Default)]
pub struct InnerStats {
    worst_rel: Cell<f64>,
    all_converged: Cell<bool>,
    divergent: Cell<bool>,
    evaluations: Cell<u64>,
    seen: Cell<bool>,
}

impl InnerStats {
    pub fn new() -> Self {
        let stats = Self::default();
        stats.all_converged.set(true);
        stats
    }

    pub fn record(&self, inner: &QuadResult) {
        self.seen.set(true);
        self.evaluations.set(self.evaluations.get() + inner.evaluations);
        if !inner.converged {
            self.all_converged.set(false);
        }
        if inner.is_divergent() {
            self.divergent.set(true);
        }
        if inner.value != 0.0 && inner.err_estimate.is_finite() {
            self.worst_rel.set(self.worst_rel.get().max(inner.rel_err()));
        }
    }

    /// Folds the inner diagnostics into the outer result. `amplification`
    /// is the power the inner value is raised to inside the outer integrand.
    pub fn finish(&self, outer: QuadResult, amplification: f64) -> QuadResult {
        if !self.seen.get() {
            return outer;
        }
        let evaluations = outer.evaluations + self.evaluations.get();
        if self.divergent.get() || outer.is_divergent() {
            return QuadResult { value: outer.value, err_estimate: f64::INFINITY, evaluations, converged: false };
        }
        let err_estimate = outer.err_estimate + amplification.abs() * self.worst_rel.get() * outer.value.abs();
        QuadResult { value: outer.value, err_estimate, evaluations, converged: outer.converged && self.all_converged.get() }
    }
}

/// `∫_0^∞ ∫_0^∞ f(r, s) ds dr`, inner integral in `s`, outer in `r`.
pub fn try_integrate_half_plane<F>(mut f: F, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let inner_tol = tol.inner();
    let stats = InnerStats::new();
    let outer = try_integrate_half_line(
        |r| {
            let inner = try_integrate_half_line(|s| f(r, s), &inner_tol)?;
            stats.record(&inner);
            Ok(inner.value)
        },
        tol,
    )?;
    Ok(stats.finish(outer, 1.0))
}

pub fn integrate_half_plane<F>(mut f: F, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64, f64) -> f64,
{
    try_integrate_half_plane(|r, s| Ok(f(r, s)), tol)
}
