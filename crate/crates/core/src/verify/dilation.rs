use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bilinear_form, lp_norm, RadialFunction};
use crate::constants::conjugate_exponent;
use crate::group::HomogeneousGroup;
use crate::kernels::Kernel;
use crate::quad::{QuadResult, Tolerance};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub a: f64,
    /// `B(f∘D_a, g∘D_a) / (‖f∘D_a‖_p ‖g∘D_a‖_q)`.
    #[serde(with = "crate::num_serde")]
    pub ratio: f64,
    pub converged: bool,
    pub bilinear: QuadResult,
    pub norm_f: QuadResult,
    pub norm_g: QuadResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationProbe {
    pub entries: Vec<ProbeEntry>,
    /// Least-squares slope of `ln ratio` against `ln a`.
    #[serde(with = "crate::num_serde")]
    pub fitted_slope: f64,
    /// `−(Q + λ)` for a kernel of order λ.
    pub expected_slope: f64,
    pub slope_tolerance: f64,
    pub slope_ok: bool,
}

/// Evaluates the normalized bilinear form on dilates of `f` and `g`. For a
/// kernel of order λ the ratio scales like `a^{−(Q+λ)}`, so it is bounded
/// in `a` only at the critical order `λ = −Q`.
pub fn dilation_probe(
    kernel: &Kernel,
    f: &RadialFunction,
    g: &RadialFunction,
    p: f64,
    group: &HomogeneousGroup,
    scales: &[f64],
    tol: &Tolerance,
) -> Result<DilationProbe> {
    let q = conjugate_exponent(p)?;
    let order = kernel
        .claimed_order()
        .ok_or_else(|| Error::Precondition(format!("kernel `{}` needs a verified homogeneity order", kernel.text())))?;
    if scales.len() < 3 {
        return Err(Error::InvalidInput(format!("dilation probe needs at least 3 scales, got {}", scales.len())));
    }
    if scales.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidInput("scales must be positive".into()));
    }
    let entries: Vec<ProbeEntry> = scales
        .par_iter()
        .map(|&a| {
            let fa = f.clone().scaled(a)?;
            let ga = g.clone().scaled(a)?;
            let bilinear = bilinear_form(kernel, &fa, &ga, group, tol)?;
            let norm_f = lp_norm(&fa, p, group, tol)?;
            let norm_g = lp_norm(&ga, q, group, tol)?;
            let ratio = bilinear.value / (norm_f.value * norm_g.value);
            let converged = bilinear.converged && norm_f.converged && norm_g.converged && ratio.is_finite();
            Ok(ProbeEntry { a, ratio, converged, bilinear, norm_f, norm_g })
        })
        .collect::<Result<_>>()?;
    if entries.iter().any(|e| e.norm_f.value == 0.0 || e.norm_g.value == 0.0) {
        return Err(Error::InvalidInput(format!("dilation probe needs nonzero test functions, got `{f}` and `{g}`")));
    }

    let points: Vec<(f64, f64)> =
        entries.iter().filter(|e| e.ratio.is_finite() && e.ratio > 0.0).map(|e| (e.a.ln(), e.ratio.ln())).collect();
    let fitted_slope = least_squares_slope(&points);
    // `+ 0.0` turns a negative zero into zero
    let expected_slope = -(group.homogeneous_dim() + order) + 0.0;
    let slope_tolerance = 1e-3 * expected_slope.abs().max(1.0);
    let slope_ok = (fitted_slope - expected_slope).abs() <= slope_tolerance;
    Ok(DilationProbe { entries, fitted_slope, expected_slope, slope_tolerance, slope_ok })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{catalog, CatalogKernel};

    const SCALES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

    fn cutoff() -> RadialFunction {
        RadialFunction::power_cutoff(0.5, 2.0, 1.0).unwrap()
    }

    #[test]
    fn slope_of_exact_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((least_squares_slope(&pts) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn critical_order_is_scale_invariant() {
        let k = catalog(&CatalogKernel::Hilbert {}).unwrap();
        let probe = dilation_probe(&k, &cutoff(), &cutoff(), 2.0, &HomogeneousGroup::half_line(), &SCALES, &Tolerance::default()).unwrap();
        assert!(probe.slope_ok, "{probe:?}");
        assert_eq!(probe.expected_slope, 0.0);
    }

    #[test]
    fn subcritical_order_grows_linearly() {
        let k = Kernel::parse("1/(r+s)^2", Some(-2.0)).unwrap();
        let probe = dilation_probe(&k, &cutoff(), &cutoff(), 2.0, &HomogeneousGroup::half_line(), &SCALES, &Tolerance::default()).unwrap();
        assert_eq!(probe.expected_slope, 1.0);
        assert!(probe.slope_ok, "{probe:?}");
    }

    #[test]
    fn order_is_required() {
        let k = Kernel::parse("1/(r+s)", None).unwrap();
        assert!(matches!(
            dilation_probe(&k, &cutoff(), &cutoff(), 2.0, &HomogeneousGroup::half_line(), &SCALES, &Tolerance::default()),
            Err(Error::Precondition(_))
        ));
        let k = Kernel::parse("1/(r+s)", Some(-1.0)).unwrap();
        assert!(dilation_probe(&k, &cutoff(), &cutoff(), 2.0, &HomogeneousGroup::half_line(), &[1.0, 2.0], &Tolerance::default()).is_err());
    }

    #[test]
    fn zero_function_is_rejected() {
        let k = catalog(&CatalogKernel::Hilbert {}).unwrap();
        let zero = RadialFunction::zero();
        assert!(matches!(
            dilation_probe(&k, &cutoff(), &zero, 2.0, &HomogeneousGroup::half_line(), &SCALES, &Tolerance::default()),
            Err(Error::InvalidInput(_))
        ));
    }
}
