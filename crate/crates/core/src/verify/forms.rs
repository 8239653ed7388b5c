use serde::{Deserialize, Serialize};

use super::{conjugate_function, RadialFunction, VerificationReport};
use crate::constants::{closed_form, conjugate_exponent, ClosedForm, SharpConstant};
use crate::group::HomogeneousGroup;
use crate::kernels::{catalog, CatalogKernel, Kernel};
use crate::quad::{mc_integrate, try_integrate_half_line_with_breaks, InnerStats, Interval, McConfig, QuadResult, Tolerance};
use crate::{Error, Result};

/// `φ(r)`, rejecting negative values.
fn profile(f: &RadialFunction, r: f64) -> Result<f64> {
    let v = f.eval(r)?;
    if v < 0.0 {
        return Err(Error::Domain(format!("test function `{f}` is negative at r = {r}: {v}")));
    }
    Ok(v)
}

/// Breakpoints of an inner integrand at outer radius `r`: those of the test
/// function plus the diagonal, where kernels such as `1/max(r,s)` kink.
fn with_diagonal(breaks: &[f64], r: f64) -> Vec<f64> {
    let mut all = breaks.to_vec();
    all.push(r);
    all
}

/// Marks divergent results with an infinite value.
fn infinite_if_divergent(res: QuadResult) -> QuadResult {
    if res.is_divergent() {
        QuadResult { value: f64::INFINITY, ..res }
    } else {
        res
    }
}

fn root(raw: QuadResult, p: f64) -> QuadResult {
    if raw.is_divergent() {
        infinite_if_divergent(raw)
    } else {
        raw.powf(1.0 / p)
    }
}

/// `(|𝔖| ∫_0^∞ φ(r)^p r^{Q−1} dr)^{1/p}`; infinite when divergent.
pub fn lp_norm(f: &RadialFunction, p: f64, group: &HomogeneousGroup, tol: &Tolerance) -> Result<QuadResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("norm exponent must be >= 1, got {p}")));
    }
    let raw = group.radial_integral_with_breaks(|r| Ok(profile(f, r)?.powf(p)), &f.breakpoints(), tol)?;
    Ok(root(raw, p))
}

/// `∫_0^∞ φ(r) r^{Q−1} (∫_0^∞ k(r,s) ψ(s) s^{Q−1} ds) dr`, inner in `s`.
fn pairing(kernel: &Kernel, f: &RadialFunction, g: &RadialFunction, q_dim: f64, tol: &Tolerance) -> Result<QuadResult> {
    let inner_tol = tol.inner();
    let stats = InnerStats::new();
    let q1 = q_dim - 1.0;
    let g_breaks = g.breakpoints();
    let outer = try_integrate_half_line_with_breaks(
        |r| {
            let fr = profile(f, r)?;
            if fr == 0.0 {
                return Ok(0.0);
            }
            let inner = try_integrate_half_line_with_breaks(
                |s| {
                    let gs = profile(g, s)?;
                    if gs == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(kernel.eval(r, s)? * gs * s.powf(q1))
                },
                &with_diagonal(&g_breaks, r),
                &inner_tol,
            )?;
            stats.record(&inner);
            Ok(fr * r.powf(q1) * inner.value)
        },
        &f.breakpoints(),
        tol,
    )?;
    Ok(stats.finish(outer, 1.0))
}

/// `∫_𝔾∫_𝔾 k(|x|,|y|) f(x) g(y) dx dy` for radial `f`, `g`.
pub fn bilinear_form(
    kernel: &Kernel,
    f: &RadialFunction,
    g: &RadialFunction,
    group: &HomogeneousGroup,
    tol: &Tolerance,
) -> Result<QuadResult> {
    let sphere = group.sphere_value()?;
    let raw = pairing(kernel, f, g, group.homogeneous_dim(), tol)?;
    Ok(infinite_if_divergent(raw.scaled(sphere * sphere)))
}

/// `∫_𝔾 (∫_𝔾 k(|x|,|y|) f(y) dy)^p dx`, the p-th power of [`hardy_lhs`].
pub fn hardy_integral(kernel: &Kernel, f: &RadialFunction, p: f64, group: &HomogeneousGroup, tol: &Tolerance) -> Result<QuadResult> {
    let sphere = group.sphere_value()?;
    let q1 = group.homogeneous_dim() - 1.0;
    let inner_tol = tol.inner();
    let stats = InnerStats::new();
    let f_breaks = f.breakpoints();
    let outer = try_integrate_half_line_with_breaks(
        |r| {
            let inner = try_integrate_half_line_with_breaks(
                |s| {
                    let fs = profile(f, s)?;
                    if fs == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(kernel.eval(r, s)? * fs * s.powf(q1))
                },
                &with_diagonal(&f_breaks, r),
                &inner_tol,
            )?;
            stats.record(&inner);
            let t = sphere * inner.value.max(0.0);
            Ok(if t == 0.0 { 0.0 } else { t.powf(p) * r.powf(q1) })
        },
        &f_breaks,
        tol,
    )?;
    Ok(infinite_if_divergent(stats.finish(outer, p).scaled(sphere)))
}

/// `(∫_𝔾 (∫_𝔾 k(|x|,|y|) f(y) dy)^p dx)^{1/p}`.
pub fn hardy_lhs(kernel: &Kernel, f: &RadialFunction, p: f64, group: &HomogeneousGroup, tol: &Tolerance) -> Result<QuadResult> {
    Ok(root(hardy_integral(kernel, f, p, group, tol)?, p))
}

/// `∫∫ k f g ≤ C ‖f‖_p ‖g‖_q`.
#[allow(clippy::too_many_arguments)]
pub fn verify_hh(
    kernel: &Kernel,
    f: &RadialFunction,
    g: &RadialFunction,
    p: f64,
    group: &HomogeneousGroup,
    constant: &SharpConstant,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let q = conjugate_exponent(p)?;
    let lhs = bilinear_form(kernel, f, g, group, tol)?;
    let norms = [lp_norm(f, p, group, tol)?, lp_norm(g, q, group, tol)?];
    Ok(VerificationReport::assemble(lhs, &norms, constant.clone(), tol))
}

/// `‖∫ k(|·|,|y|) f(y) dy‖_p ≤ C ‖f‖_p`.
pub fn verify_hardy(
    kernel: &Kernel,
    f: &RadialFunction,
    p: f64,
    group: &HomogeneousGroup,
    constant: &SharpConstant,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    conjugate_exponent(p)?;
    let lhs = hardy_lhs(kernel, f, p, group, tol)?;
    let norms = [lp_norm(f, p, group, tol)?];
    Ok(VerificationReport::assemble(lhs, &norms, constant.clone(), tol))
}

/// `‖∫ k(|·|,|y|) g(y) dy‖_q ≤ C ‖g‖_q`, the same operator on `L^q`.
pub fn verify_dual(
    kernel: &Kernel,
    g: &RadialFunction,
    q: f64,
    group: &HomogeneousGroup,
    constant: &SharpConstant,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    verify_hardy(kernel, g, q, group, constant, tol)
}

/// The group kernel `c·r^{(1−Q)/q} s^{(1−Q)/p}/(r+s)` with `c = Q/|𝔖|`,
/// whose bilinear form is the sphere-averaged Hilbert form.
pub fn theorem31_kernel(p: f64, group: &HomogeneousGroup) -> Result<Kernel> {
    let q_dim = group.homogeneous_dim();
    catalog(&CatalogKernel::GroupWeightedHilbert { p, q_dim, c: q_dim / group.sphere_value()? })
}

/// `(Q/|𝔖|) ∫∫ F(r) G(s)/(r+s) dr ds ≤ (Qπ/sin(π/p)) ‖f‖_p ‖g‖_q` with
/// `F(r) = r^{(Q−1)/p} |𝔖| φ(r)` and `G(s) = s^{(Q−1)/q} |𝔖| ψ(s)`.
pub fn verify_theorem31(
    f: &RadialFunction,
    g: &RadialFunction,
    p: f64,
    group: &HomogeneousGroup,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let q = conjugate_exponent(p)?;
    let q_dim = group.homogeneous_dim();
    let sphere = group.sphere_value()?;
    let constant = closed_form(&ClosedForm::GroupHilbert { q_dim, p })?;
    let weight_f = (q_dim - 1.0) / p;
    let weight_g = (q_dim - 1.0) / q;
    let inner_tol = tol.inner();
    let stats = InnerStats::new();
    let g_breaks = g.breakpoints();
    let outer = try_integrate_half_line_with_breaks(
        |r| {
            let fr = profile(f, r)?;
            if fr == 0.0 {
                return Ok(0.0);
            }
            let inner = try_integrate_half_line_with_breaks(
                |s| {
                    let gs = profile(g, s)?;
                    if gs == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(s.powf(weight_g) * sphere * gs / (r + s))
                },
                &g_breaks,
                &inner_tol,
            )?;
            stats.record(&inner);
            Ok(r.powf(weight_f) * sphere * fr * inner.value)
        },
        &f.breakpoints(),
        tol,
    )?;
    let lhs = infinite_if_divergent(stats.finish(outer, 1.0).scaled(q_dim / sphere));
    let norms = [lp_norm(f, p, group, tol)?, lp_norm(g, q, group, tol)?];
    Ok(VerificationReport::assemble(lhs, &norms, constant, tol))
}

/// The equality case of the duality argument: with
/// `g = (∫ k(|x|,|·|) f(x) dx)^{p−1}`, the bilinear form equals
/// `∫ (∫ k(|x|,|y|) f(x) dx)^p dy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceCheck {
    pub bilinear: QuadResult,
    /// `∫ (∫ k(|x|,|y|) f(x) dx)^p dy`.
    pub operator_power: QuadResult,
    #[serde(with = "crate::num_serde")]
    pub residual: f64,
    /// Empirical relative interpolation error of the tabulated `g`.
    #[serde(with = "crate::num_serde")]
    pub interpolation_error: f64,
    #[serde(with = "crate::num_serde")]
    pub tolerance: f64,
    pub holds: bool,
}

pub fn equivalence_check(
    kernel: &Kernel,
    f: &RadialFunction,
    p: f64,
    group: &HomogeneousGroup,
    tol: &Tolerance,
) -> Result<EquivalenceCheck> {
    conjugate_exponent(p)?;
    let g = conjugate_function(kernel, f, p, group, tol)?;
    let interpolation_error = match &g {
        RadialFunction::Conjugate(c) => c.interpolation_error(),
        _ => 0.0,
    };
    let bilinear = bilinear_form(kernel, f, &g, group, tol)?;
    // the operator here integrates the first slot
    let operator_power = hardy_integral(&kernel.transposed(), f, p, group, tol)?;
    let (a, b) = (bilinear.value, operator_power.value);
    let residual = if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
    let tolerance = tol.rel.max(bilinear.rel_err() + operator_power.rel_err() + interpolation_error);
    let holds = residual <= tolerance && !bilinear.is_divergent() && !operator_power.is_divergent();
    Ok(EquivalenceCheck { bilinear, operator_power, residual, interpolation_error, tolerance, holds })
}

/// Direct Monte Carlo estimate of `∫∫ k(|x|,|y|) f(x) g(y) dx dy` over
/// `𝔾 × 𝔾`, sampling the box that encloses the supports of `f` and `g`.
pub fn bilinear_form_mc(
    kernel: &Kernel,
    f: &RadialFunction,
    g: &RadialFunction,
    group: &HomogeneousGroup,
    mc: &McConfig,
) -> Result<QuadResult> {
    let support = |h: &RadialFunction| {
        h.support_radius().ok_or_else(|| Error::InvalidInput(format!("Monte Carlo needs a compactly supported test function, got `{h}`")))
    };
    let (rf, rg) = (support(f)?, support(g)?);
    let n = group.dim();
    let mut region: Vec<Interval> = group.weights().iter().map(|v| Interval::new(-rf.powf(*v), rf.powf(*v))).collect();
    region.extend(group.weights().iter().map(|v| Interval::new(-rg.powf(*v), rg.powf(*v))));
    mc_integrate(
        |pt| {
            let (x, y) = pt.split_at(n);
            let (nx, ny) = (group.norm_of(x), group.norm_of(y));
            let value = (|| -> Result<f64> {
                let fx = f.eval(nx)?;
                if fx == 0.0 {
                    return Ok(0.0);
                }
                let gy = g.eval(ny)?;
                if gy == 0.0 {
                    return Ok(0.0);
                }
                Ok(kernel.eval(nx, ny)? * fx * gy)
            })();
            value.unwrap_or(f64::NAN)
        },
        &region,
        mc,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{cstar_bilinear, cstar_classical, Mode};
    use crate::group::QuasiNormKind;
    use std::f64::consts::{LN_2, PI};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn line() -> HomogeneousGroup {
        HomogeneousGroup::half_line()
    }

    fn hilbert() -> Kernel {
        catalog(&CatalogKernel::Hilbert {}).unwrap()
    }

    fn cutoff(beta: f64, p: f64, q_dim: f64) -> RadialFunction {
        RadialFunction::power_cutoff(beta, p, q_dim).unwrap()
    }

    #[test]
    fn lp_norm_examples() {
        let n = lp_norm(&cutoff(0.5, 2.0, 1.0), 2.0, &line(), &tol()).unwrap();
        assert!((n.value - 1.0).abs() < 1e-10, "{n:?}");
        let e = lp_norm(&RadialFunction::expr("exp(-r)").unwrap(), 1.0, &line(), &tol()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
        let div = lp_norm(&RadialFunction::expr("1/(1+r)").unwrap(), 1.0, &line(), &tol()).unwrap();
        assert!(div.value.is_infinite() && div.is_divergent());
    }

    #[test]
    fn anisotropic_lp_norm_matches_formula() {
        let g = HomogeneousGroup::new(vec![1.0, 1.0, 2.0], QuasiNormKind::MaxAnisotropic)
            .unwrap()
            .with_sphere_measure(&McConfig::default())
            .unwrap();
        let n = lp_norm(&cutoff(0.25, 2.0, 4.0), 2.0, &g, &tol()).unwrap();
        let exact = (g.sphere_value().unwrap() / 0.5).sqrt();
        assert!((n.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn bilinear_on_the_unit_square_tail_is_two_log_two() {
        // ∫∫_{[1,∞)²} dx dy / ((x+y) x y); with u = 1/x it is ∫∫_{[0,1]²} du dv/(u+v).
        // φ(r) = r^{-1} on (1, ∞) is the power cutoff with β = 1/2, p = 2
        let tail = cutoff(0.5, 2.0, 1.0);
        assert_eq!(tail.eval(4.0).unwrap(), 0.25);
        let b = bilinear_form(&hilbert(), &tail, &tail, &line(), &tol()).unwrap();
        assert!((b.value - 2.0 * LN_2).abs() < 1e-9, "{b:?}");
    }

    #[test]
    fn bilinear_against_monte_carlo_oracle() {
        // substituting x = 1/a², y = 1/b² turns the tail integral into
        // ∫∫_{[0,1]²} 4ab/(a²+b²), which has finite variance
        let oracle = mc_integrate(
            |x| 4.0 * x[0] * x[1] / (x[0] * x[0] + x[1] * x[1]),
            &[Interval::new(0.0, 1.0), Interval::new(0.0, 1.0)],
            &McConfig::default(),
        )
        .unwrap();
        let tail = cutoff(0.5, 2.0, 1.0);
        let b = bilinear_form(&hilbert(), &tail, &tail, &line(), &tol()).unwrap();
        assert!((b.value - oracle.value).abs() <= 3.0 * oracle.err_estimate, "{b:?} vs {oracle:?}");
    }

    #[test]
    fn separable_kernel_product() {
        let k = Kernel::parse("exp(-r)*exp(-s)", None).unwrap();
        let chi = RadialFunction::indicator(0.0, 1.0).unwrap();
        let b = bilinear_form(&k, &chi, &chi, &line(), &tol()).unwrap();
        let exact = (1.0 - (-1.0f64).exp()).powi(2);
        assert!((b.value - exact).abs() < 1e-11);
    }

    #[test]
    fn dilated_inputs_scale_the_bilinear_form() {
        let k = Kernel::parse("1/(r+s)^2", Some(-2.0)).unwrap();
        let f = cutoff(0.5, 2.0, 1.0);
        let base = bilinear_form(&k, &f, &f, &line(), &tol()).unwrap().value;
        let a = 2.0;
        let fa = f.clone().scaled(a).unwrap();
        let scaled = bilinear_form(&k, &fa, &fa, &line(), &tol()).unwrap().value;
        // a^{−2Q−λ} with Q = 1, λ = −2
        assert!((scaled - base).abs() < 1e-9 * base);
        let k3 = Kernel::parse("1/(r+s)^3", Some(-3.0)).unwrap();
        let base = bilinear_form(&k3, &f, &f, &line(), &tol()).unwrap().value;
        let scaled = bilinear_form(&k3, &fa, &fa, &line(), &tol()).unwrap().value;
        assert!((scaled - a * base).abs() < 1e-9 * scaled);
    }

    #[test]
    fn zero_functions_hold_trivially() {
        let c = cstar_classical(&hilbert(), 2.0, &tol()).unwrap();
        let zero = RadialFunction::zero();
        let f = cutoff(0.5, 2.0, 1.0);
        let r = verify_hh(&hilbert(), &zero, &f, 2.0, &line(), &c, &tol()).unwrap();
        assert_eq!((r.lhs, r.ratio, r.holds), (0.0, 0.0, true));
        let r = verify_hardy(&hilbert(), &zero, 2.0, &line(), &c, &tol()).unwrap();
        assert_eq!((r.lhs, r.holds), (0.0, true));
        let r = verify_dual(&hilbert(), &zero, 2.0, &line(), &c, &tol()).unwrap();
        assert_eq!((r.lhs, r.holds), (0.0, true));
    }

    #[test]
    fn cutoff_pairing_against_series() {
        // π/((2a−1) sin πa) − Σ (−1)^n / ((n+1−a)(n+a)) with a = 1/2 + β
        for (beta, exact) in [(0.2, 5.289500677840327), (0.1, 12.68757827746997), (0.05, 28.10370633924382)] {
            let f = cutoff(beta, 2.0, 1.0);
            let b = bilinear_form(&hilbert(), &f, &f, &line(), &tol()).unwrap();
            assert!(b.converged && (b.value - exact).abs() < 1e-9 * exact, "beta {beta}: {b:?}");
        }
    }

    #[test]
    fn classical_inequalities_hold() {
        let c = cstar_classical(&hilbert(), 2.0, &tol()).unwrap();
        for beta in [0.5, 0.2, 0.1] {
            let f = cutoff(beta, 2.0, 1.0);
            let hh = verify_hh(&hilbert(), &f, &f, 2.0, &line(), &c, &tol()).unwrap();
            assert!(hh.holds && hh.ratio < 1.0, "{hh:?}");
            let hardy = verify_hardy(&hilbert(), &f, 2.0, &line(), &c, &tol()).unwrap();
            assert!(hardy.holds && hardy.ratio < 1.0, "{hardy:?}");
            let dual = verify_dual(&hilbert(), &f, 2.0, &line(), &c, &tol()).unwrap();
            assert_eq!(dual, hardy);
        }
    }

    #[test]
    fn hardy_ratio_grows_along_the_extremal_family() {
        let c = cstar_classical(&hilbert(), 2.0, &tol()).unwrap();
        let r = |beta| verify_hardy(&hilbert(), &cutoff(beta, 2.0, 1.0), 2.0, &line(), &c, &tol()).unwrap().ratio;
        assert!(r(0.05) > r(0.5));
    }

    #[test]
    fn dual_with_unequal_exponents() {
        let (p, q) = (3.0, 1.5);
        let c = cstar_bilinear(&hilbert(), p, Mode::Classical, &line(), &tol()).unwrap();
        let g = cutoff(0.5, q, 1.0);
        let dual = verify_dual(&hilbert(), &g, q, &line(), &c, &tol()).unwrap();
        assert!(dual.holds && dual.ratio < 1.0, "{dual:?}");
    }

    #[test]
    fn conjugate_exponent_symmetry_of_the_bilinear_form() {
        let k = catalog(&CatalogKernel::WeightedHilbert { lambda: 1.0, p: 3.0, k_exp: 2.0 }).unwrap();
        let (p, q) = (3.0, 1.5);
        let c = cstar_bilinear(&k, p, Mode::Classical, &line(), &tol()).unwrap();
        let ct = cstar_bilinear(&k.transposed(), q, Mode::Classical, &line(), &tol()).unwrap();
        assert!((c.value - ct.value).abs() < 1e-8 * c.value);
        let f = cutoff(0.3, p, 1.0);
        let g = cutoff(0.4, q, 1.0);
        let a = verify_hh(&k, &f, &g, p, &line(), &c, &tol()).unwrap();
        let b = verify_hh(&k.transposed(), &g, &f, q, &line(), &ct, &tol()).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-9 * a.lhs);
        assert!((a.rhs_norms - b.rhs_norms).abs() < 1e-9 * a.rhs_norms);
        assert!(a.holds && b.holds);
    }

    #[test]
    fn theorem31_on_the_line_is_the_hilbert_form() {
        let f = cutoff(0.3, 2.0, 1.0);
        let g = cutoff(0.6, 2.0, 1.0);
        let t = verify_theorem31(&f, &g, 2.0, &line(), &tol()).unwrap();
        let c = cstar_classical(&hilbert(), 2.0, &tol()).unwrap();
        let hh = verify_hh(&hilbert(), &f, &g, 2.0, &line(), &c, &tol()).unwrap();
        assert!((t.lhs - hh.lhs).abs() < 1e-9 * hh.lhs);
        assert!((t.constant.value - PI).abs() < 1e-15);
        assert!(t.holds);
    }

    #[test]
    fn theorem31_matches_its_kernel_form() {
        let g = HomogeneousGroup::new(vec![1.0, 1.0, 2.0], QuasiNormKind::MaxAnisotropic)
            .unwrap()
            .with_sphere_measure(&McConfig::default())
            .unwrap();
        let f = cutoff(0.5, 2.0, 4.0);
        let t = verify_theorem31(&f, &f, 2.0, &g, &tol()).unwrap();
        assert!(t.holds && t.ratio < 1.0, "{t:?}");
        assert!((t.constant.value - 4.0 * PI).abs() < 1e-14);
        let k = theorem31_kernel(2.0, &g).unwrap();
        let b = bilinear_form(&k, &f, &f, &g, &tol()).unwrap();
        assert!((b.value - t.lhs).abs() < 1e-9 * t.lhs);
    }

    #[test]
    fn divergent_norm_gives_failed_report() {
        let c = cstar_classical(&hilbert(), 2.0, &tol()).unwrap();
        let f = RadialFunction::expr("(1+r)^(-0.5)").unwrap();
        let r = verify_hardy(&hilbert(), &f, 1.5, &line(), &c, &tol()).unwrap();
        assert!(r.divergent && !r.holds);
    }

    #[test]
    fn equivalence_is_tight_for_hilbert() {
        let f = RadialFunction::indicator(0.0, 1.0).unwrap();
        let check = equivalence_check(&hilbert(), &f, 2.0, &line(), &tol()).unwrap();
        assert!(check.holds, "{check:?}");
    }

    #[test]
    fn radial_reduction_matches_cartesian_monte_carlo() {
        let g = HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::MaxAnisotropic).unwrap().with_sphere_override(12.0).unwrap();
        let k = catalog(&CatalogKernel::HilbertLambda { lambda: 3.0 }).unwrap();
        let f = cutoff(0.5, 2.0, 3.0).truncated(2.0).unwrap();
        let h = RadialFunction::indicator(0.0, 1.0).unwrap();
        let radial = bilinear_form(&k, &f, &h, &g, &tol()).unwrap();
        let mc = bilinear_form_mc(&k, &f, &h, &g, &McConfig { samples: 400_000, ..McConfig::default() }).unwrap();
        assert!((radial.value - mc.value).abs() <= 4.0 * mc.err_estimate, "{radial:?} vs {mc:?}");
    }
}
