//! 10-point Gauss / 21-point Kronrod rule and a globally adaptive bisection
//! driver on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::Result;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] =
    [0.066_671_344_308_688_14, 0.149_451_349_150_580_6, 0.219_086_362_515_982_04, 0.269_266_719_309_996_35, 0.295_524_224_714_752_87];

pub(crate) const RULE_POINTS: u64 = 21;

#[derive(Debug, Clone, Copy)]
pub(crate) struct RuleEstimate {
    pub value: f64,
    pub error: f64,
}

/// Applies the 21-point Kronrod rule on `[a, b]` and estimates the error
/// from the embedded 10-point Gauss rule (QUADPACK scaling).
pub(crate) fn qk21<F>(f: &mut F, a: f64, b: f64) -> Result<RuleEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = f(center)?;
    let mut res_k = WGK[10] * f_center;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        let scale = (200.0 * error / res_asc).powf(1.5);
        error = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(RuleEstimate { value, error })
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AdaptiveOutcome {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub bisections: usize,
    #[cfg_attr(not(test), allow(dead_code))]
    pub converged: bool,
}

/// Globally adaptive bisection on `[a, b]`: the segment with the largest
/// error estimate is split until the summed error meets `target(value)` or
/// `max_bisections` is used up.
pub(crate) fn adaptive<F, T>(f: &mut F, a: f64, b: f64, target: T, max_bisections: usize) -> Result<AdaptiveOutcome>
where
    F: FnMut(f64) -> Result<f64>,
    T: Fn(f64) -> f64,
{
    let first = qk21(f, a, b)?;
    let mut evaluations = RULE_POINTS;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: first.value, error: first.error });
    let mut bisections = 0;
    // segments too narrow to split are retired here with their estimates
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;

    while error > target(value) && bisections < max_bisections {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e3 * f64::EPSILON * mid.abs() {
            frozen_value += worst.value;
            frozen_error += worst.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = qk21(f, worst.a, mid)?;
        let right = qk21(f, mid, worst.b)?;
        evaluations += 2 * RULE_POINTS;
        bisections += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: left.value, error: left.error });
        heap.push(Segment { a: mid, b: worst.b, value: right.value, error: right.error });
    }

    // re-sum to shed the drift of the running updates
    let value = heap.iter().map(|s| s.value).sum::<f64>() + frozen_value;
    let error = heap.iter().map(|s| s.error).sum::<f64>() + frozen_error;
    Ok(AdaptiveOutcome { value, error, evaluations, bisections, converged: error <= target(value) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let kronrod: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let gauss: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((kronrod - 2.0).abs() < 1e-15);
        assert!((gauss - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_rule_is_exact_for_high_degree_polynomials() {
        // 21-point Kronrod integrates degree 31 exactly
        let mut f = |x: f64| Ok(x.powi(30) + 3.0 * x.powi(7));
        let est = qk21(&mut f, 0.0, 1.0).unwrap();
        let exact = 1.0 / 31.0 + 3.0 / 8.0;
        assert!((est.value - exact).abs() < 1e-15);
    }

    #[test]
    fn adaptive_resolves_a_jump() {
        let mut f = |x: f64| Ok(if x < 0.3 { 1.0 } else { 2.0 });
        let out = adaptive(&mut f, 0.0, 1.0, |v| 1e-12 * v.abs(), 500).unwrap();
        assert!(out.converged);
        assert!((out.value - 1.7).abs() < 1e-11);
    }

    #[test]
    fn nan_is_surfaced_by_the_caller_closure() {
        let mut f = |x: f64| {
            if x > 0.5 {
                Err(crate::Error::Evaluation { at: x, value: f64::NAN })
            } else {
                Ok(1.0)
            }
        };
        assert!(qk21(&mut f, 0.0, 1.0).is_err());
    }
}
