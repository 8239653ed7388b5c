//! Homogeneous groups modelled through their dilation and measure
//! structure: weights, a quasi-norm, and the total mass of the unit sphere.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::quad::{mc_integrate, try_integrate_half_line_with_breaks, Interval, McConfig, QuadResult, Tolerance};
use crate::{Error, Result};

/// Choice of homogeneous quasi-norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuasiNormKind {
    /// `max_i |x_i|^{1/v_i}`.
    MaxAnisotropic,
    /// `(Σ_i |x_i|^{2M/v_i})^{1/(2M)}`; the field holds `2M`.
    PowerAnisotropic(u32),
    /// Ordinary Euclidean norm; all weights must be 1.
    Euclidean,
}

impl fmt::Display for QuasiNormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuasiNormKind::MaxAnisotropic => write!(f, "max"),
            QuasiNormKind::PowerAnisotropic(two_m) => write!(f, "power:{two_m}"),
            QuasiNormKind::Euclidean => write!(f, "euclidean"),
        }
    }
}

impl FromStr for QuasiNormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(QuasiNormKind::MaxAnisotropic),
            "euclidean" => Ok(QuasiNormKind::Euclidean),
            _ => {
                let two_m = s
                    .strip_prefix("power:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown quasi-norm `{s}` (expected max, power:<2M> or euclidean)")))?;
                Ok(QuasiNormKind::PowerAnisotropic(two_m))
            }
        }
    }
}

impl Serialize for QuasiNormKind {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuasiNormKind {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How the sphere measure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereMethod {
    ClosedForm,
    MonteCarlo,
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereMeasure {
    pub value: f64,
    pub err_estimate: f64,
    pub method: SphereMethod,
}

/// An element of the group, as coordinates in `ℝᴺ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousGroup {
    weights: Vec<f64>,
    q_dim: f64,
    norm: QuasiNormKind,
    sphere: Option<SphereMeasure>,
}

/// `Γ(n/2)` by the exact recurrence from `Γ(1) = 1` or `Γ(1/2) = √π`.
pub fn gamma_half_integer(n: u32) -> f64 {
    assert!(n > 0, "Γ(0) is undefined");
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    let mut g = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    while x < n as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `2π^{n/2}/Γ(n/2)`, the area of the unit sphere in `ℝⁿ`.
pub fn euclidean_sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

impl HomogeneousGroup {
    /// Builds a group and, for the Euclidean norm, fills in the exact sphere
    /// measure. Other norms start without one; see
    /// [`HomogeneousGroup::with_sphere_measure`].
    pub fn new(weights: Vec<f64>, norm: QuasiNormKind) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("a group needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput(format!("weights must be finite and positive, got {w}")));
        }
        match norm {
            QuasiNormKind::Euclidean if weights.iter().any(|&w| w != 1.0) => {
                return Err(Error::InvalidInput("the Euclidean norm requires all weights equal to 1".into()));
            }
            QuasiNormKind::PowerAnisotropic(two_m) => {
                if two_m == 0 || two_m % 2 != 0 {
                    return Err(Error::InvalidInput(format!("power quasi-norm needs an even positive 2M, got {two_m}")));
                }
                let m = (two_m / 2) as f64;
                if let Some(w) = weights.iter().find(|&&w| (m / w).fract() != 0.0) {
                    return Err(Error::InvalidInput(format!("power:{two_m} needs M = {m} divisible by every weight, not by {w}")));
                }
            }
            _ => {}
        }
        let q_dim = weights.iter().sum();
        let mut group = Self { weights, q_dim, norm, sphere: None };
        if norm == QuasiNormKind::Euclidean {
            group.sphere = Some(SphereMeasure {
                value: euclidean_sphere_area(group.dim() as u32),
                err_estimate: 0.0,
                method: SphereMethod::ClosedForm,
            });
        }
        Ok(group)
    }

    /// `ℝⁿ` with the Euclidean norm.
    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n], QuasiNormKind::Euclidean)
    }

    /// The half line `(0, ∞)` of the classical theory: `Q = 1`, `|𝔖| = 1`.
    pub fn half_line() -> Self {
        Self::new(vec![1.0], QuasiNormKind::MaxAnisotropic)
            .expect("unit weight is valid")
            .with_sphere_override(1.0)
            .expect("1 is a valid sphere measure")
    }

    /// Replaces `|𝔖|` by a fixed value, e.g. 1 for the half line.
    pub fn with_sphere_override(mut self, value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidInput(format!("sphere measure override must be positive, got {value}")));
        }
        self.sphere = Some(SphereMeasure { value, err_estimate: 0.0, method: SphereMethod::Override });
        Ok(self)
    }

    /// Computes `|𝔖|` (unless already known) and caches it.
    pub fn with_sphere_measure(mut self, mc: &McConfig) -> Result<Self> {
        if self.sphere.is_none() {
            let res = self.sphere_measure(mc)?;
            self.sphere = Some(SphereMeasure { value: res.value, err_estimate: res.err_estimate, method: SphereMethod::MonteCarlo });
        }
        Ok(self)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Homogeneous dimension `Q = Σ v_i`.
    pub fn homogeneous_dim(&self) -> f64 {
        self.q_dim
    }

    pub fn norm_kind(&self) -> QuasiNormKind {
        self.norm
    }

    pub fn sphere(&self) -> Option<SphereMeasure> {
        self.sphere
    }

    /// The cached `|𝔖|`.
    pub fn sphere_value(&self) -> Result<f64> {
        self.sphere.map(|s| s.value).ok_or(Error::MissingSphereMeasure)
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        if x.coords.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: x.coords.len() })
        }
    }

    /// `D_λ x = (λ^{v_1} x_1, …, λ^{v_N} x_N)`.
    pub fn dilate(&self, lam: f64, x: &Point) -> Result<Point> {
        if !(lam > 0.0 && lam.is_finite()) {
            return Err(Error::InvalidInput(format!("dilation factor must be positive, got {lam}")));
        }
        self.check_dim(x)?;
        Ok(Point::new(self.weights.iter().zip(&x.coords).map(|(v, c)| lam.powf(*v) * c).collect()))
    }

    pub fn quasi_norm(&self, x: &Point) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.norm_of(&x.coords))
    }

    /// Quasi-norm of raw coordinates; the caller guarantees the length.
    pub fn norm_of(&self, x: &[f64]) -> f64 {
        match self.norm {
            QuasiNormKind::MaxAnisotropic => self.weights.iter().zip(x).map(|(v, c)| c.abs().powf(1.0 / v)).fold(0.0, f64::max),
            QuasiNormKind::PowerAnisotropic(two_m) => {
                let two_m = two_m as f64;
                let sum: f64 = self.weights.iter().zip(x).map(|(v, c)| c.abs().powf(two_m / v)).sum();
                sum.powf(1.0 / two_m)
            }
            QuasiNormKind::Euclidean => x.iter().map(|c| c * c).sum::<f64>().sqrt(),
        }
    }

    /// `|B(0, r)| = (|𝔖|/Q) r^Q`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
        }
        Ok(self.sphere_value()? / self.q_dim * r.powf(self.q_dim))
    }

    /// `|𝔖| = Q·|B(0,1)|`. Exact for the Euclidean norm, otherwise a hit
    /// count over `[-1, 1]ᴺ`, which encloses the unit ball of both
    /// anisotropic norms since `|x_i|^{1/v_i} ≤ |x|`.
    pub fn sphere_measure(&self, mc: &McConfig) -> Result<QuadResult> {
        if self.norm == QuasiNormKind::Euclidean {
            return Ok(QuadResult::exact(euclidean_sphere_area(self.dim() as u32)));
        }
        self.sphere_measure_mc(mc)
    }

    /// The hit-count estimate of `|𝔖|`, also for the Euclidean norm.
    pub fn sphere_measure_mc(&self, mc: &McConfig) -> Result<QuadResult> {
        if mc.samples < 10_000 {
            return Err(Error::InvalidInput(format!("sphere measure needs at least 10^4 samples, got {}", mc.samples)));
        }
        let region = vec![Interval::new(-1.0, 1.0); self.dim()];
        let ball = mc_integrate(|x| if self.norm_of(x) <= 1.0 { 1.0 } else { 0.0 }, &region, mc)?;
        Ok(ball.scaled(self.q_dim))
    }

    /// Largest `||D_λ x| − λ|x|| / (λ|x|)` over random `x ∈ [-1, 1]ᴺ` and
    /// `λ` log-uniform in `[1e-2, 1e2]`.
    pub fn scaling_residual(&self, samples: usize, seed: u64) -> Result<f64> {
        if samples == 0 {
            return Err(Error::InvalidInput("scaling check needs at least one sample".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut x = vec![0.0; self.dim()];
        for _ in 0..samples {
            x.iter_mut().for_each(|c| *c = rng.gen_range(-1.0..1.0));
            let lam = 10f64.powf(rng.gen_range(-2.0..2.0));
            let base = self.norm_of(&x);
            if base == 0.0 {
                continue;
            }
            let dilated: Vec<f64> = self.weights.iter().zip(&x).map(|(v, c)| lam.powf(*v) * c).collect();
            worst = worst.max((self.norm_of(&dilated) - lam * base).abs() / (lam * base));
        }
        Ok(worst)
    }

    /// `|𝔖| ∫_0^∞ φ(r) r^{Q−1} dr`, returned even when divergent.
    pub fn radial_integral<F>(&self, phi: F, tol: &Tolerance) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        self.radial_integral_with_breaks(phi, &[], tol)
    }

    /// [`Self::radial_integral`] for a profile with jumps or kinks at `breaks`.
    pub fn radial_integral_with_breaks<F>(&self, mut phi: F, breaks: &[f64], tol: &Tolerance) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let sphere = self.sphere_value()?;
        let q1 = self.q_dim - 1.0;
        let res = try_integrate_half_line_with_breaks(
            |r| {
                let v = phi(r)?;
                Ok(if v == 0.0 { 0.0 } else { v * r.powf(q1) })
            },
            breaks,
            tol,
        )?;
        Ok(res.scaled(sphere))
    }

    /// Integral of the radial function `x ↦ φ(|x|)` over the group.
    /// Divergence is an error carrying the partial value.
    pub fn integrate_radial<F>(&self, phi: F, tol: &Tolerance) -> Result<QuadResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let res = self.radial_integral(phi, tol)?;
        if res.is_divergent() {
            return Err(Error::Divergence { partial: res.value });
        }
        Ok(res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gamma_fn;

    #[test]
    fn scaling_residual_is_roundoff() {
        for g in [
            HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::MaxAnisotropic).unwrap(),
            HomogeneousGroup::new(vec![1.0, 1.0, 2.0], QuasiNormKind::PowerAnisotropic(4)).unwrap(),
            HomogeneousGroup::euclidean(3).unwrap(),
        ] {
            assert!(g.scaling_residual(1000, 3).unwrap() < 1e-12);
        }
    }

    #[test]
    fn forced_monte_carlo_on_the_disk() {
        let g = HomogeneousGroup::euclidean(2).unwrap();
        let mc = g.sphere_measure_mc(&McConfig::default()).unwrap();
        assert!((mc.value - 2.0 * PI).abs() <= 4.0 * mc.err_estimate, "{mc:?}");
    }
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn anisotropic(weights: &[f64]) -> HomogeneousGroup {
        HomogeneousGroup::new(weights.to_vec(), QuasiNormKind::MaxAnisotropic).unwrap().with_sphere_measure(&McConfig::default()).unwrap()
    }

    #[test]
    fn dilation_examples() {
        let iso = HomogeneousGroup::euclidean(2).unwrap();
        assert_eq!(iso.dilate(2.0, &Point::new(vec![1.0, 1.0])).unwrap().coords, vec![2.0, 2.0]);
        let g = HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::MaxAnisotropic).unwrap();
        assert_eq!(g.dilate(2.0, &Point::new(vec![1.0, 1.0])).unwrap().coords, vec![2.0, 4.0]);
        let x = Point::new(vec![0.3, -1.7]);
        assert_eq!(g.dilate(1.0, &x).unwrap(), x);
        assert!(matches!(g.dilate(2.0, &Point::new(vec![1.0])), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn norm_examples() {
        let e = HomogeneousGroup::euclidean(2).unwrap();
        assert_eq!(e.quasi_norm(&Point::new(vec![3.0, 4.0])).unwrap(), 5.0);
        let g = HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::MaxAnisotropic).unwrap();
        assert_eq!(g.quasi_norm(&Point::new(vec![0.5, 4.0])).unwrap(), 2.0);
        assert_eq!(g.quasi_norm(&Point::new(vec![1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(g.quasi_norm(&Point::new(vec![0.0, 0.0])).unwrap(), 0.0);
        let p = HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::PowerAnisotropic(4)).unwrap();
        assert_eq!(p.quasi_norm(&Point::new(vec![0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn invalid_groups() {
        assert!(HomogeneousGroup::new(vec![], QuasiNormKind::MaxAnisotropic).is_err());
        assert!(HomogeneousGroup::new(vec![1.0, 0.0], QuasiNormKind::MaxAnisotropic).is_err());
        assert!(HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::Euclidean).is_err());
        assert!(HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::PowerAnisotropic(2)).is_err());
        assert!(HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::PowerAnisotropic(3)).is_err());
        assert!(HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::PowerAnisotropic(4)).is_ok());
    }

    #[test]
    fn norm_kind_strings_round_trip() {
        for s in ["max", "euclidean", "power:4"] {
            assert_eq!(s.parse::<QuasiNormKind>().unwrap().to_string(), s);
        }
        assert!("power:x".parse::<QuasiNormKind>().is_err());
        assert!("l2".parse::<QuasiNormKind>().is_err());
    }

    #[test]
    fn euclidean_closed_forms() {
        let r3 = HomogeneousGroup::euclidean(3).unwrap();
        assert!((r3.sphere_value().unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((r3.ball_volume(2.0).unwrap() - 32.0 * PI / 3.0).abs() < 1e-13);
        let r2 = HomogeneousGroup::euclidean(2).unwrap();
        assert!((r2.ball_volume(1.0).unwrap() - PI).abs() < 1e-15);
        assert!((r2.sphere_value().unwrap() - 2.0 * PI).abs() < 1e-15);
        for n in 1..=9u32 {
            let lanczos = gamma_fn(n as f64 / 2.0).unwrap();
            assert!((gamma_half_integer(n) - lanczos).abs() <= 1e-13 * lanczos);
        }
    }

    #[test]
    fn monte_carlo_matches_euclidean_sphere() {
        for n in [2usize, 3, 5] {
            let g = HomogeneousGroup::new(vec![1.0; n], QuasiNormKind::PowerAnisotropic(2)).unwrap();
            let res = g.sphere_measure(&McConfig::default()).unwrap();
            let exact = euclidean_sphere_area(n as u32);
            assert!((res.value - exact).abs() <= 4.0 * res.err_estimate, "n = {n}: {res:?} vs {exact}");
        }
    }

    #[test]
    fn anisotropic_max_sphere_is_twelve() {
        let g = anisotropic(&[1.0, 2.0]);
        assert_eq!(g.homogeneous_dim(), 3.0);
        let s = g.sphere().unwrap();
        assert!((s.value - 12.0).abs() <= 4.0 * s.err_estimate + 1e-12);
        assert_eq!(g.ball_volume(1.0).unwrap(), 4.0);
    }

    #[test]
    fn missing_sphere_measure_is_reported() {
        let g = HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::MaxAnisotropic).unwrap();
        assert_eq!(g.ball_volume(1.0), Err(Error::MissingSphereMeasure));
        assert!(g.sphere_measure(&McConfig { samples: 100, ..McConfig::default() }).is_err());
    }

    #[test]
    fn radial_integration_examples() {
        let r3 = HomogeneousGroup::euclidean(3).unwrap();
        let ball = r3.integrate_radial(|r| Ok(if r < 1.0 { 1.0 } else { 0.0 }), &tol()).unwrap();
        assert!((ball.value - r3.ball_volume(1.0).unwrap()).abs() < 1e-10 * ball.value);

        let line = HomogeneousGroup::half_line();
        let e = line.integrate_radial(|r| Ok((-r).exp()), &tol()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);

        // ∫ f_β^p over the group is |𝔖|/(βp)
        let g = anisotropic(&[1.0, 1.0, 2.0]);
        let (beta, p, q) = (0.25, 2.0, 4.0);
        let res = g.integrate_radial(|r| Ok(if r > 1.0 { r.powf(-q / p - beta).powf(p) } else { 0.0 }), &tol()).unwrap();
        let exact = g.sphere_value().unwrap() / (beta * p);
        assert!((res.value - exact).abs() < 1e-9 * exact, "{res:?} vs {exact}");
    }

    #[test]
    fn divergent_radial_integral_is_an_error() {
        let line = HomogeneousGroup::half_line();
        assert!(matches!(line.integrate_radial(|r| Ok(1.0 / (1.0 + r)), &tol()), Err(Error::Divergence { .. })));
    }

    #[test]
    fn change_of_variables_under_dilation() {
        let g = anisotropic(&[1.0, 2.0]);
        let q = g.homogeneous_dim();
        let base = g.integrate_radial(|r| Ok((-r * r).exp()), &tol()).unwrap().value;
        for lam in [0.5, 2.0, 3.0] {
            let dilated = g.integrate_radial(|r| Ok((-(lam * r) * (lam * r)).exp()), &tol()).unwrap().value;
            assert!((dilated - lam.powf(-q) * base).abs() < 1e-9 * dilated);
        }
    }

    #[test]
    fn ball_volume_scaling_is_exact() {
        for g in [HomogeneousGroup::euclidean(3).unwrap(), anisotropic(&[1.0, 2.0]), anisotropic(&[1.0, 1.0, 2.0])] {
            let q = g.homogeneous_dim();
            for (lam, r) in [(0.3, 1.7), (2.0, 0.5), (11.0, 3.0)] {
                let a = g.ball_volume(lam * r).unwrap();
                let b = lam.powf(q) * g.ball_volume(r).unwrap();
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    fn groups() -> Vec<HomogeneousGroup> {
        vec![
            HomogeneousGroup::euclidean(3).unwrap(),
            HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::MaxAnisotropic).unwrap(),
            HomogeneousGroup::new(vec![1.0, 1.0, 2.0], QuasiNormKind::PowerAnisotropic(4)).unwrap(),
            HomogeneousGroup::new(vec![0.5, 1.5], QuasiNormKind::MaxAnisotropic).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn quasi_norm_axioms(
            which in 0usize..4,
            raw in proptest::collection::vec(-50.0f64..50.0, 3),
            lam in 0.01f64..100.0,
        ) {
            let g = &groups()[which];
            let x = Point::new(raw[..g.dim()].to_vec());
            let neg = Point::new(x.coords.iter().map(|c| -c).collect());
            let n = g.quasi_norm(&x).unwrap();
            prop_assert_eq!(g.quasi_norm(&neg).unwrap(), n);
            let dilated = g.quasi_norm(&g.dilate(lam, &x).unwrap()).unwrap();
            prop_assert!((dilated - lam * n).abs() <= 1e-12 * lam * n);
            prop_assert_eq!(n == 0.0, x.coords.iter().all(|c| *c == 0.0));
        }

        #[test]
        fn dilations_compose(a in 0.1f64..10.0, b in 0.1f64..10.0, c0 in -5.0f64..5.0, c1 in -5.0f64..5.0) {
            let g = HomogeneousGroup::new(vec![1.0, 2.0], QuasiNormKind::MaxAnisotropic).unwrap();
            let x = Point::new(vec![c0, c1]);
            let twice = g.dilate(a, &g.dilate(b, &x).unwrap()).unwrap();
            let once = g.dilate(a * b, &x).unwrap();
            for (u, v) in twice.coords.iter().zip(&once.coords) {
                prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1e-300));
            }
        }
    }
}
