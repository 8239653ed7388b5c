//! Both sides of the inequalities on concrete radial test functions, the
//! equality case of the duality argument, the extremal family sweep and
//! the dilation obstruction.

mod conjugate;
mod dilation;
mod forms;
mod sharpness;

use serde::{Deserialize, Serialize};

use crate::constants::SharpConstant;
use crate::quad::{QuadResult, Tolerance};

pub use crate::radial::RadialFunction;
pub use conjugate::{conjugate_function, ConjugateFunction, GRID_MAX, GRID_MIN, GRID_NODES};
pub use dilation::{dilation_probe, DilationProbe, ProbeEntry};
pub use forms::{
    bilinear_form, bilinear_form_mc, equivalence_check, hardy_integral, hardy_lhs, lp_norm, theorem31_kernel, verify_dual, verify_hardy,
    verify_hh, verify_theorem31, EquivalenceCheck,
};
pub use sharpness::{sharpness_sweep, SharpnessSweep, SweepEntry};

/// Both sides of one inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(with = "crate::num_serde")]
    pub lhs: f64,
    /// Product of the norm factors, without the constant.
    #[serde(with = "crate::num_serde")]
    pub rhs_norms: f64,
    pub constant: SharpConstant,
    /// `lhs / (constant · rhs_norms)`.
    #[serde(with = "crate::num_serde")]
    pub ratio: f64,
    /// Allowed excess of the ratio over 1, from the attached error estimates.
    #[serde(with = "crate::num_serde")]
    pub slack: f64,
    pub holds: bool,
    /// Some input was infinite: a divergent integral or constant.
    pub divergent: bool,
    pub quad_diagnostics: Vec<QuadResult>,
}

impl VerificationReport {
    pub(crate) fn assemble(lhs: QuadResult, norms: &[QuadResult], constant: SharpConstant, tol: &Tolerance) -> Self {
        let rhs_norms: f64 = norms.iter().map(|n| n.value).product();
        let mut quad_diagnostics = vec![lhs];
        quad_diagnostics.extend_from_slice(norms);
        quad_diagnostics.extend(constant.quad);

        let divergent = lhs.is_divergent()
            || !lhs.value.is_finite()
            || norms.iter().any(|n| n.is_divergent() || !n.value.is_finite())
            || !constant.is_finite();
        let rel_errs: f64 = lhs.rel_err() + norms.iter().map(QuadResult::rel_err).sum::<f64>() + constant.rel_err();
        let slack = 10.0 * tol.rel.max(rel_errs);

        let (ratio, holds) = if divergent {
            (lhs.value / (constant.value * rhs_norms), false)
        } else if lhs.value == 0.0 {
            (0.0, true)
        } else {
            let ratio = lhs.value / (constant.value * rhs_norms);
            (ratio, ratio <= 1.0 + slack)
        };
        Self { lhs: lhs.value, rhs_norms, constant, ratio, slack, holds, divergent, quad_diagnostics }
    }
}
