//! Wynn's epsilon algorithm for accelerating the partial sums of the dyadic
//! decomposition near an algebraic endpoint singularity.

/// Deepest even-column epsilon estimate for the limit of `sums`.
///
/// The algorithm is exact for sequences whose tails are sums of geometric
/// components, which is what power-law behaviour at an endpoint produces on
/// dyadic pieces.
pub(crate) fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    match n {
        0 => return 0.0,
        1 | 2 => return sums[n - 1],
        _ => {}
    }
    let mut older: Vec<f64> = vec![0.0; n + 1];
    let mut current: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut column = 0usize;

    while current.len() > 1 {
        let m = current.len() - 1;
        let mut next = Vec::with_capacity(m);
        for j in 0..m {
            let diff = current[j + 1] - current[j];
            let scale = current[j + 1].abs().max(current[j].abs());
            if diff == 0.0 || diff.abs() <= 4.0 * f64::EPSILON * scale || !diff.is_finite() {
                // this column has converged to working precision
                return if column.is_multiple_of(2) { current[m] } else { best };
            }
            next.push(older[j + 1] + 1.0 / diff);
        }
        column += 1;
        older = current;
        current = next;
        if column.is_multiple_of(2) {
            let candidate = current[current.len() - 1];
            if candidate.is_finite() {
                best = candidate;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_limit_is_recovered() {
        // sum of r^k with r close to 1 converges slowly
        let r: f64 = 0.97;
        let mut acc = 0.0;
        let sums: Vec<f64> = (0..6)
            .map(|k| {
                acc += r.powi(k);
                acc
            })
            .collect();
        let est = wynn_epsilon(&sums);
        assert!((est - 1.0 / (1.0 - r)).abs() < 1e-9, "{est}");
    }

    #[test]
    fn two_component_tail_is_recovered() {
        let mut acc = 0.0;
        let sums: Vec<f64> = (0..9)
            .map(|k| {
                acc += 0.9f64.powi(k) + 2.0 * 0.5f64.powi(k);
                acc
            })
            .collect();
        let est = wynn_epsilon(&sums);
        let exact = 10.0 + 4.0;
        assert!((est - exact).abs() < 1e-9, "{est}");
    }

    #[test]
    fn constant_sequence_is_its_own_limit() {
        assert_eq!(wynn_epsilon(&[3.0, 3.0, 3.0, 3.0]), 3.0);
    }
}
