use rand::Rng;

use crate::error::{DcovError, Result};
use crate::metric::{norms_to_base, MetricSpec, Point};
use crate::rng::stream_rng;

/// U-statistic (2/(n(n−1))) Σ_{i<j} min(‖x_i‖, ‖x_j‖)^{2β}, the empirical
/// counterpart of ∫ P(‖X‖ > x)² x^{2β−1} dx (up to the factor 2β).
///
/// Heuristic: growth of this quantity with n suggests that the population
/// value is infinite. Computed in O(n log n) by sorting.
pub fn tail_diagnostic(points: &[Point], spec: &MetricSpec) -> Result<f64> {
    let norms = norms_to_base(points, spec)?;
    // min(a, b)^{2β} = min(a^β, b^β)²
    tail_diagnostic_norms(&norms.iter().map(|v| v * v).collect::<Vec<_>>())
}

/// Same statistic from precomputed values v_i = ‖x_i‖^{2β}.
pub fn tail_diagnostic_norms(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(DcovError::TooFewObservations { need: 2, got: n });
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    // the i-th smallest is the minimum of exactly n−1−i pairs
    let mut acc = crate::sum::Neumaier::default();
    for (i, x) in v.iter().enumerate() {
        acc.add(x * (n - 1 - i) as f64);
    }
    Ok(2.0 * acc.sum() / (n as f64 * (n as f64 - 1.0)))
}

/// Nonnegative heavy-tailed draws with P(X > x) = x^{-β} for x ≥ 2 and an
/// atom at 0 carrying the remaining mass 1 − 2^{-β}. For this law the
/// statistic above has an infinite population value.
pub fn pareto_with_atom(n: usize, beta: f64, seed: u64) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(DcovError::BetaOutOfRange { beta, range: "(0, ∞)" });
    }
    let mut rng = stream_rng(seed, 0);
    Ok((0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            let x = u.powf(-1.0 / beta);
            if x >= 2.0 { x } else { 0.0 }
        })
        .collect())
}
