use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{DcovError, Result};
use crate::estimators::{double_center, PairedSample, SampleMatrices};
use crate::par;
use crate::rng::stream_rng;
use crate::sum::{pairwise_sum, Neumaier};

/// Outcome of a permutation independence test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermTestResult {
    /// Double-centered statistic on the original pairing.
    pub observed: f64,
    /// (1 + #{permuted ≥ observed}) / (B + 1).
    pub p_value: f64,
    /// Number of permutations.
    pub permutations: usize,
    /// Permuted statistics at or above the observed one.
    pub exceed: usize,
    pub seed: u64,
}

fn paired_mean(a: &[f64], b: &[f64], n: usize, perm: Option<&[usize]>) -> f64 {
    let rows: Vec<f64> = (0..n)
        .map(|i| {
            let ra = &a[i * n..(i + 1) * n];
            match perm {
                None => ra.iter().zip(&b[i * n..(i + 1) * n]).map(|(x, y)| x * y).collect::<Neumaier>().sum(),
                Some(p) => {
                    let rb = &b[p[i] * n..(p[i] + 1) * n];
                    ra.iter().zip(p).map(|(x, &j)| x * rb[j]).collect::<Neumaier>().sum()
                }
            }
        })
        .collect();
    pairwise_sum(&rows) / (n as f64 * n as f64)
}

/// Permutes the y rows `permutations` times. Both distance matrices are
/// centered once; each replicate only re-indexes the centered y matrix.
/// Replicate r draws its permutation from stream r of `seed`.
pub fn perm_test(sample: &PairedSample, permutations: usize, seed: u64) -> Result<PermTestResult> {
    sample.require(4)?;
    if permutations < 19 {
        return Err(DcovError::InvalidParameter(format!(
            "need at least 19 permutations, got {permutations}"
        )));
    }
    let m = SampleMatrices::new(sample)?;
    let n = m.n();
    let a = double_center(&m.a);
    let b = double_center(&m.b);
    let observed = paired_mean(&a, &b, n, None);
    let stats = par::map_range(permutations, |r| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut stream_rng(seed, r as u64));
        paired_mean(&a, &b, n, Some(&idx))
    });
    // ties within rounding count as exceedances
    let scale = (a.iter().map(|v| v * v).sum::<f64>() * b.iter().map(|v| v * v).sum::<f64>()).sqrt()
        / (n as f64 * n as f64);
    let tol = 1e-12 * (observed.abs() + scale);
    let exceed = stats.iter().filter(|&&s| s >= observed - tol).count();
    Ok(PermTestResult {
        observed,
        p_value: (1 + exceed) as f64 / (permutations + 1) as f64,
        permutations,
        exceed,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::dcov_centered;

    #[test]
    fn constant_y_gives_one() {
        let x: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let s = PairedSample::scalar(&x, &[2.0; 12], 1.0).unwrap();
        let r = perm_test(&s, 49, 3).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.observed, 0.0);
    }

    #[test]
    fn observed_matches_centered_estimator() {
        let x: Vec<f64> = (0..15).map(|i| (i as f64 * 0.7).cos()).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let s = PairedSample::scalar(&x, &y, 1.0).unwrap();
        let r = perm_test(&s, 19, 0).unwrap();
        let c = dcov_centered(&s).unwrap().value;
        assert!((r.observed - c).abs() < 1e-12 * c.abs());
    }

    #[test]
    fn strong_dependence_rejects() {
        let x: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let s = PairedSample::scalar(&x, &x, 1.0).unwrap();
        let r = perm_test(&s, 99, 11).unwrap();
        assert_eq!(r.p_value, 0.01);
    }

    #[test]
    fn argument_checks() {
        let s = PairedSample::scalar(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 1.0).unwrap();
        assert!(perm_test(&s, 99, 0).is_err());
        let s = PairedSample::scalar(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0], 1.0).unwrap();
        assert!(perm_test(&s, 18, 0).is_err());
    }
}
