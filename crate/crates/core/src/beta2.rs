//! Closed form at β = 2: four times the squared Frobenius norm of the
//! cross-covariance matrix.

use crate::error::{DcovError, Result};
use crate::estimators::{coords_of, DcovEstimate, Method, PairedSample};
use crate::population::DiscreteJoint;
use crate::sum::{pairwise_sum, Neumaier};

/// p×q matrix of coordinate covariances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCovMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl CrossCovMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn frobenius_sq(&self) -> f64 {
        pairwise_sum(&self.data.iter().map(|v| v * v).collect::<Vec<_>>())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|v| v.abs() <= tol)
    }
}

fn weighted_cross_cov(xs: &[&[f64]], ys: &[&[f64]], w: &[f64]) -> Result<CrossCovMatrix> {
    let p = xs[0].len();
    let q = ys[0].len();
    let mean = |pts: &[&[f64]], d: usize| -> Vec<f64> {
        (0..d).map(|c| pts.iter().zip(w).map(|(x, wk)| wk * x[c]).collect::<Neumaier>().sum()).collect()
    };
    let (mx, my) = (mean(xs, p), mean(ys, q));
    let mut data = Vec::with_capacity(p * q);
    for i in 0..p {
        for j in 0..q {
            let terms: Vec<f64> =
                xs.iter().zip(ys).zip(w).map(|((x, y), wk)| wk * (x[i] - mx[i]) * (y[j] - my[j])).collect();
            data.push(pairwise_sum(&terms));
        }
    }
    Ok(CrossCovMatrix { rows: p, cols: q, data })
}

/// Plug-in cross-covariance with divisor n.
pub fn cross_cov(sample: &PairedSample) -> Result<CrossCovMatrix> {
    sample.require(2)?;
    let (xs, ys) = sample.euclidean_parts()?;
    let w = vec![1.0 / sample.len() as f64; sample.len()];
    weighted_cross_cov(&xs, &ys, &w)
}

/// Exact cross-covariance of a discrete law with Euclidean parts.
pub fn cross_cov_joint(joint: &DiscreteJoint) -> Result<CrossCovMatrix> {
    let xs = coords_of(joint.x_points())?;
    let ys = coords_of(joint.y_points())?;
    weighted_cross_cov(&xs, &ys, joint.probs())
}

fn require_two(beta: f64) -> Result<()> {
    if beta == 2.0 {
        Ok(())
    } else {
        Err(DcovError::BetaOutOfRange { beta, range: "{2}" })
    }
}

/// 4‖C‖²_F for a sample whose metrics use β = 2.
pub fn dcov2_closed(sample: &PairedSample) -> Result<DcovEstimate> {
    require_two(sample.beta())?;
    let c = cross_cov(sample)?;
    Ok(DcovEstimate::new(4.0 * c.frobenius_sq(), Method::Beta2, 2.0, sample.len()))
}

/// 4‖C‖²_F for a discrete law.
pub fn dcov2_closed_joint(joint: &DiscreteJoint) -> Result<DcovEstimate> {
    require_two(joint.beta()?)?;
    let c = cross_cov_joint(joint)?;
    Ok(DcovEstimate::new(4.0 * c.frobenius_sq(), Method::Beta2, 2.0, joint.len()))
}

/// Values for the uncorrelated-but-dependent example: X uniform on
/// {−1, 0, 1} and Y = X².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncorrelatedDemo {
    /// Closed form at β = 2 (zero: no linear dependence).
    pub dc2: f64,
    /// Exact value at β = 1 (positive: X and Y are dependent).
    pub dc1: f64,
}

pub fn uncorrelated_demo() -> Result<UncorrelatedDemo> {
    use crate::metric::{MetricSpec, Point};
    use crate::population::{dcov_exact, ExactMethod};
    let atoms: Vec<_> = [-1.0f64, 0.0, 1.0].iter().map(|&x| (Point::scalar(x), Point::scalar(x * x))).collect();
    let s2 = MetricSpec::euclidean(1, 2.0)?;
    let j2 = DiscreteJoint::uniform(atoms, s2.clone(), s2)?;
    let j1 = j2.with_beta(1.0)?;
    Ok(UncorrelatedDemo {
        dc2: dcov2_closed_joint(&j2)?.value,
        dc1: dcov_exact(&j1, ExactMethod::D3)?.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::dcov_centered;

    #[test]
    fn cross_cov_examples() {
        let s = PairedSample::scalar(&[0.0, 1.0], &[0.0, 2.0], 2.0).unwrap();
        assert_eq!(cross_cov(&s).unwrap().data, vec![0.5]);
        let c = PairedSample::scalar(&[0.0, 1.0, 3.0], &[4.0; 3], 2.0).unwrap();
        assert!(cross_cov(&c).unwrap().is_zero(0.0));
        let x = [1.0, 2.0, 4.0];
        let v = PairedSample::scalar(&x, &x, 2.0).unwrap();
        let var = {
            let m = 7.0 / 3.0;
            x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / 3.0
        };
        assert!((cross_cov(&v).unwrap().get(0, 0) - var).abs() < 1e-15);
    }

    #[test]
    fn symmetric_two_atom_law() {
        use crate::metric::{MetricSpec, Point};
        let s = MetricSpec::euclidean(1, 2.0).unwrap();
        let atoms = vec![(Point::scalar(-1.0), Point::scalar(-1.0)), (Point::scalar(1.0), Point::scalar(1.0))];
        let j = DiscreteJoint::uniform(atoms, s.clone(), s).unwrap();
        assert!((dcov2_closed_joint(&j).unwrap().value - 4.0).abs() < 1e-15);
    }

    #[test]
    fn matches_centered() {
        let x = vec![vec![0.1, 2.0], vec![1.5, -0.3], vec![0.7, 0.7], vec![-2.0, 1.1]];
        let y = vec![vec![1.0], vec![0.0], vec![2.5], vec![-0.5]];
        let s = PairedSample::euclidean(x, y, 2.0).unwrap();
        let a = dcov2_closed(&s).unwrap().value;
        let b = dcov_centered(&s).unwrap().value;
        assert!((a - b).abs() < 1e-12, "{a} {b}");
    }

    #[test]
    fn non_characterization() {
        let d = uncorrelated_demo().unwrap();
        assert!(d.dc2.abs() <= 1e-12);
        assert!(d.dc1 > 0.01);
    }

    #[test]
    fn wrong_beta_rejected() {
        let s = PairedSample::scalar(&[0.0, 1.0], &[0.0, 2.0], 1.0).unwrap();
        assert!(matches!(dcov2_closed(&s), Err(DcovError::BetaOutOfRange { .. })));
    }
}
