use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::Serialize;

use super::median;
use crate::error::{DcovError, Result};
use crate::estimators::{dcov_centered, PairedSample};
use crate::par;
use crate::population::{dcov_exact, DiscreteJoint, ExactMethod};
use crate::rng::stream_rng;

/// How each simulated sample is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Count draws per atom and evaluate the exact value of the resulting
    /// empirical law. Identical to the plug-in estimator on the raw draws,
    /// at O(k²) cost independent of n.
    Compressed,
    /// Materialize the n draws and run the O(n²) centered estimator.
    Centered,
}

/// One sample size of a sweep, aggregated over seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub median_estimate: f64,
    pub median_abs_error: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyTrace {
    pub population: f64,
    pub seeds: Vec<u64>,
    pub rows: Vec<TraceRow>,
}

/// Draws n iid atoms from `joint` for each n in the schedule and seed,
/// evaluates the plug-in value, and records errors against the exact
/// population value. The draw for (seed, schedule index i) uses stream i
/// of that seed.
pub fn consistency_sweep(
    joint: &DiscreteJoint,
    schedule: &[usize],
    seeds: &[u64],
    mode: SweepMode,
) -> Result<ConsistencyTrace> {
    if schedule.is_empty() {
        return Err(DcovError::InvalidParameter("empty sample-size schedule".into()));
    }
    if seeds.is_empty() {
        return Err(DcovError::InvalidParameter("no seeds given".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DcovError::InvalidParameter("schedule must be strictly increasing".into()));
    }
    if schedule[0] < 2 {
        return Err(DcovError::TooFewObservations { need: 2, got: schedule[0] });
    }
    let population = dcov_exact(joint, ExactMethod::D3)?.value;
    let sampler = WeightedIndex::new(joint.probs())
        .map_err(|e| DcovError::InvalidProbabilities(e.to_string()))?;
    let atoms: Vec<_> = joint.x_points().iter().cloned().zip(joint.y_points().iter().cloned()).collect();

    let jobs: Vec<(usize, u64)> =
        (0..schedule.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let estimates = par::map_range(jobs.len(), |job| -> Result<f64> {
        let (i, seed) = jobs[job];
        let n = schedule[i];
        let mut rng = stream_rng(seed, i as u64);
        match mode {
            SweepMode::Compressed => {
                let mut counts = vec![0u64; atoms.len()];
                for _ in 0..n {
                    counts[sampler.sample(&mut rng)] += 1;
                }
                let emp = DiscreteJoint::from_counts(&atoms, &counts, joint.x_spec().clone(), joint.y_spec().clone())?;
                Ok(dcov_exact(&emp, ExactMethod::D3)?.value)
            }
            SweepMode::Centered => {
                let (x, y): (Vec<_>, Vec<_>) = (0..n).map(|_| atoms[sampler.sample(&mut rng)].clone()).unzip();
                let s = PairedSample::new(x, y, joint.x_spec().clone(), joint.y_spec().clone())?;
                Ok(dcov_centered(&s)?.value)
            }
        }
    });
    let estimates: Vec<f64> = estimates.into_iter().collect::<Result<_>>()?;

    let rows = schedule
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let est = &estimates[i * seeds.len()..(i + 1) * seeds.len()];
            let errs: Vec<f64> = est.iter().map(|e| (e - population).abs()).collect();
            TraceRow {
                n,
                median_estimate: median(est),
                median_abs_error: median(&errs),
                max_abs_error: errs.iter().copied().fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(ConsistencyTrace { population, seeds: seeds.to_vec(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{MetricSpec, Point};

    fn bernoulli() -> DiscreteJoint {
        let s = MetricSpec::euclidean(1, 1.0).unwrap();
        let atoms = vec![(Point::scalar(0.0), Point::scalar(0.0)), (Point::scalar(1.0), Point::scalar(1.0))];
        DiscreteJoint::uniform(atoms, s.clone(), s).unwrap()
    }

    #[test]
    fn degenerate_joint_has_zero_error() {
        let s = MetricSpec::euclidean(1, 1.0).unwrap();
        let j = DiscreteJoint::uniform(vec![(Point::scalar(3.0), Point::scalar(1.0))], s.clone(), s).unwrap();
        let t = consistency_sweep(&j, &[5, 50], &[1, 2, 3], SweepMode::Compressed).unwrap();
        assert!(t.rows.iter().all(|r| r.max_abs_error == 0.0));
    }

    #[test]
    fn modes_agree() {
        let j = bernoulli();
        let a = consistency_sweep(&j, &[20, 60], &[4, 5], SweepMode::Compressed).unwrap();
        let b = consistency_sweep(&j, &[20, 60], &[4, 5], SweepMode::Centered).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert!((ra.median_estimate - rb.median_estimate).abs() < 1e-12);
        }
    }

    #[test]
    fn errors_shrink() {
        let t = consistency_sweep(&bernoulli(), &[100, 10_000], &[1, 2, 3, 4, 5], SweepMode::Compressed).unwrap();
        assert_eq!(t.population, 0.25);
        assert!(t.rows[1].median_abs_error < t.rows[0].median_abs_error);
    }

    #[test]
    fn argument_checks() {
        let j = bernoulli();
        assert!(consistency_sweep(&j, &[], &[1], SweepMode::Compressed).is_err());
        assert!(consistency_sweep(&j, &[10, 10], &[1], SweepMode::Compressed).is_err());
        assert!(consistency_sweep(&j, &[10], &[], SweepMode::Compressed).is_err());
    }
}
