//! Exact distance covariance of finite discrete laws by brute-force
//! enumeration over independent copies.

use crate::error::{DcovError, Result};
use crate::estimators::{DcovEstimate, Method, PairedSample};
use crate::metric::{DistanceMatrix, MetricSpec, Point};
use crate::par;
use crate::sum::{pairwise_sum, Neumaier};

/// Default support cap for the O(k⁴) quadruple sum.
pub const D2_SUPPORT_CAP: usize = 64;

const PROB_TOL: f64 = 1e-12;

/// A finite-support law on one side.
#[derive(Debug, Clone)]
pub struct Marginal {
    pub points: Vec<Point>,
    pub probs: Vec<f64>,
    pub spec: MetricSpec,
}

impl Marginal {
    pub fn new(points: Vec<Point>, probs: Vec<f64>, spec: MetricSpec) -> Result<Self> {
        if points.is_empty() {
            return Err(DcovError::InvalidProbabilities("marginal has no atoms".into()));
        }
        if points.len() != probs.len() {
            return Err(DcovError::LengthMismatch { x: points.len(), y: probs.len() });
        }
        check_probs(&probs)?;
        spec.check_points(&points)?;
        Ok(Self { points, probs, spec })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// E d(x, X)^β.
    pub fn mean_dist_from(&self, x: &Point) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(p, w)| w * self.spec.dist_beta(x, p))
            .collect::<Neumaier>()
            .sum()
    }

    /// E d(X, X')^β for independent copies.
    pub fn mean_pair_dist(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(p, w)| w * self.mean_dist_from(p))
            .collect::<Neumaier>()
            .sum()
    }
}

/// A joint law with finitely many atoms (x_k, y_k) and weights p_k.
#[derive(Debug, Clone)]
pub struct DiscreteJoint {
    x: Vec<Point>,
    y: Vec<Point>,
    probs: Vec<f64>,
    x_spec: MetricSpec,
    y_spec: MetricSpec,
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(DcovError::InvalidProbabilities(format!("weight {p} is not positive")));
    }
    let total: f64 = pairwise_sum(probs);
    if (total - 1.0).abs() > PROB_TOL {
        return Err(DcovError::InvalidProbabilities(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

impl DiscreteJoint {
    pub fn new(
        atoms: Vec<(Point, Point)>,
        probs: Vec<f64>,
        x_spec: MetricSpec,
        y_spec: MetricSpec,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(DcovError::InvalidProbabilities("joint has no atoms".into()));
        }
        if atoms.len() != probs.len() {
            return Err(DcovError::LengthMismatch { x: atoms.len(), y: probs.len() });
        }
        check_probs(&probs)?;
        let (x, y): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
        x_spec.check_points(&x)?;
        y_spec.check_points(&y)?;
        Ok(Self { x, y, probs, x_spec, y_spec })
    }

    /// Uniform law on the given atoms (duplicates allowed).
    pub fn uniform(atoms: Vec<(Point, Point)>, x_spec: MetricSpec, y_spec: MetricSpec) -> Result<Self> {
        let k = atoms.len();
        Self::new(atoms, vec![1.0 / k as f64; k], x_spec, y_spec)
    }

    /// Atoms weighted by nonnegative counts; zero counts are dropped.
    pub fn from_counts(
        atoms: &[(Point, Point)],
        counts: &[u64],
        x_spec: MetricSpec,
        y_spec: MetricSpec,
    ) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(DcovError::InvalidProbabilities("all counts are zero".into()));
        }
        let (kept, probs): (Vec<_>, Vec<_>) = atoms
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| (a.clone(), c as f64 / total as f64))
            .unzip();
        Self::new(kept, probs, x_spec, y_spec)
    }

    /// The empirical measure of a sample: each row weighted 1/n.
    pub fn empirical(sample: &PairedSample) -> Result<Self> {
        let atoms = sample.x_points().iter().cloned().zip(sample.y_points().iter().cloned()).collect();
        Self::uniform(atoms, sample.x_spec().clone(), sample.y_spec().clone())
    }

    /// The product of the two marginals (an independent coupling).
    pub fn product_of_marginals(&self) -> Result<Self> {
        let k = self.len();
        let mut atoms = Vec::with_capacity(k * k);
        let mut probs = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                atoms.push((self.x[i].clone(), self.y[j].clone()));
                probs.push(self.probs[i] * self.probs[j]);
            }
        }
        let s: f64 = pairwise_sum(&probs);
        probs.iter_mut().for_each(|p| *p /= s);
        Self::new(atoms, probs, self.x_spec.clone(), self.y_spec.clone())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn x_points(&self) -> &[Point] {
        &self.x
    }

    pub fn y_points(&self) -> &[Point] {
        &self.y
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn x_spec(&self) -> &MetricSpec {
        &self.x_spec
    }

    pub fn y_spec(&self) -> &MetricSpec {
        &self.y_spec
    }

    pub fn x_marginal(&self) -> Marginal {
        Marginal { points: self.x.clone(), probs: self.probs.clone(), spec: self.x_spec.clone() }
    }

    pub fn y_marginal(&self) -> Marginal {
        Marginal { points: self.y.clone(), probs: self.probs.clone(), spec: self.y_spec.clone() }
    }

    /// Shared exponent of both sides.
    pub fn beta(&self) -> Result<f64> {
        common_beta(&self.x_spec, &self.y_spec)
    }

    /// The same law with both metrics raised to a different exponent.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Ok(Self {
            x_spec: self.x_spec.with_beta(beta)?,
            y_spec: self.y_spec.with_beta(beta)?,
            ..self.clone()
        })
    }

    pub(crate) fn atom_distances(&self) -> (DistanceMatrix, DistanceMatrix) {
        let a = DistanceMatrix::from_fn(self.len(), |i, j| self.x_spec.dist_beta(&self.x[i], &self.x[j]));
        let b = DistanceMatrix::from_fn(self.len(), |i, j| self.y_spec.dist_beta(&self.y[i], &self.y[j]));
        (a, b)
    }
}

pub(crate) fn common_beta(x: &MetricSpec, y: &MetricSpec) -> Result<f64> {
    if x.beta != y.beta {
        return Err(DcovError::BetaMismatch { x: x.beta, y: y.beta });
    }
    Ok(x.beta)
}

/// Alternating four-point sum d₁₂ − d₂₃ + d₃₄ − d₄₁ with exponent β.
pub fn hhat_eval(x1: &Point, x2: &Point, x3: &Point, x4: &Point, spec: &MetricSpec) -> Result<f64> {
    for p in [x1, x2, x3, x4] {
        spec.check_point(p)?;
    }
    let d = |a, b| spec.dist_beta(a, b);
    Ok(d(x1, x2) - d(x2, x3) + d(x3, x4) - d(x4, x1))
}

/// Centered kernel d(x₁,x₂)^β − E d(x₁,X)^β − E d(x₂,X)^β + E d(X,X')^β.
pub fn ttilde_eval(x1: &Point, x2: &Point, marginal: &Marginal) -> Result<f64> {
    if marginal.is_empty() {
        return Err(DcovError::InvalidProbabilities("marginal has no atoms".into()));
    }
    marginal.spec.check_point(x1)?;
    marginal.spec.check_point(x2)?;
    Ok(marginal.spec.dist_beta(x1, x2) - marginal.mean_dist_from(x1) - marginal.mean_dist_from(x2)
        + marginal.mean_pair_dist())
}

/// Which definition to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMethod {
    /// Pairwise moment form, O(k³).
    D1,
    /// Quarter of the product of alternating four-point sums, O(k⁴).
    D2,
    /// Product of centered kernels, O(k²).
    D3,
}

impl ExactMethod {
    fn tag(self) -> Method {
        match self {
            ExactMethod::D1 => Method::ExactD1,
            ExactMethod::D2 => Method::ExactD2,
            ExactMethod::D3 => Method::ExactD3,
        }
    }
}

pub fn dcov_exact(joint: &DiscreteJoint, method: ExactMethod) -> Result<DcovEstimate> {
    dcov_exact_capped(joint, method, D2_SUPPORT_CAP)
}

/// As [`dcov_exact`] with an explicit support cap for the quadruple sum.
pub fn dcov_exact_capped(joint: &DiscreteJoint, method: ExactMethod, d2_cap: usize) -> Result<DcovEstimate> {
    let beta = joint.beta()?;
    let k = joint.len();
    if method == ExactMethod::D2 && k > d2_cap {
        return Err(DcovError::SupportTooLarge { size: k, cap: d2_cap });
    }
    let (a, b) = joint.atom_distances();
    let p = joint.probs();
    let value = match method {
        ExactMethod::D1 => exact_d1(&a, &b, p),
        ExactMethod::D2 => exact_d2(&a, &b, p),
        ExactMethod::D3 => exact_d3(&a, &b, p),
    };
    Ok(DcovEstimate::new(value, method.tag(), beta, k))
}

fn exact_d1(a: &DistanceMatrix, b: &DistanceMatrix, p: &[f64]) -> f64 {
    let k = p.len();
    // per-outer-atom partial sums of E[a12 b12], E a12, E b12, E[a12 b13]
    let parts = par::map_range(k, |i| {
        let (mut ab, mut ea, mut eb, mut cross) =
            (Neumaier::default(), Neumaier::default(), Neumaier::default(), Neumaier::default());
        for j in 0..k {
            let w = p[i] * p[j];
            ab.add(w * a.get(i, j) * b.get(i, j));
            ea.add(w * a.get(i, j));
            eb.add(w * b.get(i, j));
            for l in 0..k {
                cross.add(w * p[l] * a.get(i, j) * b.get(i, l));
            }
        }
        [ab.sum(), ea.sum(), eb.sum(), cross.sum()]
    });
    let total = |c: usize| pairwise_sum(&parts.iter().map(|r| r[c]).collect::<Vec<_>>());
    total(0) + total(1) * total(2) - 2.0 * total(3)
}

fn exact_d2(a: &DistanceMatrix, b: &DistanceMatrix, p: &[f64]) -> f64 {
    let k = p.len();
    let parts = par::map_range(k, |i| {
        let mut acc = Neumaier::default();
        for j in 0..k {
            for l in 0..k {
                let w3 = p[i] * p[j] * p[l];
                for m in 0..k {
                    let hx = a.get(i, j) - a.get(j, l) + a.get(l, m) - a.get(m, i);
                    let hy = b.get(i, j) - b.get(j, l) + b.get(l, m) - b.get(m, i);
                    acc.add(w3 * p[m] * hx * hy);
                }
            }
        }
        acc.sum()
    });
    0.25 * pairwise_sum(&parts)
}

/// t̃ matrix of a discrete law with weights p and β-distance matrix a.
pub(crate) fn centered_kernel(a: &DistanceMatrix, p: &[f64]) -> Vec<f64> {
    let k = p.len();
    let m: Vec<f64> = (0..k)
        .map(|i| a.row(i).iter().zip(p).map(|(d, w)| d * w).collect::<Neumaier>().sum())
        .collect();
    let grand: f64 = m.iter().zip(p).map(|(v, w)| v * w).collect::<Neumaier>().sum();
    let rows = par::map_range(k, |i| (0..k).map(|j| a.get(i, j) - m[i] - m[j] + grand).collect::<Vec<_>>());
    rows.concat()
}

fn exact_d3(a: &DistanceMatrix, b: &DistanceMatrix, p: &[f64]) -> f64 {
    let k = p.len();
    let ta = centered_kernel(a, p);
    let tb = centered_kernel(b, p);
    let parts = par::map_range(k, |i| {
        (0..k).map(|j| p[i] * p[j] * ta[i * k + j] * tb[i * k + j]).collect::<Neumaier>().sum()
    });
    pairwise_sum(&parts)
}

/// Exact values for the projection example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionDemo {
    pub dc_full: f64,
    pub dc_projected: f64,
}

/// X = (U, V), Y = (U, W) with U, V, W iid Bernoulli(1/2) on the plane,
/// against the first-coordinate projection (U, U). Projecting increases
/// the distance covariance.
pub fn projection_demo(beta: f64) -> Result<ProjectionDemo> {
    let mut atoms = Vec::with_capacity(8);
    for bits in 0..8u32 {
        let (u, v, w) = ((bits & 1) as f64, ((bits >> 1) & 1) as f64, ((bits >> 2) & 1) as f64);
        atoms.push((Point::Coords(vec![u, v]), Point::Coords(vec![u, w])));
    }
    let plane = MetricSpec::euclidean(2, beta)?;
    let full = DiscreteJoint::uniform(atoms.clone(), plane.clone(), plane)?;
    let line = MetricSpec::euclidean(1, beta)?;
    let proj_atoms = atoms
        .iter()
        .map(|(x, y)| (Point::scalar(x.coords().unwrap()[0]), Point::scalar(y.coords().unwrap()[0])))
        .collect();
    let projected = DiscreteJoint::uniform(proj_atoms, line.clone(), line)?;
    Ok(ProjectionDemo {
        dc_full: dcov_exact(&full, ExactMethod::D3)?.value,
        dc_projected: dcov_exact(&projected, ExactMethod::D3)?.value,
    })
}
