//! Gaussian-projection (characteristic random variable) estimator and the
//! truncated-kernel regularization.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::gamma;

use crate::charfn::{transform_matrix_complex, weighted_center, weighted_pairing_complex};
use crate::error::{DcovError, Result};
use crate::estimators::{coords_of, plugin_d1_value, DcovEstimate, Method, PairedSample};
use crate::metric::{sq_dist, DistanceMatrix, Point};
use crate::par;
use crate::population::DiscreteJoint;
use crate::quad::{HalfLineRule, QuadConfig};
use crate::rng::stream_rng;
use crate::sum::{pairwise_sum, Neumaier};

/// Constant β 2^{β/2} / Γ(1 − β/2) of the projection definition.
pub fn cb_const(beta: f64) -> Result<f64> {
    check_open_beta(beta)?;
    Ok(beta * 2f64.powf(beta / 2.0) / gamma(1.0 - beta / 2.0))
}

fn check_open_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 2.0 {
        Ok(())
    } else {
        Err(DcovError::BetaOutOfRange { beta, range: "(0, 2)" })
    }
}

/// Source of iid standard Gaussian direction pairs (ξ, η). Draw k comes
/// from its own random stream, so draws can be generated in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianProjector {
    pub seed: u64,
    pub dim_x: usize,
    pub dim_y: usize,
    pub draws: usize,
}

impl GaussianProjector {
    pub fn new(seed: u64, dim_x: usize, dim_y: usize, draws: usize) -> Result<Self> {
        if draws == 0 {
            return Err(DcovError::InvalidParameter("need at least one draw".into()));
        }
        Ok(Self { seed, dim_x, dim_y, draws })
    }

    pub fn draw(&self, index: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rng = stream_rng(self.seed, index as u64);
        let xi = (0..self.dim_x).map(|_| rng.sample(StandardNormal)).collect();
        let eta = (0..self.dim_y).map(|_| rng.sample(StandardNormal)).collect();
        (xi, eta)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// E(e^{i r ξ·X} | ξ) for a discrete law: Σ_k w_k exp(i r ξ·x_k).
pub fn char_rv(points: &[Point], weights: &[f64], xi: &[f64], r: f64) -> Result<Complex64> {
    if points.len() != weights.len() {
        return Err(DcovError::LengthMismatch { x: points.len(), y: weights.len() });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, w) in points.iter().zip(weights) {
        let c = p.coords().ok_or(DcovError::NotEuclidean)?;
        if c.len() != xi.len() {
            return Err(DcovError::DimensionMismatch { expected: xi.len(), got: c.len() });
        }
        acc += Complex64::from_polar(*w, r * dot(c, xi));
    }
    Ok(acc)
}

/// Settings for the Monte Carlo estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRvConfig {
    pub draws: usize,
    pub seed: u64,
    pub quad: QuadConfig,
}

/// Projected law (ξ·X, η·Y) with identical atoms merged.
fn projected_atoms(xs: &[&[f64]], ys: &[&[f64]], w: &[f64], xi: &[f64], eta: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut atoms: Vec<(f64, f64, f64)> = xs.iter().zip(ys).zip(w).map(|((x, y), w)| (dot(x, xi), dot(y, eta), *w)).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (mut s, mut v, mut p) = (Vec::new(), Vec::new(), Vec::<f64>::new());
    for (a, b, w) in atoms {
        if s.last() == Some(&a) && v.last() == Some(&b) {
            *p.last_mut().unwrap() += w;
        } else {
            s.push(a);
            v.push(b);
            p.push(w);
        }
    }
    (s, v, p)
}

/// ∬_{r,s>0} |Cov(e^{irS}, e^{isV})|² dr ds / (rs)^{1+β} for a scalar law.
fn quadrant_integral(rule: &HalfLineRule, s: &[f64], v: &[f64], p: &[f64]) -> f64 {
    let lo_hi = |z: &[f64]| {
        let lo = z.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let (rs, rv) = (lo_hi(s), lo_hi(v));
    if rs == 0.0 || rv == 0.0 {
        return 0.0;
    }
    let beta = rule.beta;
    let s: Vec<f64> = s.iter().map(|z| z / rs).collect();
    let v: Vec<f64> = v.iter().map(|z| z / rv).collect();
    let fs = transform_matrix_complex(&s, |d| rule.eval(d));
    let fv = transform_matrix_complex(&v, |d| rule.eval(d));
    rs.powf(beta) * rv.powf(beta) * weighted_pairing_complex(&fs, &weighted_center(&fv, p), p)
}

fn charrv_core(
    xs: &[&[f64]],
    ys: &[&[f64]],
    w: &[f64],
    beta: f64,
    cfg: &CharRvConfig,
) -> Result<(f64, f64, usize)> {
    check_open_beta(beta)?;
    if cfg.draws < 2 {
        return Err(DcovError::InvalidParameter("need at least 2 draws for a standard error".into()));
    }
    let cb = cb_const(beta)?;
    let rule = HalfLineRule::new(&cfg.quad, beta)?;
    let proj = GaussianProjector::new(cfg.seed, xs[0].len(), ys[0].len(), cfg.draws)?;
    // draws are mapped in parallel but reduced in draw order
    let per_draw = par::map_range(cfg.draws, |k| {
        let (xi, eta) = proj.draw(k);
        let (s, v, p) = projected_atoms(xs, ys, w, &xi, &eta);
        cb * cb * quadrant_integral(&rule, &s, &v, &p)
    });
    let k = per_draw.len() as f64;
    let mean = pairwise_sum(&per_draw) / k;
    let var = per_draw.iter().map(|v| (v - mean) * (v - mean)).collect::<Neumaier>().sum() / (k - 1.0);
    Ok((mean, (var / k).sqrt(), rule.len()))
}

/// Monte Carlo estimate over Gaussian projection draws; the conditional
/// covariance for each draw is exact over the empirical law.
pub fn dcov_charrv_mc(sample: &PairedSample, cfg: &CharRvConfig) -> Result<DcovEstimate> {
    sample.require(2)?;
    let beta = sample.beta();
    check_open_beta(beta)?;
    let (xs, ys) = sample.euclidean_parts()?;
    let w = vec![1.0 / sample.len() as f64; sample.len()];
    let (mean, se, nodes) = charrv_core(&xs, &ys, &w, beta, cfg)?;
    Ok(DcovEstimate::new(mean, Method::Charrv, beta, sample.len())
        .with_stderr(se)
        .with_aux("draws", cfg.draws as f64)
        .with_aux("quad_nodes", nodes as f64))
}

/// As [`dcov_charrv_mc`] for a discrete joint law.
pub fn dcov_charrv_mc_joint(joint: &DiscreteJoint, cfg: &CharRvConfig) -> Result<DcovEstimate> {
    let beta = joint.beta()?;
    check_open_beta(beta)?;
    let xs = coords_of(joint.x_points())?;
    let ys = coords_of(joint.y_points())?;
    let (mean, se, nodes) = charrv_core(&xs, &ys, joint.probs(), beta, cfg)?;
    Ok(DcovEstimate::new(mean, Method::Charrv, beta, joint.len())
        .with_stderr(se)
        .with_aux("draws", cfg.draws as f64)
        .with_aux("quad_nodes", nodes as f64))
}

/// E |Φ_{(rX,sY)}(ξ,η) − Φ_{rX}(ξ)Φ_{sY}(η)|² averaged over `draws`
/// Gaussian pairs. Returns (mean, standard error).
pub fn cov_moment_mc(joint: &DiscreteJoint, r: f64, s: f64, draws: usize, seed: u64) -> Result<(f64, f64)> {
    let xs = coords_of(joint.x_points())?;
    let ys = coords_of(joint.y_points())?;
    let p = joint.probs();
    if draws < 2 {
        return Err(DcovError::InvalidParameter("need at least 2 draws".into()));
    }
    let proj = GaussianProjector::new(seed, xs[0].len(), ys[0].len(), draws)?;
    let vals = par::map_range(draws, |k| {
        let (xi, eta) = proj.draw(k);
        let mut joint_cf = Complex64::new(0.0, 0.0);
        let mut cf_x = Complex64::new(0.0, 0.0);
        let mut cf_y = Complex64::new(0.0, 0.0);
        for ((x, y), w) in xs.iter().zip(&ys).zip(p) {
            let (a, b) = (r * dot(x, &xi), s * dot(y, &eta));
            joint_cf += Complex64::from_polar(*w, a + b);
            cf_x += Complex64::from_polar(*w, a);
            cf_y += Complex64::from_polar(*w, b);
        }
        (joint_cf - cf_x * cf_y).norm_sqr()
    });
    let n = draws as f64;
    let mean = pairwise_sum(&vals) / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).collect::<Neumaier>().sum() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Closed-form Gaussian average of the same quantity: with iid copies
/// (X_i, Y_i),
/// E e^{−a‖X₁−X₃‖² − b‖Y₁−Y₃‖²} − E e^{−a‖X₁−X₃‖² − b‖Y₁−Y₄‖²}
/// − E e^{−a‖X₁−X₃‖² − b‖Y₂−Y₃‖²} + E e^{−a‖X₁−X₃‖² − b‖Y₂−Y₄‖²},
/// where a = r²/2 and b = s²/2. O(k³).
pub fn cov_moment_exact(joint: &DiscreteJoint, r: f64, s: f64) -> Result<f64> {
    let xs = coords_of(joint.x_points())?;
    let ys = coords_of(joint.y_points())?;
    let p = joint.probs();
    let k = p.len();
    let (a, b) = (0.5 * r * r, 0.5 * s * s);
    let ex: Vec<f64> = (0..k * k).map(|ij| (-a * sq_dist(xs[ij / k], xs[ij % k])).exp()).collect();
    let ey: Vec<f64> = (0..k * k).map(|ij| (-b * sq_dist(ys[ij / k], ys[ij % k])).exp()).collect();
    // my_i = Σ_m p_m ey(i,m); gy = Σ_mq p_m p_q ey(m,q)
    let my: Vec<f64> = (0..k).map(|i| (0..k).map(|m| p[m] * ey[i * k + m]).sum()).collect();
    let gy: f64 = (0..k).map(|i| p[i] * my[i]).sum();
    let mut acc = Neumaier::default();
    for i in 0..k {
        for l in 0..k {
            let w = p[i] * p[l] * ex[i * k + l];
            // Y₁,Y₃ from the paired atoms; Y₄ or Y₂ free
            acc.add(w * (ey[i * k + l] - my[i] - my[l] + gy));
        }
    }
    Ok(acc.sum())
}

/// Pointwise alternating kernel Σ_{i=1}^4 (−1)^{i−1} e^{−u‖x_i − x_{i+1}‖²}
/// (indices mod 4).
pub fn lambda_pointwise(x: [&[f64]; 4], u: f64) -> f64 {
    let e = |i: usize, j: usize| (-u * sq_dist(x[i], x[j])).exp();
    e(0, 1) - e(1, 2) + e(2, 3) - e(3, 0)
}

/// The alternating Gaussian-kernel expectation over an iid law. All four
/// terms are expectations over a pair of independent copies, so they
/// coincide and the result is identically zero; it is computed term by
/// term rather than assumed.
pub fn lambda_fn(points: &[Point], weights: &[f64], u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(DcovError::InvalidParameter("lambda requires u > 0".into()));
    }
    if points.len() != weights.len() {
        return Err(DcovError::LengthMismatch { x: points.len(), y: weights.len() });
    }
    let xs = coords_of(points)?;
    let pair_term = || -> f64 {
        let mut acc = Neumaier::default();
        for (a, wa) in xs.iter().zip(weights) {
            for (b, wb) in xs.iter().zip(weights) {
                acc.add(wa * wb * (-u * sq_dist(a, b)).exp());
            }
        }
        acc.sum()
    };
    let (t12, t23, t34, t41) = (pair_term(), pair_term(), pair_term(), pair_term());
    Ok(t12 - t23 + t34 - t41)
}

/// ¼ E[Λ_X(a) Λ_Y(b)] with the pointwise kernels over four iid pairs,
/// a = r²/2, b = s²/2. O(k⁴).
pub fn lambda_product_exact(joint: &DiscreteJoint, r: f64, s: f64) -> Result<f64> {
    let xs = coords_of(joint.x_points())?;
    let ys = coords_of(joint.y_points())?;
    let p = joint.probs();
    let k = p.len();
    let (a, b) = (0.5 * r * r, 0.5 * s * s);
    let mut acc = Neumaier::default();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                for m in 0..k {
                    let w = p[i] * p[j] * p[l] * p[m];
                    let lx = lambda_pointwise([xs[i], xs[j], xs[l], xs[m]], a);
                    let ly = lambda_pointwise([ys[i], ys[j], ys[l], ys[m]], b);
                    acc.add(w * lx * ly);
                }
            }
        }
    }
    Ok(0.25 * acc.sum())
}

/// h_M(x) = x^{β/2} + M^{β/2} − (x + M)^{β/2}, evaluated without
/// cancellation for large M.
pub fn h_m(x: f64, m: f64, beta: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let half = 0.5 * beta;
    let lead = if half == 0.5 { x.sqrt() } else { x.powf(half) };
    lead - m.powf(half) * (half * (x / m).ln_1p()).exp_m1()
}

/// Alternating four-point sum of h_M(‖x_i − x_{i+1}‖²).
pub fn hhat_m(x: [&[f64]; 4], m: f64, beta: f64) -> f64 {
    let h = |i: usize, j: usize| h_m(sq_dist(x[i], x[j]), m, beta);
    h(0, 1) - h(1, 2) + h(2, 3) - h(3, 0)
}

/// ¼ E[ĥ_{X,M} ĥ_{Y,M}] over the empirical law, via the pairwise-moment
/// contraction with kernel h_M(‖·‖²). Increases to the plug-in value as
/// M → ∞.
pub fn dcov_hm(sample: &PairedSample, m: f64) -> Result<DcovEstimate> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(DcovError::InvalidParameter("truncation M must be positive and finite".into()));
    }
    sample.require(2)?;
    let beta = sample.beta();
    check_open_beta(beta)?;
    let (xs, ys) = sample.euclidean_parts()?;
    let n = sample.len();
    let a = DistanceMatrix::from_fn(n, |i, j| h_m(sq_dist(xs[i], xs[j]), m, beta));
    let b = DistanceMatrix::from_fn(n, |i, j| h_m(sq_dist(ys[i], ys[j]), m, beta));
    Ok(DcovEstimate::new(plugin_d1_value(&a, &b), Method::Hm, beta, n).with_aux("trunc_m", m))
}
