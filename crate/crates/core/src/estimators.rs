//! Plug-in (V-statistic) estimators from paired samples.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DcovError, Result};
use crate::metric::{pairwise_distances, DistanceMatrix, MetricSpec, Point};
use crate::par;
use crate::population::common_beta;
use crate::sum::{pairwise_sum, Neumaier};

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactD1,
    ExactD2,
    ExactD3,
    #[serde(rename = "d1")]
    PluginD1,
    Centered,
    Charfn,
    Charrv,
    Hm,
    Beta2,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactD1 => "exact_d1",
            Method::ExactD2 => "exact_d2",
            Method::ExactD3 => "exact_d3",
            Method::PluginD1 => "d1",
            Method::Centered => "centered",
            Method::Charfn => "charfn",
            Method::Charrv => "charrv",
            Method::Hm => "hm",
            Method::Beta2 => "beta2",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A computed distance covariance with its provenance and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcovEstimate {
    pub value: f64,
    pub method: Method,
    pub beta: f64,
    /// Sample size, or support size for exact computations.
    pub n: usize,
    /// Monte Carlo standard error, when the method is stochastic.
    pub stderr: Option<f64>,
    pub aux: BTreeMap<String, f64>,
}

impl DcovEstimate {
    pub fn new(value: f64, method: Method, beta: f64, n: usize) -> Self {
        Self { value, method, beta, n, stderr: None, aux: BTreeMap::new() }
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = Some(stderr);
        self
    }

    pub fn with_aux(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_owned(), value);
        self
    }
}

/// n observation pairs with a metric on each side; both metrics share β.
#[derive(Debug, Clone)]
pub struct PairedSample {
    x: Vec<Point>,
    y: Vec<Point>,
    x_spec: MetricSpec,
    y_spec: MetricSpec,
}

impl PairedSample {
    pub fn new(x: Vec<Point>, y: Vec<Point>, x_spec: MetricSpec, y_spec: MetricSpec) -> Result<Self> {
        if x.len() != y.len() {
            return Err(DcovError::LengthMismatch { x: x.len(), y: y.len() });
        }
        common_beta(&x_spec, &y_spec)?;
        x_spec.check_points(&x)?;
        y_spec.check_points(&y)?;
        Ok(Self { x, y, x_spec, y_spec })
    }

    /// Euclidean rows on both sides; dimensions are taken from the first row.
    pub fn euclidean(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>, beta: f64) -> Result<Self> {
        let dx = x.first().map_or(1, Vec::len);
        let dy = y.first().map_or(1, Vec::len);
        Self::new(
            x.into_iter().map(Point::Coords).collect(),
            y.into_iter().map(Point::Coords).collect(),
            MetricSpec::euclidean(dx, beta)?,
            MetricSpec::euclidean(dy, beta)?,
        )
    }

    /// Scalar observations on both sides.
    pub fn scalar(x: &[f64], y: &[f64], beta: f64) -> Result<Self> {
        Self::euclidean(x.iter().map(|&v| vec![v]).collect(), y.iter().map(|&v| vec![v]).collect(), beta)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn beta(&self) -> f64 {
        self.x_spec.beta
    }

    pub fn x_points(&self) -> &[Point] {
        &self.x
    }

    pub fn y_points(&self) -> &[Point] {
        &self.y
    }

    pub fn x_spec(&self) -> &MetricSpec {
        &self.x_spec
    }

    pub fn y_spec(&self) -> &MetricSpec {
        &self.y_spec
    }

    /// Swaps the roles of the two parts.
    pub fn swapped(&self) -> Self {
        Self { x: self.y.clone(), y: self.x.clone(), x_spec: self.y_spec.clone(), y_spec: self.x_spec.clone() }
    }

    /// Pairs each part with itself.
    pub fn x_with_x(&self) -> Self {
        Self { x: self.x.clone(), y: self.x.clone(), x_spec: self.x_spec.clone(), y_spec: self.x_spec.clone() }
    }

    pub fn y_with_y(&self) -> Self {
        self.swapped().x_with_x()
    }

    /// Same data, different exponent.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Ok(Self {
            x: self.x.clone(),
            y: self.y.clone(),
            x_spec: self.x_spec.with_beta(beta)?,
            y_spec: self.y_spec.with_beta(beta)?,
        })
    }

    /// Coordinates of both parts, or an error if either side is a table metric.
    pub fn euclidean_parts(&self) -> Result<(Vec<&[f64]>, Vec<&[f64]>)> {
        if self.x_spec.euclidean_dim().is_none() || self.y_spec.euclidean_dim().is_none() {
            return Err(DcovError::NotEuclidean);
        }
        Ok((coords_of(&self.x)?, coords_of(&self.y)?))
    }

    pub(crate) fn require(&self, need: usize) -> Result<()> {
        if self.len() < need {
            return Err(DcovError::TooFewObservations { need, got: self.len() });
        }
        Ok(())
    }
}

pub(crate) fn coords_of(pts: &[Point]) -> Result<Vec<&[f64]>> {
    pts.iter().map(|p| p.coords().ok_or(DcovError::NotEuclidean)).collect()
}

/// Both β-distance matrices of a sample, computed once and reused.
#[derive(Debug, Clone)]
pub struct SampleMatrices {
    pub a: DistanceMatrix,
    pub b: DistanceMatrix,
    pub beta: f64,
}

impl SampleMatrices {
    pub fn new(sample: &PairedSample) -> Result<Self> {
        sample.require(2)?;
        Ok(Self {
            a: pairwise_distances(sample.x_points(), sample.x_spec())?,
            b: pairwise_distances(sample.y_points(), sample.y_spec())?,
            beta: sample.beta(),
        })
    }

    pub fn n(&self) -> usize {
        self.a.size()
    }

    pub fn plugin_d1(&self) -> DcovEstimate {
        DcovEstimate::new(plugin_d1_value(&self.a, &self.b), Method::PluginD1, self.beta, self.n())
    }

    pub fn centered(&self) -> DcovEstimate {
        DcovEstimate::new(centered_value(&self.a, &self.b), Method::Centered, self.beta, self.n())
    }
}

/// (1/n²)Σ a_ij b_ij + (Σa/n²)(Σb/n²) − (2/n³)Σ_i a_i· b_i·
pub(crate) fn plugin_d1_value(a: &DistanceMatrix, b: &DistanceMatrix) -> f64 {
    let n = a.size();
    let rows = par::map_range(n, |i| {
        let (ra, rb) = (a.row(i), b.row(i));
        let mut ab = Neumaier::default();
        let mut sa = Neumaier::default();
        let mut sb = Neumaier::default();
        for j in 0..n {
            ab.add(ra[j] * rb[j]);
            sa.add(ra[j]);
            sb.add(rb[j]);
        }
        (ab.sum(), sa.sum(), sb.sum())
    });
    let nf = n as f64;
    let ab = pairwise_sum(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let sa = pairwise_sum(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
    let sb = pairwise_sum(&rows.iter().map(|r| r.2).collect::<Vec<_>>());
    let cross = pairwise_sum(&rows.iter().map(|r| r.1 * r.2).collect::<Vec<_>>());
    ab / (nf * nf) + (sa / (nf * nf)) * (sb / (nf * nf)) - 2.0 * cross / (nf * nf * nf)
}

/// Row means and grand mean of a symmetric matrix.
pub(crate) fn row_means(a: &DistanceMatrix) -> (Vec<f64>, f64) {
    let n = a.size();
    let means: Vec<f64> = par::map_range(n, |i| pairwise_sum(a.row(i)) / n as f64);
    let grand = pairwise_sum(&means) / n as f64;
    (means, grand)
}

/// a_ij − ā_i· − ā_·j + ā_··, row-major.
pub fn double_center(a: &DistanceMatrix) -> Vec<f64> {
    let n = a.size();
    let (m, g) = row_means(a);
    par::map_range(n, |i| a.row(i).iter().enumerate().map(|(j, v)| v - m[i] - m[j] + g).collect::<Vec<_>>())
        .concat()
}

pub(crate) fn centered_value(a: &DistanceMatrix, b: &DistanceMatrix) -> f64 {
    let n = a.size();
    let (ma, ga) = row_means(a);
    let (mb, gb) = row_means(b);
    let rows = par::map_range(n, |i| {
        let (ra, rb) = (a.row(i), b.row(i));
        (0..n)
            .map(|j| (ra[j] - ma[i] - ma[j] + ga) * (rb[j] - mb[i] - mb[j] + gb))
            .collect::<Neumaier>()
            .sum()
    });
    pairwise_sum(&rows) / (n as f64 * n as f64)
}

/// Pairwise-moment plug-in estimate, O(n²).
pub fn dcov_plugin_d1(sample: &PairedSample) -> Result<DcovEstimate> {
    Ok(SampleMatrices::new(sample)?.plugin_d1())
}

/// Double-centered plug-in estimate, O(n²).
pub fn dcov_centered(sample: &PairedSample) -> Result<DcovEstimate> {
    Ok(SampleMatrices::new(sample)?.centered())
}

/// Normalized ratio dcov(X,Y) / sqrt(dcov(X,X) dcov(Y,Y)).
pub fn dcor(sample: &PairedSample) -> Result<f64> {
    let m = SampleMatrices::new(sample)?;
    let xy = centered_value(&m.a, &m.b);
    let xx = centered_value(&m.a, &m.a);
    let yy = centered_value(&m.b, &m.b);
    if xx <= 0.0 {
        return Err(DcovError::DegenerateMarginal("x"));
    }
    if yy <= 0.0 {
        return Err(DcovError::DegenerateMarginal("y"));
    }
    Ok(xy / (xx.sqrt() * yy.sqrt()))
}
