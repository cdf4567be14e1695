//! Points, metrics and β-powered distance matrices.

use std::fmt;
use std::sync::Arc;

use crate::error::{DcovError, Result};
use crate::par;

/// An element of a metric space: Euclidean coordinates or an index into a
/// finite metric table.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Coords(Vec<f64>),
    Atom(usize),
}

impl Point {
    pub fn scalar(v: f64) -> Self {
        Point::Coords(vec![v])
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Atom(_) => None,
        }
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::Coords(v)
    }
}

impl From<f64> for Point {
    fn from(v: f64) -> Self {
        Point::scalar(v)
    }
}

/// First defect found in a candidate metric table.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    NotSquare { row: usize, len: usize, n: usize },
    Empty,
    NonFinite { i: usize, j: usize },
    Negative { i: usize, j: usize, value: f64 },
    NonzeroDiagonal { i: usize, value: f64 },
    Asymmetric { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSquare { row, len, n } => {
                write!(f, "row {row} has {len} entries, expected {n}")
            }
            Self::Empty => write!(f, "table is empty"),
            Self::NonFinite { i, j } => write!(f, "entry ({i},{j}) is not finite"),
            Self::Negative { i, j, value } => write!(f, "entry ({i},{j}) = {value} is negative"),
            Self::NonzeroDiagonal { i, value } => write!(f, "diagonal entry ({i},{i}) = {value}"),
            Self::Asymmetric { i, j } => write!(f, "entries ({i},{j}) and ({j},{i}) differ"),
            Self::Triangle { i, j, k } => {
                write!(f, "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
        }
    }
}

/// Checks symmetry, zero diagonal, nonnegativity and the triangle
/// inequality over all triples. O(n³).
pub fn validate_table_metric(table: &[Vec<f64>]) -> std::result::Result<(), MetricViolation> {
    validate_entries(table)?;
    check_triangle(table)
}

fn validate_entries(table: &[Vec<f64>]) -> std::result::Result<(), MetricViolation> {
    let n = table.len();
    if n == 0 {
        return Err(MetricViolation::Empty);
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != n {
            return Err(MetricViolation::NotSquare { row, len: r.len(), n });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = table[i][j];
            if !v.is_finite() {
                return Err(MetricViolation::NonFinite { i, j });
            }
            if v < 0.0 {
                return Err(MetricViolation::Negative { i, j, value: v });
            }
        }
        if table[i][i] != 0.0 {
            return Err(MetricViolation::NonzeroDiagonal { i, value: table[i][i] });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if table[i][j] != table[j][i] {
                return Err(MetricViolation::Asymmetric { i, j });
            }
        }
    }
    Ok(())
}

fn check_triangle(table: &[Vec<f64>]) -> std::result::Result<(), MetricViolation> {
    let n = table.len();
    for i in 0..n {
        for k in 0..n {
            let direct = table[i][k];
            for j in 0..n {
                let via = table[i][j] + table[j][k];
                // relative slack so tables produced by floating arithmetic pass
                if direct > via * (1.0 + 1e-12) {
                    return Err(MetricViolation::Triangle { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// A validated finite metric, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct TableMetric {
    n: usize,
    entries: Vec<f64>,
}

impl TableMetric {
    /// Validates the table; the O(n³) triangle check runs only when asked.
    pub fn new(table: &[Vec<f64>], check_triangle_inequality: bool) -> Result<Self> {
        validate_entries(table).map_err(DcovError::InvalidTable)?;
        if check_triangle_inequality {
            check_triangle(table).map_err(DcovError::InvalidTable)?;
        }
        let n = table.len();
        let entries = table.iter().flatten().copied().collect();
        Ok(Self { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    /// ℝ^dim with the Euclidean norm; base point is the origin.
    Euclidean { dim: usize },
    /// Finite metric table with a designated base atom.
    Table { table: Arc<TableMetric>, base: usize },
}

/// A metric together with the exponent applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub beta: f64,
}

impl MetricSpec {
    pub fn euclidean(dim: usize, beta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(DcovError::InvalidParameter("dimension must be at least 1".into()));
        }
        check_beta(beta)?;
        Ok(Self { kind: MetricKind::Euclidean { dim }, beta })
    }

    pub fn table(table: TableMetric, base: usize, beta: f64) -> Result<Self> {
        Self::shared_table(Arc::new(table), base, beta)
    }

    pub fn shared_table(table: Arc<TableMetric>, base: usize, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if base >= table.size() {
            return Err(DcovError::IndexOutOfRange { index: base, size: table.size() });
        }
        Ok(Self { kind: MetricKind::Table { table, base }, beta })
    }

    /// Same metric, different exponent.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self { kind: self.kind.clone(), beta })
    }

    pub fn euclidean_dim(&self) -> Option<usize> {
        match self.kind {
            MetricKind::Euclidean { dim } => Some(dim),
            MetricKind::Table { .. } => None,
        }
    }

    /// Confirms that `p` belongs to this space.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (&self.kind, p) {
            (MetricKind::Euclidean { dim }, Point::Coords(c)) => {
                if c.len() != *dim {
                    return Err(DcovError::DimensionMismatch { expected: *dim, got: c.len() });
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(DcovError::NonFinite);
                }
                Ok(())
            }
            (MetricKind::Table { table, .. }, Point::Atom(i)) => {
                if *i >= table.size() {
                    return Err(DcovError::IndexOutOfRange { index: *i, size: table.size() });
                }
                Ok(())
            }
            _ => Err(DcovError::KindMismatch),
        }
    }

    pub fn check_points(&self, points: &[Point]) -> Result<()> {
        points.iter().try_for_each(|p| self.check_point(p))
    }

    /// d(a, b)^β for points already known to conform.
    #[inline]
    pub fn dist_beta(&self, a: &Point, b: &Point) -> f64 {
        match (&self.kind, a, b) {
            (MetricKind::Euclidean { .. }, Point::Coords(x), Point::Coords(y)) => {
                sq_dist_pow(sq_dist(x, y), self.beta)
            }
            (MetricKind::Table { table, .. }, Point::Atom(i), Point::Atom(j)) => {
                pow_beta(table.get(*i, *j), self.beta)
            }
            _ => f64::NAN,
        }
    }

    /// ‖p‖^β = d(p, o)^β.
    #[inline]
    pub fn norm_beta(&self, p: &Point) -> f64 {
        match (&self.kind, p) {
            (MetricKind::Euclidean { .. }, Point::Coords(x)) => {
                sq_dist_pow(x.iter().map(|v| v * v).sum(), self.beta)
            }
            (MetricKind::Table { table, base }, Point::Atom(i)) => {
                pow_beta(table.get(*i, *base), self.beta)
            }
            _ => f64::NAN,
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(DcovError::BetaOutOfRange { beta, range: "(0, inf)" })
    }
}

#[inline]
pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// d^β computed as exp(β ln d); d = 0 maps to 0 and β = 1 is the identity.
#[inline]
pub fn pow_beta(d: f64, beta: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else if beta == 1.0 {
        d
    } else {
        (beta * d.ln()).exp()
    }
}

/// (√s)^β from a squared distance; β = 2 returns s itself.
#[inline]
pub fn sq_dist_pow(s: f64, beta: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else if beta == 2.0 {
        s
    } else if beta == 1.0 {
        s.sqrt()
    } else {
        (0.5 * beta * s.ln()).exp()
    }
}

/// Dense symmetric matrix of d(x_i, x_j)^β. Memory is n² doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Builds a matrix from an entry function, computing rows in parallel.
    pub(crate) fn from_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        // each entry is independent, so the result does not depend on thread count
        let rows = par::map_range(n, |i| (0..n).map(|j| if i == j { 0.0 } else { f(i, j) }).collect::<Vec<_>>());
        Self { n, data: rows.concat() }
    }

    /// Converts into a table metric (e.g. to treat d^β as a metric in its own right).
    pub fn to_table(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }
}

/// Materializes d(points[i], points[j])^β.
pub fn pairwise_distances(points: &[Point], spec: &MetricSpec) -> Result<DistanceMatrix> {
    if points.is_empty() {
        return Err(DcovError::TooFewObservations { need: 1, got: 0 });
    }
    spec.check_points(points)?;
    Ok(DistanceMatrix::from_fn(points.len(), |i, j| spec.dist_beta(&points[i], &points[j])))
}

/// ‖points[i]‖^β relative to the metric's base point.
pub fn norms_to_base(points: &[Point], spec: &MetricSpec) -> Result<Vec<f64>> {
    spec.check_points(points)?;
    Ok(points.iter().map(|p| spec.norm_beta(p)).collect())
}
