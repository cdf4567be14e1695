use std::collections::BTreeMap;

use dcov::inference::{MomentFlags, RegimeReport, TraceRow};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct DcovReport {
    pub command: &'static str,
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub definition: Option<&'static str>,
    pub beta: f64,
    pub n: usize,
    pub value: f64,
    /// Monte Carlo standard error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    /// Quadrature error estimate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub aux: BTreeMap<String, f64>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct TestReport {
    pub command: &'static str,
    pub beta: f64,
    pub n: usize,
    pub observed: f64,
    pub p_value: f64,
    pub permutations: usize,
    pub exceed: usize,
    pub seed: u64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct ConvergeReport {
    pub command: &'static str,
    pub beta: f64,
    pub mode: &'static str,
    pub population: f64,
    pub seeds: Vec<u64>,
    pub rows: Vec<TraceRow>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct DiagReport {
    pub command: &'static str,
    pub beta: f64,
    pub n: usize,
    pub value: f64,
    /// The statistic hints at tail behavior; it cannot prove finiteness.
    pub heuristic: bool,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub command: &'static str,
    pub flags: MomentFlags,
    pub report: RegimeReport,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct ConstantsReport {
    pub command: &'static str,
    pub ell: usize,
    pub beta: f64,
    /// Normalizing constant of the Fourier weight in dimension ell.
    pub value: f64,
    /// Normalizing constant of the Gaussian projection form.
    pub projection: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct DemoRow {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct DemoReport {
    pub command: &'static str,
    pub rows: Vec<DemoRow>,
    pub all_pass: bool,
    pub wall_time_ms: f64,
}
