use std::fs::File;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use dcov::beta2::{dcov2_closed_joint, uncorrelated_demo};
use dcov::charrv::dcov_charrv_mc_joint;
use dcov::inference::{
    consistency_sweep, pareto_with_atom, perm_test, regime_classify, tail_diagnostic, tail_diagnostic_norms,
    MomentFlags, SweepMode,
};
use dcov::io::{read_joint, read_paired_sample, read_points, ColumnSelection};
use dcov::{
    c_const, cb_const, dcov2_closed, dcov_centered, dcov_charfn_1d, dcov_charrv_mc, dcov_exact, dcov_hm,
    dcov_plugin_d1, projection_demo, CharRvConfig, DcovEstimate, DiscreteJoint, ExactMethod, MetricSpec, PairedSample,
    Point, QuadConfig,
};
use serde::Serialize;

use crate::config::*;
use crate::error::CliError;
use crate::report::*;
use crate::Outcome;

type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn reads_stdin(cmd: &Command) -> bool {
    let from_stdin = |p: &Option<PathBuf>| p.as_ref().is_none_or(|p| p.as_os_str() == "-");
    match cmd {
        Command::Dcov(a) => from_stdin(&a.sample.input),
        Command::Test(a) => from_stdin(&a.sample.input),
        Command::Converge(a) => from_stdin(&a.input),
        Command::Diag(a) => from_stdin(&a.input),
        Command::Classify(a) => from_stdin(&a.input),
        Command::Constants(_) | Command::Demo(_) => false,
    }
}

pub(crate) fn execute(cmd: &Command, stdin: &[u8]) -> Result<Outcome> {
    match cmd {
        Command::Dcov(a) => dcov(a, stdin),
        Command::Test(a) => test(a, stdin),
        Command::Converge(a) => converge(a, stdin),
        Command::Diag(a) => diag(a, stdin),
        Command::Classify(a) => classify(a, stdin),
        Command::Constants(a) => constants(a),
        Command::Demo(a) => demo(a),
    }
}

fn open<'a>(path: &Option<PathBuf>, stdin: &'a [u8]) -> Result<Box<dyn Read + 'a>> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let f = File::open(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
            Ok(Box::new(f))
        }
        _ => Ok(Box::new(stdin)),
    }
}

fn json<T: Serialize>(report: &T) -> Result<Outcome> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(Outcome { text, code: 0 })
}

fn json_only(format: Format, what: &str) -> Result<()> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Usage(format!("{what} reports are JSON only; CSV is for converge traces and demo"))),
    }
}

fn check_beta(beta: f64) -> Result<f64> {
    if beta.is_finite() && beta > 0.0 {
        Ok(beta)
    } else {
        Err(CliError::Usage(format!("--beta must be a positive number, got {beta}")))
    }
}

fn check_method_beta(method: MethodArg, beta: f64) -> Result<()> {
    match method {
        MethodArg::Charfn | MethodArg::Charrv | MethodArg::Hm if beta >= 2.0 => Err(CliError::Domain(format!(
            "method {} needs 0 < beta < 2: the weighted frequency integral diverges for beta >= 2 \
             (its normalizing constant vanishes at beta = 2); use --method beta2 or centered",
            method.name()
        ))),
        MethodArg::Beta2 if beta != 2.0 => Err(CliError::Domain(format!(
            "method beta2 is the closed form at beta = 2 only, got beta = {beta}"
        ))),
        _ => Ok(()),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn quad_config(q: &QuadArgs, base: QuadConfig) -> QuadConfig {
    QuadConfig {
        eps: q.quad_eps.unwrap_or(base.eps),
        t_max: q.quad_tmax.unwrap_or(base.t_max),
        points: q.quad_points.unwrap_or(base.points),
        panels_per_decade: q.grid_panels.unwrap_or(base.panels_per_decade),
        tol: q.quad_tol.unwrap_or(base.tol),
    }
}

fn exact_method(d: DefinitionArg) -> (ExactMethod, &'static str) {
    match d {
        DefinitionArg::D1 => (ExactMethod::D1, "d1"),
        DefinitionArg::D2 => (ExactMethod::D2, "d2"),
        DefinitionArg::D3 => (ExactMethod::D3, "d3"),
    }
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| CliError::Usage(format!("--seed is required for {what}")))
}

fn max_sq_distance(s: &PairedSample) -> Result<f64> {
    let (xs, ys) = s.euclidean_parts()?;
    let widest = |pts: &[&[f64]]| {
        let mut m: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                m = m.max(a.iter().zip(b.iter()).map(|(u, v)| (u - v) * (u - v)).sum());
            }
        }
        m
    };
    Ok(widest(&xs).max(widest(&ys)))
}

fn read_sample(a: &SampleArgs, stdin: &[u8], beta: f64) -> Result<PairedSample> {
    let xs = ColumnSelection::parse(&a.x)?;
    let ys = ColumnSelection::parse(&a.y)?;
    Ok(read_paired_sample(open(&a.input, stdin)?, &xs, &ys, beta)?)
}

fn dcov(a: &DcovArgs, stdin: &[u8]) -> Result<Outcome> {
    let start = Instant::now();
    json_only(a.format, "dcov")?;
    let beta = check_beta(a.sample.beta)?;
    check_method_beta(a.method, beta)?;
    let seed = match a.method {
        MethodArg::Charrv => Some(require_seed(a.seed, "--method charrv")?),
        _ => None,
    };
    let quad = quad_config(&a.quad, QuadConfig::default());
    let rv_quad = quad_config(&a.quad, QuadConfig::coarse());
    let rv = |seed: u64| CharRvConfig { draws: a.draws, seed, quad: rv_quad };
    let (ex, def_name) = exact_method(a.definition);
    let definition = (a.method == MethodArg::Exact).then_some(def_name);

    let est: DcovEstimate = if a.joint {
        let j = read_joint(open(&a.sample.input, stdin)?, beta)?;
        match a.method {
            MethodArg::Exact => dcov_exact(&j, ex)?,
            MethodArg::Charfn => dcov_charfn_1d(&j, &quad)?,
            MethodArg::Charrv => dcov_charrv_mc_joint(&j, &rv(seed.unwrap_or_default()))?,
            MethodArg::Beta2 => dcov2_closed_joint(&j)?,
            m => {
                return Err(CliError::Usage(format!(
                    "method {} needs a sample; with --joint use exact, charfn, charrv or beta2",
                    m.name()
                )))
            }
        }
    } else {
        let s = read_sample(&a.sample, stdin, beta)?;
        match a.method {
            MethodArg::D1 => dcov_plugin_d1(&s)?,
            MethodArg::Centered => dcov_centered(&s)?,
            MethodArg::Charfn => dcov_charfn_1d(&DiscreteJoint::empirical(&s)?, &quad)?,
            MethodArg::Charrv => dcov_charrv_mc(&s, &rv(seed.unwrap_or_default()))?,
            MethodArg::Hm => {
                let m = match a.trunc_m {
                    Some(m) => m,
                    None => (1e6 * max_sq_distance(&s)?).max(1.0),
                };
                dcov_hm(&s, m)?
            }
            MethodArg::Beta2 => dcov2_closed(&s)?,
            MethodArg::Exact => dcov_exact(&DiscreteJoint::empirical(&s)?, ex)?,
        }
    };
    let mut aux = est.aux;
    let error = aux.remove("quad_error");
    json(&DcovReport {
        command: "dcov",
        method: a.method.name(),
        definition,
        beta: est.beta,
        n: est.n,
        value: est.value,
        stderr: est.stderr,
        error,
        seed,
        aux,
        wall_time_ms: elapsed_ms(start),
    })
}

fn test(a: &TestArgs, stdin: &[u8]) -> Result<Outcome> {
    let start = Instant::now();
    json_only(a.format, "test")?;
    let beta = check_beta(a.sample.beta)?;
    let seed = require_seed(a.seed, "the permutation test")?;
    let s = read_sample(&a.sample, stdin, beta)?;
    let r = perm_test(&s, a.permutations, seed)?;
    json(&TestReport {
        command: "test",
        beta,
        n: s.len(),
        observed: r.observed,
        p_value: r.p_value,
        permutations: r.permutations,
        exceed: r.exceed,
        seed: r.seed,
        wall_time_ms: elapsed_ms(start),
    })
}

fn converge(a: &ConvergeArgs, stdin: &[u8]) -> Result<Outcome> {
    let start = Instant::now();
    let beta = check_beta(a.beta)?;
    if a.seeds.is_empty() {
        return Err(CliError::Usage("--seeds is required for converge (comma-separated list)".into()));
    }
    let j = read_joint(open(&a.input, stdin)?, beta)?;
    let (mode, mode_name) = match a.mode {
        ModeArg::Compressed => (SweepMode::Compressed, "compressed"),
        ModeArg::Centered => (SweepMode::Centered, "centered"),
    };
    let trace = consistency_sweep(&j, &a.sizes, &a.seeds, mode)?;
    match a.format {
        Format::Json => json(&ConvergeReport {
            command: "converge",
            beta,
            mode: mode_name,
            population: trace.population,
            seeds: trace.seeds,
            rows: trace.rows,
            wall_time_ms: elapsed_ms(start),
        }),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "median_estimate", "median_abs_error", "max_abs_error", "population"])
                .and_then(|_| {
                    for r in &trace.rows {
                        w.write_record([
                            r.n.to_string(),
                            r.median_estimate.to_string(),
                            r.median_abs_error.to_string(),
                            r.max_abs_error.to_string(),
                            trace.population.to_string(),
                        ])?;
                    }
                    Ok(())
                })
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Outcome { text: String::from_utf8_lossy(&bytes).into_owned(), code: 0 })
        }
    }
}

fn diag(a: &DiagArgs, stdin: &[u8]) -> Result<Outcome> {
    let start = Instant::now();
    json_only(a.format, "diag")?;
    let beta = check_beta(a.beta)?;
    let cols = ColumnSelection::parse(&a.cols)?;
    let rows = read_points(open(&a.input, stdin)?, &cols)?;
    let dim = rows.first().map_or(1, Vec::len);
    let points: Vec<Point> = rows.into_iter().map(Point::Coords).collect();
    let value = tail_diagnostic(&points, &MetricSpec::euclidean(dim, beta)?)?;
    json(&DiagReport { command: "diag", beta, n: points.len(), value, heuristic: true, wall_time_ms: elapsed_ms(start) })
}

fn classify(a: &ClassifyArgs, stdin: &[u8]) -> Result<Outcome> {
    let start = Instant::now();
    json_only(a.format, "classify")?;
    let flags: MomentFlags = serde_json::from_reader(open(&a.input, stdin)?)?;
    let report = regime_classify(&flags)?;
    json(&ClassifyReport { command: "classify", flags, report, wall_time_ms: elapsed_ms(start) })
}

fn constants(a: &ConstantsArgs) -> Result<Outcome> {
    let start = Instant::now();
    json_only(a.format, "constants")?;
    let beta = check_beta(a.beta)?;
    if a.ell == 0 {
        return Err(CliError::Usage("--ell must be at least 1".into()));
    }
    json(&ConstantsReport {
        command: "constants",
        ell: a.ell,
        beta,
        value: c_const(a.ell, beta)?,
        projection: cb_const(beta)?,
        wall_time_ms: elapsed_ms(start),
    })
}

fn demo_rows() -> Result<Vec<DemoRow>> {
    let mut rows = Vec::new();

    let p = projection_demo(1.0)?;
    rows.push(DemoRow {
        name: "projection_increases_dcov",
        pass: p.dc_projected > p.dc_full + 1e-6,
        detail: format!("full {:.6}, projected {:.6}", p.dc_full, p.dc_projected),
    });

    let u = uncorrelated_demo()?;
    rows.push(DemoRow {
        name: "beta2_misses_nonlinear_dependence",
        pass: u.dc2.abs() <= 1e-12 && u.dc1 > 0.01,
        detail: format!("beta=2 value {:.3e}, beta=1 value {:.6}", u.dc2, u.dc1),
    });

    let beta = 1.0;
    let median_diag = |n: usize| -> Result<f64> {
        let mut v = (0..5u64)
            .map(|seed| {
                let x = pareto_with_atom(n, beta, seed)?;
                tail_diagnostic_norms(&x.iter().map(|v| v.powf(2.0 * beta)).collect::<Vec<_>>())
            })
            .collect::<dcov::Result<Vec<f64>>>()?;
        v.sort_by(f64::total_cmp);
        Ok(v[2])
    };
    let (small, large) = (median_diag(1_000)?, median_diag(100_000)?);
    rows.push(DemoRow {
        name: "heavy_tail_diagnostic_grows",
        pass: large > small,
        detail: format!("median at n=1e3 {small:.4}, at n=1e5 {large:.4}"),
    });

    let s = MetricSpec::euclidean(1, 1.0)?;
    let bern = DiscreteJoint::uniform(
        vec![(Point::scalar(0.0), Point::scalar(0.0)), (Point::scalar(1.0), Point::scalar(1.0))],
        s.clone(),
        s,
    )?;
    let v = dcov_exact(&bern, ExactMethod::D1)?.value;
    rows.push(DemoRow {
        name: "bernoulli_quarter",
        pass: (v - 0.25).abs() <= 1e-12,
        detail: format!("exact value {v}"),
    });
    Ok(rows)
}

fn demo(a: &DemoArgs) -> Result<Outcome> {
    let start = Instant::now();
    let rows = demo_rows()?;
    let all_pass = rows.iter().all(|r| r.pass);
    let code = if all_pass { 0 } else { 1 };
    let mut out = match a.format {
        Format::Json => json(&DemoReport { command: "demo", rows, all_pass, wall_time_ms: elapsed_ms(start) })?,
        Format::Csv => {
            let mut text = String::from("name,result,detail\n");
            for r in &rows {
                text.push_str(&format!("{},{},\"{}\"\n", r.name, if r.pass { "PASS" } else { "FAIL" }, r.detail));
            }
            Outcome { text, code: 0 }
        }
    };
    out.code = code;
    Ok(out)
}
