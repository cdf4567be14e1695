//! Independence testing, consistency sweeps and moment diagnostics.

mod consistency;
mod perm;
mod regime;
mod tail;

pub use consistency::{consistency_sweep, ConsistencyTrace, SweepMode, TraceRow};
pub use perm::{perm_test, PermTestResult};
pub use regime::{regime_classify, Definition, MomentFlags, RegimeReport, Status};
pub use tail::{pareto_with_atom, tail_diagnostic, tail_diagnostic_norms};

/// Median of a nonempty slice (mean of the middle pair for even length).
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
