//! Closed-form recourse bounds and trace verification.

use crate::adversary::{faithful_single_edge_budget, robust_single_edge_budget, tm_size};
use crate::error::{Error, Result};
use crate::format::{TraceFile, TraceHeader, TraceSummary, Verdict};
use crate::step::{check_prefix_sums, StepRecord};

/// ⌈log2 n⌉ for n ≥ 1.
pub fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// ⌊log_c n⌋ for n ≥ 1, and 0 for n = 0.
pub fn floor_log(n: u64, c: u64) -> u64 {
    let mut p = 0;
    let mut x = n;
    while x >= c {
        x /= c;
        p += 1;
    }
    p
}

/// Total flips of shortest-path orientation over `n` forest edges:
/// ⌊(n − log2 n − 1) / log2 c⌋, clamped at zero.
pub fn sp_total_bound(n: u64, c: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    if c == 2 {
        return (n - 1).saturating_sub(ceil_log2(n));
    }
    let v = (n as f64 - (n as f64).log2() - 1.0) / (c as f64).log2();
    v.max(0.0).floor() as u64
}

/// Flips in a single step once `n_t` edges have arrived: ⌊log_c n_t⌋.
pub fn sp_step_bound(n_t: u64, c: u32) -> u64 {
    floor_log(n_t, c as u64)
}

/// Maximum in-degree of the greedy no-recourse orienter on `n` forest edges.
pub fn greedy_max_bound(n: u64) -> u64 {
    floor_log(n + 1, 2)
}

/// All-flip total: ⌊n(Δ+1) / (Δ+1−2δ)⌋.
pub fn allflip_bound(n: u64, promised: u32, maintained: u32) -> u64 {
    let num = n as u128 * (maintained as u128 + 1);
    let den = maintained as u128 + 1 - 2 * promised as u128;
    (num / den) as u64
}

/// b-matching swaps: ⌊n·C / (C−1)²⌋.
pub fn bmatch_bound(n: u64, factor: u32) -> u64 {
    let c = factor as u128;
    (n as u128 * c / ((c - 1) * (c - 1))) as u64
}

fn param(header: &TraceHeader, key: &str) -> Result<u64> {
    header.params.get(key).copied().ok_or_else(|| {
        Error::RejectedInput(format!(
            "trace for {} lacks parameter `{key}`",
            header.algorithm
        ))
    })
}

fn param_u32(header: &TraceHeader, key: &str) -> Result<u32> {
    u32::try_from(param(header, key)?)
        .map_err(|_| Error::RejectedInput(format!("parameter `{key}` out of range")))
}

/// Summary figures derived from the step records alone.
pub fn summarize(steps: &[StepRecord], verdicts: Vec<Verdict>) -> TraceSummary {
    TraceSummary {
        steps: steps.len() as u64,
        total: steps.last().map_or(0, |s| s.cumulative_flips),
        max_step: steps.iter().map(|s| s.flips).max().unwrap_or(0),
        final_max: steps.last().map_or(0, |s| s.max_in_degree),
        verdicts,
    }
}

fn sp_verdicts(steps: &[StepRecord], c: u32) -> Vec<Verdict> {
    let n = steps.len() as u64;
    let total = steps.last().map_or(0, |s| s.cumulative_flips);
    let peak = steps.iter().map(|s| s.max_in_degree).max().unwrap_or(0);
    let over = steps
        .iter()
        .enumerate()
        .filter(|(t, s)| s.flips > sp_step_bound(*t as u64 + 1, c))
        .count() as u64;
    vec![
        Verdict::at_most("max_indegree", peak, c as u64),
        Verdict::at_most("total_flips", total, sp_total_bound(n, c)),
        Verdict::at_most("steps_over_log_bound", over, 0),
    ]
}

fn peak(steps: &[StepRecord]) -> u64 {
    steps.iter().map(|s| s.max_in_degree).max().unwrap_or(0)
}

/// Recomputes every bound verdict that applies to a run.
pub fn evaluate(header: &TraceHeader, steps: &[StepRecord]) -> Result<Vec<Verdict>> {
    let n = steps.len() as u64;
    let total = steps.last().map_or(0, |s| s.cumulative_flips);
    Ok(match header.algorithm.as_str() {
        "orient-sp" => sp_verdicts(steps, param_u32(header, "c")?),
        "greedy" => vec![Verdict::at_most(
            "max_indegree",
            peak(steps),
            greedy_max_bound(n),
        )],
        "orient-allflip" => {
            let delta = param_u32(header, "delta")?;
            let big = param_u32(header, "Delta")?;
            if big < 2 * delta || delta == 0 {
                return Err(Error::RejectedInput(format!(
                    "Delta={big} must be at least 2·delta={}",
                    2 * delta
                )));
            }
            vec![
                Verdict::at_most("max_indegree", peak(steps), big as u64),
                Verdict::at_most("total_flips", total, allflip_bound(n, delta, big)),
            ]
        }
        "bmatch" => {
            let k = param_u32(header, "K")?;
            let c = param_u32(header, "C")?;
            if c < 2 {
                return Err(Error::RejectedInput("C must be at least 2".into()));
            }
            vec![
                Verdict::at_most("max_load", peak(steps), c as u64 * k as u64),
                Verdict::at_most("total_swaps", total, bmatch_bound(n, c)),
            ]
        }
        "adversary" => adversary_verdicts(header, steps)?,
        other => {
            return Err(Error::RejectedInput(format!("unknown algorithm `{other}`")));
        }
    })
}

fn adversary_verdicts(header: &TraceHeader, steps: &[StepRecord]) -> Result<Vec<Verdict>> {
    let construction = header
        .construction
        .as_deref()
        .ok_or_else(|| Error::RejectedInput("adversary trace names no construction".into()))?;
    let p = param(header, "param")?;
    let n = steps.len() as u64;
    let total = steps.last().map_or(0, |s| s.cumulative_flips);
    let last = steps.last();
    let max_path = steps.iter().map(|s| s.path_length_used).max().unwrap_or(0);
    let mut v = match construction {
        "pairing" => Vec::new(),
        "two-flip-fixing" => vec![Verdict::at_most("max_indegree", peak(steps), 2)],
        _ => sp_verdicts(steps, 2),
    };
    match construction {
        "build-tm" => {
            if !(1..=40).contains(&p) {
                return Err(Error::RejectedInput(format!(
                    "build-tm depth {p} out of range"
                )));
            }
            v.push(Verdict::exactly("edges", n, tm_size(p as u32)));
        }
        "single-step" => {
            if p < 2 || !p.is_power_of_two() {
                return Err(Error::RejectedInput(format!(
                    "single-step needs a power of two, got {p}"
                )));
            }
            v.push(Verdict::exactly("edges", n, 5 * p - 3));
            v.push(Verdict::exactly(
                "final_step_flips",
                last.map_or(0, |s| s.flips),
                p.trailing_zeros() as u64,
            ));
        }
        "linear" => {
            let k = p.saturating_sub(3) / 4;
            v.push(Verdict::exactly("edges", n, 4 * k + 3));
            v.push(Verdict::at_least("total_flips_forced", total, k));
        }
        "single-edge" | "single-edge-faithful" if !(1..=20).contains(&p) => {
            return Err(Error::RejectedInput(format!(
                "round count {p} out of range"
            )));
        }
        "single-edge" => {
            v.push(Verdict::at_most(
                "edges",
                n,
                robust_single_edge_budget(p as u32),
            ));
        }
        "single-edge-faithful" => {
            v.push(Verdict::exactly(
                "edges",
                n,
                faithful_single_edge_budget(p as u32),
            ));
        }
        "two-flip" | "two-flip-fixing" => {
            v.push(Verdict::at_most("edges", n, 16 * p + 15));
            v.push(Verdict::at_least("longest_forced_path", max_path, 2));
        }
        "pairing" => {
            v.push(Verdict::exactly("edges", n, p));
            v.push(Verdict::exactly(
                "max_indegree",
                peak(steps),
                greedy_max_bound(p),
            ));
        }
        other => {
            return Err(Error::RejectedInput(format!(
                "unknown construction `{other}`"
            )));
        }
    }
    Ok(v)
}

/// Checks a trace from scratch: step indices and prefix sums, summary
/// totals, and every bound verdict, which must also match the recorded ones.
pub fn verify(trace: &TraceFile) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let structure = check_prefix_sums(&trace.steps);
    out.push(Verdict::exactly(
        "prefix_sums",
        u64::from(structure.is_ok()),
        1,
    ));
    let expected = summarize(&trace.steps, Vec::new());
    out.push(Verdict::exactly(
        "summary_steps",
        trace.summary.steps,
        expected.steps,
    ));
    out.push(Verdict::exactly(
        "summary_total",
        trace.summary.total,
        expected.total,
    ));
    out.push(Verdict::exactly(
        "summary_max_step",
        trace.summary.max_step,
        expected.max_step,
    ));
    out.push(Verdict::exactly(
        "summary_final_max",
        trace.summary.final_max,
        expected.final_max,
    ));
    let fresh = evaluate(&trace.header, &trace.steps)?;
    out.push(Verdict::exactly(
        "recorded_verdicts_match",
        u64::from(fresh == trace.summary.verdicts),
        1,
    ));
    out.extend(fresh);
    Ok(out)
}
