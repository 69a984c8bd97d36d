use serde::{Deserialize, Serialize};

/// Per-arrival trace entry shared by every algorithm.
///
/// For orientation algorithms `flips` counts reoriented edges and
/// `max_in_degree` is the maximum in-degree after the step. For b-matching
/// `flips` counts swaps and `max_in_degree` holds the maximum right-side load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    #[serde(rename = "flips_or_swaps")]
    pub flips: u64,
    #[serde(rename = "cumulative")]
    pub cumulative_flips: u64,
    #[serde(rename = "max_indegree_or_load")]
    pub max_in_degree: u64,
    #[serde(rename = "path_length")]
    pub path_length_used: u64,
}

/// Checks that cumulative counts are prefix sums and step indices are consecutive.
pub fn check_prefix_sums(trace: &[StepRecord]) -> Result<(), String> {
    let mut total = 0u64;
    for (i, rec) in trace.iter().enumerate() {
        if rec.step != i {
            return Err(format!("record {i} carries step index {}", rec.step));
        }
        total += rec.flips;
        if rec.cumulative_flips != total {
            return Err(format!(
                "step {i}: cumulative {} but prefix sum is {total}",
                rec.cumulative_flips
            ));
        }
    }
    Ok(())
}
