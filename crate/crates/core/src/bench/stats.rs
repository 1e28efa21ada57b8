use std::collections::BTreeMap;

use super::{Budget, RunTrace};

/// Mean with the half-width of its 95% confidence interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// `1.96 · sd / √n`; absent below two samples.
    pub ci95: Option<f64>,
}

/// Normal-approximation interval with the sample standard deviation.
/// Values are summed in sorted order so the result does not depend on
/// input order.
pub fn mean_ci95(values: &[f64]) -> Option<Estimate> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ci95 = (v.len() >= 2).then(|| {
        let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
        dev.sort_by(f64::total_cmp);
        let var = dev.iter().sum::<f64>() / (n - 1.0);
        1.96 * var.sqrt() / n.sqrt()
    });
    Some(Estimate { mean, ci95 })
}

/// Aggregate of one (scenario, planner, budget) group over its seeds.
/// Statistics cover successful runs only and are absent when none
/// succeeded.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub planner: String,
    pub budget: Budget,
    pub n_success: usize,
    pub n_total: usize,
    pub length: Option<Estimate>,
    pub exec: Option<Estimate>,
    /// Only for time budgets.
    pub cycle: Option<Estimate>,
    pub mean_local_opts: Option<f64>,
}

impl SummaryRow {
    pub fn success_rate(&self) -> f64 {
        self.n_success as f64 / self.n_total as f64
    }
}

/// Groups runs and computes per-group statistics, sorted by scenario,
/// planner and budget. `speed` converts length into execution time.
pub fn summarize(runs: &[RunTrace], speed: f64) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(&str, &str, Budget), Vec<&RunTrace>> = BTreeMap::new();
    for r in runs {
        groups
            .entry((r.scenario.as_str(), r.planner.as_str(), r.budget))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((scenario, planner, budget), members)| {
            let mut lengths = Vec::new();
            let mut execs = Vec::new();
            let mut cycles = Vec::new();
            let mut opts = Vec::new();
            for r in &members {
                let filled = r.trace.backfilled();
                let len = filled.final_length();
                if !len.is_finite() {
                    continue;
                }
                let exec = len / speed;
                lengths.push(len);
                execs.push(exec);
                opts.push(r.local_opt_count() as f64);
                if let Budget::Seconds(b) = budget {
                    if let Some(c) = super::cycle_time(b, r.first_solution_time, exec) {
                        cycles.push(c);
                    }
                }
            }
            SummaryRow {
                scenario: scenario.to_string(),
                planner: planner.to_string(),
                budget,
                n_success: lengths.len(),
                n_total: members.len(),
                length: mean_ci95(&lengths),
                exec: mean_ci95(&execs),
                cycle: mean_ci95(&cycles),
                mean_local_opts: mean_ci95(&opts).map(|e| e.mean),
            }
        })
        .collect()
}
