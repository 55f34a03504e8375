//! Parallel property-suite runner. Trials are cut into chunks, run on a
//! rayon pool, and merged per property; the merge is order-free so the
//! report does not depend on the thread count.

use rayon::prelude::*;
use skewcoh_core::properties::{
    run_trials, suite_properties, validate_request, PropertyReport, PropertySpec,
};

use crate::error::CliError;

const CHUNK: usize = 25;

struct WorkItem {
    property: usize,
    dim: usize,
    start: usize,
    end: usize,
}

fn work_items(specs: &[&'static PropertySpec], trials: usize, dims: &[usize]) -> Vec<WorkItem> {
    let mut items = Vec::new();
    for (property, spec) in specs.iter().enumerate() {
        let n = spec.trials_for(trials);
        for dim in spec.dims_for(dims) {
            let mut start = 0;
            while start < n {
                let end = (start + CHUNK).min(n);
                items.push(WorkItem {
                    property,
                    dim,
                    start,
                    end,
                });
                start = end;
            }
        }
    }
    items
}

/// Runs a named suite on `jobs` threads (0 = rayon's default).
pub fn run_suite_parallel(
    suite: &str,
    trials: usize,
    dims: &[usize],
    seed: u64,
    jobs: usize,
) -> Result<Vec<PropertyReport>, CliError> {
    let specs = suite_properties(suite)?;
    validate_request(trials, dims)?;
    let items = work_items(&specs, trials, dims);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::argument("--jobs", e.to_string()))?;
    let parts: Vec<(usize, PropertyReport)> = pool.install(|| {
        items
            .par_iter()
            .map(|w| {
                (
                    w.property,
                    run_trials(specs[w.property], w.dim, seed, w.start..w.end),
                )
            })
            .collect()
    });
    let mut reports: Vec<PropertyReport> = specs.iter().map(|s| PropertyReport::empty(s)).collect();
    for (i, part) in parts {
        reports[i] = reports[i].merge(&part)?;
    }
    Ok(reports)
}

pub fn all_pass(reports: &[PropertyReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use skewcoh_core::properties::run_property_suite;

    #[test]
    fn parallel_matches_serial() {
        let serial = run_property_suite("inequalities", 60, &[2, 3], 5).unwrap();
        for jobs in [1, 3] {
            assert_eq!(
                run_suite_parallel("inequalities", 60, &[2, 3], 5, jobs).unwrap(),
                serial
            );
        }
    }
}
