//! Anytime metrics: the lock-free snapshot a planner publishes while it
//! runs, and the time-stamped trace recorded from it.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

/// State a running planner publishes for observers on other threads.
/// Writes are relaxed atomics; readers never block the planner.
#[derive(Debug)]
pub struct Snapshot {
    best_cost: AtomicU64,
    vertex_count: AtomicU64,
    local_opt_count: AtomicU64,
    iteration: AtomicU64,
    solution_found: AtomicBool,
    finished: AtomicBool,
}

impl Default for Snapshot {
    fn default() -> Self {
        Snapshot {
            best_cost: AtomicU64::new(f64::INFINITY.to_bits()),
            vertex_count: AtomicU64::new(0),
            local_opt_count: AtomicU64::new(0),
            iteration: AtomicU64::new(0),
            solution_found: AtomicBool::new(false),
            finished: AtomicBool::new(false),
        }
    }
}

/// Plain copy of a [`Snapshot`] at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotView {
    pub best_cost: f64,
    pub vertex_count: u64,
    pub local_opt_count: u64,
    pub iteration: u64,
    pub solution_found: bool,
    pub finished: bool,
}

impl Snapshot {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_best_cost(&self, c: f64) {
        self.best_cost.store(c.to_bits(), Ordering::Relaxed);
        if c.is_finite() {
            self.solution_found.store(true, Ordering::Relaxed);
        }
    }

    pub fn set_vertex_count(&self, n: usize) {
        self.vertex_count.store(n as u64, Ordering::Relaxed);
    }

    pub fn set_local_opt_count(&self, n: u64) {
        self.local_opt_count.store(n, Ordering::Relaxed);
    }

    pub fn set_iteration(&self, i: u64) {
        self.iteration.store(i, Ordering::Relaxed);
    }

    pub fn finish(&self) {
        self.finished.store(true, Ordering::Release);
    }

    pub fn read(&self) -> SnapshotView {
        SnapshotView {
            best_cost: f64::from_bits(self.best_cost.load(Ordering::Relaxed)),
            vertex_count: self.vertex_count.load(Ordering::Relaxed),
            local_opt_count: self.local_opt_count.load(Ordering::Relaxed),
            iteration: self.iteration.load(Ordering::Relaxed),
            solution_found: self.solution_found.load(Ordering::Relaxed),
            finished: self.finished.load(Ordering::Acquire),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSample {
    /// Seconds since the run started.
    pub t: f64,
    pub iteration: u64,
    /// Infinite until the first solution.
    pub best_length: f64,
    pub local_opt_count: u64,
}

/// Time-stamped anytime record of one planner run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsTrace {
    pub samples: Vec<TraceSample>,
    pub first_solution_time: Option<f64>,
    pub first_solution_iteration: Option<u64>,
}

impl MetricsTrace {
    /// Appends a sample, replacing the last one when it carries the same
    /// timestamp so that timestamps stay strictly increasing.
    pub fn record(&mut self, sample: TraceSample) {
        match self.samples.last_mut() {
            Some(last) if sample.t <= last.t => {
                *last = TraceSample {
                    t: last.t,
                    ..sample
                };
            }
            _ => self.samples.push(sample),
        }
    }

    pub fn last(&self) -> Option<&TraceSample> {
        self.samples.last()
    }

    pub fn final_length(&self) -> f64 {
        self.samples.last().map_or(f64::INFINITY, |s| s.best_length)
    }

    /// Checks that timestamps increase strictly and that the best length
    /// never increases once it is finite.
    pub fn check_monotone(&self) -> Result<(), String> {
        for w in self.samples.windows(2) {
            if w[1].t <= w[0].t {
                return Err(format!(
                    "timestamps not increasing: {} then {}",
                    w[0].t, w[1].t
                ));
            }
            if w[0].best_length.is_finite() && w[1].best_length > w[0].best_length {
                return Err(format!(
                    "best length increased from {} to {} at t = {}",
                    w[0].best_length, w[1].best_length, w[1].t
                ));
            }
        }
        Ok(())
    }

    /// Copy where samples taken before the first solution carry the first
    /// solution's length instead of infinity.
    pub fn backfilled(&self) -> MetricsTrace {
        let first = self
            .samples
            .iter()
            .find(|s| s.best_length.is_finite())
            .copied();
        let mut out = self.clone();
        if let Some(first) = first {
            for s in out.samples.iter_mut() {
                if !s.best_length.is_finite() {
                    s.best_length = first.best_length;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64, best_length: f64) -> TraceSample {
        TraceSample {
            t,
            iteration: 0,
            best_length,
            local_opt_count: 0,
        }
    }

    #[test]
    fn record_merges_equal_timestamps() {
        let mut tr = MetricsTrace::default();
        tr.record(sample(0.0, f64::INFINITY));
        tr.record(sample(1.0, 5.0));
        tr.record(sample(1.0, 4.0));
        assert_eq!(tr.samples.len(), 2);
        assert_eq!(tr.final_length(), 4.0);
        assert!(tr.check_monotone().is_ok());
        tr.samples.push(sample(2.0, 4.5));
        assert!(tr.check_monotone().is_err());
    }

    #[test]
    fn backfill_uses_first_solution() {
        let mut tr = MetricsTrace::default();
        tr.record(sample(0.1, f64::INFINITY));
        tr.record(sample(0.2, f64::INFINITY));
        tr.record(sample(0.3, 7.0));
        tr.record(sample(0.4, 6.0));
        let b = tr.backfilled();
        let lengths: Vec<f64> = b.samples.iter().map(|s| s.best_length).collect();
        assert_eq!(lengths, vec![7.0, 7.0, 7.0, 6.0]);
    }

    #[test]
    fn snapshot_round_trip() {
        let s = Snapshot::new();
        assert!(!s.read().solution_found);
        s.set_best_cost(3.5);
        s.set_vertex_count(10);
        let v = s.read();
        assert_eq!(v.best_cost, 3.5);
        assert!(v.solution_found);
        assert_eq!(v.vertex_count, 10);
    }
}
