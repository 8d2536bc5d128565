use serde::{Deserialize, Serialize};

/// One metric row: iteration count, squared Wasserstein-2 distance to the
/// target, and cumulative wall-clock seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub iteration: u64,
    pub w22: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Diverged { iteration: u64, reason: String },
    Failed { iteration: u64, reason: String },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

/// Per-run metric trace. Iterations are strictly increasing, wall time
/// non-decreasing, and every stored distance is finite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunHistory {
    pub records: Vec<MetricRecord>,
    pub status: RunStatus,
    /// Recoverable per-iteration failures (rank deficiency, duplicates).
    pub events: Vec<String>,
}

impl RunHistory {
    pub fn new() -> Self {
        Self { records: Vec::new(), status: RunStatus::Completed, events: Vec::new() }
    }

    pub fn push(&mut self, record: MetricRecord) {
        assert!(record.w22.is_finite(), "history only stores finite metrics");
        if let Some(last) = self.records.last() {
            assert!(record.iteration > last.iteration, "iterations must increase");
            assert!(record.wall_seconds >= last.wall_seconds, "wall time must not decrease");
        }
        self.records.push(record);
    }

    pub fn initial_w22(&self) -> Option<f64> {
        self.records.first().map(|r| r.w22)
    }

    pub fn final_w22(&self) -> Option<f64> {
        self.records.last().map(|r| r.w22)
    }

    /// Smallest distance seen at any recorded iteration.
    pub fn best_w22(&self) -> Option<f64> {
        self.records.iter().map(|r| r.w22).min_by(|a, b| a.partial_cmp(b).unwrap())
    }

    /// CSV with the fixed header `iteration,w22,wall_seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,w22,wall_seconds\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{:.3}\n", r.iteration, r.w22, r.wall_seconds));
        }
        out
    }
}

impl Default for RunHistory {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format_is_stable() {
        let mut h = RunHistory::new();
        h.push(MetricRecord { iteration: 0, w22: 24.5, wall_seconds: 0.0 });
        h.push(MetricRecord { iteration: 100, w22: 1.25, wall_seconds: 0.5004 });
        assert_eq!(h.to_csv(), "iteration,w22,wall_seconds\n0,24.5,0.000\n100,1.25,0.500\n");
    }

    #[test]
    #[should_panic(expected = "iterations must increase")]
    fn iteration_order_enforced() {
        let mut h = RunHistory::new();
        h.push(MetricRecord { iteration: 5, w22: 1.0, wall_seconds: 0.0 });
        h.push(MetricRecord { iteration: 5, w22: 1.0, wall_seconds: 0.1 });
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn non_finite_metrics_rejected() {
        let mut h = RunHistory::new();
        h.push(MetricRecord { iteration: 0, w22: f64::NAN, wall_seconds: 0.0 });
    }
}
