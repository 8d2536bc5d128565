use super::run::{run, RunResult};
use super::RunSpec;

/// Outcome of one order in a sweep: a finished run or the error message that
/// stopped it (the sweep itself continues either way).
pub struct SweepEntry {
    pub m: u32,
    pub outcome: Result<RunResult, String>,
}

/// Run the same experiment once per gradient order, sharing the seed. Runs
/// execute on their own threads; each owns its RNG streams, so results are
/// identical to running them one by one.
pub fn sweep_m(spec: &RunSpec, m_list: &[u32]) -> Vec<SweepEntry> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = m_list
            .iter()
            .map(|&m| {
                let mut per_run = spec.clone();
                per_run.train.m = Some(m);
                scope.spawn(move || SweepEntry {
                    m,
                    outcome: run(&per_run).map_err(|e| e.to_string()),
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep thread panicked")).collect()
    })
}

/// Combined long-format CSV over all sweep entries.
pub fn sweep_csv(entries: &[SweepEntry]) -> String {
    let mut out = String::from("m,iteration,w22,wall_seconds\n");
    for entry in entries {
        if let Ok(result) = &entry.outcome {
            for r in &result.history.records {
                out.push_str(&format!(
                    "{},{},{},{:.3}\n",
                    entry.m, r.iteration, r.w22, r.wall_seconds
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discriminators::ClassLabels;
    use crate::harness::config::{Algorithm, LambdaMode, TimingMode, TrainConfig};
    use crate::harness::TargetSpec;

    fn spec() -> RunSpec {
        RunSpec {
            train: TrainConfig {
                algorithm: Algorithm::PolyWgan,
                n: 2,
                m: None,
                rbf_centers: 8,
                batch_size: 16,
                generator_lr: 0.002,
                iterations: 30,
                metric_cadence: 10,
                lambda: LambdaMode::default(),
                seed: 3,
                labels: ClassLabels::default(),
                c_k: 1.0,
                generator: None,
                mmd: None,
                timing: TimingMode::None,
            },
            target: TargetSpec::gaussian_2d_wgan(),
        }
    }

    #[test]
    fn single_order_sweep_matches_direct_run() {
        let spec = spec();
        let entries = sweep_m(&spec, &[1]);
        assert_eq!(entries.len(), 1);
        let swept = entries[0].outcome.as_ref().unwrap();

        let mut direct_spec = spec.clone();
        direct_spec.train.m = Some(1);
        let direct = run(&direct_spec).unwrap();
        assert_eq!(swept.history.to_csv(), direct.history.to_csv());
    }

    #[test]
    fn failed_orders_do_not_abort_the_sweep() {
        let mut bad = spec();
        bad.train.algorithm = Algorithm::PolyLsgan;
        // m = 1 gives exponent 0 in 2-D: invalid for the least-squares fit.
        let entries = sweep_m(&bad, &[1, 2]);
        assert!(entries[0].outcome.is_err());
        assert!(entries[1].outcome.is_ok());
        let csv = sweep_csv(&entries);
        assert!(csv.starts_with("m,iteration,w22,wall_seconds\n"));
        assert!(csv.contains("\n2,0,"));
    }
}
