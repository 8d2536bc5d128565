use std::time::Instant;

use super::config::{Algorithm, GeneratorConfig, GeneratorKind, LambdaMode, TimingMode};
use super::history::{MetricRecord, RunHistory, RunStatus};
use super::target::TargetSampler;
use super::{HarnessError, Result, RunSpec};
use crate::discriminators::{
    build_w_discriminator, estimate_lambda_bound, fit_ls_discriminator, DiscriminatorError,
};
use crate::generator::{
    adam_step, lsgan_generator_loss_and_grad, wgan_generator_grad, AdamState, AffineGenerator,
    Generator, GeneratorError, MlpGenerator,
};
use crate::metrics::{mmd_sq_grad_x, w22_empirical, w22_gaussian, GaussianMoments};
use crate::numerics::{DenseMatrix, SeededRng};
use crate::polyharmonic::{compute_constants, PolyKernel};

/// Generator sample count for moment estimation on unimodal targets.
const MOMENT_SAMPLES: usize = 10_000;
/// Sample count per side for the empirical distance on mixture targets.
const EMPIRICAL_SAMPLES: usize = 1_000;
/// Number of generated points written to `samples_final.csv`.
pub const FINAL_SAMPLE_COUNT: usize = 2_000;
/// A run is declared diverged once the metric exceeds this multiple of its
/// initial value.
const DIVERGENCE_RATIO: f64 = 10.0;

/// Derived stream labels, so initialization, training, metric evaluation and
/// the final sample dump each consume an independent substream of the seed.
mod streams {
    pub const INIT: u64 = 1;
    pub const TRAIN: u64 = 2;
    pub const METRIC: u64 = 3;
    pub const FINAL: u64 = 4;
}

#[derive(Debug)]
pub struct RunResult {
    pub spec: RunSpec,
    pub history: RunHistory,
    pub generator: Generator,
}

impl RunResult {
    /// Final generated batch, drawn from its own seed stream.
    pub fn final_samples(&self) -> DenseMatrix {
        let mut rng = SeededRng::derive(self.spec.train.seed, streams::FINAL);
        self.generator.sample(&mut rng, FINAL_SAMPLE_COUNT)
    }
}

/// Execute one training run. Divergence and recoverable numerical failures
/// land in the returned history's status; hard setup errors are `Err`.
pub fn run(spec: &RunSpec) -> Result<RunResult> {
    spec.validate()?;
    match spec.train.algorithm {
        Algorithm::PolyWgan => run_poly_wgan(spec),
        Algorithm::PolyLsgan => run_poly_lsgan(spec),
        Algorithm::GmmnRbfg | Algorithm::GmmnImq => run_gmmn(spec),
    }
}

struct Trainer {
    target: TargetSampler,
    target_moments: Option<GaussianMoments>,
    gen: Generator,
    adam: AdamState,
    rng_train: SeededRng,
    rng_eval: SeededRng,
    history: RunHistory,
    start: Instant,
    timing: TimingMode,
    noise_buf: DenseMatrix,
}

enum Step {
    Continue,
    Stop(RunStatus),
}

impl Trainer {
    fn new(spec: &RunSpec) -> Result<Self> {
        let target = spec.target.build_sampler()?;
        let target_moments = spec.target.moments()?;
        let mut rng_init = SeededRng::derive(spec.train.seed, streams::INIT);
        let gen = build_generator(spec, &mut rng_init)?;
        let adam = AdamState::new(gen.param_count(), spec.train.generator_lr);
        Ok(Self {
            target,
            target_moments,
            gen,
            adam,
            rng_train: SeededRng::derive(spec.train.seed, streams::TRAIN),
            rng_eval: SeededRng::derive(spec.train.seed, streams::METRIC),
            history: RunHistory::new(),
            start: Instant::now(),
            timing: spec.train.timing,
            noise_buf: DenseMatrix::zeros(0, 0),
        })
    }

    fn wall_seconds(&self) -> f64 {
        match self.timing {
            TimingMode::Real => self.start.elapsed().as_secs_f64(),
            TimingMode::None => 0.0,
        }
    }

    fn noise(&mut self, count: usize) -> DenseMatrix {
        let dim = self.gen.noise_dim();
        if self.noise_buf.rows() != count || self.noise_buf.cols() != dim {
            self.noise_buf = DenseMatrix::zeros(count, dim);
        }
        for i in 0..count {
            self.rng_train.fill_standard_normal(self.noise_buf.row_mut(i));
        }
        self.noise_buf.clone()
    }

    /// Distance between the current generator distribution and the target:
    /// closed-form moment distance for unimodal Gaussian targets, exact
    /// empirical assignment distance for mixtures.
    fn current_w22(&mut self) -> Result<f64> {
        match &self.target_moments {
            Some(target) => {
                let samples = self.gen.sample(&mut self.rng_eval, MOMENT_SAMPLES);
                if !samples.data().iter().all(|v| v.is_finite()) {
                    return Ok(f64::INFINITY);
                }
                let moments = GaussianMoments::estimate(&samples)?;
                Ok(w22_gaussian(&moments, target)?)
            }
            None => {
                let fakes = self.gen.sample(&mut self.rng_eval, EMPIRICAL_SAMPLES);
                if !fakes.data().iter().all(|v| v.is_finite()) {
                    return Ok(f64::INFINITY);
                }
                let reals = self.target.sample(&mut self.rng_eval, EMPIRICAL_SAMPLES);
                Ok(w22_empirical(&fakes, &reals)?)
            }
        }
    }

    /// Record the metric at `iteration`; flags divergence against the initial
    /// value recorded at iteration zero.
    fn record(&mut self, iteration: u64) -> Result<Step> {
        let w22 = self.current_w22()?;
        if !w22.is_finite() {
            return Ok(Step::Stop(RunStatus::Diverged {
                iteration,
                reason: "non-finite distance estimate".into(),
            }));
        }
        let record = MetricRecord { iteration, w22, wall_seconds: self.wall_seconds() };
        self.history.push(record);
        if let Some(initial) = self.history.initial_w22() {
            if iteration > 0 && w22 > DIVERGENCE_RATIO * initial {
                return Ok(Step::Stop(RunStatus::Diverged {
                    iteration,
                    reason: format!("distance {w22:.3e} exceeds 10x initial {initial:.3e}"),
                }));
            }
        }
        Ok(Step::Continue)
    }
}

fn build_generator(spec: &RunSpec, rng: &mut SeededRng) -> Result<Generator> {
    let n = spec.train.n;
    let config = spec.train.generator.clone().unwrap_or_else(|| default_generator(spec));
    Ok(match config.kind {
        GeneratorKind::Affine => {
            let noise_dim = config.noise_dim.unwrap_or(n).max(n);
            Generator::Affine(AffineGenerator::new_identity(n, noise_dim))
        }
        GeneratorKind::Mlp => {
            let noise_dim = config.noise_dim.unwrap_or(8);
            let mut sizes = vec![noise_dim];
            sizes.extend_from_slice(&config.hidden);
            sizes.push(n);
            Generator::Mlp(MlpGenerator::new(&sizes, config.activation, rng))
        }
    })
}

fn default_generator(spec: &RunSpec) -> GeneratorConfig {
    if spec.target.is_unimodal_gaussian() {
        GeneratorConfig {
            kind: GeneratorKind::Affine,
            noise_dim: None,
            hidden: Vec::new(),
            activation: crate::generator::Activation::LeakyRelu,
        }
    } else {
        GeneratorConfig {
            kind: GeneratorKind::Mlp,
            noise_dim: Some(8),
            hidden: vec![32, 32],
            activation: crate::generator::Activation::LeakyRelu,
        }
    }
}

/// Fixed-weight critic loop: per iteration, draw fresh fake/real center
/// batches, rebuild the critic, and take one optimizer step on the generator.
pub fn run_poly_wgan(spec: &RunSpec) -> Result<RunResult> {
    let m = spec.train.effective_m();
    let n = spec.train.n as u32;
    let kernel = PolyKernel::new(m, n)?;
    let constants = compute_constants(m, n)?;
    let mut t = Trainer::new(spec)?;
    let centers = spec.train.rbf_centers;
    let batch = spec.train.batch_size;

    if let Step::Stop(status) = t.record(0)? {
        t.history.status = status;
        return Ok(RunResult { spec: spec.clone(), history: t.history, generator: t.gen });
    }

    for iteration in 1..=spec.train.iterations {
        let z_batch = t.noise(batch);
        let z_centers = t.noise(centers);
        let fake_centers = t.gen.forward_inference(&z_centers)?;
        let real_centers = t.target.sample(&mut t.rng_train, centers);

        let lambda = match spec.train.lambda {
            LambdaMode::Fixed { value } => value,
            LambdaMode::Bound => {
                let points = t.gen.forward_inference(&z_batch)?;
                match estimate_lambda_bound(
                    &kernel,
                    &constants,
                    &fake_centers,
                    &real_centers,
                    &points,
                    1.0,
                ) {
                    Ok(v) => v,
                    Err(e) => {
                        t.history.status = failure_status(iteration, &e.to_string());
                        break;
                    }
                }
            }
        };

        let critic =
            match build_w_discriminator(kernel, &constants, fake_centers, real_centers, lambda) {
                Ok(c) => c,
                Err(e) => {
                    t.history.status = failure_status(iteration, &e.to_string());
                    break;
                }
            };

        let grads = match wgan_generator_grad(&mut t.gen, &z_batch, &critic) {
            Ok(g) => g,
            Err(GeneratorError::Discriminator(DiscriminatorError::Kernel(e))) => {
                t.history.status = failure_status(iteration, &e.to_string());
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let mut params = t.gen.params_flat();
        match adam_step(&mut t.adam, &mut params, &grads) {
            Ok(()) => t.gen.set_params_flat(&params)?,
            Err(GeneratorError::NonFiniteGradient { step }) => {
                t.history.status = RunStatus::Diverged {
                    iteration,
                    reason: format!("non-finite gradient at optimizer step {step}"),
                };
                break;
            }
            Err(e) => return Err(e.into()),
        }

        if iteration % spec.train.metric_cadence == 0 || iteration == spec.train.iterations {
            if let Step::Stop(status) = t.record(iteration)? {
                t.history.status = status;
                break;
            }
        }
    }

    Ok(RunResult { spec: spec.clone(), history: t.history, generator: t.gen })
}

/// Saddle-point discriminator loop: refit the interpolant on every fresh
/// center batch; rank-deficient batches are logged and skipped, not fatal.
pub fn run_poly_lsgan(spec: &RunSpec) -> Result<RunResult> {
    let m = spec.train.effective_m();
    let n = spec.train.n as u32;
    let kernel = PolyKernel::new(m, n)?;
    let mut t = Trainer::new(spec)?;
    let centers = spec.train.rbf_centers;
    let batch = spec.train.batch_size;
    let labels = spec.train.labels;
    let lambda = match spec.train.lambda {
        LambdaMode::Fixed { value } => value,
        LambdaMode::Bound => unreachable!("rejected by validation"),
    };

    if let Step::Stop(status) = t.record(0)? {
        t.history.status = status;
        return Ok(RunResult { spec: spec.clone(), history: t.history, generator: t.gen });
    }

    for iteration in 1..=spec.train.iterations {
        let real_centers = t.target.sample(&mut t.rng_train, centers);
        let z_centers = t.noise(centers);
        let fake_centers = t.gen.forward_inference(&z_centers)?;

        // Reals first, fakes second; labels follow the same order.
        let mut rows = Vec::with_capacity(2 * centers);
        for i in 0..centers {
            rows.push(real_centers.row(i).to_vec());
        }
        for i in 0..centers {
            rows.push(fake_centers.row(i).to_vec());
        }
        let all_centers = DenseMatrix::from_rows(&rows)?;
        let mut y = vec![labels.b; centers];
        y.extend(std::iter::repeat(labels.a).take(centers));

        let disc = match fit_ls_discriminator(kernel, all_centers, y, lambda, spec.train.c_k) {
            Ok(d) => d,
            Err(
                e @ (DiscriminatorError::RankDeficientB
                | DiscriminatorError::DuplicateCenters { .. }),
            ) => {
                t.history.events.push(format!("iteration {iteration}: {e}"));
                continue;
            }
            Err(e) => {
                t.history.status = failure_status(iteration, &e.to_string());
                break;
            }
        };

        let z_batch = t.noise(batch);
        let (_, grads) =
            match lsgan_generator_loss_and_grad(&mut t.gen, &z_batch, &disc, labels.c) {
                Ok(v) => v,
                Err(GeneratorError::Discriminator(DiscriminatorError::Kernel(e))) => {
                    t.history.status = failure_status(iteration, &e.to_string());
                    break;
                }
                Err(e) => return Err(e.into()),
            };
        let mut params = t.gen.params_flat();
        match adam_step(&mut t.adam, &mut params, &grads) {
            Ok(()) => t.gen.set_params_flat(&params)?,
            Err(GeneratorError::NonFiniteGradient { step }) => {
                t.history.status = RunStatus::Diverged {
                    iteration,
                    reason: format!("non-finite gradient at optimizer step {step}"),
                };
                break;
            }
            Err(e) => return Err(e.into()),
        }

        if iteration % spec.train.metric_cadence == 0 || iteration == spec.train.iterations {
            if let Step::Stop(status) = t.record(iteration)? {
                t.history.status = status;
                break;
            }
        }
    }

    Ok(RunResult { spec: spec.clone(), history: t.history, generator: t.gen })
}

/// Moment-matching baseline: the generator descends the squared-MMD statistic
/// between its batch and a fresh real batch.
pub fn run_gmmn(spec: &RunSpec) -> Result<RunResult> {
    let kernel = spec.mmd_kernel().expect("validated GMMN config");
    let mut t = Trainer::new(spec)?;
    let batch = spec.train.batch_size;

    if let Step::Stop(status) = t.record(0)? {
        t.history.status = status;
        return Ok(RunResult { spec: spec.clone(), history: t.history, generator: t.gen });
    }

    for iteration in 1..=spec.train.iterations {
        let reals = t.target.sample(&mut t.rng_train, batch);
        let z_batch = t.noise(batch);
        let fakes = t.gen.forward(&z_batch)?;
        let (_, grad_x) = mmd_sq_grad_x(&fakes, &reals, &kernel)?;
        let grads = t.gen.backward(&grad_x)?;
        let mut params = t.gen.params_flat();
        match adam_step(&mut t.adam, &mut params, &grads) {
            Ok(()) => t.gen.set_params_flat(&params)?,
            Err(GeneratorError::NonFiniteGradient { step }) => {
                t.history.status = RunStatus::Diverged {
                    iteration,
                    reason: format!("non-finite gradient at optimizer step {step}"),
                };
                break;
            }
            Err(e) => return Err(e.into()),
        }

        if iteration % spec.train.metric_cadence == 0 || iteration == spec.train.iterations {
            if let Step::Stop(status) = t.record(iteration)? {
                t.history.status = status;
                break;
            }
        }
    }

    Ok(RunResult { spec: spec.clone(), history: t.history, generator: t.gen })
}

fn failure_status(iteration: u64, reason: &str) -> RunStatus {
    RunStatus::Failed { iteration, reason: reason.to_string() }
}

impl From<crate::polyharmonic::PolyharmonicError> for HarnessError {
    fn from(e: crate::polyharmonic::PolyharmonicError) -> Self {
        HarnessError::Numerical(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{Algorithm, TrainConfig};
    use crate::harness::TargetSpec;
    use crate::discriminators::ClassLabels;

    fn quick_spec(algorithm: Algorithm, iterations: u64) -> RunSpec {
        RunSpec {
            train: TrainConfig {
                algorithm,
                n: 2,
                m: None,
                rbf_centers: 16,
                batch_size: 32,
                generator_lr: 0.002,
                iterations,
                metric_cadence: 10,
                lambda: LambdaMode::default(),
                seed: 11,
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
    fn zero_iterations_yields_single_record() {
        for alg in [Algorithm::PolyWgan, Algorithm::PolyLsgan, Algorithm::GmmnRbfg] {
            let result = run(&quick_spec(alg, 0)).unwrap();
            assert_eq!(result.history.records.len(), 1);
            assert_eq!(result.history.records[0].iteration, 0);
            assert!(result.history.status.is_completed());
        }
    }

    #[test]
    fn initial_metric_matches_identity_generator() {
        // Affine identity generator outputs N(0, I); against N(3.5 1, 1.25 I)
        // the distance is 24.5279, estimated from 10^4 samples.
        let result = run(&quick_spec(Algorithm::PolyWgan, 0)).unwrap();
        let w0 = result.history.records[0].w22;
        assert!((w0 - 24.5279).abs() / 24.5279 < 0.05, "initial w22 = {w0}");
    }

    #[test]
    fn short_wgan_run_improves_and_is_deterministic() {
        let spec = quick_spec(Algorithm::PolyWgan, 300);
        let a = run(&spec).unwrap();
        let b = run(&spec).unwrap();
        assert_eq!(a.history.to_csv(), b.history.to_csv());
        assert!(a.history.status.is_completed());
        let first = a.history.initial_w22().unwrap();
        let last = a.history.final_w22().unwrap();
        assert!(last < first, "no improvement: {first} -> {last}");
    }

    #[test]
    fn collapsed_target_triggers_lsgan_rank_events() {
        // All real centers identical: the fit must reject the batch, log the
        // event, and keep running.
        let mut spec = quick_spec(Algorithm::PolyLsgan, 3);
        spec.target = TargetSpec::Gaussian {
            mean: vec![1.0, 1.0],
            cov: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        };
        let result = run(&spec).unwrap();
        assert!(!result.history.events.is_empty());
        assert!(result.history.status.is_completed());
    }

    #[test]
    fn lambda_bound_mode_runs() {
        let mut spec = quick_spec(Algorithm::PolyWgan, 20);
        spec.train.lambda = LambdaMode::Bound;
        let result = run(&spec).unwrap();
        assert!(result.history.status.is_completed());
    }

    #[test]
    fn final_samples_are_deterministic() {
        let spec = quick_spec(Algorithm::PolyWgan, 10);
        let a = run(&spec).unwrap().final_samples();
        let b = run(&spec).unwrap().final_samples();
        assert_eq!(a.data(), b.data());
        assert_eq!(a.rows(), FINAL_SAMPLE_COUNT);
    }
}
