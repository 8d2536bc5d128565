use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polygan::generator::Generator;
use polygan::harness::{
    run, sweep_csv, sweep_m, write_run_outputs, RunSpec, RunStatus, TargetSpec,
};
use polygan::metrics::{mode_coverage, w22_empirical, w22_gaussian, GaussianMoments};
use polygan::numerics::{DenseMatrix, SeededRng};

const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "polygan",
    about = "Closed-form polyharmonic RBF discriminators on synthetic Gaussian benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one configuration and write history.csv / samples_final.csv / run.json.
    Run {
        /// JSON experiment file (training fields plus "target").
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Train the same configuration across several gradient orders.
    SweepM {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated list of gradient orders, e.g. 1,2,4,6.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate a generator checkpoint against a target distribution.
    Eval {
        /// generator.json written by `run`.
        #[arg(long)]
        checkpoint: PathBuf,
        /// JSON TargetSpec file.
        #[arg(long)]
        target: PathBuf,
        /// Generated sample count for the estimate.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Run { config, out } => cmd_run(&config, &out),
        Command::SweepM { config, m, out } => cmd_sweep(&config, &m, &out),
        Command::Eval { checkpoint, target, samples, seed } => {
            cmd_eval(&checkpoint, &target, samples, seed)
        }
    }
}

fn load_spec(path: &PathBuf) -> Result<RunSpec, ExitCode> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(EXIT_CONFIG));
        }
    };
    match RunSpec::from_json(&text) {
        Ok(spec) => Ok(spec),
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(EXIT_CONFIG))
        }
    }
}

fn cmd_run(config: &PathBuf, out: &PathBuf) -> Result<ExitCode, String> {
    let spec = match load_spec(config) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let result = run(&spec).map_err(|e| e.to_string())?;
    write_run_outputs(out, &result).map_err(|e| e.to_string())?;
    let (code, label) = match &result.history.status {
        RunStatus::Completed => (ExitCode::SUCCESS, "completed".to_string()),
        RunStatus::Diverged { iteration, reason } => (
            ExitCode::from(EXIT_DIVERGED),
            format!("diverged at iteration {iteration}: {reason}"),
        ),
        RunStatus::Failed { iteration, reason } => (
            ExitCode::from(EXIT_NUMERICAL),
            format!("failed at iteration {iteration}: {reason}"),
        ),
    };
    let final_w22 = result.history.final_w22().unwrap_or(f64::NAN);
    println!("{label}: final w22 = {final_w22:.6} (outputs in {})", out.display());
    Ok(code)
}

fn cmd_sweep(config: &PathBuf, m_list: &[u32], out: &PathBuf) -> Result<ExitCode, String> {
    let spec = match load_spec(config) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    if m_list.is_empty() {
        eprintln!("error: --m needs at least one order");
        return Ok(ExitCode::from(EXIT_CONFIG));
    }
    let entries = sweep_m(&spec, m_list);
    fs::create_dir_all(out).map_err(|e| e.to_string())?;
    fs::write(out.join("sweep.csv"), sweep_csv(&entries)).map_err(|e| e.to_string())?;
    let mut any_ok = false;
    for entry in &entries {
        match &entry.outcome {
            Ok(result) => {
                any_ok = true;
                let dir = out.join(format!("m_{}", entry.m));
                write_run_outputs(&dir, result).map_err(|e| e.to_string())?;
                println!(
                    "m = {}: final w22 = {:.6} ({:?})",
                    entry.m,
                    result.history.final_w22().unwrap_or(f64::NAN),
                    result.history.status
                );
            }
            Err(e) => println!("m = {}: error: {e}", entry.m),
        }
    }
    Ok(if any_ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NUMERICAL) })
}

fn cmd_eval(
    checkpoint: &PathBuf,
    target: &PathBuf,
    samples: usize,
    seed: u64,
) -> Result<ExitCode, String> {
    let gen_text = match fs::read_to_string(checkpoint) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", checkpoint.display());
            return Ok(ExitCode::from(EXIT_CONFIG));
        }
    };
    let generator = match Generator::from_json(&gen_text) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_CONFIG));
        }
    };
    let target_text = match fs::read_to_string(target) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", target.display());
            return Ok(ExitCode::from(EXIT_CONFIG));
        }
    };
    let target: TargetSpec = match serde_json::from_str(&target_text) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: invalid target spec: {e}");
            return Ok(ExitCode::from(EXIT_CONFIG));
        }
    };

    let mut rng = SeededRng::derive(seed, 97);
    let generated = generator.sample(&mut rng, samples.max(2));
    let report = if let Some(moments) = target.moments().map_err(|e| e.to_string())? {
        let estimated = GaussianMoments::estimate(&generated).map_err(|e| e.to_string())?;
        let w22 = w22_gaussian(&estimated, &moments).map_err(|e| e.to_string())?;
        serde_json::json!({ "metric": "w22_gaussian", "samples": generated.rows(), "w22": w22 })
    } else {
        let sampler = target.build_sampler().map_err(|e| e.to_string())?;
        let count = generated.rows().min(2000);
        let mut fake_rows = Vec::with_capacity(count);
        for i in 0..count {
            fake_rows.push(generated.row(i).to_vec());
        }
        let fakes = DenseMatrix::from_rows(&fake_rows).map_err(|e| e.to_string())?;
        let reals = sampler.sample(&mut rng, count);
        let w22 = w22_empirical(&fakes, &reals).map_err(|e| e.to_string())?;
        let coverage = mode_coverage(&generated, &target.mode_means(), 0.1);
        serde_json::json!({
            "metric": "w22_empirical",
            "samples": count,
            "w22": w22,
            "mode_coverage": coverage,
        })
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(ExitCode::SUCCESS)
}
