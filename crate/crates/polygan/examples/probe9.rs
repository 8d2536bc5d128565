use polygan::discriminators::ClassLabels;
use polygan::generator::Activation;
use polygan::harness::*;

fn spec(alg: Algorithm, seed: u64) -> RunSpec {
    RunSpec {
        train: TrainConfig {
            algorithm: alg, n: 2, m: None, rbf_centers: 100, batch_size: 500,
            generator_lr: 0.002, iterations: 6000, metric_cadence: 1000,
            lambda: LambdaMode::Fixed { value: 1.0 }, seed, labels: ClassLabels::default(),
            c_k: 1.0,
            generator: Some(GeneratorConfig {
                kind: GeneratorKind::Mlp, noise_dim: Some(8), hidden: vec![32, 32],
                activation: Activation::LeakyRelu,
            }),
            mmd: None, timing: TimingMode::None,
        },
        target: TargetSpec::gaussian_2d_wgan(),
    }
}

fn main() {
    let algs = [Algorithm::PolyWgan, Algorithm::GmmnRbfg, Algorithm::GmmnImq];
    let mut jobs: Vec<(Algorithm, u64)> = Vec::new();
    for &a in &algs { for s in 1..=5u64 { jobs.push((a, s)); } }
    let results: Vec<_> = std::thread::scope(|sc| {
        let handles: Vec<_> = jobs.iter().map(|&(a, s)| sc.spawn(move || {
            let r = run(&spec(a, s)).unwrap();
            (a, s, r.history.records.clone())
        })).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (a, s, recs) in &results {
        let row: Vec<String> = recs.iter().skip(1).map(|r| format!("{}:{:.4}", r.iteration, r.w22)).collect();
        println!("{:?} seed {}: {}", a, s, row.join(" "));
    }
}
