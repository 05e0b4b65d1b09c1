//! Train one GAN on the 8-mode ring and watch the metrics evolve.
//!
//!     cargo run --release --example train_ring -- \
//!         [--preset defaults] [--variant softmax|baseline] \
//!         [--cycles 20000] [--seed 1] [--out DIR]
//!
//! Writes log.csv, samples.csv, and scatter.svg into --out if given.

use std::time::Instant;

use softmax_gan::data::{sample_mixture, GridBounds};
use softmax_gan::svg::write_scatter_svg;
use softmax_gan::train::{self, log_to_csv, LossVariant};

fn main() {
    let mut preset = "defaults".to_string();
    let mut variant = LossVariant::Softmax;
    let mut cycles: u64 = 20_000;
    let mut seed: u64 = 1;
    let mut out: Option<String> = None;

    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut i = 0;
    while i < args.len() {
        let value = |i: usize| -> &str {
            args.get(i + 1).map(String::as_str).unwrap_or_else(|| {
                eprintln!("missing value after {}", args[i]);
                std::process::exit(2);
            })
        };
        match args[i].as_str() {
            "--preset" => preset = value(i).to_string(),
            "--variant" => {
                variant = match value(i) {
                    "softmax" => LossVariant::Softmax,
                    "baseline" => LossVariant::Baseline,
                    other => {
                        eprintln!("unknown variant {other}");
                        std::process::exit(2);
                    }
                }
            }
            "--cycles" => cycles = value(i).parse().expect("--cycles takes an integer"),
            "--seed" => seed = value(i).parse().expect("--seed takes an integer"),
            "--out" => out = Some(value(i).to_string()),
            other => {
                eprintln!("unknown flag {other}");
                std::process::exit(2);
            }
        }
        i += 2;
    }

    let config = train::preset_config(&preset, variant, seed, cycles).expect("valid preset");
    println!(
        "training {:?} on preset {preset}: {} cycles, seed {seed}",
        config.loss_variant, config.total_cycles
    );
    let started = Instant::now();
    let artifacts = train::train(&config).expect("run completes");
    let elapsed = started.elapsed().as_secs_f64();

    println!("cycle    d_loss    g_loss     ln_zb  cover  hq      js");
    for r in artifacts.log.iter().step_by(10.max(artifacts.log.len() / 20)) {
        println!(
            "{:>6} {:>9.4} {:>9.4} {:>9.4} {:>6} {:>6.3} {:>7.4}",
            r.cycle, r.d_loss, r.g_loss, r.ln_zb, r.coverage, r.hq_fraction, r.hist_js
        );
    }
    if let Some(r) = artifacts.log.last() {
        println!(
            "final: cycle {} coverage {}/8 hq {:.3} js {:.4}",
            r.cycle, r.coverage, r.hq_fraction, r.hist_js
        );
    }
    println!("verdict: {:?} ({elapsed:.1}s)", artifacts.verdict);

    if let Some(dir) = out {
        let dir = std::path::PathBuf::from(dir);
        std::fs::create_dir_all(&dir).expect("create output dir");
        std::fs::write(dir.join("log.csv"), log_to_csv(&artifacts.log)).expect("write log");
        if let Some(samples) = &artifacts.final_samples {
            samples.write_csv(&dir.join("samples.csv")).expect("write samples");
            let mix = config.mixture().expect("mixture resolves");
            let reference = sample_mixture(&mix, samples.len(), 12345);
            let bounds = GridBounds::covering(&mix, 1.0);
            write_scatter_svg(
                &dir.join("scatter.svg"),
                &format!("{preset} / {:?} / seed {seed}", config.loss_variant),
                reference.points(),
                samples.points(),
                &bounds,
            )
            .expect("write scatter");
        }
        println!("artifacts in {}", dir.display());
    }
}
