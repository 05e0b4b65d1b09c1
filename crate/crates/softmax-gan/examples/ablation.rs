//! Side-by-side softmax vs baseline comparison on one experiment preset.
//!
//!     cargo run --release --example ablation -- \
//!         [--preset relu-positive] [--seeds 1,2,3] [--cycles 4000] [--out report.json]
//!
//! Presets probe one axis each: `defaults` (the reference setting),
//! `relu-positive` (rectifier + data shifted off-center, the setting
//! that historically breaks the logistic baseline), and `ratio-5-1` /
//! `ratio-1-5` (discriminator:generator update ratio). The default cycle
//! count keeps the demo short; acceptance uses 20k cycles.

use softmax_gan::train::{run_ablation, PRESET_NAMES};

fn main() {
    let mut preset = "relu-positive".to_string();
    let mut seeds: Vec<u64> = vec![1, 2, 3];
    let mut cycles: u64 = 4_000;
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
            "--seeds" => {
                seeds = value(i)
                    .split(',')
                    .map(|s| s.trim().parse().expect("--seeds takes integers"))
                    .collect()
            }
            "--cycles" => cycles = value(i).parse().expect("--cycles takes an integer"),
            "--out" => out = Some(value(i).to_string()),
            other => {
                eprintln!("unknown flag {other}; presets: {}", PRESET_NAMES.join(", "));
                std::process::exit(2);
            }
        }
        i += 2;
    }

    let started = std::time::Instant::now();
    let report = run_ablation(&preset, &seeds, cycles).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });
    print!("{}", report.render_table());
    println!("({:.1}s)", started.elapsed().as_secs_f64());

    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(&path, text + "\n").expect("write report");
        println!("report written to {path}");
    }
}
