//! Command-line front end: training runs, preset comparisons, the two
//! verification suites, and sampling from saved checkpoints.
//!
//! Exit codes: 0 on success, 1 when a verification suite reports failed
//! checks, 2 on usage or config errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data::{self, GridBounds, SampleSet};
use crate::error::{Error, Result};
use crate::gradcheck::gradcheck_suite;
use crate::nn::{LatentSampler, MlpParams, NamedTensor};
use crate::report::{self, Check};
use crate::rng::{derive_seed, seeded_rng};
use crate::svg;
use crate::theory::theory_check_suite;
use crate::train::{self, RunArtifacts, TrainConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Saved state of a finished run: the exact config plus every parameter
/// tensor of both networks, keyed `w0`, `b0`, `w1`, … per network.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: TrainConfig,
    pub discriminator: BTreeMap<String, NamedTensor>,
    pub generator: BTreeMap<String, NamedTensor>,
}

impl Checkpoint {
    pub fn from_artifacts(artifacts: &RunArtifacts) -> Checkpoint {
        Checkpoint {
            config: artifacts.config.clone(),
            discriminator: artifacts.discriminator.to_named_tensors(),
            generator: artifacts.generator.to_named_tensors(),
        }
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        ckpt.config.validate()?;
        Ok(ckpt)
    }

    pub fn generator_params(&self) -> Result<MlpParams> {
        MlpParams::from_named_tensors(&self.generator)
    }

    pub fn discriminator_params(&self) -> Result<MlpParams> {
        MlpParams::from_named_tensors(&self.discriminator)
    }
}

/// What a completed run prints and tests read back: the verdict plus the
/// last metrics row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub verdict: train::Verdict,
    pub final_record: Option<train::TrainLogRecord>,
}

/// Write `log.csv`, `checkpoint.json`, `summary.json`, and (when the run
/// produced final samples) `samples.csv` plus `scatter.svg` into `dir`.
pub fn write_run_artifacts(dir: &Path, artifacts: &RunArtifacts) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("log.csv"), train::log_to_csv(&artifacts.log))?;

    let ckpt = Checkpoint::from_artifacts(artifacts);
    let mut file = std::fs::File::create(dir.join("checkpoint.json"))?;
    serde_json::to_writer_pretty(&mut file, &ckpt)?;
    use std::io::Write as _;
    writeln!(file)?;

    let summary = RunSummary {
        verdict: artifacts.verdict,
        final_record: artifacts.log.last().cloned(),
    };
    let mut file = std::fs::File::create(dir.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut file, &summary)?;
    writeln!(file)?;

    if let Some(samples) = &artifacts.final_samples {
        samples.write_csv(&dir.join("samples.csv"))?;
        let mixture = artifacts.config.mixture()?;
        let mut reference_rng = seeded_rng(derive_seed(artifacts.config.seed, 6));
        let reference = data::draw_points(&mixture, train::METRIC_SAMPLE_COUNT, &mut reference_rng);
        let bounds = GridBounds::covering(&mixture, train::HIST_MARGIN);
        svg::write_scatter_svg(
            &dir.join("scatter.svg"),
            "generated vs data",
            &reference,
            samples.points(),
            &bounds,
        )?;
    }
    Ok(())
}

#[derive(Parser, Debug)]
#[command(
    name = "softmax-gan",
    version,
    about = "Batch-softmax adversarial training on 2D mixtures, with verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one training job described by a JSON config file.
    Train {
        /// Path to the JSON run config (all fields required).
        #[arg(long)]
        config: PathBuf,
        /// Directory for log.csv, checkpoint.json, summary.json, samples.csv, scatter.svg.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the softmax and baseline variants on a named preset.
    Ablation {
        /// One of: defaults, relu-positive, ratio-5-1, ratio-1-5.
        #[arg(long)]
        preset: String,
        /// Comma-separated seed list, one pair of runs per seed.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u64, 2, 3])]
        seeds: Vec<u64>,
        /// Training cycles per run.
        #[arg(long, default_value_t = 20_000)]
        cycles: u64,
        /// Optional path for the JSON comparison report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the estimator identities on exact discrete distributions.
    TheoryCheck {
        /// Seed for the randomized instances.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Optional path for the JSON check report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference checks for every autodiff op and both losses.
    Gradcheck {
        /// Seed for the randomized instances.
        #[arg(long, default_value_t = 11)]
        seed: u64,
        /// Optional path for the JSON check report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw generator samples from a saved checkpoint.
    Sample {
        /// Run directory holding checkpoint.json (or the file itself).
        #[arg(long)]
        checkpoint: PathBuf,
        /// Number of samples to draw.
        #[arg(long)]
        n: usize,
        /// Output directory for sample.csv and sample.svg (default: the checkpoint directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Latent seed; defaults to a stream derived from the run's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parse `argv` and execute; returns the process exit code instead of
/// exiting so tests can call it in-process.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests land here too; they carry exit code 0.
            let _ = e.print();
            return if e.exit_code() == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match run_command(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn run_command(command: Command) -> Result<i32> {
    match command {
        Command::Train { config, out } => run_train(&config, &out),
        Command::Ablation {
            preset,
            seeds,
            cycles,
            out,
        } => run_ablation(&preset, &seeds, cycles, out.as_deref()),
        Command::TheoryCheck { seed, out } => {
            run_suite("theory-check", theory_check_suite(seed)?, out.as_deref())
        }
        Command::Gradcheck { seed, out } => {
            run_suite("gradcheck", gradcheck_suite(seed)?, out.as_deref())
        }
        Command::Sample {
            checkpoint,
            n,
            out,
            seed,
        } => run_sample(&checkpoint, n, out.as_deref(), seed),
    }
}

fn run_train(config_path: &Path, out_dir: &Path) -> Result<i32> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", config_path.display())))?;
    // serde_json's message names the offending field and its line/column.
    let config: TrainConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", config_path.display())))?;
    config.validate()?;

    let artifacts = train::train(&config)?;
    write_run_artifacts(out_dir, &artifacts)?;

    if let Some(last) = artifacts.log.last() {
        println!(
            "cycle {}: d_loss {:.4}, g_loss {:.4}, coverage {}, hq {:.3}, hist_js {:.4}",
            last.cycle, last.d_loss, last.g_loss, last.coverage, last.hq_fraction, last.hist_js
        );
    }
    println!("verdict: {:?}", artifacts.verdict);
    println!("artifacts written to {}", out_dir.display());
    Ok(EXIT_OK)
}

fn run_ablation(preset: &str, seeds: &[u64], cycles: u64, out: Option<&Path>) -> Result<i32> {
    let report = train::run_ablation(preset, seeds, cycles)?;
    print!("{}", report.render_table());
    if let Some(path) = out {
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut file, &report)?;
        use std::io::Write as _;
        writeln!(file)?;
        println!("report written to {}", path.display());
    }
    Ok(EXIT_OK)
}

fn run_suite(label: &str, checks: Vec<Check>, out: Option<&Path>) -> Result<i32> {
    print!("{}", report::render_table(&checks));
    let passed = checks.iter().filter(|c| c.pass).count();
    println!("{label}: {passed}/{} checks passed", checks.len());
    if let Some(path) = out {
        report::write_report(path, &checks)?;
        println!("report written to {}", path.display());
    }
    Ok(if report::all_pass(&checks) {
        EXIT_OK
    } else {
        EXIT_CHECKS_FAILED
    })
}

fn run_sample(checkpoint: &Path, n: usize, out: Option<&Path>, seed: Option<u64>) -> Result<i32> {
    if n == 0 {
        return Err(Error::Config("--n must be at least 1".into()));
    }
    let (ckpt_file, default_out) = if checkpoint.is_dir() {
        (checkpoint.join("checkpoint.json"), checkpoint.to_path_buf())
    } else {
        let parent = checkpoint.parent().unwrap_or(Path::new(".")).to_path_buf();
        (checkpoint.to_path_buf(), parent)
    };
    let ckpt = Checkpoint::load(&ckpt_file)?;
    let out_dir = out.map(Path::to_path_buf).unwrap_or(default_out);
    std::fs::create_dir_all(&out_dir)?;

    let g_params = ckpt.generator_params()?;
    let g_spec = ckpt.config.generator_spec();
    let latent_seed = seed.unwrap_or_else(|| derive_seed(ckpt.config.seed, 7));
    let mut latents = LatentSampler::new(ckpt.config.latent_dim, latent_seed)?;
    let z = latents.sample(n);
    let generated = train::tensor_to_points(&crate::nn::forward(&g_spec, &g_params, &z)?);
    let samples = SampleSet::new(generated, latent_seed);
    samples.write_csv(&out_dir.join("sample.csv"))?;

    let mixture = ckpt.config.mixture()?;
    let mut reference_rng = seeded_rng(derive_seed(ckpt.config.seed, 6));
    let reference = data::draw_points(&mixture, n.max(256), &mut reference_rng);
    let bounds = GridBounds::covering(&mixture, train::HIST_MARGIN);
    svg::write_scatter_svg(
        &out_dir.join("sample.svg"),
        "checkpoint samples vs data",
        &reference,
        samples.points(),
        &bounds,
    )?;

    println!(
        "wrote {} samples to {} (latent seed {latent_seed})",
        samples.len(),
        out_dir.display()
    );
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_round_trips_generator_params() {
        let config = train::preset_config("defaults", train::LossVariant::Softmax, 3, 1).unwrap();
        let artifacts = train::train(&config).unwrap();
        let ckpt = Checkpoint::from_artifacts(&artifacts);
        let text = serde_json::to_string(&ckpt).unwrap();
        let back: Checkpoint = serde_json::from_str(&text).unwrap();
        let params = back.generator_params().unwrap();
        assert_eq!(
            params.layer_sizes(),
            artifacts.config.generator_spec().layer_sizes
        );
        let reloaded = train::params_hash(&params);
        assert_eq!(reloaded, train::params_hash(&artifacts.generator));
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(cli_main(["softmax-gan", "no-such-command"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(cli_main(["softmax-gan", "--help"]), EXIT_OK);
    }
}
