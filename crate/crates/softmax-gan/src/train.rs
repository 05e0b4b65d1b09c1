//! Alternating GAN training on 2D mixtures with two loss variants:
//! the batch-softmax cross-entropy pair and the standard logistic
//! (non-saturating) pair. One run is strictly single-threaded and fully
//! determined by its config; the ablation driver may fan runs out over
//! worker threads and merges results in a fixed order.
//!
//! A "cycle" is `d_steps` discriminator updates followed by `g_steps`
//! generator updates. Metrics (mode coverage, high-quality fraction,
//! histogram divergence against a fixed reference sample) are computed
//! every [`METRIC_CADENCE`] cycles on [`METRIC_SAMPLE_COUNT`] generated
//! points and appended to a CSV-serializable log.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autodiff::Tape;
use crate::data::{
    self, default_min_count, GaussianMixture2D, GridBounds, SampleSet, DEFAULT_RADIUS_MULT,
};
use crate::error::{contract_err, Error, Result};
use crate::losses;
use crate::nn::{
    self, Activation, AdamConfig, AdamState, LatentSampler, MlpParams, MlpSpec, OutputActivation,
};
use crate::rng::{derive_seed, seeded_rng};
use crate::tensor::Tensor;

/// Hidden layer widths of the two networks. Fixed by the harness rather
/// than the config: the experiments vary losses, ratios, activations,
/// and data scaling — never capacity.
pub const D_HIDDEN: &[usize] = &[64, 64];
pub const G_HIDDEN: &[usize] = &[64, 64];
/// Cycles between metric evaluations.
pub const METRIC_CADENCE: u64 = 100;
/// Generated points per metric evaluation.
pub const METRIC_SAMPLE_COUNT: usize = 2048;
/// Bins per axis for the histogram divergence.
pub const HIST_GRID: usize = 64;
/// Padding around the mixture centers for the histogram window.
pub const HIST_MARGIN: f64 = 1.0;
/// Translation applied to the data for the `positive` scaling variant:
/// moves the ring strictly into the positive quadrant.
pub const POSITIVE_SHIFT: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossVariant {
    Softmax,
    Baseline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataScaling {
    Centered,
    Positive,
}

/// Full description of one training run. Every field is required in the
/// JSON form; unknown fields are rejected so config typos fail loudly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub loss_variant: LossVariant,
    pub d_steps: u32,
    pub g_steps: u32,
    pub batch_real: usize,
    pub batch_fake: usize,
    pub total_cycles: u64,
    pub seed: u64,
    pub hidden_activation: Activation,
    pub data_scaling: DataScaling,
    pub d_lr: f64,
    pub g_lr: f64,
    pub latent_dim: usize,
    pub mixture_preset: String,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_steps < 1 || self.g_steps < 1 {
            return Err(Error::Config(
                "d_steps and g_steps must both be at least 1".into(),
            ));
        }
        if self.batch_real < 1 || self.batch_fake < 1 {
            return Err(Error::Config(
                "batch_real and batch_fake must both be at least 1".into(),
            ));
        }
        if self.total_cycles < 1 {
            return Err(Error::Config("total_cycles must be at least 1".into()));
        }
        if self.latent_dim < 1 {
            return Err(Error::Config("latent_dim must be at least 1".into()));
        }
        if !(self.d_lr >= 0.0) || !(self.g_lr >= 0.0) || !self.d_lr.is_finite() || !self.g_lr.is_finite() {
            return Err(Error::Config(
                "learning rates must be finite and non-negative".into(),
            ));
        }
        self.mixture()?;
        Ok(())
    }

    /// Resolve the named data distribution, with the scaling variant
    /// applied.
    pub fn mixture(&self) -> Result<GaussianMixture2D> {
        let base = match self.mixture_preset.as_str() {
            "ring" => GaussianMixture2D::ring_8(),
            other => {
                return Err(Error::Config(format!(
                    "unknown mixture preset {other:?}; available: ring"
                )))
            }
        };
        Ok(match self.data_scaling {
            DataScaling::Centered => base,
            DataScaling::Positive => base.shifted(POSITIVE_SHIFT, POSITIVE_SHIFT),
        })
    }

    pub fn discriminator_spec(&self) -> MlpSpec {
        let mut sizes = vec![2];
        sizes.extend_from_slice(D_HIDDEN);
        sizes.push(1);
        MlpSpec::new(sizes, self.hidden_activation, OutputActivation::Identity)
            .expect("fixed discriminator shape is valid")
    }

    pub fn generator_spec(&self) -> MlpSpec {
        let mut sizes = vec![self.latent_dim];
        sizes.extend_from_slice(G_HIDDEN);
        sizes.push(2);
        MlpSpec::new(sizes, self.hidden_activation, OutputActivation::Identity)
            .expect("fixed generator shape is valid")
    }
}

/// One metrics row. `ms` is wall-clock time since the previous row and
/// is the only field not reproducible across runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainLogRecord {
    pub cycle: u64,
    pub d_loss: f64,
    pub g_loss: f64,
    pub ln_zb: f64,
    pub coverage: usize,
    pub hq_fraction: f64,
    pub hist_js: f64,
    pub ms: u64,
}

pub const LOG_HEADER: &str = "cycle,d_loss,g_loss,ln_zb,coverage,hq_fraction,hist_js,ms";

/// Render the log as CSV: integer columns plain, floating columns with
/// 17 significant digits.
pub fn log_to_csv(records: &[TrainLogRecord]) -> String {
    let mut out = String::with_capacity(32 + records.len() * 120);
    out.push_str(LOG_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{}\n",
            r.cycle, r.d_loss, r.g_loss, r.ln_zb, r.coverage, r.hq_fraction, r.hist_js, r.ms
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Collapsed,
    Diverged,
}

/// Everything a finished (or halted) run leaves behind.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub config: TrainConfig,
    pub discriminator: MlpParams,
    pub generator: MlpParams,
    pub log: Vec<TrainLogRecord>,
    /// Final metric sample batch; absent when the run diverged before
    /// producing a trustworthy one.
    pub final_samples: Option<SampleSet>,
    pub verdict: Verdict,
}

/// FNV-1a over the parameter bits; used to assert that a phase never
/// touches the opposing network.
pub fn params_hash(params: &MlpParams) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |v: f64| {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for layer in &params.layers {
        for &v in layer.weight.data() {
            eat(v);
        }
        for &v in layer.bias.data() {
            eat(v);
        }
    }
    h
}

fn points_to_tensor(points: &[[f64; 2]]) -> Tensor {
    let mut data = Vec::with_capacity(points.len() * 2);
    for p in points {
        data.push(p[0]);
        data.push(p[1]);
    }
    Tensor::new(vec![points.len(), 2], data).expect("point matrix is well-formed")
}

/// View an `[n, 2]` tensor as a list of 2D points.
pub fn tensor_to_points(t: &Tensor) -> Vec<[f64; 2]> {
    assert_eq!(t.cols(), 2);
    (0..t.rows()).map(|r| [t.at(r, 0), t.at(r, 1)]).collect()
}

struct Trainer {
    config: TrainConfig,
    mixture: GaussianMixture2D,
    d_spec: MlpSpec,
    g_spec: MlpSpec,
    d_params: MlpParams,
    g_params: MlpParams,
    d_opt: AdamState,
    g_opt: AdamState,
    data_rng: rand_chacha::ChaCha8Rng,
    train_latents: LatentSampler,
    metric_latents: LatentSampler,
    reference: Vec<[f64; 2]>,
    bounds: GridBounds,
    min_count: usize,
}

/// Outcome of one optimization step: the loss that was minimized plus
/// the log-partition of the scored batch (a diagnostic for both loss
/// variants).
struct StepStats {
    loss: f64,
    ln_zb: f64,
}

impl Trainer {
    fn new(config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        let mixture = config.mixture()?;
        let d_spec = config.discriminator_spec();
        let g_spec = config.generator_spec();
        let d_params = nn::init_params(&d_spec, derive_seed(config.seed, 1));
        let g_params = nn::init_params(&g_spec, derive_seed(config.seed, 2));
        let d_opt = AdamState::new(&d_params, AdamConfig::with_lr(config.d_lr));
        let g_opt = AdamState::new(&g_params, AdamConfig::with_lr(config.g_lr));
        let data_rng = seeded_rng(derive_seed(config.seed, 3));
        let train_latents = LatentSampler::new(config.latent_dim, derive_seed(config.seed, 4))?;
        let metric_latents = LatentSampler::new(config.latent_dim, derive_seed(config.seed, 5))?;
        let mut reference_rng = seeded_rng(derive_seed(config.seed, 6));
        let reference = data::draw_points(&mixture, METRIC_SAMPLE_COUNT, &mut reference_rng);
        let bounds = GridBounds::covering(&mixture, HIST_MARGIN);
        let min_count = default_min_count(METRIC_SAMPLE_COUNT, mixture.n_modes());
        Ok(Trainer {
            config: config.clone(),
            mixture,
            d_spec,
            g_spec,
            d_params,
            g_params,
            d_opt,
            g_opt,
            data_rng,
            train_latents,
            metric_latents,
            reference,
            bounds,
            min_count,
        })
    }

    fn generate_plain(&self, latents: &Tensor) -> Result<Tensor> {
        nn::forward(&self.g_spec, &self.g_params, latents)
    }

    /// One discriminator update on a fresh batch.
    fn d_step(&mut self) -> Result<StepStats> {
        let real = points_to_tensor(&data::draw_points(
            &self.mixture,
            self.config.batch_real,
            &mut self.data_rng,
        ));
        let latents = self.train_latents.sample(self.config.batch_fake);
        let fake = self.generate_plain(&latents)?;

        let g_before = params_hash(&self.g_params);
        let mut tape = Tape::new();
        let d_nodes = self.d_params.insert_leaves(&mut tape);
        let real_in = tape.leaf(real);
        let fake_in = tape.leaf(fake);
        let real_out = nn::forward_graph(&self.d_spec, &d_nodes, &mut tape, real_in)?;
        let fake_out = nn::forward_graph(&self.d_spec, &d_nodes, &mut tape, fake_in)?;
        let mu_real = tape.flatten(real_out);
        let mu_fake = tape.flatten(fake_out);
        let root = match self.config.loss_variant {
            LossVariant::Softmax => losses::d_loss_softmax_graph(&mut tape, mu_real, mu_fake)?,
            LossVariant::Baseline => losses::d_loss_baseline_graph(&mut tape, mu_real, mu_fake)?,
        };
        let loss = tape.value(root).scalar_value();
        let ln_zb = {
            let mut scores = tape.value(mu_real).data().to_vec();
            scores.extend_from_slice(tape.value(mu_fake).data());
            losses::ln_partition(&scores)
        };
        if !loss.is_finite() {
            return Ok(StepStats { loss, ln_zb });
        }
        let grads = tape.backward(root)?;
        let d_grads = d_nodes.grads(&grads);
        self.d_opt.step(&mut self.d_params, &d_grads)?;
        debug_assert_eq!(
            params_hash(&self.g_params),
            g_before,
            "discriminator phase altered generator parameters"
        );
        Ok(StepStats { loss, ln_zb })
    }

    /// One generator update on a fresh batch. The discriminator
    /// participates in the graph but its parameters are left untouched.
    fn g_step(&mut self) -> Result<StepStats> {
        let real = points_to_tensor(&data::draw_points(
            &self.mixture,
            self.config.batch_real,
            &mut self.data_rng,
        ));
        let latents = self.train_latents.sample(self.config.batch_fake);

        let d_before = params_hash(&self.d_params);
        let mut tape = Tape::new();
        let g_nodes = self.g_params.insert_leaves(&mut tape);
        let d_nodes = self.d_params.insert_leaves(&mut tape);
        let z_in = tape.leaf(latents);
        let fake = nn::forward_graph(&self.g_spec, &g_nodes, &mut tape, z_in)?;
        let fake_out = nn::forward_graph(&self.d_spec, &d_nodes, &mut tape, fake)?;
        let mu_fake = tape.flatten(fake_out);
        let real_in = tape.leaf(real);
        let real_out = nn::forward_graph(&self.d_spec, &d_nodes, &mut tape, real_in)?;
        let mu_real = tape.flatten(real_out);
        let root = match self.config.loss_variant {
            LossVariant::Softmax => losses::g_loss_softmax_graph(&mut tape, mu_real, mu_fake)?,
            LossVariant::Baseline => losses::g_loss_baseline_graph(&mut tape, mu_fake),
        };
        let loss = tape.value(root).scalar_value();
        let ln_zb = {
            let mut scores = tape.value(mu_real).data().to_vec();
            scores.extend_from_slice(tape.value(mu_fake).data());
            losses::ln_partition(&scores)
        };
        if !loss.is_finite() {
            return Ok(StepStats { loss, ln_zb });
        }
        let grads = tape.backward(root)?;
        let g_grads = g_nodes.grads(&grads);
        self.g_opt.step(&mut self.g_params, &g_grads)?;
        debug_assert_eq!(
            params_hash(&self.d_params),
            d_before,
            "generator phase altered discriminator parameters"
        );
        Ok(StepStats { loss, ln_zb })
    }

    /// Generate the metric batch and score it against the reference.
    fn metrics(&mut self, cycle: u64, d: &StepStats, g: &StepStats, ms: u64) -> Result<(TrainLogRecord, SampleSet)> {
        let latents = self.metric_latents.sample(METRIC_SAMPLE_COUNT);
        let generated = tensor_to_points(&self.generate_plain(&latents)?);
        let report = data::mode_report(&generated, &self.mixture, DEFAULT_RADIUS_MULT, self.min_count);
        let hist_js = data::histogram_js(&generated, &self.reference, HIST_GRID, &self.bounds)?;
        let record = TrainLogRecord {
            cycle,
            d_loss: d.loss,
            g_loss: g.loss,
            ln_zb: g.ln_zb,
            coverage: report.covered,
            hq_fraction: report.hq_fraction,
            hist_js,
            ms,
        };
        Ok((record, SampleSet::new(generated, self.config.seed)))
    }
}

/// Run one training configuration to completion (or divergence).
pub fn train(config: &TrainConfig) -> Result<RunArtifacts> {
    let mut trainer = Trainer::new(config)?;
    let mut log: Vec<TrainLogRecord> = Vec::new();
    let mut final_samples: Option<SampleSet> = None;
    let mut clock = Instant::now();

    for cycle in 1..=config.total_cycles {
        let mut last_d = StepStats { loss: f64::NAN, ln_zb: f64::NAN };
        for _ in 0..config.d_steps {
            last_d = trainer.d_step()?;
            if !last_d.loss.is_finite() {
                return Ok(RunArtifacts {
                    config: config.clone(),
                    discriminator: trainer.d_params,
                    generator: trainer.g_params,
                    log,
                    final_samples: None,
                    verdict: Verdict::Diverged,
                });
            }
        }
        let mut last_g = StepStats { loss: f64::NAN, ln_zb: f64::NAN };
        for _ in 0..config.g_steps {
            last_g = trainer.g_step()?;
            if !last_g.loss.is_finite() {
                return Ok(RunArtifacts {
                    config: config.clone(),
                    discriminator: trainer.d_params,
                    generator: trainer.g_params,
                    log,
                    final_samples: None,
                    verdict: Verdict::Diverged,
                });
            }
        }
        if cycle % METRIC_CADENCE == 0 || cycle == config.total_cycles {
            let ms = clock.elapsed().as_millis() as u64;
            clock = Instant::now();
            let (record, samples) = trainer.metrics(cycle, &last_d, &last_g, ms)?;
            log.push(record);
            final_samples = Some(samples);
        }
    }

    let final_coverage = log.last().map(|r| r.coverage).unwrap_or(0);
    let half_modes = trainer.mixture.n_modes().div_ceil(2);
    let verdict = if final_coverage < half_modes {
        Verdict::Collapsed
    } else {
        Verdict::Converged
    };
    Ok(RunArtifacts {
        config: config.clone(),
        discriminator: trainer.d_params,
        generator: trainer.g_params,
        log,
        final_samples,
        verdict,
    })
}

// ---------------------------------------------------------------------
// Experiment presets and the ablation driver.
// ---------------------------------------------------------------------

pub const PRESET_NAMES: [&str; 4] = ["defaults", "relu-positive", "ratio-5-1", "ratio-1-5"];

/// Build the run configuration for a named experiment axis. The presets
/// differ only along the axis they probe; everything else matches
/// `defaults`.
pub fn preset_config(
    preset: &str,
    variant: LossVariant,
    seed: u64,
    total_cycles: u64,
) -> Result<TrainConfig> {
    let mut config = TrainConfig {
        loss_variant: variant,
        d_steps: 1,
        g_steps: 1,
        batch_real: 64,
        batch_fake: 64,
        total_cycles,
        seed,
        hidden_activation: Activation::LeakyRelu,
        data_scaling: DataScaling::Centered,
        d_lr: 5e-4,
        g_lr: 5e-4,
        latent_dim: 2,
        mixture_preset: "ring".into(),
    };
    match preset {
        "defaults" => {}
        "relu-positive" => {
            config.hidden_activation = Activation::Relu;
            config.data_scaling = DataScaling::Positive;
        }
        "ratio-5-1" => {
            config.d_steps = 5;
            config.g_steps = 1;
        }
        "ratio-1-5" => {
            config.d_steps = 1;
            config.g_steps = 5;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    }
    Ok(config)
}

/// One row of an ablation report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AblationRun {
    pub variant: LossVariant,
    pub seed: u64,
    pub verdict: Verdict,
    pub final_coverage: usize,
    pub final_hq_fraction: f64,
    pub final_hist_js: f64,
}

/// Side-by-side outcome of both loss variants on one preset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AblationReport {
    pub preset: String,
    pub total_cycles: u64,
    pub seeds: Vec<u64>,
    pub runs: Vec<AblationRun>,
    pub mean_coverage_softmax: f64,
    pub mean_coverage_baseline: f64,
}

impl AblationReport {
    pub fn mean_coverage(&self, variant: LossVariant) -> f64 {
        match variant {
            LossVariant::Softmax => self.mean_coverage_softmax,
            LossVariant::Baseline => self.mean_coverage_baseline,
        }
    }

    /// Plain-text table for terminal output.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "preset {} — {} cycles, seeds {:?}\n",
            self.preset, self.total_cycles, self.seeds
        ));
        out.push_str("variant   seed        verdict    coverage  hq_fraction  hist_js\n");
        for r in &self.runs {
            out.push_str(&format!(
                "{:<9} {:<11} {:<10} {:<9} {:<12.4} {:.4}\n",
                match r.variant {
                    LossVariant::Softmax => "softmax",
                    LossVariant::Baseline => "baseline",
                },
                r.seed,
                match r.verdict {
                    Verdict::Converged => "converged",
                    Verdict::Collapsed => "collapsed",
                    Verdict::Diverged => "diverged",
                },
                r.final_coverage,
                r.final_hq_fraction,
                r.final_hist_js
            ));
        }
        out.push_str(&format!(
            "mean coverage: softmax {:.2}, baseline {:.2}\n",
            self.mean_coverage_softmax, self.mean_coverage_baseline
        ));
        out
    }
}

fn summarize(artifacts: &RunArtifacts) -> AblationRun {
    let last = artifacts.log.last();
    AblationRun {
        variant: artifacts.config.loss_variant,
        seed: artifacts.config.seed,
        verdict: artifacts.verdict,
        final_coverage: last.map(|r| r.coverage).unwrap_or(0),
        final_hq_fraction: last.map(|r| r.hq_fraction).unwrap_or(0.0),
        final_hist_js: last.map(|r| r.hist_js).unwrap_or(f64::INFINITY),
    }
}

/// Run both loss variants across `seeds` on one preset. Runs execute in
/// parallel workers; the report lists them in (variant, seed) order
/// regardless of completion order.
pub fn run_ablation(preset: &str, seeds: &[u64], total_cycles: u64) -> Result<AblationReport> {
    if seeds.is_empty() {
        return Err(contract_err!("ablation needs at least one seed"));
    }
    let mut jobs: Vec<(LossVariant, u64)> = Vec::new();
    for &variant in &[LossVariant::Softmax, LossVariant::Baseline] {
        for &seed in seeds {
            jobs.push((variant, seed));
        }
    }
    let runs: Vec<AblationRun> = jobs
        .par_iter()
        .map(|&(variant, seed)| -> Result<AblationRun> {
            let config = preset_config(preset, variant, seed, total_cycles)?;
            Ok(summarize(&train(&config)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = |variant: LossVariant, runs: &[AblationRun]| -> f64 {
        let picked: Vec<f64> = runs
            .iter()
            .filter(|r| r.variant == variant)
            .map(|r| r.final_coverage as f64)
            .collect();
        picked.iter().sum::<f64>() / picked.len() as f64
    };
    let mean_coverage_softmax = mean(LossVariant::Softmax, &runs);
    let mean_coverage_baseline = mean(LossVariant::Baseline, &runs);
    Ok(AblationReport {
        preset: preset.to_string(),
        total_cycles,
        seeds: seeds.to_vec(),
        runs,
        mean_coverage_softmax,
        mean_coverage_baseline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(variant: LossVariant, cycles: u64) -> TrainConfig {
        TrainConfig {
            loss_variant: variant,
            d_steps: 1,
            g_steps: 1,
            batch_real: 8,
            batch_fake: 8,
            total_cycles: cycles,
            seed: 42,
            hidden_activation: Activation::LeakyRelu,
            data_scaling: DataScaling::Centered,
            d_lr: 1e-3,
            g_lr: 1e-3,
            latent_dim: 4,
            mixture_preset: "ring".into(),
        }
    }

    #[test]
    fn config_json_rejects_unknown_and_missing_fields() {
        let config = tiny_config(LossVariant::Softmax, 10);
        let json = serde_json::to_string(&config).unwrap();
        let back: TrainConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);

        let with_extra = json.replace('}', ",\"typo_field\":1}");
        let err = serde_json::from_str::<TrainConfig>(&with_extra).unwrap_err();
        assert!(err.to_string().contains("typo_field"));

        let missing_seed = serde_json::to_string(&serde_json::json!({
            "loss_variant": "softmax", "d_steps": 1, "g_steps": 1,
            "batch_real": 8, "batch_fake": 8, "total_cycles": 10,
            "hidden_activation": "leaky_relu", "data_scaling": "centered",
            "d_lr": 1e-3, "g_lr": 1e-3, "latent_dim": 4, "mixture_preset": "ring"
        }))
        .unwrap();
        let err = serde_json::from_str::<TrainConfig>(&missing_seed).unwrap_err();
        assert!(err.to_string().contains("seed"), "diagnostic was: {err}");
    }

    #[test]
    fn config_validation_catches_bad_values() {
        let mut c = tiny_config(LossVariant::Softmax, 10);
        c.batch_real = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = tiny_config(LossVariant::Softmax, 10);
        c.d_lr = f64::NAN;
        assert!(c.validate().is_err());
        let mut c = tiny_config(LossVariant::Softmax, 10);
        c.mixture_preset = "pair".into();
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("pair"), "{msg}");
    }

    #[test]
    fn zero_learning_rate_is_a_no_op() {
        let mut config = tiny_config(LossVariant::Softmax, 1);
        config.d_lr = 0.0;
        config.g_lr = 0.0;
        let d0 = nn::init_params(&config.discriminator_spec(), derive_seed(config.seed, 1));
        let g0 = nn::init_params(&config.generator_spec(), derive_seed(config.seed, 2));
        let artifacts = train(&config).unwrap();
        assert_eq!(params_hash(&artifacts.discriminator), params_hash(&d0));
        assert_eq!(params_hash(&artifacts.generator), params_hash(&g0));
        assert_eq!(artifacts.log.len(), 1);
        let r = &artifacts.log[0];
        assert_eq!(r.cycle, 1);
        assert!(r.d_loss.is_finite() && r.g_loss.is_finite() && r.ln_zb.is_finite());
    }

    #[test]
    fn five_by_five_batches_train_cleanly() {
        // The smallest batch regime claimed workable: five per side.
        let mut config = tiny_config(LossVariant::Softmax, 3);
        config.batch_real = 5;
        config.batch_fake = 5;
        let artifacts = train(&config).unwrap();
        let r = artifacts.log.last().unwrap();
        assert!(r.d_loss > 5.0f64.ln());
        assert!(r.g_loss >= 10.0f64.ln() - 1e-9);
    }

    #[test]
    fn softmax_loss_bounds_hold_throughout_training() {
        let mut config = tiny_config(LossVariant::Softmax, 150);
        config.batch_real = 16;
        config.batch_fake = 16;
        let artifacts = train(&config).unwrap();
        assert!(artifacts.log.len() >= 2); // cycle 100 and final 150
        for r in &artifacts.log {
            assert!(r.d_loss > 16.0f64.ln(), "cycle {}: d_loss {}", r.cycle, r.d_loss);
            assert!(
                r.g_loss >= 32.0f64.ln() - 1e-9,
                "cycle {}: g_loss {}",
                r.cycle,
                r.g_loss
            );
            assert!(r.hist_js >= 0.0 && r.hist_js <= 2.0f64.ln() + 1e-12);
        }
    }

    #[test]
    fn baseline_variant_trains_and_logs() {
        let config = tiny_config(LossVariant::Baseline, 120);
        let artifacts = train(&config).unwrap();
        assert_eq!(
            artifacts.log.iter().map(|r| r.cycle).collect::<Vec<_>>(),
            vec![100, 120]
        );
        for r in &artifacts.log {
            assert!(r.d_loss.is_finite() && r.g_loss.is_finite());
        }
        assert!(artifacts.final_samples.is_some());
    }

    #[test]
    fn identical_configs_log_identically_except_wall_time() {
        let config = tiny_config(LossVariant::Softmax, 120);
        let a = train(&config).unwrap();
        let b = train(&config).unwrap();
        assert_eq!(a.log.len(), b.log.len());
        for (x, y) in a.log.iter().zip(&b.log) {
            let mut x_t = x.clone();
            let mut y_t = y.clone();
            x_t.ms = 0;
            y_t.ms = 0;
            assert_eq!(x_t, y_t);
        }
        assert_eq!(params_hash(&a.discriminator), params_hash(&b.discriminator));
        assert_eq!(params_hash(&a.generator), params_hash(&b.generator));
        assert_eq!(
            a.final_samples.unwrap().points(),
            b.final_samples.unwrap().points()
        );
    }

    #[test]
    fn csv_format_matches_contract() {
        let records = vec![TrainLogRecord {
            cycle: 100,
            d_loss: 4.25,
            g_loss: 5.0,
            ln_zb: -1.5,
            coverage: 7,
            hq_fraction: 0.875,
            hist_js: 0.25,
            ms: 123,
        }];
        let csv = log_to_csv(&records);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(LOG_HEADER));
        let row = lines.next().unwrap();
        assert!(row.starts_with("100,4.2500000000000000e0,5.0000000000000000e0,"));
        assert!(row.ends_with(",123"));
        assert_eq!(row.split(',').count(), 8);
    }

    #[test]
    fn preset_registry_is_exhaustive() {
        for name in PRESET_NAMES {
            let c = preset_config(name, LossVariant::Softmax, 1, 100).unwrap();
            c.validate().unwrap();
        }
        let err = preset_config("nope", LossVariant::Softmax, 1, 100).unwrap_err();
        let msg = err.to_string();
        for name in PRESET_NAMES {
            assert!(msg.contains(name), "{msg} missing {name}");
        }
        assert_eq!(preset_config("ratio-5-1", LossVariant::Softmax, 1, 10).unwrap().d_steps, 5);
        assert_eq!(preset_config("ratio-1-5", LossVariant::Softmax, 1, 10).unwrap().g_steps, 5);
        let rp = preset_config("relu-positive", LossVariant::Baseline, 1, 10).unwrap();
        assert_eq!(rp.hidden_activation, Activation::Relu);
        assert_eq!(rp.data_scaling, DataScaling::Positive);
    }

    #[test]
    fn ablation_report_is_ordered_and_complete() {
        let report = run_ablation("ratio-5-1", &[7, 8, 9], 5).unwrap();
        assert_eq!(report.runs.len(), 6);
        let expect: Vec<(LossVariant, u64)> = vec![
            (LossVariant::Softmax, 7),
            (LossVariant::Softmax, 8),
            (LossVariant::Softmax, 9),
            (LossVariant::Baseline, 7),
            (LossVariant::Baseline, 8),
            (LossVariant::Baseline, 9),
        ];
        let got: Vec<(LossVariant, u64)> =
            report.runs.iter().map(|r| (r.variant, r.seed)).collect();
        assert_eq!(got, expect);
        let table = report.render_table();
        assert!(table.contains("softmax") && table.contains("baseline"));
    }

    #[test]
    fn positive_scaling_shifts_reference_data() {
        let mut config = tiny_config(LossVariant::Softmax, 1);
        config.data_scaling = DataScaling::Positive;
        let mix = config.mixture().unwrap();
        for c in mix.centers() {
            assert!(c[0] > 0.0 && c[1] > 0.0);
        }
    }
}
