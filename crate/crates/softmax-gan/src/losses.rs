//! Batch-level softmax losses and the conventional logistic baselines.
//!
//! A discriminator assigns a score `μ(x)` to every sample. Over a batch
//! `B = B₊ ∪ B₋` (real then generated, in that order everywhere), the
//! batch softmax
//!
//! ```text
//! s(x) = exp(-μ(x)) / Σ_{y∈B} exp(-μ(y))
//! ```
//!
//! turns scores into a distribution over batch members. The discriminator
//! loss asks that mass to sit uniformly on the real half, the generator
//! loss asks it to spread uniformly over the whole batch:
//!
//! ```text
//! L_D = (1/|B₊|) Σ_{x∈B₊} μ(x) + ln Σ_{y∈B} exp(-μ(y))
//! L_G = (1/|B|)  Σ_{x∈B}  μ(x) + ln Σ_{y∈B} exp(-μ(y))
//! ```
//!
//! Both are cross-entropies against the target weights returned by
//! [`softmax_targets`], and both have score-gradient `t(y) - s(y)`, which
//! [`d_loss_score_grad`]/[`g_loss_score_grad`] compute in closed form.
//!
//! The baselines are the usual saturating discriminator loss and
//! non-saturating generator loss written with `softplus`.

use crate::autodiff::{NodeId, Tape};
use crate::error::{contract_err, Error, Result};
use crate::num;

/// Scores for one batch, real half and generated half kept apart.
/// Construction validates that both halves are non-empty and finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    real: Vec<f64>,
    fake: Vec<f64>,
}

impl Batch {
    pub fn new(real: Vec<f64>, fake: Vec<f64>) -> Result<Self> {
        if real.is_empty() || fake.is_empty() {
            return Err(contract_err!(
                "batch needs at least one real and one generated score ({} real, {} generated)",
                real.len(),
                fake.len()
            ));
        }
        for (index, &value) in real.iter().chain(&fake).enumerate() {
            if !value.is_finite() {
                return Err(Error::Domain {
                    op: "batch scores",
                    index,
                    value,
                });
            }
        }
        Ok(Batch { real, fake })
    }

    pub fn real(&self) -> &[f64] {
        &self.real
    }

    pub fn fake(&self) -> &[f64] {
        &self.fake
    }

    pub fn len(&self) -> usize {
        self.real.len() + self.fake.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees both halves are non-empty
    }

    /// All scores in canonical order: real half first.
    pub fn concat(&self) -> Vec<f64> {
        let mut all = self.real.clone();
        all.extend_from_slice(&self.fake);
        all
    }
}

/// Per-sample target weights for the two losses, aligned with
/// [`Batch::concat`] order. The discriminator target puts `1/n_real` on
/// each real sample and zero elsewhere; the generator target is uniform
/// `1/(n_real+n_fake)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftmaxTargets {
    pub discriminator: Vec<f64>,
    pub generator: Vec<f64>,
}

pub fn softmax_targets(n_real: usize, n_fake: usize) -> Result<SoftmaxTargets> {
    if n_real == 0 || n_fake == 0 {
        return Err(contract_err!(
            "targets need positive batch sizes, got {n_real} real / {n_fake} generated"
        ));
    }
    let n = n_real + n_fake;
    let mut discriminator = vec![0.0; n];
    for t in discriminator.iter_mut().take(n_real) {
        *t = 1.0 / n_real as f64;
    }
    Ok(SoftmaxTargets {
        discriminator,
        generator: vec![1.0 / n as f64; n],
    })
}

/// Softmax over negated scores: low score ⇒ high batch probability.
/// Sums to one and is invariant under shifting all scores by a constant.
pub fn batch_softmax(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(contract_err!("batch_softmax of an empty score list"));
    }
    let negated: Vec<f64> = scores.iter().map(|&s| -s).collect();
    Ok(num::softmax(&negated))
}

/// `ln Σ exp(-μ)` — the log normalizer of the batch softmax.
pub fn ln_partition(scores: &[f64]) -> f64 {
    let negated: Vec<f64> = scores.iter().map(|&s| -s).collect();
    num::log_sum_exp(&negated)
}

/// Discriminator loss: mean real score plus the log partition.
pub fn d_loss_softmax(batch: &Batch) -> f64 {
    let mean_real: f64 = batch.real.iter().sum::<f64>() / batch.real.len() as f64;
    mean_real + ln_partition(&batch.concat())
}

/// Generator loss: mean of all scores plus the log partition. Bounded
/// below by `ln |B|`, attained exactly when every score is equal.
pub fn g_loss_softmax(batch: &Batch) -> f64 {
    let all = batch.concat();
    let mean_all: f64 = all.iter().sum::<f64>() / all.len() as f64;
    mean_all + ln_partition(&all)
}

fn score_grad(batch: &Batch, target: &[f64]) -> Vec<f64> {
    let s = batch_softmax(&batch.concat()).expect("batch is non-empty by construction");
    target.iter().zip(&s).map(|(&t, &p)| t - p).collect()
}

/// Closed-form `∂L_D/∂μ(y) = t_D(y) - s(y)` in [`Batch::concat`] order.
pub fn d_loss_score_grad(batch: &Batch) -> Vec<f64> {
    let targets =
        softmax_targets(batch.real.len(), batch.fake.len()).expect("batch sizes are positive");
    score_grad(batch, &targets.discriminator)
}

/// Closed-form `∂L_G/∂μ(y) = t_G(y) - s(y)` in [`Batch::concat`] order.
pub fn g_loss_score_grad(batch: &Batch) -> Vec<f64> {
    let targets =
        softmax_targets(batch.real.len(), batch.fake.len()).expect("batch sizes are positive");
    score_grad(batch, &targets.generator)
}

/// Tape version of [`d_loss_softmax`], for end-to-end training graphs.
/// `mu_real` and `mu_fake` must be rank-1 score nodes.
pub fn d_loss_softmax_graph(tape: &mut Tape, mu_real: NodeId, mu_fake: NodeId) -> Result<NodeId> {
    let mean_real = tape.mean(mu_real);
    let all = tape.concat(&[mu_real, mu_fake])?;
    let neg = tape.neg(all);
    let lse = tape.log_sum_exp(neg);
    tape.add(mean_real, lse)
}

/// Tape version of [`g_loss_softmax`].
pub fn g_loss_softmax_graph(tape: &mut Tape, mu_real: NodeId, mu_fake: NodeId) -> Result<NodeId> {
    let all = tape.concat(&[mu_real, mu_fake])?;
    let mean_all = tape.mean(all);
    let neg = tape.neg(all);
    let lse = tape.log_sum_exp(neg);
    tape.add(mean_all, lse)
}

/// Conventional discriminator loss on raw logits:
/// `mean softplus(-logit_real) + mean softplus(logit_fake)`.
pub fn d_loss_baseline(logit_real: &[f64], logit_fake: &[f64]) -> Result<f64> {
    if logit_real.is_empty() || logit_fake.is_empty() {
        return Err(contract_err!("baseline discriminator loss needs both halves non-empty"));
    }
    let a: f64 = logit_real.iter().map(|&x| num::softplus(-x)).sum::<f64>() / logit_real.len() as f64;
    let b: f64 = logit_fake.iter().map(|&x| num::softplus(x)).sum::<f64>() / logit_fake.len() as f64;
    Ok(a + b)
}

/// Non-saturating generator loss: `mean softplus(-logit_fake)`.
pub fn g_loss_baseline(logit_fake: &[f64]) -> Result<f64> {
    if logit_fake.is_empty() {
        return Err(contract_err!("baseline generator loss needs generated logits"));
    }
    Ok(logit_fake.iter().map(|&x| num::softplus(-x)).sum::<f64>() / logit_fake.len() as f64)
}

/// Tape version of [`d_loss_baseline`].
pub fn d_loss_baseline_graph(tape: &mut Tape, logit_real: NodeId, logit_fake: NodeId) -> Result<NodeId> {
    let neg_real = tape.neg(logit_real);
    let sp_real = tape.softplus(neg_real);
    let a = tape.mean(sp_real);
    let sp_fake = tape.softplus(logit_fake);
    let b = tape.mean(sp_fake);
    tape.add(a, b)
}

/// Tape version of [`g_loss_baseline`].
pub fn g_loss_baseline_graph(tape: &mut Tape, logit_fake: NodeId) -> NodeId {
    let neg = tape.neg(logit_fake);
    let sp = tape.softplus(neg);
    tape.mean(sp)
}
