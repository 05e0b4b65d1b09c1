//! A laboratory for batch-softmax adversarial training.
//!
//! The discriminator here emits a raw score μ(x); a softmax over the
//! negated scores of one minibatch (reals and generated samples pooled)
//! turns the batch into a discrete distribution, and both players
//! minimize cross-entropies against fixed targets on that distribution.
//! The same softmax shows up when training an unnormalized density by
//! maximum likelihood with a self-normalized importance-sampling
//! estimate of the partition function; the design intent is to soften
//! mode-seeking pathologies by making the generator's target spread
//! mass over the whole batch instead of rewarding a single winning
//! point. (See the repository README for what that buys in practice on
//! a 2D benchmark — the measured answer is nuanced.)
//!
//! The crate has three layers:
//!
//! - numeric substrate: [`tensor`], [`autodiff`] (reverse-mode tape),
//!   [`nn`] (MLPs + Adam), [`losses`] (the batch-softmax pair and a
//!   standard logistic baseline), all checked against central finite
//!   differences in [`gradcheck`];
//! - an exact-arithmetic oracle over small discrete distributions in
//!   [`theory`]: importance-sampling gradient estimators, the optimal
//!   discriminator fit, and the KL-sum decomposition of the generator
//!   objective, each verified to tight tolerances in
//!   [`theory::theory_check_suite`];
//! - a 2D experiment harness: [`data`] (Gaussian-mixture ring, mode
//!   coverage, histogram divergence), [`train`] (deterministic
//!   alternating optimization with per-cycle logging), [`svg`]
//!   (dependency-free scatter plots), and [`cli`].
//!
//! Start with the `examples/` directory — each file is a runnable tour
//! of one capability — or the `softmax-gan` binary (`train`, `ablation`,
//! `theory-check`, `gradcheck`, `sample`).

pub mod autodiff;
pub mod cli;
pub mod data;
pub mod error;
pub mod gradcheck;
pub mod losses;
pub mod nn;
pub mod num;
pub mod report;
pub mod rng;
pub mod svg;
pub mod tensor;
pub mod theory;
pub mod train;
