//! Exact-arithmetic verification of the estimator identities behind the
//! batch-softmax losses, carried out on small finite state spaces where
//! every expectation is a short sum.
//!
//! The chain being verified, in order:
//!
//! 1. Maximum-likelihood training of a table energy model has loss
//!    `J = mean ξ(observed) + ln Σ e^{-ξ}` and exact gradient
//!    `p_data - p_model` per state.
//! 2. The intractable model expectation in that gradient can be replaced
//!    by a self-normalized importance-sampling estimate with weights
//!    `r(x) = e^{-ξ(x)}/q(x)` over draws from a proposal `q` — biased at
//!    finite sample size, consistent as the sample grows.
//! 3. Substituting `e^{-ξ(x)} = e^{-μ(x)} q(x)` turns those weights into
//!    the batch softmax of the scores `μ`, making the two estimators
//!    algebraically identical — this is the bridge between
//!    likelihood-style training and the batch-softmax discriminator loss.
//! 4. The population discriminator objective
//!    `Σ p_D μ + ln Σ m e^{-μ}` (with `m = (p_D+p_G)/2` the batch
//!    mixture) is convex in the score table and is minimized exactly at
//!    `e^{-μ} ∝ p_D/m`.
//! 5. At that optimum, the population generator objective decomposes
//!    into `KL(m‖p_D) + KL(p_D‖m)` plus a term that does not depend on
//!    the generator — so minimizing it minimizes a symmetrized
//!    divergence between data and generator.
//!
//! [`theory_check_suite`] packages all of this as named checks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{contract_err, Error, Result};
use crate::losses;
use crate::num;
use crate::report::Check;
use crate::rng::{derive_seed, seeded_rng};

/// Probability vector over `K` states. Entries must be non-negative,
/// finite, and sum to 1 within 1e-12; values are stored as given (no
/// silent renormalization).
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDist {
    probs: Vec<f64>,
}

impl DiscreteDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(contract_err!("distribution needs at least one state"));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Domain {
                    op: "discrete distribution",
                    index,
                    value,
                });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(contract_err!(
                "distribution sums to {total:.17}, expected 1 within 1e-12"
            ));
        }
        Ok(DiscreteDist { probs })
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0);
        DiscreteDist {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn p(&self, state: usize) -> f64 {
        self.probs[state]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Random full-support distribution: normalized exponentials blended
    /// with 10% uniform mass, so every state keeps at least `0.1/K`.
    pub fn random_full_support(k: usize, rng: &mut ChaCha8Rng) -> Self {
        assert!(k > 0);
        let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
        let total: f64 = raw.iter().sum();
        let uniform = 1.0 / k as f64;
        let mut probs: Vec<f64> = raw
            .iter()
            .map(|&e| 0.9 * e / total + 0.1 * uniform)
            .collect();
        let s: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= s;
        }
        DiscreteDist { probs }
    }
}

/// Draw `n` states i.i.d. by inverse-CDF lookup.
pub fn sample_states(dist: &DiscreteDist, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(dist.k());
    let mut acc = 0.0;
    for &p in dist.probs() {
        acc += p;
        cdf.push(acc);
    }
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            cdf.iter().position(|&c| u < c).unwrap_or(dist.k() - 1)
        })
        .collect()
}

/// Table energy model: state `x` carries energy `ξ(x)`, inducing the
/// density `p(x) = e^{-ξ(x)} / Σ_y e^{-ξ(y)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyModel {
    energies: Vec<f64>,
}

impl EnergyModel {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(contract_err!("energy model needs at least one state"));
        }
        for (index, &value) in energies.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::Domain {
                    op: "energy model",
                    index,
                    value,
                });
            }
        }
        Ok(EnergyModel { energies })
    }

    pub fn k(&self) -> usize {
        self.energies.len()
    }

    pub fn xi(&self, state: usize) -> f64 {
        self.energies[state]
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `ln Z = ln Σ e^{-ξ}`, exact by enumeration.
    pub fn ln_z(&self) -> f64 {
        let negated: Vec<f64> = self.energies.iter().map(|&e| -e).collect();
        num::log_sum_exp(&negated)
    }

    /// The induced normalized distribution.
    pub fn dist(&self) -> DiscreteDist {
        let negated: Vec<f64> = self.energies.iter().map(|&e| -e).collect();
        DiscreteDist {
            probs: num::softmax(&negated),
        }
    }
}

/// Proposal distribution for importance sampling. Zeros are allowed at
/// construction; the sampling routines reject a proposal that puts zero
/// mass where the model does not (which for finite energies means zeros
/// are never usable).
#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    dist: DiscreteDist,
}

impl Proposal {
    pub fn new(dist: DiscreteDist) -> Self {
        Proposal { dist }
    }

    /// Even blend of two distributions — the proposal induced by batches
    /// that are half real data, half generated samples.
    pub fn mixture(a: &DiscreteDist, b: &DiscreteDist) -> Result<Self> {
        if a.k() != b.k() {
            return Err(contract_err!(
                "mixture of distributions over {} and {} states",
                a.k(),
                b.k()
            ));
        }
        let probs: Vec<f64> = a
            .probs()
            .iter()
            .zip(b.probs())
            .map(|(&x, &y)| 0.5 * (x + y))
            .collect();
        Ok(Proposal {
            dist: DiscreteDist { probs },
        })
    }

    pub fn k(&self) -> usize {
        self.dist.k()
    }

    pub fn p(&self, state: usize) -> f64 {
        self.dist.p(state)
    }

    pub fn dist(&self) -> &DiscreteDist {
        &self.dist
    }
}

/// A batch drawn from a proposal, with raw importance weights
/// `r(x) = e^{-ξ(x)}/q(x)` and their sum `R`. Self-normalized weights
/// `r/R` sum to one by construction.
#[derive(Clone, Debug)]
pub struct IsBatch {
    pub states: Vec<usize>,
    pub weights: Vec<f64>,
    pub normalizer: f64,
}

impl IsBatch {
    pub fn normalized_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|&w| w / self.normalizer).collect()
    }
}

/// Multiset of observed states.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedSet {
    states: Vec<usize>,
}

impl ObservedSet {
    pub fn new(states: Vec<usize>) -> Result<Self> {
        if states.is_empty() {
            return Err(contract_err!("observed set must be non-empty"));
        }
        Ok(ObservedSet { states })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees non-emptiness
    }

    /// Empirical distribution over `k` states.
    pub fn empirical(&self, k: usize) -> DiscreteDist {
        let mut probs = vec![0.0; k];
        for &s in &self.states {
            probs[s] += 1.0;
        }
        let n = self.states.len() as f64;
        for p in &mut probs {
            *p /= n;
        }
        DiscreteDist { probs }
    }
}

/// Negative log-likelihood of the observed states under the model:
/// `J = (1/|O|) Σ_{x∈O} ξ(x) + ln Σ_y e^{-ξ(y)}`.
pub fn mle_loss_exact(model: &EnergyModel, observed: &ObservedSet) -> f64 {
    let mean_xi: f64 = observed.states().iter().map(|&s| model.xi(s)).sum::<f64>()
        / observed.len() as f64;
    mean_xi + model.ln_z()
}

/// Population form of [`mle_loss_exact`]: the observed mean replaced by
/// an exact expectation under `data`.
pub fn mle_loss_population(model: &EnergyModel, data: &DiscreteDist) -> f64 {
    assert_eq!(model.k(), data.k());
    let mean_xi: f64 = data
        .probs()
        .iter()
        .zip(model.energies())
        .map(|(&p, &e)| p * e)
        .sum();
    mean_xi + model.ln_z()
}

/// Exact gradient of the population likelihood loss with respect to the
/// energy table: `∂J/∂ξ(x) = p_data(x) - p_model(x)`.
pub fn mle_grad_exact(model: &EnergyModel, data: &DiscreteDist) -> Vec<f64> {
    assert_eq!(model.k(), data.k());
    let p_model = model.dist();
    data.probs()
        .iter()
        .zip(p_model.probs())
        .map(|(&pd, &pm)| pd - pm)
        .collect()
}

fn check_absolute_continuity(model: &EnergyModel, q: &Proposal) -> Result<()> {
    if model.k() != q.k() {
        return Err(contract_err!(
            "proposal over {} states, model over {}",
            q.k(),
            model.k()
        ));
    }
    // Finite energies put positive mass on every state, so the proposal
    // must be strictly positive everywhere.
    if let Some(state) = (0..q.k()).find(|&s| q.p(s) == 0.0) {
        return Err(contract_err!(
            "proposal has zero mass on state {state} where the model has positive mass"
        ));
    }
    Ok(())
}

/// Draw `n` proposal samples and attach raw importance weights.
pub fn draw_is_batch(model: &EnergyModel, q: &Proposal, n: usize, seed: u64) -> Result<IsBatch> {
    if n == 0 {
        return Err(contract_err!("importance-sampling batch must be non-empty"));
    }
    check_absolute_continuity(model, q)?;
    let mut rng = seeded_rng(seed);
    let states = sample_states(q.dist(), n, &mut rng);
    let weights: Vec<f64> = states
        .iter()
        .map(|&s| (-model.xi(s)).exp() / q.p(s))
        .collect();
    let normalizer: f64 = weights.iter().sum();
    if !(normalizer > 0.0) {
        return Err(contract_err!(
            "importance weights sum to {normalizer}; model and proposal are incompatible"
        ));
    }
    Ok(IsBatch {
        states,
        weights,
        normalizer,
    })
}

/// Self-normalized importance-sampling estimate of the likelihood
/// gradient: the data term is computed exactly from `data`, the model
/// term `p_model(x)` is replaced by the weight mass the batch assigns to
/// state `x`. Deterministic per seed; biased at finite `n`, converging
/// to [`mle_grad_exact`] as `n` grows.
pub fn is_grad_estimate(
    model: &EnergyModel,
    data: &DiscreteDist,
    q: &Proposal,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if data.k() != model.k() {
        return Err(contract_err!(
            "data over {} states, model over {}",
            data.k(),
            model.k()
        ));
    }
    let batch = draw_is_batch(model, q, n_samples, seed)?;
    let mut model_term = vec![0.0; model.k()];
    for (&s, &w) in batch.states.iter().zip(&batch.weights) {
        model_term[s] += w / batch.normalizer;
    }
    Ok(data
        .probs()
        .iter()
        .zip(&model_term)
        .map(|(&pd, &mt)| pd - mt)
        .collect())
}

/// Per-sample weights computed the energy way: reconstruct
/// `ξ(x) = μ(x) - ln q(x)` (the substitution `e^{-ξ} = e^{-μ} q`), form
/// `r = e^{-ξ}/q`, normalize by `R`.
pub fn reparam_weights_energy_form(mu: &[f64], q: &Proposal, states: &[usize]) -> Vec<f64> {
    let raw: Vec<f64> = states
        .iter()
        .map(|&s| {
            let xi = mu[s] - q.p(s).ln();
            (-xi).exp() / q.p(s)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|&r| r / total).collect()
}

/// Per-sample weights computed the score way: the batch softmax of the
/// sampled scores, `e^{-μ}/Σ e^{-μ}`.
pub fn reparam_weights_softmax_form(mu: &[f64], states: &[usize]) -> Result<Vec<f64>> {
    let scores: Vec<f64> = states.iter().map(|&s| mu[s]).collect();
    losses::batch_softmax(&scores)
}

/// Draw one batch from `q` and evaluate both weight forms on it. The two
/// are algebraically identical; the returned maximum elementwise
/// discrepancy measures only floating-point noise.
pub fn reparam_grad_check(mu: &[f64], q: &Proposal, seed: u64, n_samples: usize) -> Result<f64> {
    if mu.len() != q.k() {
        return Err(contract_err!(
            "score table over {} states, proposal over {}",
            mu.len(),
            q.k()
        ));
    }
    if n_samples == 0 {
        return Err(contract_err!("reparameterization check needs a non-empty batch"));
    }
    if let Some(state) = (0..q.k()).find(|&s| q.p(s) == 0.0) {
        return Err(contract_err!(
            "proposal has zero mass on state {state}; weights undefined there"
        ));
    }
    let mut rng = seeded_rng(seed);
    let states = sample_states(q.dist(), n_samples, &mut rng);
    let energy_form = reparam_weights_energy_form(mu, q, &states);
    let softmax_form = reparam_weights_softmax_form(mu, &states)?;
    Ok(num::max_abs_diff(&energy_form, &softmax_form))
}

/// Result of the convex score-table fit.
#[derive(Clone, Debug)]
pub struct FittedDiscriminator {
    pub mu: Vec<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Gradient-descent minimization of `Σ target(x)·μ(x) + ln Σ e^{ln_w - μ}`
/// over the table `μ`. Convex and smooth; the gradient is
/// `target - softmax(ln_w - μ)`, so a fixed step of 0.5 is safe.
fn fit_weighted_softmax_table(
    target: &[f64],
    ln_weights: &[f64],
    mut mu: Vec<f64>,
    step: f64,
    max_iters: usize,
    tol: f64,
) -> Result<FittedDiscriminator> {
    assert_eq!(target.len(), ln_weights.len());
    assert_eq!(target.len(), mu.len());
    let mut grad = vec![0.0; mu.len()];
    for iteration in 0..=max_iters {
        let shifted: Vec<f64> = ln_weights.iter().zip(&mu).map(|(&w, &m)| w - m).collect();
        let pi = num::softmax(&shifted);
        let mut norm_sq = 0.0;
        for i in 0..mu.len() {
            grad[i] = target[i] - pi[i];
            norm_sq += grad[i] * grad[i];
        }
        let grad_norm = norm_sq.sqrt();
        if grad_norm < tol {
            return Ok(FittedDiscriminator {
                mu,
                iterations: iteration,
                grad_norm,
            });
        }
        for i in 0..mu.len() {
            mu[i] -= step * grad[i];
        }
    }
    Err(Error::NoConvergence {
        iters: max_iters,
        residual: {
            let norm_sq: f64 = grad.iter().map(|g| g * g).sum();
            norm_sq.sqrt()
        },
    })
}

const FIT_STEP: f64 = 0.5;
const FIT_MAX_ITERS: usize = 100_000;
const FIT_TOL: f64 = 1e-10;

/// Minimize the population discriminator objective
/// `L(μ) = Σ p_D(x) μ(x) + ln Σ m(x) e^{-μ(x)}`, `m = (p_D+p_G)/2`,
/// starting from `μ ≡ 0`. The unique minimizer (up to an additive
/// constant) satisfies `e^{-μ(x)} ∝ p_D(x)/m(x)`.
pub fn optimal_discriminator_fit(
    p_d: &DiscreteDist,
    p_g: &DiscreteDist,
) -> Result<FittedDiscriminator> {
    optimal_discriminator_fit_from(p_d, p_g, vec![0.0; p_d.k()])
}

/// Same fit from a caller-chosen starting table; the normalized ratio
/// vector `e^{-μ}/Σe^{-μ}` of the result is independent of the start.
pub fn optimal_discriminator_fit_from(
    p_d: &DiscreteDist,
    p_g: &DiscreteDist,
    mu0: Vec<f64>,
) -> Result<FittedDiscriminator> {
    if p_d.k() != p_g.k() || mu0.len() != p_d.k() {
        return Err(contract_err!(
            "shape mismatch: p_D over {}, p_G over {}, start table {}",
            p_d.k(),
            p_g.k(),
            mu0.len()
        ));
    }
    let ln_mixture: Vec<f64> = p_d
        .probs()
        .iter()
        .zip(p_g.probs())
        .map(|(&a, &b)| (0.5 * (a + b)).ln()) // -inf on dead states is fine
        .collect();
    fit_weighted_softmax_table(p_d.probs(), &ln_mixture, mu0, FIT_STEP, FIT_MAX_ITERS, FIT_TOL)
}

/// `KL(p‖q) = Σ p ln(p/q)` with the conventions `0·ln(0/q) = 0` and
/// `+∞` when `p > 0` meets `q = 0`. Infinity is a value, not an error.
pub fn kl(p: &DiscreteDist, q: &DiscreteDist) -> f64 {
    assert_eq!(p.k(), q.k(), "kl over mismatched state spaces");
    let mut total = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return f64::INFINITY;
        }
        total += pi * (pi / qi).ln();
    }
    total
}

/// The three quantities of the generator-objective decomposition.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `KL(m ‖ p_D)` — the mode-averaging direction on its own.
    pub lhs_kl: f64,
    /// Population generator objective at the fitted optimal scores: the
    /// score expectation under the batch mixture (with the fit's free
    /// constant removed by adding back `ln Σ m e^{-μ}`) plus the
    /// per-sample partition surrogate `-Σ p_D ln(p_D + p_G)`.
    pub population_l_g: f64,
    /// `KL(m ‖ p_D) + KL(p_D ‖ m)` — the symmetrized divergence the
    /// objective is claimed to minimize.
    pub js_sum: f64,
}

/// Evaluate the generator objective at the optimal discriminator and the
/// divergence pair it is supposed to equal. `population_l_g - js_sum`
/// depends only on `p_D` (it equals `H(p_D) - ln 2`), which is exactly
/// what the spread checks assert.
pub fn generator_objective_decomposition(
    p_d: &DiscreteDist,
    p_g: &DiscreteDist,
) -> Result<Decomposition> {
    if p_d.k() != p_g.k() {
        return Err(contract_err!(
            "p_D over {} states, p_G over {}",
            p_d.k(),
            p_g.k()
        ));
    }
    let mixture: Vec<f64> = p_d
        .probs()
        .iter()
        .zip(p_g.probs())
        .map(|(&a, &b)| 0.5 * (a + b))
        .collect();
    // A state where the mixture has mass but the data does not makes
    // both KL(m‖p_D) and the optimal scores infinite: signal, don't fit.
    let support_violated = mixture
        .iter()
        .zip(p_d.probs())
        .any(|(&m, &pd)| m > 0.0 && pd == 0.0);
    if support_violated {
        return Ok(Decomposition {
            lhs_kl: f64::INFINITY,
            population_l_g: f64::INFINITY,
            js_sum: f64::INFINITY,
        });
    }
    let m_dist = DiscreteDist { probs: mixture.clone() };
    let lhs_kl = kl(&m_dist, p_d);
    let js_sum = lhs_kl + kl(p_d, &m_dist);

    let fit = optimal_discriminator_fit(p_d, p_g)?;
    // Score expectation under the mixture, written shift-invariantly:
    // E_m[μ] + ln Σ m e^{-μ} is unchanged by μ → μ + c, so the fit's
    // arbitrary constant drops out.
    let e_m_mu: f64 = mixture.iter().zip(&fit.mu).map(|(&m, &u)| m * u).sum();
    let ln_norm = {
        let shifted: Vec<f64> = mixture
            .iter()
            .zip(&fit.mu)
            .map(|(&m, &u)| if m > 0.0 { m.ln() - u } else { f64::NEG_INFINITY })
            .collect();
        num::log_sum_exp(&shifted)
    };
    let score_term = e_m_mu + ln_norm;
    let partition_surrogate: f64 = -p_d
        .probs()
        .iter()
        .zip(&mixture)
        .filter(|(&pd, _)| pd > 0.0)
        .map(|(&pd, &m)| pd * (2.0 * m).ln())
        .sum::<f64>();
    Ok(Decomposition {
        lhs_kl,
        population_l_g: score_term + partition_surrogate,
        js_sum,
    })
}

fn random_energies(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-2.0..2.0)).collect()
}

fn l2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    let na: f64 = a.iter().map(|&x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|&x| x * x).sum::<f64>().sqrt();
    dot / (na * nb).max(1e-300)
}

/// Run every oracle check. All randomness derives from `seed`, so a
/// fixed seed gives a fully reproducible report.
pub fn theory_check_suite(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    // --- likelihood loss and gradient -------------------------------
    {
        // Constant energies: J collapses to ln K for any observations.
        let model = EnergyModel::new(vec![0.7; 5])?;
        let observed = ObservedSet::new(vec![2, 4, 4])?;
        let j = mle_loss_exact(&model, &observed);
        checks.push(Check::within(
            "mle_loss_constant_energies_equals_ln_k",
            (j - 5.0f64.ln()).abs(),
            1e-12,
        ));
    }
    {
        // Two states, ξ=[0, ln 3], observe state 0: J = ln(1 + 1/3).
        let model = EnergyModel::new(vec![0.0, 3.0f64.ln()])?;
        let observed = ObservedSet::new(vec![0])?;
        let j = mle_loss_exact(&model, &observed);
        checks.push(Check::within(
            "mle_loss_two_state_hand_value",
            (j - (4.0f64 / 3.0).ln()).abs(),
            1e-12,
        ));
    }
    {
        // Descending the likelihood loss recovers the empirical
        // distribution of the observations (total variation < 1e-6).
        let observed = ObservedSet::new(vec![0, 0, 0, 0, 0, 1, 2, 2, 2, 3, 3, 4, 5, 5, 5, 5])?;
        let empirical = observed.empirical(6);
        let fit = fit_weighted_softmax_table(
            empirical.probs(),
            &vec![0.0; 6],
            vec![0.0; 6],
            FIT_STEP,
            FIT_MAX_ITERS,
            FIT_TOL,
        )?;
        let fitted = EnergyModel::new(fit.mu)?.dist();
        let tv: f64 = fitted
            .probs()
            .iter()
            .zip(empirical.probs())
            .map(|(&a, &b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        checks.push(Check::within("mle_descent_recovers_empirical", tv, 1e-6));
    }
    {
        // Stationarity: gradient vanishes when the model equals the data.
        let mut rng = seeded_rng(derive_seed(seed, 1));
        let model = EnergyModel::new(random_energies(6, &mut rng))?;
        let grad = mle_grad_exact(&model, &model.dist());
        let worst = grad.iter().fold(0.0f64, |m, &g| m.max(g.abs()));
        checks.push(Check::within("mle_grad_zero_at_stationarity", worst, 1e-12));
    }
    {
        // Hand value: p_data=[1,0], uniform energies → gradient [½, -½].
        let model = EnergyModel::new(vec![0.0, 0.0])?;
        let data = DiscreteDist::new(vec![1.0, 0.0])?;
        let grad = mle_grad_exact(&model, &data);
        let err = num::max_abs_diff(&grad, &[0.5, -0.5]);
        checks.push(Check::within("mle_grad_two_state_hand_value", err, 1e-12));
    }
    {
        // Exact gradient vs. central differences of the population loss.
        let mut rng = seeded_rng(derive_seed(seed, 2));
        let model = EnergyModel::new(random_energies(6, &mut rng))?;
        let data = DiscreteDist::random_full_support(6, &mut rng);
        let grad = mle_grad_exact(&model, &data);
        let h = 1e-5;
        let mut worst = 0.0f64;
        for i in 0..6 {
            let mut up = model.energies().to_vec();
            up[i] += h;
            let mut down = model.energies().to_vec();
            down[i] -= h;
            let fd = (mle_loss_population(&EnergyModel::new(up)?, &data)
                - mle_loss_population(&EnergyModel::new(down)?, &data))
                / (2.0 * h);
            worst = worst.max(num::rel_err(grad[i], fd));
        }
        checks.push(Check::within("mle_grad_matches_finite_differences", worst, 1e-8));
    }

    // --- importance-sampling estimator ------------------------------
    {
        // Proposal equal to the model density: every raw weight is the
        // constant Z, so normalized weights are exactly uniform and the
        // estimator is plain Monte Carlo.
        let mut rng = seeded_rng(derive_seed(seed, 3));
        let model = EnergyModel::new(random_energies(8, &mut rng))?;
        let q = Proposal::new(model.dist());
        let batch = draw_is_batch(&model, &q, 64, derive_seed(seed, 4))?;
        let uniform = 1.0 / 64.0;
        let worst = batch
            .normalized_weights()
            .iter()
            .fold(0.0f64, |m, &w| m.max((w - uniform).abs()));
        checks.push(Check::within("is_weights_uniform_when_q_equals_model", worst, 1e-12));
    }
    {
        // Error shrinks with batch size: median error norm over 20 seeds
        // at n=10⁵ must be under one fifth of the median at n=10³
        // (√100 = 10× is the theoretical shrink, so 5× leaves margin).
        let mut rng = seeded_rng(derive_seed(seed, 5));
        let model = EnergyModel::new(random_energies(8, &mut rng))?;
        let data = DiscreteDist::random_full_support(8, &mut rng);
        let q = Proposal::new(DiscreteDist::random_full_support(8, &mut rng));
        let exact = mle_grad_exact(&model, &data);
        let mut errs_small = Vec::new();
        let mut errs_large = Vec::new();
        for trial in 0..20 {
            let s = derive_seed(seed, 100 + trial);
            errs_small.push(l2_diff(&is_grad_estimate(&model, &data, &q, 1_000, s)?, &exact));
            errs_large.push(l2_diff(&is_grad_estimate(&model, &data, &q, 100_000, s)?, &exact));
        }
        let ratio = median(errs_large) / median(errs_small);
        checks.push(Check::within("is_error_quintiles_shrink_with_n", ratio, 0.2));
    }
    {
        // Tiny batches (n=5) still point the right way on average:
        // mean cosine with the exact gradient is positive.
        let mut rng = seeded_rng(derive_seed(seed, 6));
        let model = EnergyModel::new(random_energies(8, &mut rng))?;
        let data = DiscreteDist::random_full_support(8, &mut rng);
        let q = Proposal::new(DiscreteDist::random_full_support(8, &mut rng));
        let exact = mle_grad_exact(&model, &data);
        let mut mean_cos = 0.0;
        for trial in 0..100 {
            let est = is_grad_estimate(&model, &data, &q, 5, derive_seed(seed, 200 + trial))?;
            mean_cos += cosine(&est, &exact) / 100.0;
        }
        checks.push(Check::within("is_tiny_batch_neg_mean_cosine", -mean_cos, 0.0));
    }
    {
        // Scaling e^{-ξ} by c>0 (an additive shift of ξ) leaves the
        // self-normalized estimate untouched.
        let mut rng = seeded_rng(derive_seed(seed, 7));
        let model = EnergyModel::new(random_energies(8, &mut rng))?;
        let shift = 37.5f64.ln();
        let shifted = EnergyModel::new(model.energies().iter().map(|&e| e - shift).collect())?;
        let data = DiscreteDist::random_full_support(8, &mut rng);
        let q = Proposal::new(DiscreteDist::random_full_support(8, &mut rng));
        let s = derive_seed(seed, 8);
        let a = is_grad_estimate(&model, &data, &q, 512, s)?;
        let b = is_grad_estimate(&shifted, &data, &q, 512, s)?;
        checks.push(Check::within(
            "is_estimate_invariant_under_energy_scaling",
            num::max_abs_diff(&a, &b),
            1e-12,
        ));
    }

    // --- reparameterization bridge ----------------------------------
    {
        let mut rng = seeded_rng(derive_seed(seed, 9));
        let mut worst = 0.0f64;
        for trial in 0..10 {
            let mu: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            let q = Proposal::new(DiscreteDist::random_full_support(8, &mut rng));
            worst = worst.max(reparam_grad_check(&mu, &q, derive_seed(seed, 300 + trial), 256)?);
        }
        checks.push(Check::within("reparam_forms_agree_random", worst, 1e-12));
    }
    {
        // All-zero scores: softmax weights are exactly uniform.
        let q = Proposal::new(DiscreteDist::uniform(6));
        let mut rng = seeded_rng(derive_seed(seed, 10));
        let states = sample_states(q.dist(), 32, &mut rng);
        let w = reparam_weights_softmax_form(&vec![0.0; 6], &states)?;
        let worst = w.iter().fold(0.0f64, |m, &x| m.max((x - 1.0 / 32.0).abs()));
        checks.push(Check::within("reparam_zero_scores_uniform_weights", worst, 1e-15));
    }
    {
        // Hand instance: scores [0, ln 2, ln 4] on a 3-sample batch give
        // e^{-μ} = [1, ½, ¼] and weights [4/7, 2/7, 1/7].
        let mu = vec![0.0, 2.0f64.ln(), 4.0f64.ln(), 17.0];
        let q = Proposal::new(DiscreteDist::uniform(4));
        let states = vec![0, 1, 2];
        let expect = [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
        let energy = reparam_weights_energy_form(&mu, &q, &states);
        let softmax = reparam_weights_softmax_form(&mu, &states)?;
        let worst = num::max_abs_diff(&energy, &expect).max(num::max_abs_diff(&softmax, &expect));
        checks.push(Check::within("reparam_hand_batch_of_three", worst, 1e-12));
    }

    // --- optimal discriminator fit ----------------------------------
    {
        // Identical distributions: the ratio is constant, the fitted
        // normalized e^{-μ} is uniform.
        let mut rng = seeded_rng(derive_seed(seed, 11));
        let p = DiscreteDist::random_full_support(8, &mut rng);
        let fit = optimal_discriminator_fit(&p, &p)?;
        let norm = losses::batch_softmax(&fit.mu)?;
        let worst = norm
            .iter()
            .fold(0.0f64, |m, &x| m.max((x - 1.0 / 8.0).abs()));
        checks.push(Check::within("optimal_disc_uniform_when_dists_equal", worst, 1e-10));
    }
    {
        // Hand instance: p_D=[.4,.3,.2,.1] vs uniform p_G.
        let p_d = DiscreteDist::new(vec![0.4, 0.3, 0.2, 0.1])?;
        let p_g = DiscreteDist::uniform(4);
        let fit = optimal_discriminator_fit(&p_d, &p_g)?;
        let fitted = losses::batch_softmax(&fit.mu)?;
        let ratio: Vec<f64> = p_d
            .probs()
            .iter()
            .zip(p_g.probs())
            .map(|(&d, &g)| d / (0.5 * (d + g)))
            .collect();
        let total: f64 = ratio.iter().sum();
        let expect: Vec<f64> = ratio.iter().map(|&r| r / total).collect();
        checks.push(Check::within(
            "optimal_disc_hand_four_state",
            num::max_abs_diff(&fitted, &expect),
            1e-6,
        ));
    }
    {
        // 50 random pairs across K ∈ {2,4,8,16}: fitted normalized
        // e^{-μ} matches the normalized density ratio, and the
        // first-order condition holds.
        let mut rng = seeded_rng(derive_seed(seed, 12));
        let mut worst_ratio = 0.0f64;
        let mut worst_residual = 0.0f64;
        for trial in 0..50 {
            let k = [2, 4, 8, 16][trial % 4];
            let p_d = DiscreteDist::random_full_support(k, &mut rng);
            let p_g = DiscreteDist::random_full_support(k, &mut rng);
            let fit = optimal_discriminator_fit(&p_d, &p_g)?;
            let fitted = losses::batch_softmax(&fit.mu)?;
            let ratio: Vec<f64> = p_d
                .probs()
                .iter()
                .zip(p_g.probs())
                .map(|(&d, &g)| d / (0.5 * (d + g)))
                .collect();
            let total: f64 = ratio.iter().sum();
            let expect: Vec<f64> = ratio.iter().map(|&r| r / total).collect();
            worst_ratio = worst_ratio.max(num::max_abs_diff(&fitted, &expect));
            // Residual of p_D(x) = m(x)e^{-μ(x)} / Σ m e^{-μ}.
            let shifted: Vec<f64> = p_d
                .probs()
                .iter()
                .zip(p_g.probs())
                .zip(&fit.mu)
                .map(|((&d, &g), &u)| (0.5 * (d + g)).ln() - u)
                .collect();
            let pi = num::softmax(&shifted);
            worst_residual = worst_residual.max(num::max_abs_diff(&pi, p_d.probs()));
        }
        checks.push(Check::within("optimal_disc_ratio_match_50_pairs", worst_ratio, 1e-6));
        checks.push(Check::within(
            "optimal_disc_first_order_residual",
            worst_residual,
            1e-8,
        ));
    }
    {
        // The normalized fit does not depend on the starting table.
        let mut rng = seeded_rng(derive_seed(seed, 13));
        let p_d = DiscreteDist::random_full_support(8, &mut rng);
        let p_g = DiscreteDist::random_full_support(8, &mut rng);
        let mut results: Vec<Vec<f64>> = Vec::new();
        for _ in 0..5 {
            let mu0: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            let fit = optimal_discriminator_fit_from(&p_d, &p_g, mu0)?;
            results.push(losses::batch_softmax(&fit.mu)?);
        }
        let mut worst = 0.0f64;
        for i in 0..results.len() {
            for j in i + 1..results.len() {
                worst = worst.max(num::max_abs_diff(&results[i], &results[j]));
            }
        }
        checks.push(Check::within("optimal_disc_init_independent", worst, 1e-7));
    }

    // --- generator-objective decomposition --------------------------
    {
        // Hand instance K=2: p_D uniform, p_G a point mass.
        let p_d = DiscreteDist::new(vec![0.5, 0.5])?;
        let p_g = DiscreteDist::new(vec![1.0, 0.0])?;
        let dec = generator_objective_decomposition(&p_d, &p_g)?;
        let expect_lhs = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        let expect_rhs = 0.5 * (2.0f64 / 3.0).ln() + 0.5 * 2.0f64.ln();
        let err = (dec.lhs_kl - expect_lhs)
            .abs()
            .max((dec.js_sum - (expect_lhs + expect_rhs)).abs());
        checks.push(Check::within("decomposition_hand_two_state", err, 1e-12));
    }
    {
        // The identity: population_L_G - js_sum is a constant in p_G.
        // Spread of the difference over 100 random p_G per K must
        // collapse to numerical noise.
        let mut rng = seeded_rng(derive_seed(seed, 14));
        let mut worst_spread = 0.0f64;
        for &k in &[2usize, 4, 8, 16] {
            let p_d = DiscreteDist::random_full_support(k, &mut rng);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for _ in 0..100 {
                let p_g = DiscreteDist::random_full_support(k, &mut rng);
                let dec = generator_objective_decomposition(&p_d, &p_g)?;
                let diff = dec.population_l_g - dec.js_sum;
                lo = lo.min(diff);
                hi = hi.max(diff);
            }
            worst_spread = worst_spread.max(hi - lo);
        }
        checks.push(Check::within(
            "decomposition_difference_constant_in_p_g",
            worst_spread,
            1e-8,
        ));
    }
    {
        // The objective is minimized at p_G = p_D.
        let mut rng = seeded_rng(derive_seed(seed, 15));
        let p_d = DiscreteDist::random_full_support(6, &mut rng);
        let at_equal = generator_objective_decomposition(&p_d, &p_d)?.population_l_g;
        let mut min_elsewhere = f64::INFINITY;
        for _ in 0..20 {
            let p_g = DiscreteDist::random_full_support(6, &mut rng);
            min_elsewhere =
                min_elsewhere.min(generator_objective_decomposition(&p_d, &p_g)?.population_l_g);
        }
        checks.push(Check::within(
            "decomposition_minimum_at_equal_dists",
            at_equal - min_elsewhere,
            0.0,
        ));
    }
    {
        // On the simplex (p_G = softmax(θ)), the divergence pair has a
        // stationary point at p_G = p_D: finite differences of js_sum
        // w.r.t. θ vanish there.
        let mut rng = seeded_rng(derive_seed(seed, 16));
        let p_d = DiscreteDist::random_full_support(4, &mut rng);
        let theta: Vec<f64> = p_d.probs().iter().map(|&p| p.ln()).collect();
        let h = 1e-5;
        let js_of = |theta: &[f64]| -> Result<f64> {
            let p_g = DiscreteDist::new(num::softmax(theta))?;
            let m = DiscreteDist::new(
                p_d.probs()
                    .iter()
                    .zip(p_g.probs())
                    .map(|(&a, &b)| 0.5 * (a + b))
                    .collect(),
            )?;
            Ok(kl(&m, &p_d) + kl(&p_d, &m))
        };
        let mut worst = 0.0f64;
        for i in 0..4 {
            let mut up = theta.clone();
            up[i] += h;
            let mut down = theta.clone();
            down[i] -= h;
            worst = worst.max(((js_of(&up)? - js_of(&down)?) / (2.0 * h)).abs());
        }
        checks.push(Check::within("divergence_pair_stationary_at_equal", worst, 1e-8));
    }

    // --- KL building block ------------------------------------------
    {
        let p = DiscreteDist::new(vec![0.4, 0.6])?;
        let q = DiscreteDist::new(vec![0.5, 0.5])?;
        let hand = 0.4 * 0.8f64.ln() + 0.6 * 1.2f64.ln();
        let point = DiscreteDist::new(vec![1.0, 0.0])?;
        let err = kl(&p, &p)
            .abs()
            .max((kl(&point, &q) - 2.0f64.ln()).abs())
            .max((kl(&p, &q) - hand).abs());
        checks.push(Check::within("kl_hand_values", err, 1e-12));
    }
    {
        let mut rng = seeded_rng(derive_seed(seed, 17));
        let mut min_kl = f64::INFINITY;
        for _ in 0..200 {
            let p = DiscreteDist::random_full_support(5, &mut rng);
            let q = DiscreteDist::random_full_support(5, &mut rng);
            min_kl = min_kl.min(kl(&p, &q));
        }
        checks.push(Check::within("kl_nonnegative_random", -min_kl, 1e-12));
    }

    // --- gradient correspondence ------------------------------------
    {
        // The expected per-state aggregate of the batch discriminator
        // gradient (real half from p_D, generated half from p_G)
        // matches the exact likelihood gradient of the reparameterized
        // energy model ξ = μ - ln m. Checked as z-scores over 50 seeds
        // of batches of 1024+1024.
        let mut rng = seeded_rng(derive_seed(seed, 18));
        let k = 8;
        let mu: Vec<f64> = (0..k).map(|_| rng.random_range(-1.5..1.5)).collect();
        let p_d = DiscreteDist::random_full_support(k, &mut rng);
        let p_g = DiscreteDist::random_full_support(k, &mut rng);
        let q = Proposal::mixture(&p_d, &p_g)?;
        let xi: Vec<f64> = mu
            .iter()
            .zip(q.dist().probs())
            .map(|(&u, &m)| u - m.ln())
            .collect();
        let exact = mle_grad_exact(&EnergyModel::new(xi)?, &p_d);

        let n_seeds = 50;
        let half = 1024;
        let mut per_seed: Vec<Vec<f64>> = Vec::with_capacity(n_seeds);
        for trial in 0..n_seeds as u64 {
            let mut batch_rng = seeded_rng(derive_seed(seed, 400 + trial));
            let real_states = sample_states(&p_d, half, &mut batch_rng);
            let fake_states = sample_states(&p_g, half, &mut batch_rng);
            let real_scores: Vec<f64> = real_states.iter().map(|&s| mu[s]).collect();
            let fake_scores: Vec<f64> = fake_states.iter().map(|&s| mu[s]).collect();
            let batch = losses::Batch::new(real_scores, fake_scores)?;
            let grad = losses::d_loss_score_grad(&batch);
            let mut agg = vec![0.0; k];
            for (i, &s) in real_states.iter().chain(&fake_states).enumerate() {
                agg[s] += grad[i];
            }
            per_seed.push(agg);
        }
        let mut worst_z = 0.0f64;
        for state in 0..k {
            let vals: Vec<f64> = per_seed.iter().map(|v| v[state]).collect();
            let mean: f64 = vals.iter().sum::<f64>() / n_seeds as f64;
            let var: f64 = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (n_seeds - 1) as f64;
            let se = (var / n_seeds as f64).sqrt();
            worst_z = worst_z.max((mean - exact[state]).abs() / se.max(1e-300));
        }
        checks.push(Check::within("batch_gradient_matches_likelihood_gradient", worst_z, 3.0));
    }

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dist_validation() {
        assert!(DiscreteDist::new(vec![]).is_err());
        assert!(DiscreteDist::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDist::new(vec![-0.1, 1.1]).is_err());
        assert!(DiscreteDist::new(vec![0.25; 4]).is_ok());
        assert!(DiscreteDist::new(vec![1.0, 0.0]).is_ok());
    }

    #[test]
    fn energy_model_density_normalizes() {
        let m = EnergyModel::new(vec![0.0, 1.0, -0.5]).unwrap();
        let d = m.dist();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // Lower energy, higher probability.
        assert!(d.p(2) > d.p(0) && d.p(0) > d.p(1));
        // Explicit check of one entry against the direct formula.
        let z: f64 = [0.0f64, 1.0, -0.5].iter().map(|&e| (-e).exp()).sum();
        assert!((d.p(1) - (-1.0f64).exp() / z).abs() < 1e-15);
    }

    #[test]
    fn mle_loss_uniform_energies_is_ln_k() {
        let model = EnergyModel::new(vec![1.3; 7]).unwrap();
        let observed = ObservedSet::new(vec![0, 3, 6, 6]).unwrap();
        assert!((mle_loss_exact(&model, &observed) - 7.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn mle_grad_hand_and_stationary() {
        let model = EnergyModel::new(vec![0.0, 0.0]).unwrap();
        let data = DiscreteDist::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(mle_grad_exact(&model, &data), vec![0.5, -0.5]);

        let model = EnergyModel::new(vec![0.3, -1.0, 0.9]).unwrap();
        let g = mle_grad_exact(&model, &model.dist());
        assert!(g.iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn is_batch_is_deterministic_and_validated() {
        let model = EnergyModel::new(vec![0.5, -0.5, 0.0]).unwrap();
        let q = Proposal::new(DiscreteDist::uniform(3));
        let a = draw_is_batch(&model, &q, 100, 9).unwrap();
        let b = draw_is_batch(&model, &q, 100, 9).unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(a.weights, b.weights);
        let w = a.normalized_weights();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        assert!(draw_is_batch(&model, &q, 0, 9).is_err());
        let bad_q = Proposal::new(DiscreteDist::new(vec![0.5, 0.5, 0.0]).unwrap());
        assert!(matches!(
            draw_is_batch(&model, &bad_q, 10, 9),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn is_estimate_converges_toward_exact_gradient() {
        let model = EnergyModel::new(vec![0.8, -0.3, 0.1, -1.2]).unwrap();
        let data = DiscreteDist::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let q = Proposal::new(DiscreteDist::uniform(4));
        let exact = mle_grad_exact(&model, &data);
        let coarse = l2_diff(&is_grad_estimate(&model, &data, &q, 100, 5).unwrap(), &exact);
        let fine = l2_diff(&is_grad_estimate(&model, &data, &q, 100_000, 5).unwrap(), &exact);
        assert!(fine < coarse, "fine {fine} vs coarse {coarse}");
        assert!(fine < 0.01);
    }

    #[test]
    fn reparam_hand_instance() {
        // Scores [0, ln 2, ln 4] sampled once each: weights 4:2:1.
        let mu = vec![0.0, 2.0f64.ln(), 4.0f64.ln()];
        let q = Proposal::new(DiscreteDist::uniform(3));
        let states = vec![0, 1, 2];
        let expect = [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
        let energy = reparam_weights_energy_form(&mu, &q, &states);
        let softmax = reparam_weights_softmax_form(&mu, &states).unwrap();
        assert!(num::max_abs_diff(&energy, &expect) < 1e-15);
        assert!(num::max_abs_diff(&softmax, &expect) < 1e-15);
    }

    #[test]
    fn reparam_discrepancy_is_noise_level() {
        let mu = vec![2.0, -1.0, 0.3, 0.0, 1.7];
        let q = Proposal::new(DiscreteDist::new(vec![0.1, 0.15, 0.3, 0.05, 0.4]).unwrap());
        let d = reparam_grad_check(&mu, &q, 31, 500).unwrap();
        assert!(d < 1e-12, "discrepancy {d}");
    }

    #[test]
    fn optimal_disc_hand_ratios_match_published_rounding() {
        // p_D=[.4,.3,.2,.1] vs uniform: density ratios p_D/m round to
        // [1.23077, 1.09091, 0.88889, 0.57143].
        let p_d = DiscreteDist::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let p_g = DiscreteDist::uniform(4);
        let fit = optimal_discriminator_fit(&p_d, &p_g).unwrap();
        let fitted = losses::batch_softmax(&fit.mu).unwrap();
        let rounded = [1.23077, 1.09091, 0.88889, 0.57143];
        let total: f64 = rounded.iter().sum();
        for (f, r) in fitted.iter().zip(&rounded) {
            assert!((f - r / total).abs() < 1e-5, "{f} vs {}", r / total);
        }
        assert!(fit.grad_norm < 1e-10);
    }

    #[test]
    fn optimal_disc_equal_dists_converges_immediately() {
        let p = DiscreteDist::new(vec![0.3, 0.3, 0.4]).unwrap();
        let fit = optimal_discriminator_fit(&p, &p).unwrap();
        // Starting scores are already optimal: gradient is zero at once.
        assert_eq!(fit.iterations, 0);
        assert!(fit.mu.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn kl_conventions() {
        let p = DiscreteDist::new(vec![0.4, 0.6]).unwrap();
        let u = DiscreteDist::new(vec![0.5, 0.5]).unwrap();
        let point = DiscreteDist::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(kl(&p, &p), 0.0);
        assert!((kl(&point, &u) - 2.0f64.ln()).abs() < 1e-15);
        let hand = 0.4 * 0.8f64.ln() + 0.6 * 1.2f64.ln();
        assert!((kl(&p, &u) - hand).abs() < 1e-15);
        assert!((hand - 0.020135513550688863).abs() < 1e-15);
        // Support violation signals infinity, zero mass in p is skipped.
        assert_eq!(kl(&u, &point), f64::INFINITY);
        assert_eq!(kl(&point, &u), kl(&point, &u));
    }

    #[test]
    fn decomposition_hand_values_match_published_rounding() {
        let p_d = DiscreteDist::new(vec![0.5, 0.5]).unwrap();
        let p_g = DiscreteDist::new(vec![1.0, 0.0]).unwrap();
        let dec = generator_objective_decomposition(&p_d, &p_g).unwrap();
        assert!((dec.lhs_kl - 0.13081).abs() < 1e-5);
        assert!((dec.js_sum - 0.27465).abs() < 1e-5);
    }

    #[test]
    fn decomposition_zero_at_equal_dists() {
        let p = DiscreteDist::new(vec![0.2, 0.5, 0.3]).unwrap();
        let dec = generator_objective_decomposition(&p, &p).unwrap();
        assert!(dec.lhs_kl.abs() < 1e-12);
        assert!(dec.js_sum.abs() < 1e-12);
        // population_L_G collapses to H(p_D) - ln 2 when p_G = p_D.
        let entropy: f64 = -p.probs().iter().map(|&x| x * x.ln()).sum::<f64>();
        assert!((dec.population_l_g - (entropy - 2.0f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn decomposition_signals_infinity_on_support_violation() {
        let p_d = DiscreteDist::new(vec![1.0, 0.0]).unwrap();
        let p_g = DiscreteDist::new(vec![0.0, 1.0]).unwrap();
        let dec = generator_objective_decomposition(&p_d, &p_g).unwrap();
        assert_eq!(dec.lhs_kl, f64::INFINITY);
        assert_eq!(dec.js_sum, f64::INFINITY);
    }

    #[test]
    fn suite_passes_on_fixed_seed() {
        let checks = theory_check_suite(7).unwrap();
        for c in &checks {
            assert!(c.pass, "{} failed: value {} tolerance {}", c.name, c.value, c.tolerance);
        }
        assert!(checks.len() >= 20);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kl_nonnegative_and_zero_iff_equal(
            raw_p in proptest::collection::vec(0.05..1.0f64, 4),
            raw_q in proptest::collection::vec(0.05..1.0f64, 4),
        ) {
            let norm = |raw: &[f64]| {
                let s: f64 = raw.iter().sum();
                DiscreteDist::new(raw.iter().map(|&x| x / s).collect()).unwrap()
            };
            let p = norm(&raw_p);
            let q = norm(&raw_q);
            let d = kl(&p, &q);
            prop_assert!(d >= -1e-15);
            let gap = num::max_abs_diff(p.probs(), q.probs());
            if gap > 1e-3 {
                prop_assert!(d > 0.0);
            }
        }

        #[test]
        fn is_weights_sum_to_one(
            energies in proptest::collection::vec(-2.0..2.0f64, 6),
            seed in 0..1000u64,
        ) {
            let model = EnergyModel::new(energies).unwrap();
            let q = Proposal::new(DiscreteDist::uniform(6));
            let batch = draw_is_batch(&model, &q, 50, seed).unwrap();
            let total: f64 = batch.normalized_weights().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
