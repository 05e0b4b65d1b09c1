//! How fast the self-normalized gradient estimator approaches the exact
//! likelihood gradient as the batch grows.
//!
//!     cargo run --release --example estimator_convergence
//!
//! At each batch size the error ‖estimate − exact‖₂ is summarized over
//! 20 seeds. Self-normalization makes the estimator biased at finite n,
//! but both bias and variance vanish, at the usual ~1/√n rate.

use softmax_gan::rng::seeded_rng;
use softmax_gan::theory::{
    is_grad_estimate, mle_grad_exact, DiscreteDist, EnergyModel, Proposal,
};

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn l2_norm(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn main() {
    let mut rng = seeded_rng(2024);
    let k = 8;
    let model = EnergyModel::new(
        (0..k).map(|s| 0.3 * s as f64 - 1.0).collect::<Vec<_>>(),
    )
    .unwrap();
    let data = DiscreteDist::random_full_support(k, &mut rng);
    // Proposal: a mixture of the data law and the model's own law —
    // the same shape of proposal the adversarial setting induces.
    let q = Proposal::mixture(&data, &model.dist()).unwrap();
    let exact = mle_grad_exact(&model, &data);
    println!(
        "K = {k}, exact gradient norm = {:.6}",
        l2_norm(&exact)
    );

    println!("\n      n     median err      p25           p75     median·sqrt(n)");
    let mut medians: Vec<(usize, f64)> = Vec::new();
    for &n in &[100usize, 1_000, 10_000, 100_000] {
        let mut errors: Vec<f64> = (0..20)
            .map(|s| {
                let est = is_grad_estimate(&model, &data, &q, n, 1000 + s).unwrap();
                let diff: Vec<f64> = est.iter().zip(&exact).map(|(a, b)| a - b).collect();
                l2_norm(&diff)
            })
            .collect();
        errors.sort_by(f64::total_cmp);
        let med = quantile(&errors, 0.5);
        println!(
            "{n:>7}   {med:>10.3e}   {:>10.3e}   {:>10.3e}   {:>10.4}",
            quantile(&errors, 0.25),
            quantile(&errors, 0.75),
            med * (n as f64).sqrt()
        );
        medians.push((n, med));
    }

    let (n_small, err_small) = medians[1];
    let (n_large, err_large) = medians[3];
    println!(
        "\nmedian error ratio n={n_large} vs n={n_small}: {:.3} (1/sqrt ratio would be {:.3})",
        err_large / err_small,
        (n_small as f64 / n_large as f64).sqrt()
    );
}
