//! The discrete-distribution oracle, narrated.
//!
//!     cargo run --example theory_checks -- [seed]
//!
//! Works one small instance of each claim with the numbers on screen,
//! then runs the full randomized check suite.

use softmax_gan::report::{all_pass, render_table};
use softmax_gan::rng::seeded_rng;
use softmax_gan::theory::{
    generator_objective_decomposition, is_grad_estimate, kl, mle_grad_exact,
    optimal_discriminator_fit, theory_check_suite, DiscreteDist, EnergyModel, Proposal,
};

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(7);
    let mut rng = seeded_rng(seed);

    // --- Likelihood gradient and its sampled estimate -----------------
    // An energy table over 4 states defines p(x) = e^{-ξ(x)}/Z. The
    // likelihood gradient is p_data − p_model; a self-normalized
    // importance-sampling batch estimates the p_model term.
    let model = EnergyModel::new(vec![0.5, 1.0, 0.2, 1.7]).unwrap();
    let data = DiscreteDist::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
    let q = Proposal::new(DiscreteDist::uniform(4));
    let exact = mle_grad_exact(&model, &data);
    println!("state  p_model   exact grad   estimate: n=100    n=100000");
    let small = is_grad_estimate(&model, &data, &q, 100, seed).unwrap();
    let large = is_grad_estimate(&model, &data, &q, 100_000, seed).unwrap();
    let p_model = model.dist();
    for s in 0..4 {
        println!(
            "{s}      {:>7.4}  {:>11.6} {:>17.6} {:>11.6}",
            p_model.p(s),
            exact[s],
            small[s],
            large[s]
        );
    }

    // --- Optimal discriminator ----------------------------------------
    // Minimizing the population discriminator objective over a score
    // table drives e^{-μ} ∝ p_D / m with m = (p_D + p_G)/2.
    let p_d = DiscreteDist::random_full_support(4, &mut rng);
    let p_g = DiscreteDist::random_full_support(4, &mut rng);
    let fit = optimal_discriminator_fit(&p_d, &p_g).unwrap();
    let mut exp_neg: Vec<f64> = fit.mu.iter().map(|&m| (-m).exp()).collect();
    let z: f64 = exp_neg.iter().sum();
    exp_neg.iter_mut().for_each(|v| *v /= z);
    let mut ratio: Vec<f64> = (0..4)
        .map(|s| p_d.p(s) / (0.5 * (p_d.p(s) + p_g.p(s))))
        .collect();
    let rz: f64 = ratio.iter().sum();
    ratio.iter_mut().for_each(|v| *v /= rz);
    println!(
        "\noptimal discriminator ({} iterations, grad norm {:.1e}):",
        fit.iterations, fit.grad_norm
    );
    println!("state  p_D      p_G      e^-mu (norm)  p_D/m (norm)");
    for s in 0..4 {
        println!(
            "{s}      {:>7.4}  {:>7.4}  {:>11.6} {:>12.6}",
            p_d.p(s),
            p_g.p(s),
            exp_neg[s],
            ratio[s]
        );
    }

    // --- Generator objective = symmetric KL + constant ----------------
    // At that optimum the population generator objective equals
    // KL(m‖p_D) + KL(p_D‖m) plus a term that never depends on p_G.
    println!("\nvary p_G with p_D fixed; the decomposition gap stays constant:");
    println!("KL(m||p_D)+KL(p_D||m)   objective   difference");
    for _ in 0..4 {
        let p_g = DiscreteDist::random_full_support(4, &mut rng);
        let m_probs: Vec<f64> = (0..4).map(|s| 0.5 * (p_d.p(s) + p_g.p(s))).collect();
        let m = DiscreteDist::new(m_probs).unwrap();
        let d = generator_objective_decomposition(&p_d, &p_g).unwrap();
        let kl_sum = kl(&m, &p_d) + kl(&p_d, &m);
        println!(
            "{:>21.12} {:>11.6} {:>12.8}",
            kl_sum,
            d.population_l_g,
            d.population_l_g - d.js_sum
        );
        assert!((kl_sum - d.js_sum).abs() < 1e-12);
        assert!((kl(&m, &p_d) - d.lhs_kl).abs() < 1e-12);
    }

    // --- The full randomized suite ------------------------------------
    let checks = theory_check_suite(seed).unwrap();
    println!();
    print!("{}", render_table(&checks));
    let ok = all_pass(&checks);
    println!(
        "suite (seed {seed}): {}/{} checks passed",
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    );
    std::process::exit(if ok { 0 } else { 1 });
}
