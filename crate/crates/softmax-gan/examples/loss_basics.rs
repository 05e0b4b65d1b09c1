//! A walking tour of the batch-softmax loss pair on a six-sample batch.
//!
//!     cargo run --example loss_basics
//!
//! Shows the batch distribution, the two targets, the loss values with
//! their lower bounds, shift invariance, and the closed-form score
//! gradient agreeing with reverse-mode autodiff.

use softmax_gan::autodiff::Tape;
use softmax_gan::losses::{
    batch_softmax, d_loss_score_grad, d_loss_softmax, d_loss_softmax_graph, g_loss_softmax,
    softmax_targets, Batch,
};
use softmax_gan::tensor::Tensor;

fn main() {
    // Three real samples with low scores (the model "believes" them) and
    // three generated ones with higher scores.
    let real = vec![0.2, -0.4, 0.1];
    let fake = vec![1.3, 0.8, 2.0];
    let batch = Batch::new(real.clone(), fake.clone()).unwrap();
    let n = batch.len();

    let s = batch_softmax(&batch.concat()).unwrap();
    let targets = softmax_targets(real.len(), fake.len()).unwrap();
    println!("sample   score     softmax   t_D       t_G");
    for i in 0..n {
        let kind = if i < real.len() { "real" } else { "fake" };
        println!(
            "{kind} #{:<2} {:>8.3} {:>9.4} {:>9.4} {:>9.4}",
            i % 3,
            batch.concat()[i],
            s[i],
            targets.discriminator[i],
            targets.generator[i]
        );
    }
    println!("softmax sums to {:.12}", s.iter().sum::<f64>());

    // The discriminator pulls the batch distribution toward uniform over
    // the reals; the generator pulls it toward uniform over everything.
    let d = d_loss_softmax(&batch);
    let g = g_loss_softmax(&batch);
    println!("\nd_loss = {d:.6}  (> ln n_real = {:.6})", (real.len() as f64).ln());
    println!("g_loss = {g:.6}  (>= ln n = {:.6})", (n as f64).ln());

    // Equal scores attain the generator bound exactly.
    let flat = Batch::new(vec![0.7; 3], vec![0.7; 3]).unwrap();
    println!(
        "equal scores: g_loss - ln n = {:.2e}",
        g_loss_softmax(&flat) - (n as f64).ln()
    );

    // Both losses only see score differences: shifting every score by a
    // constant changes nothing.
    let shifted = Batch::new(
        real.iter().map(|x| x + 37.5).collect(),
        fake.iter().map(|x| x + 37.5).collect(),
    )
    .unwrap();
    println!(
        "shift by +37.5: |Δd_loss| = {:.2e}, |Δg_loss| = {:.2e}",
        (d_loss_softmax(&shifted) - d).abs(),
        (g_loss_softmax(&shifted) - g).abs()
    );

    // ∂L_D/∂μ = t_D − s, straight from the cross-entropy form. Autodiff
    // reproduces it to machine precision.
    let closed = d_loss_score_grad(&batch);
    let mut tape = Tape::new();
    let mu_real = tape.leaf(Tensor::vector(real.clone()));
    let mu_fake = tape.leaf(Tensor::vector(fake.clone()));
    let root = d_loss_softmax_graph(&mut tape, mu_real, mu_fake).unwrap();
    let grads = tape.backward(root).unwrap();
    let mut autodiff: Vec<f64> = grads.wrt(mu_real).data().to_vec();
    autodiff.extend_from_slice(grads.wrt(mu_fake).data());
    let worst = closed
        .iter()
        .zip(&autodiff)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("\nclosed-form vs autodiff d_loss gradient, max |Δ| = {worst:.2e}");
    println!(
        "gradient sums to {:.2e} (the mean-shift direction is flat)",
        closed.iter().sum::<f64>()
    );
}
