//! Verify every autodiff operation and both loss heads against central
//! finite differences.
//!
//!     cargo run --release --example gradient_check -- [seed]
//!
//! Each check perturbs every input coordinate by ±h (h = 1e-5), compares
//! the slope to the backward-pass gradient, and reports the worst
//! relative error across 20 random instances. One hand-worked case is
//! printed first so the method itself is visible.

use softmax_gan::autodiff::Tape;
use softmax_gan::gradcheck::gradcheck_suite;
use softmax_gan::report::{all_pass, render_table};
use softmax_gan::tensor::Tensor;

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(11);

    // One coordinate of one op, by hand: f(x) = sum(tanh(x)) at x₀.
    let x0 = vec![0.3, -0.8, 1.1];
    let mut tape = Tape::new();
    let x = tape.leaf(Tensor::vector(x0.clone()));
    let y = tape.tanh(x);
    let root = tape.sum(y);
    let grads = tape.backward(root).unwrap();
    let analytic = grads.wrt(x).data()[1];
    let h = 1e-5;
    let eval = |v: f64| -> f64 {
        let mut t = Tape::new();
        let mut bumped = x0.clone();
        bumped[1] = v;
        let x = t.leaf(Tensor::vector(bumped));
        let y = t.tanh(x);
        let root = t.sum(y);
        t.value(root).scalar_value()
    };
    let numeric = (eval(x0[1] + h) - eval(x0[1] - h)) / (2.0 * h);
    println!("sum(tanh(x)), coordinate 1:");
    println!("  backward pass : {analytic:.12}");
    println!("  (f(x+h)-f(x-h))/2h: {numeric:.12}");
    println!("  relative error: {:.2e}\n", (analytic - numeric).abs() / analytic.abs());

    // The same comparison, systematically, for everything on the tape.
    let checks = gradcheck_suite(seed).unwrap();
    print!("{}", render_table(&checks));
    println!(
        "suite (seed {seed}): {}/{} checks passed",
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    );
    std::process::exit(if all_pass(&checks) { 0 } else { 1 });
}
