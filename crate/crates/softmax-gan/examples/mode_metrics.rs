//! The collapse metrics on known sample sets: ring data, a half-ring
//! collapse, and a single blob.
//!
//!     cargo run --example mode_metrics
//!
//! Shows per-mode counts, the coverage/high-quality numbers the trainer
//! logs, and the histogram divergence each situation produces.

use softmax_gan::data::{
    default_min_count, histogram_js, mode_report, sample_mixture, GaussianMixture2D, GridBounds,
    DEFAULT_RADIUS_MULT,
};

fn report(label: &str, points: &[[f64; 2]], mix: &GaussianMixture2D, reference: &[[f64; 2]]) {
    let min_count = default_min_count(points.len(), mix.n_modes());
    let r = mode_report(points, mix, DEFAULT_RADIUS_MULT, min_count);
    let bounds = GridBounds::covering(mix, 1.0);
    let js = histogram_js(reference, points, 64, &bounds).unwrap();
    println!(
        "{label:<12} counts {:?}  coverage {}/{}  hq {:.3}  hist_js {:.4}",
        r.counts,
        r.covered,
        mix.n_modes(),
        r.hq_fraction,
        js
    );
}

fn main() {
    let mix = GaussianMixture2D::ring_8();
    let n = 2048;
    println!(
        "8 modes on a radius-2 ring, std {}; a mode counts as covered at ≥ {} of {n} samples\n",
        mix.std(),
        default_min_count(n, mix.n_modes())
    );

    let reference = sample_mixture(&mix, n, 99);
    let fresh = sample_mixture(&mix, n, 7);
    report("true draw", fresh.points(), &mix, reference.points());

    // Keep only the four right-hand modes: half the ring is gone.
    let half: Vec<[f64; 2]> = fresh
        .points()
        .iter()
        .copied()
        .filter(|p| p[0] > -0.1)
        .collect();
    report("half ring", &half, &mix, reference.points());

    // Everything lands on one center, slightly smeared: the classic
    // collapse picture — high sample quality, no diversity.
    let c = mix.centers()[0];
    let blob: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64 * std::f64::consts::TAU;
            [c[0] + 0.01 * t.cos(), c[1] + 0.01 * t.sin()]
        })
        .collect();
    report("one blob", &blob, &mix, reference.points());

    // Uniform noise over the bounding square: full nominal spread but
    // almost nothing lands within 3σ of a center.
    let noise: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let a = (i as f64 * 0.754877).fract() * 6.0 - 3.0;
            let b = (i as f64 * 0.569840).fract() * 6.0 - 3.0;
            [a, b]
        })
        .collect();
    report("uniform", &noise, &mix, reference.points());

    // The divergence is symmetric and zero only against itself.
    let bounds = GridBounds::covering(&mix, 1.0);
    let ab = histogram_js(reference.points(), &half, 64, &bounds).unwrap();
    let ba = histogram_js(&half, reference.points(), 64, &bounds).unwrap();
    println!(
        "\nsymmetry: |js(ref, half) - js(half, ref)| = {:.2e}",
        (ab - ba).abs()
    );
    let self_js = histogram_js(reference.points(), reference.points(), 64, &bounds).unwrap();
    println!("identity: js(ref, ref) = {self_js:.2e}");
    println!("upper bound: ln 2 = {:.4}", std::f64::consts::LN_2);
}
