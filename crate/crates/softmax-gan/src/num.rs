//! Numerically stable scalar helpers shared by the loss, theory and
//! training code. Everything that exponentiates goes through
//! [`log_sum_exp`] so there is exactly one place where stabilization
//! happens.

/// `ln Σ exp(x_i)` computed as `m + ln Σ exp(x_i - m)` with `m = max x_i`.
///
/// Returns `-inf` for an empty slice (the log of an empty sum). If the
/// maximum is not finite (`+inf`, `NaN`, or every entry `-inf`) that value
/// is returned directly instead of being propagated through `exp`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let sum: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + sum.ln()
}

/// Softmax of `xs`, computed as `exp(x_i - log_sum_exp(xs))`.
///
/// The result sums to 1 up to rounding and is invariant under adding a
/// constant to every entry.
pub fn softmax(xs: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(xs);
    xs.iter().map(|&x| (x - lse).exp()).collect()
}

/// `ln(1 + e^x)` without overflow for large `|x|`.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Logistic function, stable on both tails.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Relative error with a floor on the denominator:
/// `|a - b| / max(|a|, |b|, 1e-8)`.
///
/// The floor makes the comparison of two near-zero quantities report zero
/// error instead of amplifying rounding noise.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// Largest absolute componentwise difference between two equal-length slices.
pub fn max_abs_diff(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "max_abs_diff: length mismatch");
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (x - y).abs())
        .fold(0.0, f64::max)
}
