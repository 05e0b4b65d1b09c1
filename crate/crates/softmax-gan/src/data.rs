//! Synthetic 2D data: Gaussian mixtures (notably the 8-mode ring used
//! throughout the training ablations), deterministic sampling, and the
//! two quantitative sample-quality metrics — per-mode coverage counts
//! and a histogram Jensen-Shannon divergence.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{contract_err, Result};
use crate::rng::seeded_rng;

/// Isotropic Gaussian mixture in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture2D {
    centers: Vec<[f64; 2]>,
    std: f64,
    weights: Vec<f64>,
}

impl GaussianMixture2D {
    pub fn new(centers: Vec<[f64; 2]>, std: f64, weights: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(contract_err!("mixture needs at least one component"));
        }
        if !(std > 0.0) || !std.is_finite() {
            return Err(contract_err!("mixture std must be positive and finite, got {std}"));
        }
        if weights.len() != centers.len() {
            return Err(contract_err!(
                "{} weights for {} centers",
                weights.len(),
                centers.len()
            ));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(contract_err!("mixture weights must be non-negative and finite"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(contract_err!(
                "mixture weights sum to {total:.17}, expected 1 within 1e-12"
            ));
        }
        Ok(GaussianMixture2D {
            centers,
            std,
            weights,
        })
    }

    /// `n_modes` equally weighted components spaced evenly on a circle,
    /// component 0 at angle zero (on the positive x axis).
    pub fn ring(n_modes: usize, radius: f64, std: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(contract_err!("ring needs at least one mode"));
        }
        let centers = (0..n_modes)
            .map(|i| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / n_modes as f64;
                [radius * angle.cos(), radius * angle.sin()]
            })
            .collect();
        GaussianMixture2D::new(centers, std, vec![1.0 / n_modes as f64; n_modes])
    }

    /// The standard benchmark: 8 modes on a circle of radius 2 with
    /// per-mode standard deviation 0.02.
    pub fn ring_8() -> Self {
        GaussianMixture2D::ring(8, 2.0, 0.02).expect("fixed ring parameters are valid")
    }

    /// Same mixture translated by `(dx, dy)` — used to move the ring
    /// into the positive quadrant for the activation ablation.
    pub fn shifted(&self, dx: f64, dy: f64) -> Self {
        GaussianMixture2D {
            centers: self
                .centers
                .iter()
                .map(|c| [c[0] + dx, c[1] + dy])
                .collect(),
            std: self.std,
            weights: self.weights.clone(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[[f64; 2]] {
        &self.centers
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// A batch of 2D points together with the seed that produced it (or a
/// caller-chosen tag for points that did not come from a sampler).
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    points: Vec<[f64; 2]>,
    seed: u64,
}

impl SampleSet {
    pub fn new(points: Vec<[f64; 2]>, seed: u64) -> Self {
        SampleSet { points, seed }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// CSV with header `x,y`; coordinates printed with 17 significant
    /// digits so parsing the file back reproduces the exact doubles.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 + self.points.len() * 52);
        out.push_str("x,y\n");
        for p in &self.points {
            out.push_str(&format!("{:.16e},{:.16e}\n", p[0], p[1]));
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("x,y") => {}
            other => {
                return Err(contract_err!(
                    "expected sample CSV header \"x,y\", got {other:?}"
                ))
            }
        }
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            let (x, y) = line
                .split_once(',')
                .ok_or_else(|| contract_err!("sample CSV line {} has no comma", i + 2))?;
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| contract_err!("sample CSV line {}: {e}", i + 2))
            };
            points.push([parse(x)?, parse(y)?]);
        }
        Ok(SampleSet { points, seed: 0 })
    }
}

/// Draw `n` points i.i.d. from the mixture, advancing the caller's
/// generator. Per point the draw order is fixed (component pick, then x
/// offset, then y offset), so the generator state pins the batch
/// bit-for-bit.
pub fn draw_points(
    mix: &GaussianMixture2D,
    n: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<[f64; 2]> {
    let mut cdf = Vec::with_capacity(mix.n_modes());
    let mut acc = 0.0;
    for &w in mix.weights() {
        acc += w;
        cdf.push(acc);
    }
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let comp = cdf.iter().position(|&c| u < c).unwrap_or(mix.n_modes() - 1);
            let zx: f64 = rng.sample(StandardNormal);
            let zy: f64 = rng.sample(StandardNormal);
            let c = mix.centers()[comp];
            [c[0] + mix.std() * zx, c[1] + mix.std() * zy]
        })
        .collect()
}

/// [`draw_points`] from a fresh generator seeded with `seed`.
pub fn sample_mixture(mix: &GaussianMixture2D, n: usize, seed: u64) -> SampleSet {
    let mut rng = seeded_rng(seed);
    SampleSet::new(draw_points(mix, n, &mut rng), seed)
}

/// Per-mode attribution of a sample batch.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeReport {
    /// Samples whose nearest center is mode `i` and which lie within
    /// `radius_mult · std` of it. Stray samples count nowhere, so the
    /// counts sum to at most the batch size.
    pub counts: Vec<usize>,
    /// Number of modes whose count reached `min_count`.
    pub covered: usize,
    /// Fraction of the batch that landed within the capture radius of
    /// some mode ("high-quality" samples).
    pub hq_fraction: f64,
}

/// Capture radius used by the training harness: three standard
/// deviations around each center.
pub const DEFAULT_RADIUS_MULT: f64 = 3.0;

/// Threshold rule used by the training harness: a mode counts as
/// covered once it holds at least `n / (10 · modes)` samples.
pub fn default_min_count(n_samples: usize, n_modes: usize) -> usize {
    (n_samples / (10 * n_modes)).max(1)
}

/// Assign every sample to its nearest mixture center; keep the
/// assignment only if the sample lies within `radius_mult · std`.
pub fn mode_report(
    samples: &[[f64; 2]],
    mix: &GaussianMixture2D,
    radius_mult: f64,
    min_count: usize,
) -> ModeReport {
    let radius_sq = (radius_mult * mix.std()).powi(2);
    let mut counts = vec![0usize; mix.n_modes()];
    for p in samples {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in mix.centers().iter().enumerate() {
            let d = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        if best_d <= radius_sq {
            counts[best] += 1;
        }
    }
    let captured: usize = counts.iter().sum();
    let covered = counts.iter().filter(|&&c| c >= min_count).count();
    let hq_fraction = if samples.is_empty() {
        0.0
    } else {
        captured as f64 / samples.len() as f64
    };
    ModeReport {
        counts,
        covered,
        hq_fraction,
    }
}

/// Axis-aligned rectangle over which histogram comparisons are binned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridBounds {
    pub min_x: f64,
    pub max_x: f64,
    pub min_y: f64,
    pub max_y: f64,
}

impl GridBounds {
    pub fn new(min_x: f64, max_x: f64, min_y: f64, max_y: f64) -> Result<Self> {
        if !(min_x < max_x) || !(min_y < max_y) {
            return Err(contract_err!(
                "degenerate grid bounds [{min_x}, {max_x}] x [{min_y}, {max_y}]"
            ));
        }
        Ok(GridBounds {
            min_x,
            max_x,
            min_y,
            max_y,
        })
    }

    /// Square box `[-h, h]²`.
    pub fn square(half_extent: f64) -> Result<Self> {
        GridBounds::new(-half_extent, half_extent, -half_extent, half_extent)
    }

    /// Bounding box of the mixture centers padded by `margin` on every
    /// side — the standard comparison window for a given data preset.
    pub fn covering(mix: &GaussianMixture2D, margin: f64) -> Self {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for c in mix.centers() {
            min_x = min_x.min(c[0]);
            max_x = max_x.max(c[0]);
            min_y = min_y.min(c[1]);
            max_y = max_y.max(c[1]);
        }
        GridBounds {
            min_x: min_x - margin,
            max_x: max_x + margin,
            min_y: min_y - margin,
            max_y: max_y + margin,
        }
    }
}

/// Integer bin counts over a `grid × grid` lattice; out-of-bounds points
/// clamp into the edge bins so no mass is dropped. Counting in integers
/// makes the histogram independent of sample order.
fn bin_counts(samples: &[[f64; 2]], grid: usize, bounds: &GridBounds) -> Vec<u64> {
    let mut counts = vec![0u64; grid * grid];
    let sx = grid as f64 / (bounds.max_x - bounds.min_x);
    let sy = grid as f64 / (bounds.max_y - bounds.min_y);
    for p in samples {
        let ix = (((p[0] - bounds.min_x) * sx).floor() as i64).clamp(0, grid as i64 - 1) as usize;
        let iy = (((p[1] - bounds.min_y) * sy).floor() as i64).clamp(0, grid as i64 - 1) as usize;
        counts[iy * grid + ix] += 1;
    }
    counts
}

/// Jensen-Shannon divergence between the binned empirical distributions
/// of two sample batches:
/// `JS(p, q) = ½ KL(p‖m) + ½ KL(q‖m)` with `m = (p+q)/2`, after adding
/// 1e-9 to every bin and renormalizing. Symmetric by construction,
/// bounded by `ln 2`, and zero when the two batches bin identically.
pub fn histogram_js(
    a: &[[f64; 2]],
    b: &[[f64; 2]],
    grid: usize,
    bounds: &GridBounds,
) -> Result<f64> {
    if grid == 0 {
        return Err(contract_err!("histogram grid must have at least one bin"));
    }
    if a.is_empty() || b.is_empty() {
        return Err(contract_err!("histogram divergence needs two non-empty batches"));
    }
    const SMOOTH: f64 = 1e-9;
    let normalize = |counts: Vec<u64>| -> Vec<f64> {
        let total: f64 = counts.iter().map(|&c| c as f64 + SMOOTH).sum();
        counts.iter().map(|&c| (c as f64 + SMOOTH) / total).collect()
    };
    let p = normalize(bin_counts(a, grid, bounds));
    let q = normalize(bin_counts(b, grid, bounds));
    let mut js = 0.0;
    for (&pi, &qi) in p.iter().zip(&q) {
        let mi = 0.5 * (pi + qi);
        js += 0.5 * pi * (pi / mi).ln() + 0.5 * qi * (qi / mi).ln();
    }
    Ok(js.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_geometry() {
        let ring = GaussianMixture2D::ring_8();
        assert_eq!(ring.n_modes(), 8);
        assert_eq!(ring.std(), 0.02);
        assert_eq!(ring.centers()[0], [2.0, 0.0]);
        for c in ring.centers() {
            let r = (c[0] * c[0] + c[1] * c[1]).sqrt();
            assert!((r - 2.0).abs() < 1e-12);
        }
        // Adjacent centers are separated by 2·r·sin(π/8).
        let gap = {
            let a = ring.centers()[0];
            let b = ring.centers()[1];
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        };
        assert!((gap - 4.0 * (std::f64::consts::PI / 8.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn mixture_validation() {
        assert!(GaussianMixture2D::new(vec![], 1.0, vec![]).is_err());
        assert!(GaussianMixture2D::new(vec![[0.0, 0.0]], 0.0, vec![1.0]).is_err());
        assert!(GaussianMixture2D::new(vec![[0.0, 0.0]], 1.0, vec![0.5]).is_err());
        assert!(GaussianMixture2D::new(vec![[0.0, 0.0]], 1.0, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn shifted_moves_every_center() {
        let ring = GaussianMixture2D::ring_8().shifted(3.0, 3.0);
        for c in ring.centers() {
            let r = ((c[0] - 3.0).powi(2) + (c[1] - 3.0).powi(2)).sqrt();
            assert!((r - 2.0).abs() < 1e-12);
            assert!(c[0] > 0.0 && c[1] > 0.0);
        }
    }

    #[test]
    fn tiny_std_collapses_to_centers() {
        let mix = GaussianMixture2D::ring(8, 2.0, 1e-12).unwrap();
        let s = sample_mixture(&mix, 1000, 41);
        for p in s.points() {
            let nearest = mix
                .centers()
                .iter()
                .map(|c| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-9, "sample {p:?} strayed {nearest}");
        }
    }

    #[test]
    fn sample_mean_matches_mixture_mean() {
        // Ring mean is the origin; per-coordinate std is sqrt(r²/2) ≈ 1.41,
        // so at n = 20000 the standard error is about 0.01.
        let s = sample_mixture(&GaussianMixture2D::ring_8(), 20_000, 17);
        let n = s.len() as f64;
        let mx: f64 = s.points().iter().map(|p| p[0]).sum::<f64>() / n;
        let my: f64 = s.points().iter().map(|p| p[1]).sum::<f64>() / n;
        assert!(mx.abs() < 0.04, "mean x {mx}");
        assert!(my.abs() < 0.04, "mean y {my}");
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let mix = GaussianMixture2D::ring_8();
        let a = sample_mixture(&mix, 64, 5);
        let b = sample_mixture(&mix, 64, 5);
        let c = sample_mixture(&mix, 64, 6);
        assert_eq!(a.points(), b.points());
        assert_ne!(a.points(), c.points());
    }

    #[test]
    fn full_ring_coverage_at_ten_thousand_draws() {
        let mix = GaussianMixture2D::ring_8();
        let s = sample_mixture(&mix, 10_000, 23);
        let report = mode_report(s.points(), &mix, DEFAULT_RADIUS_MULT, 50);
        assert_eq!(report.covered, 8);
        // P(within 3σ of own center) = 1 - e^{-9/2} ≈ 0.989.
        assert!(report.hq_fraction > 0.97, "hq {}", report.hq_fraction);
        assert!(report.counts.iter().sum::<usize>() <= 10_000);
        for &c in &report.counts {
            assert!(c > 1000, "mode count {c} far below the 1250 expectation");
        }
    }

    #[test]
    fn collapse_onto_one_mode_is_detected() {
        let ring = GaussianMixture2D::ring_8();
        let mut weights = vec![0.0; 8];
        weights[3] = 1.0;
        let collapsed =
            GaussianMixture2D::new(ring.centers().to_vec(), ring.std(), weights).unwrap();
        let s = sample_mixture(&collapsed, 2048, 11);
        let report = mode_report(s.points(), &ring, DEFAULT_RADIUS_MULT, default_min_count(2048, 8));
        assert_eq!(report.covered, 1);
        assert!(report.counts[3] > 2000);
        assert!(report
            .counts
            .iter()
            .enumerate()
            .all(|(i, &c)| i == 3 || c == 0));
    }

    #[test]
    fn uniform_noise_captures_binomial_share() {
        // Uniform points over [-3,3]²: each lands within 3σ of a ring
        // center with probability 8·π(0.06)²/36 ≈ 0.2513%, i.e. about
        // 10 of 4000, give or take 3σ ≈ 9.5.
        let mut rng = seeded_rng(77);
        let noise: Vec<[f64; 2]> = (0..4000)
            .map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
            .collect();
        let ring = GaussianMixture2D::ring_8();
        let report = mode_report(&noise, &ring, DEFAULT_RADIUS_MULT, 1);
        let total: usize = report.counts.iter().sum();
        assert!(total <= 20, "captured {total}, expected about 10");
        assert!(report.hq_fraction < 0.006);
    }

    #[test]
    fn min_count_default_rule() {
        assert_eq!(default_min_count(2048, 8), 25);
        assert_eq!(default_min_count(100, 8), 1);
        assert_eq!(default_min_count(3, 8), 1);
    }

    #[test]
    fn csv_round_trips_exactly() {
        let s = sample_mixture(&GaussianMixture2D::ring_8(), 20, 3);
        let text = s.to_csv();
        assert!(text.starts_with("x,y\n"));
        assert_eq!(text.lines().count(), 21);
        let back = SampleSet::from_csv(&text).unwrap();
        assert_eq!(back.points(), s.points());
        assert!(SampleSet::from_csv("a,b\n1,2\n").is_err());
        assert!(SampleSet::from_csv("x,y\n1 2\n").is_err());
    }

    #[test]
    fn js_identical_batches_is_zero_and_symmetric() {
        let mix = GaussianMixture2D::ring_8();
        let a = sample_mixture(&mix, 2000, 1);
        let b = sample_mixture(&mix, 2000, 2);
        let bounds = GridBounds::square(3.0).unwrap();
        assert_eq!(histogram_js(a.points(), a.points(), 64, &bounds).unwrap(), 0.0);
        let ab = histogram_js(a.points(), b.points(), 64, &bounds).unwrap();
        let ba = histogram_js(b.points(), a.points(), 64, &bounds).unwrap();
        assert_eq!(ab, ba);
        assert!(ab > 0.0 && ab < 2.0f64.ln() + 1e-12);
    }

    #[test]
    fn js_is_sample_order_invariant() {
        let mix = GaussianMixture2D::ring_8();
        let a = sample_mixture(&mix, 500, 9);
        let b = sample_mixture(&mix, 500, 10);
        let mut shuffled = a.points().to_vec();
        shuffled.reverse();
        shuffled.swap(0, 250);
        let bounds = GridBounds::square(3.0).unwrap();
        assert_eq!(
            histogram_js(a.points(), b.points(), 64, &bounds).unwrap(),
            histogram_js(&shuffled, b.points(), 64, &bounds).unwrap(),
        );
    }

    #[test]
    fn js_grows_with_distribution_distance() {
        // Reference ring vs. progressively blurred rings: more blur,
        // larger divergence from the reference histogram.
        let sharp = GaussianMixture2D::ring_8();
        let blur_some = GaussianMixture2D::ring(8, 2.0, 0.2).unwrap();
        let blur_lots = GaussianMixture2D::ring(8, 2.0, 0.8).unwrap();
        let reference = sample_mixture(&sharp, 20_000, 100);
        let near = sample_mixture(&blur_some, 20_000, 101);
        let far = sample_mixture(&blur_lots, 20_000, 102);
        let bounds = GridBounds::square(3.0).unwrap();
        let js_near = histogram_js(reference.points(), near.points(), 64, &bounds).unwrap();
        let js_far = histogram_js(reference.points(), far.points(), 64, &bounds).unwrap();
        assert!(js_near < js_far, "near {js_near} far {js_far}");
    }

    #[test]
    fn js_saturates_for_disjoint_clouds() {
        let left: Vec<[f64; 2]> = (0..500).map(|i| [-2.0, i as f64 * 1e-4]).collect();
        let right: Vec<[f64; 2]> = (0..500).map(|i| [2.0, i as f64 * 1e-4]).collect();
        let bounds = GridBounds::square(3.0).unwrap();
        let js = histogram_js(&left, &right, 32, &bounds).unwrap();
        assert!(js > 2.0f64.ln() - 1e-3);
        assert!(js <= 2.0f64.ln() + 1e-12);
    }

    #[test]
    fn covering_bounds_pad_the_centers() {
        let b = GridBounds::covering(&GaussianMixture2D::ring_8(), 1.0);
        assert_eq!(b, GridBounds::new(-3.0, 3.0, -3.0, 3.0).unwrap());
        let shifted = GridBounds::covering(&GaussianMixture2D::ring_8().shifted(3.0, 3.0), 1.0);
        assert_eq!(shifted, GridBounds::new(0.0, 6.0, 0.0, 6.0).unwrap());
    }
}
