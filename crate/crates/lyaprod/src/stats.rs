//! Small sample-statistics helpers shared by the CLT harness and tests.

/// Arithmetic mean; NaN on an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (ddof 1); NaN below two points.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
}

/// Unbiased sample covariance (ddof 1); panics on length mismatch.
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "covariance needs paired samples");
    let n = xs.len() as f64;
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (n - 1.0)
}

/// Pearson correlation; NaN when either marginal is constant.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> f64 {
    sample_covariance(xs, ys) / (sample_variance(xs) * sample_variance(ys)).sqrt()
}

/// Standard normal CDF. `erfc` keeps full relative accuracy in the lower
/// tail where `0.5 * (1 + erf)` would cancel.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Kolmogorov-Smirnov statistic `sup_x |F_n(x) - F(x)|` against a continuous
/// CDF. Both one-sided gaps at each jump of the ECDF are checked.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty(), "ks_distance needs samples");
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}
