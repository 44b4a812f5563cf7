//! Small statistics helpers shared by experiments and tests.

/// Standard error of an empirical frequency `p` over `n` trials.
pub fn freq_std_err(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0);
    var.sqrt()
}

/// Standard error of the mean of `xs`.
pub fn mean_std_err(xs: &[f64]) -> f64 {
    sample_std(xs) / (xs.len() as f64).sqrt()
}

/// Ordinary least squares slope of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Weighted least squares line fit with known per-point standard errors.
/// Returns (slope, intercept, slope standard error). With weights `1/se^2`
/// the slope variance is `1 / sum(w (x - xbar_w)^2)`.
pub fn wls_line(xs: &[f64], ys: &[f64], ses: &[f64]) -> (f64, f64, f64) {
    assert!(xs.len() == ys.len() && ys.len() == ses.len() && xs.len() >= 2);
    let ws: Vec<f64> = ses.iter().map(|s| 1.0 / (s * s)).collect();
    let wsum: f64 = ws.iter().sum();
    let xbar = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let ybar = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let sxx: f64 = xs
        .iter()
        .zip(&ws)
        .map(|(x, w)| w * (x - xbar) * (x - xbar))
        .sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .zip(&ws)
        .map(|((x, y), w)| w * (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    (slope, intercept, (1.0 / sxx).sqrt())
}

/// Pearson chi-squared statistic for observed counts against uniform expectation.
pub fn chi_squared_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expect = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expect;
            d * d / expect
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ols_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert_abs_diff_eq!(ols_slope(&xs, &ys), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn wls_matches_ols_with_equal_weights() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.1, 0.9, 2.2, 2.8];
        let ses = [0.5; 4];
        let (slope, intercept, se) = wls_line(&xs, &ys, &ses);
        assert_abs_diff_eq!(slope, ols_slope(&xs, &ys), epsilon = 1e-12);
        assert!(se > 0.0);
        assert_abs_diff_eq!(intercept, mean(&ys) - slope * mean(&xs), epsilon = 1e-12);
    }

    #[test]
    fn chi_squared_is_zero_on_perfectly_uniform_counts() {
        assert_abs_diff_eq!(chi_squared_uniform(&[5, 5, 5, 5]), 0.0, epsilon = 1e-12);
        assert!(chi_squared_uniform(&[10, 0, 10, 0]) > 0.0);
    }
}
