//! Small statistics helpers: moments, standard errors, and a one-sample
//! Kolmogorov–Smirnov test.

/// Sample mean and standard error of the mean (sample stddev / √n).
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample KS test against an arbitrary CDF.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    KsResult {
        statistic,
        p_value: kolmogorov_p_value(statistic, sorted.len()),
    }
}

pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> KsResult {
    ks_test(samples, |x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0))
}

/// Asymptotic p-value with the Stephens small-sample correction.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_error_of_small_sample() {
        let (m, se) = mean_and_std_error(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample variance 5/3, se = sqrt(5/12)
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_std_error(&[0.3]), (0.3, 0.0));
    }

    #[test]
    fn ks_accepts_grid_and_rejects_skew() {
        let even: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_uniform(&even, 0.0, 1.0).p_value > 0.99);
        let skewed: Vec<f64> = even.iter().map(|x| x * x).collect();
        assert!(ks_uniform(&skewed, 0.0, 1.0).p_value < 1e-6);
    }

    #[test]
    fn kolmogorov_critical_value() {
        // λ ≈ 1.628 is the 1% critical point of the Kolmogorov distribution.
        let n = 10_000;
        let sn = (n as f64).sqrt();
        let d = 1.6276 / (sn + 0.12 + 0.11 / sn);
        assert!((kolmogorov_p_value(d, n) - 0.01).abs() < 2e-4);
    }
}
