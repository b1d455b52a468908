//! The two statistics the harness needs: a one-sided two-sample z-test and
//! Spearman rank correlation, plus small helpers.

/// One-sided 95% critical value of the standard normal.
pub const Z_CRIT_95: f64 = 1.6448536269514722;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in median input"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ZTest {
    pub z: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    /// Null (equal means) rejected in favor of mean_a > mean_b at 95%.
    pub significant_95: bool,
}

/// Two-sample z-test of H1: mean(a) > mean(b).
///
/// Degenerate zero-variance samples are handled by sign: a strictly larger
/// mean with no spread on either side is infinitely significant.
pub fn z_test_greater(a: &[f64], b: &[f64]) -> ZTest {
    let mean_a = mean(a);
    let mean_b = mean(b);
    let var_a = sample_sd(a).powi(2);
    let var_b = sample_sd(b).powi(2);
    let se = (var_a / a.len() as f64 + var_b / b.len() as f64).sqrt();
    let z = if se > 0.0 {
        (mean_a - mean_b) / se
    } else if mean_a > mean_b {
        f64::INFINITY
    } else if mean_a < mean_b {
        f64::NEG_INFINITY
    } else {
        0.0
    };
    ZTest {
        z,
        mean_a,
        mean_b,
        significant_95: z > Z_CRIT_95,
    }
}

/// Average ranks (1-based), ties sharing their mean rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).expect("no NaN in rank input"));
    let mut out = vec![0.0; xs.len()];
    let mut k = 0;
    while k < order.len() {
        let mut j = k;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[k]] {
            j += 1;
        }
        let avg_rank = (k + j) as f64 / 2.0 + 1.0;
        for &idx in &order[k..=j] {
            out[idx] = avg_rank;
        }
        k = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    pearson(&ranks(x), &ranks(y))
}

/// Ordinary least squares fit `y = slope * x + intercept`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, my - slope * mx)
}
