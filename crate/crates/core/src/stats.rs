//! Small sample-statistics toolkit used by the oracles and PLF reports.

use serde::{Deserialize, Serialize};

/// Mean and standard error of the mean.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Sample standard deviation and its delta-method standard error,
/// `sqrt((m4 - s^4) / (4 n s^2))`.
pub fn std_dev_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    if samples.iter().all(|&x| x == samples[0]) {
        return (0.0, 0.0);
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let (m2, m4) = samples.iter().fold((0.0, 0.0), |(m2, m4), x| {
        let d2 = (x - mean).powi(2);
        (m2 + d2, m4 + d2 * d2)
    });
    let var = m2 / (nf - 1.0);
    let sd = var.sqrt();
    if sd == 0.0 {
        return (0.0, 0.0);
    }
    let m4 = m4 / nf;
    let se = ((m4 - var * var).max(0.0) / (4.0 * nf * var)).sqrt();
    (sd, se)
}

/// Empirical CDF evaluated at `points` evenly spaced probability levels:
/// returns `(x, F(x))` pairs taken from the sorted samples.
pub fn empirical_cdf(sorted: &[f64], points: usize) -> Vec<(f64, f64)> {
    let n = sorted.len();
    if n == 0 || points == 0 {
        return Vec::new();
    }
    (0..points)
        .map(|k| {
            let idx = if points == 1 {
                n - 1
            } else {
                k * (n - 1) / (points - 1)
            };
            (sorted[idx], (idx + 1) as f64 / n as f64)
        })
        .collect()
}

/// Least-squares fit of `c1 * exp(c2 * x)` to the complementary CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTailFit {
    pub c1: f64,
    pub c2: f64,
    /// Coefficient of determination in CCDF space.
    pub r_squared: f64,
    /// Number of (x, CCDF) points in the fit.
    pub points: usize,
}

/// Fits `c1 * exp(c2 * x)` to the empirical CCDF over the upper half of the
/// sorted samples (x at or above the median).
///
/// The fit is least squares on the CCDF values themselves, started from a
/// log-linear estimate and refined with Gauss-Newton. Returns `None` when
/// the upper half is degenerate.
pub fn exp_tail_fit(sorted: &[f64]) -> Option<ExpTailFit> {
    let n = sorted.len();
    if n < 8 {
        return None;
    }
    let start = n / 2;
    // The last order statistic has CCDF 0; it carries no log information.
    let xs: Vec<f64> = sorted[start..n - 1].to_vec();
    let ys: Vec<f64> = (start..n - 1)
        .map(|i| 1.0 - (i + 1) as f64 / n as f64)
        .collect();
    let x0 = xs[0];
    if xs.last().copied()? - x0 <= 0.0 {
        return None;
    }

    // Log-linear start, weighted by y to approximate linear-space residuals.
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(&ys) {
        let w = y * y;
        let (u, v) = (x - x0, y.ln());
        sw += w;
        sx += w * u;
        sy += w * v;
        sxx += w * u * u;
        sxy += w * u * v;
    }
    let det = sw * sxx - sx * sx;
    if det.abs() < f64::MIN_POSITIVE {
        return None;
    }
    let mut b = (sw * sxy - sx * sy) / det;
    let mut a = ((sy - b * sx) / sw).exp();

    let sse = |a: f64, b: f64| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| (y - a * (b * (x - x0)).exp()).powi(2))
            .sum()
    };
    let mut current = sse(a, b);
    for _ in 0..100 {
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in xs.iter().zip(&ys) {
            let u = x - x0;
            let e = (b * u).exp();
            let r = y - a * e;
            let (da, db) = (e, a * u * e);
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let det = jaa * jbb - jab * jab;
        if det.abs() < f64::MIN_POSITIVE {
            break;
        }
        let step_a = (jbb * ga - jab * gb) / det;
        let step_b = (jaa * gb - jab * ga) / det;
        // Halve the step until the residual drops.
        let mut scale = 1.0;
        let mut improved = false;
        while scale > 1e-6 {
            let (na, nb) = (a + scale * step_a, b + scale * step_b);
            let trial = sse(na, nb);
            if trial < current {
                a = na;
                b = nb;
                improved = current - trial > 1e-15 * current.max(1e-300);
                current = trial;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }

    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let sst: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    if sst <= 0.0 {
        return None;
    }
    Some(ExpTailFit {
        c1: a * (-b * x0).exp(),
        c2: b,
        r_squared: 1.0 - current / sst,
        points: xs.len(),
    })
}
