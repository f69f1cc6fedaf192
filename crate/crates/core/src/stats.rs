//! Sample summaries, standard errors and goodness-of-fit for the Monte Carlo checks.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-pass sample summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Fourth central sample moment (divided by `count`).
    pub fourth_central: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        let nf = count as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let (mut s2, mut s4) = (0.0, 0.0);
        for v in values {
            let d = v - mean;
            let d2 = d * d;
            s2 += d2;
            s4 += d2 * d2;
        }
        Self {
            count,
            mean,
            variance: if count > 1 { s2 / (nf - 1.0) } else { 0.0 },
            fourth_central: s4 / nf,
        }
    }

    pub fn of_iter(values: impl IntoIterator<Item = f64>) -> Self {
        Self::of(&values.into_iter().collect::<Vec<_>>())
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Standard error of the sample mean.
    pub fn mean_se(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }

    /// Large-sample standard error of the sample variance, `√((μ₄ − σ⁴)/N)`.
    pub fn variance_se(&self) -> f64 {
        ((self.fourth_central - self.variance * self.variance).max(0.0) / self.count as f64).sqrt()
    }

    pub fn mean_z(&self, target: f64) -> f64 {
        (self.mean - target) / self.mean_se()
    }

    pub fn variance_z(&self, target: f64) -> f64 {
        (self.variance - target) / self.variance_se()
    }
}

/// Sample covariance with the standard error of that estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariance {
    pub value: f64,
    pub se: f64,
}

impl Covariance {
    pub fn z(&self) -> f64 {
        self.value / self.se
    }
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> Covariance {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let mx = Summary::of(xs).mean;
    let my = Summary::of(ys).mean;
    let products = Summary::of_iter(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    Covariance {
        value: products.mean,
        se: products.mean_se(),
    }
}

/// Pearson correlation coefficient.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let sx = Summary::of(xs);
    let sy = Summary::of(ys);
    let cov = covariance(xs, ys).value * xs.len() as f64 / (xs.len() as f64 - 1.0);
    cov / (sx.sd() * sy.sd())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Minimum expected count per pooled bin.
const MIN_EXPECTED: f64 = 5.0;

/// Pearson goodness-of-fit of `observed` counts against `probs`. Adjacent
/// bins are pooled left to right until each expects at least five draws.
/// Any observation outside `probs` gives a p-value of zero.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquare {
    let total: u64 = observed.iter().sum();
    let total_f = total as f64;
    if observed.iter().skip(probs.len()).any(|&o| o > 0) {
        return ChiSquare {
            statistic: f64::INFINITY,
            dof: probs.len().saturating_sub(1),
            p_value: 0.0,
        };
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (k, &p) in probs.iter().enumerate() {
        obs += observed.get(k).copied().unwrap_or(0) as f64;
        exp += p * total_f;
        if exp >= MIN_EXPECTED {
            bins.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => bins.push((obs, exp)),
        }
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
    }
}

/// Counts of each value in `0..=max`.
pub fn histogram(values: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut hist = Vec::new();
    for v in values {
        let v = v as usize;
        if hist.len() <= v {
            hist.resize(v + 1, 0);
        }
        hist[v] += 1;
    }
    hist
}
