//! Convergence diagnostics as labelled curves.
//!
//! The CLT, LLT, characteristic-function and total-variation curves are
//! computed from exact distributions and carry no sampling noise. The
//! Ferrers joint-normality check is the only Monte Carlo diagnostic here.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{self, MomentVariant};
use crate::error::{Error, Result};
use crate::sampler::{self, SampleStream};
use crate::scalar::Real;
use crate::stats::{self, Summary};

/// One grid point: integer parameters, floating statistics, and exact
/// values rendered as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow<F> {
    pub params: BTreeMap<String, u64>,
    pub values: BTreeMap<String, F>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exact: BTreeMap<String, String>,
}

impl<F> CurveRow<F> {
    pub fn new() -> Self {
        Self {
            params: BTreeMap::new(),
            values: BTreeMap::new(),
            exact: BTreeMap::new(),
        }
    }

    pub fn param(mut self, name: &str, v: u64) -> Self {
        self.params.insert(name.to_owned(), v);
        self
    }

    pub fn value(mut self, name: &str, v: F) -> Self {
        self.values.insert(name.to_owned(), v);
        self
    }

    pub fn exact(mut self, name: &str, v: impl ToString) -> Self {
        self.exact.insert(name.to_owned(), v.to_string());
        self
    }
}

impl<F> Default for CurveRow<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// Labelled sequence of rows plus a configuration echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport<F> {
    pub label: String,
    pub rows: Vec<CurveRow<F>>,
    pub metadata: BTreeMap<String, String>,
}

impl<F: Real> CurveReport<F> {
    pub fn new(label: &str, rows: Vec<CurveRow<F>>) -> Result<Self> {
        let report = Self {
            label: label.to_owned(),
            rows,
            metadata: BTreeMap::new(),
        };
        report.validate()?;
        Ok(report)
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_owned(), value.to_string());
        self
    }

    /// Rows must be nonempty and share parameter and column names.
    pub fn validate(&self) -> Result<()> {
        let first = self
            .rows
            .first()
            .ok_or_else(|| Error::Parameter(format!("curve {:?} has no rows", self.label)))?;
        let same = |r: &CurveRow<F>| {
            r.params.keys().eq(first.params.keys())
                && r.values.keys().eq(first.values.keys())
                && r.exact.keys().eq(first.exact.keys())
        };
        if let Some(i) = self.rows.iter().position(|r| !same(r)) {
            return Err(Error::Parameter(format!(
                "curve {:?}: row {i} has different columns from row 0",
                self.label
            )));
        }
        Ok(())
    }

    /// Column named `name` as `f64`, one entry per row.
    pub fn column(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.values.get(name).map(|v| v.to_f64_lossy()))
            .collect()
    }

    /// One CSV line per row: parameters, then floating values with 17
    /// significant digits, then exact values. Metadata goes on `#` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# label={}", self.label);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        let Some(first) = self.rows.first() else {
            return out;
        };
        let header: Vec<&str> = first
            .params
            .keys()
            .chain(first.values.keys())
            .chain(first.exact.keys())
            .map(String::as_str)
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .params
                .values()
                .map(u64::to_string)
                .chain(row.values.values().map(|v| format!("{:.16e}", v.to_f64_lossy())))
                .chain(row.exact.values().cloned())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn check_grid(name: &str, values: &[usize], min: usize) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Parameter(format!("{name} grid is empty")));
    }
    if let Some(v) = values.iter().find(|&&v| v < min) {
        return Err(Error::Parameter(format!("{name} = {v} is below the minimum {min}")));
    }
    Ok(())
}

/// Kolmogorov distance between the standardized exact law and `N(0, 1)`
/// along `ns`, standardizing with the closed-form moments.
pub fn clt_curve<F: Real>(m: u32, ns: &[usize]) -> Result<CurveReport<F>> {
    check_grid("n", ns, 2)?;
    if m < 2 {
        return Err(Error::Degenerate { n: ns[0], m });
    }
    let rows = ns
        .par_iter()
        .map(|&n| {
            let pmf = dist::exact_pmf(n, m)?;
            let moments = dist::closed_form_moments(n, m);
            let mean = F::from_rational(&moments.mean);
            let sd = moments.sd::<F>();
            let d = dist::kolmogorov_distance_to_normal(&pmf, mean, sd)?;
            Ok(CurveRow::new()
                .param("m", u64::from(m))
                .param("n", n as u64)
                .value("kolmogorov", d)
                .value("mean", mean)
                .value("variance", sd * sd)
                .exact("variance_exact", &moments.variance))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveReport::new("clt", rows)?.with_meta("statistic", "kolmogorov distance with continuity correction"))
}

/// Local limit residuals on the `ms × ns` grid, exact and leading-order moments.
pub fn llt_curve<F: Real>(ms: &[u32], ns: &[usize]) -> Result<CurveReport<F>> {
    check_grid("n", ns, 2)?;
    let ms_usize: Vec<usize> = ms.iter().map(|&m| m as usize).collect();
    check_grid("m", &ms_usize, 2)?;
    let grid: Vec<(u32, usize)> = ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect();
    let rows = grid
        .par_iter()
        .map(|&(m, n)| {
            let pmf = dist::exact_pmf(n, m)?;
            let mut row = CurveRow::new().param("m", u64::from(m)).param("n", n as u64);
            for (variant, name) in [
                (MomentVariant::Exact, "residual_exact"),
                (MomentVariant::Approximate, "residual_approx"),
            ] {
                let mo = dist::moments_for(n, m, variant);
                let r = dist::llt_residual_of(&pmf, F::from_rational(&mo.mean), mo.sd())?;
                row = row.value(name, r);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveReport::new("llt", rows)?.with_meta("statistic", "sup_k |sigma P(G=k) - phi((k-mu)/sigma)|"))
}

/// Observed decay constants of the characteristic function
/// `φ(θ) = m^{−n} G_n^(m)(e^{iθ})` in the two regimes of `|θ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfProbe<F> {
    pub n: usize,
    pub m: u32,
    /// `min −log|φ(θ)| / (n³θ²)` over `0 < θ ≤ 1/n`.
    pub c_hat_small: F,
    pub theta_small: F,
    /// `min −log|φ(θ)| / n` over `1/n ≤ θ ≤ π`.
    pub c_hat_large: F,
    pub theta_large: F,
}

/// Decades spanned by the logarithmic grid below `1/n`.
const SMALL_THETA_DECADES: f64 = 2.0;

pub fn cf_probe<F: Real>(n: usize, m: u32, grid: usize) -> Result<CfProbe<F>> {
    if n < 2 || m < 2 {
        return Err(Error::Degenerate { n, m });
    }
    if grid < 16 {
        return Err(Error::Parameter(format!(
            "theta grid needs at least 16 points per regime, got {grid}"
        )));
    }
    let pmf = dist::exact_pmf(n, m)?;
    let nf = F::of(n as f64);
    let edge = F::one() / nf;
    let steps = F::of((grid - 1) as f64);
    let neg_log_abs = |theta: F| {
        let phi = pmf.pgf_unit_circle(theta);
        -phi.norm_sqr().ln() / F::of(2.0)
    };
    let argmin = |thetas: Vec<F>, scale: &dyn Fn(F) -> F| {
        thetas
            .into_iter()
            .map(|t| (neg_log_abs(t) / scale(t), t))
            .fold((F::infinity(), F::zero()), |best, cur| if cur.0 < best.0 { cur } else { best })
    };

    let ten = F::of(10.0);
    let small: Vec<F> = (0..grid)
        .map(|i| edge * ten.powf(F::of(SMALL_THETA_DECADES) * (F::of(i as f64) / steps - F::one())))
        .collect();
    let large: Vec<F> = (0..grid)
        .map(|i| edge + (F::PI() - edge) * F::of(i as f64) / steps)
        .collect();

    let (c_hat_small, theta_small) = argmin(small, &|t| nf * nf * nf * t * t);
    let (c_hat_large, theta_large) = argmin(large, &|_| nf);
    Ok(CfProbe {
        n,
        m,
        c_hat_small,
        theta_small,
        c_hat_large,
        theta_large,
    })
}

/// Characteristic-function probe over an `ns × ms` grid.
pub fn cf_curve<F: Real>(ms: &[u32], ns: &[usize], grid: usize) -> Result<CurveReport<F>> {
    let points: Vec<(u32, usize)> = ms.iter().flat_map(|&m| ns.iter().map(move |&n| (m, n))).collect();
    let rows = points
        .par_iter()
        .map(|&(m, n)| {
            let p = cf_probe::<F>(n, m, grid)?;
            Ok(CurveRow::new()
                .param("m", u64::from(m))
                .param("n", n as u64)
                .value("c_hat_small", p.c_hat_small)
                .value("theta_small", p.theta_small)
                .value("c_hat_large", p.c_hat_large)
                .value("theta_large", p.theta_large))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveReport::new("cf", rows)?.with_meta("grid_per_regime", grid))
}

/// Exact total variation distance to the permutation law, and its bound
/// `1 − (m)_n/m^n`, along `ms`.
pub fn tv_curve<F: Real>(n: usize, ms: &[u32]) -> Result<CurveReport<F>> {
    if n < 2 {
        return Err(Error::Parameter(format!("n = {n} is below the minimum 2")));
    }
    if ms.is_empty() || ms.contains(&0) {
        return Err(Error::Parameter("m grid must be nonempty with m >= 1".into()));
    }
    let perm = dist::permutation_inversion_pmf(n);
    let rows = ms
        .par_iter()
        .map(|&m| {
            let tv = dist::tv_distance(&dist::exact_pmf(n, m)?, &perm);
            let bound = dist::tv_bound(n, m);
            Ok(CurveRow::new()
                .param("m", u64::from(m))
                .param("n", n as u64)
                .value("tv", F::from_rational(&tv))
                .value("bound", F::from_rational(&bound))
                .exact("within_bound", tv <= bound)
                .exact("tv_exact", &tv)
                .exact("bound_exact", &bound))
        })
        .collect::<Result<Vec<_>>>()?;
    CurveReport::new("tv", rows)
}

/// Joint behaviour of area and height of a uniform Ferrers diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerrersJointReport {
    pub n: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub stream_index: u64,
    /// Correlation of `(A − n²/8)/√(n³/48)` and `(H − n/2)/√(n/4)`.
    pub correlation: f64,
    pub area: Summary,
    pub area_mean_target: f64,
    pub area_mean_z: f64,
    pub height: Summary,
    pub height_mean_z: f64,
    pub height_variance_z: f64,
}

impl FerrersJointReport {
    pub fn passes(&self, corr_tol: f64, z_tol: f64) -> bool {
        self.correlation.abs() < corr_tol
            && self.area_mean_z.abs() <= z_tol
            && self.height_mean_z.abs() <= z_tol
            && self.height_variance_z.abs() <= z_tol
    }
}

pub fn ferrers_joint_check(n: usize, reps: usize, s: &SampleStream) -> Result<FerrersJointReport> {
    if n < 4 {
        return Err(Error::Parameter(format!("n = {n} is below the minimum 4")));
    }
    if reps < 10_000 {
        return Err(Error::Parameter(format!("reps = {reps} is below the minimum 10000")));
    }
    let draws = sampler::batch(reps, s, |rs| sampler::sample_ferrers(n, rs));
    let nf = n as f64;
    let area: Vec<f64> = draws.iter().map(|d| d.area as f64).collect();
    let height: Vec<f64> = draws.iter().map(|d| d.height as f64).collect();
    let area_std: Vec<f64> = area
        .iter()
        .map(|a| (a - nf * nf / 8.0) / (nf * nf * nf / 48.0).sqrt())
        .collect();
    let height_std: Vec<f64> = height.iter().map(|h| (h - nf / 2.0) / (nf / 4.0).sqrt()).collect();

    let area_summary = Summary::of(&area);
    let height_summary = Summary::of(&height);
    let area_mean_target = (nf * nf + 7.0 * nf + 8.0) / 8.0;
    // H − 1 ~ Bin(n, 1/2)
    let height_minus_one = Summary::of_iter(height.iter().map(|h| h - 1.0));
    Ok(FerrersJointReport {
        n,
        reps,
        master_seed: s.master_seed(),
        stream_index: s.stream_index(),
        correlation: stats::correlation(&area_std, &height_std),
        area: area_summary,
        area_mean_target,
        area_mean_z: area_summary.mean_z(area_mean_target),
        height: height_summary,
        height_mean_z: height_summary.mean_z(nf / 2.0 + 1.0),
        height_variance_z: height_minus_one.variance_z(nf / 4.0),
    })
}
