//! The verification sweep: ten criteria, each returning a pass/fail outcome
//! with a one-line detail. Exact criteria involve no randomness; statistical
//! criteria draw from fixed substreams of the master seed.

use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::combinat::{self, LatticePath};
use crate::dist::{self, ExactPmf};
use crate::error::Result;
use crate::qpoly;
use crate::sampler::{self, SampleStream, VDecomposition};
use crate::stats::{self, Summary};
use crate::{analysis, Rational};

/// Kolmogorov distance ceiling at `(n, m) = (64, 2)`.
pub const CLT_MAX_DISTANCE_64_2: f64 = 0.05;
/// Local limit residual ceiling at `n = 64`.
pub const LLT_MAX_RESIDUAL_64: f64 = 0.01;
/// Chi-square significance level for the construction-equivalence test.
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;
/// Standard errors allowed in the Hoeffding decomposition check.
pub const HOEFFDING_Z: f64 = 3.0;
/// Floor on the observed characteristic-function decay constants.
pub const CF_FLOOR: f64 = 0.005;
/// Points per `θ` regime in the characteristic-function probe.
pub const CF_GRID: usize = 256;

pub const CONSTRUCTION_SAMPLES: usize = 100_000;
pub const HOEFFDING_DRAWS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Exact,
    Statistical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} ({:?}) {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.kind,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERIA: [(u8, &str, CheckKind); 10] = [
    (1, "oracle equivalence", CheckKind::Exact),
    (2, "exact moments", CheckKind::Exact),
    (3, "normalization", CheckKind::Exact),
    (4, "total variation to permutations", CheckKind::Exact),
    (5, "central limit", CheckKind::Exact),
    (6, "local limit", CheckKind::Exact),
    (7, "path and Ferrers bijections", CheckKind::Exact),
    (8, "construction equivalence", CheckKind::Statistical),
    (9, "Hoeffding decomposition", CheckKind::Statistical),
    (10, "characteristic function decay", CheckKind::Exact),
];

/// Runs criterion `id` (1..=10). Errors inside a criterion count as failures.
pub fn run(id: u8, seed: u64) -> CheckOutcome {
    let (_, name, kind) = *CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .unwrap_or_else(|| panic!("unknown criterion {id}"));
    let start = Instant::now();
    let result = match id {
        1 => oracle_equivalence(),
        2 => exact_moments(),
        3 => normalization(),
        4 => total_variation(),
        5 => central_limit(),
        6 => local_limit(),
        7 => bijections(),
        8 => construction_equivalence(seed),
        9 => hoeffding(seed),
        10 => characteristic_function(),
        _ => unreachable!(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckOutcome {
        id,
        name: name.to_owned(),
        kind,
        passed,
        detail,
        seconds,
    }
}

/// All criteria, exact ones first.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    let mut ids: Vec<_> = CRITERIA.iter().collect();
    ids.sort_by_key(|c| (c.2 == CheckKind::Statistical, c.0));
    ids.into_iter().map(|c| run(c.0, seed)).collect()
}

type Verdict = Result<(bool, String)>;

fn listed(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!(" ({})", items.join(", "))
    }
}

fn budget_note(secs: f64, budget: f64) -> String {
    if secs < budget {
        format!("within the {budget}s runtime budget")
    } else {
        format!("runtime budget of {budget}s exceeded")
    }
}

fn histogram_matches(poly: &qpoly::CoeffPoly, hist: &[u64]) -> bool {
    poly.coeffs().len() == hist.len()
        && poly
            .coeffs()
            .iter()
            .zip(hist)
            .all(|(c, &h)| *c == BigUint::from(h))
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut cases = Vec::new();
    for m in 1..=3u32 {
        cases.extend((0..=7).map(|n| (n, m)));
    }
    cases.extend((8..=10).map(|n| (n, 2)));
    let mut bad = Vec::new();
    for &(n, m) in &cases {
        let g = qpoly::galois_poly(n, m)?;
        if !histogram_matches(&g, &combinat::inversion_histogram(n, m)?) {
            bad.push(format!("({n},{m})"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        bad.is_empty() && secs < 60.0,
        format!(
            "{} (n,m) cases, {} mismatches{}; {}",
            cases.len(),
            bad.len(),
            listed(&bad),
            budget_note(secs, 60.0)
        ),
    ))
}

fn exact_moments() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in 2..=8u32 {
        let table = dist::exact_pmf_table(40, m)?;
        for (n, pmf) in table.iter().enumerate().skip(2) {
            checked += 1;
            if dist::moments_from_pmf(pmf) != dist::closed_form_moments(n, m) {
                bad.push(format!("({n},{m})"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        bad.is_empty() && secs < 120.0,
        format!(
            "{checked} (n,m) pairs, {} mismatches{}; {}",
            bad.len(),
            listed(&bad),
            budget_note(secs, 120.0)
        ),
    ))
}

fn normalization() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in 1..=8u32 {
        for (n, g) in qpoly::galois_table(40, m)?.iter().enumerate() {
            checked += 1;
            if g.eval_at_one() != Pow::pow(BigUint::from(m), n) {
                bad.push(format!("({n},{m})"));
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!("G(1) = m^n for {checked} pairs, {} failures{}", bad.len(), listed(&bad)),
    ))
}

fn total_variation() -> Verdict {
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut trend = Vec::new();
    for n in 2..=6usize {
        let perm = dist::permutation_inversion_pmf(n);
        let table: Vec<(u32, BigRational)> = (2..=50u32)
            .map(|m| Ok((m, dist::tv_distance(&dist::exact_pmf(n, m)?, &perm))))
            .collect::<Result<_>>()?;
        for (m, tv) in &table {
            checked += 1;
            if *tv > dist::tv_bound(n, *m) {
                violations.push(format!("({n},{m})"));
            }
        }
        if (3..=5).contains(&n) {
            let at = |m: u32| table.iter().find(|t| t.0 == m).map(|t| t.1.clone()).expect("m in grid");
            let (tv5, tv50) = (at(5), at(50));
            trend.push((n, tv50 < tv5, f64_of(&tv5), f64_of(&tv50)));
        }
    }
    let trend_ok = trend.iter().all(|t| t.1);
    let trend_text: Vec<String> = trend
        .iter()
        .map(|(n, _, a, b)| format!("n={n}: {a:.4}->{b:.4}"))
        .collect();
    Ok((
        violations.is_empty() && trend_ok,
        format!(
            "TV <= 1-(m)_n/m^n on {checked} pairs ({} violations); TV at m=5 -> m=50: {}",
            violations.len(),
            trend_text.join(", ")
        ),
    ))
}

fn f64_of(r: &Rational) -> f64 {
    crate::scalar::Real::from_rational(r)
}

const LIMIT_NS: [usize; 3] = [16, 32, 64];
const LIMIT_MS: [u32; 3] = [2, 3, 10];

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn central_limit() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut at_64_2 = f64::NAN;
    for m in LIMIT_MS {
        let d = analysis::clt_curve::<f64>(m, &LIMIT_NS)?.column("kolmogorov");
        ok &= strictly_decreasing(&d);
        if m == 2 {
            at_64_2 = d[2];
        }
        parts.push(format!("m={m}: {:.4}/{:.4}/{:.4}", d[0], d[1], d[2]));
    }
    ok &= at_64_2 < CLT_MAX_DISTANCE_64_2;
    Ok((
        ok,
        format!(
            "Kolmogorov at n=16/32/64 {}; (64,2) = {at_64_2:.4} < {CLT_MAX_DISTANCE_64_2}",
            parts.join(", ")
        ),
    ))
}

fn local_limit() -> Verdict {
    let curve = analysis::llt_curve::<f64>(&LIMIT_MS, &LIMIT_NS)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, m) in LIMIT_MS.iter().enumerate() {
        let rows = &curve.rows[i * LIMIT_NS.len()..(i + 1) * LIMIT_NS.len()];
        let exact: Vec<f64> = rows.iter().map(|r| r.values["residual_exact"]).collect();
        let approx: Vec<f64> = rows.iter().map(|r| r.values["residual_approx"]).collect();
        ok &= strictly_decreasing(&exact) && strictly_decreasing(&approx);
        ok &= exact[2] < LLT_MAX_RESIDUAL_64;
        parts.push(format!(
            "m={m}: exact {:.4}/{:.4}/{:.4}, approx {:.4}/{:.4}/{:.4}",
            exact[0], exact[1], exact[2], approx[0], approx[1], approx[2]
        ));
    }
    Ok((
        ok,
        format!("residual at n=16/32/64 {}; n=64 bound {LLT_MAX_RESIDUAL_64}", parts.join("; ")),
    ))
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Exhaustive check of the word ↔ path ↔ Ferrers bijections and their
/// area identities over every path of length `n ≤ max_n`, plus the exact
/// Ferrers area moments for `n ≤ moments_max_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionReport {
    pub max_n: usize,
    pub moments_max_n: usize,
    pub paths_checked: u64,
    pub failures: Vec<String>,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn bijections_up_to(max_n: usize, moments_max_n: usize) -> Result<BijectionReport> {
    let mut failures = Vec::new();
    let mut paths_checked = 0;
    for n in 0..=max_n {
        let mut area_hist = vec![0u64; n * n / 4 + 1];
        let mut ferrers_hist = vec![0u64; n * n / 4 + n + 2];
        let mut height_hist = vec![0u64; n + 1];
        for p in LatticePath::all(n) {
            paths_checked += 1;
            let w = combinat::path_to_word(&p);
            let f = combinat::path_to_ferrers(&p);
            let ok = combinat::word_to_path(&w).as_ref() == Ok(&p)
                && combinat::ferrers_to_path(&f).as_ref() == Ok(&p)
                && p.area_under() == combinat::inversions(&w)
                && p.area_left() == p.reflected().area_under()
                && f.area() == p.area_left() + n as u64 + 1
                && f.semiperimeter() == n + 2
                && f.height() == p.north_steps() + 1
                && f.width() == p.east_steps() + 1;
            if !ok {
                failures.push(format!("path {p}"));
            }
            area_hist[p.area_under() as usize] += 1;
            ferrers_hist[f.area() as usize] += 1;
            height_hist[f.height() - 1] += 1;
        }
        let g = qpoly::galois_poly(n, 2)?;
        let trim = |mut h: Vec<u64>| {
            while h.last() == Some(&0) {
                h.pop();
            }
            h
        };
        if !histogram_matches(&g, &trim(area_hist)) {
            failures.push(format!("area histogram n={n}"));
        }
        let mut shifted = vec![0u64; n + 1];
        shifted.extend(g.coeffs().iter().map(|c| u64::try_from(c).expect("fits")));
        if trim(ferrers_hist) != shifted {
            failures.push(format!("Ferrers histogram n={n}"));
        }
        if height_hist != (0..=n).map(|k| binomial(n, k)).collect::<Vec<_>>() {
            failures.push(format!("height histogram n={n}"));
        }
    }
    for n in 0..=moments_max_n {
        let shifted: ExactPmf = dist::exact_pmf(n, 2)?.shifted(n + 1);
        let mo = dist::moments_from_pmf(&shifted);
        let nn = n as i64;
        let mean = Rational::new((nn * nn + 7 * nn + 8).into(), 8.into());
        let var = Rational::new((nn * (nn - 1) * (2 * nn + 5)).into(), 96.into());
        if mo.mean != mean || mo.variance != var {
            failures.push(format!("Ferrers moments n={n}"));
        }
    }
    Ok(BijectionReport {
        max_n,
        moments_max_n,
        paths_checked,
        failures,
    })
}

fn bijections() -> Verdict {
    let r = bijections_up_to(12, 20)?;
    Ok((
        r.passed(),
        format!(
            "{} paths (all 2^n for n <= 12), Ferrers moments for n <= 20; {} failures{}",
            r.paths_checked,
            r.failures.len(),
            listed(&r.failures)
        ),
    ))
}

/// Stream indices used by the statistical criteria.
pub mod streams {
    pub const WORD: u64 = 8_001;
    pub const U_STATISTIC: u64 = 8_002;
    pub const FERRERS: u64 = 8_003;
    pub const HOEFFDING: u64 = 9_001;
}

fn construction_equivalence(seed: u64) -> Verdict {
    let start = Instant::now();
    let (n, m) = (6usize, 2u32);
    let probs = dist::exact_pmf(n, m)?.probabilities::<f64>();
    let reps = CONSTRUCTION_SAMPLES;

    let words = sampler::batch(reps, &SampleStream::new(seed, streams::WORD), |s| {
        combinat::inversions(&sampler::sample_word(n, m, s).expect("m >= 1"))
    });
    let ustats = sampler::batch(reps, &SampleStream::new(seed, streams::U_STATISTIC), |s| {
        let pairs = sampler::sample_upairs(n, m, s).expect("m >= 1");
        sampler::u_statistic(&pairs).expect("distinct y")
    });
    let ferrers = sampler::batch(reps, &SampleStream::new(seed, streams::FERRERS), |s| {
        sampler::sample_ferrers(n, s).area - (n as u64 + 1)
    });

    let mut ok = true;
    let mut parts = Vec::new();
    for (name, draws) in [("word", words), ("U", ustats), ("Ferrers", ferrers)] {
        let chi = stats::chi_square_gof(&stats::histogram(draws), &probs);
        ok &= chi.p_value >= CHI_SQUARE_ALPHA;
        parts.push(format!("{name}: chi2={:.2} dof={} p={:.4}", chi.statistic, chi.dof, chi.p_value));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    Ok((
        ok,
        format!(
            "{reps} draws each at (6,2), alpha {CHI_SQUARE_ALPHA}: {}; {}",
            parts.join("; "),
            budget_note(secs, 60.0)
        ),
    ))
}

fn hoeffding(seed: u64) -> Verdict {
    let m = 4u32;
    let draws = sampler::batch(HOEFFDING_DRAWS, &SampleStream::new(seed, streams::HOEFFDING), |s| {
        sampler::sample_hoeffding(m, s)
    });
    let xi: Vec<f64> = draws.iter().map(|d| d.xi_1).collect();
    let eta: Vec<f64> = draws.iter().map(|d| d.eta).collect();
    let xi_s = Summary::of(&xi);
    let eta_s = Summary::of(&eta);
    let z_xi = xi_s.variance_z(f64_of(&sampler::xi_variance(m)));
    let z_eta = eta_s.variance_z(f64_of(&sampler::eta_variance(m)));
    let cov = stats::covariance(&xi, &eta);

    let mut identity_failures = 0;
    for n in 0..=100usize {
        for mm in 1..=10u32 {
            let d = VDecomposition::compute(n, mm);
            if d.total() != dist::closed_form_moments(n, mm).variance || !d.matches_closed_forms(n, mm) {
                identity_failures += 1;
            }
        }
    }
    let ok = z_xi.abs() <= HOEFFDING_Z
        && z_eta.abs() <= HOEFFDING_Z
        && cov.z().abs() <= HOEFFDING_Z
        && identity_failures == 0;
    Ok((
        ok,
        format!(
            "{HOEFFDING_DRAWS} draws at m=4: Var xi {:.6} (z={z_xi:+.2}), Var eta {:.6} (z={z_eta:+.2}), \
             Cov(xi,eta) {:+.2e} (z={:+.2}); V-split identity failures {identity_failures}/1010",
            xi_s.variance,
            eta_s.variance,
            cov.value,
            cov.z()
        ),
    ))
}

fn characteristic_function() -> Verdict {
    let mut ok = true;
    let mut lows = (f64::INFINITY, f64::INFINITY);
    for m in [2u32, 3] {
        for n in [8usize, 16, 32] {
            let p = analysis::cf_probe::<f64>(n, m, CF_GRID)?;
            ok &= p.c_hat_small > CF_FLOOR && p.c_hat_large > CF_FLOOR;
            lows.0 = lows.0.min(p.c_hat_small);
            lows.1 = lows.1.min(p.c_hat_large);
        }
    }
    Ok((
        ok,
        format!(
            "n in {{8,16,32}}, m in {{2,3}}: min c_small {:.5}, min c_large {:.5}, floor {CF_FLOOR}",
            lows.0, lows.1
        ),
    ))
}
