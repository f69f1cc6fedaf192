//! Exact distributions of the inversion statistic and distances between them.
//!
//! `P(G_{n,m} = ℓ) = A_n^(m)(ℓ) / m^n`, where `A_n^(m)(ℓ)` is the coefficient
//! of `q^ℓ` in `G_n^(m)(q)`; the normalising constant is `m^n`, the number
//! of words, which is also the value of `G_n^(m)` at `q = 1`.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::{self, CoeffPoly};
use crate::scalar::{normal_cdf, normal_pdf, Real};

/// Finite distribution on `{0, …, len − 1}` with exact rational masses
/// `numerators[k] / denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPmf {
    numerators: Vec<BigUint>,
    denominator: BigUint,
}

impl ExactPmf {
    /// Checks that the numerators sum to the positive denominator.
    pub fn new(numerators: Vec<BigUint>, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Parameter("denominator must be positive".into()));
        }
        let total: BigUint = numerators.iter().sum();
        if total != denominator {
            return Err(Error::Parameter(format!(
                "numerators sum to {total}, denominator is {denominator}"
            )));
        }
        Ok(Self {
            numerators,
            denominator,
        })
    }

    /// Normalises a nonzero polynomial by its value at `q = 1`.
    pub fn from_poly(p: CoeffPoly) -> Result<Self> {
        let denominator = p.eval_at_one();
        Self::new(p.into_coeffs(), denominator)
    }

    pub fn point_mass(k: usize) -> Self {
        let mut numerators = vec![BigUint::zero(); k + 1];
        numerators[k] = BigUint::one();
        Self {
            numerators,
            denominator: BigUint::one(),
        }
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// Number of stored outcomes, `{0, …, len − 1}`.
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn prob(&self, k: usize) -> BigRational {
        let num = self.numerators.get(k).cloned().unwrap_or_default();
        BigRational::new(num.into(), self.denominator.clone().into())
    }

    /// Masses rounded to `F`.
    pub fn probabilities<F: Real>(&self) -> Vec<F> {
        self.numerators
            .iter()
            .map(|c| ratio_to_real(c, &self.denominator))
            .collect()
    }

    /// `F(k) = P(X ≤ k)` for `k = 0, …, len − 1`, each rounded from the exact value.
    pub fn cdf<F: Real>(&self) -> Vec<F> {
        let mut acc = BigUint::zero();
        self.numerators
            .iter()
            .map(|c| {
                acc += c;
                ratio_to_real(&acc, &self.denominator)
            })
            .collect()
    }

    /// Probability generating function at `e^{iθ}`, i.e. the characteristic
    /// function of the distribution at `θ`.
    pub fn pgf_unit_circle<F: Real>(&self, theta: F) -> Complex<F> {
        let z = Complex::new(theta.cos(), theta.sin());
        self.probabilities::<F>()
            .into_iter()
            .rev()
            .fold(Complex::new(F::zero(), F::zero()), |acc, p| {
                acc * z + Complex::new(p, F::zero())
            })
    }

    /// Distribution of `X + k`.
    pub fn shifted(&self, k: usize) -> Self {
        let mut numerators = vec![BigUint::zero(); k];
        numerators.extend_from_slice(&self.numerators);
        Self {
            numerators,
            denominator: self.denominator.clone(),
        }
    }
}

fn ratio_to_real<F: Real>(num: &BigUint, den: &BigUint) -> F {
    F::from_rational(&BigRational::new_raw(
        BigInt::from(num.clone()),
        BigInt::from(den.clone()),
    ))
}

/// Exact mean and variance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moments {
    pub mean: BigRational,
    pub variance: BigRational,
}

impl Moments {
    pub fn sd<F: Real>(&self) -> F {
        F::from_rational(&self.variance).sqrt()
    }
}

/// Which centring and scaling to use in the local limit comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentVariant {
    /// The exact mean and variance.
    Exact,
    /// Leading-order `(m−1)n²/(4m)` and `(m²−1)n³/(36m²)`.
    Approximate,
}

/// Law of the number of inversions in a uniformly random word of length `n`
/// over `{1, …, m}`.
pub fn exact_pmf(n: usize, m: u32) -> Result<ExactPmf> {
    ExactPmf::from_poly(qpoly::galois_poly(n, m)?)
}

/// `[exact_pmf(0, m), …, exact_pmf(n_max, m)]` from a single recurrence pass.
pub fn exact_pmf_table(n_max: usize, m: u32) -> Result<Vec<ExactPmf>> {
    qpoly::galois_table(n_max, m)?
        .into_iter()
        .map(ExactPmf::from_poly)
        .collect()
}

fn rat(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `E G = n(n−1)(m−1)/(4m)` and `Var G = n(n−1)(2n+5)(m²−1)/(72m²)`.
pub fn closed_form_moments(n: usize, m: u32) -> Moments {
    let (n, m) = (n as u128, u128::from(m.max(1)));
    let pairs = n * n.saturating_sub(1);
    Moments {
        mean: rat(pairs * (m - 1), 4 * m),
        variance: rat(pairs * (2 * n + 5) * (m * m - 1), 72 * m * m),
    }
}

/// Leading-order moments `(m−1)n²/(4m)` and `(m²−1)n³/(36m²)`.
pub fn approximate_moments(n: usize, m: u32) -> Moments {
    let (n, m) = (n as u128, u128::from(m.max(1)));
    Moments {
        mean: rat((m - 1) * n * n, 4 * m),
        variance: rat((m * m - 1) * n * n * n, 36 * m * m),
    }
}

/// Exact `Σ k p(k)` and `Σ k² p(k) − mean²`.
pub fn moments_from_pmf(p: &ExactPmf) -> Moments {
    let mut first = BigUint::zero();
    let mut second = BigUint::zero();
    for (k, c) in p.numerators().iter().enumerate() {
        let k = BigUint::from(k);
        let kc = &k * c;
        second += &k * &kc;
        first += kc;
    }
    let den = BigInt::from(p.denominator().clone());
    let mean = BigRational::new(first.into(), den.clone());
    let variance = BigRational::new(second.into(), den) - &mean * &mean;
    Moments { mean, variance }
}

/// Law of the number of inversions of a uniformly random permutation of
/// `{1, …, n}`: coefficients of `[n]!_q` over `n!`.
pub fn permutation_inversion_pmf(n: usize) -> ExactPmf {
    ExactPmf::from_poly(qpoly::q_factorial(n)).expect("q-factorial is nonzero")
}

/// `½ Σ_k |p(k) − r(k)|`, exact.
pub fn tv_distance(p: &ExactPmf, r: &ExactPmf) -> BigRational {
    let dp = BigInt::from(p.denominator().clone());
    let dr = BigInt::from(r.denominator().clone());
    let len = p.len().max(r.len());
    let zero = BigUint::zero();
    let mut total = BigInt::zero();
    for k in 0..len {
        let a = BigInt::from(p.numerators().get(k).unwrap_or(&zero).clone()) * &dr;
        let b = BigInt::from(r.numerators().get(k).unwrap_or(&zero).clone()) * &dp;
        total += (a - b).abs();
    }
    BigRational::new(total, BigInt::from(2) * dp * dr)
}

/// `1 − (m)_n / m^n`: the probability that `n` uniform letters from an
/// alphabet of size `m` are not all distinct.
pub fn tv_bound(n: usize, m: u32) -> BigRational {
    let m_big = BigInt::from(m);
    let mut falling = BigInt::one();
    let mut power = BigInt::one();
    for i in 0..n {
        let factor = i64::from(m) - i as i64;
        falling *= BigInt::from(factor.max(0));
        power *= &m_big;
    }
    if power.is_zero() {
        return BigRational::zero();
    }
    BigRational::one() - BigRational::new(falling, power)
}

/// Centring and scale for the local limit comparison.
pub fn moments_for(n: usize, m: u32, variant: MomentVariant) -> Moments {
    match variant {
        MomentVariant::Exact => closed_form_moments(n, m),
        MomentVariant::Approximate => approximate_moments(n, m),
    }
}

/// `sup_k |σ P(G = k) − φ((k − μ)/σ)|` over `k ∈ {−1, …, deg + 1}`, with
/// `φ` the standard normal density and `(μ, σ²)` chosen by `variant`.
pub fn llt_residual<F: Real>(n: usize, m: u32, variant: MomentVariant) -> Result<F> {
    if n < 2 || m < 2 {
        return Err(Error::Degenerate { n, m });
    }
    let pmf = exact_pmf(n, m)?;
    let moments = moments_for(n, m, variant);
    llt_residual_of(&pmf, F::from_rational(&moments.mean), moments.sd())
}

/// Local limit residual of an arbitrary distribution against `N(mean, sd²)`.
pub fn llt_residual_of<F: Real>(p: &ExactPmf, mean: F, sd: F) -> Result<F> {
    if !(sd > F::zero() && sd.is_finite()) {
        return Err(Error::NonPositiveSd(sd.to_string()));
    }
    let probs = p.probabilities::<F>();
    let upper = probs.len() as i64;
    let worst = (-1..=upper)
        .map(|k| {
            let mass = usize::try_from(k)
                .ok()
                .and_then(|i| probs.get(i).copied())
                .unwrap_or_else(F::zero);
            let z = (F::of(k as f64) - mean) / sd;
            (sd * mass - normal_pdf(z)).abs()
        })
        .fold(F::zero(), F::max);
    Ok(worst)
}

/// `sup_k |F_p(k) − Φ((k + ½ − mean)/sd)|` over `k ∈ {−1, …, len − 1}`,
/// the Kolmogorov distance with a continuity correction.
pub fn kolmogorov_distance_to_normal<F: Real>(p: &ExactPmf, mean: F, sd: F) -> Result<F> {
    if !(sd > F::zero() && sd.is_finite()) {
        return Err(Error::NonPositiveSd(sd.to_string()));
    }
    let half = F::of(0.5);
    let gap = |k: i64, cdf: F| (cdf - normal_cdf((F::of(k as f64) + half - mean) / sd)).abs();
    let below = gap(-1, F::zero());
    Ok(p
        .cdf::<F>()
        .into_iter()
        .enumerate()
        .map(|(k, c)| gap(k as i64, c))
        .fold(below, F::max))
}

/// Exact rational as decimal strings plus its nearest double.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalRecord {
    pub num: String,
    pub den: String,
    pub value: f64,
}

impl From<&BigRational> for RationalRecord {
    fn from(r: &BigRational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            value: f64::from_rational(r),
        }
    }
}

/// JSON form of an [`ExactPmf`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmfRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub denominator: String,
    pub numerators: Vec<String>,
}

impl PmfRecord {
    pub fn new(n: Option<usize>, m: Option<u32>, p: &ExactPmf) -> Self {
        Self {
            n,
            m,
            denominator: p.denominator().to_string(),
            numerators: p.numerators().iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_pmf(&self) -> Result<ExactPmf> {
        let parse = |s: &String| {
            s.parse::<BigUint>()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        ExactPmf::new(
            self.numerators.iter().map(parse).collect::<Result<_>>()?,
            parse(&self.denominator)?,
        )
    }
}

/// Moment report comparing the closed form with the moments of the exact law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub n: usize,
    pub m: u32,
    pub closed_form: MomentPair,
    pub from_pmf: MomentPair,
    pub exact_equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mean: RationalRecord,
    pub variance: RationalRecord,
}

impl From<&Moments> for MomentPair {
    fn from(m: &Moments) -> Self {
        Self {
            mean: (&m.mean).into(),
            variance: (&m.variance).into(),
        }
    }
}

impl MomentReport {
    pub fn compute(n: usize, m: u32) -> Result<Self> {
        let closed = closed_form_moments(n, m);
        let observed = moments_from_pmf(&exact_pmf(n, m)?);
        Ok(Self {
            n,
            m,
            closed_form: (&closed).into(),
            from_pmf: (&observed).into(),
            exact_equal: closed == observed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn probs(p: &ExactPmf) -> Vec<BigRational> {
        (0..p.len()).map(|k| p.prob(k)).collect()
    }

    #[test]
    fn exact_pmf_examples() {
        assert_eq!(probs(&exact_pmf(2, 2).unwrap()), [r(3, 4), r(1, 4)]);
        assert_eq!(probs(&exact_pmf(1, 7).unwrap()), [r(1, 1)]);
        assert_eq!(probs(&exact_pmf(3, 2).unwrap()), [r(1, 2), r(1, 4), r(1, 4)]);
        let p = exact_pmf(1, 5).unwrap();
        assert_eq!(p.denominator(), &BigUint::from(5u32));
        assert_eq!(p.numerators(), &[BigUint::from(5u32)]);
    }

    #[test]
    fn closed_form_examples() {
        let m = closed_form_moments(2, 2);
        assert_eq!((m.mean, m.variance), (r(1, 4), r(3, 16)));
        let m = closed_form_moments(1, 5);
        assert_eq!((m.mean, m.variance), (r(0, 1), r(0, 1)));
        let m = closed_form_moments(3, 2);
        assert_eq!((m.mean, m.variance), (r(3, 4), r(11, 16)));
        assert_eq!(closed_form_moments(0, 3).variance, r(0, 1));
    }

    #[test]
    fn moments_from_pmf_examples() {
        let m = moments_from_pmf(&exact_pmf(2, 2).unwrap());
        assert_eq!((m.mean, m.variance), (r(1, 4), r(3, 16)));
        let m = moments_from_pmf(&ExactPmf::point_mass(0));
        assert_eq!((m.mean, m.variance), (r(0, 1), r(0, 1)));
        let m = moments_from_pmf(&exact_pmf(3, 2).unwrap());
        assert_eq!((m.mean, m.variance), (r(3, 4), r(11, 16)));
    }

    #[test]
    fn permutation_pmf_examples() {
        assert_eq!(probs(&permutation_inversion_pmf(1)), [r(1, 1)]);
        assert_eq!(probs(&permutation_inversion_pmf(2)), [r(1, 2), r(1, 2)]);
        assert_eq!(
            probs(&permutation_inversion_pmf(3)),
            [r(1, 6), r(1, 3), r(1, 3), r(1, 6)]
        );
    }

    #[test]
    fn tv_examples() {
        let p = exact_pmf(4, 3).unwrap();
        assert_eq!(tv_distance(&p, &p), r(0, 1));
        assert_eq!(
            tv_distance(&exact_pmf(2, 2).unwrap(), &permutation_inversion_pmf(2)),
            r(1, 4)
        );
        assert_eq!(
            tv_distance(&ExactPmf::point_mass(0), &ExactPmf::point_mass(1)),
            r(1, 1)
        );
    }

    #[test]
    fn tv_bound_examples() {
        assert_eq!(tv_bound(2, 4), r(1, 4));
        assert_eq!(tv_bound(2, 2), r(1, 2));
        assert_eq!(tv_bound(3, 2), r(1, 1));
        assert_eq!(tv_bound(1, 9), r(0, 1));
    }

    #[test]
    fn pmf_validation() {
        assert!(ExactPmf::new(vec![1u32.into()], 2u32.into()).is_err());
        assert!(ExactPmf::new(vec![], 0u32.into()).is_err());
        assert!(ExactPmf::from_poly(CoeffPoly::zero()).is_err());
    }

    #[test]
    fn llt_rejects_degenerate() {
        assert_eq!(
            llt_residual::<f64>(1, 2, MomentVariant::Exact),
            Err(Error::Degenerate { n: 1, m: 2 })
        );
        assert!(llt_residual::<f64>(5, 1, MomentVariant::Exact).is_err());
    }

    #[test]
    fn kolmogorov_point_mass() {
        // F(0) = 1 against Φ(½); F(−1) = 0 against Φ(−½). Both gaps are 1 − Φ(½).
        let d = kolmogorov_distance_to_normal(&ExactPmf::point_mass(0), 0.0f64, 1.0).unwrap();
        assert!((d - 0.308_537_538_725_987).abs() < 1e-12);
        assert!(kolmogorov_distance_to_normal(&ExactPmf::point_mass(0), 0.0f64, 0.0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let d32 = llt_residual::<f32>(16, 2, MomentVariant::Exact).unwrap();
        let d64 = llt_residual::<f64>(16, 2, MomentVariant::Exact).unwrap();
        assert!((f64::from(d32) - d64).abs() < 1e-5);
    }

    #[test]
    fn pmf_record_round_trip() {
        let p = exact_pmf(12, 5).unwrap();
        let rec = PmfRecord::new(Some(12), Some(5), &p);
        let json = serde_json::to_string(&rec).unwrap();
        let back: PmfRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_pmf().unwrap(), p);
    }

    #[test]
    fn pgf_matches_polynomial_evaluation() {
        let g = qpoly::galois_poly(9, 3).unwrap();
        let p = ExactPmf::from_poly(g.clone()).unwrap();
        for theta in [0.1f64, 1.0, 2.5, std::f64::consts::PI] {
            let a = p.pgf_unit_circle(theta);
            let b = g.eval_unit_circle(theta) / 19683.0;
            assert!((a - b).norm() < 1e-12);
        }
    }
}
