//! Exact polynomials in `q` with nonnegative big-integer coefficients.
//!
//! Everything here is a pure function of its inputs. Products switch from
//! schoolbook convolution to Kronecker substitution once both operands are
//! long enough, so that the inner loop runs inside a single big-integer
//! multiplication instead of millions of small ones.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Operand length below which products use schoolbook convolution.
const KRONECKER_MIN_LEN: usize = 12;

/// Dense polynomial `Σ c_i q^i` with `c_i ≥ 0`, stored without trailing zeros.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CoeffPoly {
    coeffs: Vec<BigUint>,
}

impl CoeffPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![BigUint::one()],
        }
    }

    /// Builds a polynomial from coefficients in increasing powers of `q`,
    /// dropping trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigUint>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigUint> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the highest nonzero coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `q^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigUint {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Value at `q = 1`, i.e. the sum of the coefficients.
    pub fn eval_at_one(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    /// True when every coefficient from `q^0` through the degree is positive.
    pub fn has_gap_free_support(&self) -> bool {
        !self.coeffs.is_empty() && self.coeffs.iter().all(|c| !c.is_zero())
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigUint::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Product by direct convolution. Always available; used for short
    /// operands and as the reference the fast product is tested against.
    pub fn mul_schoolbook(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigUint::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(out)
    }

    /// Product by Kronecker substitution: both operands are packed into one
    /// big integer with slots wide enough that no coefficient of the product
    /// can carry into its neighbour.
    pub fn mul_kronecker(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let max_a = self.coeffs.iter().max().expect("nonempty");
        let max_b = other.coeffs.iter().max().expect("nonempty");
        let overlap = self.coeffs.len().min(other.coeffs.len());
        let bound = max_a * max_b * BigUint::from(overlap);
        let slot = usize::try_from(bound.bits() + 1)
            .expect("slot width fits usize")
            .div_ceil(32);

        let packed_a = pack(&self.coeffs, slot);
        let packed_b = pack(&other.coeffs, slot);
        let digits = (packed_a * packed_b).to_u32_digits();

        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let coeffs = (0..len)
            .map(|k| {
                let start = k * slot;
                if start >= digits.len() {
                    BigUint::zero()
                } else {
                    BigUint::from_slice(&digits[start..(start + slot).min(digits.len())])
                }
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Multiplies by the q-integer `[len]_q = 1 + q + ⋯ + q^(len-1)` using a
    /// sliding window sum.
    pub fn mul_q_integer(&self, len: usize) -> Self {
        if len == 0 || self.is_zero() {
            return Self::zero();
        }
        let src = &self.coeffs;
        let out_len = src.len() + len - 1;
        let mut out = Vec::with_capacity(out_len);
        let mut window = BigUint::zero();
        for t in 0..out_len {
            if let Some(c) = src.get(t) {
                window += c;
            }
            if t >= len {
                window -= &src[t - len];
            }
            out.push(window.clone());
        }
        Self::from_coeffs(out)
    }

    /// Exact quotient by `[len]_q`, or `None` when `[len]_q` does not divide
    /// `self` over the nonnegative integers.
    pub fn div_q_integer(&self, len: usize) -> Option<Self> {
        if len == 0 {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.coeffs.len() < len {
            return None;
        }
        // With R = P·[len]_q:  R_t − R_{t−1} = P_t − P_{t−len}.
        let r = &self.coeffs;
        let out_len = r.len() - len + 1;
        let mut p: Vec<BigUint> = Vec::with_capacity(out_len);
        for t in 0..r.len() {
            let mut acc = r[t].clone();
            if t >= len {
                if let Some(prev) = p.get(t - len) {
                    acc += prev;
                }
            }
            if t >= 1 {
                if acc < r[t - 1] {
                    return None;
                }
                acc -= &r[t - 1];
            }
            if t < out_len {
                p.push(acc);
            } else if !acc.is_zero() {
                return None;
            }
        }
        Some(Self::from_coeffs(p))
    }

    /// Evaluates at `e^{iθ}` by Horner's rule in floating point.
    pub fn eval_unit_circle<F: Real>(&self, theta: F) -> Complex<F> {
        eval_unit_circle(self, theta)
    }
}

fn pack(coeffs: &[BigUint], slot: usize) -> BigUint {
    let mut digits = vec![0u32; coeffs.len() * slot];
    for (i, c) in coeffs.iter().enumerate() {
        let d = c.to_u32_digits();
        digits[i * slot..i * slot + d.len()].copy_from_slice(&d);
    }
    BigUint::new(digits)
}

impl Mul for &CoeffPoly {
    type Output = CoeffPoly;

    fn mul(self, rhs: &CoeffPoly) -> CoeffPoly {
        if self.coeffs.len().min(rhs.coeffs.len()) < KRONECKER_MIN_LEN {
            self.mul_schoolbook(rhs)
        } else {
            self.mul_kronecker(rhs)
        }
    }
}

impl Mul for CoeffPoly {
    type Output = CoeffPoly;

    fn mul(self, rhs: CoeffPoly) -> CoeffPoly {
        &self * &rhs
    }
}

impl AddAssign<&CoeffPoly> for CoeffPoly {
    fn add_assign(&mut self, rhs: &CoeffPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigUint::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Add for &CoeffPoly {
    type Output = CoeffPoly;

    fn add(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for CoeffPoly {
    type Output = CoeffPoly;

    fn add(mut self, rhs: CoeffPoly) -> CoeffPoly {
        self += &rhs;
        self
    }
}

impl std::iter::Sum for CoeffPoly {
    fn sum<I: Iterator<Item = CoeffPoly>>(iter: I) -> Self {
        iter.fold(CoeffPoly::zero(), |acc, p| acc + p)
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => f.write_str("q")?,
                (1, false) => write!(f, "{c}q")?,
                (_, true) => write!(f, "q^{i}")?,
                (_, false) => write!(f, "{c}q^{i}")?,
            }
        }
        Ok(())
    }
}

/// Letter multiplicities `(k_1, …, k_m)` of a word of length `n = Σ k_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyComposition);
        }
        Ok(Self { parts })
    }

    /// Like [`Composition::new`] but also checks the parts against a declared total.
    pub fn with_total(parts: Vec<usize>, n: usize) -> Result<Self> {
        let c = Self::new(parts)?;
        if c.n() != n {
            return Err(Error::CompositionSum {
                declared: n,
                actual: c.n(),
            });
        }
        Ok(c)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn m(&self) -> usize {
        self.parts.len()
    }

    /// Maximum number of inversions, `(n² − Σ k_i²) / 2`.
    pub fn max_inversions(&self) -> usize {
        let n = self.n();
        (n * n - self.parts.iter().map(|k| k * k).sum::<usize>()) / 2
    }
}

impl TryFrom<Vec<usize>> for Composition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Composition> for Vec<usize> {
    fn from(c: Composition) -> Self {
        c.parts
    }
}

/// Calls `f` once for every composition of `n` into `m` parts, in
/// lexicographic order of the parts.
pub fn for_each_composition(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    fn rec(rest: usize, slots: usize, parts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if slots == 1 {
            parts.push(rest);
            f(parts);
            parts.pop();
            return;
        }
        for k in 0..=rest {
            parts.push(k);
            rec(rest - k, slots - 1, parts, f);
            parts.pop();
        }
    }
    if m == 0 {
        return;
    }
    let mut parts = Vec::with_capacity(m);
    rec(n, m, &mut parts, &mut f);
}

/// `[ℓ]_q = 1 + q + ⋯ + q^(ℓ−1)`; the zero polynomial for `ℓ = 0`.
pub fn q_integer(l: usize) -> CoeffPoly {
    CoeffPoly::from_coeffs(vec![BigUint::one(); l])
}

/// `[k]!_q = [1]_q [2]_q ⋯ [k]_q`.
pub fn q_factorial(k: usize) -> CoeffPoly {
    (1..=k).fold(CoeffPoly::one(), |acc, l| acc.mul_q_integer(l))
}

/// Gaussian binomial coefficient, built as
/// `Π_{i=1}^{k} [n−k+i]_q / [i]_q` where every partial product is itself a
/// Gaussian binomial and therefore has nonnegative coefficients.
pub fn q_binomial(n: usize, k: usize) -> Result<CoeffPoly> {
    if k > n {
        return Err(Error::BinomialRange { n, k });
    }
    let k = k.min(n - k);
    let mut acc = CoeffPoly::one();
    for i in 1..=k {
        acc = acc
            .mul_q_integer(n - k + i)
            .div_q_integer(i)
            .expect("partial products of a q-binomial are polynomials");
    }
    Ok(acc)
}

/// Row `n` of the q-Pascal triangle, `[B(n,0), …, B(n,n)]`.
pub fn q_binomial_row(n: usize) -> Vec<CoeffPoly> {
    let mut row = vec![CoeffPoly::one()];
    for _ in 0..n {
        row = next_pascal_row(&row);
    }
    row
}

/// `B(n,k) = B(n−1,k−1) + q^k B(n−1,k)`.
fn next_pascal_row(prev: &[CoeffPoly]) -> Vec<CoeffPoly> {
    let n = prev.len();
    (0..=n)
        .map(|k| {
            let mut out = if k > 0 {
                prev[k - 1].clone()
            } else {
                CoeffPoly::zero()
            };
            if k < n {
                out += &prev[k].shift(k);
            }
            out
        })
        .collect()
}

/// Gaussian multinomial coefficient as `Π_i B(k_1+⋯+k_i, k_i)`.
pub fn q_multinomial(c: &Composition) -> CoeffPoly {
    let mut total = 0;
    let mut acc = CoeffPoly::one();
    for &k in c.parts() {
        total += k;
        let factor = q_binomial(total, k).expect("k <= running total");
        acc = &acc * &factor;
    }
    acc
}

/// Generalized Galois polynomial `G_n^(m)(q)`: the sum of `q_multinomial`
/// over all compositions of `n` into `m` parts.
pub fn galois_poly(n: usize, m: u32) -> Result<CoeffPoly> {
    Ok(galois_table(n, m)?.pop().expect("table has n + 1 entries"))
}

/// `[G_0^(m), …, G_{n_max}^(m)]` via the splitting recurrence
/// `G_n^(m) = Σ_j B(n, j) G_{n−j}^(m−1)` with `G_n^(1) = 1`.
pub fn galois_table(n_max: usize, m: u32) -> Result<Vec<CoeffPoly>> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let m = m as usize;
    // levels[a][k] = G_k^(a+1)
    let mut levels: Vec<Vec<CoeffPoly>> = vec![Vec::with_capacity(n_max + 1); m];
    let mut row = vec![CoeffPoly::one()];
    for k in 0..=n_max {
        if k > 0 {
            row = next_pascal_row(&row);
        }
        levels[0].push(CoeffPoly::one());
        for a in 1..m {
            let below = &levels[a - 1];
            let value = (0..=k)
                .into_par_iter()
                .map(|j| &row[j] * &below[k - j])
                .reduce(CoeffPoly::zero, |x, y| x + y);
            levels[a].push(value);
        }
    }
    Ok(levels.pop().expect("m >= 1"))
}

/// Oracle route for `G_n^(m)`: explicit summation over all compositions.
/// Exponential in `m`; intended for cross-checking.
pub fn galois_poly_by_compositions(n: usize, m: u32) -> Result<CoeffPoly> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let mut acc = CoeffPoly::zero();
    for_each_composition(n, m as usize, |parts| {
        let c = Composition::new(parts.to_vec()).expect("nonempty");
        acc += &q_multinomial(&c);
    });
    Ok(acc)
}

/// Degree of `G_n^(m)`: the maximal inversion count, attained by the most
/// balanced composition (`r = n mod m` parts of size `⌈n/m⌉`).
pub fn galois_degree(n: usize, m: u32) -> usize {
    let m = m.max(1) as usize;
    let (lo, r) = (n / m, n % m);
    let hi = lo + usize::from(r > 0);
    (n * n - r * hi * hi - (m - r) * lo * lo) / 2
}

/// Horner evaluation of `p` at `e^{iθ}`. Coefficients beyond the range of
/// `F` become infinite; scale first (see [`crate::dist::ExactPmf`]) when
/// that matters.
pub fn eval_unit_circle<F: Real>(p: &CoeffPoly, theta: F) -> Complex<F> {
    let z = Complex::new(theta.cos(), theta.sin());
    p.coeffs().iter().rev().fold(Complex::new(F::zero(), F::zero()), |acc, c| {
        acc * z + Complex::new(F::of(c.to_f64().unwrap_or(f64::INFINITY)), F::zero())
    })
}

/// JSON form of a polynomial: coefficients as decimal strings, index = power of `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<usize>>,
    pub coeffs: Vec<String>,
}

impl PolyRecord {
    pub fn new(n: usize, m: usize, p: &CoeffPoly) -> Self {
        Self {
            n,
            m,
            parts: None,
            coeffs: p.coeffs().iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_poly(&self) -> Result<CoeffPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| {
                s.parse::<BigUint>()
                    .map_err(|e| Error::Parse(format!("coefficient {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoeffPoly::from_coeffs(coeffs))
    }
}
