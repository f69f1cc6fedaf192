//! Seeded Monte Carlo samplers for the equivalent constructions of the
//! inversion statistic, plus the Hoeffding decomposition of its U-statistic
//! kernel.
//!
//! Every batch assigns replicate `r` its own block of the ChaCha keystream
//! ([`SampleStream::replicate`]), so results are identical however the
//! replicates are spread over threads.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::{self, LatticePath, Step, Word};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stats::Summary;

/// Words of keystream reserved for each replicate.
const REPLICATE_BLOCK_BITS: u32 = 32;

/// Deterministic random source: a ChaCha8 keystream selected by
/// `(master_seed, stream_index)`.
#[derive(Debug, Clone)]
pub struct SampleStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Fresh source positioned at the block of this stream reserved for
    /// replicate `rep`. Blocks start after the first `2^32` words, so they do
    /// not overlap ordinary sequential draws of moderate length.
    pub fn replicate(&self, rep: u64) -> Self {
        assert!(rep < (1 << 35), "replicate index {rep} out of range");
        let mut out = Self::new(self.master_seed, self.stream_index);
        out.rng
            .set_word_pos(u128::from(rep + 1) << REPLICATE_BLOCK_BITS);
        out
    }

    /// Uniform letter in `1..=m`.
    pub fn letter(&mut self, m: u32) -> u32 {
        self.rng.random_range(1..=m)
    }

    /// Uniform double in the open interval `(0, 1)` with 53 random bits.
    pub fn open_unit(&mut self) -> f64 {
        loop {
            let y: f64 = self.rng.random();
            if y > 0.0 {
                return y;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random()
    }
}

/// Runs `draw` once per replicate on its own substream, in parallel, and
/// returns the results in replicate order.
pub fn batch<T, F>(reps: usize, stream: &SampleStream, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SampleStream) -> T + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|rep| draw(&mut stream.replicate(rep as u64)))
        .collect()
}

/// Word of `n` i.i.d. uniform letters from `{1, …, m}`.
pub fn sample_word(n: usize, m: u32, s: &mut SampleStream) -> Result<Word> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    Ok(Word::from_trusted((0..n).map(|_| s.letter(m)).collect(), m))
}

/// `V = Σ_{i<j} 1{X_i > X_j}`, accumulated right to left with a count of
/// the letters already passed.
pub fn v_statistic(w: &Word) -> u64 {
    let mut passed = vec![0u64; w.m() as usize + 1];
    let mut v = 0;
    for &x in w.letters().iter().rev() {
        v += passed[..x as usize].iter().sum::<u64>();
        passed[x as usize] += 1;
    }
    v
}

/// One observation `Z_i = (X_i, Y_i)` of the U-statistic construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UPair {
    pub x: u32,
    pub y: f64,
}

/// `n` i.i.d. pairs with `X` uniform on `{1, …, m}` and `Y` uniform on
/// `(0, 1)`. The sample is redrawn in the (practically impossible) event of
/// tied `Y` values.
pub fn sample_upairs(n: usize, m: u32, s: &mut SampleStream) -> Result<Vec<UPair>> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    loop {
        let pairs: Vec<UPair> = (0..n)
            .map(|_| UPair {
                x: s.letter(m),
                y: s.open_unit(),
            })
            .collect();
        if duplicate_y(&pairs).is_none() {
            return Ok(pairs);
        }
    }
}

fn duplicate_y(pairs: &[UPair]) -> Option<f64> {
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.y).collect();
    ys.sort_by(f64::total_cmp);
    ys.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

fn check_pairs(pairs: &[UPair]) -> Result<()> {
    if let Some(p) = pairs.iter().find(|p| !(p.y > 0.0 && p.y < 1.0)) {
        return Err(Error::YOutOfRange(p.y));
    }
    match duplicate_y(pairs) {
        Some(y) => Err(Error::DuplicateY(y)),
        None => Ok(()),
    }
}

/// `U = Σ_{i,j} 1{x_i > x_j} 1{y_i < y_j}`, computed as the inversion count
/// of the letters read in increasing order of `y`.
pub fn u_statistic(pairs: &[UPair]) -> Result<u64> {
    check_pairs(pairs)?;
    let m = pairs.iter().map(|p| p.x).max().unwrap_or(1);
    let mut order: Vec<&UPair> = pairs.iter().collect();
    order.sort_by(|a, b| a.y.total_cmp(&b.y));
    let word = Word::new(order.iter().map(|p| p.x).collect(), m)?;
    Ok(combinat::inversions(&word))
}

/// The double sum defining `U`, term by term.
pub fn u_statistic_double_sum(pairs: &[UPair]) -> Result<u64> {
    check_pairs(pairs)?;
    let mut u = 0;
    for a in pairs {
        for b in pairs {
            u += u64::from(a.x > b.x && a.y < b.y);
        }
    }
    Ok(u)
}

/// Uniform lattice path of length `n`.
pub fn sample_path(n: usize, s: &mut SampleStream) -> LatticePath {
    LatticePath::new(
        (0..n)
            .map(|_| if s.coin() { Step::N } else { Step::E })
            .collect(),
    )
}

/// Area and height of a Ferrers diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FerrersSample {
    pub area: u64,
    pub height: u64,
}

/// Uniform Ferrers diagram of semiperimeter `n + 2`, via a uniform path.
pub fn sample_ferrers(n: usize, s: &mut SampleStream) -> FerrersSample {
    let f = combinat::path_to_ferrers(&sample_path(n, s));
    FerrersSample {
        area: f.area(),
        height: f.height() as u64,
    }
}

/// Linear Hoeffding term `ξ = −(2/m)(x − (m+1)/2)(y − ½)` of the symmetric
/// kernel `h*`.
pub fn hoeffding_xi<F: Real>(x: u32, y: F, m: u32) -> F {
    let two = F::of(2.0);
    let mf = F::of(f64::from(m));
    let x_centred = F::of(f64::from(x)) - (mf + F::one()) / two;
    let y_centred = y - F::of(0.5);
    -(two / mf) * x_centred * y_centred
}

/// `h*(z_1, z_2) = 1{x_1 > x_2}1{y_1 < y_2} + 1{x_2 > x_1}1{y_2 < y_1}`.
pub fn symmetric_kernel(a: UPair, b: UPair) -> u32 {
    u32::from(a.x > b.x && a.y < b.y) + u32::from(b.x > a.x && b.y < a.y)
}

/// One pair `(Z_1, Z_2)` split as `h* = μ + ξ_1 + ξ_2 + η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingDraw {
    pub kernel: u32,
    pub xi_1: f64,
    pub xi_2: f64,
    pub eta: f64,
}

/// Kernel mean `E h* = (m − 1)/(2m)`.
pub fn kernel_mean(m: u32) -> f64 {
    f64::from(m - 1) / (2.0 * f64::from(m))
}

pub fn sample_hoeffding(m: u32, s: &mut SampleStream) -> HoeffdingDraw {
    let a = UPair {
        x: s.letter(m),
        y: s.open_unit(),
    };
    let b = UPair {
        x: s.letter(m),
        y: s.open_unit(),
    };
    let kernel = symmetric_kernel(a, b);
    let xi_1 = hoeffding_xi(a.x, a.y, m);
    let xi_2 = hoeffding_xi(b.x, b.y, m);
    HoeffdingDraw {
        kernel,
        xi_1,
        xi_2,
        eta: f64::from(kernel) - kernel_mean(m) - xi_1 - xi_2,
    }
}

/// `Var ξ = (m² − 1)/(36m²)`.
pub fn xi_variance(m: u32) -> BigRational {
    let m = BigInt::from(m);
    BigRational::new(&m * &m - 1, BigInt::from(36) * &m * &m)
}

/// `Var η = (7/36)(1 − 1/m²)`.
pub fn eta_variance(m: u32) -> BigRational {
    let m = BigInt::from(m);
    BigRational::new(BigInt::from(7) * (&m * &m - 1), BigInt::from(36) * &m * &m)
}

/// Variance contributions of the orthogonal split of `V`: the linear part
/// `m⁻² Σ_i (n+1−2i)² Var X'` and the residual part `C(n,2)·(1/12)(1 − 1/m²)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VDecomposition {
    pub linear: BigRational,
    pub residual: BigRational,
}

impl VDecomposition {
    pub fn compute(n: usize, m: u32) -> Self {
        let mb = BigInt::from(m);
        let m2 = &mb * &mb;
        let var_x = BigRational::new(&m2 - 1, BigInt::from(12));
        let weights: BigInt = (1..=n as i64)
            .map(|i| {
                let w = BigInt::from(n as i64 + 1 - 2 * i);
                &w * &w
            })
            .sum();
        let linear = BigRational::from_integer(weights) * var_x / BigRational::from_integer(m2.clone());
        let pairs = BigInt::from(n * n.saturating_sub(1) / 2);
        let residual = BigRational::new(pairs * (&m2 - 1), BigInt::from(12) * m2);
        Self { linear, residual }
    }

    pub fn total(&self) -> BigRational {
        &self.linear + &self.residual
    }

    /// The linear part equals `n(n−1)(n+1)/36·a` and the residual part
    /// `n(n−1)/24·a` with `a = 1 − 1/m²`.
    pub fn matches_closed_forms(&self, n: usize, m: u32) -> bool {
        let n_b = BigInt::from(n);
        let mb = BigInt::from(m);
        let a = BigRational::new(&mb * &mb - 1, &mb * &mb);
        let pairs = &n_b * (&n_b - 1);
        let linear = BigRational::new(&pairs * (&n_b + 1), BigInt::from(36)) * &a;
        let residual = BigRational::new(pairs, BigInt::from(24)) * &a;
        self.linear == linear && self.residual == residual
    }
}

/// One replicate of the joint sample `(V, N_1, …, N_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointSample {
    pub v: u64,
    pub counts: Vec<u64>,
}

pub fn batch_joint(n: usize, m: u32, reps: usize, s: &SampleStream) -> Result<Vec<JointSample>> {
    if reps == 0 {
        return Err(Error::Parameter("reps must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    Ok(batch(reps, s, |rs| {
        let w = sample_word(n, m, rs).expect("m >= 1");
        JointSample {
            v: combinat::inversions(&w),
            counts: w.letter_counts(),
        }
    }))
}

/// Count, mean and variance of `V` plus the summed letter counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub letter_totals: Vec<u64>,
}

impl BatchStats {
    pub fn from_joint(samples: &[JointSample]) -> Self {
        let summary = Summary::of_iter(samples.iter().map(|s| s.v as f64));
        let width = samples.first().map_or(0, |s| s.counts.len());
        let mut letter_totals = vec![0; width];
        for s in samples {
            for (t, c) in letter_totals.iter_mut().zip(&s.counts) {
                *t += c;
            }
        }
        Self {
            count: summary.count,
            mean: summary.mean,
            variance: summary.variance,
            letter_totals,
        }
    }
}

/// CSV with a `#`-prefixed metadata line, then `rep,V,N1,…,Nm`.
pub fn joint_csv(samples: &[JointSample], n: usize, m: u32, s: &SampleStream) -> String {
    let mut out = format!(
        "# construction=word n={n} m={m} reps={} master_seed={} stream_index={} replicate_block=2^{REPLICATE_BLOCK_BITS}\n",
        samples.len(),
        s.master_seed(),
        s.stream_index()
    );
    out.push_str("rep,V");
    for k in 1..=m {
        let _ = write!(out, ",N{k}");
    }
    out.push('\n');
    for (rep, sample) in samples.iter().enumerate() {
        let _ = write!(out, "{rep},{}", sample.v);
        for c in &sample.counts {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_reproducibility() {
        let mut a = SampleStream::new(7, 3);
        let mut b = SampleStream::new(7, 3);
        let wa = sample_word(40, 5, &mut a).unwrap();
        let wb = sample_word(40, 5, &mut b).unwrap();
        assert_eq!(wa, wb);
        let mut c = SampleStream::new(7, 4);
        assert_ne!(sample_word(40, 5, &mut c).unwrap(), wa);
    }

    #[test]
    fn replicates_are_stable_and_distinct() {
        let s = SampleStream::new(11, 0);
        let r1 = sample_word(30, 4, &mut s.replicate(5)).unwrap();
        let r2 = sample_word(30, 4, &mut s.replicate(5)).unwrap();
        let r3 = sample_word(30, 4, &mut s.replicate(6)).unwrap();
        assert_eq!(r1, r2);
        assert_ne!(r1, r3);
    }

    #[test]
    fn empty_word() {
        let mut s = SampleStream::new(1, 0);
        assert!(sample_word(0, 3, &mut s).unwrap().is_empty());
        assert!(sample_word(3, 0, &mut s).is_err());
    }

    #[test]
    fn v_statistic_examples() {
        assert_eq!(v_statistic(&Word::new(vec![2, 1], 2).unwrap()), 1);
        assert_eq!(v_statistic(&Word::new(vec![3; 9], 3).unwrap()), 0);
        assert_eq!(v_statistic(&Word::new(vec![3, 1, 2, 3, 1], 3).unwrap()), 5);
    }

    #[test]
    fn u_statistic_examples() {
        let pairs = [UPair { x: 2, y: 0.3 }, UPair { x: 1, y: 0.7 }];
        assert_eq!(u_statistic(&pairs).unwrap(), 1);
        assert_eq!(u_statistic_double_sum(&pairs).unwrap(), 1);
        let flat = [UPair { x: 2, y: 0.3 }, UPair { x: 2, y: 0.1 }, UPair { x: 2, y: 0.5 }];
        assert_eq!(u_statistic(&flat).unwrap(), 0);
        assert_eq!(u_statistic(&[]).unwrap(), 0);
    }

    #[test]
    fn u_statistic_preconditions() {
        let dup = [UPair { x: 2, y: 0.25 }, UPair { x: 1, y: 0.25 }];
        assert_eq!(u_statistic(&dup), Err(Error::DuplicateY(0.25)));
        assert_eq!(u_statistic_double_sum(&dup), Err(Error::DuplicateY(0.25)));
        let bad = [UPair { x: 1, y: 1.0 }];
        assert_eq!(u_statistic(&bad), Err(Error::YOutOfRange(1.0)));
    }

    #[test]
    fn ferrers_n1_always_area_two() {
        let s = SampleStream::new(3, 0);
        for f in batch(200, &s, |rs| sample_ferrers(1, rs)) {
            assert_eq!(f.area, 2);
        }
    }

    #[test]
    fn hoeffding_xi_examples() {
        assert_eq!(hoeffding_xi(2, 0.75f64, 2), -0.125);
        assert_eq!(hoeffding_xi(4, 0.5f64, 7), 0.0);
        assert_eq!(hoeffding_xi(2, 0.75f32, 2), -0.125f32);
    }

    #[test]
    fn hoeffding_split_is_exact() {
        let mut s = SampleStream::new(5, 9);
        for _ in 0..1000 {
            let d = sample_hoeffding(4, &mut s);
            let rebuilt = kernel_mean(4) + d.xi_1 + d.xi_2 + d.eta;
            assert!((rebuilt - f64::from(d.kernel)).abs() < 1e-12);
        }
    }

    #[test]
    fn v_decomposition_desk_example() {
        let d = VDecomposition::compute(3, 2);
        assert_eq!(d.linear, BigRational::new(1.into(), 2.into()));
        assert_eq!(d.residual, BigRational::new(3.into(), 16.into()));
        assert_eq!(d.total(), BigRational::new(11.into(), 16.into()));
        assert!(d.matches_closed_forms(3, 2));
    }

    #[test]
    fn joint_batch_shapes() {
        let s = SampleStream::new(2, 1);
        let batch = batch_joint(12, 3, 50, &s).unwrap();
        assert_eq!(batch.len(), 50);
        assert!(batch.iter().all(|b| b.counts.iter().sum::<u64>() == 12));
        assert!(batch_joint(12, 3, 0, &s).is_err());
        let stats = BatchStats::from_joint(&batch);
        assert_eq!(stats.letter_totals.iter().sum::<u64>(), 600);

        let csv = joint_csv(&batch[..2], 12, 3, &s);
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# construction=word n=12 m=3 reps=2 master_seed=2 stream_index=1"));
        assert_eq!(lines.next().unwrap(), "rep,V,N1,N2,N3");
        assert_eq!(lines.count(), 2);
    }
}
