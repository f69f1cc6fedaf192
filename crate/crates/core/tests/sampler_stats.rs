use mahonian::analysis;
use mahonian::combinat::{self, inversions};
use mahonian::sampler::{self, BatchStats, SampleStream, VDecomposition};
use mahonian::stats::{self, Summary};
use proptest::prelude::*;

proptest! {
    #[test]
    fn v_statistic_counts_inversions(seed in any::<u64>(), n in 0usize..300, m in 1u32..20) {
        let w = sampler::sample_word(n, m, &mut SampleStream::new(seed, 1)).unwrap();
        prop_assert_eq!(sampler::v_statistic(&w), inversions(&w));
    }

    #[test]
    fn u_statistic_matches_double_sum(seed in any::<u64>(), n in 0usize..200, m in 1u32..8) {
        let pairs = sampler::sample_upairs(n, m, &mut SampleStream::new(seed, 2)).unwrap();
        prop_assert_eq!(sampler::u_statistic(&pairs).unwrap(), sampler::u_statistic_double_sum(&pairs).unwrap());
    }

    #[test]
    fn ferrers_sample_matches_its_path(seed in any::<u64>(), n in 0usize..100) {
        let mut a = SampleStream::new(seed, 3);
        let mut b = a.clone();
        let p = sampler::sample_path(n, &mut a);
        let f = sampler::sample_ferrers(n, &mut b);
        let d = combinat::path_to_ferrers(&p);
        prop_assert_eq!((f.area, f.height), (d.area(), d.height() as u64));
    }
}

#[test]
fn letter_frequencies_are_uniform() {
    let (n, m, reps) = (50, 3u32, 100_000);
    let draws = sampler::batch_joint(n, m, reps, &SampleStream::new(1, 10)).unwrap();
    let p = 1.0 / f64::from(m);
    let trials = (n * reps) as f64;
    let se = (trials * p * (1.0 - p)).sqrt();
    for total in BatchStats::from_joint(&draws).letter_totals {
        assert!((total as f64 - trials * p).abs() < 4.0 * se, "{total}");
    }
}

#[test]
fn joint_mean_matches_closed_form() {
    let draws = sampler::batch_joint(40, 2, 100_000, &SampleStream::new(2, 11)).unwrap();
    let s = Summary::of_iter(draws.iter().map(|d| d.v as f64));
    assert!(s.mean_z(195.0).abs() < 4.0, "z = {}", s.mean_z(195.0));
}

#[test]
fn inversions_uncorrelated_with_letter_counts() {
    let draws = sampler::batch_joint(100, 2, 50_000, &SampleStream::new(3, 12)).unwrap();
    let v: Vec<f64> = draws.iter().map(|d| d.v as f64).collect();
    let n1: Vec<f64> = draws.iter().map(|d| d.counts[0] as f64).collect();
    assert!(stats::correlation(&v, &n1).abs() < 0.05);
}

#[test]
fn ferrers_area_and_height_are_asymptotically_independent() {
    let r = analysis::ferrers_joint_check(100, 100_000, &SampleStream::new(4, 13)).unwrap();
    assert!(r.correlation.abs() < 0.05, "{}", r.correlation);
    assert!(r.passes(0.05, 4.0));
}

#[test]
fn ferrers_mean_area_small_n() {
    let draws = sampler::batch(100_000, &SampleStream::new(5, 14), |rs| sampler::sample_ferrers(20, rs));
    let s = Summary::of_iter(draws.iter().map(|d| d.area as f64));
    assert!(s.mean_z(68.5).abs() < 4.0, "mean {}", s.mean);
}

#[test]
fn hoeffding_terms_have_closed_form_variances() {
    let m = 3;
    let draws = sampler::batch(200_000, &SampleStream::new(6, 15), |rs| sampler::sample_hoeffding(m, rs));
    let xi = Summary::of_iter(draws.iter().map(|d| d.xi_1));
    let eta = Summary::of_iter(draws.iter().map(|d| d.eta));
    let xi_var: f64 = mahonian::Real::from_rational(&sampler::xi_variance(m));
    let eta_var: f64 = mahonian::Real::from_rational(&sampler::eta_variance(m));
    assert!(xi.variance_z(xi_var).abs() < 4.0);
    assert!(eta.variance_z(eta_var).abs() < 4.0);
    assert!(xi.mean_z(0.0).abs() < 4.0);
}

#[test]
fn variance_decomposition_is_exact() {
    for n in 1..30 {
        for m in 1..6 {
            let d = VDecomposition::compute(n, m);
            assert!(d.matches_closed_forms(n, m));
            assert_eq!(d.total(), mahonian::dist::closed_form_moments(n, m).variance);
        }
    }
}

#[test]
fn batches_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sampler::batch_joint(60, 4, 5_000, &SampleStream::new(7, 16)).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn replicates_are_addressable() {
    let s = SampleStream::new(8, 17);
    let batch = sampler::batch(10, &s, |rs| sampler::sample_word(20, 5, rs).unwrap());
    let direct = sampler::sample_word(20, 5, &mut s.replicate(7)).unwrap();
    assert_eq!(batch[7], direct);
}
