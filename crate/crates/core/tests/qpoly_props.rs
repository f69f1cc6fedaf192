use mahonian::qpoly::{self, for_each_composition};
use mahonian::{CoeffPoly, Composition, Natural};
use num_traits::{One, Pow};
use proptest::prelude::*;

fn poly_strategy(max_len: usize) -> impl Strategy<Value = CoeffPoly> {
    prop::collection::vec(any::<u64>(), 0..max_len).prop_map(|c| CoeffPoly::from_u64s(&c))
}

proptest! {
    #[test]
    fn kronecker_matches_schoolbook(a in poly_strategy(60), b in poly_strategy(60)) {
        prop_assert_eq!(a.mul_kronecker(&b), a.mul_schoolbook(&b));
    }

    #[test]
    fn multiplication_commutes(a in poly_strategy(30), b in poly_strategy(30)) {
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn q_integer_division_inverts_multiplication(a in poly_strategy(40), len in 1usize..20) {
        prop_assert_eq!(a.mul_q_integer(len).div_q_integer(len), Some(a));
    }

    #[test]
    fn multinomial_properties(parts in prop::collection::vec(0usize..6, 1..5)) {
        let c = Composition::new(parts.clone()).unwrap();
        let p = qpoly::q_multinomial(&c);
        let fact = |k: usize| (1..=k as u64).map(Natural::from).fold(Natural::one(), |a, b| a * b);
        let expected = parts.iter().fold(fact(c.n()), |acc, &k| acc / fact(k));
        prop_assert_eq!(p.eval_at_one(), expected);
        prop_assert!(p.is_palindromic());
        prop_assert!(p.has_gap_free_support());
        prop_assert_eq!(p.degree().unwrap(), c.max_inversions());
    }

    #[test]
    fn unit_circle_modulus_is_bounded(n in 0usize..25, m in 1u32..6, theta in -3.2f64..3.2) {
        let g = qpoly::galois_poly(n, m).unwrap();
        let bound = (m as f64).powi(n as i32);
        let z = qpoly::eval_unit_circle::<f64>(&g, theta);
        prop_assert!(z.norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn galois_is_gap_free_with_known_degree(n in 0usize..30, m in 1u32..7) {
        let g = qpoly::galois_poly(n, m).unwrap();
        prop_assert!(g.has_gap_free_support());
        prop_assert_eq!(g.degree().unwrap(), qpoly::galois_degree(n, m));
    }
}

#[test]
fn galois_at_one_counts_words() {
    for m in 1..=8u32 {
        let table = qpoly::galois_table(40, m).unwrap();
        for (n, g) in table.iter().enumerate() {
            assert_eq!(g.eval_at_one(), Natural::from(m).pow(n as u32), "n={n} m={m}");
        }
    }
}

#[test]
fn recurrence_matches_composition_sum() {
    for n in 0..=9 {
        for m in 1..=4 {
            assert_eq!(
                qpoly::galois_poly(n, m).unwrap(),
                qpoly::galois_poly_by_compositions(n, m).unwrap(),
                "n={n} m={m}"
            );
        }
    }
}

#[test]
fn composition_sum_counts_match_multinomials() {
    let mut count = 0usize;
    for_each_composition(6, 3, |_| count += 1);
    assert_eq!(count, 28);
}

#[test]
fn q_binomial_examples() {
    assert_eq!(qpoly::q_binomial(4, 2).unwrap(), CoeffPoly::from_u64s(&[1, 1, 2, 1, 1]));
    assert!(qpoly::q_binomial(3, 4).is_err());
}
