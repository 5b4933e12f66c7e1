use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use monogamy::game::{chsh, extend_over_graph};
use monogamy::quantum::constructions::{apply_local_unitaries, random_strategy, random_unitary};
use monogamy::quantum::{strategy_value, CMat};
use monogamy::sos::ExtScalar;
use monogamy::word::{Letter, Word};
use monogamy::Graph;

fn letters() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0usize..4, 0usize..2).prop_map(|(p, s)| Letter::new(p, s)), 0..8)
}

fn scalar() -> impl Strategy<Value = ExtScalar> {
    (-5i64..=5, -5i64..=5, -5i64..=5, -5i64..=5, 1i64..=4)
        .prop_map(|(a, b, c, d, q)| {
            let r = |n: i64| monogamy::rational::ratio(n, q);
            ExtScalar::new(r(a), r(b), r(c), r(d))
        })
}

proptest! {
    #[test]
    fn canonical_form_ignores_association(a in letters(), b in letters(), c in letters()) {
        let (wa, wb, wc) = (Word::from_letters(a.clone()), Word::from_letters(b.clone()), Word::from_letters(c.clone()));
        let all = Word::from_letters(a.into_iter().chain(b).chain(c));
        prop_assert_eq!(&wa.mul(&wb).mul(&wc), &all);
        prop_assert_eq!(&wa.mul(&wb.mul(&wc)), &all);
    }

    #[test]
    fn canonical_form_is_a_fixed_point(a in letters()) {
        let w = Word::from_letters(a);
        prop_assert_eq!(Word::from_letters(w.letters().to_vec()), w);
    }

    #[test]
    fn adjoint_is_an_anti_involution(a in letters(), b in letters()) {
        let (wa, wb) = (Word::from_letters(a), Word::from_letters(b));
        prop_assert_eq!(wa.adjoint().adjoint(), wa.clone());
        prop_assert_eq!(wa.mul(&wb).adjoint(), wb.adjoint().mul(&wa.adjoint()));
        prop_assert!(wa.real_key() <= wa && wa.real_key() <= wa.adjoint());
    }

    #[test]
    fn extension_field_matches_floats(x in scalar(), y in scalar()) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        prop_assert!(((&x + &y).to_f64() - (fx + fy)).abs() < 1e-9);
        prop_assert!(((&x * &y).to_f64() - fx * fy).abs() < 1e-8);
        if let Some(inv) = y.inverse() {
            prop_assert!(((&x / &y).to_f64() - fx / fy).abs() < 1e-6 * (1.0 + (fx / fy).abs()));
            prop_assert_eq!(&(&inv * &y), &ExtScalar::int(1));
        }
        if fx.abs() > 1e-9 {
            prop_assert_eq!(x.is_positive(), fx > 0.0);
        }
    }

    #[test]
    fn born_probabilities_form_distributions(seed in 0u64..1000, d in 1usize..4, o in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_strategy(&mut rng, &[d, 2, d], 2, o);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            for x in 0..2 {
                for y in 0..2 {
                    let p = s.pair_distribution(u, v, x, y).unwrap();
                    let total: f64 = p.iter().flatten().sum();
                    prop_assert!((total - 1.0).abs() < 1e-9);
                    prop_assert!(p.iter().flatten().all(|&q| q > -1e-12));
                }
            }
        }
    }

    #[test]
    fn local_unitaries_preserve_the_value(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gg = extend_over_graph(&chsh(), &Graph::path(3)).unwrap();
        let s = random_strategy(&mut rng, &[2, 2, 2], 2, 2);
        let us: Vec<CMat> = (0..3).map(|_| random_unitary(&mut rng, 2)).collect();
        let t = apply_local_unitaries(&s, &us).unwrap();
        prop_assert!((strategy_value(&gg, &s).unwrap() - strategy_value(&gg, &t).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn strategy_json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s = random_strategy(&mut rng, &[2, 3], 2, 2);
    let back = monogamy::quantum::QuantumStrategy::from_json(&s.to_json()).unwrap();
    let gg = extend_over_graph(&chsh(), &Graph::path(2)).unwrap();
    assert_abs_diff_eq!(strategy_value(&gg, &s).unwrap(), strategy_value(&gg, &back).unwrap(), epsilon = 1e-12);
}
