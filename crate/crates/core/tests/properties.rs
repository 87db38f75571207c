use mhng_core::model::mix_predictions;
use mhng_core::policy::{symbol_distribution, symbol_scores, EfeVector, SharedInterpretation};
use mhng_core::prob::{argmax, argmin, entropy, js_divergence, softmax, Categorical, StochasticMatrix};
use proptest::prelude::*;

fn scores(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-30.0f64..30.0, n)
}

fn distribution(n: usize) -> impl Strategy<Value = Categorical> {
    prop::collection::vec(0.001f64..1.0, n).prop_map(|w| Categorical::normalize(w).unwrap())
}

fn interpretation(actions: usize, symbols: usize) -> impl Strategy<Value = SharedInterpretation> {
    prop::collection::vec(distribution(actions), symbols)
        .prop_map(|cols| SharedInterpretation::from_matrix(StochasticMatrix::from_columns(&cols).unwrap()))
}

proptest! {
    #[test]
    fn softmax_is_normalized_and_shift_invariant(s in scores(1..40), shift in -100.0f64..100.0, tau in 0.05f64..5.0) {
        let p = softmax(&s, tau).unwrap();
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.probs().iter().all(|&x| x >= 0.0));
        let shifted: Vec<f64> = s.iter().map(|x| x + shift).collect();
        let q = softmax(&shifted, tau).unwrap();
        for (a, b) in p.probs().iter().zip(q.probs()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert_eq!(p.argmax(), argmax(&s));
    }

    #[test]
    fn js_divergence_is_symmetric_and_bounded(p in distribution(36), q in distribution(36)) {
        let pq = js_divergence(&p, &q).unwrap();
        let qp = js_divergence(&q, &p).unwrap();
        prop_assert!((pq - qp).abs() < 1e-12);
        prop_assert!(pq >= -1e-15 && pq <= std::f64::consts::LN_2 + 1e-12);
        prop_assert!(js_divergence(&p, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_ignores_order(p in distribution(12), rotate in 0usize..12) {
        let mut v = p.probs().to_vec();
        v.rotate_left(rotate);
        let rotated = Categorical::new(v).unwrap();
        prop_assert!((entropy(&p) - entropy(&rotated)).abs() < 1e-12);
        prop_assert!(entropy(&p) <= (12f64).ln() + 1e-12);
    }

    #[test]
    fn symbol_scores_are_linear_in_g(
        e in interpretation(5, 15),
        g1 in scores(5..6),
        g2 in scores(5..6),
        k in -3.0f64..3.0,
    ) {
        let combined: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a + k * b).collect();
        let s1 = symbol_scores(&EfeVector::from_totals(g1), &e).unwrap();
        let s2 = symbol_scores(&EfeVector::from_totals(g2), &e).unwrap();
        let s = symbol_scores(&EfeVector::from_totals(combined), &e).unwrap();
        for w in 0..15 {
            prop_assert!((s[w] - (s1[w] + k * s2[w])).abs() < 1e-9);
        }
    }

    #[test]
    fn most_likely_symbol_has_lowest_free_energy(e in interpretation(5, 15), g in scores(5..6)) {
        let scores = symbol_scores(&EfeVector::from_totals(g), &e).unwrap();
        let xi = symbol_distribution(&scores).unwrap();
        prop_assert_eq!(xi.argmax(), argmin(&scores));
    }

    #[test]
    fn symbol_predictions_stay_in_the_convex_hull(
        preds in prop::collection::vec(distribution(8), 5),
        e in interpretation(5, 3),
        w in 0usize..3,
    ) {
        let mixed = mix_predictions(&preds, &e, w).unwrap();
        prop_assert!((mixed.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for o in 0..8 {
            let lo = preds.iter().map(|p| p[o]).fold(f64::INFINITY, f64::min);
            let hi = preds.iter().map(|p| p[o]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(mixed[o] >= lo - 1e-12 && mixed[o] <= hi + 1e-12);
        }
    }
}
