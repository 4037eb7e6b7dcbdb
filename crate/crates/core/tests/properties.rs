use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use robust_ts::agents::linear::WeightedRidgeState;
use robust_ts::attacks::{AttackObservation, Attacker};
use robust_ts::rng::derive_stream;

fn context(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d).prop_map(|v| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1.0 {
            v.iter().map(|x| x / n).collect()
        } else {
            v
        }
    })
}

fn samples(d: usize, max: usize) -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
    prop::collection::vec((context(d), -3.0f64..3.0), 1..max)
}

proptest! {
    #[test]
    fn weights_bounded_and_information_grows(
        gamma in 0.001f64..2.0,
        data in samples(3, 60),
        probe in context(3),
    ) {
        let mut state = WeightedRidgeState::new(3, gamma);
        let mut before = state.b_inv().quad_form(&probe);
        for (x, r) in &data {
            let width = state.inv_norm(x);
            let w = state.update(x, *r).unwrap();
            prop_assert!(w > 0.0 && w <= 1.0);
            prop_assert!(w * width <= gamma * (1.0 + 1e-12));
            let after = state.b_inv().quad_form(&probe);
            prop_assert!(after <= before * (1.0 + 1e-10) + 1e-15);
            before = after;
        }
    }

    #[test]
    fn maintained_state_matches_dense_recomputation(
        gamma in 0.01f64..1.0,
        data in samples(4, 200),
    ) {
        let mut state = WeightedRidgeState::new(4, gamma);
        let mut b = DMatrix::<f64>::identity(4, 4);
        let mut f = DVector::<f64>::zeros(4);
        for (x, r) in &data {
            let w = state.update(x, *r).unwrap();
            let xv = DVector::from_column_slice(x);
            b += w * &xv * xv.transpose();
            f += w * *r * &xv;
        }
        let inv = b.clone().try_inverse().unwrap();
        let l = b.clone().cholesky().unwrap().l();
        let mu = &inv * &f;
        for i in 0..4 {
            prop_assert!((state.mu_hat()[i] - mu[i]).abs() < 1e-9);
            for j in 0..4 {
                prop_assert!((state.b()[(i, j)] - b[(i, j)]).abs() < 1e-9);
                prop_assert!((state.b_inv()[(i, j)] - inv[(i, j)]).abs() < 1e-9);
                prop_assert!((state.b_chol()[(i, j)] - l[(i, j)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn attacker_view_matches_received_rewards(
        budget in 0.0f64..10.0,
        pulls in prop::collection::vec((0usize..4, 0.0f64..1.0), 1..200),
        which in 0usize..3,
    ) {
        let mut attacker = match which {
            0 => Attacker::oracle(4, budget, 3, 0.2, 0.5),
            1 => Attacker::jun_style(4, budget, 3, 0.0, 0.5, 0.05),
            _ => Attacker::garcelon_style(4, budget, 3, 0.3),
        };
        let mut stream = derive_stream(1, 0, 3);
        let mut counts = [0u64; 4];
        let mut sums = [0.0f64; 4];
        let mut spent = 0.0;
        for (t, (arm, r)) in pulls.iter().enumerate() {
            let obs = AttackObservation { t: t + 1, arm: *arm, reward_pre: *r, context: None };
            let c = attacker.decide(&obs, &mut stream);
            if *arm == 3 {
                prop_assert_eq!(c, 0.0);
            }
            spent += c.abs();
            counts[*arm] += 1;
            sums[*arm] += r + c;
        }
        prop_assert!(spent <= budget * (1.0 + 1e-12) + 1e-12);
        prop_assert!((attacker.ledger().spent() - spent).abs() < 1e-9);
        let shadow = attacker.shadow();
        prop_assert_eq!(&shadow.counts[..], &counts[..]);
        for (got, want) in shadow.sums.iter().zip(&sums) {
            prop_assert!((got - want).abs() < 1e-9);
        }
    }
}
