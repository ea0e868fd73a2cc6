use proptest::prelude::*;

use racbox::box_core::{make_bn_box, make_bnd_box, make_rb, parse_box, serialize_box};
use racbox::protocols::{bn_box_via_rb, rac_via_bn_box_with};
use racbox::rational::{int, ratio};
use racbox::wiring::{add, check_tree_lemma, compile_rac, winning_probability, WiringTree};
use racbox::{BipartiteBox, Rational, RbVariant, Sign, SignalingDirection};

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn no_signaling(b: &BipartiteBox) -> bool {
    b.check_normalization()
        && b.check_no_signaling(SignalingDirection::AliceToBob)
        && b.check_no_signaling(SignalingDirection::BobToAlice)
}

fn digits(mut k: usize, d: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let v = k % d;
            k /= d;
            v
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn b_family_is_no_signaling(n in 2usize..=5, d in 2usize..=4, s in sign()) {
        prop_assert!(no_signaling(&make_bnd_box(n, d, s).unwrap()));
        prop_assert!(no_signaling(&make_bn_box(n).unwrap()));
    }

    #[test]
    fn binary_plus_box_is_the_bn_box(n in 2usize..=6) {
        prop_assert_eq!(make_bnd_box(n, 2, Sign::Plus).unwrap(), make_bn_box(n).unwrap());
    }

    #[test]
    fn box_text_round_trips(n in 2usize..=4, d in 2usize..=3, s in sign()) {
        let b = make_bnd_box(n, d, s).unwrap();
        prop_assert_eq!(parse_box(&serialize_box(&b)).unwrap(), b);
    }

    /// Alice's output is uniform whatever she feeds in and whatever Bob does.
    #[test]
    fn rb_alice_output_uniform(n in 2usize..=4, d in 2usize..=3, v in 0usize..5, seed in any::<usize>()) {
        let variant = RbVariant::ALL[v];
        prop_assume!(variant.supports(d));
        let rb = make_rb(n, d, variant).unwrap();
        let a = digits(seed, d, n);
        let bob = [seed / 7 % d, seed / 11 % n];
        let marginal = rb.alice_marginal(&a, &bob);
        prop_assert!(marginal.iter().all(|p| *p == ratio(1, d as i64)));
    }

    /// Off the relay branch the RAC answer is excluded for dits.
    #[test]
    fn dit_rb_excludes_correct_answer_off_branch(
        n in 2usize..=4, d in 3usize..=4, v in 2usize..5, seed in any::<usize>(),
    ) {
        let rb = make_rb(n, d, RbVariant::ALL[v]).unwrap();
        let a = digits(seed, d, n);
        let i = seed / 13 % n;
        for big_a in 0..d {
            for ap in (0..d).filter(|&ap| ap != big_a) {
                prop_assert_eq!(rb.prob(&a, &[ap, i], &[big_a], &[a[i]]), Rational::from_integer(0));
            }
        }
    }

    /// On the relay branch Bob reads `a_b`; off it he never does (bits).
    #[test]
    fn binary_rb_branches(n in 2usize..=5, seed in any::<usize>()) {
        let rb = make_rb(n, 2, RbVariant::NoSignaling).unwrap();
        let a = digits(seed, 2, n);
        let i = seed / 5 % n;
        for big_a in 0..2 {
            for ap in 0..2 {
                let joint = rb.prob(&a, &[ap, i], &[big_a], &[a[i]]);
                let expected = if ap == big_a { ratio(1, 2) } else { int(0) };
                prop_assert_eq!(joint, expected);
            }
        }
    }

    #[test]
    fn simulated_box_still_wins(n in 2usize..=5) {
        let simulated = bn_box_via_rb(n).unwrap().result;
        let (_, worst) = rac_via_bn_box_with(n, &simulated).unwrap().rac_win().unwrap();
        prop_assert_eq!(worst, int(1));
    }

    #[test]
    fn noisy_win_is_monotone(n in 2usize..=16, lo in 0.5f64..=1.0, hi in 0.5f64..=1.0) {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let (tree, _) = compile_rac(n).unwrap();
        prop_assert!(winning_probability(&tree, lo).unwrap() <= winning_probability(&tree, hi).unwrap() + 1e-15);
        prop_assert!((winning_probability(&tree, 0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    /// Any binary composition keeps `leaves = boxes + 1`.
    #[test]
    fn composed_trees_satisfy_tree_lemma(shape in proptest::collection::vec(any::<bool>(), 1..12)) {
        let mut trees = vec![WiringTree::leaf()];
        for grow_left in shape {
            let t = trees.pop().unwrap();
            let other = trees.pop().unwrap_or_else(WiringTree::leaf);
            trees.push(if grow_left { add(&t, &other) } else { add(&other, &t) });
            trees.push(WiringTree::leaf());
        }
        let t = trees.into_iter().reduce(|a, b| add(&a, &b)).unwrap();
        prop_assert_eq!(t.leaf_count(), t.rb_count() + 1);
        prop_assert!(check_tree_lemma(&t).unwrap().passed());
    }
}
