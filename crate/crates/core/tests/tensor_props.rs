mod common;

use causal_definetti::exchange::trial_permutation;
use causal_definetti::linalg;
use causal_definetti::tensor::{
    coordinates, hs_inner, kron, partial_trace, permute_factors, superop_adjoint, superop_apply, trace_and_replace,
    HermOp, SpaceLayout, SuperOp,
};
use common::random_herm;
use proptest::prelude::*;

fn three_factors(d: [usize; 3]) -> SpaceLayout {
    let a = SpaceLayout::state("a", d[0]);
    let b = SpaceLayout::state("b", d[1]);
    let e = SpaceLayout::state("e", d[2]);
    a.concat(&b).unwrap().concat(&e).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let a = random_herm(SpaceLayout::state("a", da), seed);
        let b = random_herm(SpaceLayout::state("b", db), seed ^ 1);
        let ab = kron(&a, &b).unwrap();
        let reduced = partial_trace(&ab, &["a"]).unwrap();
        let expected = a.scale(b.trace());
        prop_assert!(linalg::max_abs_diff(reduced.entries(), expected.entries()) < 1e-12);
    }

    #[test]
    fn trace_and_replace_is_a_projector(seed in any::<u64>(), d in prop::array::uniform3(1usize..4), which in 0usize..3) {
        let x = random_herm(three_factors(d), seed);
        let label = ["a", "b", "e"][which];
        let once = trace_and_replace(&x, &[label]).unwrap();
        let twice = trace_and_replace(&once, &[label]).unwrap();
        prop_assert!(once.max_abs_diff(&twice).unwrap() < 1e-12);
        prop_assert!((once.trace() - x.trace()).abs() < 1e-12);
        prop_assert!(linalg::hermiticity_residual(once.entries()) < 1e-12);
    }

    #[test]
    fn permutation_preserves_hs_inner(seed in any::<u64>(), d in prop::array::uniform3(1usize..4), k in 0usize..6) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let layout = three_factors(d);
        let x = random_herm(layout.clone(), seed);
        let y = random_herm(layout, seed ^ 7);
        let px = permute_factors(&x, &perms[k]).unwrap();
        let py = permute_factors(&y, &perms[k]).unwrap();
        prop_assert!((hs_inner(&px, &py).unwrap() - hs_inner(&x, &y).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn adjoint_pairing(seed in any::<u64>(), d in 1usize..4) {
        let layout = SpaceLayout::state("q", d);
        let mut rng = linalg::seeded(seed);
        let k = linalg::ginibre(d, d, &mut rng);
        let kd = k.adjoint();
        let l = SuperOp::from_operator_map(&layout, &layout, |x| {
            HermOp::new(x.layout().clone(), &k * x.entries() * &kd)
        }).unwrap();
        let x = random_herm(layout.clone(), seed ^ 3);
        let y = random_herm(layout.clone(), seed ^ 5);
        let lhs = coordinates(&y).dot(&superop_apply(&l, &x).unwrap());
        let rhs = superop_apply(&superop_adjoint(&l), &y).unwrap().dot(&coordinates(&x));
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        // the adjoint of conjugation by K is conjugation by K†
        let direct = coordinates(&HermOp::new(layout, &kd * y.entries() * &k).unwrap());
        prop_assert!((superop_apply(&superop_adjoint(&l), &y).unwrap() - direct).amax() < 1e-10);
    }

    #[test]
    fn permutation_unitaries_compose(n in 2usize..6, s1 in any::<u64>(), s2 in any::<u64>()) {
        let trial = SpaceLayout::state("q", 2);
        let shuffle = |seed: u64| {
            let mut v: Vec<usize> = (0..n).collect();
            let mut rng = linalg::seeded(seed);
            rand::seq::SliceRandom::shuffle(v.as_mut_slice(), &mut rng);
            v
        };
        let sigma = shuffle(s1);
        let tau = shuffle(s2);
        let composed: Vec<usize> = (0..n).map(|i| sigma[tau[i]]).collect();
        let u = |p: &[usize]| trial_permutation(n, p, &trial).unwrap().unitary();
        let product = u(&sigma) * u(&tau);
        prop_assert!(linalg::max_abs_diff(&product, &u(&composed)) < 1e-15);
        let uu = u(&sigma);
        prop_assert!(linalg::unitarity_residual(&uu) < 1e-14);
    }
}
