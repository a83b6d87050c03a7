use num_rational::{BigRational, Ratio};
use pordkit_core::enumerate::{enumerate, gl_order, levi_order, GroupKind, DEFAULT_BUDGET};
use pordkit_core::hecke::sample_pro_p_iwahori;
use pordkit_core::{BlockShape, PMatrix, QMatrix, SmallMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn int_matrix(n: usize, p: u64) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-12i64..12, n * n).prop_map(move |v| {
        QMatrix::from_fn(n, p, |r, c| BigRational::from_integer(v[r * n + c].into()))
    })
}

fn shapes(n: usize) -> impl Strategy<Value = BlockShape> {
    prop::sample::select(BlockShape::all_with_n(n))
}

proptest! {
    #[test]
    fn reduction_is_multiplicative(a in int_matrix(3, 3), b in int_matrix(3, 3), r in 1u32..4) {
        let lhs = (&a * &b).reduce_mod(r).unwrap();
        let rhs = a.reduce_mod(r).unwrap().mul(&b.reduce_mod(r).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn small_and_big_scalars_agree(a in int_matrix(3, 2), shape in shapes(3), r in 0u32..3) {
        let small: SmallMatrix = a.try_to().unwrap();
        prop_assert_eq!(small.det().numer().to_string(), a.det().numer().to_string());
        for pro_p in [false, true] {
            prop_assert_eq!(small.in_iwahori(&shape, r, pro_p), a.in_iwahori(&shape, r, pro_p));
        }
    }

    #[test]
    fn level_zero_is_integral_unit(a in int_matrix(3, 3), shape in shapes(3)) {
        prop_assert_eq!(a.in_iwahori(&shape, 0, true), a.is_integral_unit());
        prop_assert_eq!(a.in_iwahori(&shape, 0, false), a.is_integral_unit());
    }

    #[test]
    fn pro_p_iwahori_is_closed(seed in any::<u64>(), shape in shapes(4), r in 1u32..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = sample_pro_p_iwahori(&shape, 3, r, &mut rng);
        let h = sample_pro_p_iwahori(&shape, 3, r, &mut rng);
        prop_assert!(g.in_iwahori(&shape, r, true));
        prop_assert!((&g * &h).in_iwahori(&shape, r, true));
        prop_assert!(g.inverse().unwrap().in_iwahori(&shape, r, true));
    }

    #[test]
    fn inverse_is_two_sided(a in int_matrix(3, 5)) {
        if let Some(inv) = a.inverse() {
            prop_assert!((&a * &inv).is_identity());
            prop_assert!((&inv * &a).is_identity());
        } else {
            prop_assert_eq!(a.det(), BigRational::from_integer(0.into()));
        }
    }
}

#[test]
fn level_filtration_is_decreasing() {
    let shape = BlockShape::from_parts(&[1], &[1, 1]).unwrap();
    let m = PMatrix::<Ratio<i64>>::from_i64_rows(&[&[1, 5, 2], &[3, 1, 0], &[0, 3, 1]], 3).unwrap();
    assert!(m.in_iwahori(&shape, 1, false));
    assert!(!m.in_iwahori(&shape, 2, false));
}

#[test]
fn quotient_order_shadow_small() {
    for n in 1..=2 {
        for shape in BlockShape::all_with_n(n) {
            for (p, r) in [(2, 1), (3, 1), (2, 2)] {
                let i0 = enumerate(GroupKind::Iwahori0, &shape, p, r, DEFAULT_BUDGET)
                    .unwrap()
                    .len() as u128;
                let i1 = enumerate(GroupKind::Iwahori, &shape, p, r, DEFAULT_BUDGET)
                    .unwrap()
                    .len() as u128;
                let levi = enumerate(GroupKind::Levi, &shape, p, r, DEFAULT_BUDGET)
                    .unwrap()
                    .len() as u128;
                assert_eq!(i0 % i1, 0);
                assert_eq!(i0 / i1, levi, "{shape} p={p} r={r}");
                assert_eq!(levi, levi_order(&shape, p, r));
            }
        }
    }
    assert_eq!(gl_order(3, 2, 1), 168);
}
