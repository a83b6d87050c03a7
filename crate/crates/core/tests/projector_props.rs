use num_bigint::BigInt;
use num_rational::BigRational;
use pordkit_core::projector::{check_limit_convergence, dual_projector_check, ConvergenceStatus};
use pordkit_core::{ordinary_projector, QMatrix};
use proptest::prelude::*;

const P: u64 = 2;
const R: u32 = 6;

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Unit lower-triangular times unit upper-triangular: determinant 1.
fn unimodular(n: usize, lower: &[i64], upper: &[i64]) -> QMatrix {
    let l = QMatrix::from_fn(n, P, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Equal => q(1),
        std::cmp::Ordering::Greater => q(lower[r * n + c]),
        std::cmp::Ordering::Less => q(0),
    });
    let u = QMatrix::from_fn(n, P, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Equal => q(1),
        std::cmp::Ordering::Less => q(upper[r * n + c]),
        std::cmp::Ordering::Greater => q(0),
    });
    &l * &u
}

/// `S·diag(λ)·S⁻¹` with the exact projector `S·diag(λ unit)·S⁻¹`.
fn planted() -> impl Strategy<Value = (QMatrix, QMatrix)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(-3i64..=3, n * n),
            prop::collection::vec(-3i64..=3, n * n),
            prop::collection::vec(-6i64..=6, n),
        )
            .prop_map(move |(lo, up, eig)| {
                let s = unimodular(n, &lo, &up);
                let si = s.inverse().unwrap();
                let d = QMatrix::diagonal(eig.iter().map(|&v| q(v)).collect(), P);
                let pi =
                    QMatrix::diagonal(eig.iter().map(|&v| q(i64::from(v % 2 != 0))).collect(), P);
                (&(&s * &d) * &si, &(&s * &pi) * &si)
            })
    })
}

fn random_integral(n: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-9i64..=9, n * n)
        .prop_map(move |v| QMatrix::from_fn(n, P, |r, c| q(v[r * n + c])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_planted_eigenprojector((u, pi) in planted()) {
        let e = ordinary_projector(&u, R).unwrap();
        prop_assert!(e.certificates.all());
        prop_assert_eq!(&e.e, &pi.reduce_mod(R).unwrap());
        let conv = check_limit_convergence(&u, &e, (u.n() + 2) as u32, R).unwrap();
        prop_assert_eq!(conv.status, ConvergenceStatus::Holds);
    }

    #[test]
    fn duality_on_random_matrices(u in random_integral(4)) {
        prop_assert!(dual_projector_check(&u, R).unwrap());
    }

    #[test]
    fn projector_is_idempotent_and_commutes(u in random_integral(3)) {
        let e = ordinary_projector(&u, R).unwrap();
        let um = u.reduce_mod(R).unwrap();
        prop_assert_eq!(e.e.mul(&e.e), e.e.clone());
        prop_assert_eq!(e.e.mul(&um), um.mul(&e.e));
        prop_assert!(e.certificates.all());
    }
}
