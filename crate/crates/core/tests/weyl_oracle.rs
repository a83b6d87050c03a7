use pordkit_core::enumerate::DEFAULT_BUDGET;
use pordkit_core::shape::Partition;
use pordkit_core::weyl::{
    acts_trivially_on_center, block_group_order, block_permutation_check, filtration_layout,
    is_group, weyl_set_lm, weyl_set_lm_oracle, weyl_set_pq, weyl_set_pq_oracle,
};
use pordkit_core::WeylElement;

fn compositions(n: usize) -> Vec<Vec<usize>> {
    Partition::compositions(n)
        .into_iter()
        .map(|c| c.parts().to_vec())
        .collect()
}

#[test]
fn root_sets_match_conjugation_up_to_three() {
    for n in 1..=3 {
        for l in compositions(n) {
            for m in compositions(n) {
                for p in [2, 3] {
                    assert_eq!(
                        weyl_set_pq(&l, &m).unwrap(),
                        weyl_set_pq_oracle(&l, &m, p, DEFAULT_BUDGET).unwrap(),
                        "{l:?} {m:?} p={p}"
                    );
                    assert_eq!(
                        weyl_set_lm(&l, &m).unwrap(),
                        weyl_set_lm_oracle(&l, &m, p, DEFAULT_BUDGET).unwrap(),
                        "{l:?} {m:?} p={p}"
                    );
                }
            }
        }
    }
}

#[test]
fn levi_weyl_groups() {
    for n in 1..=6 {
        for blocks in compositions(n) {
            assert!(block_permutation_check(&blocks).unwrap(), "{blocks:?}");
            let w = weyl_set_lm(&blocks, &blocks).unwrap();
            assert!(is_group(&w));
            assert_eq!(w.len(), block_group_order(&blocks));
        }
    }
}

#[test]
fn only_identity_fixes_the_center() {
    for blocks in compositions(5) {
        for x in weyl_set_lm(&blocks, &blocks).unwrap() {
            assert_eq!(
                acts_trivially_on_center(&x, &blocks),
                x.is_identity(),
                "{blocks:?} {x}"
            );
        }
    }
}

#[test]
fn borel_pair_is_whole_group() {
    for n in 1..=5 {
        let ones = vec![1; n];
        assert_eq!(weyl_set_pq(&ones, &ones).unwrap(), WeylElement::all(n));
        assert_eq!(
            weyl_set_pq(&[n], &[n]).unwrap(),
            vec![WeylElement::identity(n)]
        );
    }
}

#[test]
fn filtration_has_one_sub() {
    for n in 1..=5 {
        for l in compositions(n) {
            for m in compositions(n) {
                let layout = filtration_layout(&l, &m).unwrap();
                let subs = layout.pieces.iter().filter(|p| p.sub).count();
                let has_identity = layout
                    .pieces
                    .iter()
                    .any(|p| p.x == (1..=n).collect::<Vec<_>>());
                assert_eq!(subs, usize::from(has_identity));
                for piece in &layout.pieces {
                    assert_eq!(piece.conj_shape.iter().map(Vec::len).collect::<Vec<_>>(), m);
                }
            }
        }
    }
}
