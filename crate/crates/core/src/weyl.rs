//! Permutations of `S_n` as Weyl elements and the index sets `W(P,Q)`,
//! `W(L,M)` of the Jacquet-module filtration.
//!
//! Block structures are compositions of `n` listed in matrix-coordinate order.
//! A permutation `x` acts by `x·e_i = e_{x(i)}`, so for the permutation matrix
//! `X` one has `(X⁻¹ m X)_{ij} = m_{x(i), x(j)}`.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::enumerate::{all_pattern_members, mul_mod, Slot};
use crate::error::{Error, Result};
use crate::padic::check_prime;

/// Permutation of `{0, …, n−1}`, stored as its images.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylElement {
    images: Vec<usize>,
}

impl WeylElement {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let seen: BTreeSet<usize> = images.iter().copied().collect();
        if seen.len() != n || images.iter().any(|&k| k >= n) {
            return Err(Error::Precondition(format!(
                "{images:?} is not a permutation"
            )));
        }
        Ok(Self { images })
    }

    /// From 1-based one-line notation.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        if one_line.contains(&0) {
            return Err(Error::Precondition("one-line notation is 1-based".into()));
        }
        Self::new(one_line.iter().map(|k| k - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        (0..n)
            .permutations(n)
            .map(|images| Self { images })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &v)| k == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (k, &v) in self.images.iter().enumerate() {
            inv[v] = k;
        }
        Self { images: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&k| self.images[k]).collect(),
        }
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|k| k + 1).collect()
    }

    /// Permutation matrix mod `m`, flat row-major: column `i` is `e_{x(i)}`.
    pub fn matrix_flat(&self, m: u64) -> Vec<u64> {
        let n = self.n();
        let mut out = vec![0; n * n];
        for (i, &xi) in self.images.iter().enumerate() {
            out[xi * n + i] = 1 % m;
        }
        out
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.one_line().iter().join(" "))
    }
}

/// Block index of every coordinate.
pub fn block_ids(blocks: &[usize]) -> Vec<usize> {
    blocks
        .iter()
        .enumerate()
        .flat_map(|(k, &len)| std::iter::repeat_n(k, len))
        .collect()
}

fn validate(l: &[usize], m: &[usize]) -> Result<usize> {
    if l.contains(&0) || m.contains(&0) {
        return Err(Error::InvalidShape("block sizes must be positive".into()));
    }
    let n: usize = l.iter().sum();
    if m.iter().sum::<usize>() != n || n == 0 {
        return Err(Error::InvalidShape(format!(
            "block lists {l:?} and {m:?} must partition the same n > 0"
        )));
    }
    Ok(n)
}

/// `x⁻¹(L∩B)x ⊂ B` and `x(M∩B)x⁻¹ ⊂ B`, as order conditions on roots.
fn root_condition(x: &WeylElement, l_ids: &[usize], m_ids: &[usize]) -> bool {
    let n = x.n();
    let xinv = x.inverse();
    for a in 0..n {
        for b in a + 1..n {
            if l_ids[a] == l_ids[b] && xinv.apply(a) > xinv.apply(b) {
                return false;
            }
            if m_ids[a] == m_ids[b] && x.apply(a) > x.apply(b) {
                return false;
            }
        }
    }
    true
}

/// Every block of `M` lies inside `x` of a block of `L`, i.e. `x⁻¹Mx ⊂ L`.
fn levi_condition(x: &WeylElement, l_ids: &[usize], m_ids: &[usize]) -> bool {
    let n = x.n();
    let xinv = x.inverse();
    (0..n).all(|a| {
        (a + 1..n).all(|b| m_ids[a] != m_ids[b] || l_ids[xinv.apply(a)] == l_ids[xinv.apply(b)])
    })
}

pub fn weyl_set_pq(l: &[usize], m: &[usize]) -> Result<Vec<WeylElement>> {
    let n = validate(l, m)?;
    let (lid, mid) = (block_ids(l), block_ids(m));
    Ok(WeylElement::all(n)
        .into_iter()
        .filter(|x| root_condition(x, &lid, &mid))
        .collect())
}

pub fn weyl_set_lm(l: &[usize], m: &[usize]) -> Result<Vec<WeylElement>> {
    let (lid, mid) = (block_ids(l), block_ids(m));
    Ok(weyl_set_pq(l, m)?
        .into_iter()
        .filter(|x| levi_condition(x, &lid, &mid))
        .collect())
}

/// Permutations moving whole blocks onto blocks of the same size, order
/// preserving inside each block.
pub fn block_permutation_group(blocks: &[usize]) -> Vec<WeylElement> {
    let n: usize = blocks.iter().sum();
    let starts: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, &len| {
            let s = *acc;
            *acc += len;
            Some(s)
        })
        .collect();
    let mut out: Vec<WeylElement> = (0..blocks.len())
        .permutations(blocks.len())
        .filter(|pi| pi.iter().enumerate().all(|(k, &t)| blocks[k] == blocks[t]))
        .map(|pi| {
            let mut images = vec![0; n];
            for (k, &t) in pi.iter().enumerate() {
                for off in 0..blocks[k] {
                    images[starts[k] + off] = starts[t] + off;
                }
            }
            WeylElement { images }
        })
        .collect();
    out.sort();
    out
}

/// `W(L,L)` equals the same-size block permutations.
pub fn block_permutation_check(blocks: &[usize]) -> Result<bool> {
    Ok(weyl_set_lm(blocks, blocks)? == block_permutation_group(blocks))
}

/// `x s x⁻¹ = s` for every central `s ∈ Z(L)`.
pub fn acts_trivially_on_center(x: &WeylElement, blocks: &[usize]) -> bool {
    let ids = block_ids(blocks);
    (0..blocks.len()).all(|k| {
        // s = p on block k; (x s x⁻¹) has valuation s_i at coordinate x(i)
        (0..x.n()).all(|i| (ids[i] == k) == (ids[x.apply(i)] == k))
    })
}

/// Product of the factorials of the multiplicities of each block size.
pub fn block_group_order(blocks: &[usize]) -> usize {
    blocks
        .iter()
        .counts()
        .values()
        .map(|&c| (1..=c).product::<usize>())
        .product()
}

pub fn is_group(set: &[WeylElement]) -> bool {
    let members: BTreeSet<&WeylElement> = set.iter().collect();
    !set.is_empty()
        && set.iter().all(|x| members.contains(&x.inverse()))
        && set
            .iter()
            .all(|x| set.iter().all(|y| members.contains(&x.compose(y))))
}

fn borel_part_pattern(blocks: &[usize]) -> Vec<Slot> {
    let ids = block_ids(blocks);
    let n = ids.len();
    (0..n * n)
        .map(|k| {
            let (r, c) = (k / n, k % n);
            if ids[r] == ids[c] && r <= c {
                Slot::Free
            } else {
                Slot::Zero
            }
        })
        .collect()
}

fn levi_pattern(blocks: &[usize]) -> Vec<Slot> {
    let ids = block_ids(blocks);
    let n = ids.len();
    (0..n * n)
        .map(|k| {
            if ids[k / n] == ids[k % n] {
                Slot::Free
            } else {
                Slot::Zero
            }
        })
        .collect()
}

fn upper_triangular(g: &[u64], n: usize) -> bool {
    (0..n).all(|r| (0..r).all(|c| g[r * n + c] == 0))
}

/// Brute-force `W(P,Q)` over `GL_n(F_p)`: conjugates every element of
/// `(L∩B)(F_p)` and `(M∩B)(F_p)` by permutation matrices.
pub fn weyl_set_pq_oracle(
    l: &[usize],
    m: &[usize],
    p: u64,
    budget: u128,
) -> Result<Vec<WeylElement>> {
    check_prime(p)?;
    let n = validate(l, m)?;
    let (lb, mb) = (borel_part_pattern(l), borel_part_pattern(m));
    let mut out = Vec::new();
    for x in WeylElement::all(n) {
        let xm = x.matrix_flat(p);
        let xi = x.inverse().matrix_flat(p);
        let l_ok = all_pattern_members(n, p, p, &lb, budget, |g| {
            upper_triangular(&mul_mod(&mul_mod(&xi, g, n, p), &xm, n, p), n)
        })?;
        if !l_ok {
            continue;
        }
        let m_ok = all_pattern_members(n, p, p, &mb, budget, |g| {
            upper_triangular(&mul_mod(&mul_mod(&xm, g, n, p), &xi, n, p), n)
        })?;
        if m_ok {
            out.push(x);
        }
    }
    Ok(out)
}

/// Brute-force `W(L,M)`: oracle `W(P,Q)` elements with `x⁻¹ M(F_p) x ⊂ L(F_p)`.
pub fn weyl_set_lm_oracle(
    l: &[usize],
    m: &[usize],
    p: u64,
    budget: u128,
) -> Result<Vec<WeylElement>> {
    let n = validate(l, m)?;
    let lid = block_ids(l);
    let mp = levi_pattern(m);
    let in_l = |g: &[u64]| (0..n * n).all(|k| g[k] == 0 || lid[k / n] == lid[k % n]);
    let mut out = Vec::new();
    for x in weyl_set_pq_oracle(l, m, p, budget)? {
        let xm = x.matrix_flat(p);
        let xi = x.inverse().matrix_flat(p);
        if all_pattern_members(n, p, p, &mp, budget, |g| {
            in_l(&mul_mod(&mul_mod(&xi, g, n, p), &xm, n, p))
        })? {
            out.push(x);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationPiece {
    /// One-line notation, 1-based.
    pub x: Vec<usize>,
    /// Marks the piece that is a subrepresentation (`x = 1`).
    pub sub: bool,
    /// Levi blocks of `L ∩ x⁻¹Qx`, i.e. `x⁻¹(M_k)`, as sorted 1-based coordinates.
    pub conj_shape: Vec<Vec<usize>>,
    pub piece: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationLayout {
    pub l_blocks: Vec<usize>,
    pub m_blocks: Vec<usize>,
    pub pieces: Vec<FiltrationPiece>,
}

pub fn filtration_layout(l: &[usize], m: &[usize]) -> Result<FiltrationLayout> {
    let xs = weyl_set_lm(l, m)?;
    let mid = block_ids(m);
    let pieces = xs
        .iter()
        .map(|x| {
            let xinv = x.inverse();
            let conj_shape = (0..m.len())
                .map(|k| {
                    (0..mid.len())
                        .filter(|&c| mid[c] == k)
                        .map(|c| xinv.apply(c) + 1)
                        .sorted()
                        .collect()
                })
                .collect();
            FiltrationPiece {
                x: x.one_line(),
                sub: x.is_identity(),
                conj_shape,
                piece: format!("Ind_{{L ∩ x^-1 Q x}}^L sigma^x, x = {x}"),
            }
        })
        .collect();
    Ok(FiltrationLayout {
        l_blocks: l.to_vec(),
        m_blocks: m.to_vec(),
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::DEFAULT_BUDGET;

    fn lines(xs: &[WeylElement]) -> Vec<Vec<usize>> {
        xs.iter().map(|x| x.one_line()).collect()
    }

    #[test]
    fn pq_examples() {
        assert_eq!(weyl_set_pq(&[1, 1], &[1, 1]).unwrap().len(), 2);
        assert_eq!(lines(&weyl_set_pq(&[2], &[2]).unwrap()), vec![vec![1, 2]]);
        let xs = weyl_set_pq(&[2, 1], &[1, 2]).unwrap();
        assert_eq!(
            xs,
            weyl_set_pq_oracle(&[2, 1], &[1, 2], 3, DEFAULT_BUDGET).unwrap()
        );
        // x⁻¹ = [2 3 1] carries the size-2 L block onto the size-2 M block
        assert_eq!(lines(&xs), vec![vec![1, 2, 3], vec![3, 1, 2]]);
    }

    #[test]
    fn lm_examples() {
        assert_eq!(weyl_set_lm(&[1, 1, 1], &[1, 1, 1]).unwrap().len(), 6);
        assert_eq!(
            lines(&weyl_set_lm(&[2, 1], &[2, 1]).unwrap()),
            vec![vec![1, 2, 3]]
        );
        let xs = weyl_set_lm(&[1, 1, 2], &[1, 1, 2]).unwrap();
        assert_eq!(lines(&xs), vec![vec![1, 2, 3, 4], vec![2, 1, 3, 4]]);
    }

    #[test]
    fn block_permutation_examples() {
        assert!(block_permutation_check(&[1, 1, 1]).unwrap());
        assert_eq!(block_permutation_group(&[2, 2]).len(), 2);
        assert!(block_permutation_check(&[2, 2]).unwrap());
        assert_eq!(
            block_permutation_group(&[3, 1]),
            vec![WeylElement::identity(4)]
        );
        assert!(block_permutation_check(&[3, 1]).unwrap());
        assert_eq!(block_group_order(&[1, 2, 1, 2, 1]), 12);
    }

    #[test]
    fn only_identity_fixes_center() {
        for blocks in [vec![1, 1, 1], vec![2, 2], vec![1, 2, 1], vec![1, 1, 2, 2]] {
            let w = weyl_set_lm(&blocks, &blocks).unwrap();
            assert!(is_group(&w));
            let trivial: Vec<_> = w
                .iter()
                .filter(|x| acts_trivially_on_center(x, &blocks))
                .collect();
            assert_eq!(trivial.len(), 1);
            assert!(trivial[0].is_identity());
        }
    }

    #[test]
    fn layout_examples() {
        let lay = filtration_layout(&[1, 1], &[1, 1]).unwrap();
        assert_eq!(lay.pieces.len(), 2);
        assert!(lay.pieces[0].sub && !lay.pieces[1].sub);
        assert_eq!(lay.pieces[1].conj_shape, vec![vec![2], vec![1]]);
        assert_eq!(filtration_layout(&[2, 1], &[2, 1]).unwrap().pieces.len(), 1);
        // M's torus sits inside L = GL_2, so x = 1 survives
        let lay = filtration_layout(&[2], &[1, 1]).unwrap();
        assert_eq!(lay.pieces.len(), 1);
        assert!(lay.pieces[0].sub);
        assert!(filtration_layout(&[1, 1], &[2]).unwrap().pieces.is_empty());
    }

    #[test]
    fn permutation_matrix_conjugation_is_index_relabeling() {
        let n = 3;
        let x = WeylElement::from_one_line(&[2, 3, 1]).unwrap();
        let g: Vec<u64> = (0..9).collect();
        let conj = mul_mod(
            &mul_mod(&x.inverse().matrix_flat(101), &g, n, 101),
            &x.matrix_flat(101),
            n,
            101,
        );
        for i in 0..n {
            for j in 0..n {
                assert_eq!(conj[i * n + j], g[x.apply(i) * n + x.apply(j)]);
            }
        }
    }

    #[test]
    fn rejects_mismatched_blocks() {
        assert!(weyl_set_pq(&[2], &[1, 2]).is_err());
        assert!(WeylElement::new(vec![0, 0]).is_err());
    }
}
