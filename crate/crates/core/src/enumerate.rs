//! Brute-force enumeration of the finite reductions `H(Z/p^k)` of the
//! subgroups attached to a block shape.
//!
//! Two independent routes are used: support patterns (free/zero/one per
//! entry, then a unit-determinant filter) for `GL`, `P`, `P^u` and the Levi,
//! and filtering of every invertible residue matrix through
//! [`PMatrix::in_iwahori`] for the Iwahori kinds.

use std::collections::HashSet;
use std::io::{self, Write};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{det_nonzero_mod_prime, PMatrix};
use crate::padic::check_prime;
use crate::shape::{BlockShape, Cell};

pub const DEFAULT_BUDGET: u128 = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "GL")]
    Gl,
    P,
    #[serde(rename = "P_u")]
    PU,
    Levi,
    Iwahori0,
    Iwahori,
}

impl GroupKind {
    pub const ALL: [GroupKind; 6] = [
        GroupKind::Gl,
        GroupKind::P,
        GroupKind::PU,
        GroupKind::Levi,
        GroupKind::Iwahori0,
        GroupKind::Iwahori,
    ];
}

/// What an entry of a support pattern may be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Free,
    Zero,
    One,
}

/// Members of a finite matrix group mod `p^k`, flat row-major residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupEnum {
    pub kind: Option<GroupKind>,
    pub n: usize,
    pub prime: u64,
    pub modulus: u64,
    pub members: Vec<Vec<u64>>,
}

fn checked_pow(base: u64, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

fn guard(m: u64, free: usize, budget: u128) -> Result<u64> {
    match checked_pow(m, free) {
        Some(c) if c <= budget && c <= u64::MAX as u128 => Ok(c as u64),
        Some(c) => Err(Error::BudgetExceeded {
            candidates: c,
            budget,
        }),
        None => Err(Error::BudgetExceeded {
            candidates: u128::MAX,
            budget,
        }),
    }
}

/// Decodes candidate `index` into a matrix: free slots read base-`m` digits.
fn decode(index: u64, pattern: &[Slot], m: u64, out: &mut [u64]) {
    let mut rest = index;
    for (k, slot) in pattern.iter().enumerate() {
        out[k] = match slot {
            Slot::Zero => 0,
            Slot::One => 1 % m,
            Slot::Free => {
                let d = rest % m;
                rest /= m;
                d
            }
        };
    }
}

fn pattern_candidates(n: usize, p: u64, m: u64, pattern: &[Slot], budget: u128) -> Result<u64> {
    check_prime(p)?;
    if pattern.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "pattern of length {} for n = {n}",
            pattern.len()
        )));
    }
    guard(
        m,
        pattern.iter().filter(|s| **s == Slot::Free).count(),
        budget,
    )
}

/// Every invertible matrix mod `m = p^k` matching `pattern`.
pub fn enumerate_pattern(
    n: usize,
    p: u64,
    m: u64,
    pattern: &[Slot],
    budget: u128,
) -> Result<Vec<Vec<u64>>> {
    let total = pattern_candidates(n, p, m, pattern, budget)?;
    Ok((0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut buf = vec![0; n * n];
            decode(idx, pattern, m, &mut buf);
            det_nonzero_mod_prime(&buf, n, p).then_some(buf)
        })
        .collect())
}

/// Streams the pattern group and reports whether `pred` holds on every member,
/// stopping at the first failure.
pub fn all_pattern_members(
    n: usize,
    p: u64,
    m: u64,
    pattern: &[Slot],
    budget: u128,
    pred: impl Fn(&[u64]) -> bool + Sync,
) -> Result<bool> {
    let total = pattern_candidates(n, p, m, pattern, budget)?;
    Ok((0..total).into_par_iter().all(|idx| {
        let mut buf = vec![0; n * n];
        decode(idx, pattern, m, &mut buf);
        !det_nonzero_mod_prime(&buf, n, p) || pred(&buf)
    }))
}

/// Support pattern of a pattern-defined kind. Iwahori kinds have none.
pub fn kind_pattern(kind: GroupKind, shape: &BlockShape) -> Option<Vec<Slot>> {
    let n = shape.n();
    let slot = |r: usize, c: usize| {
        let cell = shape.cell(r, c);
        match kind {
            GroupKind::Gl => Slot::Free,
            GroupKind::P => match cell {
                Cell::Opposite => Slot::Zero,
                _ => Slot::Free,
            },
            GroupKind::PU => match cell {
                Cell::Diagonal => Slot::One,
                Cell::Unipotent => Slot::Free,
                _ => Slot::Zero,
            },
            GroupKind::Levi => {
                if cell.in_levi() {
                    Slot::Free
                } else {
                    Slot::Zero
                }
            }
            GroupKind::Iwahori0 | GroupKind::Iwahori => unreachable!(),
        }
    };
    match kind {
        GroupKind::Iwahori0 | GroupKind::Iwahori => None,
        _ => Some((0..n * n).map(|k| slot(k / n, k % n)).collect()),
    }
}

/// Reductions mod `p^k` of `I^0_{w,level}` or `I_{w,level}`, by filtering all
/// of `GL_n(Z/p^k)` through the exact membership predicate. Requires `level ≤ k`.
pub fn enumerate_iwahori_mod(
    shape: &BlockShape,
    p: u64,
    level: u32,
    k: u32,
    pro_p: bool,
    budget: u128,
) -> Result<Vec<Vec<u64>>> {
    check_prime(p)?;
    if level > k {
        return Err(Error::Precondition(format!(
            "level {level} exceeds modulus exponent {k}"
        )));
    }
    let n = shape.n();
    let m = p.pow(k);
    let total = guard(m, n * n, budget)?;
    let pattern = vec![Slot::Free; n * n];
    Ok((0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut buf = vec![0; n * n];
            decode(idx, &pattern, m, &mut buf);
            let lift = PMatrix::<Ratio<i64>>::from_fn(n, p, |r, c| {
                Ratio::from_integer(buf[r * n + c] as i64)
            });
            lift.in_iwahori(shape, level, pro_p).then_some(buf)
        })
        .collect())
}

/// Exhaustive list of `kind` reduced mod `p^r`.
pub fn enumerate(
    kind: GroupKind,
    shape: &BlockShape,
    p: u64,
    r: u32,
    budget: u128,
) -> Result<FiniteGroupEnum> {
    check_prime(p)?;
    let n = shape.n();
    let modulus = p.checked_pow(r).ok_or(Error::BudgetExceeded {
        candidates: u128::MAX,
        budget,
    })?;
    let members = match kind {
        GroupKind::Iwahori0 => enumerate_iwahori_mod(shape, p, r, r, false, budget)?,
        GroupKind::Iwahori => enumerate_iwahori_mod(shape, p, r, r, true, budget)?,
        _ => {
            let pattern = kind_pattern(kind, shape).expect("pattern kinds");
            enumerate_pattern(n, p, modulus, &pattern, budget)?
        }
    };
    Ok(FiniteGroupEnum {
        kind: Some(kind),
        n,
        prime: p,
        modulus,
        members,
    })
}

pub fn mul_mod(a: &[u64], b: &[u64], n: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for r in 0..n {
        for c in 0..n {
            let mut acc: u128 = 0;
            for k in 0..n {
                acc += a[r * n + k] as u128 * b[k * n + c] as u128;
            }
            out[r * n + c] = (acc % m as u128) as u64;
        }
    }
    out
}

fn identity_flat(n: usize, m: u64) -> Vec<u64> {
    (0..n * n).map(|k| u64::from(k / n == k % n) % m).collect()
}

impl FiniteGroupEnum {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_identity(&self) -> bool {
        let id = identity_flat(self.n, self.modulus);
        self.members.contains(&id)
    }

    /// Closure under products and inverses (inverse of `g` found as `g^{ord−1}`).
    pub fn is_closed(&self) -> bool {
        let set: HashSet<&Vec<u64>> = self.members.iter().collect();
        let (n, m) = (self.n, self.modulus);
        let products = self.members.par_iter().all(|a| {
            self.members
                .iter()
                .all(|b| set.contains(&mul_mod(a, b, n, m)))
        });
        let id = identity_flat(n, m);
        let inverses = self.members.par_iter().all(|g| {
            let mut prev = id.clone();
            let mut cur = g.clone();
            for _ in 0..=self.members.len() {
                if cur == id {
                    return set.contains(&prev);
                }
                prev = cur.clone();
                cur = mul_mod(&cur, g, n, m);
            }
            false
        });
        products && inverses
    }

    /// One member per line, entries space-separated in row-major order.
    pub fn write_lines(&self, mut w: impl Write) -> io::Result<()> {
        for g in &self.members {
            let line: Vec<String> = g.iter().map(|x| x.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// `|GL_n(Z/p^r)| = p^{(r−1)n²} ∏_{k<n} (p^n − p^k)`.
pub fn gl_order(n: usize, p: u64, r: u32) -> u128 {
    let p = p as u128;
    let pn = p.pow(n as u32);
    let base: u128 = (0..n as u32).map(|k| pn - p.pow(k)).product();
    base * p.pow((r - 1) * (n * n) as u32)
}

/// `|L(Z/p^r)|` as a product of `GL` orders over the Levi blocks.
pub fn levi_order(shape: &BlockShape, p: u64, r: u32) -> u128 {
    shape
        .coord_block_sizes()
        .iter()
        .map(|&k| gl_order(k, p, r))
        .product()
}
