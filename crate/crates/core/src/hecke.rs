//! The diagonal elements `t_{w,i}`, the coset representatives of
//! `I t I / I`, the factorization `X = X′X″` and the double-coset verifier.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_iwahori_mod, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::matrix::{rational_rows_to_strings, PMatrix};
use crate::modulus::jacquet_action_exponent;
use crate::padic::{check_prime, PPowerValue};
use crate::scalar::Scalar;
use crate::shape::{BlockShape, Cell, ShapeParams};
use crate::SmallRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

/// `t_{w,D(j)}` or its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElement {
    pub shape: BlockShape,
    pub j: usize,
    pub i: usize,
    pub sign: Sign,
    /// Coordinate valuations of the diagonal (negated for `Minus`).
    pub valuations: Vec<i64>,
}

impl HeckeElement {
    pub fn matrix<T: Scalar>(&self, p: u64) -> PMatrix<T> {
        PMatrix::p_power_diagonal(&self.valuations, p)
    }
}

pub fn make_t(shape: &BlockShape, j: usize, sign: Sign) -> Result<HeckeElement> {
    let i = shape.partial_sum(j)?;
    let mut valuations = shape.t_valuations(i)?;
    if sign == Sign::Minus {
        valuations.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(HeckeElement {
        shape: shape.clone(),
        j,
        i,
        sign,
        valuations,
    })
}

/// Positions `(r, c)` of `P^u` contracted by `t`, i.e. `v_r > v_c` (0-based).
pub fn free_positions(shape: &BlockShape, vals: &[i64]) -> Vec<(usize, usize)> {
    shape
        .cells_of(Cell::Unipotent)
        .filter(|&(r, c)| vals[r] > vals[c])
        .collect()
}

#[derive(Clone, Debug)]
pub struct CosetFamily<T: Scalar> {
    pub j: usize,
    pub i: usize,
    pub free: Vec<(usize, usize)>,
    pub reps: Vec<PMatrix<T>>,
    /// `p^{i(n−i)}`.
    pub expected_count: u128,
}

/// Representatives `1 + B` with `B` supported on the contracted positions and
/// entries in `{0, …, p−1}`, in lexicographic order of the entries.
pub fn coset_reps<T: Scalar>(shape: &BlockShape, j: usize, p: u64) -> Result<CosetFamily<T>> {
    check_prime(p)?;
    let t = make_t(shape, j, Sign::Plus)?;
    let n = shape.n();
    let free = free_positions(shape, &t.valuations);
    let count = (p as u128)
        .checked_pow(free.len() as u32)
        .filter(|&c| c <= DEFAULT_BUDGET)
        .ok_or(Error::BudgetExceeded {
            candidates: u128::MAX,
            budget: DEFAULT_BUDGET,
        })?;
    let reps = (0..count as u64)
        .map(|idx| {
            let mut m = PMatrix::<T>::identity(n, p);
            let mut rest = idx;
            // last free position varies fastest
            for &(r, c) in free.iter().rev() {
                m.set(r, c, T::from_i64((rest % p) as i64));
                rest /= p;
            }
            m
        })
        .collect();
    let expected_count = (p as u128).pow((t.i * (n - t.i)) as u32);
    Ok(CosetFamily {
        j,
        i: t.i,
        free,
        reps,
        expected_count,
    })
}

/// `δ_P(t_{D(j)})^{-1}` as a `p`-power.
pub fn jacquet_action(shape: &BlockShape, j: usize) -> Result<PPowerValue> {
    Ok(PPowerValue::new(jacquet_action_exponent(shape, j)?.into()))
}

fn submatrix<T: Scalar>(x: &PMatrix<T>, rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| x.get(r, c).clone()).collect())
        .collect()
}

/// Splits `X ∈ I_{w,r}` as `X = X′·X″` with `X′` a coset representative for
/// `t = t_{w,D(j)}` and `t⁻¹ X″ t ∈ I_{w,r}`.
///
/// With `V1`/`V0` the coordinates where `t` has valuation 1/0, `B = X[V1,V0]`
/// and `D = X[V0,V0]`, the representative carries the residues of `B D⁻¹`.
pub fn iwahori_factorize<T: Scalar>(
    x: &PMatrix<T>,
    shape: &BlockShape,
    j: usize,
    r: u32,
) -> Result<(PMatrix<T>, PMatrix<T>)> {
    if !x.in_iwahori(shape, r, true) {
        return Err(Error::Precondition(
            "matrix is not in the pro-p Iwahori".into(),
        ));
    }
    let p = x.prime();
    let t = make_t(shape, j, Sign::Plus)?;
    let v1: Vec<usize> = (0..shape.n()).filter(|&k| t.valuations[k] == 1).collect();
    let v0: Vec<usize> = (0..shape.n()).filter(|&k| t.valuations[k] == 0).collect();

    let mut xp = PMatrix::<T>::identity(shape.n(), p);
    if !v0.is_empty() {
        let d = PMatrix::from_rows(submatrix(x, &v0, &v0), p)?;
        let d_inv = d
            .inverse()
            .ok_or_else(|| Error::Internal("D block is singular".into()))?;
        let b = submatrix(x, &v1, &v0);
        for (ri, &row) in v1.iter().enumerate() {
            for (ci, &col) in v0.iter().enumerate() {
                let mut acc = T::zero();
                for (k, bk) in b[ri].iter().enumerate() {
                    acc = acc + bk.clone() * d_inv.get(k, ci).clone();
                }
                let digit = acc
                    .residue(p)
                    .ok_or_else(|| Error::Internal("B D^-1 is not integral".into()))?;
                xp.set(row, col, T::from_i64(digit as i64));
            }
        }
    }
    // (V1 × V0)² = 0, so X′⁻¹ = 2 − X′
    let xp_inv = PMatrix::from_fn(shape.n(), p, |row, col| {
        if row == col {
            T::one()
        } else {
            -xp.get(row, col).clone()
        }
    });
    let xpp = &xp_inv * x;
    Ok((xp, xpp))
}

/// One failed sub-check, with the offending matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub check: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetReport {
    pub shape: ShapeParams,
    pub j: usize,
    pub i: usize,
    pub p: u64,
    pub r: u32,
    pub count: u128,
    pub expected_count: u128,
    /// Exponent of `δ_P(t)^{-1}`.
    pub delta_exponent: i64,
    pub disjoint: bool,
    pub covered: String,
    pub factorization_ok: bool,
    /// Exhaustive coverage over `I_{w,r}` mod `p^{r+1}`, when run.
    pub full_coverage: Option<String>,
    pub witnesses: Vec<Witness>,
}

impl CosetReport {
    /// Count agrees with both `p^{i(n−i)}` and `p^{exponent of δ_P(t)^{-1}}`.
    pub fn count_ok(&self) -> bool {
        self.delta_exponent >= 0
            && self.count == self.expected_count
            && self.count == (self.p as u128).pow(self.delta_exponent as u32)
    }

    fn fraction_ok(s: &str) -> bool {
        s.split_once('/').is_some_and(|(a, b)| a == b)
    }

    pub fn passed(&self) -> bool {
        self.count_ok()
            && self.disjoint
            && Self::fraction_ok(&self.covered)
            && self.factorization_ok
            && self.full_coverage.as_deref().is_none_or(Self::fraction_ok)
            && self.witnesses.is_empty()
    }
}

fn witness(check: &str, m: &PMatrix<SmallRational>) -> Witness {
    Witness {
        check: check.into(),
        matrix: rational_rows_to_strings(&m.to_big().rows()),
    }
}

/// Left multiplication by `t⁻¹`: row `r` scaled by `p^{-v_r}`.
fn left_t_inverse(m: &PMatrix<SmallRational>, vals: &[i64]) -> PMatrix<SmallRational> {
    let p = m.prime() as i128;
    PMatrix::from_fn(m.n(), m.prime(), |r, c| {
        let x = *m.get(r, c);
        if vals[r] >= 0 {
            x / Ratio::from_integer(p.pow(vals[r] as u32))
        } else {
            x * Ratio::from_integer(p.pow((-vals[r]) as u32))
        }
    })
}

/// Random element of `I_{w,r}` with integer entries.
pub fn sample_pro_p_iwahori(
    shape: &BlockShape,
    p: u64,
    r: u32,
    rng: &mut impl Rng,
) -> PMatrix<SmallRational> {
    let pr = (p as i128).pow(r);
    let spread = (p as i128).pow(r + 1);
    let n = shape.n();
    let mut m = PMatrix::identity(n, p);
    for row in 0..n {
        for col in 0..n {
            let v = match shape.cell(row, col) {
                Cell::Unipotent => rng.gen_range(0..spread),
                Cell::Diagonal => 1 + pr * rng.gen_range(0..p as i128),
                Cell::LeviOff | Cell::Opposite => pr * rng.gen_range(0..p as i128),
            };
            m.set(row, col, Ratio::from_integer(v));
        }
    }
    m
}

/// Disjointness, sampled coverage and count of `I t I = ⊔ x t I`.
pub fn verify_double_coset(
    shape: &BlockShape,
    j: usize,
    p: u64,
    r: u32,
    sample_size: usize,
    seed: u64,
) -> Result<CosetReport> {
    if r == 0 {
        return Err(Error::Precondition("level r must be at least 1".into()));
    }
    let fam = coset_reps::<SmallRational>(shape, j, p)?;
    let t = make_t(shape, j, Sign::Plus)?;
    let vals = &t.valuations;
    let t_mat: PMatrix<SmallRational> = t.matrix(p);
    let inverses: Vec<PMatrix<SmallRational>> = fam
        .reps
        .iter()
        .map(|x| {
            x.inverse()
                .expect("unipotent representatives are invertible")
        })
        .collect();
    let mut witnesses = Vec::new();

    // disjointness: t⁻¹ x⁻¹ x′ t ∉ I for x ≠ x′
    let clashes: Vec<(usize, usize)> = (0..fam.reps.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let (fam, inverses) = (&fam, &inverses);
            (0..fam.reps.len()).filter_map(move |b| {
                if a == b {
                    return None;
                }
                let z = (&inverses[a] * &fam.reps[b]).conjugate_by_p_diagonal(vals);
                z.in_iwahori(shape, r, true).then_some((a, b))
            })
        })
        .collect();
    let disjoint = clashes.is_empty();
    if let Some(&(a, b)) = clashes.first() {
        witnesses.push(witness("disjointness", &(&inverses[a] * &fam.reps[b])));
    }

    // the unique representative x with t⁻¹ x⁻¹ y ∈ I, if any
    let locate = |y: &PMatrix<SmallRational>| -> Vec<usize> {
        (0..fam.reps.len())
            .filter(|&k| left_t_inverse(&(&inverses[k] * y), vals).in_iwahori(shape, r, true))
            .collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(PMatrix<SmallRational>, PMatrix<SmallRational>)> = (0..sample_size)
        .map(|_| {
            (
                sample_pro_p_iwahori(shape, p, r, &mut rng),
                sample_pro_p_iwahori(shape, p, r, &mut rng),
            )
        })
        .collect();
    let outcomes: Vec<(bool, bool, PMatrix<SmallRational>)> = samples
        .par_iter()
        .map(|(g, h)| {
            let y = &(g * &t_mat) * h;
            let hits = locate(&y);
            let factor_ok = match iwahori_factorize(g, shape, j, r) {
                Ok((xp, xpp)) => {
                    &xp * &xpp == *g
                        && xpp.conjugate_by_p_diagonal(vals).in_iwahori(shape, r, true)
                        && hits.len() == 1
                        && fam.reps[hits[0]] == xp
                }
                Err(_) => false,
            };
            (hits.len() == 1, factor_ok, y)
        })
        .collect();
    let covered_count = outcomes.iter().filter(|o| o.0).count();
    let factorization_ok = outcomes.iter().all(|o| o.1);
    if let Some(o) = outcomes.iter().find(|o| !o.0) {
        witnesses.push(witness("coverage", &o.2));
    }
    if let Some(o) = outcomes.iter().find(|o| !o.1) {
        witnesses.push(witness("factorization", &o.2));
    }

    let full_coverage = if shape.n() == 2 && r == 1 && (p == 2 || p == 3) {
        let members = enumerate_iwahori_mod(shape, p, r, r + 1, true, DEFAULT_BUDGET)?;
        let n = shape.n();
        let mut ok = 0usize;
        for g in &members {
            let g = PMatrix::from_fn(n, p, |a, b| Ratio::from_integer(g[a * n + b] as i128));
            let y = &g * &t_mat;
            if locate(&y).len() == 1 {
                ok += 1;
            } else if witnesses.len() < 8 {
                witnesses.push(witness("full coverage", &y));
            }
        }
        Some(format!("{ok}/{}", members.len()))
    } else {
        None
    };

    Ok(CosetReport {
        shape: shape.params(),
        j,
        i: fam.i,
        p,
        r,
        count: fam.reps.len() as u128,
        expected_count: fam.expected_count,
        delta_exponent: jacquet_action_exponent(shape, j)?,
        disjoint,
        covered: format!("{covered_count}/{sample_size}"),
        factorization_ok,
        full_coverage,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = PMatrix<BigRational>;

    #[test]
    fn t_examples() {
        let s = BlockShape::from_parts(&[1, 1], &[1]).unwrap();
        assert_eq!(make_t(&s, 1, Sign::Plus).unwrap().valuations, vec![1, 0, 0]);
        assert_eq!(make_t(&s, 3, Sign::Plus).unwrap().valuations, vec![1, 1, 1]);
        let b = BlockShape::borel(1, 1);
        let m: Q = make_t(&b, 1, Sign::Minus).unwrap().matrix(5);
        assert_eq!(m.get(0, 0), &BigRational::new(1.into(), 5.into()));
        assert!(make_t(&b, 3, Sign::Plus).is_err());
    }

    #[test]
    fn rep_counts() {
        let b = BlockShape::borel(1, 1);
        assert_eq!(coset_reps::<SmallRational>(&b, 1, 3).unwrap().reps.len(), 3);
        assert_eq!(coset_reps::<SmallRational>(&b, 1, 2).unwrap().reps.len(), 2);
        let s = BlockShape::borel(1, 2);
        assert_eq!(coset_reps::<SmallRational>(&s, 1, 2).unwrap().reps.len(), 4);
    }

    #[test]
    fn factorization_examples() {
        let b = BlockShape::borel(1, 1);
        let id = Q::identity(2, 3);
        let (xp, xpp) = iwahori_factorize(&id, &b, 1, 1).unwrap();
        assert!(xp.is_identity() && xpp.is_identity());

        let x = Q::from_i64_rows(&[&[1, 1], &[0, 1]], 3).unwrap();
        let (xp, xpp) = iwahori_factorize(&x, &b, 1, 1).unwrap();
        assert_eq!(xp, x);
        assert!(xpp.is_identity());

        let x = Q::from_i64_rows(&[&[1, 4], &[0, 1]], 3).unwrap();
        let (xp, xpp) = iwahori_factorize(&x, &b, 1, 1).unwrap();
        assert_eq!(xp, Q::from_i64_rows(&[&[1, 1], &[0, 1]], 3).unwrap());
        assert_eq!(xpp, Q::from_i64_rows(&[&[1, 3], &[0, 1]], 3).unwrap());
        assert_eq!(
            xpp.conjugate_by_p_diagonal(&[1, 0]),
            Q::from_i64_rows(&[&[1, 1], &[0, 1]], 3).unwrap()
        );

        let bad = Q::from_i64_rows(&[&[1, 0], &[1, 1]], 3).unwrap();
        assert!(matches!(
            iwahori_factorize(&bad, &b, 1, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn verifier_examples() {
        let b = BlockShape::borel(1, 1);
        let rep = verify_double_coset(&b, 1, 3, 1, 100, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.count, 3);
        assert_eq!(rep.full_coverage.as_deref(), Some("243/243"));

        let s = BlockShape::from_parts(&[1, 1], &[1]).unwrap();
        let rep = verify_double_coset(&s, 1, 2, 1, 100, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.count, 4);

        let rep = verify_double_coset(&b, 1, 2, 2, 100, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.count, 2);
    }

    #[test]
    fn upper_j_uses_bottom_blocks() {
        let s = BlockShape::from_parts(&[1], &[1, 1]).unwrap();
        let fam = coset_reps::<SmallRational>(&s, 2, 2).unwrap();
        // t = diag(p, 1, p): contracted positions (1,2) and (3,2)
        assert_eq!(fam.free, vec![(0, 1), (2, 1)]);
        assert_eq!(fam.expected_count, 4);
        let rep = verify_double_coset(&s, 2, 2, 1, 50, 1).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
