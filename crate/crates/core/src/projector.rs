//! The unit-root projector `e = lim U^{n!}` of an integral matrix, realized
//! mod `p^R` through the Hensel split of its characteristic polynomial.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ModMatrix, PMatrix};
use crate::padic::{prime_power, PAdicValued};
use crate::poly::{
    charpoly, format_mod_poly, newton_polygon, poly_add, poly_mul, unit_root_count,
    unit_root_split, ModPoly, NewtonSegment,
};

pub const DEFAULT_PRECISION: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    /// `e² ≡ e`.
    pub idempotent: bool,
    /// `eU ≡ Ue`.
    pub commutes: bool,
    /// `f0·fplus ≡ f`, `fplus ≡ X^m (mod p)`, `f0(0)` a unit.
    pub hensel: bool,
    /// `a·f0 + b·fplus ≡ 1`.
    pub bezout: bool,
    /// `rank_p(e) = deg f0 =` slope-0 length.
    pub rank: bool,
}

impl Certificates {
    pub fn all(&self) -> bool {
        self.idempotent && self.commutes && self.hensel && self.bezout && self.rank
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitProjector {
    pub prime: u64,
    pub precision: u32,
    pub e: ModMatrix,
    pub rank: usize,
    pub f0: ModPoly,
    pub fplus: ModPoly,
    pub bezout_a: ModPoly,
    pub bezout_b: ModPoly,
    pub newton: Vec<NewtonSegment>,
    pub certificates: Certificates,
}

/// JSON view of a projector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectorReport {
    pub p: u64,
    pub precision: u32,
    pub modulus: String,
    pub rank: usize,
    pub e: Vec<Vec<String>>,
    pub newton_polygon: Vec<NewtonSegment>,
    pub f0: Vec<String>,
    pub fplus: Vec<String>,
    pub certificates: Certificates,
}

impl UnitProjector {
    pub fn report(&self) -> ProjectorReport {
        ProjectorReport {
            p: self.prime,
            precision: self.precision,
            modulus: self.e.modulus().to_string(),
            rank: self.rank,
            e: self.e.to_strings(),
            newton_polygon: self.newton.clone(),
            f0: format_mod_poly(&self.f0),
            fplus: format_mod_poly(&self.fplus),
            certificates: self.certificates,
        }
    }
}

/// `Σ c_k U^k` mod `m` by Horner's rule.
pub fn eval_poly_matrix(c: &[BigInt], u: &ModMatrix) -> ModMatrix {
    let m = u.modulus().clone();
    let mut acc = ModMatrix::zero(u.n(), m.clone());
    let id = ModMatrix::identity(u.n(), m);
    for ck in c.iter().rev() {
        acc = acc.mul(u).add(&id.scale(ck));
    }
    acc
}

pub fn ordinary_projector(u: &PMatrix<BigRational>, precision: u32) -> Result<UnitProjector> {
    if let Some(x) = u.entries().iter().find(|x| !x.is_p_integral(u.prime())) {
        return Err(Error::NotIntegral(x.to_string()));
    }
    let p = u.prime();
    let f = charpoly(u);
    let newton = newton_polygon(&f)?;
    let split = unit_root_split(&f, precision)?;
    let (e_poly, a, b) = split.idempotent()?;
    let m = split.modulus();
    let um = u.reduce_mod(precision)?;
    let e = eval_poly_matrix(&e_poly, &um);
    let rank = e.rank_mod(p);

    let bezout = poly_add(
        &poly_mul(&a, &split.f0, &m),
        &poly_mul(&b, &split.fplus, &m),
        &m,
    ) == vec![BigInt::from(1)];
    let certificates = Certificates {
        idempotent: e.mul(&e) == e,
        commutes: e.mul(&um) == um.mul(&e),
        hensel: split.certificate_holds(),
        bezout,
        rank: rank == split.unit_degree() && rank == unit_root_count(&newton),
    };
    Ok(UnitProjector {
        prime: p,
        precision,
        e,
        rank,
        f0: split.f0,
        fplus: split.fplus,
        bezout_a: a,
        bezout_b: b,
        newton,
        certificates,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    /// `(1−e)V ≡ 0`, `eV ≡ Ve` and `V` invertible on the image of `e`.
    Holds,
    /// `(1−e)V ≢ 0`: `N!` is too small for the requested precision.
    Inconclusive,
    /// Nilpotent side vanished but commutation or invertibility fails.
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub status: ConvergenceStatus,
    /// `U^{N!} ≡ e` outright.
    pub limit_reached: bool,
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
}

/// Compares `V = U^{N!}` with `e` mod `p^{r_check}`.
pub fn check_limit_convergence(
    u: &PMatrix<BigRational>,
    e: &UnitProjector,
    n: u32,
    r_check: u32,
) -> Result<ConvergenceReport> {
    if r_check > e.precision || r_check == 0 {
        return Err(Error::Precondition(format!(
            "check precision {r_check} must lie in 1..={}",
            e.precision
        )));
    }
    let m = prime_power(e.prime, r_check);
    let v = u.reduce_mod(r_check)?.pow(&factorial(n));
    let er = e.e.reduce(&m);
    let one_minus = ModMatrix::identity(u.n(), m.clone()).sub(&er);
    let ev = er.mul(&v);
    let status = if !one_minus.mul(&v).is_zero() {
        ConvergenceStatus::Inconclusive
    } else if ev == v.mul(&er) && ev.rank_mod(e.prime) == er.rank_mod(e.prime) {
        ConvergenceStatus::Holds
    } else {
        ConvergenceStatus::Violated
    };
    Ok(ConvergenceReport {
        status,
        limit_reached: v == er,
    })
}

/// The projector of `Uᵀ` is the transpose of the projector of `U`.
pub fn dual_projector_check(u: &PMatrix<BigRational>, precision: u32) -> Result<bool> {
    let e = ordinary_projector(u, precision)?;
    let et = ordinary_projector(&u.transpose(), precision)?;
    Ok(et.e == e.e.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = PMatrix<BigRational>;

    fn strings(m: &ModMatrix) -> Vec<Vec<String>> {
        m.to_strings()
    }

    #[test]
    fn diagonal_examples() {
        let e = ordinary_projector(&Q::from_i64_rows(&[&[1, 0], &[0, 3]], 3).unwrap(), 8).unwrap();
        assert_eq!(e.rank, 1);
        assert_eq!(strings(&e.e), vec![vec!["1", "0"], vec!["0", "0"]]);
        assert!(e.certificates.all());

        let e = ordinary_projector(&Q::from_i64_rows(&[&[3, 0], &[0, 3]], 3).unwrap(), 8).unwrap();
        assert_eq!(e.rank, 0);
        assert!(e.e.is_zero());
    }

    #[test]
    fn triangular_example() {
        let u = Q::from_i64_rows(&[&[1, 1], &[0, 3]], 3).unwrap();
        let e = ordinary_projector(&u, 3).unwrap();
        assert_eq!(strings(&e.e), vec![vec!["1", "13"], vec!["0", "0"]]);
        assert_eq!(e.rank, 1);
        assert!(e.certificates.all());
        assert!(dual_projector_check(&u, 3).unwrap());
    }

    #[test]
    fn convergence_examples() {
        let u = Q::from_i64_rows(&[&[1, 0], &[0, 2]], 2).unwrap();
        let e = ordinary_projector(&u, 8).unwrap();
        let r = check_limit_convergence(&u, &e, 4, 3).unwrap();
        assert_eq!(r.status, ConvergenceStatus::Holds);
        assert!(r.limit_reached);

        let u = Q::from_i64_rows(&[&[1, 1], &[0, 3]], 3).unwrap();
        let e = ordinary_projector(&u, 3).unwrap();
        assert_eq!(
            check_limit_convergence(&u, &e, 6, 3).unwrap().status,
            ConvergenceStatus::Holds
        );

        // 2 has order 20 mod 25, so 2^24 ≢ 1 and the limit is not reached
        let u = Q::from_i64_rows(&[&[2, 0], &[0, 5]], 5).unwrap();
        let e = ordinary_projector(&u, 4).unwrap();
        let r = check_limit_convergence(&u, &e, 4, 2).unwrap();
        assert_eq!(r.status, ConvergenceStatus::Holds);
        assert!(!r.limit_reached);

        // N! = 1 leaves the nilpotent side alive
        let r = check_limit_convergence(&u, &e, 1, 2).unwrap();
        assert_eq!(r.status, ConvergenceStatus::Inconclusive);
        assert!(check_limit_convergence(&u, &e, 4, 9).is_err());
    }

    #[test]
    fn non_integral_rejected() {
        let u = Q::from_rows(
            vec![
                vec![
                    BigRational::new(1.into(), 3.into()),
                    BigRational::from_integer(0.into()),
                ],
                vec![
                    BigRational::from_integer(0.into()),
                    BigRational::from_integer(1.into()),
                ],
            ],
            3,
        )
        .unwrap();
        assert!(matches!(
            ordinary_projector(&u, 4),
            Err(Error::NotIntegral(_))
        ));
    }

    #[test]
    fn report_serializes() {
        let u = Q::from_i64_rows(&[&[1, 1], &[0, 3]], 3).unwrap();
        let rep = ordinary_projector(&u, 3).unwrap().report();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains(r#""e":[["1","13"],["0","0"]]"#), "{json}");
        assert!(json.contains(
            r#""newton_polygon":[{"slope":"0","multiplicity":1},{"slope":"1","multiplicity":1}]"#
        ));
    }
}
