//! The valuation test for `P`-ordinarity.
//!
//! Every character involved is evaluated on central `p`-power elements of the
//! Levi and recorded by its exponent functional on coordinate valuations:
//!
//! * `κ′ = (κ_norm)_p`: coordinate `k ≤ a` carries `f·Σ_{σ at w} κ′_{σc,k}`;
//!   bottom coordinate `a + m` carries `−f·Σ_{σ at w} κ′_{σ,m}`, the `w̄`
//!   factor entering through the inverse transpose;
//! * `δ_P`: `Σ_{(r,c) ∈ P^u} (v_c − v_r)`;
//! * `ω`: one exponent per Hecke-order block.
//!
//! `v(β_x(s)) = v(κ′(s)) − ½·e(δ_P(s)) + ω(x s x⁻¹)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{check_prime, exponent_list, Exponent};
use crate::shape::{BlockShape, Cell, ShapeParams};
use crate::weight::WeightChar;
use crate::weyl::{weyl_set_lm, WeylElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralCharacter {
    /// Exponent of `ω` on `p·1` of each block, in Hecke order.
    #[serde(with = "exponent_list")]
    pub block_exponents: Vec<Exponent>,
    /// Opaque unit parts; never enter the valuation arithmetic.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unit_labels: Vec<String>,
}

impl CentralCharacter {
    pub fn new(block_exponents: Vec<Exponent>) -> Self {
        Self {
            block_exponents,
            unit_labels: Vec::new(),
        }
    }

    pub fn trivial(blocks: usize) -> Self {
        Self::new(vec![Exponent::from_integer(0); blocks])
    }
}

/// Per-coordinate coefficients of `v(κ′(·))`.
pub fn kappa_prime_coefficients(
    shape: &BlockShape,
    kappa: &WeightChar,
    f_inertia: u32,
) -> Result<Vec<Exponent>> {
    let norm = kappa.normalize();
    let (a, n) = (shape.a(), shape.n());
    let f = f_inertia as i64;
    let mut coeffs = vec![0i64; n];
    for s in norm.at_place(shape)? {
        let c = norm.partner_of(s)?;
        for (coeff, k) in coeffs.iter_mut().zip(&c.vec) {
            *coeff += f * k;
        }
        for m in 0..shape.b() {
            coeffs[a + m] -= f * s.vec[m];
        }
    }
    Ok(coeffs.into_iter().map(Exponent::from_integer).collect())
}

/// Per-coordinate coefficients of the `δ_P` exponent.
pub fn delta_coefficients(shape: &BlockShape) -> Vec<Exponent> {
    let mut coeffs = vec![0i64; shape.n()];
    for (r, c) in shape.cells_of(Cell::Unipotent) {
        coeffs[c] += 1;
        coeffs[r] -= 1;
    }
    coeffs.into_iter().map(Exponent::from_integer).collect()
}

/// Coefficients of `θ = |κ′|⁻¹ δ_P^{-1/2}` in valuation form.
pub fn theta_coefficients(
    shape: &BlockShape,
    kappa: &WeightChar,
    f_inertia: u32,
) -> Result<Vec<Exponent>> {
    let half = Exponent::new(1, 2);
    Ok(kappa_prime_coefficients(shape, kappa, f_inertia)?
        .into_iter()
        .zip(delta_coefficients(shape))
        .map(|(k, d)| k - d * half)
        .collect())
}

fn pair(coeffs: &[Exponent], vals: &[i64]) -> Exponent {
    coeffs.iter().zip(vals).map(|(c, &v)| c * v).sum()
}

/// Coordinate valuations of `x s x⁻¹`.
fn conjugate_coords(x: &WeylElement, coords: &[i64]) -> Vec<i64> {
    let mut out = vec![0; coords.len()];
    for (i, &v) in coords.iter().enumerate() {
        out[x.apply(i)] = v;
    }
    out
}

fn omega_at(shape: &BlockShape, omega: &CentralCharacter, coords: &[i64]) -> Result<Exponent> {
    let blocks = shape.tilde_block_valuations(coords)?;
    Ok(pair(&omega.block_exponents, &blocks))
}

/// `W(L,L)` for the Levi of `shape`, blocks in coordinate order.
pub fn levi_weyl_group(shape: &BlockShape) -> Result<Vec<WeylElement>> {
    let sizes = shape.coord_block_sizes();
    weyl_set_lm(&sizes, &sizes)
}

/// `θ(x s x⁻¹) ≠ θ(s)` for some central `s`, for every `x ≠ 1` in `W(L,L)`.
pub fn theta_regular(shape: &BlockShape, kappa: &WeightChar, f_inertia: u32) -> Result<bool> {
    let theta = theta_coefficients(shape, kappa, f_inertia)?;
    let basis: Vec<Vec<i64>> = (0..shape.r_blocks())
        .map(|k| {
            let v: Vec<i64> = (0..shape.r_blocks()).map(|t| i64::from(t == k)).collect();
            shape.coords_from_tilde(&v)
        })
        .collect::<Result<_>>()?;
    Ok(levi_weyl_group(shape)?
        .iter()
        .filter(|x| !x.is_identity())
        .all(|x| {
            basis
                .iter()
                .any(|s| pair(&theta, &conjugate_coords(x, s)) != pair(&theta, s))
        }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaRow {
    /// One-line notation of `x`, 1-based.
    pub x: Vec<usize>,
    /// `v(β_x(s_j))` for `j = 1..r`.
    #[serde(with = "exponent_list")]
    pub valuations: Vec<Exponent>,
}

impl BetaRow {
    pub fn all_zero(&self) -> bool {
        self.valuations
            .iter()
            .all(|v| *v == Exponent::from_integer(0))
    }
}

pub fn beta_valuation_table(
    shape: &BlockShape,
    kappa: &WeightChar,
    omega: &CentralCharacter,
    f_inertia: u32,
) -> Result<Vec<BetaRow>> {
    if omega.block_exponents.len() != shape.r_blocks() {
        return Err(Error::DimensionMismatch(format!(
            "central character has {} block exponents, shape has {} blocks",
            omega.block_exponents.len(),
            shape.r_blocks()
        )));
    }
    let theta = theta_coefficients(shape, kappa, f_inertia)?;
    let s: Vec<Vec<i64>> = (1..=shape.r_blocks())
        .map(|j| shape.s_valuations(j))
        .collect::<Result<_>>()?;
    levi_weyl_group(shape)?
        .iter()
        .map(|x| {
            let valuations = s
                .iter()
                .map(|sj| Ok(pair(&theta, sj) + omega_at(shape, omega, &conjugate_coords(x, sj))?))
                .collect::<Result<Vec<_>>>()?;
            Ok(BetaRow {
                x: x.one_line(),
                valuations,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "P-ordinary-criterion-met")]
    Met,
    #[serde(rename = "not-met")]
    NotMet,
}

/// Status of the uniqueness claim for the unit row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShadowStatus {
    /// The `x = 1` row is not all-zero; nothing to check.
    NotApplicable,
    /// `x = 1` is the only all-zero row.
    Unique,
    /// Inequality holds yet another row is all-zero.
    Counterexample,
    /// Another row is all-zero, but the weight violates the inequality.
    HypothesisViolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinarityReport {
    pub shape: ShapeParams,
    pub weight: WeightChar,
    pub f_inertia: u32,
    pub inequality_ok: bool,
    pub theta_regular: bool,
    pub beta_table: Vec<BetaRow>,
    pub unit_rows: Vec<Vec<usize>>,
    pub verdict: Verdict,
    pub shadow: ShadowStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn ordinarity_verdict(
    shape: &BlockShape,
    kappa: &WeightChar,
    omega: &CentralCharacter,
    f_inertia: u32,
) -> Result<OrdinarityReport> {
    kappa.validate()?;
    if !kappa.check_dominant() {
        return Err(Error::NotDominant(
            "every κ_σ must be weakly decreasing".into(),
        ));
    }
    if f_inertia == 0 {
        return Err(Error::Precondition(
            "inertia degree must be positive".into(),
        ));
    }
    let inequality_ok = kappa.check_inequality(shape.n())?;
    let beta_table = beta_valuation_table(shape, kappa, omega, f_inertia)?;
    let unit_rows: Vec<Vec<usize>> = beta_table
        .iter()
        .filter(|r| r.all_zero())
        .map(|r| r.x.clone())
        .collect();
    let identity = WeylElement::identity(shape.n()).one_line();
    let met = unit_rows.contains(&identity);
    let shadow = match (met, unit_rows.len() > 1, inequality_ok) {
        (false, _, _) => ShadowStatus::NotApplicable,
        (true, false, _) => ShadowStatus::Unique,
        (true, true, true) => ShadowStatus::Counterexample,
        (true, true, false) => ShadowStatus::HypothesisViolated,
    };
    let mut notes = Vec::new();
    if f_inertia > 1 {
        notes.push(format!(
            "inertia degree {f_inertia} > 1: κ′ valuations scaled by f, normalization unconfirmed"
        ));
    }
    Ok(OrdinarityReport {
        shape: shape.params(),
        weight: kappa.clone(),
        f_inertia,
        inequality_ok,
        theta_regular: theta_regular(shape, kappa, f_inertia)?,
        beta_table,
        unit_rows,
        verdict: if met { Verdict::Met } else { Verdict::NotMet },
        shadow,
        notes,
    })
}

/// Input file of the `ordinarity` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinarityConfig {
    pub p: u64,
    #[serde(default = "default_inertia")]
    pub f_inertia: u32,
    pub shape: ShapeParams,
    pub kappa: WeightChar,
    pub omega: CentralCharacter,
}

fn default_inertia() -> u32 {
    1
}

impl OrdinarityConfig {
    pub fn run(&self) -> Result<OrdinarityReport> {
        check_prime(self.p)?;
        let shape = BlockShape::try_from(self.shape.clone())?;
        ordinarity_verdict(&shape, &self.kappa, &self.omega, self.f_inertia)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::SigmaWeight;

    fn gl2_weight(top: i64, bot: i64) -> WeightChar {
        WeightChar::new(
            0,
            vec![
                SigmaWeight::new("s", vec![bot], "sc"),
                SigmaWeight::new("sc", vec![top], "s"),
            ],
        )
    }

    fn e(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    #[test]
    fn met_instance() {
        let shape = BlockShape::borel(1, 1);
        // κ_σ = κ_σc = (1): κ′ = 0
        let k = gl2_weight(1, 1);
        let omega = CentralCharacter::new(vec![e(-1, 2), e(1, 2)]);
        let rep = ordinarity_verdict(&shape, &k, &omega, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Met);
        assert_eq!(rep.beta_table[0].valuations, vec![e(0, 1), e(0, 1)]);
        assert!(!rep.beta_table[1].all_zero());
        assert_eq!(rep.shadow, ShadowStatus::Unique);
        assert!(rep.inequality_ok && rep.theta_regular);
    }

    #[test]
    fn trivial_omega_is_not_met() {
        let shape = BlockShape::borel(1, 1);
        let rep = ordinarity_verdict(&shape, &gl2_weight(1, 1), &CentralCharacter::trivial(2), 1)
            .unwrap();
        assert_eq!(rep.verdict, Verdict::NotMet);
        // only −½·δ survives: δ(s_1) = p^{-1}
        assert_eq!(rep.beta_table[0].valuations, vec![e(1, 2), e(0, 1)]);
        assert_eq!(rep.shadow, ShadowStatus::NotApplicable);
    }

    #[test]
    fn single_row_for_rigid_levi() {
        let shape = BlockShape::standard(&[2, 1]).unwrap();
        let k = WeightChar::new(
            0,
            vec![
                SigmaWeight::new("s", vec![], "sc"),
                SigmaWeight::new("sc", vec![3, 3, 3], "s"),
            ],
        );
        let rep = ordinarity_verdict(&shape, &k, &CentralCharacter::trivial(2), 1).unwrap();
        assert_eq!(rep.beta_table.len(), 1);
        assert!(rep.theta_regular);
    }

    #[test]
    fn inequality_failure_allows_two_unit_rows() {
        let shape = BlockShape::borel(1, 1);
        // κ_σ = (1), κ_σc = (0): θ has equal block exponents
        let k = gl2_weight(0, 1);
        assert!(!k.check_inequality(2).unwrap());
        assert!(!theta_regular(&shape, &k, 1).unwrap());
        let theta = theta_coefficients(&shape, &k, 1).unwrap();
        // ω = −θ on blocks (Hecke order equals coordinate order here)
        let omega = CentralCharacter::new(theta.iter().map(|t| -t).collect());
        let rep = ordinarity_verdict(&shape, &k, &omega, 1).unwrap();
        assert_eq!(rep.unit_rows.len(), 2);
        assert_eq!(rep.shadow, ShadowStatus::HypothesisViolated);
    }

    #[test]
    fn strict_inequality_gives_regular_theta() {
        let shape = BlockShape::borel(1, 1);
        assert!(theta_regular(&shape, &gl2_weight(3, 2), 1).unwrap());
    }

    #[test]
    fn non_dominant_rejected() {
        let shape = BlockShape::borel(0, 2);
        let k = WeightChar::new(
            0,
            vec![
                SigmaWeight::new("s", vec![1, 2], "sc"),
                SigmaWeight::new("sc", vec![], "s"),
            ],
        );
        let err = ordinarity_verdict(&shape, &k, &CentralCharacter::trivial(2), 1).unwrap_err();
        assert!(matches!(err, Error::NotDominant(_)));
    }

    #[test]
    fn omega_size_checked() {
        let shape = BlockShape::borel(1, 1);
        let err = beta_valuation_table(&shape, &gl2_weight(1, 1), &CentralCharacter::trivial(3), 1)
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn config_round_trip() {
        let cfg = OrdinarityConfig {
            p: 5,
            f_inertia: 1,
            shape: BlockShape::borel(1, 1).params(),
            kappa: gl2_weight(1, 1),
            omega: CentralCharacter::new(vec![e(-1, 2), e(1, 2)]),
        };
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(
            serde_json::from_str::<OrdinarityConfig>(&json).unwrap(),
            cfg
        );
        assert_eq!(cfg.run().unwrap().verdict, Verdict::Met);
        let ints = r#"{"p":5,"shape":{"a":1,"b":1,"d_top":[1],"d_bot":[1]},
            "kappa":{"kappa0":0,"sigmas":[{"label":"s","vec":[1],"partner":"sc"},{"label":"sc","vec":[1],"partner":"s"}]},
            "omega":{"block_exponents":[0,0]}}"#;
        let cfg: OrdinarityConfig = serde_json::from_str(ints).unwrap();
        assert_eq!(cfg.f_inertia, 1);
        assert_eq!(cfg.run().unwrap().verdict, Verdict::NotMet);
    }
}
