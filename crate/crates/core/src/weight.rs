//! Weights `κ = (κ_0, (κ_σ)_σ)` with the partner involution `σ ↔ σc`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::BlockShape;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaWeight {
    pub label: String,
    /// `κ_σ ∈ Z^{b_σ}`.
    pub vec: Vec<i64>,
    pub partner: String,
    /// Whether `σ` induces the place `w` under study. Inferred when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_place: Option<bool>,
}

impl SigmaWeight {
    pub fn new(label: &str, vec: Vec<i64>, partner: &str) -> Self {
        Self {
            label: label.into(),
            vec,
            partner: partner.into(),
            at_place: None,
        }
    }

    pub fn b(&self) -> usize {
        self.vec.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightChar {
    pub kappa0: i64,
    #[serde(default)]
    pub sigmas: Vec<SigmaWeight>,
}

impl WeightChar {
    pub fn new(kappa0: i64, sigmas: Vec<SigmaWeight>) -> Self {
        Self { kappa0, sigmas }
    }

    /// Unique labels, every partner present, `σcc = σ` and `σc ≠ σ`.
    pub fn validate(&self) -> Result<()> {
        let mut index = BTreeMap::new();
        for (k, s) in self.sigmas.iter().enumerate() {
            if index.insert(s.label.as_str(), k).is_some() {
                return Err(Error::MalformedWeight(format!(
                    "duplicate label {}",
                    s.label
                )));
            }
        }
        for s in &self.sigmas {
            let c = self.partner_of(s)?;
            if c.label == s.label {
                return Err(Error::MalformedWeight(format!(
                    "{} is its own partner",
                    s.label
                )));
            }
            if c.partner != s.label {
                return Err(Error::MalformedWeight(format!(
                    "partner map is not an involution at {}",
                    s.label
                )));
            }
            if s.at_place == Some(true) && c.at_place == Some(true) {
                return Err(Error::MalformedWeight(format!(
                    "{} and {} cannot both induce the place",
                    s.label, c.label
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&SigmaWeight> {
        self.sigmas.iter().find(|s| s.label == label)
    }

    pub fn partner_of(&self, s: &SigmaWeight) -> Result<&SigmaWeight> {
        self.get(&s.partner).ok_or_else(|| {
            Error::MalformedWeight(format!("partner {} of {} is missing", s.partner, s.label))
        })
    }

    /// `a_σ = b_{σc}`.
    pub fn a(&self, s: &SigmaWeight) -> Result<usize> {
        Ok(self.partner_of(s)?.b())
    }

    /// Each `κ_σ` weakly decreasing.
    pub fn check_dominant(&self) -> bool {
        self.sigmas
            .iter()
            .all(|s| s.vec.windows(2).all(|w| w[0] >= w[1]))
    }

    /// `κ_{σ,j} ↦ κ_{σ,j} − b_σ`.
    pub fn normalize(&self) -> WeightChar {
        WeightChar {
            kappa0: self.kappa0,
            sigmas: self
                .sigmas
                .iter()
                .map(|s| SigmaWeight {
                    vec: s.vec.iter().map(|k| k - s.b() as i64).collect(),
                    ..s.clone()
                })
                .collect(),
        }
    }

    /// `a(κ) = 2κ_0 + Σ_σ Σ_j κ_{σ,j}`.
    pub fn a_kappa(&self) -> i64 {
        2 * self.kappa0 + self.sigmas.iter().flat_map(|s| s.vec.iter()).sum::<i64>()
    }

    /// `κ♭`: the vector at `σ` becomes the old `κ_{σc}`.
    pub fn flip(&self) -> Result<WeightChar> {
        let sigmas = self
            .sigmas
            .iter()
            .map(|s| {
                Ok(SigmaWeight {
                    vec: self.partner_of(s)?.vec.clone(),
                    ..s.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightChar {
            kappa0: self.kappa0,
            sigmas,
        })
    }

    /// `κ_{σ,b_σ} + κ_{σc,a_σ} ≥ n` for every `σ`; vacuous when either vector is empty.
    pub fn check_inequality(&self, n: usize) -> Result<bool> {
        for s in &self.sigmas {
            let c = self.partner_of(s)?;
            if let (Some(x), Some(y)) = (s.vec.last(), c.vec.last()) {
                if x + y < n as i64 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Embeddings inducing the place of signature `(a, b) = (a_σ, b_σ)`.
    ///
    /// An explicit `at_place` wins. Otherwise `σ` is at the place when
    /// `(len κ_{σc}, len κ_σ) = (a, b)`; for `a = b` the first of each pair is taken.
    pub fn at_place(&self, shape: &BlockShape) -> Result<Vec<&SigmaWeight>> {
        self.validate()?;
        let mut out = Vec::new();
        for (k, s) in self.sigmas.iter().enumerate() {
            let c = self.partner_of(s)?;
            let fits = s.b() == shape.b() && c.b() == shape.a();
            let chosen = match (s.at_place, c.at_place) {
                (Some(v), _) => v,
                (None, Some(v)) => !v,
                (None, None) => {
                    let partner_fits = c.b() == shape.b() && s.b() == shape.a();
                    let partner_first = self
                        .sigmas
                        .iter()
                        .position(|x| x.label == c.label)
                        .expect("validated")
                        < k;
                    fits && !(partner_fits && partner_first)
                }
            };
            if chosen {
                if !fits {
                    return Err(Error::MalformedWeight(format!(
                        "{} has (a, b) = ({}, {}), expected ({}, {})",
                        s.label,
                        c.b(),
                        s.b(),
                        shape.a(),
                        shape.b()
                    )));
                }
                out.push(s);
            }
        }
        Ok(out)
    }
}
