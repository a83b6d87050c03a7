//! The modulus character `δ_P` on diagonal `p`-power elements.
//!
//! Exponents are reported in the `δ = p^e` convention, so `δ_P(diag(p,1)) = p^{-1}`
//! for the Borel of `GL_2`.

use crate::error::Result;
use crate::shape::{BlockShape, Cell};

/// `e` with `δ_P(diag(p^{v})) = p^e`, summed over the unipotent radical:
/// `e = Σ_{(r,c) ∈ P^u} (v_c − v_r)`.
pub fn delta_exponent(shape: &BlockShape, coords: &[i64]) -> i64 {
    shape
        .cells_of(Cell::Unipotent)
        .map(|(r, c)| coords[c] - coords[r])
        .sum()
}

/// Closed form for a standard parabolic with block sizes `sizes` and central
/// valuations `vals`: `e = −Σ_j n_j v_j (Σ_{i>j} n_i − Σ_{i<j} n_i)`.
pub fn delta_exponent_standard(sizes: &[usize], vals: &[i64]) -> i64 {
    let total: i64 = sizes.iter().map(|&k| k as i64).sum();
    let mut before = 0i64;
    let mut e = 0i64;
    for (&nj, &vj) in sizes.iter().zip(vals) {
        let nj = nj as i64;
        let after = total - before - nj;
        e -= nj * vj * (after - before);
        before += nj;
    }
    e
}

/// `δ_P` exponent at the central element with Hecke-order block valuations `v`.
pub fn delta_exponent_central(shape: &BlockShape, tilde_vals: &[i64]) -> Result<i64> {
    Ok(delta_exponent(shape, &shape.coords_from_tilde(tilde_vals)?))
}

/// Exponent of `δ_P(s_j)^{-1}`, the scalar by which the unnormalized Hecke
/// operator acts on Jacquet-level invariants.
pub fn jacquet_action_exponent(shape: &BlockShape, j: usize) -> Result<i64> {
    Ok(-delta_exponent(shape, &shape.s_valuations(j)?))
}
