//! Block shapes of the parabolic `P_w ⊂ GL_n`.
//!
//! A shape is fixed by the signature `(a, b)`, a composition `d_top` of `a`
//! for the upper-left standard parabolic and a composition `d_bot` of `b` for
//! the lower-right *opposite* parabolic. Two block orders coexist:
//!
//! * coordinate order: `d_top` parts then `d_bot` parts, top to bottom;
//! * Hecke order (`tilde`): `d_top` parts then `d_bot` parts **reversed**.
//!
//! The element `t_{D(j)}` puts `p` on the first `j` Hecke-order blocks, which
//! for `j > len(d_top)` are the *bottom* coordinate blocks.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered composition of a non-negative integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Parts must be positive and sum to `total`. The empty partition is only
    /// accepted for `total == 0`.
    pub fn new(parts: Vec<usize>, total: usize) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidShape(format!("zero part in {parts:?}")));
        }
        let sum: usize = parts.iter().sum();
        if sum != total {
            return Err(Error::InvalidShape(format!(
                "parts {parts:?} sum to {sum}, expected {total}"
            )));
        }
        Ok(Self { parts })
    }

    pub fn trivial(total: usize) -> Self {
        Self {
            parts: vec![1; total],
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// All compositions of `total`, in lexicographic order.
    pub fn compositions(total: usize) -> Vec<Partition> {
        fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for k in 1..=rest {
                cur.push(k);
                rec(rest - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(total, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Role of a matrix position relative to `P_w = L_w ⋉ P_w^u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    /// Diagonal entry (inside the Levi).
    Diagonal,
    /// Off-diagonal entry of a Levi block.
    LeviOff,
    /// Free coordinate of the unipotent radical `P^u`.
    Unipotent,
    /// Coordinate of the opposite unipotent radical.
    Opposite,
}

impl Cell {
    pub fn in_levi(self) -> bool {
        matches!(self, Cell::Diagonal | Cell::LeviOff)
    }
}

/// Set of 1-based `(row, col)` positions.
pub type PositionSet = BTreeSet<(usize, usize)>;

/// Serialized form: only the defining data, everything else is derived.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub a: usize,
    pub b: usize,
    pub d_top: Vec<usize>,
    pub d_bot: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ShapeParams", into = "ShapeParams")]
pub struct BlockShape {
    n: usize,
    a: usize,
    b: usize,
    d_top: Partition,
    d_bot: Partition,
    tilde: Partition,
    /// Coordinate ranges (0-based) of the Levi blocks, in coordinate order.
    coord_blocks: Vec<Range<usize>>,
    /// Coordinate block index of each coordinate.
    block_of: Vec<usize>,
}

impl TryFrom<ShapeParams> for BlockShape {
    type Error = Error;

    fn try_from(s: ShapeParams) -> Result<Self> {
        make_block_shape(
            s.a,
            s.b,
            Partition::new(s.d_top, s.a)?,
            Partition::new(s.d_bot, s.b)?,
        )
    }
}

impl From<BlockShape> for ShapeParams {
    fn from(s: BlockShape) -> Self {
        ShapeParams {
            a: s.a,
            b: s.b,
            d_top: s.d_top.parts,
            d_bot: s.d_bot.parts,
        }
    }
}

pub fn make_block_shape(
    a: usize,
    b: usize,
    d_top: Partition,
    d_bot: Partition,
) -> Result<BlockShape> {
    if d_top.total() != a {
        return Err(Error::InvalidShape(format!(
            "d_top {d_top} does not sum to a = {a}"
        )));
    }
    if d_bot.total() != b {
        return Err(Error::InvalidShape(format!(
            "d_bot {d_bot} does not sum to b = {b}"
        )));
    }
    let n = a + b;
    if n == 0 {
        return Err(Error::InvalidShape("n = a + b must be positive".into()));
    }
    let tilde_parts: Vec<usize> = d_top
        .parts()
        .iter()
        .chain(d_bot.parts().iter().rev())
        .copied()
        .collect();
    let tilde = Partition::new(tilde_parts, n)?;

    let mut coord_blocks = Vec::new();
    let mut block_of = Vec::with_capacity(n);
    let mut start = 0;
    for (k, &len) in d_top.parts().iter().chain(d_bot.parts()).enumerate() {
        coord_blocks.push(start..start + len);
        block_of.extend(std::iter::repeat_n(k, len));
        start += len;
    }

    Ok(BlockShape {
        n,
        a,
        b,
        d_top,
        d_bot,
        tilde,
        coord_blocks,
        block_of,
    })
}

impl BlockShape {
    pub fn from_parts(d_top: &[usize], d_bot: &[usize]) -> Result<Self> {
        let a = d_top.iter().sum();
        let b = d_bot.iter().sum();
        make_block_shape(
            a,
            b,
            Partition::new(d_top.to_vec(), a)?,
            Partition::new(d_bot.to_vec(), b)?,
        )
    }

    /// Both partitions trivial: the mixed Borel `B_w` of signature `(a, b)`.
    pub fn borel(a: usize, b: usize) -> Self {
        make_block_shape(a, b, Partition::trivial(a), Partition::trivial(b))
            .expect("trivial partitions are valid")
    }

    /// A standard (upper block triangular) parabolic: all blocks on the top side.
    pub fn standard(composition: &[usize]) -> Result<Self> {
        Self::from_parts(composition, &[])
    }

    /// Every shape with `a + b = n`, including `a = 0` and `b = 0`.
    pub fn all_with_n(n: usize) -> Vec<BlockShape> {
        let mut out = Vec::new();
        for a in 0..=n {
            let b = n - a;
            for top in Partition::compositions(a) {
                for bot in Partition::compositions(b) {
                    out.push(make_block_shape(a, b, top.clone(), bot).expect("valid compositions"));
                }
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn d_top(&self) -> &Partition {
        &self.d_top
    }

    pub fn d_bot(&self) -> &Partition {
        &self.d_bot
    }

    pub fn tilde(&self) -> &Partition {
        &self.tilde
    }

    /// `r_w = t_w + t_{w̄}`.
    pub fn r_blocks(&self) -> usize {
        self.tilde.len()
    }

    /// Number of top (Hecke-order) blocks, `t_w`.
    pub fn t_top(&self) -> usize {
        self.d_top.len()
    }

    /// Levi block sizes in coordinate order.
    pub fn coord_block_sizes(&self) -> Vec<usize> {
        self.coord_blocks.iter().map(|r| r.len()).collect()
    }

    pub fn coord_block(&self, k: usize) -> Range<usize> {
        self.coord_blocks[k].clone()
    }

    pub fn block_of(&self, coord: usize) -> usize {
        self.block_of[coord]
    }

    /// Coordinate block index (0-based) of the Hecke-order block `k` (0-based).
    pub fn tilde_to_coord(&self, k: usize) -> usize {
        let t = self.t_top();
        if k < t {
            k
        } else {
            self.r_blocks() + t - 1 - k
        }
    }

    /// Hecke-order block index (0-based) of coordinate block `k` (0-based).
    pub fn coord_to_tilde(&self, k: usize) -> usize {
        // the map is an involution on the bottom indices
        self.tilde_to_coord(k)
    }

    fn check_j(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.r_blocks() {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: self.r_blocks(),
            });
        }
        Ok(())
    }

    /// `D_w(j)` for `1 ≤ j ≤ r_w`.
    pub fn partial_sum(&self, j: usize) -> Result<usize> {
        self.check_j(j)?;
        Ok(self.tilde.parts()[..j].iter().sum())
    }

    pub fn cell(&self, r: usize, c: usize) -> Cell {
        let (br, bc) = (self.block_of[r], self.block_of[c]);
        if br == bc {
            return if r == c {
                Cell::Diagonal
            } else {
                Cell::LeviOff
            };
        }
        let a = self.a;
        let upper = match (r < a, c < a) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => br < bc,
            // opposite parabolic on the lower-right corner
            (false, false) => br > bc,
        };
        if upper {
            Cell::Unipotent
        } else {
            Cell::Opposite
        }
    }

    pub fn cells_of(&self, kind: Cell) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |r| (0..n).map(move |c| (r, c)))
            .filter(move |&(r, c)| self.cell(r, c) == kind)
    }

    /// `(levi, upper_u)` as 1-based position sets.
    pub fn position_sets(&self) -> (PositionSet, PositionSet) {
        let mut levi = PositionSet::new();
        let mut upper = PositionSet::new();
        for r in 0..self.n {
            for c in 0..self.n {
                match self.cell(r, c) {
                    Cell::Diagonal | Cell::LeviOff => {
                        levi.insert((r + 1, c + 1));
                    }
                    Cell::Unipotent => {
                        upper.insert((r + 1, c + 1));
                    }
                    Cell::Opposite => {}
                }
            }
        }
        (levi, upper)
    }

    pub fn opposite_positions(&self) -> PositionSet {
        self.cells_of(Cell::Opposite)
            .map(|(r, c)| (r + 1, c + 1))
            .collect()
    }

    /// Diagonal valuations of `t_{w,i}` for `1 ≤ i ≤ n`:
    /// `diag(p·1_i, 1_{n−i})` if `i ≤ a`, else `diag(p·1_a, 1_{n−i}, p·1_{i−a})`.
    pub fn t_valuations(&self, i: usize) -> Result<Vec<i64>> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.n,
            });
        }
        let (n, a) = (self.n, self.a);
        Ok((0..n)
            .map(|k| {
                let hit = if i <= a {
                    k < i
                } else {
                    k < a || k >= n - (i - a)
                };
                i64::from(hit)
            })
            .collect())
    }

    /// Coordinate valuations of `s_j = t_{w, D(j)}`.
    pub fn s_valuations(&self, j: usize) -> Result<Vec<i64>> {
        let i = self.partial_sum(j)?;
        self.t_valuations(i)
    }

    /// Per-block valuations in Hecke order of a central element given by coordinates.
    /// Errors when the coordinates are not constant on a block.
    pub fn tilde_block_valuations(&self, coords: &[i64]) -> Result<Vec<i64>> {
        if coords.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                self.n,
                coords.len()
            )));
        }
        (0..self.r_blocks())
            .map(|k| {
                let range = self.coord_block(self.tilde_to_coord(k));
                let v = coords[range.start];
                if coords[range].iter().any(|&x| x != v) {
                    Err(Error::Precondition(
                        "element is not central in the Levi".into(),
                    ))
                } else {
                    Ok(v)
                }
            })
            .collect()
    }

    /// Coordinate valuations of the central element with Hecke-order block valuations `v`.
    pub fn coords_from_tilde(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.r_blocks() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} block valuations, got {}",
                self.r_blocks(),
                v.len()
            )));
        }
        let mut out = vec![0; self.n];
        for (k, &val) in v.iter().enumerate() {
            for c in self.coord_block(self.tilde_to_coord(k)) {
                out[c] = val;
            }
        }
        Ok(out)
    }

    pub fn params(&self) -> ShapeParams {
        self.clone().into()
    }
}

impl fmt::Display for BlockShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={} b={} d_top={} d_bot={}",
            self.a, self.b, self.d_top, self.d_bot
        )
    }
}
