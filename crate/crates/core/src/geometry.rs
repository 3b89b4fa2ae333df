//! Points, the Manhattan metric, orthant sign vectors and sweep orders.
//!
//! For a sign vector `alpha` the sweep key of a point `x` is the linear
//! functional `sum(alpha_i * x_i)`. Inside the closed orthant
//! `{x : alpha_i * (x_i - s_i) <= 0}` below an apex `s`, the Manhattan
//! distance to `s` equals the key difference `key(s) - key(x)`, which is
//! what lets the sweep pick nearest neighbours by key alone.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A finite list of points in `R^d`, stored row-major.
///
/// All coordinates are finite and negative zero is normalized to `+0.0`,
/// so bitwise equality of coordinates coincides with numeric equality.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        PointSet {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, n: usize) -> Self {
        PointSet {
            dim,
            coords: Vec::with_capacity(dim * n),
        }
    }

    /// Builds a point set from rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut set = PointSet::with_capacity(dim, rows.len());
        for row in rows {
            set.push(row.as_ref())?;
        }
        Ok(set)
    }

    /// Appends a point and returns its index.
    pub fn push(&mut self, coords: &[f64]) -> Result<usize> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: coords.len(),
            });
        }
        if let Some(&value) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite { value });
        }
        // `x + 0.0` maps -0.0 to +0.0 and leaves everything else alone.
        self.coords.extend(coords.iter().map(|&c| c + 0.0));
        Ok(self.len() - 1)
    }

    /// Keeps the first `len` points.
    pub fn truncate(&mut self, len: usize) {
        self.coords.truncate(len * self.dim);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim.max(1))
    }

    /// Largest absolute coordinate, floored at 1. Tolerances throughout the
    /// crate are expressed relative to this scale.
    pub fn coordinate_scale(&self) -> f64 {
        self.coords.iter().fold(1.0_f64, |m, c| m.max(c.abs()))
    }

    /// True when every coordinate is an integer of magnitude at most `2^50`,
    /// where keys and distances are computed without rounding.
    pub fn is_integral(&self) -> bool {
        const LIMIT: f64 = (1u64 << 50) as f64;
        self.coords.iter().all(|c| c.fract() == 0.0 && c.abs() <= LIMIT)
    }
}

/// Manhattan distance `sum |a_i - b_i|`.
///
/// Slices must have equal length; this is only checked in debug builds,
/// use [`checked_l1_distance`] at API boundaries.
#[inline]
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn checked_l1_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(l1_distance(a, b))
}

/// An element of `{+1, -1}^d`. Bit `k` of the mask is set when the `k`-th
/// sign is negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    mask: u32,
    dim: u8,
}

impl SignVector {
    pub const MAX_DIM: usize = 31;

    pub fn positive(dim: usize) -> Self {
        assert!(dim <= Self::MAX_DIM);
        SignVector {
            mask: 0,
            dim: dim as u8,
        }
    }

    pub fn from_mask(dim: usize, mask: u32) -> Self {
        assert!(dim <= Self::MAX_DIM && (mask >> dim) == 0);
        SignVector {
            mask,
            dim: dim as u8,
        }
    }

    /// Parses a sequence of `+1` / `-1` values.
    pub fn from_signs(signs: &[i32]) -> Result<Self> {
        if signs.len() > Self::MAX_DIM {
            return Err(Error::Config(format!(
                "sign vector longer than {}",
                Self::MAX_DIM
            )));
        }
        let mut mask = 0;
        for (k, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => mask |= 1 << k,
                other => {
                    return Err(Error::Config(format!(
                        "sign vector entry must be +1 or -1, got {other}"
                    )))
                }
            }
        }
        Ok(SignVector::from_mask(signs.len(), mask))
    }

    /// All `2^dim` sign vectors, starting with the all-positive one.
    pub fn all(dim: usize) -> impl Iterator<Item = SignVector> {
        assert!(dim <= Self::MAX_DIM);
        (0..1u32 << dim).map(move |mask| SignVector::from_mask(dim, mask))
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    #[inline]
    pub fn sign(&self, k: usize) -> f64 {
        if self.mask >> k & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn signs(&self) -> Vec<i32> {
        (0..self.dim()).map(|k| self.sign(k) as i32).collect()
    }

    pub fn negate(&self) -> Self {
        SignVector {
            mask: !self.mask & ((1u64 << self.dim) - 1) as u32,
            dim: self.dim,
        }
    }

    /// Linear functional `sum(alpha_i * x_i)`.
    #[inline]
    pub fn apply(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(k, &c)| if self.mask >> k & 1 == 1 { -c } else { c })
            .sum()
    }

    /// Membership in the closed orthant of this sign vector at `apex`.
    pub fn orthant_contains(&self, apex: &[f64], x: &[f64]) -> bool {
        x.iter()
            .zip(apex)
            .enumerate()
            .all(|(k, (&xi, &si))| self.sign(k) * (xi - si) >= 0.0)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.dim() {
            f.write_str(if self.sign(k) > 0.0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Position of a point in the sweep for one sign vector.
///
/// Ordered by `value`, then lexicographically by coordinates, then by
/// index. This refines the linear preorder into a total order.
#[derive(Clone, Copy, Debug)]
pub struct SweepKey<'a> {
    pub value: f64,
    pub coords: &'a [f64],
    pub index: usize,
}

impl Ord for SweepKey<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_f64(self.value, other.value)
            .then_with(|| {
                self.coords
                    .iter()
                    .zip(other.coords)
                    .map(|(a, b)| cmp_f64(*a, *b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| self.index.cmp(&other.index))
    }
}

impl PartialOrd for SweepKey<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for SweepKey<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for SweepKey<'_> {}

// Finite values only; -0.0 and +0.0 compare equal.
#[inline]
fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).expect("non-finite coordinate")
}

pub fn sweep_key<'a>(points: &'a PointSet, index: usize, alpha: SignVector) -> SweepKey<'a> {
    let coords = points.point(index);
    SweepKey {
        value: alpha.apply(coords),
        coords,
        index,
    }
}

/// Indices of all points in ascending refined sweep order.
pub fn sweep_order(points: &PointSet, alpha: SignVector) -> Vec<u32> {
    let all: Vec<u32> = (0..points.len() as u32).collect();
    sweep_order_of(points, &all, alpha)
}

/// Sorts a subset of point indices into ascending refined sweep order.
pub fn sweep_order_of(points: &PointSet, subset: &[u32], alpha: SignVector) -> Vec<u32> {
    let mut keyed: Vec<(f64, u32)> = subset
        .iter()
        .map(|&i| (alpha.apply(points.point(i as usize)), i))
        .collect();
    keyed.sort_unstable_by(|a, b| {
        cmp_f64(a.0, b.0).then_with(|| {
            sweep_key(points, a.1 as usize, alpha).cmp(&sweep_key(points, b.1 as usize, alpha))
        })
    });
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Checks `dist(s, x) == key(s) - key(x)` for a point `x` in the closed
/// orthant of `-alpha` at `s`.
///
/// The tolerance is `1e-9` times the larger absolute coordinate (at least 1);
/// integer inputs within `2^50` match exactly.
pub fn distance_key_identity_check(s: &[f64], x: &[f64], alpha: SignVector) -> Result<bool> {
    if s.len() != x.len() || s.len() != alpha.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: if x.len() != s.len() {
                x.len()
            } else {
                alpha.dim()
            },
        });
    }
    if !alpha.negate().orthant_contains(s, x) {
        return Err(Error::Contract(format!(
            "point is outside the closed {} orthant of the apex",
            alpha.negate()
        )));
    }
    let dist = l1_distance(s, x);
    let diff = alpha.apply(s) - alpha.apply(x);
    let scale = s.iter().chain(x).fold(1.0_f64, |m, c| m.max(c.abs()));
    Ok((dist - diff).abs() <= 1e-9 * scale)
}
