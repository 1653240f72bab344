//! Geometry of the discrete torus (Z/LZ)^d.
//!
//! Sites are identified with integer coordinate vectors taken modulo the
//! side length `L`. Throughout the crate a site is addressed either by its
//! coordinate vector or by a flat row-major index in `0..N` with `N = L^d`.
//!
//! ## Canonical representative
//!
//! For a scalar coordinate `c`, the canonical representative `[c]_L` is the
//! unique integer congruent to `c` mod `L` lying in the window
//! `[-L/2, L/2)` (left endpoint included for even `L`; for odd `L` the
//! window contains `-(L-1)/2 ..= (L-1)/2`). Distances on the torus are
//! Euclidean norms of componentwise canonical representatives, which makes
//! them translation invariant and symmetric.
//!
//! ## Flat indexing
//!
//! `index_of` and `coords_of` implement the row-major bijection
//! `(c_1, …, c_d) ↔ c_1·L^{d-1} + … + c_d` with each `c_k` reduced to
//! `0..L`. Translation on the torus acts by componentwise addition mod `L`,
//! so any kernel that depends only on the coordinate difference is a
//! circulant in this indexing (the fact the FFT modules rely on).

use crate::error::{Error, Result};

// ────────────────────────── scalar canonical window ──────────────────────────

/// Canonical representative `[c]_L` of `c` modulo `L` in the window
/// `[-L/2, L/2)`.
///
/// Examples: `[5]_8 = -3`, `[-4]_8 = -4`, `[10]_7 = 3`.
pub fn canonical_rep(c: i64, side: usize) -> i64 {
    let l = side as i64;
    debug_assert!(l > 0, "side must be positive");
    let r = ((c % l) + l) % l; // now in 0..L
    if r >= (l + 1) / 2 {
        r - l
    } else {
        r
    }
}

// ─────────────────────────────── torus lattice ───────────────────────────────

/// A `d`-dimensional discrete torus with `side^d` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Torus {
    side: usize,
    dim: usize,
    volume: usize,
}

impl Torus {
    /// Builds a torus with the given side length and dimension.
    ///
    /// Fails if either is zero or if `side^d` overflows `usize`.
    pub fn new(side: usize, dim: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::invalid("torus side must be positive"));
        }
        if dim == 0 {
            return Err(Error::invalid("torus dimension must be positive"));
        }
        let mut volume: usize = 1;
        for _ in 0..dim {
            volume = volume
                .checked_mul(side)
                .ok_or_else(|| Error::invalid("torus volume overflows usize"))?;
        }
        Ok(Torus { side, dim, volume })
    }

    /// Side length `L`.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of sites `N = L^d`.
    pub fn volume(&self) -> usize {
        self.volume
    }

    /// Row-major flat index of a coordinate vector (entries arbitrary
    /// integers; reduced mod `L` first).
    ///
    /// Fails if the coordinate dimension does not match `self.dim()`.
    pub fn index_of(&self, coords: &[i64]) -> Result<usize> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "coordinate vector has {} entries, torus dimension is {}",
                coords.len(),
                self.dim
            )));
        }
        let l = self.side as i64;
        let mut idx: usize = 0;
        for &c in coords {
            let r = (((c % l) + l) % l) as usize;
            idx = idx * self.side + r;
        }
        Ok(idx)
    }

    /// Coordinate vector (entries in `0..L`) of a flat index.
    ///
    /// Fails if the index is out of range.
    pub fn coords_of(&self, index: usize) -> Result<Vec<i64>> {
        if index >= self.volume {
            return Err(Error::invalid(format!(
                "site index {index} out of range for volume {}",
                self.volume
            )));
        }
        let mut coords = vec![0i64; self.dim];
        let mut rest = index;
        for k in (0..self.dim).rev() {
            coords[k] = (rest % self.side) as i64;
            rest /= self.side;
        }
        Ok(coords)
    }

    /// Componentwise canonical representative of the coordinate difference
    /// between two sites given by flat indices.
    pub fn canonical_diff(&self, x: usize, y: usize) -> Result<Vec<i64>> {
        let cx = self.coords_of(x)?;
        let cy = self.coords_of(y)?;
        Ok(cx
            .iter()
            .zip(&cy)
            .map(|(&a, &b)| canonical_rep(a - b, self.side))
            .collect())
    }

    /// Flat index of the coordinate difference `x - y` (mod `L` per
    /// component). For a kernel `K` depending only on the difference,
    /// `K[x][y] = k[diff_index(x, y)]` exhibits the circulant structure.
    pub fn diff_index(&self, x: usize, y: usize) -> Result<usize> {
        let cx = self.coords_of(x)?;
        let cy = self.coords_of(y)?;
        let diff: Vec<i64> = cx.iter().zip(&cy).map(|(&a, &b)| a - b).collect();
        self.index_of(&diff)
    }

    /// Periodic Euclidean distance between two sites given by flat indices:
    /// the l2 norm of the componentwise canonical representatives of the
    /// coordinate difference.
    pub fn periodic_distance(&self, x: usize, y: usize) -> Result<f64> {
        let diff = self.canonical_diff(x, y)?;
        Ok(diff
            .iter()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt())
    }

    /// Iterator over all flat site indices.
    pub fn sites(&self) -> std::ops::Range<usize> {
        0..self.volume
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // ── canonical representative ──

    #[test]
    fn canonical_rep_matches_pinned_examples() {
        assert_eq!(canonical_rep(5, 8), -3);
        assert_eq!(canonical_rep(-4, 8), -4);
        assert_eq!(canonical_rep(10, 7), 3);
        assert_eq!(canonical_rep(0, 8), 0);
        assert_eq!(canonical_rep(4, 8), -4); // left endpoint of [-4, 4)
        assert_eq!(canonical_rep(3, 8), 3);
        assert_eq!(canonical_rep(-6, 8), 2);
    }

    #[test]
    fn canonical_rep_window_covers_even_and_odd_sides() {
        for side in [1usize, 2, 3, 7, 8] {
            let l = side as i64;
            for c in -20..=20i64 {
                let r = canonical_rep(c, side);
                assert_eq!(((r - c) % l + l) % l, 0, "congruence mod {l}");
                assert!(2 * r >= -l && 2 * r < l, "[{c}]_{l} = {r} outside window");
            }
        }
    }

    // ── flat indexing ──

    #[test]
    fn index_and_coords_are_inverse_bijections() {
        let t = Torus::new(4, 3).unwrap();
        for idx in t.sites() {
            let coords = t.coords_of(idx).unwrap();
            assert_eq!(t.index_of(&coords).unwrap(), idx);
        }
    }

    #[test]
    fn index_of_reduces_modulo_side() {
        let t = Torus::new(8, 2).unwrap();
        assert_eq!(
            t.index_of(&[9, -1]).unwrap(),
            t.index_of(&[1, 7]).unwrap()
        );
    }

    #[test]
    fn index_of_rejects_wrong_dimension() {
        let t = Torus::new(8, 2).unwrap();
        assert!(t.index_of(&[1, 2, 3]).is_err());
    }

    // ── distances ──

    #[test]
    fn periodic_distance_wraps_around() {
        let t = Torus::new(8, 1).unwrap();
        // |0 - 6| on the line is 6, but [−6]_8 = 2 on the torus.
        assert_eq!(t.periodic_distance(0, 6).unwrap(), 2.0);
    }

    #[test]
    fn periodic_distance_diagonal_corner() {
        let t = Torus::new(8, 2).unwrap();
        let x = t.index_of(&[0, 0]).unwrap();
        let y = t.index_of(&[7, 7]).unwrap();
        assert!((t.periodic_distance(x, y).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn periodic_distance_is_symmetric_and_translation_invariant() {
        let t = Torus::new(6, 2).unwrap();
        for x in [0usize, 7, 21, 35] {
            for y in [3usize, 11, 30] {
                let dxy = t.periodic_distance(x, y).unwrap();
                let dyx = t.periodic_distance(y, x).unwrap();
                assert!((dxy - dyx).abs() < 1e-15);
                // translate both points by (1, 2)
                let shift = |s: usize| -> usize {
                    let c = t.coords_of(s).unwrap();
                    t.index_of(&[c[0] + 1, c[1] + 2]).unwrap()
                };
                let dshift = t.periodic_distance(shift(x), shift(y)).unwrap();
                assert!((dxy - dshift).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn diff_index_gives_circulant_addressing() {
        let t = Torus::new(5, 2).unwrap();
        // K[x][y] depending only on x - y: check diff_index consistency
        // under simultaneous translation.
        let x = t.index_of(&[3, 1]).unwrap();
        let y = t.index_of(&[0, 4]).unwrap();
        let xs = t.index_of(&[4, 2]).unwrap();
        let ys = t.index_of(&[1, 0]).unwrap();
        assert_eq!(t.diff_index(x, y).unwrap(), t.diff_index(xs, ys).unwrap());
    }

    #[test]
    fn volume_overflow_is_reported() {
        assert!(Torus::new(1 << 20, 4).is_err());
        assert!(Torus::new(0, 1).is_err());
        assert!(Torus::new(4, 0).is_err());
    }
}
