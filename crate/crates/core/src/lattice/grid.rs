use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic site grid. Storage is row-major with the first index fastest:
/// site `(j, k)` lives at `j + nj * k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nj: usize,
    pub nk: usize,
    /// Lattice index of storage column 0.
    #[serde(default)]
    pub j0: i64,
    /// Lattice index of storage row 0.
    #[serde(default)]
    pub k0: i64,
}

impl GridSpec {
    pub fn new(nj: usize, nk: usize) -> Result<Self> {
        for (name, n) in [("nj", nj), ("nk", nk)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::Config(format!("{name} must be even and >= 4, got {n}")));
            }
        }
        Ok(Self { nj, nk, j0: 0, k0: 0 })
    }

    pub fn len(&self) -> usize {
        self.nj * self.nk
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, j: usize, k: usize) -> usize {
        j + self.nj * k
    }

    /// Storage index of lattice site `(j, k)` with periodic wrap.
    pub fn wrap(&self, j: i64, k: i64) -> usize {
        let jj = (j - self.j0).rem_euclid(self.nj as i64) as usize;
        let kk = (k - self.k0).rem_euclid(self.nk as i64) as usize;
        self.idx(jj, kk)
    }
}

/// Unweighted l² norm, summed in storage order.
pub fn l2_norm(field: &[f64]) -> f64 {
    field.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Row `r` of a field with rows of length `n`.
#[inline]
pub(crate) fn row(f: &[f64], r: usize, n: usize) -> &[f64] {
    &f[r * n..(r + 1) * n]
}

/// `field` rolled so that entry `(j, k)` of the result holds entry `(j + dj, k + dk)` of the input.
pub fn roll(grid: &GridSpec, field: &[f64], dj: i64, dk: i64) -> Vec<f64> {
    let (nj, nk) = (grid.nj, grid.nk);
    let sj = dj.rem_euclid(nj as i64) as usize;
    let sk = dk.rem_euclid(nk as i64) as usize;
    let mut out = vec![0.0; field.len()];
    for k in 0..nk {
        let src = &field[nj * ((k + sk) % nk)..][..nj];
        let dst = &mut out[nj * k..][..nj];
        dst[..nj - sj].copy_from_slice(&src[sj..]);
        dst[nj - sj..].copy_from_slice(&src[..sj]);
    }
    out
}
