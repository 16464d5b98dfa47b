//! Periodic-grid plumbing shared by the lattice and continuum sides:
//! row-major index arithmetic, axis-line sweeps, circular windowed sums, and
//! periodic multilinear interpolation.

use crate::{Error, Result};

/// Shape of a cubic row-major grid: `dim` axes of `side` points each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridShape {
    pub dim: usize,
    pub side: usize,
}

impl GridShape {
    pub fn new(dim: usize, side: usize) -> Self {
        assert!(dim >= 1 && side >= 1);
        GridShape { dim, side }
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major stride of `axis` (last axis varies fastest).
    pub fn stride(&self, axis: usize) -> usize {
        self.side.pow((self.dim - 1 - axis) as u32)
    }

    pub fn coords(&self, index: usize) -> Vec<i64> {
        let mut c = vec![0i64; self.dim];
        let mut rest = index;
        for axis in (0..self.dim).rev() {
            c[axis] = (rest % self.side) as i64;
            rest /= self.side;
        }
        c
    }

    pub fn index(&self, coords: &[i64]) -> usize {
        debug_assert_eq!(coords.len(), self.dim);
        let mut idx = 0usize;
        for &c in coords {
            debug_assert!(c >= 0 && (c as usize) < self.side);
            idx = idx * self.side + c as usize;
        }
        idx
    }

    /// Index of the node at `coords + offset`, wrapped periodically.
    pub fn wrapped_index(&self, coords: &[i64], offset: &[i64]) -> usize {
        let side = self.side as i64;
        let mut idx = 0usize;
        for axis in 0..self.dim {
            let c = (coords[axis] + offset[axis]).rem_euclid(side);
            idx = idx * self.side + c as usize;
        }
        idx
    }

    /// Visits every axis-aligned line `{base + k·stride(axis)}` of the grid.
    /// The callback receives the start index and the stride.
    pub fn for_each_line(&self, axis: usize, mut f: impl FnMut(usize, usize)) {
        let stride = self.stride(axis);
        let block = stride * self.side;
        let outer = self.len() / block;
        for hi in 0..outer {
            for lo in 0..stride {
                f(hi * block + lo, stride);
            }
        }
    }
}

/// Geometry of the continuum grid: a torus of width `width` (per axis)
/// discretized into `cells_per_unit` cells per unit length. Fields are stored
/// at cell centers `(i + 1/2)·h`, `h = 1/cells_per_unit`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GridSpec {
    pub dim: usize,
    pub width: f64,
    pub cells_per_unit: usize,
}

impl GridSpec {
    /// Validates that the torus is wide enough to hold a unit-radius
    /// neighborhood without self-overlap and that `width · cells_per_unit`
    /// is an integer (cells tile the torus exactly).
    pub fn new(dim: usize, width: f64, cells_per_unit: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "dimension must be ≥ 1"));
        }
        if !(width >= 3.0) {
            return Err(Error::invalid("width", format!("torus width {width} must be ≥ 3")));
        }
        if cells_per_unit == 0 {
            return Err(Error::invalid("cells_per_unit", "must be ≥ 1"));
        }
        let exact = width * cells_per_unit as f64;
        if (exact - exact.round()).abs() > 1e-9 {
            return Err(Error::invalid(
                "width",
                format!("width · cells_per_unit = {exact} is not an integer"),
            ));
        }
        Ok(GridSpec { dim, width, cells_per_unit })
    }

    pub fn cells_per_axis(&self) -> usize {
        (self.width * self.cells_per_unit as f64).round() as usize
    }

    pub fn shape(&self) -> GridShape {
        GridShape::new(self.dim, self.cells_per_axis())
    }

    pub fn n_cells(&self) -> usize {
        self.shape().len()
    }

    /// Cell width; exact when `cells_per_axis` divides `width` in binary.
    pub fn h(&self) -> f64 {
        self.width / self.cells_per_axis() as f64
    }

    /// Volume element `h^N` of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    /// Center of cell `index` in continuum coordinates.
    pub fn cell_center(&self, index: usize) -> Vec<f64> {
        let h = self.h();
        self.shape()
            .coords(index)
            .iter()
            .map(|&c| (c as f64 + 0.5) * h)
            .collect()
    }
}

/// Distance between two torus coordinates along one axis.
pub fn toroidal_distance(a: f64, b: f64, width: f64) -> f64 {
    let d = (a - b).rem_euclid(width);
    d.min(width - d)
}

/// Circular sum of `len` consecutive entries of `buf` starting at `from`
/// (may be negative), via the prefix table `prefix` (`prefix[i] = Σ buf[..i]`).
#[inline]
pub(crate) fn circular_range_sum(prefix: &[f64], from: i64, len: usize) -> f64 {
    let n = prefix.len() - 1;
    debug_assert!(len <= n);
    let m = from.rem_euclid(n as i64) as usize;
    if m + len <= n {
        prefix[m + len] - prefix[m]
    } else {
        (prefix[n] - prefix[m]) + prefix[m + len - n]
    }
}

/// Writes to `out[k]` the circular windowed sum
/// `edge·buf[k-c] + Σ_{|o|<c} buf[k+o] + edge·buf[k+c]` for every `k`.
/// Requires `buf.len() ≥ 2c + 1`.
pub fn windowed_sum_periodic(buf: &[f64], c: usize, edge: f64, out: &mut [f64]) {
    let n = buf.len();
    assert!(n >= 2 * c + 1, "window of half-width {c} does not fit on a line of {n}");
    assert_eq!(out.len(), n);
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + buf[i];
    }
    if c == 0 {
        out.copy_from_slice(buf);
        return;
    }
    let interior = 2 * c - 1;
    for k in 0..n {
        let inner = circular_range_sum(&prefix, k as i64 - (c as i64 - 1), interior);
        let lo = buf[(k + n - c) % n];
        let hi = buf[(k + c) % n];
        out[k] = inner + edge * (lo + hi);
    }
}

/// Integer windowed sums with unit weights: `out[k] = Σ_{|o| ≤ half} buf[k+o]`
/// on a circle. Used for lattice neighborhood counts; exact.
pub fn windowed_count_periodic(buf: &[u32], half: usize, out: &mut [u32]) {
    let n = buf.len();
    assert!(n >= 2 * half + 1);
    assert_eq!(out.len(), n);
    let mut prefix = vec![0u64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + buf[i] as u64;
    }
    let len = 2 * half + 1;
    for k in 0..n {
        let from = (k as i64 - half as i64).rem_euclid(n as i64) as usize;
        let s = if from + len <= n {
            prefix[from + len] - prefix[from]
        } else {
            (prefix[n] - prefix[from]) + prefix[from + len - n]
        };
        out[k] = s as u32;
    }
}

/// Periodic multilinear interpolation on a cubic grid. `pos` is measured in
/// grid-index units: the value at integer position `j` is `values[j]`, and a
/// point between grid nodes gets the product-weight average of its `2^N`
/// surrounding nodes, weight `Π_k (1 - |pos_k - j_k|)`.
pub fn interpolate_multilinear(values: &[f64], shape: &GridShape, pos: &[f64]) -> f64 {
    assert_eq!(pos.len(), shape.dim);
    let side = shape.side as i64;
    let mut base = vec![0i64; shape.dim];
    let mut frac = vec![0.0; shape.dim];
    for axis in 0..shape.dim {
        let f = pos[axis].floor();
        base[axis] = (f as i64).rem_euclid(side);
        frac[axis] = pos[axis] - f;
    }
    let mut acc = 0.0;
    let mut coords = vec![0i64; shape.dim];
    for corner in 0..(1usize << shape.dim) {
        let mut weight = 1.0;
        for axis in 0..shape.dim {
            let up = (corner >> axis) & 1 == 1;
            coords[axis] = if up {
                (base[axis] + 1).rem_euclid(side)
            } else {
                base[axis]
            };
            weight *= if up { frac[axis] } else { 1.0 - frac[axis] };
        }
        acc += weight * values[shape.index(&coords)];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_coords_roundtrip() {
        let shape = GridShape::new(2, 5);
        for i in 0..shape.len() {
            assert_eq!(shape.index(&shape.coords(i)), i);
        }
    }

    #[test]
    fn windowed_sum_matches_direct() {
        let buf: Vec<f64> = (0..11).map(|i| (i as f64).sin()).collect();
        let n = buf.len();
        let c = 3;
        let mut out = vec![0.0; n];
        windowed_sum_periodic(&buf, c, 0.5, &mut out);
        for k in 0..n {
            let mut direct = 0.0;
            for o in -(c as i64)..=(c as i64) {
                let w = if o.unsigned_abs() as usize == c { 0.5 } else { 1.0 };
                direct += w * buf[(k as i64 + o).rem_euclid(n as i64) as usize];
            }
            assert!((out[k] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn windowed_count_matches_direct() {
        let buf: Vec<u32> = (0..13).map(|i| (i * 7 % 3) as u32).collect();
        let n = buf.len();
        let mut out = vec![0; n];
        windowed_count_periodic(&buf, 4, &mut out);
        for k in 0..n {
            let mut direct = 0;
            for o in -4i64..=4 {
                direct += buf[(k as i64 + o).rem_euclid(n as i64) as usize];
            }
            assert_eq!(out[k], direct);
        }
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_linear_between() {
        let shape = GridShape::new(1, 8);
        let values: Vec<f64> = (0..8).map(|i| (i as f64) * 0.5).collect();
        for j in 0..8 {
            let v = interpolate_multilinear(&values, &shape, &[j as f64]);
            assert!((v - values[j]).abs() < 1e-12);
        }
        // midpoint between nodes 2 and 3
        let v = interpolate_multilinear(&values, &shape, &[2.5]);
        assert!((v - 1.25).abs() < 1e-12);
        // wraps: midpoint between node 7 and node 0
        let v = interpolate_multilinear(&values, &shape, &[7.5]);
        assert!((v - (values[7] + values[0]) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_spec_validates() {
        assert!(GridSpec::new(1, 4.0, 128).is_ok());
        assert!(GridSpec::new(1, 2.5, 128).is_err()); // too narrow
        assert!(GridSpec::new(1, 3.3, 10).is_ok()); // 33 cells, exact
        assert!(GridSpec::new(1, 3.33, 10).is_err()); // 33.3 cells
        let spec = GridSpec::new(2, 4.0, 64).unwrap();
        assert_eq!(spec.cells_per_axis(), 256);
        assert_eq!(spec.n_cells(), 65536);
        assert!((spec.h() - 1.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn toroidal_distance_wraps() {
        assert!((toroidal_distance(0.5, 13.5, 14.0) - 1.0).abs() < 1e-12);
        assert!((toroidal_distance(3.0, 5.0, 14.0) - 2.0).abs() < 1e-12);
    }
}
