//! Gaussian initial data for the continuum dynamics.
//!
//! Per cell and channel, white noise `W_m(c) ~ N(0, h^N / M)` i.i.d.; the
//! channel-centered noise `W̃_m = W_m - (1/M) Σ_k W_k` is smeared over the
//! unit ℓ^p ball,
//!
//! ```text
//! B_m(x) = Σ_cells frac(cell ∩ ball(x)) · W̃_m(cell),
//! ```
//!
//! giving a stationary Gaussian field with
//!
//! ```text
//! Cov(B_m(x), B_m'(x')) = [δ_mm'·(M-1)/M² - (1-δ_mm')/M²] · λ(ball(x) ∩ ball(x')),
//! ```
//!
//! up to the `O(h)` quadrature of the cell fractions. Channels sum to zero
//! pointwise. The smearing uses a fixed-order stencil so the field is
//! exactly translation-equivariant with the noise.

use rand_distr::{Distribution, StandardNormal};

use crate::continuum::ContinuumMask;
use crate::grid::{toroidal_distance, GridSpec};
use crate::lattice::PNorm;
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

/// Channel-centered white noise `W̃` on the cell grid.
#[derive(Debug, Clone)]
pub struct WhiteNoise {
    pub spec: GridSpec,
    pub m: u8,
    /// `channels[m][cell]`, already centered: sums to zero over channels.
    pub channels: Vec<Vec<f64>>,
}

/// Draws `M` channels of i.i.d. `N(0, h^N/M)` noise and centers them.
pub fn sample_white_noise(spec: &GridSpec, m: u8, seed: u64, replicate: u64) -> Result<WhiteNoise> {
    if m < 2 {
        return Err(Error::invalid("m", "need at least two opinions"));
    }
    let n = spec.n_cells();
    let sd = (spec.cell_volume() / m as f64).sqrt();
    let mut rng = stream(seed, Purpose::WhiteNoise, replicate);
    let mut channels = vec![vec![0.0; n]; m as usize];
    // cell-major draw order so the per-cell vector is contiguous in the stream
    for i in 0..n {
        for ch in 0..m as usize {
            let z: f64 = StandardNormal.sample(&mut rng);
            channels[ch][i] = sd * z;
        }
    }
    for i in 0..n {
        let mean: f64 = channels.iter().map(|ch| ch[i]).sum::<f64>() / m as f64;
        for ch in channels.iter_mut() {
            ch[i] -= mean;
        }
    }
    Ok(WhiteNoise { spec: spec.clone(), m, channels })
}

/// Smeared Gaussian initial data `B`.
#[derive(Debug, Clone)]
pub struct InitialField {
    pub spec: GridSpec,
    pub m: u8,
    pub p: PNorm,
    /// `channels[m][cell] = B_m` at the cell center.
    pub channels: Vec<Vec<f64>>,
}

impl InitialField {
    /// `B̂ = B_1 - B_2` (two-channel fields).
    pub fn hat(&self) -> Vec<f64> {
        assert_eq!(self.m, 2, "hat field is defined for M = 2");
        self.channels[0]
            .iter()
            .zip(&self.channels[1])
            .map(|(a, b)| a - b)
            .collect()
    }
}

/// Builds `B` from centered noise by the fixed-order ball stencil.
pub fn build_initial_field(noise: &WhiteNoise, p: PNorm) -> Result<InitialField> {
    let spec = &noise.spec;
    let mask = ContinuumMask::new(spec.dim, spec.cells_per_unit, p)?;
    let shape = spec.shape();
    let n = spec.n_cells();
    let mut channels = vec![vec![0.0; n]; noise.m as usize];
    for (ch, out) in channels.iter_mut().enumerate() {
        mask.apply_direct(&shape, &noise.channels[ch], out);
    }
    Ok(InitialField { spec: spec.clone(), m: noise.m, p, channels })
}

/// One-call convenience: noise plus smearing.
pub fn sample_initial_field(
    spec: &GridSpec,
    m: u8,
    p: PNorm,
    seed: u64,
    replicate: u64,
) -> Result<InitialField> {
    build_initial_field(&sample_white_noise(spec, m, seed, replicate)?, p)
}

/// [`build_initial_field`] through the separable sliding-window sweep:
/// O(n) per channel instead of O(n · stencil), agreeing with the direct
/// stencil up to summation-order roundoff. Use for large grids where only
/// the values matter, not bitwise translation equivariance.
pub fn build_initial_field_fast(noise: &WhiteNoise, p: PNorm) -> Result<InitialField> {
    let spec = &noise.spec;
    let mask = ContinuumMask::new(spec.dim, spec.cells_per_unit, p)?;
    let shape = spec.shape();
    let n = spec.n_cells();
    let mut channels = vec![vec![0.0; n]; noise.m as usize];
    for (ch, out) in channels.iter_mut().enumerate() {
        mask.apply(&shape, &noise.channels[ch], out);
    }
    Ok(InitialField { spec: spec.clone(), m: noise.m, p, channels })
}

/// Exact intersection volume of two unit ∞-balls on the torus.
pub fn ball_overlap_inf(spec: &GridSpec, x1: &[f64], x2: &[f64]) -> f64 {
    assert_eq!(x1.len(), spec.dim);
    assert_eq!(x2.len(), spec.dim);
    let mut vol = 1.0;
    for axis in 0..spec.dim {
        let d = toroidal_distance(x1[axis], x2[axis], spec.width);
        // two length-2 arcs on a circle of length `width` can meet on both
        // sides when width < 4
        let near = (2.0 - d).max(0.0);
        let far = (2.0 - (spec.width - d)).max(0.0);
        vol *= (near + far).min(2.0);
    }
    vol
}

/// Numeric intersection volume of two unit ℓ^p balls (midpoint rule,
/// `samples` points per axis per unit length).
pub fn ball_overlap_numeric(
    spec: &GridSpec,
    x1: &[f64],
    x2: &[f64],
    p: PNorm,
    samples: usize,
) -> f64 {
    let dim = spec.dim;
    let step = 1.0 / samples as f64;
    let n_axis = (2.0 / step).round() as usize; // cover ball(x1): [x1-1, x1+1]
    let norm_p = |dx: &[f64]| -> f64 {
        match p {
            PNorm::Inf => dx.iter().fold(0.0f64, |a, &v| a.max(v.abs())),
            PNorm::Finite(pv) => dx
                .iter()
                .map(|v| v.abs().powf(pv))
                .sum::<f64>()
                .powf(1.0 / pv),
        }
    };
    let mut inside = 0usize;
    let mut cursor = vec![0usize; dim];
    let mut d1 = vec![0.0; dim];
    let mut d2 = vec![0.0; dim];
    'outer: loop {
        for axis in 0..dim {
            let u = x1[axis] - 1.0 + (cursor[axis] as f64 + 0.5) * step;
            d1[axis] = toroidal_distance(u, x1[axis], spec.width);
            d2[axis] = toroidal_distance(u, x2[axis], spec.width);
        }
        if norm_p(&d1) < 1.0 && norm_p(&d2) < 1.0 {
            inside += 1;
        }
        for axis in (0..dim).rev() {
            cursor[axis] += 1;
            if cursor[axis] < n_axis {
                continue 'outer;
            }
            cursor[axis] = 0;
        }
        break;
    }
    inside as f64 * step.powi(dim as i32)
}

/// Closed-form covariance of the limiting field:
/// `(δ·(M-1)/M² - (1-δ)/M²) · λ(ball(x1) ∩ ball(x2))`. Exact for `p = ∞`;
/// numeric ball overlap otherwise.
pub fn covariance_exact(
    spec: &GridSpec,
    m: u8,
    m1: u8,
    m2: u8,
    x1: &[f64],
    x2: &[f64],
    p: PNorm,
) -> f64 {
    assert!(m1 >= 1 && m1 <= m && m2 >= 1 && m2 <= m);
    let mm = m as f64;
    let channel = if m1 == m2 { (mm - 1.0) / (mm * mm) } else { -1.0 / (mm * mm) };
    let overlap = match p {
        PNorm::Inf => ball_overlap_inf(spec, x1, x2),
        PNorm::Finite(_) => ball_overlap_numeric(spec, x1, x2, p, 200),
    };
    channel * overlap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_stats(xs: &[f64]) -> (f64, f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        (mean, m2, m3 / m2.powf(1.5), m4 / (m2 * m2))
    }

    #[test]
    fn channels_sum_to_zero_pointwise() {
        let spec = GridSpec::new(1, 6.0, 32).unwrap();
        for m in [2u8, 3, 5] {
            let field = sample_initial_field(&spec, m, PNorm::Inf, 42, m as u64).unwrap();
            let scale = field.channels[0]
                .iter()
                .fold(0.0f64, |a, &v| a.max(v.abs()))
                .max(1e-30);
            for i in 0..spec.n_cells() {
                let s: f64 = field.channels.iter().map(|ch| ch[i]).sum();
                assert!(
                    s.abs() <= 1e-10 * scale.max(1.0),
                    "M = {m}, cell {i}: Σ_m B_m = {s}"
                );
            }
        }
    }

    #[test]
    fn noise_variance_matches_prescaling() {
        let spec = GridSpec::new(1, 8.0, 16).unwrap();
        let m = 4u8;
        // raw (uncentered) variance is not observable after centering; the
        // centered noise has Var = (h/M)(1 - 1/M)
        let mut all = Vec::new();
        for rep in 0..200 {
            let noise = sample_white_noise(&spec, m, 7, rep).unwrap();
            all.extend_from_slice(&noise.channels[0]);
        }
        let (_, var, _, _) = sample_stats(&all);
        let expect = spec.cell_volume() / m as f64 * (1.0 - 1.0 / m as f64);
        let se = expect * (2.0 / all.len() as f64).sqrt();
        assert!(
            (var - expect).abs() < 3.0 * se,
            "var {var} vs {expect} (3se = {})",
            3.0 * se
        );
    }

    #[test]
    fn field_is_deterministic_in_the_key() {
        let spec = GridSpec::new(1, 4.0, 16).unwrap();
        let a = sample_initial_field(&spec, 3, PNorm::Inf, 9, 4).unwrap();
        let b = sample_initial_field(&spec, 3, PNorm::Inf, 9, 4).unwrap();
        let c = sample_initial_field(&spec, 3, PNorm::Inf, 9, 5).unwrap();
        assert_eq!(a.channels, b.channels);
        assert_ne!(a.channels, c.channels);
    }

    #[test]
    fn sliding_window_build_matches_the_direct_stencil() {
        for dim in [1usize, 2] {
            let spec = GridSpec::new(dim, 4.0, 8).unwrap();
            let noise = sample_white_noise(&spec, 3, 5, 1).unwrap();
            let direct = build_initial_field(&noise, PNorm::Inf).unwrap();
            let fast = build_initial_field_fast(&noise, PNorm::Inf).unwrap();
            for ch in 0..3 {
                for i in 0..spec.n_cells() {
                    assert!(
                        (direct.channels[ch][i] - fast.channels[ch][i]).abs() < 1e-9,
                        "dim {dim}, channel {ch}, cell {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn smearing_is_translation_equivariant_bitwise() {
        let spec = GridSpec::new(1, 4.0, 32).unwrap();
        let n = spec.n_cells();
        let noise = sample_white_noise(&spec, 11, 2, 0).unwrap();
        let field = build_initial_field(&noise, PNorm::Inf).unwrap();
        let shift = 37usize;
        let mut rolled = noise.clone();
        for ch in 0..2 {
            for i in 0..n {
                rolled.channels[ch][i] = noise.channels[ch][(i + shift) % n];
            }
        }
        let rolled_field = build_initial_field(&rolled, PNorm::Inf).unwrap();
        for ch in 0..2 {
            for i in 0..n {
                assert_eq!(
                    rolled_field.channels[ch][i],
                    field.channels[ch][(i + shift) % n],
                    "translation equivariance must be exact (cell {i})"
                );
            }
        }
    }

    #[test]
    fn overlap_closed_form_examples() {
        // d = (1/2, 1) between ∞-ball centers in 2-D: (2 - 1/2)(2 - 1) = 3/2
        let spec = GridSpec::new(2, 6.0, 8).unwrap();
        let o = ball_overlap_inf(&spec, &[1.0, 1.0], &[1.5, 2.0]);
        assert!((o - 1.5).abs() < 1e-12);
        // coincident centers: full ball volume 2^N
        assert!((ball_overlap_inf(&spec, &[1.0, 1.0], &[1.0, 1.0]) - 4.0).abs() < 1e-12);
        // distance ≥ 2 on a wide torus: disjoint
        assert_eq!(ball_overlap_inf(&spec, &[0.0, 0.0], &[2.5, 0.0]), 0.0);
        // narrow torus (width 3): arcs meet on both sides, d = 1.5 each way
        let narrow = GridSpec::new(1, 3.0, 8).unwrap();
        let o2 = ball_overlap_inf(&narrow, &[0.0], &[1.5]);
        assert!((o2 - 1.0).abs() < 1e-12, "wrap overlap {o2}");
        // covariance prefactors at the example distance
        let c_diag = covariance_exact(&spec, 3, 1, 1, &[1.0, 1.0], &[1.5, 2.0], PNorm::Inf);
        assert!((c_diag - 1.0 / 3.0).abs() < 1e-12);
        let c_off = covariance_exact(&spec, 3, 1, 2, &[1.0, 1.0], &[1.5, 2.0], PNorm::Inf);
        assert!((c_off + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn numeric_overlap_agrees_with_closed_form() {
        let spec = GridSpec::new(1, 6.0, 8).unwrap();
        for d in [0.0, 0.7, 1.9, 2.4] {
            let exact = ball_overlap_inf(&spec, &[2.0], &[2.0 + d]);
            let numeric = ball_overlap_numeric(&spec, &[2.0], &[2.0 + d], PNorm::Inf, 400);
            assert!(
                (exact - numeric).abs() < 0.02,
                "d = {d}: {exact} vs {numeric}"
            );
        }
        // ℓ¹ in 1-D coincides with the interval of length 2
        let l1 = ball_overlap_numeric(&spec, &[2.0], &[2.5], PNorm::Finite(1.0), 400);
        assert!((l1 - 1.5).abs() < 0.02, "ℓ¹ overlap {l1}");
    }

    #[test]
    fn empirical_covariance_matches_closed_form() {
        // estimate Cov(B_m(x), B_m'(x')) over replicates at a handful of lags
        let spec = GridSpec::new(1, 6.0, 32).unwrap();
        let m = 3u8;
        let n = spec.n_cells();
        let reps = 1500usize;
        let x0 = 0usize;
        let lags = [0usize, 16, 32, 48, 80]; // distances 0, 0.5, 1, 1.5, 2.5
        let mut prods_diag = vec![Vec::with_capacity(reps); lags.len()];
        let mut prods_off = vec![Vec::with_capacity(reps); lags.len()];
        for rep in 0..reps {
            let f = sample_initial_field(&spec, m, PNorm::Inf, 31, rep as u64).unwrap();
            for (k, &lag) in lags.iter().enumerate() {
                let j = (x0 + lag) % n;
                prods_diag[k].push(f.channels[0][x0] * f.channels[0][j]);
                prods_off[k].push(f.channels[0][x0] * f.channels[1][j]);
            }
        }
        let x1 = spec.cell_center(x0);
        for (k, &lag) in lags.iter().enumerate() {
            let x2 = spec.cell_center((x0 + lag) % n);
            for (prods, m2) in [(&prods_diag[k], 1u8), (&prods_off[k], 2u8)] {
                let mean = prods.iter().sum::<f64>() / reps as f64;
                let var = prods.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (reps as f64 - 1.0);
                let se = (var / reps as f64).sqrt();
                let expect = covariance_exact(&spec, m, 1, m2, &x1, &x2, PNorm::Inf);
                // 3 SE plus the O(h) quadrature bias of the cell fractions
                let slack = 3.0 * se + 0.01 * expect.abs();
                assert!(
                    (mean - expect).abs() <= slack.max(1e-4),
                    "lag {lag}, channel pair (1,{m2}): {mean} vs {expect} ± {slack}"
                );
            }
        }
    }

    #[test]
    fn field_values_look_gaussian() {
        // skewness ≈ 0 and kurtosis ≈ 3 at a fixed cell across replicates
        let spec = GridSpec::new(1, 4.0, 16).unwrap();
        let reps = 2000usize;
        let mut vals = Vec::with_capacity(reps);
        for rep in 0..reps {
            let f = sample_initial_field(&spec, 2, PNorm::Inf, 13, rep as u64).unwrap();
            vals.push(f.channels[0][5]);
        }
        let (_, _, skew, kurt) = sample_stats(&vals);
        let n = reps as f64;
        // Jarque–Bera statistic is asymptotically χ²(2); 13.8 ≈ -2·ln(0.001)
        let jb = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0).powi(2));
        assert!(jb < 13.8, "JB = {jb} (skew {skew}, kurtosis {kurt})");
    }

    #[test]
    fn hat_variance_doubles_the_channel_variance_at_m_two() {
        // Var B̂(x) = Var B_1 + Var B_2 - 2 Cov = (1/4 + 1/4 + 2/4)·2^N = 2^N
        let spec = GridSpec::new(1, 4.0, 16).unwrap();
        let reps = 3000usize;
        let mut vals = Vec::with_capacity(reps);
        for rep in 0..reps {
            let f = sample_initial_field(&spec, 2, PNorm::Inf, 17, rep as u64).unwrap();
            vals.push(f.hat()[3]);
        }
        let (_, var, _, _) = sample_stats(&vals);
        let expect = 2.0; // λ(ball) at N = 1
        let se = expect * (2.0 / reps as f64).sqrt();
        assert!(
            (var - expect).abs() < 3.0 * se + 0.02 * expect,
            "Var B̂ = {var} vs {expect}"
        );
    }
}
