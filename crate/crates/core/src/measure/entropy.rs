//! Average entanglement entropy from a density or from truncated moment series.

use serde::{Deserialize, Serialize};

use super::density::DensityGrid;
use super::moments::moment_table;
use crate::error::{Error, Result};
use crate::fermion::xlnx;

/// `⟨S*⟩ = -2 ∫ x ln x η*(x) dx` by the bin-midpoint rule.
///
/// Relies on the stationary law being symmetric about `1/2`.
pub fn entropy_from_density(grid: &DensityGrid) -> f64 {
    grid.masses()
        .iter()
        .enumerate()
        .map(|(j, m)| 2.0 * m * xlnx(grid.midpoint(j)))
        .sum()
}

/// Lower/upper truncations of `⟨S*⟩/2` at order `K` and their midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBounds {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "A_K")]
    pub a: f64,
    #[serde(rename = "B_K")]
    pub b: f64,
    #[serde(rename = "C_K")]
    pub c: f64,
}

impl EntropyBounds {
    /// `2 C_K`, the moment-series approximation of `⟨S*⟩`.
    pub fn entropy_estimate(&self) -> f64 {
        2.0 * self.c
    }

    pub fn brackets(&self, half_entropy: f64) -> bool {
        self.a <= half_entropy && half_entropy <= self.b
    }
}

/// `A_K = Σ_{n=1}^{K-1} (⟨x^n⟩ - ⟨x^{n+1}⟩)/n`,
/// `B_K = ⟨x⟩ - Σ_{n=2}^{K} ⟨x^n⟩/(n(n-1))`, `C_K = (A_K + B_K)/2`.
pub fn entropy_truncation(w: f64, k: usize) -> Result<EntropyBounds> {
    if k < 2 {
        return Err(Error::input("entropy truncation needs K >= 2"));
    }
    let m = moment_table(w, k)?.moments;
    let a: f64 = (1..k).map(|n| (m[n] - m[n + 1]) / n as f64).sum();
    let b = m[1] - (2..=k).map(|n| m[n] / (n * (n - 1)) as f64).sum::<f64>();
    Ok(EntropyBounds {
        k,
        a,
        b,
        c: 0.5 * (a + b),
    })
}

/// `1 - 2 Σ_{n=2}^{K-1} ⟨x^n⟩/(n(n-1)) - ⟨x^K⟩ (K+1)/(K(K-1))`, which equals `2 C_K`.
pub fn entropy_series_approximation(w: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::input("entropy truncation needs K >= 2"));
    }
    let m = moment_table(w, k)?.moments;
    let kf = k as f64;
    let sum: f64 = (2..k).map(|n| m[n] / (n * (n - 1)) as f64).sum();
    Ok(1.0 - 2.0 * sum - m[k] * (kf + 1.0) / (kf * (kf - 1.0)))
}
