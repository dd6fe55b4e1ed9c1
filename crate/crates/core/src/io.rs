//! CSV and JSON emission. CSV floats carry 17 significant digits (`{:.16e}`);
//! JSON uses serde_json's shortest round-trip form.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boson::Regime;
use crate::error::Result;
use crate::fermion::entropy;
use crate::ifs::{Point, Trajectory};
use crate::measure::{DensityGrid, EntropyBounds, Estimate, MomentTable};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `n,gamma,x,y`; rows are the states after steps `1..=n`. 1d games get `y = 0`.
pub fn write_classical_csv<W: Write + ?Sized>(out: &mut W, traj: &Trajectory<Point>) -> Result<()> {
    writeln!(out, "n,gamma,x,y")?;
    for (k, (g, p)) in traj.gammas.iter().zip(&traj.values[1..]).enumerate() {
        writeln!(out, "{},{},{},{}", k + 1, g, fmt_float(p.x), fmt_float(p.y))?;
    }
    Ok(())
}

/// `n,gamma,N,S`.
pub fn write_fermion_csv<W: Write + ?Sized>(out: &mut W, traj: &Trajectory<f64>) -> Result<()> {
    writeln!(out, "n,gamma,N,S")?;
    for (k, (g, &n)) in traj.gammas.iter().zip(&traj.values[1..]).enumerate() {
        writeln!(out, "{},{},{},{}", k + 1, g, fmt_float(n), fmt_float(entropy(n)))?;
    }
    Ok(())
}

/// `n,gamma,re_chi,im_chi`.
pub fn write_boson_csv<W: Write + ?Sized>(out: &mut W, traj: &Trajectory<Complex64>) -> Result<()> {
    writeln!(out, "n,gamma,re_chi,im_chi")?;
    for (k, (g, z)) in traj.gammas.iter().zip(&traj.values[1..]).enumerate() {
        writeln!(out, "{},{},{},{}", k + 1, g, fmt_float(z.re), fmt_float(z.im))?;
    }
    Ok(())
}

/// `bin_left,bin_right,mass`.
pub fn write_density_csv<W: Write + ?Sized>(out: &mut W, grid: &DensityGrid) -> Result<()> {
    writeln!(out, "bin_left,bin_right,mass")?;
    for (j, m) in grid.masses().iter().enumerate() {
        let (l, r) = grid.edges(j);
        writeln!(out, "{},{},{}", fmt_float(l), fmt_float(r), fmt_float(*m))?;
    }
    Ok(())
}

/// `n,moment` for `n = 0..=K`.
pub fn write_moments_csv<W: Write + ?Sized>(out: &mut W, table: &MomentTable) -> Result<()> {
    writeln!(out, "n,moment")?;
    for (n, m) in table.moments.iter().enumerate() {
        writeln!(out, "{n},{}", fmt_float(*m))?;
    }
    Ok(())
}

/// Truncation bounds of `⟨S*⟩/2` next to a Monte Carlo estimate of `⟨S*⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub w: f64,
    #[serde(flatten)]
    pub bounds: EntropyBounds,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
}

impl EntropyReport {
    pub fn new(w: f64, bounds: EntropyBounds, mc: &Estimate) -> Self {
        Self {
            w,
            bounds,
            mc_estimate: mc.mean,
            mc_stderr: mc.stderr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub tag: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_cardinality: Option<u64>,
    #[serde(rename = "W_re")]
    pub w_re: f64,
    #[serde(rename = "W_im")]
    pub w_im: f64,
}

impl RegimeReport {
    /// `W` is reported as `1 - cos Λ e^{-iΩ}` even where no transform exists.
    pub fn new(regime: Regime, w: Complex64) -> Self {
        Self {
            tag: regime.tag().to_string(),
            vertex_count: regime.vertex_count(),
            orbit_cardinality: regime.orbit_cardinality(),
            w_re: w.re,
            w_im: w.im,
        }
    }
}

pub fn write_json<W: Write + ?Sized, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
