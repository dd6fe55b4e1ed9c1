//! Binned probability measures on `[0, 1]` and the pushforward of the 1d game.
//!
//! Bin `j` of a grid with `K` bins is `[j/K, (j+1)/K)`; the last bin also
//! holds `x = 1`. Empirical histograms and iterated measures share this
//! convention so they can be compared bin by bin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::validate_weight;

/// `1 - 1/√2`, the weight with a piecewise-linear stationary density.
pub const W_CRITICAL: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

/// Probability masses of `K` equal bins on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    masses: Vec<f64>,
}

impl DensityGrid {
    /// Checks nonnegativity and unit total (to 1e-12).
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::input("density grid needs at least one bin"));
        }
        if let Some(m) = masses.iter().find(|m| !(**m >= 0.0 && m.is_finite())) {
            return Err(Error::input(format!("bin mass must be finite and >= 0, got {m}")));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("bin masses sum to {total}, expected 1")));
        }
        Ok(Self { masses })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("density grid needs at least one bin"));
        }
        Ok(Self {
            masses: vec![1.0 / k as f64; k],
        })
    }

    /// All mass in the bin containing `x`.
    pub fn point_mass(k: usize, x: f64) -> Result<Self> {
        let mut masses = vec![0.0; k.max(1)];
        masses[bin_index(x, k)?] = 1.0;
        Self::new(masses)
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn width(&self) -> f64 {
        1.0 / self.bins() as f64
    }

    /// `(left, right)` edges of bin `j`.
    pub fn edges(&self, j: usize) -> (f64, f64) {
        let k = self.bins() as f64;
        (j as f64 / k, (j + 1) as f64 / k)
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.bins() as f64
    }

    /// Density value `mass * K` in bin `j`.
    pub fn density(&self, j: usize) -> f64 {
        self.masses[j] * self.bins() as f64
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn l1_distance(&self, other: &DensityGrid) -> Result<f64> {
        if self.bins() != other.bins() {
            return Err(Error::input(format!(
                "grids have {} and {} bins",
                self.bins(),
                other.bins()
            )));
        }
        Ok(self
            .masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }

    pub fn is_symmetric(&self) -> bool {
        self.masses.iter().eq(self.masses.iter().rev())
    }

    /// `E[x^n]` with mass spread uniformly inside each bin.
    pub fn moment(&self, n: u32) -> f64 {
        let k = self.bins() as f64;
        let p = n as i32 + 1;
        self.masses
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let (l, r) = (j as f64 / k, (j + 1) as f64 / k);
                m * (r.powi(p) - l.powi(p)) * k / p as f64
            })
            .sum()
    }
}

/// Bin holding `x` under the half-open convention with the last bin closed.
pub fn bin_index(x: f64, k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::input("density grid needs at least one bin"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::input(format!("value {x} outside [0, 1]")));
    }
    Ok(((x * k as f64) as usize).min(k - 1))
}

/// Normalized histogram of `values[burn_in..]`.
pub fn histogram_density(values: &[f64], k: usize, burn_in: usize) -> Result<DensityGrid> {
    let kept = values.get(burn_in..).unwrap_or(&[]);
    if kept.is_empty() {
        return Err(Error::EmptySample(format!(
            "{} values with burn-in {burn_in}",
            values.len()
        )));
    }
    let mut counts = vec![0u64; k.max(1)];
    for &x in kept {
        counts[bin_index(x, k)?] += 1;
    }
    grid_from_counts(&counts)
}

pub(crate) fn grid_from_counts(counts: &[u64]) -> Result<DensityGrid> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample("no counts".into()));
    }
    let t = total as f64;
    DensityGrid::new(counts.iter().map(|&c| c as f64 / t).collect())
}

/// Pushforward of a piecewise-uniform measure under `x ↦ c x`, in bin units.
///
/// Each source bin's mass is split by overlap length; the last piece takes the
/// remainder so every source bin is conserved exactly.
fn push_contract(src: &[f64], c: f64, out: &mut [f64]) {
    let k = src.len();
    for (j, &m) in src.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let lo = c * j as f64;
        let hi = c * (j + 1) as f64;
        let first = (lo.floor() as usize).min(k - 1);
        let last = ((hi.ceil() as usize).max(first + 1) - 1).min(k - 1);
        let mut left = m;
        for (t, slot) in out.iter_mut().enumerate().take(last + 1).skip(first) {
            if t == last {
                *slot += left;
                break;
            }
            let overlap = ((t + 1) as f64).min(hi) - (t as f64).max(lo);
            let piece = m * (overlap / c).clamp(0.0, 1.0);
            *slot += piece;
            left -= piece;
        }
    }
}

/// One step of the measure iteration: half the mass pushed through
/// `f_0(x) = (1-w)x`, half through `f_1(x) = (1-w)x + w`.
///
/// `f_1` is the reflection of `f_0` through `x = 1/2`, so its pushforward is
/// computed as the mirror image of the `f_0` pushforward of the mirrored
/// grid. Symmetric grids therefore stay symmetric bit for bit.
pub fn iterate_density(grid: &DensityGrid, w: f64) -> DensityGrid {
    let k = grid.bins();
    let c = 1.0 - w;
    let mut left = vec![0.0; k];
    push_contract(&grid.masses, c, &mut left);
    let mirrored: Vec<f64> = grid.masses.iter().rev().copied().collect();
    let mut right = vec![0.0; k];
    push_contract(&mirrored, c, &mut right);
    let masses = (0..k).map(|t| 0.5 * left[t] + 0.5 * right[k - 1 - t]).collect();
    DensityGrid { masses }
}

/// Outcome of [`stationary_density`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stationary {
    pub grid: DensityGrid,
    pub iterations: usize,
    /// L1 change of the final iteration.
    pub last_change: f64,
    pub converged: bool,
}

/// Iterates [`iterate_density`] from the uniform grid until the L1 change is
/// at most `tol`. Hitting `max_iter` returns the last grid with `converged = false`.
pub fn stationary_density(w: f64, k: usize, tol: f64, max_iter: usize) -> Result<Stationary> {
    validate_weight(w)?;
    if k < 2 {
        return Err(Error::input("stationary density needs K >= 2"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::input("tolerance must be positive"));
    }
    let mut grid = DensityGrid::uniform(k)?;
    let mut last_change = f64::INFINITY;
    for it in 1..=max_iter {
        let next = iterate_density(&grid, w);
        last_change = next.l1_distance(&grid)?;
        grid = next;
        if last_change <= tol {
            return Ok(Stationary {
                grid,
                iterations: it,
                last_change,
                converged: true,
            });
        }
    }
    Ok(Stationary {
        grid,
        iterations: max_iter,
        last_change,
        converged: false,
    })
}

/// Weights whose stationary density is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormWeight {
    /// `w = 1/2`: uniform density.
    Half,
    /// `w = 1 - 1/√2`: tent with a plateau.
    Critical,
}

impl ClosedFormWeight {
    pub fn from_weight(w: f64) -> Result<Self> {
        if w == 0.5 {
            Ok(Self::Half)
        } else if (w - W_CRITICAL).abs() <= 1e-12 {
            Ok(Self::Critical)
        } else {
            Err(Error::Unsupported(format!(
                "no closed-form density for w = {w}; supported: 0.5, {W_CRITICAL} (1 - 1/sqrt 2)"
            )))
        }
    }

    /// Cumulative distribution of the stationary measure.
    pub fn cdf(self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            Self::Half => x,
            Self::Critical => {
                let s = std::f64::consts::SQRT_2;
                let a = 1.0 / (1.0 + s);
                let b = s / (1.0 + s);
                let slope = (1.0 + s) * (1.0 + s) / s;
                if x <= a {
                    0.5 * slope * x * x
                } else if x <= b {
                    0.5 * slope * a * a + slope * a * (x - a)
                } else {
                    1.0 - 0.5 * slope * (1.0 - x) * (1.0 - x)
                }
            }
        }
    }

    /// Pointwise stationary density.
    pub fn density(self, x: f64) -> f64 {
        match self {
            Self::Half => 1.0,
            Self::Critical => {
                let s = std::f64::consts::SQRT_2;
                let slope = (1.0 + s) * (1.0 + s) / s;
                slope * x.min(1.0 / (1.0 + s)).min(1.0 - x).max(0.0)
            }
        }
    }
}

/// Exact bin masses of the closed-form stationary density at `w ∈ {1/2, w_c}`.
pub fn closed_form_density(w: f64, k: usize) -> Result<DensityGrid> {
    let which = ClosedFormWeight::from_weight(w)?;
    if which == ClosedFormWeight::Half {
        return DensityGrid::uniform(k);
    }
    if k == 0 {
        return Err(Error::input("density grid needs at least one bin"));
    }
    let kf = k as f64;
    let mut masses: Vec<f64> = (0..k)
        .map(|j| which.cdf((j + 1) as f64 / kf) - which.cdf(j as f64 / kf))
        .collect();
    // symmetric by construction; mirror to make it exact
    for j in 0..k / 2 {
        let m = 0.5 * (masses[j] + masses[k - 1 - j]);
        masses[j] = m;
        masses[k - 1 - j] = m;
    }
    DensityGrid::new(masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn histogram_conventions() {
        let g = histogram_density(&[0.25; 10], 4, 0).unwrap();
        assert_eq!(g.masses(), &[0.0, 1.0, 0.0, 0.0]);
        let g = histogram_density(&[1.0, 0.0], 4, 0).unwrap();
        assert_eq!(g.masses(), &[0.5, 0.0, 0.0, 0.5]);
        let g = histogram_density(&[0.9, 0.1, 0.1], 2, 1).unwrap();
        assert_eq!(g.masses(), &[1.0, 0.0]);
        assert!(matches!(histogram_density(&[0.1], 4, 1), Err(Error::EmptySample(_))));
        assert!(histogram_density(&[1.5], 4, 0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(DensityGrid::new(vec![0.5, 0.6]).is_err());
        assert!(DensityGrid::new(vec![-0.1, 1.1]).is_err());
        assert!(DensityGrid::new(vec![]).is_err());
        assert!(DensityGrid::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn uniform_fixed_at_half() {
        let u = DensityGrid::uniform(64).unwrap();
        let next = iterate_density(&u, 0.5);
        assert!(next.l1_distance(&u).unwrap() < 1e-14);
    }

    #[test]
    fn point_mass_at_zero_splits() {
        let k = 20;
        let w = 0.35;
        let g = DensityGrid::point_mass(k, 0.0).unwrap();
        let next = iterate_density(&g, w);
        let (sub, hi) = (bin_index(0.0, k).unwrap(), bin_index(w, k).unwrap());
        // bin 0 = [0, 0.05) maps into [0, 0.0325) and [0.35, 0.3825)
        assert!((next.masses()[sub] - 0.5).abs() < 1e-15);
        assert!((next.masses()[hi] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stationary_half_is_immediate() {
        let s = stationary_density(0.5, 128, 1e-12, 10).unwrap();
        assert!(s.converged);
        assert_eq!(s.iterations, 1);
    }

    #[test]
    fn stationary_flags_non_convergence() {
        let s = stationary_density(0.05, 256, 1e-15, 3).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 3);
        assert!(stationary_density(0.5, 1, 1e-10, 10).is_err());
    }

    #[test]
    fn critical_closed_form() {
        let k = 1024;
        let g = closed_form_density(W_CRITICAL, k).unwrap();
        assert!(g.is_symmetric());
        assert!((g.total() - 1.0).abs() < 1e-12);
        let s = std::f64::consts::SQRT_2;
        let slope = (1.0 + s).powi(2) / s;
        // linear rise on the first segment: bin densities grow by slope/K per bin
        for j in 1..200 {
            let d = g.density(j) - g.density(j - 1);
            assert!((d - slope / k as f64).abs() < 1e-9, "bin {j}: {d}");
        }
        let s = stationary_density(W_CRITICAL, k, 1e-12, 10_000).unwrap();
        assert!(s.grid.l1_distance(&g).unwrap() <= 2.0 / k as f64);
    }

    #[test]
    fn closed_form_rejects_other_weights() {
        let err = closed_form_density(0.3, 10).unwrap_err();
        assert!(err.to_string().contains("0.5"));
        assert_eq!(closed_form_density(0.5, 8).unwrap(), DensityGrid::uniform(8).unwrap());
    }

    #[test]
    fn grid_moments_of_uniform() {
        let u = DensityGrid::uniform(10).unwrap();
        for n in 0..6u32 {
            assert!((u.moment(n) - 1.0 / (n as f64 + 1.0)).abs() < 1e-14);
        }
    }

    fn arb_grid() -> impl Strategy<Value = DensityGrid> {
        prop::collection::vec(0.0..1.0f64, 2..200).prop_map(|raw| {
            let t: f64 = raw.iter().sum::<f64>() + 1e-9;
            let mut m: Vec<f64> = raw.iter().map(|x| (x + 1e-9 / raw.len() as f64) / t).collect();
            let s: f64 = m.iter().sum();
            m.iter_mut().for_each(|x| *x /= s);
            DensityGrid::new(m).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mass_conserved(g in arb_grid(), w in 0.01..0.99f64) {
            let next = iterate_density(&g, w);
            prop_assert!((next.total() - g.total()).abs() <= 1e-14);
            prop_assert!(next.masses().iter().all(|&m| m >= 0.0));
        }

        #[test]
        fn symmetry_preserved(g in arb_grid(), w in 0.01..0.99f64) {
            let m = g.masses();
            let k = m.len();
            let sym: Vec<f64> = (0..k).map(|j| 0.5 * m[j] + 0.5 * m[k - 1 - j]).collect();
            let sg = DensityGrid { masses: sym };
            prop_assert!(sg.is_symmetric());
            prop_assert!(iterate_density(&sg, w).is_symmetric());
        }
    }
}
