//! Closed-form fermionic repeated-interaction dynamics.
//!
//! A single fermionic mode (frequency ω) meets a fresh bath mode each step,
//! coupled by hopping λ for a time τ. The bath modes are prepared empty or
//! filled according to a label `γ ∈ {0, 1}`. The system's reduced state stays
//! diagonal in the number basis, and its occupation obeys the 1d chaos game
//! with weight `w = sin²(λτ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{Trajectory, VertexStream};

/// Physical parameters of the fermionic game (ħ = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumConfig {
    pub omega: f64,
    pub lambda: f64,
    pub tau: f64,
    pub seed: u64,
    pub stream: u64,
    /// Per-mode frequencies `[ω_0, ω_1, …]`, honored by the state-vector
    /// oracle only. The closed forms assume a homogeneous ω.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_omegas: Option<Vec<f64>>,
}

impl QuantumConfig {
    pub fn new(omega: f64, lambda: f64, tau: f64) -> Self {
        Self {
            omega,
            lambda,
            tau,
            seed: 0,
            stream: 0,
            mode_omegas: None,
        }
    }

    pub fn with_seed(mut self, seed: u64, stream: u64) -> Self {
        self.seed = seed;
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::config(format!("tau must be positive, got {}", self.tau)));
        }
        if !self.omega.is_finite() || !self.lambda.is_finite() {
            return Err(Error::config("omega and lambda must be finite"));
        }
        Ok(())
    }

    /// `w = sin²(λτ)`.
    pub fn w(&self) -> f64 {
        coupling_weight(self)
    }
}

/// The one-step propagator `e^{-iτT}` of the mode pair, `T = [[ω, -λ], [-λ, ω]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionUnitary {
    pub entries: [[Complex64; 2]; 2],
}

impl InteractionUnitary {
    /// Max-norm of `U†U - 1`.
    pub fn unitarity_defect(&self) -> f64 {
        let u = &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s: Complex64 = u.iter().map(|row| row[i].conj() * row[j]).sum();
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }
}

/// `e^{-iωτ} [[cos λτ, i sin λτ], [i sin λτ, cos λτ]]`.
pub fn interaction_unitary(cfg: &QuantumConfig) -> InteractionUnitary {
    let phase = Complex64::from_polar(1.0, -cfg.omega * cfg.tau);
    let (s, c) = (cfg.lambda * cfg.tau).sin_cos();
    let diag = phase * c;
    let off = phase * Complex64::new(0.0, s);
    InteractionUnitary {
        entries: [[diag, off], [off, diag]],
    }
}

pub fn coupling_weight(cfg: &QuantumConfig) -> f64 {
    (cfg.lambda * cfg.tau).sin().powi(2)
}

/// `N ↦ (1 - w) N + w γ`.
pub fn step_occupation(n: f64, gamma: u32, w: f64) -> Result<f64> {
    check_occupation(n)?;
    if gamma > 1 {
        return Err(Error::input(format!("fermionic label must be 0 or 1, got {gamma}")));
    }
    Ok(((1.0 - w) * n + w * gamma as f64).clamp(0.0, 1.0))
}

fn check_occupation(n: f64) -> Result<()> {
    if (0.0..=1.0).contains(&n) {
        Ok(())
    } else {
        Err(Error::input(format!("occupation must lie in [0, 1], got {n}")))
    }
}

/// Occupation trajectory from the vacuum, `N_0 = 0`.
pub fn run_fermion(
    cfg: &QuantumConfig,
    n: usize,
    forced: Option<&[u32]>,
) -> Result<Trajectory<f64>> {
    cfg.validate()?;
    let w = cfg.w();
    let gammas: Vec<u32> = match forced {
        Some(g) => g.to_vec(),
        None => VertexStream::new(cfg.seed, cfg.stream, 2)?.take(n).collect(),
    };
    let mut values = Vec::with_capacity(gammas.len() + 1);
    let mut occ = 0.0;
    values.push(occ);
    for &g in &gammas {
        occ = step_occupation(occ, g, w)?;
        values.push(occ);
    }
    Ok(Trajectory { gammas, values })
}

/// Reduced density matrix `diag(1 - N, N)` in the `{|0⟩, |1⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    pub entries: [[Complex64; 2]; 2],
}

impl DensityMatrix2 {
    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Eigenvalues of the Hermitian 2×2 matrix in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let b = self.entries[0][1].norm();
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean - r, mean + r]
    }
}

pub fn reduced_density(n: f64) -> Result<DensityMatrix2> {
    check_occupation(n)?;
    let z = Complex64::new(0.0, 0.0);
    Ok(DensityMatrix2 {
        entries: [[Complex64::new(1.0 - n, 0.0), z], [z, Complex64::new(n, 0.0)]],
    })
}

/// Parameter `g` of the Gaussian state `ρ ∝ exp(-g f†f)`, `g = ln((1 - N) / N)`.
///
/// Pure states give `+∞` (N = 0) and `-∞` (N = 1).
pub fn gaussian_parameter(n: f64) -> Result<f64> {
    check_occupation(n)?;
    Ok(if n == 0.0 {
        f64::INFINITY
    } else if n == 1.0 {
        f64::NEG_INFINITY
    } else {
        ((1.0 - n) / n).ln()
    })
}

/// Inverse of [`gaussian_parameter`], `N = e^{-g} / (1 + e^{-g})`.
pub fn occupation_from_parameter(g: f64) -> f64 {
    if g >= 0.0 {
        let e = (-g).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + g.exp())
    }
}

/// Entanglement entropy `-(1-N) ln(1-N) - N ln N`, with `0 ln 0 = 0`.
///
/// Evaluated through the smaller eigenvalue, so `entropy(n) == entropy(1 - n)`
/// bit for bit whenever `1 - n` is exact.
pub fn entropy(n: f64) -> f64 {
    let small = if n >= 0.5 { 1.0 - n } else { n };
    xlnx(small) + xlnx(1.0 - small)
}

#[inline]
pub(crate) fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, LN_2, PI, TAU};

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn unitary_examples() {
        let id = interaction_unitary(&QuantumConfig::new(0.0, 0.0, 1.0));
        assert!(close(id.entries[0][0], 1.0.into()) && close(id.entries[0][1], 0.0.into()));

        let swap = interaction_unitary(&QuantumConfig::new(0.0, FRAC_PI_2, 1.0));
        let i = Complex64::i();
        assert!(close(swap.entries[0][0], 0.0.into()) && close(swap.entries[1][0], i));

        let cfg = QuantumConfig::new(TAU, FRAC_PI_3, 1.0);
        let u = interaction_unitary(&cfg);
        let off = Complex64::new(0.0, 3f64.sqrt() / 2.0);
        assert!(close(u.entries[0][0], 0.5.into()) && close(u.entries[1][1], 0.5.into()));
        assert!(close(u.entries[0][1], off) && close(u.entries[1][0], off));
        assert!((cfg.w() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn unitarity_over_parameter_grid() {
        for k in 0..50 {
            let cfg = QuantumConfig::new(0.37 * k as f64, -1.3 + 0.11 * k as f64, 0.2 + 0.05 * k as f64);
            let u = interaction_unitary(&cfg);
            assert!(u.unitarity_defect() <= 1e-12);
            // w equals the squared modulus of the off-diagonal entry
            assert!((cfg.w() - u.entries[0][1].norm_sqr()).abs() < 1e-14);
        }
    }

    #[test]
    fn weights() {
        assert!((QuantumConfig::new(0.0, FRAC_PI_4, 1.0).w() - 0.5).abs() < 1e-15);
        assert!((QuantumConfig::new(0.0, FRAC_PI_3, 1.0).w() - 0.75).abs() < 1e-15);
        for k in 1..20 {
            let lt = FRAC_PI_4 + k as f64 * (PI / 2.0) / 20.0;
            assert!(QuantumConfig::new(1.0, lt, 1.0).w() > 0.5);
        }
    }

    #[test]
    fn occupation_steps() {
        assert!((step_occupation(0.3, 1, 0.5).unwrap() - 0.65).abs() < 1e-15);
        assert_eq!(step_occupation(0.0, 0, 0.4).unwrap(), 0.0);
        assert_eq!(step_occupation(1.0, 1, 0.4).unwrap(), 1.0);
        assert_eq!(step_occupation(0.3, 1, 1.0).unwrap(), 1.0);
        assert_eq!(step_occupation(0.3, 0, 1.0).unwrap(), 0.0);
        assert!(step_occupation(1.5, 0, 0.4).is_err());
        assert!(step_occupation(0.5, 2, 0.4).is_err());
    }

    #[test]
    fn swap_chain() {
        let cfg = QuantumConfig::new(0.0, FRAC_PI_2, 1.0);
        let t = run_fermion(&cfg, 0, Some(&[1, 0, 1])).unwrap();
        assert_eq!(t.values, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn all_filled_is_geometric() {
        let cfg = QuantumConfig::new(0.4, 0.5, 1.3);
        let w = cfg.w();
        let t = run_fermion(&cfg, 0, Some(&[1; 60])).unwrap();
        for (k, n) in t.values.iter().enumerate() {
            assert!((n - (1.0 - (1.0 - w).powi(k as i32))).abs() < 1e-14);
        }
    }

    #[test]
    fn gap_in_fractal_regime() {
        let cfg = QuantumConfig::new(1.0, 1.0, 1.0).with_seed(5, 2);
        let w = cfg.w();
        assert!(w > 0.5);
        let t = run_fermion(&cfg, 10_000, None).unwrap();
        assert!(t.values[1..].iter().all(|&n| n <= 1.0 - w + 1e-12 || n >= w - 1e-12));
    }

    #[test]
    fn density_matrix_contract() {
        let r = reduced_density(0.65).unwrap();
        assert!((r.entries[0][0].re - 0.35).abs() < 1e-15 && r.entries[1][1].re == 0.65);
        assert!((r.trace().re - 1.0).abs() < 1e-15);
        let ev = r.eigenvalues();
        assert!((ev[0] - 0.35).abs() < 1e-15 && (ev[1] - 0.65).abs() < 1e-15);
        assert_eq!(reduced_density(0.0).unwrap().entries[0][0].re, 1.0);
        assert_eq!(reduced_density(0.5).unwrap().eigenvalues(), [0.5, 0.5]);
        assert!(reduced_density(-0.1).is_err());
    }

    #[test]
    fn gaussian_parameter_values() {
        assert_eq!(gaussian_parameter(0.5).unwrap(), 0.0);
        let n1 = (-1f64).exp() / (1.0 + (-1f64).exp());
        assert!((gaussian_parameter(n1).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(gaussian_parameter(0.0).unwrap(), f64::INFINITY);
        assert_eq!(gaussian_parameter(1.0).unwrap(), f64::NEG_INFINITY);

        // bisection on the defining relation N = e^{-g}/(1+e^{-g})
        let target = 0.65;
        let (mut lo, mut hi) = (-10.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if occupation_from_parameter(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g = gaussian_parameter(0.65).unwrap();
        assert!((g - 0.5 * (lo + hi)).abs() < 1e-12);
        assert!((g - (-0.619_039_208_406_223_4)).abs() < 1e-12);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(0.0), 0.0);
        assert_eq!(entropy(1.0), 0.0);
        assert!((entropy(0.5) - LN_2).abs() < 1e-15);
        let direct = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((entropy(0.25) - direct).abs() < 1e-15);
        assert!((entropy(0.25) - 0.562_335_144_618_808_3).abs() < 1e-12);
        let ev = reduced_density(0.25).unwrap().eigenvalues();
        assert!((entropy(0.25) - (xlnx(ev[0]) + xlnx(ev[1]))).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn entropy_symmetric_and_bounded(n in 0.5..=1.0f64) {
            proptest::prop_assert_eq!(entropy(n), entropy(1.0 - n));
            proptest::prop_assert!(entropy(n) >= 0.0 && entropy(n) <= LN_2 + 1e-15);
        }

        #[test]
        fn gaussian_round_trip(n in 1e-6..(1.0 - 1e-6f64)) {
            let g = gaussian_parameter(n).unwrap();
            proptest::prop_assert!((occupation_from_parameter(g) - n).abs() < 1e-12);
        }
    }
}
