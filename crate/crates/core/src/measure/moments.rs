//! Exact stationary moments and related closed forms of the 1d game.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::validate_weight;

/// Stationary moments `⟨x^n⟩` for `n = 0..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub w: f64,
    pub moments: Vec<f64>,
}

impl MomentTable {
    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.moments[n]
    }
}

/// Binomial coefficients `C(n, 0..=n)`; exact integers up to `n = 64`.
fn binomial_row(n: usize) -> Vec<f64> {
    if n <= 64 {
        let mut row = vec![1u128; n + 1];
        for i in 1..n {
            row[i] = row[i - 1] * (n - i + 1) as u128 / i as u128;
        }
        row.into_iter().map(|c| c as f64).collect()
    } else {
        let mut row = vec![1.0f64; n + 1];
        for i in 1..n {
            row[i] = row[i - 1] * (n - i + 1) as f64 / i as f64;
        }
        row
    }
}

/// Moments from the self-similarity relation
/// `2⟨h(x)⟩ = ⟨h((1-w)x)⟩ + ⟨h((1-w)x + w)⟩` applied to `h = x^n`:
///
/// `⟨x^n⟩ = Σ_{i<n} C(n,i) (1-w)^i w^{n-i} ⟨x^i⟩ / (2 (1 - (1-w)^n))`.
pub fn moment_table(w: f64, k: usize) -> Result<MomentTable> {
    validate_weight(w)?;
    if k == 0 {
        return Err(Error::input("moment table needs K >= 1"));
    }
    let c = 1.0 - w;
    let log_c = (-w).ln_1p();
    let mut moments = Vec::with_capacity(k + 1);
    moments.push(1.0);
    for n in 1..=k {
        let binom = binomial_row(n);
        let sum: f64 = (0..n)
            .map(|i| binom[i] * c.powi(i as i32) * w.powi((n - i) as i32) * moments[i])
            .sum();
        let denom = -2.0 * (n as f64 * log_c).exp_m1();
        moments.push(sum / denom);
    }
    Ok(MomentTable { w, moments })
}

/// Small-x exponent `α` of the ansatz `η*(x) ∝ x^α`: `α = -1 - ln 2 / ln(1 - w)`.
pub fn small_x_exponent(w: f64) -> Result<f64> {
    validate_weight(w)?;
    Ok(-1.0 - std::f64::consts::LN_2 / (-w).ln_1p())
}

/// The weight with exponent `α`, i.e. `1 - w = 2^{-1/(α+1)}`.
pub fn weight_for_exponent(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= -1.0 {
        return Err(Error::input(format!("exponent must exceed -1, got {alpha}")));
    }
    Ok(-(-std::f64::consts::LN_2 / (alpha + 1.0)).exp_m1())
}

/// Mean and variance of the Gaussian approximation to the stationary law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianApprox {
    pub mean: f64,
    pub variance: f64,
}

/// Mean `1/2` and variance `(w/2)^2 / (1 - (1-w)^2)`.
///
/// Accepts `w = 1`, where the game reduces to fair coin flips.
pub fn gaussian_approximation(w: f64) -> Result<GaussianApprox> {
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::config(format!("weight w must lie in (0, 1], got {w}")));
    }
    let c = 1.0 - w;
    Ok(GaussianApprox {
        mean: 0.5,
        variance: 0.25 * w * w / (1.0 - c * c),
    })
}

/// The game from `x_0 = 0` written as a Bernoulli convolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinRepresentation {
    /// `1 - w`.
    pub wbar: f64,
    /// `σ_j = 2 γ_{n-j-1} - 1`.
    pub spins: Vec<i8>,
    /// `Θ = Σ_j wbar^j σ_j`.
    pub theta: f64,
    /// `x_n = (1 - wbar^n)/2 + (w/2) Θ`.
    pub value: f64,
}

impl SpinRepresentation {
    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }
}

pub fn spin_reconstruct(gammas: &[u32], w: f64) -> Result<SpinRepresentation> {
    if let Some(g) = gammas.iter().find(|&&g| g > 1) {
        return Err(Error::input(format!("spin labels must be 0 or 1, got {g}")));
    }
    let wbar = 1.0 - w;
    let n = gammas.len();
    let spins: Vec<i8> = (0..n).map(|j| 2 * gammas[n - j - 1] as i8 - 1).collect();
    // Horner from the highest power: Θ = σ_0 + wbar (σ_1 + wbar (σ_2 + …))
    let theta = spins.iter().rev().fold(0.0, |acc, &s| acc * wbar + s as f64);
    let value = 0.5 * (1.0 - wbar.powi(n as i32)) + 0.5 * w * theta;
    Ok(SpinRepresentation {
        wbar,
        spins,
        theta,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::VertexStream;
    use crate::measure::W_CRITICAL;
    use proptest::prelude::*;

    #[test]
    fn first_moment_is_half() {
        for w in [0.05, 0.2, 0.5, 0.77, 0.95] {
            let t = moment_table(w, 3).unwrap();
            assert_eq!(t.get(0), 1.0);
            assert!((t.get(1) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_moments_at_half() {
        let t = moment_table(0.5, 10).unwrap();
        assert!((t.get(2) - 1.0 / 3.0).abs() < 1e-15);
        for n in 0..=10 {
            assert!((t.get(n) - 1.0 / (n as f64 + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn moment_table_shape() {
        let t = moment_table(0.3, 60).unwrap();
        assert_eq!(t.order(), 60);
        for n in 1..=60 {
            assert!(t.get(n) <= t.get(n - 1) && t.get(n) >= 0.0 && t.get(n) <= 1.0);
        }
        assert!(moment_table(0.3, 0).is_err());
        assert!(moment_table(1.0, 3).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_row(4), vec![1.0, 4.0, 6.0, 4.0, 1.0]);
        assert_eq!(binomial_row(64)[32], 1_832_624_140_942_590_534u64 as f64);
        let r = binomial_row(70);
        assert!((r[3] - 54_740.0).abs() < 1e-9);
    }

    #[test]
    fn exponents() {
        assert!((small_x_exponent(W_CRITICAL).unwrap() - 1.0).abs() < 1e-12);
        assert!(small_x_exponent(0.5).unwrap().abs() < 1e-15);
        for m in 1..=9 {
            let w = 1.0 - 2f64.powf(-1.0 / (m as f64 + 1.0));
            assert!((small_x_exponent(w).unwrap() - m as f64).abs() < 1e-12);
            assert!((weight_for_exponent(m as f64).unwrap() - w).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_variances() {
        assert!((gaussian_approximation(1.0).unwrap().variance - 0.25).abs() < 1e-15);
        let g = gaussian_approximation(0.5).unwrap();
        assert_eq!(g.mean, 0.5);
        assert!((g.variance - 1.0 / 12.0).abs() < 1e-15);
        assert!(gaussian_approximation(0.0).is_err());
    }

    #[test]
    fn spin_examples() {
        let w = 0.3;
        for n in [1usize, 5, 40] {
            let up = spin_reconstruct(&vec![1; n], w).unwrap();
            assert!(up.spins.iter().all(|&s| s == 1));
            assert!((up.value - (1.0 - 0.7f64.powi(n as i32))).abs() < 1e-14);
            let down = spin_reconstruct(&vec![0; n], w).unwrap();
            assert!(down.value.abs() < 1e-15);
        }
        assert!(spin_reconstruct(&[0, 2], w).is_err());
    }

    #[test]
    fn spin_matches_recursion_on_stream() {
        let w = 0.3;
        let gammas: Vec<u32> = VertexStream::new(4, 0, 2).unwrap().take(64).collect();
        let mut x = 0.0;
        for &g in &gammas {
            x = (1.0 - w) * x + w * g as f64;
        }
        assert!((spin_reconstruct(&gammas, w).unwrap().value - x).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn spin_equals_recursion(gammas in prop::collection::vec(0u32..2, 0..200), w in 0.01..0.99f64) {
            let mut x = 0.0;
            for &g in &gammas {
                x = (1.0 - w) * x + w * g as f64;
            }
            let rep = spin_reconstruct(&gammas, w).unwrap();
            prop_assert!((rep.value - x).abs() < 1e-12);
        }
    }
}
