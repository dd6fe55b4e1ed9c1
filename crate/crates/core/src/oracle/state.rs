//! Dense states over tensor products of modes and their reduced density matrices.

use num_complex::Complex64;

use super::linalg::{hermiticity_defect, CMatrix};
use crate::error::{Error, Result};
use crate::fermion::xlnx;

/// Amplitudes over `dims[0] ⊗ dims[1] ⊗ …`, mode 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::input("every mode needs a positive local dimension"));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::input("state dimension overflows"))?;
        if total != amplitudes.len() {
            return Err(Error::input(format!(
                "{} amplitudes for a space of dimension {total}",
                amplitudes.len()
            )));
        }
        Ok(Self { amplitudes, dims })
    }

    /// The basis state with the given local occupations.
    pub fn basis(occupations: &[usize], dims: Vec<usize>) -> Result<Self> {
        if occupations.len() != dims.len() || occupations.iter().zip(&dims).any(|(o, d)| o >= d) {
            return Err(Error::input("occupations do not fit the mode dimensions"));
        }
        let index = occupations.iter().zip(&dims).fold(0, |acc, (o, d)| acc * d + o);
        let total = dims.iter().product();
        let mut amplitudes = vec![Complex64::default(); total];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes, dims)
    }

    /// `a ⊗ b ⊗ …` from local states.
    pub fn product(factors: &[Vec<Complex64>]) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            amplitudes = amplitudes
                .iter()
                .flat_map(|a| f.iter().map(move |b| a * b))
                .collect();
        }
        Self::new(amplitudes, factors.iter().map(Vec::len).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `ρ_0 = Tr_{1..} |ψ⟩⟨ψ|`.
pub fn partial_trace_system(state: &StateVector) -> CMatrix {
    let d0 = state.dims[0];
    let rest = state.dim() / d0;
    let psi = CMatrix::from_row_slice(d0, rest, state.amplitudes());
    &psi * psi.adjoint()
}

/// `Tr ρ²`.
pub fn purity(rho: &CMatrix) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenvalues of a Hermitian PSD matrix, clamping rounding noise at zero.
pub fn density_spectrum(rho: &CMatrix) -> Result<Vec<f64>> {
    if !rho.is_square() || hermiticity_defect(rho) > 1e-10 {
        return Err(Error::input("density matrix must be square and Hermitian"));
    }
    let eig = rho.clone().symmetric_eigen();
    let mut out = Vec::with_capacity(eig.eigenvalues.len());
    for &l in eig.eigenvalues.iter() {
        if l < -1e-10 {
            return Err(Error::input(format!("density matrix has eigenvalue {l:e}")));
        }
        out.push(l.max(0.0));
    }
    Ok(out)
}

/// `-Tr ρ ln ρ`.
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    Ok(density_spectrum(rho)?.into_iter().map(xlnx).sum())
}
