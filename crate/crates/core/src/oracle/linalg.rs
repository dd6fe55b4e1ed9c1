//! Dense Hermitian exponentials, applied block by block over a conserved charge.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Max-norm of `H - H†`.
pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `e^{-itH}` for Hermitian `H`, by eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    if !h.is_square() {
        return Err(Error::input("Hamiltonian must be square"));
    }
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = hermiticity_defect(h);
    if defect > 1e-12 * scale {
        return Err(Error::input(format!("Hamiltonian is not Hermitian (defect {defect:e})")));
    }
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -t * e)),
    );
    let scaled = CMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * phases[j]);
    Ok(scaled * v.adjoint())
}

/// A Hamiltonian given by its nonzero entries.
#[derive(Debug, Clone, Default)]
pub struct SparseHamiltonian {
    pub dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseHamiltonian {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        *self.entries.entry((row, col)).or_default() += value;
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    /// Dense form, for small checks.
    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (&(i, j), &v) in &self.entries {
            m[(i, j)] = v;
        }
        m
    }
}

/// `e^{-itH}` restricted to each sector of a charge that `H` conserves.
#[derive(Debug, Clone)]
pub struct BlockUnitary {
    pub dim: usize,
    blocks: Vec<(Vec<usize>, CMatrix)>,
}

impl BlockUnitary {
    /// Fails if an entry of `h` couples two sectors or a block is not Hermitian.
    pub fn new(h: &SparseHamiltonian, charge: impl Fn(usize) -> usize, t: f64) -> Result<Self> {
        let mut sectors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for s in 0..h.dim {
            sectors.entry(charge(s)).or_default().push(s);
        }
        for &(i, j) in h.entries.keys() {
            if charge(i) != charge(j) {
                return Err(Error::input(format!(
                    "Hamiltonian couples basis states {j} and {i} of different charge"
                )));
            }
        }
        let mut blocks = Vec::with_capacity(sectors.len());
        for idx in sectors.into_values() {
            let local = CMatrix::from_fn(idx.len(), idx.len(), |a, b| h.get(idx[a], idx[b]));
            let u = expm_hermitian(&local, t)?;
            blocks.push((idx, u));
        }
        Ok(Self { dim: h.dim, blocks })
    }

    pub fn apply(&self, psi: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), self.dim);
        for (idx, u) in &self.blocks {
            let local = CVector::from_iterator(idx.len(), idx.iter().map(|&s| psi[s]));
            let out = u * local;
            for (k, &s) in idx.iter().enumerate() {
                psi[s] = out[k];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_x_rotation() {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let t = 0.37;
        let u = expm_hermitian(&x, t).unwrap();
        let want = CMatrix::from_row_slice(
            2,
            2,
            &[c(t.cos(), 0.0), c(0.0, -t.sin()), c(0.0, -t.sin()), c(t.cos(), 0.0)],
        );
        assert!((u - want).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(expm_hermitian(&m, 1.0).is_err());
    }

    #[test]
    fn blocks_match_full_exponential() {
        // hopping on 2 sites in the occupation basis {00, 01, 10, 11}
        let mut h = SparseHamiltonian::new(4);
        h.add(1, 1, c(0.3, 0.0));
        h.add(2, 2, c(0.3, 0.0));
        h.add(3, 3, c(0.6, 0.0));
        h.add(1, 2, c(-0.8, 0.1));
        h.add(2, 1, c(-0.8, -0.1));
        let full = expm_hermitian(&h.to_dense(), 1.3).unwrap();
        let blocks = BlockUnitary::new(&h, |s: usize| s.count_ones() as usize, 1.3).unwrap();
        for col in 0..4 {
            let mut v = vec![Complex64::default(); 4];
            v[col] = c(1.0, 0.0);
            blocks.apply(&mut v);
            for row in 0..4 {
                assert!((v[row] - full[(row, col)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_charge_violation() {
        let mut h = SparseHamiltonian::new(2);
        h.add(0, 1, c(1.0, 0.0));
        h.add(1, 0, c(1.0, 0.0));
        assert!(BlockUnitary::new(&h, |s| s, 1.0).is_err());
    }
}
