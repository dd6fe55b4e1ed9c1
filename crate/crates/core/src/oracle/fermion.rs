//! Full state-vector simulation of the fermionic repeated-interaction process.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::linalg::{BlockUnitary, CMatrix, SparseHamiltonian};
use super::report::{OracleKind, OracleReport, OracleStep};
use super::state::{partial_trace_system, purity, von_neumann_entropy, StateVector};
use crate::error::{Error, Result};
use crate::fermion::{run_fermion, QuantumConfig};

/// Largest number of bath modes, i.e. a `2^11`-dimensional Fock space.
pub const FERMION_MAX_BATH_MODES: usize = 10;

/// Jordan-Wigner modes on `count` sites. Site 0 is the most significant bit,
/// and the operator for site `k` carries the parity of sites `< k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionModes {
    pub count: usize,
}

impl FermionModes {
    pub fn new(count: usize) -> Self {
        Self { count }
    }

    pub fn dim(&self) -> usize {
        1 << self.count
    }

    fn bit(&self, k: usize) -> usize {
        1 << (self.count - 1 - k)
    }

    pub fn occupied(&self, k: usize, s: usize) -> bool {
        s & self.bit(k) != 0
    }

    fn sign(&self, k: usize, s: usize) -> f64 {
        let before = !(2 * self.bit(k) - 1) & (self.dim() - 1);
        if (s & before).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `f_k |s⟩ = sign · |s'⟩`, or `None` when site `k` is empty.
    pub fn annihilate(&self, k: usize, s: usize) -> Option<(f64, usize)> {
        self.occupied(k, s).then(|| (self.sign(k, s), s ^ self.bit(k)))
    }

    /// `f_k† |s⟩`.
    pub fn create(&self, k: usize, s: usize) -> Option<(f64, usize)> {
        (!self.occupied(k, s)).then(|| (self.sign(k, s), s ^ self.bit(k)))
    }

    /// Basis index of the given occupation pattern.
    pub fn index(&self, occupations: &[bool]) -> usize {
        occupations
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .fold(0, |acc, (k, _)| acc | self.bit(k))
    }

    /// Dense `f_k`.
    pub fn matrix(&self, k: usize) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for s in 0..self.dim() {
            if let Some((sg, t)) = self.annihilate(k, s) {
                m[(t, s)] = Complex64::new(sg, 0.0);
            }
        }
        m
    }

    /// Max deviation from `{f_i, f_j†} = δ_ij` and `{f_i, f_j} = 0`, checked on every basis state.
    pub fn algebra_defect(&self) -> f64 {
        type Op = fn(&FermionModes, usize, usize) -> Option<(f64, usize)>;
        let apply = |ops: [(Op, usize); 2], s: usize| -> Option<(f64, usize)> {
            let (a, s1) = (ops[1].0)(self, ops[1].1, s)?;
            let (b, s2) = (ops[0].0)(self, ops[0].1, s1)?;
            Some((a * b, s2))
        };
        let mut worst: f64 = 0.0;
        for i in 0..self.count {
            for j in 0..self.count {
                for dagger in [true, false] {
                    let second: Op = if dagger { Self::create } else { Self::annihilate };
                    for s in 0..self.dim() {
                        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
                        for ops in [
                            [(Self::annihilate as Op, i), (second, j)],
                            [(second, j), (Self::annihilate as Op, i)],
                        ] {
                            if let Some((v, t)) = apply(ops, s) {
                                *acc.entry(t).or_default() += v;
                            }
                        }
                        if dagger && i == j {
                            *acc.entry(s).or_default() -= 1.0;
                        }
                        worst = acc.values().fold(worst, |w, v| w.max(v.abs()));
                    }
                }
            }
        }
        worst
    }
}

fn mode_frequencies(cfg: &QuantumConfig, count: usize) -> Result<Vec<f64>> {
    match &cfg.mode_omegas {
        None => Ok(vec![cfg.omega; count]),
        Some(list) if list.len() >= count && list.iter().all(|w| w.is_finite()) => {
            Ok(list[..count].to_vec())
        }
        Some(list) => Err(Error::config(format!(
            "mode_omegas lists {} finite frequencies, {count} modes need one each",
            list.len()
        ))),
    }
}

/// `Σ_k ω_k n_k - λ (f_0† f_n + f_n† f_0)`.
fn step_hamiltonian(modes: FermionModes, omegas: &[f64], lambda: f64, n: usize) -> SparseHamiltonian {
    let mut h = SparseHamiltonian::new(modes.dim());
    for s in 0..modes.dim() {
        let e: f64 = (0..modes.count).filter(|&k| modes.occupied(k, s)).map(|k| omegas[k]).sum();
        if e != 0.0 {
            h.add(s, s, Complex64::new(e, 0.0));
        }
        for (from, to) in [(n, 0), (0, n)] {
            if let Some((a, t)) = modes.annihilate(from, s) {
                if let Some((b, u)) = modes.create(to, t) {
                    h.add(u, s, Complex64::new(-lambda * a * b, 0.0));
                }
            }
        }
    }
    h
}

/// Plays the fermionic game on the full Fock space of the system and
/// `gammas.len()` bath modes, the `k`-th bath mode prepared in `|γ_k⟩`.
pub fn fermion_simulate(cfg: &QuantumConfig, gammas: &[u32]) -> Result<OracleReport> {
    cfg.validate()?;
    let m = gammas.len();
    if m > FERMION_MAX_BATH_MODES {
        return Err(Error::Resource {
            what: format!("fermion oracle with {m} bath modes"),
            required: format!("2^{} amplitudes", m + 1),
            cap: format!("{FERMION_MAX_BATH_MODES} bath modes (2^{})", FERMION_MAX_BATH_MODES + 1),
        });
    }
    if let Some(g) = gammas.iter().find(|&&g| g > 1) {
        return Err(Error::input(format!("fermionic label must be 0 or 1, got {g}")));
    }
    let modes = FermionModes::new(m + 1);
    let omegas = mode_frequencies(cfg, m + 1)?;
    let closed = run_fermion(cfg, m, Some(gammas))?;

    let mut occ = vec![false];
    occ.extend(gammas.iter().map(|&g| g == 1));
    let mut state = StateVector::basis(
        &occ.iter().map(|&o| o as usize).collect::<Vec<_>>(),
        vec![2; m + 1],
    )?;

    let mut steps = Vec::with_capacity(m + 1);
    steps.push(observe(&state, modes, gammas, 0, closed.values[0])?);
    for n in 1..=m {
        let h = step_hamiltonian(modes, &omegas, cfg.lambda, n);
        let u = BlockUnitary::new(&h, |s: usize| s.count_ones() as usize, cfg.tau)?;
        u.apply(state.amplitudes_mut());
        steps.push(observe(&state, modes, gammas, n, closed.values[n])?);
    }

    Ok(OracleReport {
        kind: OracleKind::Fermion,
        config: serde_json::to_value(cfg)?,
        gammas: gammas.to_vec(),
        truncation: None,
        truncation_tail_bound: None,
        discarded_weight: None,
        algebra_defect: modes.algebra_defect(),
        steps,
    })
}

fn observe(
    state: &StateVector,
    modes: FermionModes,
    gammas: &[u32],
    n: usize,
    closed_occupation: f64,
) -> Result<OracleStep> {
    let psi = state.amplitudes();
    let rho = partial_trace_system(state);
    let occupation = rho[(1, 1)].re;

    let mut a0 = Complex64::default();
    for (s, amp) in psi.iter().enumerate() {
        if let Some((sg, t)) = modes.annihilate(0, s) {
            a0 += psi[t].conj() * amp * sg;
        }
    }

    let diagonal_defect = [
        rho[(0, 1)].norm(),
        rho[(1, 0)].norm(),
        (rho[(0, 0)].re - (1.0 - closed_occupation)).abs(),
        (occupation - closed_occupation).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    // a basis state of an untouched mode only changes by a phase
    let idle_fidelity = (n + 1..modes.count)
        .map(|k| {
            let filled: f64 = psi
                .iter()
                .enumerate()
                .filter(|(s, _)| modes.occupied(k, *s))
                .map(|(_, z)| z.norm_sqr())
                .sum();
            if gammas[k - 1] == 1 {
                filled
            } else {
                1.0 - filled
            }
        })
        .fold(1.0, f64::min);

    Ok(OracleStep {
        n,
        expect_a0: [a0.re, a0.im],
        occupation,
        entropy: von_neumann_entropy(&rho)?,
        purity: purity(&rho),
        delta_vs_closed_form: (occupation - closed_occupation).abs(),
        reduced_density: Some(rho.transpose().iter().map(|z| [z.re, z.im]).collect()),
        diagonal_defect: Some(diagonal_defect),
        fidelity: None,
        idle_fidelity,
        norm_error: (state.norm() - 1.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn dense_anticommutators() {
        let modes = FermionModes::new(3);
        let id = CMatrix::identity(8, 8);
        for i in 0..3 {
            for j in 0..3 {
                let fi = modes.matrix(i);
                let fj = modes.matrix(j);
                let anti_dag = &fi * fj.adjoint() + fj.adjoint() * &fi;
                let want = if i == j { id.clone() } else { CMatrix::zeros(8, 8) };
                assert!((anti_dag - want).camax() < 1e-12);
                assert!((&fi * &fj + &fj * &fi).camax() < 1e-12);
            }
        }
    }

    #[test]
    fn sparse_algebra_check() {
        assert_eq!(FermionModes::new(6).algebra_defect(), 0.0);
    }

    #[test]
    fn full_swap() {
        let cfg = QuantumConfig::new(0.0, FRAC_PI_2, 1.0);
        let r = fermion_simulate(&cfg, &[1, 0, 1]).unwrap();
        let occ: Vec<f64> = r.steps.iter().map(|s| s.occupation).collect();
        for (got, want) in occ.iter().zip([0.0, 1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(r.passed(), "{:?}", r.checks());
    }

    #[test]
    fn matches_closed_form() {
        let cfg = QuantumConfig::new(1.0, FRAC_PI_3, 0.8);
        let r = fermion_simulate(&cfg, &[1, 1, 0, 1, 0, 0]).unwrap();
        assert!(r.max_delta() <= 1e-10);
        assert!(r.max_expect_a0() <= 1e-12);
        assert!(r.max_diagonal_defect() <= 1e-10);
        let closed = run_fermion(&cfg, 6, Some(&[1, 1, 0, 1, 0, 0])).unwrap();
        for s in &r.steps {
            assert!((s.entropy - crate::fermion::entropy(closed.values[s.n])).abs() < 1e-10);
        }
    }

    #[test]
    fn cap_is_a_resource_error() {
        let cfg = QuantumConfig::new(1.0, 0.5, 1.0);
        assert!(matches!(fermion_simulate(&cfg, &[0; 11]), Err(Error::Resource { .. })));
        assert!(fermion_simulate(&cfg, &[2]).is_err());
    }

    #[test]
    fn inhomogeneous_frequencies() {
        let mut cfg = QuantumConfig::new(1.0, 0.6, 1.0);
        cfg.mode_omegas = Some(vec![1.0; 4]);
        let same = fermion_simulate(&cfg, &[1, 0, 1]).unwrap();
        assert!(same.max_delta() < 1e-10);
        cfg.mode_omegas = Some(vec![1.0, 1.7, 0.2, 3.0]);
        let detuned = fermion_simulate(&cfg, &[1, 0, 1]).unwrap();
        assert!(detuned.max_norm_error() < 1e-10);
        assert!(detuned.max_delta() > 1e-6);
        cfg.mode_omegas = Some(vec![1.0]);
        assert!(fermion_simulate(&cfg, &[1, 0, 1]).is_err());
    }
}
