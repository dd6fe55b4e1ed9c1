//! Truncated-Fock simulation of the bosonic repeated-interaction process.
//!
//! The dense part of the state holds the system, the incoming bath mode, and a
//! Schmidt register standing in for all retired bath modes. Retired modes never
//! interact again, so replacing them by the span of their Schmidt vectors is an
//! exact isometry, and their free evolution is a local unitary that does not
//! affect `ρ_S`. Bath modes still waiting for their turn are kept as separate
//! factors and rotated freely each step.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::linalg::{BlockUnitary, CMatrix, CVector, SparseHamiltonian};
use super::report::{OracleKind, OracleReport, OracleStep};
use super::state::{partial_trace_system, purity, von_neumann_entropy, StateVector};
use crate::boson::{run_boson, BosonConfig};
use crate::error::{Error, Result};

/// Largest tolerated probability mass beyond the Fock cutoff.
pub const BOSON_TAIL_TOL: f64 = 1e-8;

/// Cap on the dense working block `d² · r ≤ d³`.
pub const BOSON_BLOCK_CAP: usize = 200_000;

/// `P(X ≥ d)` for `X ~ Poisson(μ)`.
pub fn poisson_tail(mu: f64, d: usize) -> f64 {
    if d == 0 {
        return 1.0;
    }
    if mu <= 0.0 {
        return 0.0;
    }
    let mut t = (-mu).exp();
    let mut head = 0.0;
    for k in 0..d {
        if k > 0 {
            t *= mu / k as f64;
        }
        head += t;
    }
    if mu < d as f64 {
        let mut term = t * mu / d as f64;
        let mut tail = 0.0;
        let mut k = d;
        while term > tail * 1e-17 && term > 0.0 {
            tail += term;
            k += 1;
            term *= mu / k as f64;
        }
        tail
    } else {
        (1.0 - head).max(0.0)
    }
}

/// `|α⟩` cut at `d` levels and renormalized.
pub fn truncated_coherent(alpha: Complex64, d: usize) -> CVector {
    let mut v = CVector::zeros(d);
    let mut c = Complex64::new(1.0, 0.0);
    for k in 0..d {
        if k > 0 {
            c *= alpha / (k as f64).sqrt();
        }
        v[k] = c;
    }
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Max deviation from `[b_i, b_j†] = δ_ij`, `[b_i, b_j] = 0` for two modes,
/// over basis states where neither mode sits at the cutoff.
pub fn boson_algebra_defect(d: usize) -> f64 {
    let lower = |occ: [usize; 2], i: usize| -> Option<(f64, [usize; 2])> {
        (occ[i] > 0).then(|| {
            let mut o = occ;
            o[i] -= 1;
            ((occ[i] as f64).sqrt(), o)
        })
    };
    let raise = |occ: [usize; 2], i: usize| -> Option<(f64, [usize; 2])> {
        (occ[i] + 1 < d).then(|| {
            let mut o = occ;
            o[i] += 1;
            ((o[i] as f64).sqrt(), o)
        })
    };
    let compose = |first: &dyn Fn([usize; 2]) -> Option<(f64, [usize; 2])>,
                   second: &dyn Fn([usize; 2]) -> Option<(f64, [usize; 2])>,
                   occ| {
        let (a, o) = first(occ)?;
        let (b, o) = second(o)?;
        Some((a * b, o))
    };
    let mut worst: f64 = 0.0;
    for n0 in 0..d.saturating_sub(1) {
        for n1 in 0..d.saturating_sub(1) {
            let occ = [n0, n1];
            for i in 0..2 {
                for j in 0..2 {
                    for dagger in [true, false] {
                        let bi = move |o| lower(o, i);
                        let bj = move |o| if dagger { raise(o, j) } else { lower(o, j) };
                        let mut acc: BTreeMap<[usize; 2], f64> = BTreeMap::new();
                        if let Some((v, o)) = compose(&bj, &bi, occ) {
                            *acc.entry(o).or_default() += v;
                        }
                        if let Some((v, o)) = compose(&bi, &bj, occ) {
                            *acc.entry(o).or_default() -= v;
                        }
                        if dagger && i == j {
                            *acc.entry(occ).or_default() -= 1.0;
                        }
                        worst = acc.values().fold(worst, |w, v| w.max(v.abs()));
                    }
                }
            }
        }
    }
    worst
}

/// `Ω(n_0 + n_1) - Λ(b_0† b_1 + b_1† b_0)` on `d²` levels, index `n_0 d + n_1`.
fn pair_hamiltonian(omega: f64, lambda: f64, d: usize) -> SparseHamiltonian {
    let mut h = SparseHamiltonian::new(d * d);
    for i in 0..d {
        for j in 0..d {
            let s = i * d + j;
            h.add(s, s, Complex64::new(omega * (i + j) as f64, 0.0));
            if i + 1 < d && j > 0 {
                let t = (i + 1) * d + (j - 1);
                let amp = -lambda * ((i + 1) as f64).sqrt() * (j as f64).sqrt();
                h.add(t, s, Complex64::new(amp, 0.0));
                h.add(s, t, Complex64::new(amp, 0.0));
            }
        }
    }
    h
}

/// Worst Poisson tail of any two-mode product met during `steps` interactions.
fn tail_mean(cfg: &BosonConfig, steps: usize) -> f64 {
    let (c, s) = cfg.lambda.cos_sin();
    let b = cfg.betas.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let r0 = cfg.chi0.norm();
    // |χ_n| never exceeds the larger of |χ_0| and the fixed point of the recursion
    let ceiling = if c.abs() < 1.0 { r0.max(s.abs() * b / (1.0 - c.abs())) } else { r0 };
    let mut r = r0;
    let mut mu = r * r;
    for _ in 0..steps {
        mu = mu.max(r * r + b * b);
        r = (c.abs() * r + s.abs() * b).min(ceiling);
        mu = mu.max(r * r);
    }
    mu
}

/// Plays the bosonic game with one fresh bath mode per label, every mode cut at `d` levels.
pub fn boson_simulate(cfg: &BosonConfig, gammas: &[u32], d: usize) -> Result<OracleReport> {
    cfg.validate()?;
    if d < 2 {
        return Err(Error::config("Fock truncation must be at least 2"));
    }
    let block = d.checked_pow(3).unwrap_or(usize::MAX);
    if block > BOSON_BLOCK_CAP {
        return Err(Error::Resource {
            what: format!("boson oracle at truncation d = {d}"),
            required: format!("a dense block of d^3 = {block} amplitudes"),
            cap: format!("{BOSON_BLOCK_CAP}"),
        });
    }
    let mu = tail_mean(cfg, gammas.len());
    let tail = poisson_tail(mu, d);
    if tail >= BOSON_TAIL_TOL {
        let need = (d..).find(|&k| poisson_tail(mu, k) < BOSON_TAIL_TOL).unwrap_or(d);
        return Err(Error::Resource {
            what: format!("Fock truncation for mean photon number up to {mu:.3}"),
            required: format!("d >= {need}"),
            cap: format!("d = {d} (tail {tail:e})"),
        });
    }
    let closed = run_boson(cfg, gammas.len(), Some(gammas))?;
    let omega = cfg.omega.radians();
    let unitary = BlockUnitary::new(&pair_hamiltonian(omega, cfg.lambda.radians(), d), |s| s / d + s % d, 1.0)?;
    let free: Vec<Complex64> = (0..d).map(|k| Complex64::from_polar(1.0, -omega * k as f64)).collect();

    let mut pending: Vec<CVector> = gammas
        .iter()
        .map(|&g| truncated_coherent(cfg.betas[g as usize], d))
        .collect();
    // system ⊗ register, d × r
    let mut phi = CMatrix::from_column_slice(d, 1, truncated_coherent(cfg.chi0, d).as_slice());
    let mut discarded = 0.0;

    let mut steps = Vec::with_capacity(gammas.len() + 1);
    steps.push(observe(&phi, &pending, cfg, gammas, 0, closed.values[0], d)?);
    for n in 1..=gammas.len() {
        let incoming = &pending[n - 1];
        let r = phi.ncols();
        let mut joint = CMatrix::zeros(d, r * d);
        let mut pair = vec![Complex64::default(); d * d];
        for a in 0..r {
            for i in 0..d {
                for j in 0..d {
                    pair[i * d + j] = phi[(i, a)] * incoming[j];
                }
            }
            unitary.apply(&mut pair);
            for i in 0..d {
                for j in 0..d {
                    joint[(i, a * d + j)] = pair[i * d + j];
                }
            }
        }
        for v in pending.iter_mut().skip(n) {
            for (k, z) in v.iter_mut().enumerate() {
                *z *= free[k];
            }
        }
        // Schmidt vectors of the system side from the eigenvectors of J J†
        let eig = (&joint * joint.adjoint()).symmetric_eigen();
        let keep: Vec<usize> = (0..d).filter(|&k| eig.eigenvalues[k] > 1e-30).collect();
        discarded += (0..d)
            .filter(|k| !keep.contains(k))
            .map(|k| eig.eigenvalues[k].abs())
            .sum::<f64>();
        phi = CMatrix::from_fn(d, keep.len(), |i, c| {
            eig.eigenvectors[(i, keep[c])] * eig.eigenvalues[keep[c]].sqrt()
        });
        steps.push(observe(&phi, &pending, cfg, gammas, n, closed.values[n], d)?);
    }

    Ok(OracleReport {
        kind: OracleKind::Boson,
        config: serde_json::to_value(cfg)?,
        gammas: gammas.to_vec(),
        truncation: Some(d),
        truncation_tail_bound: Some(tail),
        discarded_weight: Some(discarded),
        algebra_defect: boson_algebra_defect(d),
        steps,
    })
}

fn observe(
    phi: &CMatrix,
    pending: &[CVector],
    cfg: &BosonConfig,
    gammas: &[u32],
    n: usize,
    chi: Complex64,
    d: usize,
) -> Result<OracleStep> {
    let amps: Vec<Complex64> = (0..d).flat_map(|i| phi.row(i).iter().copied().collect::<Vec<_>>()).collect();
    let state = StateVector::new(amps, vec![d, phi.ncols()])?;
    let rho = partial_trace_system(&state);

    let mut b0 = Complex64::default();
    let mut occupation = 0.0;
    for i in 0..d {
        occupation += i as f64 * rho[(i, i)].re;
        if i > 0 {
            b0 += rho[(i, i - 1)] * (i as f64).sqrt();
        }
    }
    let reference = truncated_coherent(chi, d);
    let fidelity = (reference.adjoint() * &rho * &reference)[(0, 0)].re;

    let rotation = Complex64::from_polar(1.0, -cfg.omega.radians() * n as f64);
    let idle_fidelity = pending
        .iter()
        .zip(gammas)
        .skip(n)
        .map(|(v, &g)| {
            let want = truncated_coherent(cfg.betas[g as usize] * rotation, d);
            (want.adjoint() * v)[(0, 0)].norm_sqr()
        })
        .fold(1.0, f64::min);

    Ok(OracleStep {
        n,
        expect_a0: [b0.re, b0.im],
        occupation,
        entropy: von_neumann_entropy(&rho)?,
        purity: purity(&rho),
        delta_vs_closed_form: (b0 - chi).norm(),
        reduced_density: None,
        diagonal_defect: None,
        fidelity: Some(fidelity),
        idle_fidelity,
        norm_error: (state.norm() - 1.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boson::{roots_of_unity, PiMultiple};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn poisson_tail_values() {
        assert_eq!(poisson_tail(0.0, 3), 0.0);
        // P(X >= 1) = 1 - e^{-μ}
        assert!((poisson_tail(0.5, 1) - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        // P(X >= 3) for μ = 2: 1 - e^{-2}(1 + 2 + 2)
        let want = 1.0 - (-2.0f64).exp() * 5.0;
        assert!((poisson_tail(2.0, 3) - want).abs() < 1e-14);
        assert!(poisson_tail(4.0, 24) < 1e-9);
    }

    #[test]
    fn truncated_state_is_normalized_eigenvector() {
        let v = truncated_coherent(c(0.8, -0.3), 24);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        for k in 1..23 {
            let lowered = v[k] * (k as f64).sqrt();
            assert!((lowered - c(0.8, -0.3) * v[k - 1]).norm() < 1e-14);
        }
    }

    #[test]
    fn algebra() {
        assert!(boson_algebra_defect(24) < 1e-12);
    }

    #[test]
    fn free_evolution() {
        let mut cfg = BosonConfig::new(PiMultiple::Irrational(0.9), PiMultiple::integer(0), roots_of_unity(2));
        cfg.chi0 = c(0.7, 0.2);
        let r = boson_simulate(&cfg, &[0, 1, 1, 0], 24).unwrap();
        for s in &r.steps {
            let want = Complex64::from_polar(1.0, -0.9 * s.n as f64) * cfg.chi0;
            assert!((Complex64::new(s.expect_a0[0], s.expect_a0[1]) - want).norm() < 1e-10);
            assert!(s.fidelity.unwrap() >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn swap_step() {
        let betas = vec![c(0.6, -0.4), c(-0.2, 0.9)];
        let mut cfg = BosonConfig::new(PiMultiple::integer(0), "1/2:pi".parse().unwrap(), betas.clone());
        cfg.chi0 = c(0.3, 0.3);
        let r = boson_simulate(&cfg, &[1], 24).unwrap();
        let got = Complex64::new(r.steps[1].expect_a0[0], r.steps[1].expect_a0[1]);
        assert!((got - Complex64::i() * betas[1]).norm() < 1e-6);
    }

    #[test]
    fn stays_a_product_of_coherent_states() {
        let mut cfg = BosonConfig::new(PiMultiple::Irrational(1.0), "1/3:pi".parse().unwrap(), roots_of_unity(3));
        cfg.chi0 = c(0.5, -0.2);
        let r = boson_simulate(&cfg, &[2, 0, 1, 1, 0], 24).unwrap();
        assert!(r.passed(), "{:?}", r.checks());
        assert!(r.discarded_weight.unwrap() < 1e-12);
    }

    #[test]
    fn truncation_too_small() {
        let mut cfg = BosonConfig::new(PiMultiple::Irrational(1.0), "1/3:pi".parse().unwrap(), roots_of_unity(3));
        cfg.chi0 = c(1.5, 0.0);
        match boson_simulate(&cfg, &[0, 1], 6) {
            Err(Error::Resource { required, .. }) => assert!(required.starts_with("d >= ")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(boson_simulate(&cfg, &[0], 60), Err(Error::Resource { .. })));
    }
}
