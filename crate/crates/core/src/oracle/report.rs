use serde::{Deserialize, Serialize};

/// Observables of the system mode after `n` interactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleStep {
    pub n: usize,
    /// `⟨a_0⟩` as `[re, im]`.
    pub expect_a0: [f64; 2],
    /// `⟨a_0† a_0⟩`.
    pub occupation: f64,
    pub entropy: f64,
    pub purity: f64,
    /// Distance to the closed form: `|N_n - ⟨f_0†f_0⟩|` or `|χ_n - ⟨b_0⟩|`.
    pub delta_vs_closed_form: f64,
    /// Fermions: `ρ_S` as `[[re, im]; 4]`, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced_density: Option<Vec<[f64; 2]>>,
    /// Fermions: max distance of `ρ_S` from `diag(1 - N_n, N_n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal_defect: Option<f64>,
    /// Bosons: `⟨χ_n|ρ_S|χ_n⟩` against the closed-form coherent state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    /// Worst overlap of a not-yet-used bath mode with its freely rotated preparation.
    pub idle_fidelity: f64,
    /// `|‖ψ‖ - 1|`.
    pub norm_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Fermion,
    Boson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub kind: OracleKind,
    pub config: serde_json::Value,
    pub gammas: Vec<u32>,
    /// Bosons: Fock cutoff.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// Bosons: a-priori bound on the probability mass beyond the cutoff.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_tail_bound: Option<f64>,
    /// Bosons: weight dropped when compressing retired bath modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discarded_weight: Option<f64>,
    /// Max deviation of the mode operators from their canonical relations.
    pub algebra_defect: f64,
    pub steps: Vec<OracleStep>,
}

/// One pass/fail line of [`OracleReport::checks`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            pass: value <= bound,
        }
    }

    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            pass: value >= bound,
        }
    }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn min_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, f64::min)
}

impl OracleReport {
    pub fn max_delta(&self) -> f64 {
        max_of(self.steps.iter().map(|s| s.delta_vs_closed_form))
    }

    pub fn max_expect_a0(&self) -> f64 {
        max_of(self.steps.iter().map(|s| s.expect_a0[0].hypot(s.expect_a0[1])))
    }

    pub fn min_purity(&self) -> f64 {
        min_of(self.steps.iter().map(|s| s.purity))
    }

    pub fn max_diagonal_defect(&self) -> f64 {
        max_of(self.steps.iter().filter_map(|s| s.diagonal_defect))
    }

    pub fn min_fidelity(&self) -> f64 {
        min_of(self.steps.iter().filter_map(|s| s.fidelity))
    }

    pub fn max_norm_error(&self) -> f64 {
        max_of(self.steps.iter().map(|s| s.norm_error))
    }

    pub fn min_idle_fidelity(&self) -> f64 {
        min_of(self.steps.iter().map(|s| s.idle_fidelity))
    }

    /// The agreement checks appropriate to the kind of run.
    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![
            Check::at_most("norm drift", self.max_norm_error(), 1e-8),
            Check::at_most("operator algebra", self.algebra_defect, 1e-12),
            Check::at_least("idle-mode fidelity", self.min_idle_fidelity(), 1.0 - 1e-10),
        ];
        match self.kind {
            OracleKind::Fermion => out.extend([
                Check::at_most("max |N_n - <f0+ f0>|", self.max_delta(), 1e-10),
                Check::at_most("max |<f0>|", self.max_expect_a0(), 1e-12),
                Check::at_most("rho_S diagonal defect", self.max_diagonal_defect(), 1e-10),
            ]),
            OracleKind::Boson => out.extend([
                Check::at_most("max |<b0> - chi_n|", self.max_delta(), 1e-6),
                Check::at_least("min purity", self.min_purity(), 1.0 - 1e-6),
                Check::at_least("min coherent fidelity", self.min_fidelity(), 1.0 - 1e-6),
            ]),
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.pass)
    }
}
