//! Coherent-state dynamics of the bosonic game.
//!
//! With the system and every bath mode in coherent states, the system stays
//! an eigenstate of `b_0` with eigenvalue `χ_n`, which evolves as
//!
//! `χ_{n+1} = cos Λ e^{-iΩ} χ_n + i e^{-iΩ(n+1)} sin Λ β_{γ_{n+1}}`
//!
//! where `Ω = ωτ` and `Λ = λτ`. Angles given as exact rational multiples of
//! π get their phases from integer residues, so long runs do not drift and
//! the regime classification is exact. Plain floats are always treated as
//! irrational multiples of π.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{Trajectory, VertexStream};

/// An angle, either `num/den · π` exactly or a float in radians.
///
/// Serializes as its flag syntax, e.g. `"7/13:pi"` or `"1.5"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PiMultiple {
    Rational { num: i64, den: u64 },
    Irrational(f64),
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `e^{iπ res/den}` for `0 <= res < 2 den`, exact at multiples of π/2.
fn pi_phase(res: u128, den: u128) -> Complex64 {
    if (2 * res).is_multiple_of(den) {
        return match (2 * res / den) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let angle = std::f64::consts::PI * (res as f64 / den as f64);
    let (s, c) = angle.sin_cos();
    Complex64::new(c, s)
}

impl PiMultiple {
    /// `num/den · π` in lowest terms.
    pub fn rational(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::config("zero denominator in π multiple"));
        }
        let g = gcd(num.unsigned_abs(), den).max(1);
        Ok(PiMultiple::Rational {
            num: num / g as i64,
            den: den / g,
        })
    }

    pub fn integer(p: i64) -> Self {
        PiMultiple::Rational { num: p, den: 1 }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            PiMultiple::Rational { num, den } => std::f64::consts::PI * num as f64 / den as f64,
            PiMultiple::Irrational(x) => x,
        }
    }

    /// `p` when the angle is exactly `pπ`.
    pub fn integer_multiple(&self) -> Option<i64> {
        match *self {
            PiMultiple::Rational { num, den: 1 } => Some(num),
            _ => None,
        }
    }

    /// `e^{i k θ}`.
    pub fn phase(&self, k: i64) -> Complex64 {
        match *self {
            PiMultiple::Rational { num, den } => {
                let two_den = 2 * den as i128;
                let res = (k as i128 * num as i128).rem_euclid(two_den);
                pi_phase(res as u128, den as u128)
            }
            PiMultiple::Irrational(x) => Complex64::from_polar(1.0, k as f64 * x),
        }
    }

    /// `(cos θ, sin θ)`.
    pub fn cos_sin(&self) -> (f64, f64) {
        let p = self.phase(1);
        (p.re, p.im)
    }
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PiMultiple::Rational { num, den: 1 } => write!(f, "{num}:pi"),
            PiMultiple::Rational { num, den } => write!(f, "{num}/{den}:pi"),
            PiMultiple::Irrational(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for PiMultiple {
    type Err = Error;

    /// `r/s:pi`, `p:pi`, or a float in radians.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix(":pi") {
            let bad = || Error::config(format!("malformed π multiple '{s}'"));
            return match body.split_once('/') {
                Some((r, d)) => {
                    let r: i64 = r.trim().parse().map_err(|_| bad())?;
                    let d: u64 = d.trim().parse().map_err(|_| bad())?;
                    Self::rational(r, d)
                }
                None => Ok(Self::integer(body.trim().parse().map_err(|_| bad())?)),
            };
        }
        let x: f64 = s
            .parse()
            .map_err(|_| Error::config(format!("expected 'r/s:pi', 'p:pi' or a float, got '{s}'")))?;
        if !x.is_finite() {
            return Err(Error::config("angle must be finite"));
        }
        Ok(PiMultiple::Irrational(x))
    }
}

impl From<PiMultiple> for String {
    fn from(p: PiMultiple) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for PiMultiple {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Parameters of the bosonic game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BosonConfig {
    /// `Ω = ωτ`.
    pub omega: PiMultiple,
    /// `Λ = λτ`.
    pub lambda: PiMultiple,
    /// Coherent amplitudes `β_j` of the bath preparations.
    pub betas: Vec<Complex64>,
    pub chi0: Complex64,
    pub seed: u64,
    pub stream: u64,
}

impl BosonConfig {
    pub fn new(omega: PiMultiple, lambda: PiMultiple, betas: Vec<Complex64>) -> Self {
        Self {
            omega,
            lambda,
            betas,
            chi0: Complex64::new(0.0, 0.0),
            seed: 0,
            stream: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.betas.is_empty() {
            return Err(Error::config("at least one bath amplitude β is required"));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !self.betas.iter().all(finite) || !finite(&self.chi0) {
            return Err(Error::config("amplitudes must be finite"));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.betas.len()
    }
}

/// `e^{iθ_j}` with `θ_j = 2πj/M`.
pub fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| PiMultiple::Rational { num: 2 * j as i64, den: m as u64 }.phase(1))
        .collect()
}

/// Coefficients of one step, shared by every step of a run.
#[derive(Debug, Clone)]
struct StepCoefficients {
    /// `cos Λ e^{-iΩ}`.
    contraction: Complex64,
    sin_lambda: f64,
    omega: PiMultiple,
}

impl StepCoefficients {
    fn new(cfg: &BosonConfig) -> Self {
        let (c, s) = cfg.lambda.cos_sin();
        Self {
            contraction: cfg.omega.phase(-1) * c,
            sin_lambda: s,
            omega: cfg.omega,
        }
    }

    /// `i e^{-iΩ(n+1)} sin Λ`.
    fn kick(&self, n: u64) -> Complex64 {
        let k = -(n as i64).wrapping_add(1);
        Complex64::i() * self.omega.phase(k) * self.sin_lambda
    }

    fn step(&self, chi: Complex64, beta: Complex64, n: u64) -> Complex64 {
        self.contraction * chi + self.kick(n) * beta
    }
}

/// `χ_{n+1}` from `χ_n` with bath label `gamma`.
pub fn step_chi(chi: Complex64, gamma: u32, n: u64, cfg: &BosonConfig) -> Result<Complex64> {
    let beta = *cfg
        .betas
        .get(gamma as usize)
        .ok_or_else(|| Error::input(format!("label {gamma} out of range for M = {}", cfg.m())))?;
    Ok(StepCoefficients::new(cfg).step(chi, beta, n))
}

/// The step written as a chaos-game move `χ ↦ (1 - W) χ + W β̃(n, γ)`.
#[derive(Debug, Clone)]
pub struct EffectiveTransform {
    /// `W = 1 - cos Λ e^{-iΩ}`.
    pub w: Complex64,
    coeffs: StepCoefficients,
    betas: Vec<Complex64>,
}

impl EffectiveTransform {
    /// `β̃(n, j) = i e^{-i(n+1)Ω} sin Λ β_j / W`.
    pub fn beta_tilde(&self, n: u64, j: usize) -> Complex64 {
        self.coeffs.kick(n) * self.betas[j] / self.w
    }

    pub fn apply(&self, chi: Complex64, n: u64, gamma: usize) -> Complex64 {
        (1.0 - self.w) * chi + self.w * self.beta_tilde(n, gamma)
    }
}

/// `W = 1 - cos Λ e^{-iΩ}`, defined in every regime.
pub fn effective_weight(cfg: &BosonConfig) -> Complex64 {
    1.0 - StepCoefficients::new(cfg).contraction
}

/// Fails with [`Error::Unsupported`] in the pure-orbit regime (`Λ = pπ`), where
/// every effective vertex vanishes.
pub fn effective_transform(cfg: &BosonConfig) -> Result<EffectiveTransform> {
    cfg.validate()?;
    if let Some(p) = cfg.lambda.integer_multiple() {
        return Err(Error::Unsupported(format!(
            "Λ = {p}π is the pure-orbit regime: sin Λ = 0 and there are no effective vertices"
        )));
    }
    let coeffs = StepCoefficients::new(cfg);
    let w = 1.0 - coeffs.contraction;
    if w.norm() == 0.0 {
        return Err(Error::Unsupported("W = 0: pure-orbit regime".into()));
    }
    Ok(EffectiveTransform {
        w,
        coeffs,
        betas: cfg.betas.clone(),
    })
}

/// Plays `n` steps from `chi0`; labels from the stream unless `forced`.
pub fn run_boson(
    cfg: &BosonConfig,
    n: usize,
    forced: Option<&[u32]>,
) -> Result<Trajectory<Complex64>> {
    cfg.validate()?;
    let gammas: Vec<u32> = match forced {
        Some(g) => {
            if let Some(bad) = g.iter().find(|&&x| x as usize >= cfg.m()) {
                return Err(Error::input(format!("label {bad} out of range for M = {}", cfg.m())));
            }
            g.to_vec()
        }
        None => VertexStream::new(cfg.seed, cfg.stream, cfg.m())?.take(n).collect(),
    };
    let coeffs = StepCoefficients::new(cfg);
    let mut values = Vec::with_capacity(gammas.len() + 1);
    let mut chi = cfg.chi0;
    values.push(chi);
    for (k, &g) in gammas.iter().enumerate() {
        chi = coeffs.step(chi, cfg.betas[g as usize], k as u64);
        values.push(chi);
    }
    Ok(Trajectory { gammas, values })
}

/// Qualitative regime of the bosonic game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `Ω ∈ 2πℤ`: the classical game on `M` fixed vertices.
    PerfectGame,
    /// `Ω` an odd multiple of π: vertices alternate sign, `2M` in total.
    MirrorDoubled { vertices: usize },
    /// `Ω = πr/s`: `sM` vertices for even `r`, `2sM` for odd `r`.
    RationalRotation { vertices: usize },
    /// `Ω/π` irrational: a continuously rotating pattern.
    IrrationalRotation,
    /// `Λ = pπ`, `Ω = πr/s`: `χ_n` cycles through `s` or `2s` points.
    PureOrbitDiscrete { cardinality: u64 },
    /// `Λ = pπ`, `Ω/π` irrational: `χ_n` fills its circle.
    PureOrbitContinuous,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::PerfectGame => "PerfectGame",
            Regime::MirrorDoubled { .. } => "MirrorDoubled",
            Regime::RationalRotation { .. } => "RationalRotation",
            Regime::IrrationalRotation => "IrrationalRotation",
            Regime::PureOrbitDiscrete { .. } => "PureOrbitDiscrete",
            Regime::PureOrbitContinuous => "PureOrbitContinuous",
        }
    }

    /// Number of effective vertices, for the vertex-game regimes that carry one.
    pub fn vertex_count(&self) -> Option<usize> {
        match *self {
            Regime::MirrorDoubled { vertices } | Regime::RationalRotation { vertices } => {
                Some(vertices)
            }
            _ => None,
        }
    }

    pub fn orbit_cardinality(&self) -> Option<u64> {
        match *self {
            Regime::PureOrbitDiscrete { cardinality } => Some(cardinality),
            _ => None,
        }
    }
}

pub fn classify_regime(cfg: &BosonConfig) -> Regime {
    let m = cfg.m();
    if let Some(p) = cfg.lambda.integer_multiple() {
        return match cfg.omega {
            PiMultiple::Rational { num, den } => Regime::PureOrbitDiscrete {
                cardinality: pure_orbit_size(p, num, den),
            },
            PiMultiple::Irrational(_) => Regime::PureOrbitContinuous,
        };
    }
    match cfg.omega {
        PiMultiple::Rational { num, den: 1 } if num % 2 == 0 => Regime::PerfectGame,
        PiMultiple::Rational { num: _, den: 1 } => Regime::MirrorDoubled { vertices: 2 * m },
        PiMultiple::Rational { num, den } => {
            let per = if num % 2 == 0 { den } else { 2 * den };
            Regime::RationalRotation {
                vertices: per as usize * m,
            }
        }
        PiMultiple::Irrational(_) => Regime::IrrationalRotation,
    }
}

/// `s` when `ps + r` is even, else `2s`.
fn pure_orbit_size(p: i64, r: i64, s: u64) -> u64 {
    let parity = (p as i128 * s as i128 + r as i128).rem_euclid(2);
    if parity == 0 {
        s
    } else {
        2 * s
    }
}

/// Size of `{χ_n}` when `Λ = pπ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitSize {
    Finite(u64),
    Continuous,
}

pub fn orbit_cardinality(cfg: &BosonConfig) -> Result<OrbitSize> {
    let p = cfg.lambda.integer_multiple().ok_or_else(|| {
        Error::input(format!("orbit cardinality needs Λ = pπ exactly, got {}", cfg.lambda))
    })?;
    Ok(match cfg.omega {
        PiMultiple::Rational { num, den } => OrbitSize::Finite(pure_orbit_size(p, num, den)),
        PiMultiple::Irrational(_) => OrbitSize::Continuous,
    })
}

/// Absolute tolerance for merging effective vertices.
pub const VERTEX_DEDUP_TOL: f64 = 1e-9;

/// Distinct values of `β̃(n, j)` over one period of `n` and all `j`.
///
/// The count equals the regime's vertex count for β sets in general position;
/// symmetric sets (or zero amplitudes) can make some images coincide.
pub fn effective_vertices(cfg: &BosonConfig) -> Result<Vec<Complex64>> {
    let regime = classify_regime(cfg);
    let period = match (regime, cfg.omega) {
        (Regime::PerfectGame, _) => 1,
        (Regime::MirrorDoubled { .. }, _) => 2,
        (Regime::RationalRotation { .. }, PiMultiple::Rational { num, den }) => {
            if num % 2 == 0 {
                den
            } else {
                2 * den
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "no finite vertex set in regime {}",
                regime.tag()
            )))
        }
    };
    let t = effective_transform(cfg)?;
    let all = (0..period).flat_map(|n| (0..cfg.m()).map(move |j| (n, j)));
    Ok(distinct_points(all.map(|(n, j)| t.beta_tilde(n, j)), VERTEX_DEDUP_TOL))
}

/// Keeps the first of every cluster of points closer than `tol`.
pub fn distinct_points(points: impl IntoIterator<Item = Complex64>, tol: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for p in points {
        if !out.iter().any(|q| (p - q).norm() <= tol) {
            out.push(p);
        }
    }
    out
}
