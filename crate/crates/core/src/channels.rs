//! Jaynes-Cummings dynamics at resonance, reduced to the qubit.
//!
//! The reduced map from time 0 to `t` is amplitude damping with real survival
//! amplitude `G(t)`: the excited population scales by `G^2` and the coherence
//! by `G`. `G` solves `dG/dt = -gamma(t) G / 2` with `G(0) = 1`, and the map
//! between two times is amplitude damping with the ratio of the two
//! amplitudes, which exceeds one in modulus whenever information flows back.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix};

/// Below this `|delta^2|` the critically damped closed form is used.
pub const CRITICAL_DELTA2: f64 = 1e-12;
/// Smallest `|G(t)|` for which an interval map starting at `t` is evaluated.
pub const SINGULARITY_FLOOR: f64 = 1e-8;
/// Smallest decay-rate denominator treated as finite.
pub const RATE_DENOMINATOR_FLOOR: f64 = 1e-12;
/// Decay rates are clamped to this magnitude inside the RK4 oracle.
pub const RATE_CLAMP: f64 = 1e6;
pub const DEFAULT_RK4_STEP: f64 = 1e-4;

/// Spectral parameters of the Lorentzian bath: coupling `gamma0` and width `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JCParams {
    pub gamma0: f64,
    pub lambda: f64,
}

impl JCParams {
    pub fn new(gamma0: f64, lambda: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma0 = {gamma0} must be positive")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("lambda = {lambda} must be positive")));
        }
        Ok(Self { gamma0, lambda })
    }

    /// `delta^2 = lambda^2 - 2 gamma0 lambda`; negative in the oscillatory regime.
    #[inline]
    pub fn delta2(&self) -> f64 {
        self.lambda * self.lambda - 2.0 * self.gamma0 * self.lambda
    }

    /// `gamma0 < lambda / 2`: monotone decay, divisible dynamics.
    pub fn is_markovian(&self) -> bool {
        self.gamma0 < 0.5 * self.lambda
    }
}

/// Survival amplitude `G(t)`.
pub fn decay_amplitude(t: f64, p: &JCParams) -> f64 {
    let lam = p.lambda;
    let d2 = p.delta2();
    if d2.abs() < CRITICAL_DELTA2 {
        (-0.5 * lam * t).exp() * (1.0 + 0.5 * lam * t)
    } else if d2 > 0.0 {
        // exp(-lam t/2) [cosh(dt/2) + (lam/d) sinh(dt/2)] written with decaying
        // exponentials only, so large t cannot overflow.
        let d = d2.sqrt();
        let slow = (0.5 * (d - lam) * t).exp();
        let fast = (-0.5 * (d + lam) * t).exp();
        0.5 * (slow + fast) + 0.5 * (lam / d) * (slow - fast)
    } else {
        let w = (-d2).sqrt();
        let (s, c) = (0.5 * w * t).sin_cos();
        (-0.5 * lam * t).exp() * (c + (lam / w) * s)
    }
}

/// Decay rate as `(numerator, denominator)` in a form that stays bounded for large t.
fn rate_parts(t: f64, p: &JCParams) -> (f64, f64) {
    let lam = p.lambda;
    let g0 = p.gamma0;
    let d2 = p.delta2();
    if d2.abs() < CRITICAL_DELTA2 {
        (lam * g0 * t, 1.0 + 0.5 * lam * t)
    } else if d2 > 0.0 {
        let d = d2.sqrt();
        let th = (0.5 * d * t).tanh();
        (2.0 * lam * g0 * th, d + lam * th)
    } else {
        let w = (-d2).sqrt();
        let (s, c) = (0.5 * w * t).sin_cos();
        (2.0 * lam * g0 * s, w * c + lam * s)
    }
}

/// Time-dependent decay rate `gamma(t)`; negative values signal backflow.
pub fn decay_rate(t: f64, p: &JCParams) -> Result<f64> {
    let (num, den) = rate_parts(t, p);
    if den.abs() < RATE_DENOMINATOR_FLOOR {
        return Err(Error::SingularRate { t });
    }
    Ok(num / den)
}

/// Amplitude-damping parameter of an interval map `Lambda(t + tau, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRatio {
    pub g: f64,
    pub singular: bool,
}

impl SurvivalRatio {
    pub fn new(g: f64) -> Self {
        Self { g, singular: false }
    }

    pub fn singular() -> Self {
        Self {
            g: f64::NAN,
            singular: true,
        }
    }

    pub fn value(&self) -> Option<f64> {
        (!self.singular).then_some(self.g)
    }

    pub fn get(&self) -> Result<f64> {
        self.value().ok_or(Error::SingularInterval)
    }

    /// `|g| <= 1`, i.e. the interval map is completely positive.
    pub fn is_cp(&self) -> bool {
        !self.singular && self.g.abs() <= 1.0
    }
}

/// Interval map `Lambda(t + tau, t)` as the ratio `G(t + tau) / G(t)`.
pub fn interval_map(t: f64, tau: f64, p: &JCParams, floor: f64) -> SurvivalRatio {
    let start = decay_amplitude(t, p);
    if start.abs() < floor {
        return SurvivalRatio::singular();
    }
    SurvivalRatio::new(decay_amplitude(t + tau, p) / start)
}

/// Amplitude damping with real parameter `g` on a qubit state.
#[inline]
pub(crate) fn damp(g: f64, rho: &DensityMatrix) -> DensityMatrix {
    let m = rho.matrix();
    let pop = g * g * m[(0, 0)].re;
    let coh = m[(0, 1)] * g;
    let mut out = *m;
    out[(0, 0)] = Complex64::new(pop, 0.0);
    out[(1, 1)] = Complex64::new(1.0 - pop, 0.0);
    out[(0, 1)] = coh;
    out[(1, 0)] = coh.conj();
    DensityMatrix::from_trusted(out)
}

/// Applies the interval map to a qubit state.
///
/// The output is Hermitian with unit trace. It is positive whenever
/// `|g| <= 1`, or when `rho` itself lies in the image of an earlier map with
/// `|G| <= |1/g|`.
pub fn apply_ad(g: &SurvivalRatio, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let g = g.get()?;
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: rho.dim(),
        });
    }
    Ok(damp(g, rho))
}

/// `(Lambda (x) 1) |phi+><phi+|` for an interval map. Unit trace and
/// Hermitian; positive semidefinite iff `|g| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiState {
    pub matrix: ComplexMatrix,
}

pub(crate) fn choi_matrix(g: f64) -> ComplexMatrix {
    // Basis order |ee>, |eg>, |ge>, |gg>.
    let mut m = ComplexMatrix::zeros(4).expect("dim 4");
    m[(0, 0)] = Complex64::new(0.5 * g * g, 0.0);
    m[(2, 2)] = Complex64::new(0.5 * (1.0 - g * g), 0.0);
    m[(3, 3)] = Complex64::new(0.5, 0.0);
    m[(0, 3)] = Complex64::new(0.5 * g, 0.0);
    m[(3, 0)] = Complex64::new(0.5 * g, 0.0);
    m
}

pub fn choi_of(g: &SurvivalRatio) -> Result<ChoiState> {
    Ok(ChoiState {
        matrix: choi_matrix(g.get()?),
    })
}

/// Sampled solution of the master equation.
#[derive(Clone, Debug)]
pub struct GTrajectory {
    pub times: Vec<f64>,
    /// `G(t)` recovered as the coherence ratio `rho_eg(t) / rho_eg(0)`.
    pub amplitude: Vec<f64>,
    /// Excited-state population starting from `|+><+|`.
    pub excited_population: Vec<f64>,
    /// Set when `|gamma|` had to be clamped near a pole of the rate.
    pub clamped: bool,
}

fn lindblad_rhs(rate: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    // gamma (s- rho s+ - {s+ s-, rho} / 2) with s- = |g><e|, s+ s- = |e><e|.
    let mut d = ComplexMatrix::zeros(2).expect("dim 2");
    let pee = rho[(0, 0)];
    d[(0, 0)] = -pee * rate;
    d[(1, 1)] = pee * rate;
    d[(0, 1)] = -rho[(0, 1)] * (0.5 * rate);
    d[(1, 0)] = -rho[(1, 0)] * (0.5 * rate);
    d
}

/// Classical fourth-order Runge-Kutta integration of the time-local master
/// equation `d rho/dt = gamma(t) L(rho)` starting from `|+><+|`, sampled at
/// every step (the final step is shortened to land on `t_end`).
pub fn integrate_lindblad(p: &JCParams, t_end: f64, dt: f64) -> Result<GTrajectory> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParams(format!("t_end = {t_end} must be >= 0")));
    }
    if !(dt > 0.0 && dt <= 1e-3) {
        return Err(Error::InvalidParams(format!("dt = {dt} must lie in (0, 1e-3]")));
    }
    let mut clamped = false;
    let mut rate = |t: f64| {
        let (num, den) = rate_parts(t, p);
        let raw = num / den;
        if raw.is_nan() {
            clamped = true;
            0.0
        } else if raw.abs() > RATE_CLAMP {
            clamped = true;
            raw.signum() * RATE_CLAMP
        } else {
            raw
        }
    };

    let mut rho = ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]).expect("dim 2");
    let coh0 = rho[(0, 1)].re;
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut amplitude = Vec::with_capacity(steps + 1);
    let mut excited = Vec::with_capacity(steps + 1);
    times.push(0.0);
    amplitude.push(1.0);
    excited.push(rho[(0, 0)].re);

    let mut t = 0.0;
    for i in 0..steps {
        let next = if i + 1 == steps { t_end } else { (i + 1) as f64 * dt };
        let h = next - t;
        let k1 = lindblad_rhs(rate(t), &rho);
        let k2 = lindblad_rhs(rate(t + 0.5 * h), &(rho + k1 * (0.5 * h)));
        let k3 = lindblad_rhs(rate(t + 0.5 * h), &(rho + k2 * (0.5 * h)));
        let k4 = lindblad_rhs(rate(next), &(rho + k3 * h));
        rho = rho + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        t = next;
        times.push(t);
        amplitude.push(rho[(0, 1)].re / coh0);
        excited.push(rho[(0, 0)].re);
    }
    Ok(GTrajectory {
        times,
        amplitude,
        excited_population: excited,
        clamped,
    })
}

/// Set of free (Markovian) operations: JC dynamics with fixed `lambda` and
/// `gamma0` ranging over `[gamma0_min, gamma0_max]`, seeded by a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeFamily {
    pub lambda: f64,
    pub gamma0_min: f64,
    pub gamma0_max: f64,
    pub members: Vec<JCParams>,
}

impl FreeFamily {
    /// One-member family, used to probe the state-only part of the optimizations.
    pub fn single(p: JCParams) -> Result<Self> {
        if !p.is_markovian() {
            return Err(Error::InvalidParams(format!(
                "gamma0 = {} is not below lambda / 2 = {}",
                p.gamma0,
                0.5 * p.lambda
            )));
        }
        Ok(Self {
            lambda: p.lambda,
            gamma0_min: p.gamma0,
            gamma0_max: p.gamma0,
            members: vec![p],
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn gamma0s(&self) -> impl Iterator<Item = f64> + '_ {
        self.members.iter().map(|m| m.gamma0)
    }

    pub fn contains_gamma0(&self, gamma0: f64) -> bool {
        gamma0 >= self.gamma0_min && gamma0 <= self.gamma0_max
    }

    /// Interval ratio of the member with the given `gamma0` (any value in range).
    pub fn ratio_at(&self, gamma0: f64, t: f64, tau: f64) -> f64 {
        let p = JCParams {
            gamma0,
            lambda: self.lambda,
        };
        decay_amplitude(t + tau, &p) / decay_amplitude(t, &p)
    }
}

/// Uniform grid of `n` Markovian parameter points with fixed `lambda`.
pub fn free_family(lambda: f64, gamma0_min: f64, gamma0_max: f64, n: usize) -> Result<FreeFamily> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams(format!("lambda = {lambda} must be positive")));
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("family needs at least 2 points, got {n}")));
    }
    if !(gamma0_min > 0.0 && gamma0_min < gamma0_max) {
        return Err(Error::InvalidParams(format!(
            "need 0 < gamma0_min < gamma0_max, got [{gamma0_min}, {gamma0_max}]"
        )));
    }
    if gamma0_max >= 0.5 * lambda {
        return Err(Error::InvalidParams(format!(
            "gamma0_max = {gamma0_max} must stay below lambda / 2 = {} (Markovian regime)",
            0.5 * lambda
        )));
    }
    let step = (gamma0_max - gamma0_min) / (n - 1) as f64;
    let members = (0..n)
        .map(|i| {
            let g0 = if i + 1 == n {
                gamma0_max
            } else {
                gamma0_min + i as f64 * step
            };
            JCParams { gamma0: g0, lambda }
        })
        .collect();
    Ok(FreeFamily {
        lambda,
        gamma0_min,
        gamma0_max,
        members,
    })
}
