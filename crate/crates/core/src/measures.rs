//! Indivisibility and resourcefulness measures of the interval map
//! `Lambda(t + tau, t)`, together with the diameter of the free set.
//!
//! State optimizations run over the full Bloch ball: a coarse grid in
//! `(theta, phi, r)` seeds Nelder-Mead refinements in unconstrained
//! coordinates `(theta, phi, s)` with `r = sin^2 s`. Minimizations over the
//! free family scan its `gamma0` grid and refine by golden-section search
//! between the neighbours of the best grid point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channels::{
    choi_matrix, damp, decay_amplitude, interval_map, FreeFamily, JCParams, SINGULARITY_FLOOR,
};
use crate::error::{Error, Result};
use crate::optim::{grid_golden_min, NelderMead};
use crate::qmat::{cartesian_of, half_trace_norm_diff, state_from_cartesian, BlochVector};

/// Number of best coarse-grid points refined by Nelder-Mead.
const REFINE_SEEDS: usize = 3;
/// Relative bracket width at which golden-section refinement stops.
const GOLDEN_XTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub grid_r: usize,
    pub refine_iters: usize,
    pub tol: f64,
    pub gamma0_grid: usize,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            grid_theta: 24,
            grid_phi: 12,
            grid_r: 8,
            refine_iters: 200,
            tol: 1e-6,
            gamma0_grid: 99,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("grid_theta", self.grid_theta),
            ("grid_phi", self.grid_phi),
            ("grid_r", self.grid_r),
            ("refine_iters", self.refine_iters),
            ("gamma0_grid", self.gamma0_grid),
        ] {
            if v < 2 {
                return Err(Error::Config(format!("{name} = {v} must be at least 2")));
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol = {} must be positive", self.tol)));
        }
        Ok(())
    }

    fn nelder_mead(&self) -> NelderMead {
        NelderMead {
            max_iters: self.refine_iters,
            tol: self.tol,
            restarts: 2,
        }
    }

    /// Coarse Bloch grid, ordered theta-major then phi then r.
    pub fn bloch_grid(&self) -> Vec<BlochVector> {
        let mut out = Vec::with_capacity(self.grid_theta * self.grid_phi * self.grid_r);
        for i in 0..self.grid_theta {
            let theta = PI * i as f64 / (self.grid_theta - 1) as f64;
            for j in 0..self.grid_phi {
                let phi = 2.0 * PI * j as f64 / self.grid_phi as f64;
                for k in 0..self.grid_r {
                    let r = k as f64 / (self.grid_r - 1) as f64;
                    out.push(BlochVector { r, theta, phi });
                }
            }
        }
        out
    }

    /// Pure-state layer of the coarse grid.
    pub fn pure_grid(&self) -> Vec<BlochVector> {
        let mut out = Vec::with_capacity(self.grid_theta * self.grid_phi);
        for i in 0..self.grid_theta {
            let theta = PI * i as f64 / (self.grid_theta - 1) as f64;
            for j in 0..self.grid_phi {
                let phi = 2.0 * PI * j as f64 / self.grid_phi as f64;
                out.push(BlochVector { r: 1.0, theta, phi });
            }
        }
        out
    }

    fn simplex_step(&self) -> [f64; 3] {
        [
            0.5 * PI / (self.grid_theta - 1) as f64,
            PI / self.grid_phi as f64,
            0.5 / (self.grid_r - 1) as f64,
        ]
    }
}

fn to_internal(b: &BlochVector) -> [f64; 3] {
    [b.theta, b.phi, b.r.sqrt().asin()]
}

fn internal_cartesian(u: &[f64]) -> [f64; 3] {
    let r = u[2].sin().powi(2);
    let (st, ct) = u[0].sin_cos();
    let (sp, cp) = u[1].sin_cos();
    [r * st * cp, r * st * sp, r * ct]
}

fn neg([x, y, z]: [f64; 3]) -> [f64; 3] {
    [-x, -y, -z]
}

fn cartesian_to_bloch([x, y, z]: [f64; 3]) -> BlochVector {
    BlochVector::from_cartesian(x, y, z)
}

/// Indices of the `k` largest values, ties resolved by first occurrence.
fn top_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Maximizes `f` over the Bloch ball. Returns the best value and its
/// Cartesian point; the value is never below any coarse-grid value.
fn maximize_over_ball<F>(f: F, opt: &OptConfig) -> (f64, [f64; 3])
where
    F: Fn([f64; 3]) -> f64,
{
    let grid = opt.bloch_grid();
    let coarse: Vec<f64> = grid.iter().map(|b| f(b.cartesian())).collect();
    let seeds = top_indices(&coarse, REFINE_SEEDS);
    let mut best_val = coarse[seeds[0]];
    let mut best_pt = grid[seeds[0]].cartesian();
    let nm = opt.nelder_mead();
    let step = opt.simplex_step();
    for &s in &seeds {
        let x0 = to_internal(&grid[s]);
        let res = nm.minimize(|u| -f(internal_cartesian(u)), &x0, &step);
        if -res.f > best_val {
            best_val = -res.f;
            best_pt = internal_cartesian(&res.x);
        }
    }
    (best_val, best_pt)
}

/// The `k` largest offered values; an equal later value never displaces an
/// earlier one.
struct TopK<T> {
    k: usize,
    items: Vec<(f64, T)>,
}

impl<T: Copy> TopK<T> {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn offer(&mut self, value: f64, item: T) {
        if self.items.len() == self.k && value <= self.items[self.k - 1].0 {
            return;
        }
        let pos = self.items.iter().position(|(v, _)| value > *v).unwrap_or(self.items.len());
        self.items.insert(pos, (value, item));
        self.items.truncate(self.k);
    }

    /// Descending by value.
    fn into_sorted(self) -> Vec<(f64, T)> {
        self.items
    }
}

fn non_singular_ratio(p: &JCParams, t: f64, tau: f64) -> Result<f64> {
    interval_map(t, tau, p, SINGULARITY_FLOOR).get()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PIndivisibility {
    /// `max(raw, 0)`.
    pub value: f64,
    /// Optimum of the distance increase before clipping at zero.
    pub raw: f64,
    pub states: [BlochVector; 2],
}

/// Largest increase of the trace distance between two evolved states over
/// `[t, t + tau]`, clipped at zero.
pub fn p_indivisibility(p: &JCParams, t: f64, tau: f64, opt: &OptConfig) -> Result<PIndivisibility> {
    opt.validate()?;
    non_singular_ratio(p, t, tau)?;
    let g_start = decay_amplitude(t, p);
    let g_end = decay_amplitude(t + tau, p);
    // The objective is linear in rho1 - rho2, and the antipodal pairs
    // (b, -b) with |b| <= 1 realize every achievable difference.
    let objective = |v: [f64; 3]| {
        let a = state_from_cartesian(v);
        let b = state_from_cartesian(neg(v));
        let late = half_trace_norm_diff(damp(g_end, &a).matrix(), damp(g_end, &b).matrix());
        let early = half_trace_norm_diff(damp(g_start, &a).matrix(), damp(g_start, &b).matrix());
        late - early
    };
    let (raw, v) = maximize_over_ball(objective, opt);
    Ok(PIndivisibility {
        value: raw.max(0.0),
        raw,
        states: [cartesian_to_bloch(v), cartesian_to_bloch(neg(v))],
    })
}

/// `||(Lambda (x) 1)|phi+><phi+|||_1 - 1` from the Choi spectrum.
pub fn cp_indivisibility(p: &JCParams, t: f64, tau: f64) -> Result<f64> {
    let g = non_singular_ratio(p, t, tau)?;
    let norm = crate::qmat::trace_norm(&choi_matrix(g))?;
    Ok((norm - 1.0).max(0.0))
}

/// Free-family interval ratios on the `gamma0` grid for one window.
struct FamilyWindow<'a> {
    family: &'a FreeFamily,
    t: f64,
    tau: f64,
    gamma0s: Vec<f64>,
    ratios: Vec<f64>,
}

impl<'a> FamilyWindow<'a> {
    fn new(family: &'a FreeFamily, t: f64, tau: f64) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidParams("free family is empty".into()));
        }
        let gamma0s: Vec<f64> = family.gamma0s().collect();
        let ratios = gamma0s.iter().map(|&g0| family.ratio_at(g0, t, tau)).collect();
        Ok(Self {
            family,
            t,
            tau,
            gamma0s,
            ratios,
        })
    }

    /// `(gamma0, value)` minimizing `cost(g_K)` over the family.
    fn minimize<F: Fn(f64) -> f64>(&self, cost: F) -> (f64, f64) {
        let vals: Vec<f64> = self.ratios.iter().map(|&gk| cost(gk)).collect();
        grid_golden_min(
            |g0| cost(self.family.ratio_at(g0, self.t, self.tau)),
            &self.gamma0s,
            Some(&vals),
            GOLDEN_XTOL,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nm1Optimum {
    pub value: f64,
    pub state: BlochVector,
    /// Free operation closest to the target for the optimal state.
    pub gamma0: f64,
}

/// Worst-case (over initial states) distance between the target's output
/// and the closest free operation's output on the same evolved state.
pub fn nm1(
    p: &JCParams,
    family: &FreeFamily,
    t: f64,
    tau: f64,
    opt: &OptConfig,
) -> Result<Nm1Optimum> {
    opt.validate()?;
    let g = non_singular_ratio(p, t, tau)?;
    let window = FamilyWindow::new(family, t, tau)?;
    let g_start = decay_amplitude(t, p);
    let inner = |v: [f64; 3]| {
        let evolved = damp(g_start, &state_from_cartesian(v));
        let target = damp(g, &evolved);
        window.minimize(|gk| half_trace_norm_diff(target.matrix(), damp(gk, &evolved).matrix()))
    };
    let (value, v) = maximize_over_ball(|v| inner(v).1, opt);
    let (gamma0, _) = inner(v);
    Ok(Nm1Optimum {
        value,
        state: cartesian_to_bloch(v),
        gamma0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nm2Optimum {
    pub value: f64,
    pub gamma0: f64,
}

/// Smallest trace distance between the target's Choi state and a free
/// operation's Choi state over the same window.
pub fn nm2(
    p: &JCParams,
    family: &FreeFamily,
    t: f64,
    tau: f64,
    opt: &OptConfig,
) -> Result<Nm2Optimum> {
    opt.validate()?;
    let g = non_singular_ratio(p, t, tau)?;
    let window = FamilyWindow::new(family, t, tau)?;
    let target = choi_matrix(g);
    let (gamma0, value) = window.minimize(|gk| half_trace_norm_diff(&target, &choi_matrix(gk)));
    Ok(Nm2Optimum { value, gamma0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: f64,
    pub gamma0s: [f64; 2],
    pub states: [BlochVector; 2],
}

/// Largest trace distance between outputs of two free operations
/// `Lambda_K(t + tau, 0)` acting on two arbitrary states.
///
/// Family pairs range over the `gamma0` grid. Each pair is seeded with the
/// antipodal pairs of the pure grid layer, and the best seeds are refined
/// over both full Bloch balls.
pub fn diameter_d(family: &FreeFamily, t: f64, tau: f64, opt: &OptConfig) -> Result<Diameter> {
    opt.validate()?;
    if family.is_empty() {
        return Err(Error::InvalidParams("free family is empty".into()));
    }
    let amps: Vec<f64> = family
        .members
        .iter()
        .map(|m| decay_amplitude(t + tau, m))
        .collect();
    let seeds = opt.pure_grid();
    // Coarse scan in Bloch coordinates: for qubits the trace distance is half
    // the Euclidean distance between Bloch vectors.
    let image = |a: f64, v: [f64; 3]| cartesian_of(damp(a, &state_from_cartesian(v)).matrix());
    let images: Vec<Vec<[f64; 3]>> = amps
        .iter()
        .map(|&a| seeds.iter().map(|b| image(a, b.cartesian())).collect())
        .collect();
    let opposite_images: Vec<Vec<[f64; 3]>> = amps
        .iter()
        .map(|&a| seeds.iter().map(|b| image(a, neg(b.cartesian()))).collect())
        .collect();

    // Best coarse (value, i, j, seed) in scan order; first occurrence wins ties.
    let mut top = TopK::new(REFINE_SEEDS);
    for (i, left) in images.iter().enumerate() {
        for (j, right) in opposite_images.iter().enumerate().skip(i) {
            for (s, (u, w)) in left.iter().zip(right).enumerate() {
                let dist2: f64 = (0..3).map(|k| (u[k] - w[k]).powi(2)).sum();
                top.offer(0.5 * dist2.sqrt(), (i, j, s));
            }
        }
    }
    let top = top.into_sorted();

    let (v0, (i0, j0, s0)) = top[0];
    let mut best = Diameter {
        value: v0,
        gamma0s: [family.members[i0].gamma0, family.members[j0].gamma0],
        states: [seeds[s0], seeds[s0].antipode()],
    };
    let nm = opt.nelder_mead();
    let [a, b, c] = opt.simplex_step();
    let step = [a, b, c, a, b, c];
    for &(_, (i, j, s)) in &top {
        let (ai, aj) = (amps[i], amps[j]);
        let first = to_internal(&seeds[s]);
        let second = to_internal(&seeds[s].antipode());
        let x0 = [first[0], first[1], first[2], second[0], second[1], second[2]];
        let res = nm.minimize(
            |u| {
                let x = damp(ai, &state_from_cartesian(internal_cartesian(&u[..3])));
                let y = damp(aj, &state_from_cartesian(internal_cartesian(&u[3..])));
                -half_trace_norm_diff(x.matrix(), y.matrix())
            },
            &x0,
            &step,
        );
        if -res.f > best.value {
            best = Diameter {
                value: -res.f,
                gamma0s: [family.members[i].gamma0, family.members[j].gamma0],
                states: [
                    cartesian_to_bloch(internal_cartesian(&res.x[..3])),
                    cartesian_to_bloch(internal_cartesian(&res.x[3..])),
                ],
            };
        }
    }
    Ok(best)
}

/// All measures at one window. Metrics are `None` when the interval map is
/// singular.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub t: f64,
    pub tau: f64,
    pub gamma0: f64,
    pub lambda: f64,
    pub g: Option<f64>,
    pub p_i: Option<f64>,
    pub cp_i: Option<f64>,
    pub nm1: Option<f64>,
    pub nm2: Option<f64>,
    pub d: Option<f64>,
    pub p_i_states: Option<[BlochVector; 2]>,
    pub nm1_state: Option<BlochVector>,
    pub nm1_gamma0: Option<f64>,
    pub nm2_gamma0: Option<f64>,
    pub d_gamma0s: Option<[f64; 2]>,
    pub d_states: Option<[BlochVector; 2]>,
    pub singular: bool,
}

impl MeasureRecord {
    fn singular(p: &JCParams, t: f64, tau: f64) -> Self {
        Self {
            t,
            tau,
            gamma0: p.gamma0,
            lambda: p.lambda,
            g: None,
            p_i: None,
            cp_i: None,
            nm1: None,
            nm2: None,
            d: None,
            p_i_states: None,
            nm1_state: None,
            nm1_gamma0: None,
            nm2_gamma0: None,
            d_gamma0s: None,
            d_states: None,
            singular: true,
        }
    }
}

/// Evaluates every measure at `(t, tau)`.
pub fn measure_record(
    p: &JCParams,
    family: &FreeFamily,
    t: f64,
    tau: f64,
    opt: &OptConfig,
) -> Result<MeasureRecord> {
    opt.validate()?;
    if family.is_empty() {
        return Err(Error::InvalidParams("free family is empty".into()));
    }
    let ratio = interval_map(t, tau, p, SINGULARITY_FLOOR);
    let Some(g) = ratio.value() else {
        return Ok(MeasureRecord::singular(p, t, tau));
    };
    let pi = p_indivisibility(p, t, tau, opt)?;
    let cp = cp_indivisibility(p, t, tau)?;
    let n1 = nm1(p, family, t, tau, opt)?;
    let n2 = nm2(p, family, t, tau, opt)?;
    let d = diameter_d(family, t, tau, opt)?;
    Ok(MeasureRecord {
        t,
        tau,
        gamma0: p.gamma0,
        lambda: p.lambda,
        g: Some(g),
        p_i: Some(pi.value),
        cp_i: Some(cp),
        nm1: Some(n1.value),
        nm2: Some(n2.value),
        d: Some(d.value),
        p_i_states: Some(pi.states),
        nm1_state: Some(n1.state),
        nm1_gamma0: Some(n1.gamma0),
        nm2_gamma0: Some(n2.gamma0),
        d_gamma0s: Some(d.gamma0s),
        d_states: Some(d.states),
        singular: false,
    })
}
