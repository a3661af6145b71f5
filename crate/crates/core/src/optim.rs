//! Derivative-free local optimizers used by the measures: Nelder-Mead for
//! the state searches and golden-section search for one-dimensional
//! parameter scans.

/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug)]
pub struct NelderMead {
    /// Iteration budget shared by the initial run and its restarts.
    pub max_iters: usize,
    /// Stop when the spread of simplex values falls below `tol * max(|f_best|, 1e-8)`.
    pub tol: f64,
    /// Simplex rebuilds around the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: 1e-6,
            restarts: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iters: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimizes `f` starting from `x0`, with the initial simplex spanned by
    /// `x0 + step[i] e_i`.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64], step: &[f64]) -> NmResult
    where
        F: FnMut(&[f64]) -> f64,
    {
        assert_eq!(x0.len(), step.len());
        let mut best_x = x0.to_vec();
        let mut best_f = f(x0);
        let mut iters = 0;
        let mut converged = false;
        let mut scale: Vec<f64> = step.to_vec();

        for _round in 0..=self.restarts {
            if iters >= self.max_iters {
                break;
            }
            let run = self.run(&mut f, &best_x, best_f, &scale, self.max_iters - iters);
            iters += run.iters;
            let improved = run.f < best_f;
            if run.f <= best_f {
                best_x = run.x;
                best_f = run.f;
            }
            converged = run.converged;
            if !improved && converged {
                break;
            }
            // Restart with a smaller simplex around the incumbent.
            for s in scale.iter_mut() {
                *s *= 0.25;
            }
        }
        NmResult {
            x: best_x,
            f: best_f,
            iters,
            converged,
        }
    }

    fn run<F>(&self, f: &mut F, x0: &[f64], f0: f64, step: &[f64], budget: usize) -> NmResult
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut values: Vec<f64> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        values.push(f0);
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += step[i];
            values.push(f(&v));
            simplex.push(v);
        }

        let mut order: Vec<usize> = (0..=n).collect();
        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut trial2 = vec![0.0; n];
        let mut iters = 0;
        let mut converged = false;

        while iters < budget {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let best = order[0];
            let worst = order[n];
            let second = order[n - 1];
            let spread = values[worst] - values[best];
            if spread <= self.tol * values[best].abs().max(1e-8) {
                converged = true;
                break;
            }
            let size = simplex
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&simplex[best])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if size < 1e-13 {
                converged = true;
                break;
            }
            iters += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for &k in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
                    *c += x / n as f64;
                }
            }

            for i in 0..n {
                trial[i] = centroid[i] + (centroid[i] - simplex[worst][i]);
            }
            let fr = f(&trial);
            if fr < values[best] {
                for i in 0..n {
                    trial2[i] = centroid[i] + 2.0 * (centroid[i] - simplex[worst][i]);
                }
                let fe = f(&trial2);
                if fe < fr {
                    simplex[worst].copy_from_slice(&trial2);
                    values[worst] = fe;
                } else {
                    simplex[worst].copy_from_slice(&trial);
                    values[worst] = fr;
                }
                continue;
            }
            if fr < values[second] {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
                continue;
            }
            // Contraction, outside or inside.
            let outside = fr < values[worst];
            for i in 0..n {
                trial2[i] = if outside {
                    centroid[i] + 0.5 * (trial[i] - centroid[i])
                } else {
                    centroid[i] + 0.5 * (simplex[worst][i] - centroid[i])
                };
            }
            let fc = f(&trial2);
            if fc < fr.min(values[worst]) {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fc;
                continue;
            }
            // Shrink toward the best vertex.
            let anchor = simplex[best].clone();
            for &k in &order[1..] {
                for (x, a) in simplex[k].iter_mut().zip(&anchor) {
                    *x = a + 0.5 * (*x - a);
                }
                values[k] = f(&simplex[k]);
            }
        }

        let (bi, _) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty simplex");
        NmResult {
            x: simplex[bi].clone(),
            f: values[bi],
            iters,
            converged,
        }
    }
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`. Returns the
/// best point seen, including the bracket ends.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a);
    let fb = f(b);
    let (mut best_x, mut best_f) = if fb < fa { (b, fb) } else { (a, fa) };
    if b - a <= xtol {
        return (best_x, best_f);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if b - a <= xtol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
    }
    (best_x, best_f)
}

/// Minimum of `f` over a sorted grid, refined by golden-section search
/// between the neighbours of the best grid point. Ties go to the first grid
/// point. The result is never worse than the best grid value.
pub fn grid_golden_min<F>(mut f: F, grid: &[f64], values: Option<&[f64]>, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    assert!(!grid.is_empty(), "empty grid");
    let owned;
    let vals = match values {
        Some(v) => v,
        None => {
            owned = grid.iter().map(|&x| f(x)).collect::<Vec<_>>();
            &owned
        }
    };
    let mut idx = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v < vals[idx] {
            idx = i;
        }
    }
    let (grid_x, grid_f) = (grid[idx], vals[idx]);
    if grid.len() == 1 {
        return (grid_x, grid_f);
    }
    let lo = grid[idx.saturating_sub(1)];
    let hi = grid[(idx + 1).min(grid.len() - 1)];
    let tol = xtol * (hi - lo).abs().max(f64::MIN_POSITIVE);
    let (x, fx) = golden_section(&mut f, lo, hi, tol, 200);
    if fx < grid_f {
        (x, fx)
    } else {
        (grid_x, grid_f)
    }
}
