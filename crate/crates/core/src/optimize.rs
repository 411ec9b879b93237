//! Derivative-free maximization: Nelder–Mead with restarts, run from a
//! sequence of seeded starting points.
//!
//! Every numeric maximization in the crate goes through [`maximize`]. The
//! starting points for a given seed form a fixed sequence, so raising the
//! start count only appends work and the returned maximum never decreases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Effort bound for a seeded multi-start search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Number of independent starting points.
    pub starts: usize,
    /// Objective evaluations allowed per start.
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { starts: 8, max_evals: 4000, seed: 0x5eed_f00d }
    }
}

impl SearchBudget {
    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }
}

#[derive(Clone, Debug)]
pub struct Maximum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

const X_TOL: f64 = 1e-11;
const F_TOL: f64 = 1e-15;
const MAX_RESTARTS: usize = 6;

/// Maximizes `f` over `dim` real parameters.
///
/// Start `k` is drawn from `sample` using a ChaCha20 stream keyed by
/// `(budget.seed, k)`, so each start is reproducible on its own.
pub fn maximize<F, S>(f: F, dim: usize, budget: &SearchBudget, mut sample: S, step: f64) -> Maximum
where
    F: Fn(&[f64]) -> f64,
    S: FnMut(&mut ChaCha20Rng) -> Vec<f64>,
{
    let mut best = Maximum { point: vec![0.0; dim], value: f64::NEG_INFINITY, evals: 0 };
    for k in 0..budget.starts.max(1) {
        let mut rng = ChaCha20Rng::seed_from_u64(budget.seed);
        rng.set_stream(k as u64);
        let x0 = sample(&mut rng);
        debug_assert_eq!(x0.len(), dim);
        let m = nelder_mead(&f, x0, step, budget.max_evals);
        let evals = best.evals + m.evals;
        if m.value > best.value {
            best = m;
        }
        best.evals = evals;
    }
    best
}

/// Uniform sampler on `[lo, hi)` in every coordinate.
pub fn uniform_box(dim: usize, lo: f64, hi: f64) -> impl FnMut(&mut ChaCha20Rng) -> Vec<f64> {
    move |rng| (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Nelder–Mead on `f` (maximized), restarting from the best vertex with a
/// shrinking simplex until a restart stops improving.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: Vec<f64>, step: f64, max_evals: usize) -> Maximum {
    let mut evals = 0usize;
    let mut x = x0;
    let mut fx = f(&x);
    evals += 1;
    let mut scale = step;
    for _ in 0..=MAX_RESTARTS {
        if evals >= max_evals {
            break;
        }
        let (nx, nf, used) = nm_run(f, &x, fx, scale, max_evals - evals);
        evals += used;
        let improved = nf > fx + F_TOL;
        if nf >= fx {
            x = nx;
            fx = nf;
        }
        if !improved {
            break;
        }
        scale = (scale * 0.5).max(1e-4);
    }
    Maximum { point: x, value: fx, evals }
}

fn nm_run<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    f0: f64,
    step: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize) {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let n = x0.len();
    // Work with g = -f so the classic minimization steps read naturally.
    let g = |x: &[f64]| -f(x);
    let mut evals = 0usize;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), -f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        let gv = g(&v);
        evals += 1;
        simplex.push((v, gv));
    }

    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= F_TOL && size <= X_TOL {
            break;
        }
        if size <= X_TOL {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(ALPHA);
        let gr = g(&xr);
        evals += 1;
        if gr < simplex[0].1 {
            let xe = along(GAMMA);
            let ge = g(&xe);
            evals += 1;
            simplex[n] = if ge < gr { (xe, ge) } else { (xr, gr) };
        } else if gr < simplex[n - 1].1 {
            simplex[n] = (xr, gr);
        } else {
            let (xc, gc) = if gr < simplex[n].1 {
                let xc = along(RHO);
                let gc = g(&xc);
                (xc, gc)
            } else {
                let xc = along(-RHO);
                let gc = g(&xc);
                (xc, gc)
            };
            evals += 1;
            if gc < simplex[n].1.min(gr) {
                simplex[n] = (xc, gc);
            } else {
                let best = simplex[0].0.clone();
                for (v, gv) in simplex.iter_mut().skip(1) {
                    for (x, b) in v.iter_mut().zip(&best) {
                        *x = b + SIGMA * (*x - b);
                    }
                    *gv = g(v);
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, gx) = simplex.swap_remove(0);
    (x, -gx, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_peak() {
        let f = |x: &[f64]| -(x[0] - 1.0).powi(2) - 3.0 * (x[1] + 2.0).powi(2) + 5.0;
        let m = nelder_mead(&f, vec![0.0, 0.0], 0.5, 10_000);
        assert!((m.value - 5.0).abs() < 1e-12);
        assert!((m.point[0] - 1.0).abs() < 1e-6);
        assert!((m.point[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let m = nelder_mead(&f, vec![-1.2, 1.0], 0.5, 20_000);
        assert!(m.value > -1e-10, "{}", m.value);
    }

    #[test]
    fn multi_start_escapes_local_maximum() {
        // local max at x=-1 (value 1), global at x=2 (value 4)
        let f = |x: &[f64]| {
            let a = 1.0 - (x[0] + 1.0).powi(2) * 4.0;
            let b = 4.0 - (x[0] - 2.0).powi(2) * 4.0;
            a.max(b)
        };
        let budget = SearchBudget::default().with_starts(8);
        let m = maximize(f, 1, &budget, uniform_box(1, -3.0, 3.0), 0.3);
        assert!((m.value - 4.0).abs() < 1e-10);
    }

    #[test]
    fn more_starts_never_lowers_the_maximum() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos() + 0.1 * x[0];
        let mut prev = f64::NEG_INFINITY;
        for starts in 1..10 {
            let b = SearchBudget::default().with_starts(starts).with_max_evals(50);
            let m = maximize(f, 2, &b, uniform_box(2, -3.0, 3.0), 0.5);
            assert!(m.value >= prev);
            prev = m.value;
        }
    }

    #[test]
    fn respects_eval_budget() {
        let f = |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>();
        let m = nelder_mead(&f, vec![3.0; 5], 1.0, 40);
        assert!(m.evals <= 40 + 6);
    }
}
