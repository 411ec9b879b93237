//! Fully entangled fraction of a two-qubit state.
//!
//! Every maximally entangled two-qubit state is, up to a global phase, a real
//! unit combination `Σ xₙ|Φⁿ⟩` of the magic basis. The overlap with ρ is
//! then the quadratic form `xᵀ M x` with `M = Re⟨Φⁿ|ρ|Φᵐ⟩`, so the maximum
//! is the top eigenvalue of `M`.
//!
//! Three independent routes are provided:
//!
//! * [`fully_entangled_fraction`]: the eigenvalue closed form.
//! * [`fef_oracle_sphere`] / [`fef_oracle_power`]: direct search over
//!   `x ∈ S³`, evaluating `⟨Φ(x)|ρ|Φ(x)⟩` without forming `M`.
//! * [`fef_oracle_unitary`]: Nelder–Mead over a single-qubit unitary `U`
//!   maximizing `⟨Φ¹|(1⊗U)†ρ(1⊗U)|Φ¹⟩`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::ops;
use crate::optimize::{maximize, SearchBudget};
use crate::states::{DensityMatrix, MagicBasis, StateError};

/// `M[n][m] = Re⟨Φⁿ|ρ|Φᵐ⟩`, real symmetric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagicOverlapMatrix {
    pub m: [[f64; 4]; 4],
}

impl MagicOverlapMatrix {
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    pub fn quadratic_form(&self, x: &[f64; 4]) -> f64 {
        let mut s = 0.0;
        for n in 0..4 {
            for k in 0..4 {
                s += self.m[n][k] * x[n] * x[k];
            }
        }
        s
    }

    fn as_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real(4, 4, &self.m.concat())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FefResult {
    /// Fully entangled fraction, in [1/4, 1].
    pub f: f64,
    /// `max{0, 2F − 1}`.
    pub e: f64,
    /// Magic-basis coordinates of an optimal maximally entangled state.
    pub x: [f64; 4],
}

/// `max{0, 2F − 1}`.
pub fn renormalized(f: f64) -> f64 {
    (2.0 * f - 1.0).max(0.0)
}

pub fn magic_overlap_matrix(rho: &DensityMatrix) -> Result<MagicOverlapMatrix, StateError> {
    rho.require_dim(4)?;
    let mb = MagicBasis::new();
    let rho_phi: Vec<_> = mb.states().iter().map(|p| rho.matrix().mul_vec(p)).collect();
    let mut m = [[0.0; 4]; 4];
    for n in 0..4 {
        for k in n..4 {
            let v = mb.state(n).inner(&rho_phi[k]).re;
            m[n][k] = v;
            m[k][n] = v;
        }
    }
    Ok(MagicOverlapMatrix { m })
}

pub fn fully_entangled_fraction(rho: &DensityMatrix) -> Result<FefResult, StateError> {
    let m = magic_overlap_matrix(rho)?;
    let eig = hermitian_eig(&m.as_complex())?;
    let f = eig.values[0];
    let v = &eig.vectors[0];
    // M is real, so the top eigenvector is real up to a global phase; rotate
    // the largest component onto the positive real axis.
    let pivot = (0..4)
        .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
        .expect("four components");
    let phase = v[pivot].conj() / v[pivot].norm();
    let mut x = [0.0; 4];
    for (i, xi) in x.iter_mut().enumerate() {
        *xi = (v[i] * phase).re;
    }
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    x.iter_mut().for_each(|a| *a /= norm);
    Ok(FefResult { f, e: renormalized(f), x })
}

/// Effort for [`fef_oracle_sphere`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereBudget {
    /// Points per hyperspherical angle in the coarse grid.
    pub grid: usize,
    /// Power-iteration steps from each refined grid seed.
    pub power_steps: usize,
    /// Number of best grid points that get refined.
    pub seeds: usize,
}

impl Default for SphereBudget {
    fn default() -> Self {
        SphereBudget { grid: 12, power_steps: 200, seeds: 4 }
    }
}

/// `⟨Φ(x)|ρ|Φ(x)⟩` for `Φ(x) = Σ xₙ|Φⁿ⟩`.
fn sphere_objective(mb: &MagicBasis, rho: &DensityMatrix, x: &[f64; 4]) -> f64 {
    rho.overlap(&mb.combine(x))
}

/// Gradient-direction vector `gₖ = Re⟨Φᵏ|ρ|Φ(x)⟩`, built from state vectors.
fn sphere_apply(mb: &MagicBasis, rho: &DensityMatrix, x: &[f64; 4]) -> [f64; 4] {
    let rho_phi = rho.matrix().mul_vec(&mb.combine(x));
    let mut g = [0.0; 4];
    for (k, gk) in g.iter_mut().enumerate() {
        *gk = mb.state(k).inner(&rho_phi).re;
    }
    g
}

fn normalize4(v: [f64; 4]) -> Option<[f64; 4]> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    (n > 1e-300).then(|| v.map(|a| a / n))
}

/// Hyperspherical grid over the half of S³ with `x₁ ≥ 0` (x and −x give
/// the same state).
fn sphere_grid(n: usize) -> Vec<[f64; 4]> {
    let n = n.max(2);
    let mut pts = Vec::with_capacity(n * n * 2 * n);
    for i in 0..n {
        let a = (PI / 2.0) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let b = PI * j as f64 / (n - 1) as f64;
            for k in 0..2 * n {
                let cc = 2.0 * PI * k as f64 / (2 * n) as f64;
                let (sa, ca) = a.sin_cos();
                let (sb, cb) = b.sin_cos();
                let (sc, ccos) = cc.sin_cos();
                pts.push([ca, sa * cb, sa * sb * ccos, sa * sb * sc]);
            }
        }
    }
    pts
}

/// Rayleigh-quotient iteration polish; `x` stays on the sphere.
fn rayleigh_polish(mb: &MagicBasis, rho: &DensityMatrix, mut x: [f64; 4], steps: usize) -> [f64; 4] {
    for _ in 0..steps {
        let mx = sphere_apply(mb, rho, &x);
        let mu: f64 = mx.iter().zip(&x).map(|(a, b)| a * b).sum();
        // Build (M − μ) column by column from the matrix-free product.
        let mut a = [[0.0; 4]; 4];
        for col in 0..4 {
            let mut e = [0.0; 4];
            e[col] = 1.0;
            let me = sphere_apply(mb, rho, &e);
            for row in 0..4 {
                a[row][col] = me[row] - if row == col { mu } else { 0.0 };
            }
        }
        match solve4(a, x).and_then(normalize4) {
            Some(next) => {
                let old = sphere_objective(mb, rho, &x);
                let new = sphere_objective(mb, rho, &next);
                if new + 1e-15 < old {
                    break;
                }
                x = next;
            }
            None => break,
        }
    }
    x
}

/// Gaussian elimination with partial pivoting on a 4×4 system.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-300 * scale {
            // Exact eigenvector hit; the iteration has converged.
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = ((row + 1)..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Grid search on S³ followed by power iteration and Rayleigh-quotient
/// polishing from the best grid points. Never uses the eigensolver.
pub fn fef_oracle_sphere(rho: &DensityMatrix, budget: SphereBudget) -> f64 {
    let mb = MagicBasis::new();
    let mut scored: Vec<([f64; 4], f64)> = sphere_grid(budget.grid)
        .into_iter()
        .map(|x| (x, sphere_objective(&mb, rho, &x)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut best = scored[0].1;
    for &(x0, _) in scored.iter().take(budget.seeds.max(1)) {
        let mut x = x0;
        for _ in 0..budget.power_steps {
            match normalize4(sphere_apply(&mb, rho, &x)) {
                Some(next) => x = next,
                None => break,
            }
        }
        let x = rayleigh_polish(&mb, rho, x, 8);
        best = best.max(sphere_objective(&mb, rho, &x));
    }
    best
}

/// Plain power iteration on the matrix-free map `x ↦ Re⟨Φᵏ|ρ|Φ(x)⟩`.
///
/// `M` is positive semidefinite, so this converges to the top eigenvalue
/// from any start with a component along it. A fixed irrational start avoids
/// accidental orthogonality.
pub fn fef_oracle_power(rho: &DensityMatrix, steps: usize) -> f64 {
    let mb = MagicBasis::new();
    let mut x = normalize4([0.8, 0.53, 0.41, 0.29]).expect("nonzero");
    let mut best = sphere_objective(&mb, rho, &x);
    for _ in 0..steps {
        match normalize4(sphere_apply(&mb, rho, &x)) {
            Some(next) => x = next,
            None => break,
        }
        best = best.max(sphere_objective(&mb, rho, &x));
    }
    best
}

/// `max_U ⟨Φ¹|(1⊗U)† ρ (1⊗U)|Φ¹⟩` over three-angle unitaries.
pub fn fef_oracle_unitary(rho: &DensityMatrix, budget: &SearchBudget) -> f64 {
    let phi1 = MagicBasis::new().state(0).clone();
    let objective = |p: &[f64]| {
        let u = ops::u3(p[0], p[1], p[2]);
        let v = ops::on_alice(&u).mul_vec(&phi1);
        rho.overlap(&v)
    };
    let sample = |rng: &mut rand_chacha::ChaCha20Rng| {
        use rand::Rng;
        vec![rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)]
    };
    maximize(objective, 3, budget, sample, 0.4).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexVector;
    use crate::states::{ket2, random_density, werner};
    use rand::SeedableRng;

    #[test]
    fn overlap_matrix_examples() {
        let mb = MagicBasis::new();
        let m = magic_overlap_matrix(&mb.projector(0)).unwrap();
        let mut expect = [[0.0; 4]; 4];
        expect[0][0] = 1.0;
        for (row, erow) in m.m.iter().zip(&expect) {
            for (x, e) in row.iter().zip(erow) {
                assert!((x - e).abs() < 1e-15);
            }
        }

        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        let m = magic_overlap_matrix(&mixed).unwrap();
        for n in 0..4 {
            for k in 0..4 {
                let e = if n == k { 0.25 } else { 0.0 };
                assert!((m.m[n][k] - e).abs() < 1e-15);
            }
        }

        let weights = [0.7, 0.1, 0.1, 0.1];
        let bd = DensityMatrix::mixture(&[
            (weights[0], &mb.projector(0)),
            (weights[1], &mb.projector(1)),
            (weights[2], &mb.projector(2)),
            (weights[3], &mb.projector(3)),
        ])
        .unwrap();
        let m = magic_overlap_matrix(&bd).unwrap();
        for n in 0..4 {
            for k in 0..4 {
                let e = if n == k { weights[n] } else { 0.0 };
                assert!((m.m[n][k] - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn overlap_matrix_rejects_wrong_dimension() {
        let rho = DensityMatrix::maximally_mixed(9).unwrap();
        assert!(matches!(magic_overlap_matrix(&rho), Err(StateError::DimensionMismatch { .. })));
    }

    #[test]
    fn trace_of_overlap_matrix_is_one() {
        for i in 0..50 {
            let m = magic_overlap_matrix(&random_density(1, i)).unwrap();
            assert!((m.trace() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn magic_state_has_unit_fraction() {
        let r = fully_entangled_fraction(&MagicBasis::new().projector(2)).unwrap();
        assert!((r.f - 1.0).abs() < 1e-12);
        assert!((r.e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn werner_line() {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let r = fully_entangled_fraction(&werner(p).unwrap()).unwrap();
            assert!((r.f - (1.0 + 3.0 * p) / 4.0).abs() < 1e-10);
            assert!((r.e - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn product_state_has_half() {
        let r = fully_entangled_fraction(&DensityMatrix::from_pure(&ket2(0, 1)).unwrap()).unwrap();
        assert!((r.f - 0.5).abs() < 1e-10);
        assert!(r.e.abs() < 1e-15);
    }

    #[test]
    fn result_invariants() {
        for i in 0..200 {
            let rho = random_density(5, i);
            let r = fully_entangled_fraction(&rho).unwrap();
            let m = magic_overlap_matrix(&rho).unwrap();
            assert!(r.f >= 0.25 - 1e-12);
            assert!((r.x.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-10);
            assert!((m.quadratic_form(&r.x) - r.f).abs() < 1e-10);
            assert_eq!(r.e, (2.0 * r.f - 1.0).max(0.0));
            // the optimizing state attains F as a genuine overlap
            let phi = MagicBasis::new().combine(&r.x);
            assert!((rho.overlap(&phi) - r.f).abs() < 1e-10);
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(77);
        for i in 0..100 {
            let rho = random_density(6, i);
            let u = ops::random_local_unitary(&mut rng);
            let f0 = fully_entangled_fraction(&rho).unwrap().f;
            let f1 = fully_entangled_fraction(&rho.conjugated(&u).unwrap()).unwrap().f;
            assert!((f0 - f1).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_product_states_give_half() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(8);
        for _ in 0..50 {
            let a = ops::random_u3(&mut rng).mul_vec(&ComplexVector::basis(2, 0));
            let b = ops::random_u3(&mut rng).mul_vec(&ComplexVector::basis(2, 0));
            let rho = DensityMatrix::from_pure(&b.kron(&a)).unwrap();
            assert!((fully_entangled_fraction(&rho).unwrap().f - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn sphere_oracle_examples() {
        let mb = MagicBasis::new();
        assert!((fef_oracle_sphere(&mb.projector(0), SphereBudget::default()) - 1.0).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((fef_oracle_sphere(&mixed, SphereBudget::default()) - 0.25).abs() < 1e-9);
        assert!((fef_oracle_power(&mixed, 10) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sphere_oracle_never_exceeds_closed_form() {
        for i in 0..100 {
            let rho = random_density(12, i);
            let f = fully_entangled_fraction(&rho).unwrap().f;
            let coarse = fef_oracle_sphere(&rho, SphereBudget { grid: 3, power_steps: 0, seeds: 1 });
            assert!(coarse <= f + 1e-12);
            let fine = fef_oracle_sphere(&rho, SphereBudget::default());
            assert!(fine <= f + 1e-12 && fine >= f - 1e-9);
        }
    }

    #[test]
    fn unitary_oracle_examples() {
        let mb = MagicBasis::new();
        let budget = SearchBudget::default();
        assert!((fef_oracle_unitary(&mb.projector(0), &budget) - 1.0).abs() < 1e-6);
        assert!((fef_oracle_unitary(&werner(0.5).unwrap(), &budget) - 0.625).abs() < 1e-6);
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(2024);
        let u0 = ops::random_u3(&mut rng);
        let rotated = mb.projector(0).conjugated(&ops::on_alice(&u0)).unwrap();
        assert!((fef_oracle_unitary(&rotated, &budget) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn solve4_identity() {
        let mut a = [[0.0; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2.0;
        }
        assert_eq!(solve4(a, [2.0, 4.0, 6.0, 8.0]), Some([1.0, 2.0, 3.0, 4.0]));
    }
}
