//! Dense coding and the fully entangled fraction for two qudits.
//!
//! States live on `C^d ⊗ C^d` with the same factor order as the qubit
//! modules (Bob first, Alice second); encodings act on Alice's factor.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c, hermitian_eig, kron, partial_trace, ComplexMatrix, ComplexVector, C64};
use crate::optimize::{maximize, SearchBudget};
use crate::states::{check_range, DensityMatrix, StateError};

/// Orthonormality tolerance for an encoding family.
pub const ENCODING_TOL: f64 = 1e-10;
/// Largest local dimension handled here.
pub const MAX_LOCAL_DIM: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdimError {
    #[error("local dimension {0} outside 2..=4")]
    UnsupportedDimension(usize),
    #[error("expected {expected} encoding unitaries, got {actual}")]
    EncodingCount { expected: usize, actual: usize },
    #[error("encoded states are not orthonormal: max Gram deviation {deviation:e}")]
    NonOrthonormalEncoding { deviation: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// `(1 ⊗ U)|Φ¹_d⟩` for a d×d unitary `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralMaxEntangled {
    pub d: usize,
    pub amplitudes: ComplexVector,
}

impl GeneralMaxEntangled {
    pub fn new(u: &ComplexMatrix) -> Self {
        let d = u.rows();
        GeneralMaxEntangled { d, amplitudes: apply_on_alice(u, &phi1_d(d)) }
    }

    /// Largest entry of `|ρ_B − I/d|` and `|ρ_A − I/d|`.
    pub fn reduced_deviation(&self) -> f64 {
        let p = self.amplitudes.projector();
        let target = ComplexMatrix::identity(self.d).scale_real(1.0 / self.d as f64);
        (0..2)
            .map(|keep| {
                partial_trace(&p, &[self.d, self.d], &[keep])
                    .expect("square d²×d² projector")
                    .max_abs_diff(&target)
            })
            .fold(0.0, f64::max)
    }
}

/// `(1/√d) Σᵢ |ii⟩`
pub fn phi1_d(d: usize) -> ComplexVector {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = ComplexVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = c(s, 0.0);
    }
    v
}

fn apply_on_alice(u: &ComplexMatrix, v: &ComplexVector) -> ComplexVector {
    kron(&ComplexMatrix::identity(u.rows()), u).mul_vec(v)
}

/// The d² generalized Pauli operators `Z^j X^k`, ordered by `(j, k)`.
pub fn clock_shift_unitaries(d: usize) -> Vec<ComplexMatrix> {
    let omega = 2.0 * PI / d as f64;
    let clock = ComplexMatrix::diagonal(&(0..d).map(|n| C64::from_polar(1.0, omega * n as f64)).collect::<Vec<_>>());
    let shift = ComplexMatrix::from_fn(d, d, |r, col| if r == (col + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let power = |m: &ComplexMatrix, n: usize| (0..n).fold(ComplexMatrix::identity(d), |acc, _| acc.matmul(m));
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            out.push(power(&clock, j).matmul(&power(&shift, k)));
        }
    }
    out
}

/// Max deviation of the Gram matrix of `{(1⊗Uᵢ)|Φ¹_d⟩}` from the identity.
pub fn encoding_gram_deviation(unitaries: &[ComplexMatrix]) -> f64 {
    let Some(first) = unitaries.first() else { return 0.0 };
    let phi = phi1_d(first.rows());
    let states: Vec<ComplexVector> = unitaries.iter().map(|u| apply_on_alice(u, &phi)).collect();
    let mut dev: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((a.inner(b) - c(expect, 0.0)).norm());
        }
    }
    dev
}

fn local_dim(rho: &DensityMatrix) -> Result<usize, DdimError> {
    let d = rho.local_dim();
    if !(2..=MAX_LOCAL_DIM).contains(&d) {
        return Err(DdimError::UnsupportedDimension(d));
    }
    Ok(d)
}

/// `(1/d²) Σᵢ ⟨Φⁱ|(1⊗Uᵢ)ρ(1⊗Uᵢ)†|Φⁱ⟩` with `|Φⁱ⟩ = (1⊗Uᵢ)|Φ¹_d⟩`.
pub fn dense_coding_fidelity_d(rho: &DensityMatrix, unitaries: &[ComplexMatrix]) -> Result<f64, DdimError> {
    let d = local_dim(rho)?;
    if unitaries.len() != d * d {
        return Err(DdimError::EncodingCount { expected: d * d, actual: unitaries.len() });
    }
    if let Some(u) = unitaries.iter().find(|u| u.rows() != d || u.cols() != d) {
        return Err(StateError::DimensionMismatch { expected: d, actual: u.rows() }.into());
    }
    let deviation = encoding_gram_deviation(unitaries);
    if deviation > ENCODING_TOL {
        return Err(DdimError::NonOrthonormalEncoding { deviation });
    }
    let phi = phi1_d(d);
    let total: f64 = unitaries
        .iter()
        .map(|u| {
            let local = kron(&ComplexMatrix::identity(d), u);
            let encoded = local.conjugate(rho.matrix());
            local.mul_vec(&phi).expectation(&encoded).re
        })
        .sum();
    Ok(total / (d * d) as f64)
}

/// `exp(iH)` for the Hermitian `H` built from `d²` reals: the diagonal,
/// then real and imaginary parts of the upper triangle row by row.
pub fn unitary_from_params(d: usize, p: &[f64]) -> ComplexMatrix {
    debug_assert_eq!(p.len(), d * d);
    let mut data = vec![c(0.0, 0.0); d * d];
    for i in 0..d {
        data[i * d + i] = c(p[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            data[i * d + j] = c(p[k], p[k + 1]);
            data[j * d + i] = c(p[k], -p[k + 1]);
            k += 2;
        }
    }
    let h = ComplexMatrix::from_vec(d, d, data);
    let eig = hermitian_eig(&h).expect("generator is Hermitian by construction");
    let mut u = ComplexMatrix::zeros(d, d);
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        u = &u + &v.outer(v).scale(C64::from_polar(1.0, *lambda));
    }
    u
}

/// Search budget scaled to the dimension: `4d²` starts.
pub fn default_budget_d(d: usize) -> SearchBudget {
    SearchBudget::default().with_starts(4 * d * d)
}

/// `max_U ⟨Φ¹_d|(1⊗U)†ρ(1⊗U)|Φ¹_d⟩` by multi-start search over `U = exp(iH)`.
pub fn fef_numeric_d(rho: &DensityMatrix, budget: &SearchBudget) -> Result<f64, DdimError> {
    let d = local_dim(rho)?;
    let s = 1.0 / (d as f64).sqrt();
    let objective = |p: &[f64]| {
        let u = unitary_from_params(d, p);
        // (1⊗U)|Φ¹_d⟩ has entry U[j][i]/√d at index (i, j).
        let v = ComplexVector::from(
            (0..d * d).map(|n| u[(n % d, n / d)] * s).collect::<Vec<_>>(),
        );
        rho.overlap(&v)
    };
    let m = maximize(
        objective,
        d * d,
        budget,
        |rng| (0..d * d).map(|_| rng.gen_range(-PI..PI)).collect(),
        0.5,
    );
    Ok(m.value)
}

/// `(F·d + 1)/(d + 1)`
pub fn teleport_max_d(f: f64, d: usize) -> Result<f64, StateError> {
    if d < 2 {
        return Err(StateError::OutOfRange { name: "d", value: d as f64, lo: 2.0, hi: f64::INFINITY });
    }
    let df = d as f64;
    check_range("F", f, 1.0 / (df * df), 1.0)?;
    Ok((f * df + 1.0) / (df + 1.0))
}

/// Classical bits carried by one qudit of a maximally entangled pair: `log₂ d²`.
pub fn channel_capacity_bits(d: usize) -> f64 {
    2.0 * (d as f64).log2()
}

/// Everything the `ddim` command reports for one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdimReport {
    pub d: usize,
    pub phi1_overlap: f64,
    pub dense_coding: f64,
    pub fef_numeric: f64,
    pub teleport_max: f64,
    pub capacity_bits: f64,
}

pub fn analyze_d(rho: &DensityMatrix, budget: &SearchBudget) -> Result<DdimReport, DdimError> {
    let d = local_dim(rho)?;
    let f = fef_numeric_d(rho, budget)?;
    Ok(DdimReport {
        d,
        phi1_overlap: rho.overlap(&phi1_d(d)),
        dense_coding: dense_coding_fidelity_d(rho, &clock_shift_unitaries(d))?,
        fef_numeric: f,
        teleport_max: teleport_max_d(f.clamp(1.0 / (d * d) as f64, 1.0), d)?,
        capacity_bits: channel_capacity_bits(d),
    })
}

/// Seeded `TT†/Tr` state on `C^d ⊗ C^d`, entries of `T` uniform on [0,1].
pub fn random_density_d(d: usize, seed: u64, index: u64) -> Result<DensityMatrix, DdimError> {
    if !(2..=MAX_LOCAL_DIM).contains(&d) {
        return Err(DdimError::UnsupportedDimension(d));
    }
    let n = d * d;
    let mut rng = crate::states::sample_stream(seed, index);
    loop {
        let t = ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen::<f64>(), rng.gen::<f64>()));
        let tt = t.matmul(&t.adjoint());
        let tr = tt.trace().re;
        if tr >= 1e-30 {
            return Ok(DensityMatrix::new(tt.scale_real(1.0 / tr).hermitian_part())?);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fef::fully_entangled_fraction;
    use crate::ops::unitarity_defect;
    use crate::states::random_density;

    #[test]
    fn clock_shift_is_orthonormal() {
        for d in 2..=4 {
            let us = clock_shift_unitaries(d);
            assert_eq!(us.len(), d * d);
            assert!(us.iter().all(|u| unitarity_defect(u) < 1e-12));
            assert!(encoding_gram_deviation(&us) < 1e-12);
        }
    }

    #[test]
    fn max_entangled_reductions() {
        for d in 2..=4 {
            let u = unitary_from_params(d, &(0..d * d).map(|k| 0.3 * k as f64 - 1.0).collect::<Vec<_>>());
            assert!(unitarity_defect(&u) < 1e-12);
            let g = GeneralMaxEntangled::new(&u);
            assert!((g.amplitudes.norm() - 1.0).abs() < 1e-12);
            assert!(g.reduced_deviation() < 1e-10);
        }
    }

    #[test]
    fn dense_coding_examples() {
        let us2 = clock_shift_unitaries(2);
        let bell = DensityMatrix::from_pure(&phi1_d(2)).unwrap();
        assert!((dense_coding_fidelity_d(&bell, &us2).unwrap() - 1.0).abs() < 1e-12);
        let us3 = clock_shift_unitaries(3);
        let phi3 = DensityMatrix::from_pure(&phi1_d(3)).unwrap();
        assert!((dense_coding_fidelity_d(&phi3, &us3).unwrap() - 1.0).abs() < 1e-12);
        let p00 = DensityMatrix::from_pure(&ComplexVector::basis(9, 0)).unwrap();
        assert!((dense_coding_fidelity_d(&p00, &us3).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dense_coding_reduces_to_overlap() {
        for d in 2..=3 {
            let us = clock_shift_unitaries(d);
            for i in 0..50 {
                let rho = random_density_d(d, 3, i).unwrap();
                let dc = dense_coding_fidelity_d(&rho, &us).unwrap();
                assert!((dc - rho.overlap(&phi1_d(d))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_encodings_are_rejected() {
        let rho = DensityMatrix::maximally_mixed(9).unwrap();
        let same = vec![ComplexMatrix::identity(3); 9];
        assert!(matches!(
            dense_coding_fidelity_d(&rho, &same),
            Err(DdimError::NonOrthonormalEncoding { .. })
        ));
        assert!(matches!(
            dense_coding_fidelity_d(&rho, &clock_shift_unitaries(3)[..4]),
            Err(DdimError::EncodingCount { .. })
        ));
    }

    #[test]
    fn fef_numeric_examples() {
        let w = crate::states::werner(0.5).unwrap();
        assert!((fef_numeric_d(&w, &default_budget_d(2)).unwrap() - 0.625).abs() < 1e-6);
        let mixed = DensityMatrix::maximally_mixed(9).unwrap();
        assert!((fef_numeric_d(&mixed, &default_budget_d(3)).unwrap() - 1.0 / 9.0).abs() < 1e-9);
        let u0 = unitary_from_params(3, &[0.4, -1.1, 2.0, 0.7, 0.2, -0.5, 1.3, 0.9, -0.8]);
        let rho = DensityMatrix::from_pure(&GeneralMaxEntangled::new(&u0).amplitudes).unwrap();
        let f = fef_numeric_d(&rho, &default_budget_d(3)).unwrap();
        assert!((f - 1.0).abs() < 1e-6, "{f}");
        assert!(f <= 1.0 + 1e-9);
    }

    #[test]
    fn fef_numeric_matches_closed_form_for_qubits() {
        for i in 0..20 {
            let rho = random_density(17, i);
            let f = fully_entangled_fraction(&rho).unwrap().f;
            let n = fef_numeric_d(&rho, &default_budget_d(2)).unwrap();
            assert!((f - n).abs() < 1e-6, "{f} vs {n}");
        }
    }

    #[test]
    fn teleport_max_examples() {
        assert!((teleport_max_d(1.0, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((teleport_max_d(0.5, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((teleport_max_d(1.0, 5).unwrap() - 1.0).abs() < 1e-15);
        assert!(teleport_max_d(0.1, 2).is_err());
        assert!(teleport_max_d(1.1, 3).is_err());
        assert!(teleport_max_d(1.0, 1).is_err());
    }

    #[test]
    fn capacity() {
        assert!((channel_capacity_bits(2) - 2.0).abs() < 1e-15);
        assert!((channel_capacity_bits(4) - 4.0).abs() < 1e-15);
    }
}
