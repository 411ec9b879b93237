//! Wootters concurrence and the bounds it obeys relative to the renormalized
//! fully entangled fraction `E`: `E ≤ C ≤ (E + 1)/2`.

use serde::{Deserialize, Serialize};

use crate::fef::fully_entangled_fraction;
use crate::linalg::{hermitian_eig, kron, ComplexMatrix, LinalgError, C64, PSD_CLAMP_TOL, PSD_REJECT_TOL};
use crate::ops::pauli_y;
use crate::states::{DensityMatrix, StateError};

/// Eigenvalues of `√ρ ρ̃ √ρ` above this (negative) threshold are clamped to 0.
pub const NEGATIVE_ROUNDING_TOL: f64 = -1e-10;
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceResult {
    pub c: f64,
    /// Square roots of the eigenvalues of `ρρ̃`, descending.
    pub lambdas: [f64; 4],
}

/// `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)` with conjugation in the computational basis.
pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix, StateError> {
    rho.require_dim(4)?;
    let yy = kron(&pauli_y(), &pauli_y());
    Ok(yy.matmul(&rho.matrix().conj()).matmul(&yy))
}

pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceResult, StateError> {
    let flipped = spin_flip(rho)?;
    // √ρ ρ̃ √ρ is similar to ρρ̃ and Hermitian PSD. It is formed in the
    // eigenbasis of ρ, where √ρ is diagonal: null directions of ρ then give
    // exactly zero rows, instead of rounding noise whose square root would
    // be ~1e-8.
    let eig_rho = hermitian_eig(rho.matrix())?;
    if let Some(&bad) = eig_rho.values.iter().find(|&&x| x < -PSD_REJECT_TOL) {
        return Err(LinalgError::NotPsd { eigenvalue: bad }.into());
    }
    let roots: Vec<f64> = eig_rho
        .values
        .iter()
        .map(|&x| if x <= PSD_CLAMP_TOL { 0.0 } else { x.sqrt() })
        .collect();
    let sandwich = ComplexMatrix::from_fn(4, 4, |r, c| {
        if roots[r] == 0.0 || roots[c] == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let w = eig_rho.vectors[r].inner(&flipped.mul_vec(&eig_rho.vectors[c]));
        w * (roots[r] * roots[c])
    })
    .hermitian_part();
    let eig = hermitian_eig(&sandwich)?;
    let mut lambdas = [0.0; 4];
    for (l, &v) in lambdas.iter_mut().zip(&eig.values) {
        if v < NEGATIVE_ROUNDING_TOL {
            return Err(LinalgError::NotPsd { eigenvalue: v }.into());
        }
        *l = v.max(0.0).sqrt();
    }
    let c = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    Ok(ConcurrenceResult { c, lambdas })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub e: f64,
    pub c: f64,
    /// `E ≤ C`
    pub lower_ok: bool,
    /// `C ≤ (E + 1)/2`
    pub upper_ok: bool,
}

impl BoundsCheck {
    pub fn from_values(e: f64, c: f64) -> Self {
        BoundsCheck {
            e,
            c,
            lower_ok: e <= c + BOUND_TOL,
            upper_ok: c <= (e + 1.0) / 2.0 + BOUND_TOL,
        }
    }

    pub fn ok(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

pub fn bounds_check(rho: &DensityMatrix) -> Result<BoundsCheck, StateError> {
    let e = fully_entangled_fraction(rho)?.e;
    let c = concurrence(rho)?.c;
    Ok(BoundsCheck::from_values(e, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c as cplx, ComplexVector};
    use crate::ops;
    use crate::states::{ket2, random_density, werner, MagicBasis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn spin_flip_examples() {
        let phi = MagicBasis::new().projector(0);
        assert!(spin_flip(&phi).unwrap().max_abs_diff(phi.matrix()) < 1e-15);
        let p00 = DensityMatrix::from_pure(&ket2(0, 0)).unwrap();
        let p11 = ket2(1, 1).projector();
        assert!(spin_flip(&p00).unwrap().max_abs_diff(&p11) < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(spin_flip(&mixed).unwrap().max_abs_diff(mixed.matrix()) < 1e-15);
    }

    #[test]
    fn concurrence_examples() {
        let phi = MagicBasis::new().projector(0);
        assert!((concurrence(&phi).unwrap().c - 1.0).abs() < 1e-12);
        let p00 = DensityMatrix::from_pure(&ket2(0, 0)).unwrap();
        assert!(concurrence(&p00).unwrap().c.abs() < 1e-12);
    }

    #[test]
    fn werner_concurrence() {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let r = concurrence(&werner(p).unwrap()).unwrap();
            assert!((r.c - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-10, "p={p} c={}", r.c);
            assert!(r.lambdas.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn schmidt_pure_states() {
        for k in 0..=20 {
            let t = k as f64 * std::f64::consts::FRAC_PI_2 / 20.0;
            let (b, a) = t.sin_cos();
            let psi = ComplexVector::from(vec![cplx(a, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(b, 0.0)]);
            let rho = DensityMatrix::from_pure(&psi).unwrap();
            assert!((concurrence(&rho).unwrap().c - 2.0 * a * b).abs() < 1e-10);
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for i in 0..100 {
            let rho = random_density(4, i);
            let u = ops::random_local_unitary(&mut rng);
            let c0 = concurrence(&rho).unwrap().c;
            let c1 = concurrence(&rho.conjugated(&u).unwrap()).unwrap().c;
            assert!((c0 - c1).abs() < 1e-9);
        }
    }

    #[test]
    fn bound_chain_on_random_states() {
        for i in 0..500 {
            let b = bounds_check(&random_density(13, i)).unwrap();
            assert!(b.ok());
            assert!(0.0 <= b.e && b.e <= b.c + 1e-9 && b.c <= (b.e + 1.0) / 2.0 + 1e-9 && b.c <= 1.0);
        }
    }
}
