//! Single-qubit operators and local-unitary helpers.
//!
//! Two-qubit operators are always written Bob ⊗ Alice: the most significant
//! bit of a basis index is Bob's qubit, so |ba⟩ has index `2·b + a`.

use std::f64::consts::PI;

use rand::Rng;

use crate::linalg::{c, kron, ComplexMatrix};

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `1 ⊗ u`: acts on Alice's qubit only.
pub fn on_alice(u: &ComplexMatrix) -> ComplexMatrix {
    kron(&identity2(), u)
}

/// `u ⊗ 1`: acts on Bob's qubit only.
pub fn on_bob(u: &ComplexMatrix) -> ComplexMatrix {
    kron(u, &identity2())
}

/// `u_bob ⊗ u_alice`
pub fn local(u_bob: &ComplexMatrix, u_alice: &ComplexMatrix) -> ComplexMatrix {
    kron(u_bob, u_alice)
}

/// Three-angle single-qubit unitary
/// `[[cos(θ/2), −e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]`.
///
/// Covers U(2) up to a global phase.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = |a: f64| c(a.cos(), a.sin());
    ComplexMatrix::from_vec(
        2,
        2,
        vec![c(co, 0.0), -e(lambda) * s, e(phi) * s, e(phi + lambda) * co],
    )
}

/// Random three-angle unitary with the polar angle drawn so that the
/// rotation axis is uniform on the sphere.
pub fn random_u3<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
    let phi = 2.0 * PI * rng.gen::<f64>();
    let lambda = 2.0 * PI * rng.gen::<f64>();
    u3(theta, phi, lambda)
}

/// A random `U_bob ⊗ U_alice`.
pub fn random_local_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let ub = random_u3(rng);
    let ua = random_u3(rng);
    local(&ub, &ua)
}

/// Max entry of |u†u − 1|.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    u.adjoint()
        .matmul(u)
        .max_abs_diff(&ComplexMatrix::identity(u.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn paulis_square_to_identity_and_anticommute() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        for p in [&x, &y, &z] {
            assert!(p.matmul(p).max_abs_diff(&identity2()) < 1e-15);
        }
        // XY = iZ
        assert!(x.matmul(&y).max_abs_diff(&z.scale(c(0.0, 1.0))) < 1e-15);
    }

    #[test]
    fn u3_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert!(unitarity_defect(&random_u3(&mut rng)) < 1e-14);
            assert!(unitarity_defect(&random_local_unitary(&mut rng)) < 1e-14);
        }
    }

    #[test]
    fn local_ordering_is_bob_then_alice() {
        let x = pauli_x();
        // X on Alice flips the least significant bit: |00⟩ → |01⟩
        let v = on_alice(&x).mul_vec(&crate::linalg::ComplexVector::basis(4, 0));
        assert_eq!(v, crate::linalg::ComplexVector::basis(4, 1));
        let v = on_bob(&x).mul_vec(&crate::linalg::ComplexVector::basis(4, 0));
        assert_eq!(v, crate::linalg::ComplexVector::basis(4, 2));
    }
}
