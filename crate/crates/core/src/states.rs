//! Density matrices, the magic basis, and the state families used
//! throughout: Werner states, the two concurrence-bound families and the
//! seeded random samplers.
//!
//! Qubit order is Bob ⊗ Alice everywhere (basis index `2·bob + alice`).

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c, hermitian_eig, ComplexMatrix, ComplexVector, LinalgError, C64, MAX_DIM};
use crate::ops;

/// Tolerance for the Hermitian, unit-trace and PSD checks.
pub const STATE_TOL: f64 = 1e-10;

/// Identifies the random stream used by every sampler in this module.
/// Changing how draws are consumed must bump this.
pub const PRNG_STREAM: &str = "chacha20-stream/v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("density matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {0} is not d*d for 2 <= d <= 4")]
    BadDimension(usize),
    #[error("invariant `hermitian` violated: max |rho - rho†| = {0:e}")]
    NotHermitian(f64),
    #[error("invariant `unit_trace` violated: trace = {re} + {im}i")]
    TraceNotOne { re: f64, im: f64 },
    #[error("invariant `positive_semidefinite` violated: min eigenvalue = {0:e}")]
    NotPositive(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl StateError {
    /// Short name of the violated invariant, if this is an invariant failure.
    pub fn invariant(&self) -> Option<&'static str> {
        match self {
            StateError::NotSquare { .. } | StateError::BadDimension(_) => Some("dimension"),
            StateError::NotHermitian(_) => Some("hermitian"),
            StateError::TraceNotOne { .. } => Some("unit_trace"),
            StateError::NotPositive(_) => Some("positive_semidefinite"),
            _ => None,
        }
    }
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<(), StateError> {
    if value.is_nan() || value < lo || value > hi {
        Err(StateError::OutOfRange { name, value, lo, hi })
    } else {
        Ok(())
    }
}

/// A validated density matrix on `d ⊗ d`, `d ∈ {2, 3, 4}`.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix({:?})", self.matrix)
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity, each to [`STATE_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self, StateError> {
        if !matrix.is_square() {
            return Err(StateError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let n = matrix.rows();
        if n > MAX_DIM || !matches!(n, 4 | 9 | 16) {
            return Err(StateError::BadDimension(n));
        }
        let dev = matrix.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(StateError::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(StateError::TraceNotOne { re: tr.re, im: tr.im });
        }
        let eig = hermitian_eig(&matrix)?;
        let min = *eig.values.last().expect("nonempty spectrum");
        if min < -STATE_TOL {
            return Err(StateError::NotPositive(min));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn from_pure(psi: &ComplexVector) -> Result<Self, StateError> {
        Self::new(psi.normalized().projector())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self, StateError> {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Convex combination `Σ wᵢ ρᵢ`. Weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self, StateError> {
        let (_, first) = parts.first().expect("at least one component");
        let n = first.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (w, rho) in parts {
            check_range("mixture weight", *w, 0.0, 1.0)?;
            if rho.dim() != n {
                return Err(StateError::DimensionMismatch { expected: n, actual: rho.dim() });
            }
            acc = &acc + &rho.matrix.scale_real(*w);
        }
        Self::new(acc)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Total Hilbert-space dimension (`d²`).
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Local dimension `d`.
    pub fn local_dim(&self) -> usize {
        match self.dim() {
            4 => 2,
            9 => 3,
            16 => 4,
            n => unreachable!("validated dimension {n}"),
        }
    }

    pub fn require_dim(&self, dim: usize) -> Result<(), StateError> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(StateError::DimensionMismatch { expected: dim, actual: self.dim() })
        }
    }

    /// ⟨ψ|ρ|ψ⟩ (real part; the imaginary part vanishes for Hermitian ρ).
    pub fn overlap(&self, psi: &ComplexVector) -> f64 {
        psi.expectation(&self.matrix).re
    }

    /// `u ρ u†`, revalidated.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self, StateError> {
        Self::new(u.conjugate(&self.matrix))
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }
}

/// Two-qubit computational basis ket |bob alice⟩.
pub fn ket2(bob: usize, alice: usize) -> ComplexVector {
    ComplexVector::basis(4, 2 * bob + alice)
}

/// The four magic-basis states:
///
/// * |Φ¹⟩ = (|00⟩ + |11⟩)/√2
/// * |Φ²⟩ = i(|01⟩ + |10⟩)/√2 = (1 ⊗ iX)|Φ¹⟩
/// * |Φ³⟩ = (|10⟩ − |01⟩)/√2 = (1 ⊗ iY)|Φ¹⟩
/// * |Φ⁴⟩ = i(|00⟩ − |11⟩)/√2 = (1 ⊗ iZ)|Φ¹⟩
///
/// Indexed 0..4 in code, so `state(0)` is |Φ¹⟩.
#[derive(Clone, Debug)]
pub struct MagicBasis {
    states: [ComplexVector; 4],
}

impl Default for MagicBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl MagicBasis {
    pub fn new() -> Self {
        let s = FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let v = |a: [C64; 4]| ComplexVector::from(a.to_vec());
        MagicBasis {
            states: [
                v([c(s, 0.0), z, z, c(s, 0.0)]),
                v([z, c(0.0, s), c(0.0, s), z]),
                v([z, c(-s, 0.0), c(s, 0.0), z]),
                v([c(0.0, s), z, z, c(0.0, -s)]),
            ],
        }
    }

    pub fn state(&self, j: usize) -> &ComplexVector {
        &self.states[j]
    }

    pub fn states(&self) -> &[ComplexVector; 4] {
        &self.states
    }

    /// `Σ xₙ |Φⁿ⟩` for real coordinates `x`.
    pub fn combine(&self, x: &[f64; 4]) -> ComplexVector {
        let mut out = ComplexVector::zeros(4);
        for (xn, phi) in x.iter().zip(&self.states) {
            out = out.add(&phi.scale(c(*xn, 0.0)));
        }
        out
    }

    pub fn projector(&self, j: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&self.states[j]).expect("magic states are valid pure states")
    }
}

/// The Alice-side encodings {1, iX, iY, iZ} taking |Φ¹⟩ to |Φʲ⟩.
pub fn dense_coding_encodings() -> [ComplexMatrix; 4] {
    let i = c(0.0, 1.0);
    [
        ops::identity2(),
        ops::pauli_x().scale(i),
        ops::pauli_y().scale(i),
        ops::pauli_z().scale(i),
    ]
}

/// `p |Φ¹⟩⟨Φ¹| + (1 − p) 1/4`
pub fn werner(p: f64) -> Result<DensityMatrix, StateError> {
    check_range("p", p, 0.0, 1.0)?;
    let phi = MagicBasis::new().state(0).projector();
    let mixed = ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    DensityMatrix::new(&phi.scale_real(p) + &mixed)
}

/// Schmidt-form pure state `cos(θ/2)|00⟩ + sin(θ/2)|11⟩`.
pub fn schmidt_state(theta: f64) -> ComplexVector {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexVector::from(vec![c(co, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)])
}

/// `ε 1/4 + (1 − ε)|ψ⟩⟨ψ|` with |ψ⟩ in Schmidt form. Saturates `E = C`.
pub fn lower_family(epsilon: f64, theta: f64) -> Result<DensityMatrix, StateError> {
    check_range("epsilon", epsilon, 0.0, 1.0)?;
    check_range("theta", theta, 0.0, PI)?;
    let pure = schmidt_state(theta).projector().scale_real(1.0 - epsilon);
    let mixed = ComplexMatrix::identity(4).scale_real(epsilon / 4.0);
    DensityMatrix::new(&pure + &mixed)
}

/// [`lower_family`] conjugated by a seeded random `U_B ⊗ U_A`.
pub fn lower_family_dressed(epsilon: f64, theta: f64, seed: u64) -> Result<DensityMatrix, StateError> {
    let rho = lower_family(epsilon, theta)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rho.conjugated(&ops::random_local_unitary(&mut rng))
}

/// `ζ |01⟩⟨01| + (1 − ζ)|Φ¹⟩⟨Φ¹|`. Saturates `E = 2C − 1` for ζ ≤ 1/2.
pub fn upper_family(zeta: f64) -> Result<DensityMatrix, StateError> {
    check_range("zeta", zeta, 0.0, 1.0)?;
    let prod = ket2(0, 1).projector().scale_real(zeta);
    let phi = MagicBasis::new().state(0).projector().scale_real(1.0 - zeta);
    DensityMatrix::new(&prod + &phi)
}

/// The ChaCha20 stream for draw `index` under `seed`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw_random_density(rng: &mut ChaCha20Rng) -> DensityMatrix {
    loop {
        let t = ComplexMatrix::from_fn(4, 4, |_, _| {
            let re = rng.gen::<f64>();
            let im = rng.gen::<f64>();
            c(re, im)
        });
        let tt = t.matmul(&t.adjoint());
        let tr = tt.trace().re;
        if tr < 1e-30 {
            continue;
        }
        // TT† is Hermitian up to rounding; symmetrize so validation never trips on it.
        let rho = tt.hermitian_part().scale_real(1.0 / tr);
        return DensityMatrix::new(rho).expect("TT†/Tr(TT†) is a density matrix");
    }
}

/// `TT† / Tr(TT†)` with `T` entries `t_r + i t_i`, `t_r, t_i ~ U[0, 1)`.
pub fn random_density(seed: u64, index: u64) -> DensityMatrix {
    draw_random_density(&mut sample_stream(seed, index))
}

/// Mixing parameters of one mixture draw.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    /// Weight of the upper-bound family, in [0, 0.5].
    pub w: f64,
    pub zeta: f64,
}

pub const MIXTURE_MAX_WEIGHT: f64 = 0.5;

/// `(1 − w) R + w ρ₊(ζ)` with `w ~ U[0, 0.5)` and `ζ ~ U[0, 1)`.
///
/// `R` consumes the first 32 draws of the `(seed, index)` stream, so it is
/// identical to [`random_density`] for the same pair.
pub fn fig2_mixture(seed: u64, index: u64) -> (DensityMatrix, MixtureParams) {
    let mut rng = sample_stream(seed, index);
    let r = draw_random_density(&mut rng);
    let w = MIXTURE_MAX_WEIGHT * rng.gen::<f64>();
    let zeta = rng.gen::<f64>();
    let params = MixtureParams { w, zeta };
    (mix_with_upper(&r, params), params)
}

/// `(1 − w) R + w ρ₊(ζ)` for explicit parameters.
pub fn mix_with_upper(r: &DensityMatrix, params: MixtureParams) -> DensityMatrix {
    let upper = upper_family(params.zeta).expect("zeta drawn in range");
    if params.w == 0.0 {
        return r.clone();
    }
    DensityMatrix::mixture(&[(1.0 - params.w, r), (params.w, &upper)])
        .expect("convex combination of density matrices")
}

/// Which sampler produced a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    RawEq25,
    Fig2Mixture,
    Werner,
    LowerFamily,
    UpperFamily,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::RawEq25 => "raw_eq25",
            Family::Fig2Mixture => "fig2_mixture",
            Family::Werner => "werner",
            Family::LowerFamily => "lower_family",
            Family::UpperFamily => "upper_family",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deterministically regenerates draw `index` of `family` under `seed`.
///
/// Returns the state and its family parameters: none for `RawEq25`,
/// `[w, ζ]` for the mixture, `[p]`, `[ε, θ]` and `[ζ]` for the named families
/// (drawn uniformly over their full ranges).
pub fn sample_state(family: Family, seed: u64, index: u64) -> (DensityMatrix, Vec<f64>) {
    match family {
        Family::RawEq25 => (random_density(seed, index), vec![]),
        Family::Fig2Mixture => {
            let (rho, p) = fig2_mixture(seed, index);
            (rho, vec![p.w, p.zeta])
        }
        Family::Werner => {
            let p = sample_stream(seed, index).gen::<f64>();
            (werner(p).expect("p in range"), vec![p])
        }
        Family::LowerFamily => {
            let mut rng = sample_stream(seed, index);
            let eps = rng.gen::<f64>();
            let theta = PI * rng.gen::<f64>();
            (lower_family(eps, theta).expect("params in range"), vec![eps, theta])
        }
        Family::UpperFamily => {
            let zeta = sample_stream(seed, index).gen::<f64>();
            (upper_family(zeta).expect("zeta in range"), vec![zeta])
        }
    }
}
