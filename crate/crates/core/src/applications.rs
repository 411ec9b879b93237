//! Protocol fidelities for a shared two-qubit state: dense coding,
//! teleportation, entanglement swapping and the CHSH correlation.
//!
//! Each protocol is simulated on the full state vector space, with
//! outcomes projected and the conditional states traced out. The closed
//! forms in terms of `⟨Φ¹|ρ|Φ¹⟩` are checked against these simulations.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::concurrence::concurrence;
use crate::fef::fully_entangled_fraction;
use crate::linalg::{c, kron, partial_trace, permute_subsystems, ComplexMatrix, ComplexVector};
use crate::ops::{self, identity2, pauli_x, pauli_z};
use crate::optimize::{maximize, SearchBudget};
use crate::states::{check_range, dense_coding_encodings, ket2, schmidt_state, DensityMatrix, MagicBasis, StateError};

/// Tsirelson's bound `2√2`.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

/// ⟨Φ¹|ρ|Φ¹⟩
pub fn phi1_overlap(rho: &DensityMatrix) -> Result<f64, StateError> {
    rho.require_dim(4)?;
    Ok(rho.overlap(MagicBasis::new().state(0)))
}

/// Average over the four encodings {1, iX, iY, iZ} on Alice's qubit of the
/// overlap between the encoded state and the matching magic state.
pub fn dense_coding_fidelity(rho: &DensityMatrix) -> Result<f64, StateError> {
    rho.require_dim(4)?;
    let mb = MagicBasis::new();
    let total: f64 = dense_coding_encodings()
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let encoded = ops::on_alice(u).conjugate(rho.matrix());
            mb.state(j).expectation(&encoded).re
        })
        .sum();
    Ok(total / 4.0)
}

/// Dense-coding fidelity maximized over `U_B ⊗ U_A` (numeric).
pub fn dense_coding_fidelity_max(rho: &DensityMatrix, budget: &SearchBudget) -> Result<f64, StateError> {
    rho.require_dim(4)?;
    let phi1 = MagicBasis::new().state(0).clone();
    Ok(maximize(
        |p| rho.overlap(&local_from_params(p).mul_vec(&phi1)),
        6,
        budget,
        local_param_sampler,
        0.4,
    )
    .value)
}

fn local_from_params(p: &[f64]) -> ComplexMatrix {
    ops::local(&ops::u3(p[0], p[1], p[2]), &ops::u3(p[3], p[4], p[5]))
}

fn local_param_sampler(rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..2)
        .flat_map(|_| [rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)])
        .collect()
}

/// Product quadrature on the sphere: Gauss–Legendre in `cos θ` times
/// equally spaced `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereQuadrature {
    /// `(cos θ node, weight)` on [−1, 1].
    pub cos_nodes: Vec<(f64, f64)>,
    pub phi_points: usize,
}

impl Default for SphereQuadrature {
    /// 4 × 8 nodes. The teleported-state fidelity is a polynomial of degree
    /// two in the Bloch vector, so this rule integrates it exactly.
    fn default() -> Self {
        SphereQuadrature::new(4, 8)
    }
}

impl SphereQuadrature {
    pub fn new(legendre: usize, phi_points: usize) -> Self {
        SphereQuadrature { cos_nodes: gauss_legendre(legendre), phi_points }
    }

    /// `(1/4π) ∫ f(θ, φ) sin θ dθ dφ`
    pub fn average(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        let dphi = 2.0 * PI / self.phi_points as f64;
        let mut total = 0.0;
        for &(x, w) in &self.cos_nodes {
            let theta = x.acos();
            for k in 0..self.phi_points {
                total += w * dphi * f(theta, k as f64 * dphi);
            }
        }
        total / (4.0 * PI)
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

/// Standard Bell states on (input, Alice) with their Pauli corrections.
///
/// Outcome `(phase p, flip b)` is `(|0,b⟩ + (−1)^p |1,b̄⟩)/√2`; Bob applies
/// `Z^p X^b`.
fn bell_outcomes() -> Vec<(ComplexVector, ComplexMatrix)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(4);
    for p in 0..2 {
        for b in 0..2 {
            let mut v = ComplexVector::zeros(4);
            v[b] = c(s, 0.0);
            v[2 + (1 - b)] = c(if p == 0 { s } else { -s }, 0.0);
            let mut corr = identity2();
            if b == 1 {
                corr = pauli_x().matmul(&corr);
            }
            if p == 1 {
                corr = pauli_z().matmul(&corr);
            }
            out.push((v, corr));
        }
    }
    out
}

/// Output fidelity `f(θ, φ)` of teleporting `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`
/// through `ρ`, summed over the four Bell outcomes with their probabilities.
pub fn teleport_output_fidelity(rho: &DensityMatrix, theta: f64, phi: f64) -> Result<f64, StateError> {
    rho.require_dim(4)?;
    let (s, co) = (theta / 2.0).sin_cos();
    let psi = ComplexVector::from(vec![c(co, 0.0), c(phi.cos() * s, phi.sin() * s)]);
    // ρ is stored Bob ⊗ Alice; the circuit wants (input, Alice, Bob).
    let alice_bob = permute_subsystems(rho.matrix(), &[2, 2], &[1, 0])?;
    let full = kron(&psi.projector(), &alice_bob);
    let mut f = 0.0;
    for (bell, corr) in bell_outcomes() {
        let proj = kron(&bell.projector(), &identity2());
        let post = proj.matmul(&full).matmul(&proj);
        let bob = partial_trace(&post, &[2, 2, 2], &[2])?;
        f += psi.expectation(&corr.conjugate(&bob)).re;
    }
    Ok(f)
}

/// Input-averaged teleportation fidelity.
pub fn teleportation_fidelity(rho: &DensityMatrix, quadrature: &SphereQuadrature) -> Result<f64, StateError> {
    rho.require_dim(4)?;
    let mut err = None;
    let avg = quadrature.average(|t, p| match teleport_output_fidelity(rho, t, p) {
        Ok(v) => v,
        Err(e) => {
            err = Some(e);
            0.0
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(avg),
    }
}

/// `(1 + 2F)/3`
pub fn teleportation_max(f: f64) -> f64 {
    (1.0 + 2.0 * f) / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapOutcome {
    pub probability: f64,
    /// `⟨Φʲ|σⱼ|Φʲ⟩` for the unnormalized conditional state `σⱼ`.
    pub weighted_overlap: f64,
}

impl SwapOutcome {
    /// Conditional fidelity; zero for an impossible outcome.
    pub fn fidelity(&self) -> f64 {
        if self.probability > 1e-300 {
            self.weighted_overlap / self.probability
        } else {
            0.0
        }
    }
}

/// Entanglement swapping with `ρ` on particles (1,2), `|Φ¹⟩` on (3,4).
///
/// Alice measures (1,3) in the magic basis; Bob holds (2,4) and the target
/// for outcome `j` is `|Φʲ⟩`. `ρ`'s stored factor order is taken as (1,2);
/// the swapping fidelity is symmetric under exchanging them.
pub fn swapping_outcomes(rho: &DensityMatrix) -> Result<[SwapOutcome; 4], StateError> {
    rho.require_dim(4)?;
    let mb = MagicBasis::new();
    let full = kron(rho.matrix(), &mb.state(0).projector());
    // (1,2,3,4) → (1,3,2,4)
    let grouped = permute_subsystems(&full, &[2, 2, 2, 2], &[0, 2, 1, 3])?;
    let mut out = [SwapOutcome { probability: 0.0, weighted_overlap: 0.0 }; 4];
    for (j, slot) in out.iter_mut().enumerate() {
        let proj = kron(&mb.state(j).projector(), &ComplexMatrix::identity(4));
        let post = proj.matmul(&grouped).matmul(&proj);
        let bob = partial_trace(&post, &[4, 4], &[1])?;
        *slot = SwapOutcome {
            probability: bob.trace().re,
            weighted_overlap: mb.state(j).expectation(&bob).re,
        };
    }
    Ok(out)
}

/// Probability-weighted swapping fidelity `Σⱼ pⱼ fⱼ`.
pub fn swapping_fidelity(rho: &DensityMatrix) -> Result<f64, StateError> {
    Ok(swapping_outcomes(rho)?.iter().map(|o| o.weighted_overlap).sum())
}

/// Unweighted `(1/4) Σⱼ fⱼ`; kept for comparison only.
pub fn swapping_fidelity_unweighted(rho: &DensityMatrix) -> Result<f64, StateError> {
    Ok(swapping_outcomes(rho)?.iter().map(|o| o.fidelity()).sum::<f64>() / 4.0)
}

/// Detector angles for the CHSH expression.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles {
    pub phi1: f64,
    pub phi1p: f64,
    pub phi2: f64,
    pub phi2p: f64,
}

impl ChshAngles {
    /// (0, π/2, π/4, 3π/4)
    pub const CANONICAL: ChshAngles = ChshAngles {
        phi1: 0.0,
        phi1p: FRAC_PI_2,
        phi2: FRAC_PI_4,
        phi2p: 3.0 * FRAC_PI_4,
    };
}

/// `S(φ) = cos φ Z + sin φ X`
pub fn detector(phi: f64) -> ComplexMatrix {
    &pauli_z().scale_real(phi.cos()) + &pauli_x().scale_real(phi.sin())
}

/// `|Tr{S₁(φ₁)S₂(φ₂)ρ − S₁(φ₁)S₂(φ₂′)ρ + S₁(φ₁′)S₂(φ₂)ρ + S₁(φ₁′)S₂(φ₂′)ρ}|`,
/// with `S₁` on the first stored factor.
pub fn bell_chsh(rho: &DensityMatrix, a: ChshAngles) -> Result<f64, StateError> {
    rho.require_dim(4)?;
    let (s1, s1p, s2, s2p) = (detector(a.phi1), detector(a.phi1p), detector(a.phi2), detector(a.phi2p));
    let op = &(&(&kron(&s1, &s2) - &kron(&s1, &s2p)) + &kron(&s1p, &s2)) + &kron(&s1p, &s2p);
    Ok(op.matmul(rho.matrix()).trace().re.abs())
}

/// `2√2 |⟨Φ¹|ρ|Φ¹⟩ − ⟨Φ³|ρ|Φ³⟩|`
pub fn bell_canonical(rho: &DensityMatrix) -> Result<f64, StateError> {
    rho.require_dim(4)?;
    let mb = MagicBasis::new();
    Ok(TSIRELSON * (rho.overlap(mb.state(0)) - rho.overlap(mb.state(2))).abs())
}

/// `T[a][b] = Tr{(σₐ ⊗ σ_b) ρ}` for `a, b ∈ {Z, X}`.
pub fn zx_correlations(rho: &DensityMatrix) -> Result<[[f64; 2]; 2], StateError> {
    rho.require_dim(4)?;
    let ops2 = [pauli_z(), pauli_x()];
    let mut t = [[0.0; 2]; 2];
    for (i, a) in ops2.iter().enumerate() {
        for (j, b) in ops2.iter().enumerate() {
            t[i][j] = kron(a, b).matmul(rho.matrix()).trace().re;
        }
    }
    Ok(t)
}

fn chsh_from_correlations(t: &[[f64; 2]; 2], a: &[f64]) -> f64 {
    let e = |x: f64, y: f64| {
        let u = [x.cos(), x.sin()];
        let v = [y.cos(), y.sin()];
        u[0] * (t[0][0] * v[0] + t[0][1] * v[1]) + u[1] * (t[1][0] * v[0] + t[1][1] * v[1])
    };
    (e(a[0], a[2]) - e(a[0], a[3]) + e(a[1], a[2]) + e(a[1], a[3])).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellMode {
    /// Maximize the CHSH expression over the four detector angles.
    Angles,
    /// Maximize [`bell_canonical`] over `U_B ⊗ U_A` conjugations.
    LocalUnitaries,
}

pub fn bell_max(rho: &DensityMatrix, mode: BellMode, budget: &SearchBudget) -> Result<f64, StateError> {
    rho.require_dim(4)?;
    match mode {
        BellMode::Angles => {
            let t = zx_correlations(rho)?;
            let m = maximize(
                |a| chsh_from_correlations(&t, a),
                4,
                budget,
                |rng| (0..4).map(|_| rng.gen_range(0.0..2.0 * PI)).collect(),
                0.5,
            );
            Ok(m.value)
        }
        BellMode::LocalUnitaries => {
            let mb = MagicBasis::new();
            let (p1, p3) = (mb.state(0).clone(), mb.state(2).clone());
            let m = maximize(
                |p| {
                    // ⟨Φ|UρU†|Φ⟩ = ⟨U†Φ|ρ|U†Φ⟩
                    let ud = local_from_params(p).adjoint();
                    TSIRELSON * (rho.overlap(&ud.mul_vec(&p1)) - rho.overlap(&ud.mul_vec(&p3))).abs()
                },
                6,
                budget,
                local_param_sampler,
                0.4,
            );
            Ok(m.value)
        }
    }
}

/// Closed-form maximum of the CHSH expression over in-plane detector
/// angles: `2‖T‖_F` for the Z–X correlation block (the two-singular-value
/// criterion restricted to a plane). Used only as a cross-check of
/// [`bell_max`] in angles mode.
pub fn bell_max_angles_analytic(rho: &DensityMatrix) -> Result<f64, StateError> {
    let t = zx_correlations(rho)?;
    Ok(2.0 * t.iter().flatten().map(|x| x * x).sum::<f64>().sqrt())
}

/// `max_{U_A,U_B} ⟨ψ_f|(U_B⊗U_A)† σ (U_B⊗U_A)|ψ_f⟩`.
pub fn fiducial_fidelity(psi_f: &ComplexVector, sigma: &DensityMatrix, budget: &SearchBudget) -> Result<f64, StateError> {
    sigma.require_dim(4)?;
    Ok(maximize(
        |p| sigma.overlap(&local_from_params(p).mul_vec(psi_f)),
        6,
        budget,
        local_param_sampler,
        0.4,
    )
    .value)
}

/// `Δ(θ)`: fiducial fidelity with a maximally entangled state minus that
/// with a product state, for the fiducial `cos(θ/2)|00⟩ + sin(θ/2)|11⟩`.
pub fn fiducial_gap(theta: f64, budget: &SearchBudget) -> Result<f64, StateError> {
    check_range("theta", theta, 0.0, PI)?;
    let psi_f = schmidt_state(theta);
    let entangled = MagicBasis::new().projector(0);
    let product = DensityMatrix::from_pure(&ket2(0, 1))?;
    Ok(fiducial_fidelity(&psi_f, &entangled, budget)? - fiducial_fidelity(&psi_f, &product, budget)?)
}

/// Every measure for one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "F_DC")]
    pub f_dc: f64,
    #[serde(rename = "F_DC_max")]
    pub f_dc_max: f64,
    #[serde(rename = "F_T")]
    pub f_t: f64,
    #[serde(rename = "F_T_max")]
    pub f_t_max: f64,
    #[serde(rename = "F_ES")]
    pub f_es: f64,
    #[serde(rename = "F_ES_max")]
    pub f_es_max: f64,
    #[serde(rename = "B_canonical")]
    pub b_canonical: f64,
    #[serde(rename = "B_max_angles")]
    pub b_max_angles: f64,
    #[serde(rename = "B_max_unitaries")]
    pub b_max_unitaries: f64,
}

pub fn analyze(rho: &DensityMatrix, budget: &SearchBudget) -> Result<AnalysisReport, StateError> {
    let fef = fully_entangled_fraction(rho)?;
    Ok(AnalysisReport {
        f: fef.f,
        e: fef.e,
        c: concurrence(rho)?.c,
        f_dc: dense_coding_fidelity(rho)?,
        f_dc_max: fef.f,
        f_t: teleportation_fidelity(rho, &SphereQuadrature::default())?,
        f_t_max: teleportation_max(fef.f),
        f_es: swapping_fidelity(rho)?,
        f_es_max: fef.f,
        b_canonical: bell_canonical(rho)?,
        b_max_angles: bell_max(rho, BellMode::Angles, budget)?,
        b_max_unitaries: bell_max(rho, BellMode::LocalUnitaries, budget)?,
    })
}

/// One checked identity: observed deviation against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        IdentityCheck { name: name.into(), deviation, tolerance, pass: deviation <= tolerance }
    }
}

/// Tolerances for the protocol reductions.
pub const DENSE_CODING_TOL: f64 = 1e-12;
pub const TELEPORT_TOL: f64 = 1e-10;
pub const SWAP_TOL: f64 = 1e-12;
pub const BELL_TOL: f64 = 1e-12;

/// Checks the four protocol reductions against a report for the same state.
pub fn reduction_checks(rho: &DensityMatrix, report: &AnalysisReport) -> Result<Vec<IdentityCheck>, StateError> {
    let p1 = phi1_overlap(rho)?;
    Ok(vec![
        IdentityCheck::new("dense_coding_reduction", (report.f_dc - p1).abs(), DENSE_CODING_TOL),
        IdentityCheck::new("teleportation_reduction", (report.f_t - (1.0 + 2.0 * p1) / 3.0).abs(), TELEPORT_TOL),
        IdentityCheck::new("swapping_reduction", (report.f_es - p1).abs(), SWAP_TOL),
        IdentityCheck::new(
            "bell_canonical_reduction",
            (report.b_canonical - bell_chsh(rho, ChshAngles::CANONICAL)?).abs(),
            BELL_TOL,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_density, werner};

    #[test]
    fn gauss_legendre_four_points() {
        let gl = gauss_legendre(4);
        let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        let wa = (18.0 + 30f64.sqrt()) / 36.0;
        let wb = (18.0 - 30f64.sqrt()) / 36.0;
        let expect = [(-b, wb), (-a, wa), (a, wa), (b, wb)];
        for ((x, w), (ex, ew)) in gl.iter().zip(expect) {
            assert!((x - ex).abs() < 1e-15 && (w - ew).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_integrates_sphere_moments() {
        let q = SphereQuadrature::default();
        assert!((q.average(|_, _| 1.0) - 1.0).abs() < 1e-15);
        assert!((q.average(|t, _| t.cos().powi(2)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.average(|t, p| (t.sin() * p.cos()).powi(2)) - 1.0 / 3.0).abs() < 1e-15);
        assert!(q.average(|t, p| t.sin() * p.cos() * t.cos()).abs() < 1e-15);
    }

    #[test]
    fn dense_coding_examples() {
        let mb = MagicBasis::new();
        assert!((dense_coding_fidelity(&mb.projector(0)).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((dense_coding_fidelity(&mixed).unwrap() - 0.25).abs() < 1e-15);
        let p01 = DensityMatrix::from_pure(&ket2(0, 1)).unwrap();
        assert!(dense_coding_fidelity(&p01).unwrap().abs() < 1e-15);
        let maxed = dense_coding_fidelity_max(&p01, &SearchBudget::default()).unwrap();
        assert!((maxed - 0.5).abs() < 1e-6);
    }

    #[test]
    fn teleportation_examples() {
        let q = SphereQuadrature::default();
        let mb = MagicBasis::new();
        assert!((teleportation_fidelity(&mb.projector(0), &q).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((teleportation_fidelity(&mixed, &q).unwrap() - 0.5).abs() < 1e-12);
        // each Bell outcome contributes; ideal channel gives unit fidelity pointwise
        for (t, p) in [(0.3, 1.0), (2.0, 4.0)] {
            assert!((teleport_output_fidelity(&mb.projector(0), t, p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn teleportation_matches_reduction() {
        let q = SphereQuadrature::default();
        for i in 0..40 {
            let rho = random_density(21, i);
            let ft = teleportation_fidelity(&rho, &q).unwrap();
            let p1 = phi1_overlap(&rho).unwrap();
            assert!((ft - (1.0 + 2.0 * p1) / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn swapping_examples() {
        let mb = MagicBasis::new();
        let outs = swapping_outcomes(&mb.projector(0)).unwrap();
        for o in outs {
            assert!((o.probability - 0.25).abs() < 1e-12);
            assert!((o.fidelity() - 1.0).abs() < 1e-12);
        }
        assert!((swapping_fidelity(&mb.projector(0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(swapping_fidelity(&mb.projector(1)).unwrap().abs() < 1e-12);
        assert!((swapping_fidelity(&werner(0.5).unwrap()).unwrap() - 0.625).abs() < 1e-12);
        assert!((swapping_fidelity_unweighted(&mb.projector(0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chsh_examples() {
        let mb = MagicBasis::new();
        let b = bell_chsh(&mb.projector(0), ChshAngles::CANONICAL).unwrap();
        assert!((b - TSIRELSON).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        let any = ChshAngles { phi1: 0.3, phi1p: 1.1, phi2: -0.7, phi2p: 2.9 };
        assert!(bell_chsh(&mixed, any).unwrap().abs() < 1e-15);
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let b = bell_chsh(&werner(p).unwrap(), ChshAngles::CANONICAL).unwrap();
            assert!((b - TSIRELSON * p).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_examples() {
        let mb = MagicBasis::new();
        assert!((bell_canonical(&mb.projector(2)).unwrap() - TSIRELSON).abs() < 1e-12);
        assert!((bell_canonical(&mb.projector(0)).unwrap() - TSIRELSON).abs() < 1e-12);
        let half = DensityMatrix::mixture(&[(0.5, &mb.projector(0)), (0.5, &mb.projector(2))]).unwrap();
        assert!(bell_canonical(&half).unwrap().abs() < 1e-15);
    }

    #[test]
    fn bell_max_examples() {
        let mb = MagicBasis::new();
        let b = SearchBudget::default();
        for mode in [BellMode::Angles, BellMode::LocalUnitaries] {
            assert!((bell_max(&mb.projector(0), mode, &b).unwrap() - TSIRELSON).abs() < 1e-6);
        }
        let w = werner(0.8).unwrap();
        assert!(bell_max(&w, BellMode::Angles, &b).unwrap() >= bell_canonical(&w).unwrap() - 1e-12);
    }

    #[test]
    fn bell_max_angles_matches_analytic() {
        let b = SearchBudget::default();
        for i in 0..30 {
            let rho = random_density(8, i);
            let num = bell_max(&rho, BellMode::Angles, &b).unwrap();
            let ana = bell_max_angles_analytic(&rho).unwrap();
            assert!((num - ana).abs() < 1e-8, "{num} vs {ana}");
        }
    }

    #[test]
    fn fiducial_gap_examples() {
        let b = SearchBudget::default();
        assert!((fiducial_gap(FRAC_PI_2, &b).unwrap() - 0.5).abs() < 1e-6);
        assert!((fiducial_gap(0.0, &b).unwrap() + 0.5).abs() < 1e-6);
        assert!(fiducial_gap(FRAC_PI_4, &b).unwrap().abs() < 1e-6);
        assert!(matches!(fiducial_gap(4.0, &b), Err(StateError::OutOfRange { .. })));
    }

    #[test]
    fn report_invariants_hold() {
        let b = SearchBudget::default().with_starts(4);
        for i in 0..10 {
            let rho = random_density(2, i);
            let r = analyze(&rho, &b).unwrap();
            assert_eq!(r.f_dc_max, r.f);
            assert_eq!(r.f_es_max, r.f);
            assert!((r.f_t_max - (1.0 + 2.0 * r.f) / 3.0).abs() < 1e-15);
            for v in [r.b_canonical, r.b_max_angles, r.b_max_unitaries] {
                assert!(v <= TSIRELSON + 1e-9);
            }
            assert!(r.b_max_unitaries / TSIRELSON <= r.f + 1e-9);
            assert!(reduction_checks(&rho, &r).unwrap().iter().all(|c| c.pass));
        }
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(9).unwrap();
        assert!(dense_coding_fidelity(&rho).is_err());
        assert!(swapping_fidelity(&rho).is_err());
        assert!(bell_canonical(&rho).is_err());
        assert!(teleportation_fidelity(&rho, &SphereQuadrature::default()).is_err());
    }
}
