//! The δ = 0 dark-state manifold: non-radiating stationary states with
//! Ψ₃ = φ₁ = φ₂ = 0 and a free amplitude Ψ₂ ∈ [0, 1].
//!
//! Every point of the manifold has energy E₁, zero photon occupation, finite
//! coherence ψ₁Ψ₂ between the two ground levels and an exactly flat
//! (massless) direction along Ψ₂. The fluctuation spectrum at fixed Ψ₂
//! follows from a 3×3 symmetric eigenproblem in the (d₃, c₁, c₂) sector; the
//! decoupled d₂ mode contributes the structural zero ε₀.

use crate::model::ModelParams;
use crate::spectra::ModeEnergy;
use nalgebra::Matrix3;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DarkStateError {
    #[error("dark states exist for delta = 0 only (got delta = {delta})")]
    DeltaNotZero { delta: f64 },
    #[error("psi2 must lie in [0, 1], got {psi2}")]
    Psi2OutOfRange { psi2: f64 },
    #[error("two-photon resonance omega1 = omega2 = Delta required")]
    OffResonance,
}

/// One sample of the dark manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkStatePoint {
    pub psi2: f64,
    /// ψ₁ = √(1 − Ψ₂²).
    pub psi1: f64,
    /// Coherence density ⟨A₁²⟩/N = ψ₁Ψ₂ ∈ [0, ½].
    pub coherence_density: f64,
    pub stable: bool,
    /// Equality case of the stability inequality.
    pub marginal: bool,
    /// Upper stability bound on Ψ₂ when g₂ > g₂,c and g₁ < g₁,c.
    pub psi2_max: Option<f64>,
    /// Lower stability bound on Ψ₂ in the interchanged case.
    pub psi2_min: Option<f64>,
    /// [ε₀ = 0, then the 3×3 sector ascending].
    pub spectrum: [ModeEnergy; 4],
}

/// Stability verdict for the whole manifold at fixed couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkStability {
    pub stable: bool,
    pub marginal: bool,
    pub psi2_max: Option<f64>,
    pub psi2_min: Option<f64>,
}

fn require_delta_zero(params: &ModelParams) -> Result<(), DarkStateError> {
    if params.delta != 0.0 {
        return Err(DarkStateError::DeltaNotZero {
            delta: params.delta,
        });
    }
    Ok(())
}

fn check_psi2(psi2: f64) -> Result<(), DarkStateError> {
    if !(0.0..=1.0 + 1e-12).contains(&psi2) {
        return Err(DarkStateError::Psi2OutOfRange { psi2 });
    }
    Ok(())
}

/// Fluctuation energies of the dark state at fixed Ψ₂ from the characteristic
/// 3×3 problem; ε² are the eigenvalues of
/// [[Δ², 2g₁ψ₁√(ω₁Δ), 2g₂Ψ₂√(ω₂Δ)], [·, ω₁², 0], [·, 0, ω₂²]] and the flat
/// ε₀ = 0 mode is appended first. Negative ε² are flagged, not thrown.
pub fn dark_spectrum_general(
    psi2: f64,
    params: &ModelParams,
) -> Result<[ModeEnergy; 4], DarkStateError> {
    require_delta_zero(params)?;
    check_psi2(psi2)?;
    let psi1 = (1.0 - psi2 * psi2).max(0.0).sqrt();
    let d = params.cap_delta;
    let c1 = 2.0 * params.g1 * psi1 * (params.omega1 * d).sqrt();
    let c2 = 2.0 * params.g2 * psi2 * (params.omega2 * d).sqrt();
    let m = Matrix3::new(
        d * d,
        c1,
        c2,
        c1,
        params.omega1 * params.omega1,
        0.0,
        c2,
        0.0,
        params.omega2 * params.omega2,
    );
    let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok([
        ModeEnergy::Real(0.0),
        ModeEnergy::from_eps_sq(eig[0]),
        ModeEnergy::from_eps_sq(eig[1]),
        ModeEnergy::from_eps_sq(eig[2]),
    ])
}

/// Closed-form dark spectrum at two-photon resonance ω₁ = ω₂ = Δ ≡ ω:
/// ε₀ = 0, ε₁ = ω, ε₂,± = √(ω² ± 2ω·g_eff) with
/// g_eff = √(g₁²(1−Ψ₂²) + g₂²Ψ₂²). Order: [ε₀, ε₁, ε₂₋, ε₂₊].
pub fn dark_spectrum_resonant(
    psi2: f64,
    omega: f64,
    g1: f64,
    g2: f64,
) -> Result<[ModeEnergy; 4], DarkStateError> {
    check_psi2(psi2)?;
    let psi2_sq = psi2 * psi2;
    let g_eff = (g1 * g1 * (1.0 - psi2_sq) + g2 * g2 * psi2_sq).sqrt();
    Ok([
        ModeEnergy::Real(0.0),
        ModeEnergy::Real(omega),
        ModeEnergy::from_eps_sq(omega * omega - 2.0 * omega * g_eff),
        ModeEnergy::from_eps_sq(omega * omega + 2.0 * omega * g_eff),
    ])
}

/// Stability inequality at fixed Ψ₂, evaluated in the gap-free form
/// 4(g₁²/ω₁)(1 − Ψ₂²) + 4(g₂²/ω₂)Ψ₂² ≤ Δ (equivalent to
/// (g₁/g₁,c)²(1−Ψ₂²) ≤ 1 − (g₂/g₂,c)²Ψ₂² for Δ > 0), together with the
/// stability interval endpoints when exactly one coupling is supercritical.
pub fn dark_stability(psi2: f64, params: &ModelParams) -> Result<DarkStability, DarkStateError> {
    require_delta_zero(params)?;
    check_psi2(psi2)?;
    let r1 = 4.0 * params.g1 * params.g1 / params.omega1;
    let r2 = 4.0 * params.g2 * params.g2 / params.omega2;
    let d = params.cap_delta;
    let psi2_sq = psi2 * psi2;
    let lhs = r1 * (1.0 - psi2_sq) + r2 * psi2_sq;
    let margin = 1e-12 * (1.0 + d + r1 + r2);
    let stable = lhs <= d + margin;
    let marginal = stable && lhs >= d - margin;

    // Threshold Psi_2^2 where the inequality saturates: x* = (Delta - r1)/(r2 - r1).
    let (mut psi2_max, mut psi2_min) = (None, None);
    if (r2 - r1).abs() > margin {
        let x = (d - r1) / (r2 - r1);
        if (0.0..=1.0).contains(&x) {
            if r2 > d && r1 < d {
                psi2_max = Some(x.sqrt());
            } else if r1 > d && r2 < d {
                psi2_min = Some(x.sqrt());
            }
        }
    }
    Ok(DarkStability {
        stable,
        marginal,
        psi2_max,
        psi2_min,
    })
}

/// Uniform sample of the manifold with stability, coherence and the general
/// spectrum attached; backs the surface-overlay output.
pub fn dark_manifold_scan(
    params: &ModelParams,
    n_points: usize,
) -> Result<Vec<DarkStatePoint>, DarkStateError> {
    require_delta_zero(params)?;
    let n = n_points.max(2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let psi2 = i as f64 / (n - 1) as f64;
        let psi1 = (1.0 - psi2 * psi2).max(0.0).sqrt();
        let st = dark_stability(psi2, params)?;
        out.push(DarkStatePoint {
            psi2,
            psi1,
            coherence_density: psi1 * psi2,
            stable: st.stable,
            marginal: st.marginal,
            psi2_max: st.psi2_max,
            psi2_min: st.psi2_min,
            spectrum: dark_spectrum_general(psi2, params)?,
        });
    }
    Ok(out)
}

/// Stationarity defect of the would-be dark point when δ > 0: the reduced
/// gradient at (Ψ₂, Ψ₃ = 0) is (2δΨ₂, 0), so the manifold breaks linearly
/// in δ. Returns δ·Ψ₂.
pub fn dark_residual(psi2: f64, params: &ModelParams) -> Result<f64, DarkStateError> {
    check_psi2(psi2)?;
    Ok(params.delta * psi2)
}
