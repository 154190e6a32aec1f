//! Thermodynamic-limit mean-field theory: the classical energy density h⁽⁰⁾,
//! its stationary points, Hessian stability, and phase classification.
//!
//! The energy surface lives on the closed unit disk B₂ in the atomic order
//! parameters and comes in two charts ("reference frames"):
//!
//! * frame m = 1 — coordinates (Ψ₂, Ψ₃), carries states with finite level-1
//!   occupation ψ₁² = 1 − Ψ₂² − Ψ₃²;
//! * frame m = 2 — coordinates (Ψ₁, Ψ₃), carries states with no level-1
//!   occupation; the red superradiant point sits on the m = 1 boundary but is
//!   interior here, so its stability is decided in this frame.
//!
//! After eliminating the photon amplitudes at their stationary values
//! φ₁ = −2(g₁/ω₁)ψ₁Ψ₃, φ₂ = −2(g₂/ω₂)Ψ₂Ψ₃ the surface reduces to a quartic
//! polynomial of the two atomic amplitudes; both charts share one functional
//! form with remapped coefficients, which is what [`ReducedSurface`] encodes.

use crate::model::ModelParams;
use thiserror::Error;

/// Tolerance for accepting a point as inside the closed unit disk.
const DISK_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanFieldError {
    #[error("order parameters leave the unit disk: |psi|^2 = {radius_sq}")]
    DomainViolation { radius_sq: f64 },
    #[error("gradient/Hessian require an interior point, got |psi|^2 = {radius_sq}")]
    BoundaryPoint { radius_sq: f64 },
    #[error("reference frame is singular at psi_m = {psi_m}")]
    FrameSingularity { psi_m: f64 },
    #[error("numeric minimizer needs grid_n >= 32, got {grid_n}")]
    GridTooCoarse { grid_n: usize },
}

/// Holstein–Primakoff reference frame of a mean-field point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Reference state |1⟩; chart coordinates (Ψ₂, Ψ₃).
    M1,
    /// Reference state |2⟩; chart coordinates (Ψ₁, Ψ₃).
    M2,
}

/// Ground-state phase assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseLabel {
    Normal,
    BlueSuperradiant,
    RedSuperradiant,
    Dark,
    UnphysicalCoexisting,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::Normal => "normal",
            PhaseLabel::BlueSuperradiant => "blue",
            PhaseLabel::RedSuperradiant => "red",
            PhaseLabel::Dark => "dark",
            PhaseLabel::UnphysicalCoexisting => "coexisting",
        }
    }
}

/// Hessian verdict at a stationary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Minimum,
    Saddle,
    Unstable,
    /// Minimum that sits on the boundary of the m = 1 chart (red phase);
    /// decided in the m = 2 frame where the point is interior.
    BoundaryMinimum,
    /// At least one exactly flat direction (second-order onset, δ = 0 line).
    MarginalFlat,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Minimum => "minimum",
            Stability::Saddle => "saddle",
            Stability::Unstable => "unstable",
            Stability::BoundaryMinimum => "boundary-minimum",
            Stability::MarginalFlat => "marginal-flat",
        }
    }
}

/// Mean-field order parameters in a definite reference frame.
///
/// `psi_lo` is the amplitude of the low-lying level that is carried as an
/// explicit mode in the chosen frame: Ψ₂ for [`Frame::M1`], Ψ₁ for
/// [`Frame::M2`]. `psi3` is the excited-level amplitude Ψ₃ in either frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldPoint {
    pub frame: Frame,
    pub psi_lo: f64,
    pub psi3: f64,
    pub phi1: f64,
    pub phi2: f64,
    psi_m: f64,
}

impl MeanFieldPoint {
    pub fn new(
        frame: Frame,
        psi_lo: f64,
        psi3: f64,
        phi1: f64,
        phi2: f64,
    ) -> Result<Self, MeanFieldError> {
        let radius_sq = psi_lo * psi_lo + psi3 * psi3;
        if radius_sq > 1.0 + DISK_TOL {
            return Err(MeanFieldError::DomainViolation { radius_sq });
        }
        let psi_m = (1.0 - radius_sq).max(0.0).sqrt();
        Ok(Self {
            frame,
            psi_lo,
            psi3,
            phi1,
            phi2,
            psi_m,
        })
    }

    /// Point with the photon amplitudes at their stationary values for the
    /// given atomic amplitudes.
    pub fn stationary(
        frame: Frame,
        psi_lo: f64,
        psi3: f64,
        params: &ModelParams,
    ) -> Result<Self, MeanFieldError> {
        let mut p = Self::new(frame, psi_lo, psi3, 0.0, 0.0)?;
        match frame {
            Frame::M1 => {
                p.phi1 = -2.0 * params.g1 / params.omega1 * p.psi_m * psi3;
                p.phi2 = -2.0 * params.g2 / params.omega2 * psi_lo * psi3;
            }
            Frame::M2 => {
                p.phi1 = -2.0 * params.g1 / params.omega1 * psi_lo * psi3;
                p.phi2 = -2.0 * params.g2 / params.omega2 * p.psi_m * psi3;
            }
        }
        Ok(p)
    }

    pub fn zero(frame: Frame) -> Self {
        Self {
            frame,
            psi_lo: 0.0,
            psi3: 0.0,
            phi1: 0.0,
            phi2: 0.0,
            psi_m: 1.0,
        }
    }

    /// Amplitude ψ_m of the macroscopically occupied reference level.
    pub fn psi_m(&self) -> f64 {
        self.psi_m
    }

    /// Frame-independent level occupation densities (n₁, n₂, n₃).
    pub fn occupations(&self) -> (f64, f64, f64) {
        let lo = self.psi_lo * self.psi_lo;
        let hi = self.psi3 * self.psi3;
        let m = self.psi_m * self.psi_m;
        match self.frame {
            Frame::M1 => (m, lo, hi),
            Frame::M2 => (lo, m, hi),
        }
    }
}

/// One stationary solution of the mean-field equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateSolution {
    pub label: PhaseLabel,
    pub point: MeanFieldPoint,
    pub energy_per_particle: f64,
    pub stability: Stability,
    /// Whether the closed form is real-valued at these couplings.
    pub valid: bool,
    /// False only for a numeric minimum that fell back to its grid point.
    pub converged: bool,
}

/// Outcome of comparing all candidate energies.
#[derive(Debug, Clone)]
pub struct Classification {
    pub label: PhaseLabel,
    pub winner: CandidateSolution,
    pub candidates: Vec<CandidateSolution>,
    /// Labels whose energies tie with the winner within the tolerance
    /// (more than one entry exactly on phase boundaries).
    pub degenerate: Vec<PhaseLabel>,
}

// ---------------------------------------------------------------------------
// Reduced surface (photons eliminated)
// ---------------------------------------------------------------------------

/// One chart of the reduced energy surface
/// `h(a, b) = e0 + ga·a² + gb·b² − ra·(1 − a² − b²)·b² − rb·a²·b²`
/// where `a` is the chart's low-level amplitude and `b = Ψ₃`.
#[derive(Debug, Clone, Copy)]
pub struct ReducedSurface {
    e0: f64,
    ga: f64,
    gb: f64,
    ra: f64,
    rb: f64,
}

impl ReducedSurface {
    pub fn new(frame: Frame, params: &ModelParams) -> Self {
        let r1 = 4.0 * params.g1 * params.g1 / params.omega1;
        let r2 = 4.0 * params.g2 * params.g2 / params.omega2;
        match frame {
            Frame::M1 => Self {
                e0: params.e1,
                ga: params.delta,
                gb: params.cap_delta,
                ra: r1,
                rb: r2,
            },
            // Substituting psi_1 -> Psi_1, Psi_2 -> psi_2 swaps the roles of
            // the two branches and shifts the origin to E_1 + delta.
            Frame::M2 => Self {
                e0: params.e1 + params.delta,
                ga: -params.delta,
                gb: params.cap_delta - params.delta,
                ra: r2,
                rb: r1,
            },
        }
    }

    pub fn value(&self, a: f64, b: f64) -> f64 {
        let a2 = a * a;
        let b2 = b * b;
        self.e0 + self.ga * a2 + self.gb * b2
            - self.ra * (1.0 - a2 - b2) * b2
            - self.rb * a2 * b2
    }

    pub fn gradient(&self, a: f64, b: f64) -> (f64, f64) {
        let a2 = a * a;
        let b2 = b * b;
        let da = 2.0 * a * (self.ga + (self.ra - self.rb) * b2);
        let db = 2.0 * b * (self.gb - self.ra * (1.0 - a2 - 2.0 * b2) - self.rb * a2);
        (da, db)
    }

    pub fn hessian(&self, a: f64, b: f64) -> [[f64; 2]; 2] {
        let a2 = a * a;
        let b2 = b * b;
        let haa = 2.0 * (self.ga + (self.ra - self.rb) * b2);
        let hab = 4.0 * a * b * (self.ra - self.rb);
        let hbb =
            2.0 * (self.gb - self.ra * (1.0 - a2 - 2.0 * b2) - self.rb * a2) + 8.0 * self.ra * b2;
        [[haa, hab], [hab, hbb]]
    }

    fn energy_scale(&self) -> f64 {
        1.0 + self.ga.abs() + self.gb.abs() + self.ra + self.rb
    }
}

fn check_disk(a: f64, b: f64) -> Result<f64, MeanFieldError> {
    let radius_sq = a * a + b * b;
    if radius_sq > 1.0 + DISK_TOL {
        Err(MeanFieldError::DomainViolation { radius_sq })
    } else {
        Ok(radius_sq)
    }
}

fn check_interior(a: f64, b: f64) -> Result<(), MeanFieldError> {
    let radius_sq = check_disk(a, b)?;
    if radius_sq >= 1.0 - DISK_TOL {
        Err(MeanFieldError::BoundaryPoint { radius_sq })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Energy surface operations (m = 1 chart unless noted)
// ---------------------------------------------------------------------------

/// Full classical energy density with explicit photon amplitudes.
///
/// Frame m = 1: E₁ + δΨ₂² + ΔΨ₃² + ω₁φ₁² + ω₂φ₂² + 4g₁φ₁ψ₁Ψ₃ + 4g₂φ₂Ψ₂Ψ₃;
/// frame m = 2 by the substitution rule.
pub fn h0_full(point: &MeanFieldPoint, params: &ModelParams) -> Result<f64, MeanFieldError> {
    check_disk(point.psi_lo, point.psi3)?;
    let a = point.psi_lo;
    let b = point.psi3;
    let photons = params.omega1 * point.phi1 * point.phi1 + params.omega2 * point.phi2 * point.phi2;
    Ok(match point.frame {
        Frame::M1 => {
            params.e1
                + params.delta * a * a
                + params.cap_delta * b * b
                + photons
                + 4.0 * params.g1 * point.phi1 * point.psi_m * b
                + 4.0 * params.g2 * point.phi2 * a * b
        }
        Frame::M2 => {
            params.e1 + params.delta
                - params.delta * a * a
                + (params.cap_delta - params.delta) * b * b
                + photons
                + 4.0 * params.g2 * point.phi2 * point.psi_m * b
                + 4.0 * params.g1 * point.phi1 * a * b
        }
    })
}

/// Reduced surface of the m = 1 chart at (Ψ₂, Ψ₃).
pub fn h0_reduced(psi2: f64, psi3: f64, params: &ModelParams) -> Result<f64, MeanFieldError> {
    check_disk(psi2, psi3)?;
    Ok(ReducedSurface::new(Frame::M1, params).value(psi2, psi3))
}

/// Reduced surface of the m = 2 chart at (Ψ₁, Ψ₃).
pub fn h0_reduced_m2(psi1: f64, psi3: f64, params: &ModelParams) -> Result<f64, MeanFieldError> {
    check_disk(psi1, psi3)?;
    Ok(ReducedSurface::new(Frame::M2, params).value(psi1, psi3))
}

/// Gradient of the m = 1 reduced surface; interior points only (the chart is
/// singular on its boundary ψ₁ = 0 — use the m = 2 chart there).
pub fn gradient_h0(
    psi2: f64,
    psi3: f64,
    params: &ModelParams,
) -> Result<(f64, f64), MeanFieldError> {
    check_interior(psi2, psi3)?;
    Ok(ReducedSurface::new(Frame::M1, params).gradient(psi2, psi3))
}

/// Gradient of the m = 2 reduced surface; interior points only.
pub fn gradient_h0_m2(
    psi1: f64,
    psi3: f64,
    params: &ModelParams,
) -> Result<(f64, f64), MeanFieldError> {
    check_interior(psi1, psi3)?;
    Ok(ReducedSurface::new(Frame::M2, params).gradient(psi1, psi3))
}

/// Analytic Hessian of the m = 1 reduced surface; interior points only.
pub fn hessian_h0(
    psi2: f64,
    psi3: f64,
    params: &ModelParams,
) -> Result<[[f64; 2]; 2], MeanFieldError> {
    check_interior(psi2, psi3)?;
    Ok(ReducedSurface::new(Frame::M1, params).hessian(psi2, psi3))
}

/// Analytic Hessian of the m = 2 reduced surface; interior points only.
pub fn hessian_h0_m2(
    psi1: f64,
    psi3: f64,
    params: &ModelParams,
) -> Result<[[f64; 2]; 2], MeanFieldError> {
    check_interior(psi1, psi3)?;
    Ok(ReducedSurface::new(Frame::M2, params).hessian(psi1, psi3))
}

/// Coefficients of the linear fluctuation Hamiltonian h⁽¹⁾ at a point, in
/// mode order (d_lo, d₃, c₁, c₂). All four vanish at a stationary point.
pub fn h1_coefficients(
    point: &MeanFieldPoint,
    params: &ModelParams,
) -> Result<[f64; 4], MeanFieldError> {
    let psi_m = point.psi_m;
    if psi_m <= 1e-12 {
        return Err(MeanFieldError::FrameSingularity { psi_m });
    }
    let a = point.psi_lo;
    let b = point.psi3;
    let (phi1, phi2) = (point.phi1, point.phi2);
    Ok(match point.frame {
        Frame::M1 => [
            params.delta * a - 2.0 * params.g1 * phi1 * a * b / psi_m + 2.0 * params.g2 * phi2 * b,
            params.cap_delta * b
                + 2.0 * params.g1 * phi1 * psi_m * (1.0 - b * b / (psi_m * psi_m))
                + 2.0 * params.g2 * phi2 * a,
            params.omega1 * phi1 + 2.0 * params.g1 * psi_m * b,
            params.omega2 * phi2 + 2.0 * params.g2 * a * b,
        ],
        Frame::M2 => [
            -params.delta * a - 2.0 * params.g2 * phi2 * a * b / psi_m
                + 2.0 * params.g1 * phi1 * b,
            (params.cap_delta - params.delta) * b
                + 2.0 * params.g2 * phi2 * psi_m * (1.0 - b * b / (psi_m * psi_m))
                + 2.0 * params.g1 * phi1 * a,
            params.omega1 * phi1 + 2.0 * params.g1 * a * b,
            params.omega2 * phi2 + 2.0 * params.g2 * psi_m * b,
        ],
    })
}

// ---------------------------------------------------------------------------
// Analytic candidates
// ---------------------------------------------------------------------------

fn verdict(hessian: [[f64; 2]; 2], scale: f64) -> Stability {
    let tol = 1e-9 * scale;
    // Closed-form eigenvalues of the symmetric 2x2.
    let tr = hessian[0][0] + hessian[1][1];
    let det = hessian[0][0] * hessian[1][1] - hessian[0][1] * hessian[1][0];
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let lo = 0.5 * tr - disc;
    let hi = 0.5 * tr + disc;
    if lo > tol {
        Stability::Minimum
    } else if lo >= -tol {
        Stability::MarginalFlat
    } else if hi > tol {
        Stability::Saddle
    } else {
        Stability::Unstable
    }
}

/// Trivial solution Ψ₂ = Ψ₃ = 0: all particles in level 1, no photons.
pub fn candidate_normal(params: &ModelParams) -> CandidateSolution {
    let surf = ReducedSurface::new(Frame::M1, params);
    CandidateSolution {
        label: PhaseLabel::Normal,
        point: MeanFieldPoint::zero(Frame::M1),
        energy_per_particle: params.e1,
        stability: verdict(surf.hessian(0.0, 0.0), surf.energy_scale()),
        valid: true,
        converged: true,
    }
}

/// Blue superradiant solution: Ψ₂ = 0, Ψ₃ and φ₁ finite. Real for g₁ ≥ g₁,c.
pub fn candidate_blue(params: &ModelParams) -> CandidateSolution {
    let g1c = params.critical_couplings().g1c;
    let surf = ReducedSurface::new(Frame::M1, params);
    if params.g1 < g1c || params.g1 == 0.0 {
        // Below threshold the amplitudes turn imaginary; onset point g1 == g1c
        // (including the degenerate 0 == 0 case) is handled below.
        if !(params.g1 == g1c && g1c == 0.0) {
            return CandidateSolution {
                label: PhaseLabel::BlueSuperradiant,
                point: MeanFieldPoint::zero(Frame::M1),
                energy_per_particle: f64::NAN,
                stability: Stability::Saddle,
                valid: false,
                converged: true,
            };
        }
    }
    // gamma = (g1c/g1)^2 <= 1
    let gamma = if params.g1 > 0.0 {
        (g1c / params.g1).powi(2)
    } else {
        1.0
    };
    let psi3 = (0.5 * (1.0 - gamma)).max(0.0).sqrt();
    let phi1 = -params.g1 / params.omega1 * (1.0 - gamma * gamma).max(0.0).sqrt();
    let point = MeanFieldPoint::new(Frame::M1, 0.0, psi3, phi1, 0.0).expect("blue point in disk");
    // Same closed form as E1 - (Delta/4)(g1/g1c)^2 [1 - (g1c/g1)^2]^2, written
    // to stay finite when Delta = 0.
    let energy = params.e1 - params.g1 * params.g1 / params.omega1 * (1.0 - gamma).powi(2);
    CandidateSolution {
        label: PhaseLabel::BlueSuperradiant,
        point,
        energy_per_particle: energy,
        stability: verdict(surf.hessian(0.0, psi3), surf.energy_scale()),
        valid: true,
        converged: true,
    }
}

/// Red superradiant solution: Ψ₂² + Ψ₃² = 1 (no level-1 occupation), φ₂
/// finite. Real for g₂ ≥ g₂,c₁; interior point of the m = 2 chart.
pub fn candidate_red(params: &ModelParams) -> CandidateSolution {
    let crit = params.critical_couplings();
    let surf = ReducedSurface::new(Frame::M2, params);
    if params.g2 < crit.g2c1 || params.g2 == 0.0 {
        return CandidateSolution {
            label: PhaseLabel::RedSuperradiant,
            point: MeanFieldPoint::zero(Frame::M2),
            energy_per_particle: f64::NAN,
            stability: Stability::Saddle,
            valid: false,
            converged: true,
        };
    }
    let k = (crit.g2c1 / params.g2).powi(2);
    let psi3 = (0.5 * (1.0 - k)).max(0.0).sqrt();
    let phi2 = -params.g2 / params.omega2 * (1.0 - k * k).max(0.0).sqrt();
    let point = MeanFieldPoint::new(Frame::M2, 0.0, psi3, 0.0, phi2).expect("red point in disk");
    let energy = if crit.g2c2 > 0.0 {
        let sd = params.cap_delta.sqrt();
        let ss = params.delta.sqrt();
        let bracket =
            (sd + ss) * params.g2 / crit.g2c2 - (sd - ss) * crit.g2c2 / params.g2;
        params.e1 + params.delta - 0.25 * bracket * bracket
    } else {
        // Delta = delta = 0 limit of the bracket form.
        params.e1 - params.g2 * params.g2 / params.omega2
    };
    let stability = match verdict(surf.hessian(0.0, psi3), surf.energy_scale()) {
        Stability::Minimum => Stability::BoundaryMinimum,
        other => other,
    };
    CandidateSolution {
        label: PhaseLabel::RedSuperradiant,
        point,
        energy_per_particle: energy,
        stability,
        valid: true,
        converged: true,
    }
}

/// Interior solution with both branches superradiant (Ψ₂, Ψ₃ ≠ 0). Exists
/// only for certain couplings and never minimizes the energy; the Hessian
/// verdict is evaluated and reported.
pub fn candidate_coexisting(params: &ModelParams) -> CandidateSolution {
    let invalid = CandidateSolution {
        label: PhaseLabel::UnphysicalCoexisting,
        point: MeanFieldPoint::zero(Frame::M1),
        energy_per_particle: f64::NAN,
        stability: Stability::Saddle,
        valid: false,
        converged: true,
    };
    let r1 = 4.0 * params.g1 * params.g1 / params.omega1;
    let r2 = 4.0 * params.g2 * params.g2 / params.omega2;
    let q = r2 - r1;
    if params.delta <= 0.0 || q.abs() < 1e-14 {
        return invalid;
    }
    let b2 = params.delta / q;
    let in_range = b2 > 0.0 && b2 < 1.0;
    if !in_range {
        return invalid;
    }
    let a2 = (params.cap_delta - r1 * (1.0 - 2.0 * b2)) / q;
    // NaN-safe: a NaN quotient must land in the invalid branch.
    let positive = a2 > 0.0;
    if !positive || a2 + b2 >= 1.0 {
        return invalid;
    }
    let surf = ReducedSurface::new(Frame::M1, params);
    let (a, b) = (a2.sqrt(), b2.sqrt());
    let point = MeanFieldPoint::stationary(Frame::M1, a, b, params).expect("coexisting in disk");
    CandidateSolution {
        label: PhaseLabel::UnphysicalCoexisting,
        point,
        energy_per_particle: surf.value(a, b),
        stability: verdict(surf.hessian(a, b), surf.energy_scale()),
        valid: true,
        converged: true,
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Evaluates all candidates and returns the global energy minimum. Candidate
/// energies tying within `tol` are reported in `degenerate` (phase
/// boundaries, triple point). For δ = 0 a ground state at energy E₁ is the
/// flat dark manifold and is labelled [`PhaseLabel::Dark`].
pub fn classify(params: &ModelParams, tol: f64) -> Classification {
    let candidates = vec![
        candidate_normal(params),
        candidate_blue(params),
        candidate_red(params),
        candidate_coexisting(params),
    ];
    let mut winner = candidates[0];
    for c in &candidates {
        if c.valid && c.energy_per_particle < winner.energy_per_particle {
            winner = *c;
        }
    }
    let mut degenerate: Vec<PhaseLabel> = candidates
        .iter()
        .filter(|c| c.valid && c.energy_per_particle <= winner.energy_per_particle + tol)
        .map(|c| c.label)
        .collect();

    let mut label = winner.label;
    if params.delta == 0.0 && winner.energy_per_particle >= params.e1 - tol {
        // The whole Psi_3 = 0 line is degenerate at E1; the normal state is
        // its Psi_2 = 0 member.
        label = PhaseLabel::Dark;
        winner = CandidateSolution {
            label: PhaseLabel::Dark,
            stability: Stability::MarginalFlat,
            ..winner
        };
        if !degenerate.contains(&PhaseLabel::Dark) {
            degenerate.push(PhaseLabel::Dark);
        }
    }

    Classification {
        label,
        winner,
        candidates,
        degenerate,
    }
}

// ---------------------------------------------------------------------------
// Numeric minimizer (independent oracle)
// ---------------------------------------------------------------------------

/// Grid scan of both charts followed by damped-Newton polish; the unit-disk
/// constraint is enforced by scanning both reference frames rather than by
/// penalty terms. Each frame's best grid point is polished in its own chart
/// (a boundary minimum of one chart is interior in the other) and the lower
/// polished energy wins. Deterministic for fixed arguments. When Newton fails
/// in the winning frame the best grid point is returned with
/// `converged = false`.
pub fn minimize_numeric(
    params: &ModelParams,
    grid_n: usize,
    polish_iters: usize,
) -> Result<CandidateSolution, MeanFieldError> {
    if grid_n < 32 {
        return Err(MeanFieldError::GridTooCoarse { grid_n });
    }

    let mut results: Vec<(f64, f64, f64, Frame, bool)> = Vec::with_capacity(2);
    for frame in [Frame::M1, Frame::M2] {
        let surf = ReducedSurface::new(frame, params);
        // The reduced surfaces are even in both coordinates, so the scan
        // covers the quadrant [0,1]^2; the canonical non-negative branch is
        // returned.
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=grid_n {
            let a = i as f64 / grid_n as f64;
            for j in 0..=grid_n {
                let b = j as f64 / grid_n as f64;
                if a * a + b * b > 1.0 {
                    continue;
                }
                let e = surf.value(a, b);
                if e < best.0 {
                    best = (e, a, b);
                }
            }
        }
        let (a, b, converged) = polish(&surf, best.1, best.2, polish_iters);
        if converged {
            results.push((surf.value(a, b), a, b, frame, true));
        } else {
            results.push((best.0, best.1, best.2, frame, false));
        }
    }

    // Lower energy wins; on a tie prefer the converged result, then m = 1.
    let scale = ReducedSurface::new(Frame::M1, params).energy_scale();
    let mut pick = results[0];
    let alt = results[1];
    if alt.0 < pick.0 - 1e-15 * scale || ((alt.0 - pick.0).abs() <= 1e-15 * scale && alt.4 && !pick.4)
    {
        pick = alt;
    }
    let (_, a, b, frame, converged) = pick;
    let surf = ReducedSurface::new(frame, params);

    let point = MeanFieldPoint::stationary(frame, a.max(0.0), b.max(0.0), params)?;
    let energy = surf.value(a, b);
    let label = structural_label(&point, params);
    let stability = {
        let v = verdict(surf.hessian(a, b), scale);
        if label == PhaseLabel::RedSuperradiant && v == Stability::Minimum {
            Stability::BoundaryMinimum
        } else {
            v
        }
    };
    Ok(CandidateSolution {
        label,
        point,
        energy_per_particle: energy,
        stability,
        valid: true,
        converged,
    })
}

/// Damped Newton descent on one chart, constrained to the closed disk.
/// Returns the refined point and whether the gradient norm converged.
fn polish(surf: &ReducedSurface, mut a: f64, mut b: f64, iters: usize) -> (f64, f64, bool) {
    let scale = surf.energy_scale();
    let grad_tol = 1e-11 * scale;
    for _ in 0..iters {
        let (ga, gb) = surf.gradient(a, b);
        if ga.hypot(gb) <= grad_tol {
            return (a, b, true);
        }
        let h = surf.hessian(a, b);
        // Shift the Hessian until its smallest eigenvalue clears a floor, so
        // the step is always a descent direction.
        let tr = h[0][0] + h[1][1];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let lo_eig = 0.5 * tr - disc;
        let shift = (1e-8 * scale - lo_eig).max(0.0);
        let (h00, h11) = (h[0][0] + shift, h[1][1] + shift);
        let det_s = h00 * h11 - h[0][1] * h[0][1];
        let (mut sa, mut sb) = if det_s.abs() > 1e-300 {
            (
                -(h11 * ga - h[0][1] * gb) / det_s,
                -(h00 * gb - h[0][1] * ga) / det_s,
            )
        } else {
            (-ga / scale, -gb / scale)
        };
        // Backtrack to stay on the closed disk and not increase the energy.
        // The slack is a few ulp of the energy scale so that the last Newton
        // steps (value changes below f64 resolution) are not rejected.
        let e0 = surf.value(a, b);
        let mut lambda = 1.0;
        for _ in 0..60 {
            let (na, nb) = (a + lambda * sa, b + lambda * sb);
            if na * na + nb * nb <= 1.0 && surf.value(na, nb) <= e0 + 1e-15 * scale {
                break;
            }
            lambda *= 0.5;
        }
        sa *= lambda;
        sb *= lambda;
        a += sa;
        b += sb;
        if sa.hypot(sb) < 1e-16 {
            break;
        }
    }
    let (ga, gb) = surf.gradient(a, b);
    (a, b, ga.hypot(gb) <= grad_tol)
}

/// Assigns a phase label from the structure of a point alone (which photon
/// amplitudes are macroscopic), independent of the analytic candidates.
fn structural_label(point: &MeanFieldPoint, params: &ModelParams) -> PhaseLabel {
    const AMP_TOL: f64 = 1e-6;
    let radiating1 = point.phi1.abs() > AMP_TOL;
    let radiating2 = point.phi2.abs() > AMP_TOL;
    match (radiating1, radiating2) {
        (false, false) => {
            if params.delta == 0.0 {
                PhaseLabel::Dark
            } else {
                PhaseLabel::Normal
            }
        }
        (true, false) => PhaseLabel::BlueSuperradiant,
        (false, true) => PhaseLabel::RedSuperradiant,
        (true, true) => PhaseLabel::UnphysicalCoexisting,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3(g1: f64, g2: f64) -> ModelParams {
        ModelParams::new(0.0, 0.75, 1.0, 1.0, 0.25, g1, g2).unwrap()
    }

    /// Deterministic sampler for property-style checks.
    struct Rng(u64);
    impl Rng {
        fn next(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn h0_full_normal_point_is_e1() {
        let p = fig3(0.6, 0.5);
        let point = MeanFieldPoint::zero(Frame::M1);
        assert_eq!(h0_full(&point, &p).unwrap(), 0.0);
    }

    #[test]
    fn h0_full_blue_point_matches_closed_form() {
        let p = fig3(1.0, 0.2);
        let point = MeanFieldPoint::new(
            Frame::M1,
            0.0,
            0.375f64.sqrt(),
            -0.9375f64.sqrt(),
            0.0,
        )
        .unwrap();
        let e = h0_full(&point, &p).unwrap();
        assert!((e - (-0.5625)).abs() < 1e-14, "blue energy {e}");
    }

    #[test]
    fn h0_full_generic_point_term_by_term() {
        // Frozen from exact decimal arithmetic: the only irrational term is
        // 4*0.6*0.1*sqrt(0.75)*0.4 = 0.096*sqrt(0.75); everything else is an
        // exact decimal. Sum = 0.1995 + 0.096*sqrt(0.75).
        let p = fig3(0.6, 0.5);
        let point = MeanFieldPoint::new(Frame::M1, 0.3, 0.4, 0.1, -0.2).unwrap();
        let expected = 0.1995 + 0.096 * 0.75f64.sqrt();
        let e = h0_full(&point, &p).unwrap();
        assert!((e - expected).abs() < 1e-15, "got {e}, want {expected}");
    }

    #[test]
    fn h0_full_rejects_points_outside_disk() {
        let p = fig3(0.3, 0.2);
        let err = MeanFieldPoint::new(Frame::M1, 0.9, 0.9, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, MeanFieldError::DomainViolation { .. }));
        assert!(h0_reduced(0.9, 0.9, &p).is_err());
    }

    #[test]
    fn h0_reduced_equals_h0_full_at_stationary_photons() {
        let p = fig3(0.7, 0.45);
        let mut rng = Rng(7);
        for _ in 0..100 {
            let r = rng.next().sqrt() * 0.999;
            let t = rng.next() * std::f64::consts::FRAC_PI_2;
            let (a, b) = (r * t.cos(), r * t.sin());
            let point = MeanFieldPoint::stationary(Frame::M1, a, b, &p).unwrap();
            let full = h0_full(&point, &p).unwrap();
            let red = h0_reduced(a, b, &p).unwrap();
            assert!((full - red).abs() < 1e-13, "mismatch at ({a},{b})");
        }
    }

    #[test]
    fn h0_reduced_matches_blue_closed_form() {
        let p = fig3(1.0, 0.2);
        let e = h0_reduced(0.0, 0.375f64.sqrt(), &p).unwrap();
        assert!((e + 0.5625).abs() < 1e-14);
    }

    #[test]
    fn red_minimum_sits_on_the_boundary() {
        // Brute-force scan: with delta = 0 and g2 dominant the minimum of the
        // m = 1 chart lies on Psi_2^2 + Psi_3^2 = 1.
        let p = ModelParams::new(0.0, 0.0, 1.0, 1.0, 0.25, 0.4, 0.6).unwrap();
        let n = 20;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=n {
            for j in 0..=n {
                let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
                if a * a + b * b > 1.0 {
                    continue;
                }
                let e = h0_reduced(a, b, &p).unwrap();
                if e < best.0 {
                    best = (e, a, b);
                }
            }
        }
        let r2 = best.1 * best.1 + best.2 * best.2;
        assert!(r2 > 0.9, "grid minimum at radius^2 = {r2}");
    }

    #[test]
    fn gradient_vanishes_at_normal_and_blue_points() {
        let p = fig3(1.0, 0.2);
        assert_eq!(gradient_h0(0.0, 0.0, &p).unwrap(), (0.0, 0.0));
        let (ga, gb) = gradient_h0(0.0, 0.375f64.sqrt(), &p).unwrap();
        assert!(ga.abs() < 1e-14 && gb.abs() < 1e-14, "({ga},{gb})");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = fig3(0.8, 0.55);
        let mut rng = Rng(11);
        let h = 1e-6;
        for _ in 0..100 {
            let r = rng.next().sqrt() * 0.95;
            let t = rng.next() * std::f64::consts::FRAC_PI_2;
            let (a, b) = (r * t.cos(), r * t.sin());
            let (ga, gb) = gradient_h0(a, b, &p).unwrap();
            let fa = (h0_reduced(a + h, b, &p).unwrap() - h0_reduced(a - h, b, &p).unwrap())
                / (2.0 * h);
            let fb = (h0_reduced(a, b + h, &p).unwrap() - h0_reduced(a, b - h, &p).unwrap())
                / (2.0 * h);
            let scale = 1.0 + ga.abs().max(gb.abs());
            assert!((ga - fa).abs() < 1e-6 * scale, "d/da: {ga} vs {fa}");
            assert!((gb - fb).abs() < 1e-6 * scale, "d/db: {gb} vs {fb}");
        }
    }

    #[test]
    fn gradient_rejects_boundary() {
        let p = fig3(0.3, 0.2);
        assert!(matches!(
            gradient_h0(1.0, 0.0, &p),
            Err(MeanFieldError::BoundaryPoint { .. })
        ));
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let p = fig3(0.8, 0.55);
        let mut rng = Rng(13);
        let h = 1e-5;
        for _ in 0..100 {
            let r = rng.next().sqrt() * 0.9;
            let t = rng.next() * std::f64::consts::FRAC_PI_2;
            let (a, b) = (r * t.cos(), r * t.sin());
            let hess = hessian_h0(a, b, &p).unwrap();
            let f = |x: f64, y: f64| h0_reduced(x, y, &p).unwrap();
            let faa = (f(a + h, b) - 2.0 * f(a, b) + f(a - h, b)) / (h * h);
            let fbb = (f(a, b + h) - 2.0 * f(a, b) + f(a, b - h)) / (h * h);
            let fab = (f(a + h, b + h) - f(a + h, b - h) - f(a - h, b + h) + f(a - h, b - h))
                / (4.0 * h * h);
            let scale = 1.0 + hess[0][0].abs() + hess[1][1].abs();
            assert!((hess[0][0] - faa).abs() < 1e-5 * scale);
            assert!((hess[1][1] - fbb).abs() < 1e-5 * scale);
            assert!((hess[0][1] - fab).abs() < 1e-5 * scale);
        }
    }

    #[test]
    fn normal_hessian_definiteness_tracks_g1c() {
        let below = hessian_h0(0.0, 0.0, &fig3(0.3, 0.2)).unwrap();
        assert!(below[0][0] > 0.0 && below[1][1] > 0.0);
        let above = hessian_h0(0.0, 0.0, &fig3(0.7, 0.2)).unwrap();
        assert!(above[1][1] < 0.0, "Psi_3 direction must destabilize");
    }

    #[test]
    fn candidate_normal_stability() {
        assert_eq!(candidate_normal(&fig3(0.3, 0.2)).stability, Stability::Minimum);
        assert_eq!(candidate_normal(&fig3(0.3, 0.2)).energy_per_particle, 0.0);
        assert_ne!(candidate_normal(&fig3(0.7, 0.2)).stability, Stability::Minimum);
        // Metastable inside the red phase as long as g1 < g1c.
        assert_eq!(candidate_normal(&fig3(0.3, 0.6)).stability, Stability::Minimum);
    }

    #[test]
    fn candidate_blue_fig3_values() {
        let c = candidate_blue(&fig3(1.0, 0.2));
        assert!(c.valid);
        assert!((c.point.psi3 - 0.6123724356957945).abs() < 1e-12);
        assert!((c.point.phi1 - (-0.9682458365518543)).abs() < 1e-12);
        assert!((c.energy_per_particle + 0.5625).abs() < 1e-13);
        assert_eq!(c.stability, Stability::Minimum);
        // Cross-check against the reduced surface at the point.
        let e = h0_reduced(0.0, c.point.psi3, &fig3(1.0, 0.2)).unwrap();
        assert!((e - c.energy_per_particle).abs() < 1e-13);
    }

    #[test]
    fn candidate_blue_onset_and_invalid() {
        let onset = candidate_blue(&fig3(0.5, 0.2));
        assert!(onset.valid);
        assert_eq!(onset.point.psi3, 0.0);
        assert_eq!(onset.point.phi1, 0.0);
        assert_eq!(onset.energy_per_particle, 0.0);
        assert!(!candidate_blue(&fig3(0.4, 0.2)).valid);
    }

    #[test]
    fn candidate_red_fig3_values() {
        // g2 = 2*g2c2.
        let g2 = 0.9330127018922193;
        let c = candidate_red(&fig3(0.2, g2));
        assert!(c.valid);
        assert!(
            (c.energy_per_particle - (-2.6081726320958224)).abs() < 1e-12,
            "red energy {}",
            c.energy_per_particle
        );
        assert_eq!(c.stability, Stability::BoundaryMinimum);
        // Occupations at g2 = 0.6.
        let c = candidate_red(&fig3(0.2, 0.6));
        let (n1, n2, n3) = c.point.occupations();
        assert!(n1.abs() < 1e-15);
        assert!((n2 - 0.521701388888889).abs() < 1e-12);
        assert!((n3 - 0.47829861111111106).abs() < 1e-12);
    }

    #[test]
    fn candidate_red_crossing_and_invalid() {
        // At g2 = g2c2 the bracket telescopes and the red energy equals E1.
        let g2c2 = fig3(0.0, 0.0).critical_couplings().g2c2;
        let c = candidate_red(&fig3(0.2, g2c2));
        assert!(c.valid);
        assert!(c.energy_per_particle.abs() < 1e-13);
        assert!(!candidate_red(&fig3(0.2, 0.1)).valid); // below g2c1
    }

    #[test]
    fn red_point_is_stationary_in_m2_frame() {
        let c = candidate_red(&fig3(0.2, 0.6));
        let (ga, gb) = gradient_h0_m2(c.point.psi_lo, c.point.psi3, &fig3(0.2, 0.6)).unwrap();
        assert!(ga.abs() < 1e-9 && gb.abs() < 1e-9, "grad ({ga},{gb})");
        // Frame-consistency: the m = 2 reduced value reproduces the red energy.
        let e = h0_reduced_m2(0.0, c.point.psi3, &fig3(0.2, 0.6)).unwrap();
        assert!((e - c.energy_per_particle).abs() < 1e-12);
    }

    #[test]
    fn m2_vacuum_energy() {
        let p = fig3(0.3, 0.2);
        assert!((h0_reduced_m2(0.0, 0.0, &p).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn coexisting_solution_cases() {
        // At (0.6, 0.8) the Psi_2^2 quotient is negative: no real solution.
        assert!(!candidate_coexisting(&fig3(0.6, 0.8)).valid);
        // (0.6, 0.5): genuine interior solution, saddle.
        let c = candidate_coexisting(&fig3(0.6, 0.5));
        assert!(c.valid);
        let (n1, n2, n3) = c.point.occupations();
        assert!((n3 - 0.75 / 2.56).abs() < 1e-12, "Psi3^2 = {n3}");
        assert!((n2 - 0.40375 / 2.56).abs() < 1e-12, "Psi2^2 = {n2}");
        assert!(n1 > 0.0);
        assert_eq!(c.stability, Stability::Saddle);
        // Point is stationary.
        let (ga, gb) = gradient_h0(c.point.psi_lo, c.point.psi3, &fig3(0.6, 0.5)).unwrap();
        assert!(ga.abs() < 1e-12 && gb.abs() < 1e-12);
        // Degenerate quotient.
        let p = ModelParams::new(0.0, 0.5, 1.0, 1.0, 1.0, 0.4, 0.4).unwrap();
        assert!(!candidate_coexisting(&p).valid);
        // delta = 0 has no interior coexisting solution at generic couplings.
        let p = ModelParams::new(0.0, 0.0, 1.0, 1.0, 0.25, 0.6, 0.5).unwrap();
        assert!(!candidate_coexisting(&p).valid);
    }

    #[test]
    fn classify_fig3_regions() {
        assert_eq!(classify(&fig3(0.3, 0.2), 1e-9).label, PhaseLabel::Normal);
        assert_eq!(
            classify(&fig3(0.8, 0.2), 1e-9).label,
            PhaseLabel::BlueSuperradiant
        );
        assert_eq!(
            classify(&fig3(0.2, 0.9), 1e-9).label,
            PhaseLabel::RedSuperradiant
        );
    }

    #[test]
    fn classify_triple_point_degeneracy() {
        let g2c2 = fig3(0.0, 0.0).critical_couplings().g2c2;
        let c = classify(&fig3(0.5, g2c2), 1e-9);
        assert!(c.degenerate.contains(&PhaseLabel::Normal));
        assert!(c.degenerate.contains(&PhaseLabel::BlueSuperradiant));
        assert!(c.degenerate.contains(&PhaseLabel::RedSuperradiant));
    }

    #[test]
    fn classify_labels_dark_at_degenerate_gaps() {
        let p = ModelParams::new(0.0, 0.0, 1.0, 1.0, 0.25, 0.2, 0.1).unwrap();
        let c = classify(&p, 1e-9);
        assert_eq!(c.label, PhaseLabel::Dark);
        assert_eq!(c.winner.stability, Stability::MarginalFlat);
        // Superradiant couplings still win at delta = 0.
        let p = ModelParams::new(0.0, 0.0, 1.0, 1.0, 0.25, 1.0, 0.1).unwrap();
        assert_eq!(classify(&p, 1e-9).label, PhaseLabel::BlueSuperradiant);
    }

    #[test]
    fn h1_coefficients_vanish_at_candidates() {
        for p in [fig3(1.0, 0.2), fig3(0.6, 0.5), fig3(0.3, 0.2)] {
            for c in [
                candidate_normal(&p),
                candidate_blue(&p),
                candidate_coexisting(&p),
            ] {
                if !c.valid {
                    continue;
                }
                let brackets = h1_coefficients(&c.point, &p).unwrap();
                for (i, v) in brackets.iter().enumerate() {
                    assert!(v.abs() < 1e-10, "bracket {i} = {v} at {:?}", c.label);
                }
            }
            let red = candidate_red(&p);
            if red.valid {
                let brackets = h1_coefficients(&red.point, &p).unwrap();
                for (i, v) in brackets.iter().enumerate() {
                    assert!(v.abs() < 1e-10, "red bracket {i} = {v}");
                }
            }
        }
    }

    #[test]
    fn minimize_numeric_matches_candidates() {
        // Blue region.
        let m = minimize_numeric(&fig3(1.0, 0.2), 48, 60).unwrap();
        assert!(m.converged);
        assert_eq!(m.label, PhaseLabel::BlueSuperradiant);
        assert!((m.energy_per_particle + 0.5625).abs() < 1e-9);
        // Free limit.
        let m = minimize_numeric(&fig3(0.0, 0.0), 48, 60).unwrap();
        assert_eq!(m.label, PhaseLabel::Normal);
        assert_eq!(m.energy_per_particle, 0.0);
        // Red region (boundary of the m = 1 chart).
        let m = minimize_numeric(&fig3(0.2, 0.9330127018922193), 48, 60).unwrap();
        assert_eq!(m.label, PhaseLabel::RedSuperradiant);
        assert!(
            (m.energy_per_particle + 2.6081726320958224).abs() < 1e-9,
            "numeric red energy {}",
            m.energy_per_particle
        );
    }

    #[test]
    fn minimize_numeric_rejects_coarse_grid() {
        assert!(matches!(
            minimize_numeric(&fig3(0.3, 0.2), 16, 40),
            Err(MeanFieldError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn blue_energy_below_normal_above_onset() {
        let g1c = 0.5;
        for i in 0..40 {
            let g1 = g1c + i as f64 * 0.05;
            let c = candidate_blue(&fig3(g1, 0.2));
            assert!(c.energy_per_particle <= 0.0 + 1e-15);
            if g1 > g1c {
                assert!(c.energy_per_particle < 0.0);
            }
        }
    }

    #[test]
    fn sign_branch_partners_are_degenerate() {
        // The +/- branches are parity partners: flipping the signs of
        // (Psi_3, phi_1) or (Psi_lo, phi_2) leaves h0_full unchanged.
        let p = fig3(0.9, 0.6);
        let mut rng = Rng(23);
        for _ in 0..50 {
            let r = rng.next().sqrt() * 0.9;
            let t = rng.next() * std::f64::consts::FRAC_PI_2;
            let (a, b) = (r * t.cos(), r * t.sin());
            let point = MeanFieldPoint::stationary(Frame::M1, a, b, &p).unwrap();
            let flipped =
                MeanFieldPoint::new(Frame::M1, a, -b, -point.phi1, -point.phi2).unwrap();
            let e1 = h0_full(&point, &p).unwrap();
            let e2 = h0_full(&flipped, &p).unwrap();
            assert!((e1 - e2).abs() < 1e-14);
        }
    }
}
