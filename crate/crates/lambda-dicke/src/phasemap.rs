//! Phase-boundary curves, the triple point, transition-order diagnostics and
//! coupling-grid sweeps.
//!
//! The phase diagram in the (g₂, g₁) plane has three boundaries: the vertical
//! second-order line g₁ = g₁,c between normal and blue, the horizontal
//! first-order line g₂ = g₂,c₂ between normal and red, and the first-order
//! curve ḡ₁,c(g₂) between the two superradiant phases, defined by equality of
//! their ground-state energies. All three meet at the triple point
//! (g₁,c, g₂,c₂).

use crate::meanfield::{self, Classification, PhaseLabel};
use crate::model::ModelParams;
use crate::spectra::{spectrum_closed_form, ExcitationSpectrum};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseMapError {
    #[error("blue/red boundary needs g2 >= g2c2 = {g2c2}, got {g2}")]
    OutOfRange { g2: f64, g2c2: f64 },
    #[error("transition-order detection needs Delta > 0")]
    DegenerateGaps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    NormalBlue,
    NormalRed,
    BlueRed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionOrder {
    First,
    Second,
}

/// Finite-difference evidence for the order of a transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEvidence {
    pub order: TransitionOrder,
    /// One-sided first derivatives of the ground energy at the boundary.
    pub d1_left: f64,
    pub d1_right: f64,
    pub d1_jump: f64,
    /// One-sided second derivatives and their jump.
    pub d2_left: f64,
    pub d2_right: f64,
    pub d2_jump: f64,
    /// Coupling value of the boundary along the transversal.
    pub boundary: f64,
}

/// Sampled boundary curve as (g₂, g₁) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub kind: BoundaryKind,
    pub samples: Vec<(f64, f64)>,
    pub order: TransitionOrder,
}

/// One cell of a coupling-grid sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub g1: f64,
    pub g2: f64,
    pub phase: PhaseLabel,
    pub energy: f64,
    /// Level-occupation densities (Ψ₂², Ψ₃²) of the winning state.
    pub psi2_sq: f64,
    pub psi3_sq: f64,
    /// Photon densities (φ₁², φ₂²).
    pub phi1_sq: f64,
    pub phi2_sq: f64,
    /// Closed-form spectrum of the winning phase (None only for degenerate
    /// parameter sets without a closed form).
    pub spectrum: Option<ExcitationSpectrum>,
    /// Spectra of the losing (metastable) phases when requested.
    pub metastable: Vec<(PhaseLabel, ExcitationSpectrum)>,
}

/// The boundary ḡ₁,c(g₂) between the blue and red superradiant phases,
/// from the energy-crossing condition in closed form:
/// ḡ₁,c²(g₂) = g₂²·(ω₁/2ω₂)·{1 + k² − δω₂/(2g₂²) + (1+k)√((1−k)² − δω₂/g₂²)}
/// with k = (g₂,c₁/g₂)². Real exactly for g₂ ≥ g₂,c₂.
pub fn boundary_blue_red(g2: f64, params: &ModelParams) -> Result<f64, PhaseMapError> {
    let crit = params.critical_couplings();
    if g2 < crit.g2c2 * (1.0 - 1e-12) || g2 <= 0.0 {
        return Err(PhaseMapError::OutOfRange {
            g2,
            g2c2: crit.g2c2,
        });
    }
    let k = (crit.g2c1 / g2).powi(2);
    let t = params.delta * params.omega2 / (g2 * g2);
    // The discriminant vanishes identically at g2 = g2c2; clamp the rounding.
    let disc = ((1.0 - k) * (1.0 - k) - t).max(0.0);
    let g1_bar_sq = g2 * g2 * 0.5 * params.omega1 / params.omega2
        * (1.0 + k * k - 0.5 * t + (1.0 + k) * disc.sqrt());
    Ok(g1_bar_sq.sqrt())
}

/// Coupling pair (g₁,c, g₂,c₂) where all three phases are degenerate.
pub fn triple_point(params: &ModelParams) -> (f64, f64) {
    let crit = params.critical_couplings();
    (crit.g1c, crit.g2c2)
}

/// Ground-state energy at the given couplings (winner of the candidate
/// comparison).
fn ground_energy(params: &ModelParams, g1: f64, g2: f64) -> f64 {
    meanfield::classify(&params.with_couplings(g1, g2), 1e-9)
        .winner
        .energy_per_particle
}

/// One-sided finite-difference step in coupling.
const FD_STEP: f64 = 1e-4;

/// Detects the order of the named transition by one-sided second-order
/// finite differences of the ground energy along a transversal through the
/// boundary. First order iff the first derivative jumps by more than
/// 1e−6·Δ.
pub fn transition_order(
    kind: BoundaryKind,
    params: &ModelParams,
) -> Result<OrderEvidence, PhaseMapError> {
    if params.cap_delta <= 0.0 {
        return Err(PhaseMapError::DegenerateGaps);
    }
    let crit = params.critical_couplings();
    // Transversal: energy as a function of one coupling with the other fixed
    // strictly inside the adjacent phases.
    let (boundary, energy): (f64, Box<dyn Fn(f64) -> f64>) = match kind {
        BoundaryKind::NormalBlue => {
            let g2_fix = 0.4 * crit.g2c2;
            (
                crit.g1c,
                Box::new(move |g1| ground_energy(params, g1, g2_fix)),
            )
        }
        BoundaryKind::NormalRed => {
            let g1_fix = 0.4 * crit.g1c;
            (
                crit.g2c2,
                Box::new(move |g2| ground_energy(params, g1_fix, g2)),
            )
        }
        BoundaryKind::BlueRed => {
            let g2_fix = 1.5 * crit.g2c2;
            let b = boundary_blue_red(g2_fix, params)?;
            (b, Box::new(move |g1| ground_energy(params, g1, g2_fix)))
        }
    };

    let h = FD_STEP;
    let f = |x: f64| energy(x);
    let b = boundary;
    // Second-order one-sided stencils evaluated exactly at the boundary.
    let d1_left = (3.0 * f(b) - 4.0 * f(b - h) + f(b - 2.0 * h)) / (2.0 * h);
    let d1_right = (-3.0 * f(b) + 4.0 * f(b + h) - f(b + 2.0 * h)) / (2.0 * h);
    let d2_left = (2.0 * f(b) - 5.0 * f(b - h) + 4.0 * f(b - 2.0 * h) - f(b - 3.0 * h)) / (h * h);
    let d2_right = (2.0 * f(b) - 5.0 * f(b + h) + 4.0 * f(b + 2.0 * h) - f(b + 3.0 * h)) / (h * h);

    let d1_jump = (d1_right - d1_left).abs();
    let d2_jump = (d2_right - d2_left).abs();
    let tol_d1 = 1e-6 * params.cap_delta;
    let order = if d1_jump > tol_d1 {
        TransitionOrder::First
    } else {
        TransitionOrder::Second
    };
    Ok(OrderEvidence {
        order,
        d1_left,
        d1_right,
        d1_jump,
        d2_left,
        d2_right,
        d2_jump,
        boundary,
    })
}

/// The three boundary curves sampled with `n` points each; the blue/red curve
/// extends up to `g2_max`.
pub fn boundary_curves(
    params: &ModelParams,
    g2_max: f64,
    n: usize,
) -> Result<Vec<BoundaryCurve>, PhaseMapError> {
    let crit = params.critical_couplings();
    let n = n.max(2);
    let line = |from: f64, to: f64, i: usize| from + (to - from) * i as f64 / (n - 1) as f64;

    let normal_blue = BoundaryCurve {
        kind: BoundaryKind::NormalBlue,
        samples: (0..n).map(|i| (line(0.0, crit.g2c2, i), crit.g1c)).collect(),
        order: TransitionOrder::Second,
    };
    let normal_red = BoundaryCurve {
        kind: BoundaryKind::NormalRed,
        samples: (0..n).map(|i| (crit.g2c2, line(0.0, crit.g1c, i))).collect(),
        order: if params.delta > 0.0 {
            TransitionOrder::First
        } else {
            TransitionOrder::Second
        },
    };
    let mut blue_red_samples = Vec::with_capacity(n);
    for i in 0..n {
        let g2 = line(crit.g2c2, g2_max.max(crit.g2c2), i);
        blue_red_samples.push((g2, boundary_blue_red(g2, params)?));
    }
    let blue_red = BoundaryCurve {
        kind: BoundaryKind::BlueRed,
        samples: blue_red_samples,
        order: TransitionOrder::First,
    };
    Ok(vec![normal_blue, normal_red, blue_red])
}

/// Options for [`sweep_grid`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Also evaluate the spectra of valid losing candidates (metastable
    /// branches).
    pub metastable_spectra: bool,
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Classifies every cell of the coupling grid; row order is g₂-major
/// (g₂ outer, g₁ inner) and deterministic. `n = 1` produces a cut along the
/// other coupling.
pub fn sweep_grid(
    params: &ModelParams,
    g1_range: (f64, f64),
    g2_range: (f64, f64),
    n1: usize,
    n2: usize,
    options: SweepOptions,
) -> Vec<SweepCell> {
    let n1 = n1.max(1);
    let n2 = n2.max(1);
    let mut cells = Vec::with_capacity(n1 * n2);
    for j in 0..n2 {
        let g2 = linspace(g2_range.0, g2_range.1, n2, j);
        for i in 0..n1 {
            let g1 = linspace(g1_range.0, g1_range.1, n1, i);
            cells.push(cell_at(params, g1, g2, options));
        }
    }
    cells
}

fn cell_at(params: &ModelParams, g1: f64, g2: f64, options: SweepOptions) -> SweepCell {
    let p = params.with_couplings(g1, g2);
    let cls: Classification = meanfield::classify(&p, 1e-9);
    let w = &cls.winner;
    let (_, n2_occ, n3_occ) = w.point.occupations();
    let spectrum = spectrum_closed_form(cls.label, &p).ok();
    let mut metastable = Vec::new();
    if options.metastable_spectra {
        for c in &cls.candidates {
            if c.valid && c.label != cls.label {
                if let Ok(s) = spectrum_closed_form(c.label, &p) {
                    metastable.push((c.label, s));
                }
            }
        }
    }
    SweepCell {
        g1,
        g2,
        phase: cls.label,
        energy: w.energy_per_particle,
        psi2_sq: n2_occ,
        psi3_sq: n3_occ,
        phi1_sq: w.point.phi1 * w.point.phi1,
        phi2_sq: w.point.phi2 * w.point.phi2,
        spectrum,
        metastable,
    }
}
