//! Bogoliubov excitation energies of the quadratic fluctuation Hamiltonian
//! h⁽²⁾, both in closed form per phase and by generic diagonalization of the
//! assembled four-mode quadratic form.
//!
//! In every phase the four fluctuation modes (two atomic, two photonic) pair
//! into two 2×2 blocks. The "x" block couples the heavy atomic mode to the
//! photon of the superradiant (or potentially superradiant) branch and
//! carries a (d+d†)² self-interaction with strength λ; absorbing that term
//! gives the block's squared atomic frequency ω₋(ω₋ + 4λ) = Δ̄²η_x², which is
//! what enters the polariton formula. The "x′" block couples the light atomic
//! mode to the other photon with no self-interaction.
//!
//! The generic path assembles position/momentum quadratic forms
//! H = ½(PᵀTP + XᵀVX): X-X couplings enter V, the number-conserving hopping
//! term splits into equal X-X and P-P parts and therefore enters both V and
//! T; the eigenfrequencies are ε² = eig(T^{1/2} V T^{1/2}).

use crate::meanfield::{Frame, MeanFieldPoint, PhaseLabel};
use crate::model::ModelParams;
use nalgebra::{DMatrix, Matrix4};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("closed-form spectrum for {phase:?} is not real at g1={g1}, g2={g2}")]
    PhaseMismatch {
        phase: PhaseLabel,
        g1: f64,
        g2: f64,
    },
    #[error("branch critical coupling vanishes (degenerate gaps); no closed form")]
    DegenerateBranch,
    #[error("no closed-form spectrum for phase {0:?}")]
    UnsupportedPhase(PhaseLabel),
    #[error("reference frame singular at psi_m = {psi_m}")]
    FrameSingularity { psi_m: f64 },
}

/// One quasi-particle energy; `Imaginary` flags ε² < 0 (an instability
/// signal) and stores |ε| = √(−ε²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeEnergy {
    Real(f64),
    Imaginary(f64),
}

impl ModeEnergy {
    /// ε² within this window of zero is clamped to exactly 0 (massless mode
    /// at criticality and the dark-state flat direction).
    const ZERO_CLAMP: f64 = 1e-12;

    pub fn from_eps_sq(eps_sq: f64) -> Self {
        if eps_sq.abs() < Self::ZERO_CLAMP {
            ModeEnergy::Real(0.0)
        } else if eps_sq >= 0.0 {
            ModeEnergy::Real(eps_sq.sqrt())
        } else {
            ModeEnergy::Imaginary((-eps_sq).sqrt())
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, ModeEnergy::Real(_))
    }

    pub fn real(&self) -> Option<f64> {
        match self {
            ModeEnergy::Real(v) => Some(*v),
            ModeEnergy::Imaginary(_) => None,
        }
    }

    /// Real part for stable modes, NaN for unstable ones (CSV-friendly).
    pub fn real_or_nan(&self) -> f64 {
        match self {
            ModeEnergy::Real(v) => *v,
            ModeEnergy::Imaginary(_) => f64::NAN,
        }
    }

    fn sort_key(&self) -> (u8, f64) {
        match self {
            ModeEnergy::Real(v) => (0, *v),
            ModeEnergy::Imaginary(v) => (1, *v),
        }
    }
}

/// Abbreviations entering the closed-form branch energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchParams {
    /// Which branch hosts the coupled heavy atomic mode: 1 (normal, blue) or
    /// 2 (red).
    pub x: u8,
    /// Δ̄: Δ for x = 1, Δ − δ for x = 2.
    pub bar_delta: f64,
    /// δ̄: δ for x = 1, −δ for x = 2.
    pub bar_delta_small: f64,
    /// η_x ≥ 1: 1 in the normal phase, (g_x/g_{x,c})² in the superradiant one.
    pub eta: f64,
    /// ω₁,₋ = (Δ̄/2)(1 + η): heavy atomic frequency of the x block.
    pub omega1m: f64,
    /// ω₂,₋ = δ̄ − (Δ̄/2)(1 − η): atomic frequency of the x′ block.
    pub omega2m: f64,
    /// λ = −(Δ̄/8)(1 − η)(1 + 3η)/(1 + η): (d+d†)² strength in the x block.
    pub lambda: f64,
    /// g̃_x = g_x √(2/(η(1+η))).
    pub gtilde_x: f64,
    /// g̃_{x'} = g_{x'} √((η−1)/(2η)); the overall sign is spectrally
    /// irrelevant (only g̃² enters) and the + branch is used.
    pub gtilde_xp: f64,
}

impl BranchParams {
    pub fn for_phase(phase: PhaseLabel, params: &ModelParams) -> Result<Self, SpectraError> {
        let crit = params.critical_couplings();
        match phase {
            PhaseLabel::Normal => Ok(Self::normal_like(params, params.delta)),
            // A delta = 0 dark ground state carries the eta = 1 spectrum of
            // its Psi_2 = 0 member.
            PhaseLabel::Dark => Ok(Self::normal_like(params, 0.0)),
            PhaseLabel::BlueSuperradiant => {
                if crit.g1c <= 0.0 {
                    return Err(SpectraError::DegenerateBranch);
                }
                if params.g1 < crit.g1c {
                    return Err(SpectraError::PhaseMismatch {
                        phase,
                        g1: params.g1,
                        g2: params.g2,
                    });
                }
                let eta = (params.g1 / crit.g1c).powi(2);
                Ok(Self::superradiant(
                    1,
                    params.cap_delta,
                    params.delta,
                    eta,
                    params.g1,
                    params.g2,
                ))
            }
            PhaseLabel::RedSuperradiant => {
                if crit.g2c1 <= 0.0 {
                    return Err(SpectraError::DegenerateBranch);
                }
                if params.g2 < crit.g2c1 {
                    return Err(SpectraError::PhaseMismatch {
                        phase,
                        g1: params.g1,
                        g2: params.g2,
                    });
                }
                let eta = (params.g2 / crit.g2c1).powi(2);
                Ok(Self::superradiant(
                    2,
                    params.cap_delta - params.delta,
                    -params.delta,
                    eta,
                    params.g2,
                    params.g1,
                ))
            }
            PhaseLabel::UnphysicalCoexisting => Err(SpectraError::UnsupportedPhase(phase)),
        }
    }

    fn normal_like(params: &ModelParams, delta_small: f64) -> Self {
        Self {
            x: 1,
            bar_delta: params.cap_delta,
            bar_delta_small: delta_small,
            eta: 1.0,
            omega1m: params.cap_delta,
            omega2m: delta_small,
            lambda: 0.0,
            gtilde_x: params.g1,
            gtilde_xp: 0.0,
        }
    }

    fn superradiant(x: u8, bar_delta: f64, bar_delta_small: f64, eta: f64, gx: f64, gxp: f64) -> Self {
        Self {
            x,
            bar_delta,
            bar_delta_small,
            eta,
            omega1m: 0.5 * bar_delta * (1.0 + eta),
            omega2m: bar_delta_small - 0.5 * bar_delta * (1.0 - eta),
            lambda: -bar_delta / 8.0 * (1.0 - eta) * (1.0 + 3.0 * eta) / (1.0 + eta),
            gtilde_x: gx * (2.0 / (eta * (1.0 + eta))).sqrt(),
            gtilde_xp: gxp * ((eta - 1.0).max(0.0) / (2.0 * eta)).sqrt(),
        }
    }
}

/// The four branch energies in fixed order (x,−), (x,+), (x′,−), (x′,+).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationSpectrum {
    pub phase: PhaseLabel,
    pub eps: [ModeEnergy; 4],
    pub branch: BranchParams,
}

impl ExcitationSpectrum {
    pub fn all_real(&self) -> bool {
        self.eps.iter().all(ModeEnergy::is_real)
    }

    /// Real energies sorted ascending; None if any mode is unstable.
    pub fn sorted_real(&self) -> Option<[f64; 4]> {
        let mut out = [0.0; 4];
        for (o, e) in out.iter_mut().zip(self.eps.iter()) {
            *o = e.real()?;
        }
        out.sort_by(f64::total_cmp);
        Some(out)
    }
}

/// Closed-form excitation energies of the named phase.
pub fn spectrum_closed_form(
    phase: PhaseLabel,
    params: &ModelParams,
) -> Result<ExcitationSpectrum, SpectraError> {
    let branch = BranchParams::for_phase(phase, params)?;
    let (omega_x, omega_xp) = if branch.x == 1 {
        (params.omega1, params.omega2)
    } else {
        (params.omega2, params.omega1)
    };

    // Absorbing the (d+d†)^2 term shifts the squared atomic frequency to
    // W = omega1m*(omega1m + 4*lambda) = (bar_delta * eta)^2.
    let w = branch.omega1m * (branch.omega1m + 4.0 * branch.lambda);
    let (x_minus, x_plus) = pair_eps_sq(
        omega_x * omega_x,
        w,
        16.0 * branch.gtilde_x * branch.gtilde_x * omega_x * branch.omega1m,
    );
    let (xp_minus, xp_plus) = pair_eps_sq(
        omega_xp * omega_xp,
        branch.omega2m * branch.omega2m,
        16.0 * branch.gtilde_xp * branch.gtilde_xp * omega_xp * branch.omega2m,
    );

    Ok(ExcitationSpectrum {
        phase,
        eps: [
            ModeEnergy::from_eps_sq(x_minus),
            ModeEnergy::from_eps_sq(x_plus),
            ModeEnergy::from_eps_sq(xp_minus),
            ModeEnergy::from_eps_sq(xp_plus),
        ],
        branch,
    })
}

/// ε²_± = ½[A + B ± √((A − B)² + C)] for one 2×2 block.
fn pair_eps_sq(a: f64, b: f64, c: f64) -> (f64, f64) {
    let root_arg = (a - b) * (a - b) + c;
    if root_arg < 0.0 {
        // Complex-conjugate quartet: report both members as unstable with the
        // magnitude of the mean squared frequency.
        let m = -(0.5 * (a + b)).abs();
        return (m, m);
    }
    let root = root_arg.sqrt();
    (0.5 * (a + b - root), 0.5 * (a + b + root))
}

// ---------------------------------------------------------------------------
// Generic quadratic form
// ---------------------------------------------------------------------------

/// The fluctuation modes of one reference frame in fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// d̂ of the frame's explicit low level (d₂ in m = 1, d₁ in m = 2).
    AtomLow,
    /// d̂₃ of the excited level.
    AtomHigh,
    Photon1,
    Photon2,
}

pub const MODE_ORDER: [ModeKind; 4] = [
    ModeKind::AtomLow,
    ModeKind::AtomHigh,
    ModeKind::Photon1,
    ModeKind::Photon2,
];

/// Four-mode quadratic fluctuation Hamiltonian
/// h⁽²⁾ = Σ diag_i m_i†m_i + Σ xx_ij (m_i+m_i†)(m_j+m_j†) + Σ hop_ij (m_i†m_j + m_j†m_i).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub frame: Frame,
    pub diag: [f64; 4],
    /// Symmetric; off-diagonal entries hold the full coefficient of
    /// (m_i+m_i†)(m_j+m_j†), diagonal entries that of (m_i+m_i†)².
    pub xx: [[f64; 4]; 4],
    /// Symmetric, off-diagonal only (the d-d hopping term).
    pub hop: [[f64; 4]; 4],
}

/// Assembles h⁽²⁾ term-by-term at an interior mean-field point of its frame.
pub fn build_h2(point: &MeanFieldPoint, params: &ModelParams) -> Result<QuadraticForm, SpectraError> {
    let psi_m = point.psi_m();
    if psi_m <= 1e-10 {
        return Err(SpectraError::FrameSingularity { psi_m });
    }
    let a = point.psi_lo;
    let b = point.psi3;
    let ratio = b / psi_m;

    let mut xx = [[0.0; 4]; 4];
    let mut hop = [[0.0; 4]; 4];
    let sym = |m: &mut [[f64; 4]; 4], i: usize, j: usize, v: f64| {
        m[i][j] = v;
        m[j][i] = v;
    };

    let diag;
    match point.frame {
        Frame::M1 => {
            let shift = -2.0 * params.g1 * point.phi1 * ratio;
            diag = [
                params.delta + shift,
                params.cap_delta + shift,
                params.omega1,
                params.omega2,
            ];
            xx[0][0] = -0.5 * params.g1 * point.phi1 * a * a * b / (psi_m * psi_m * psi_m);
            xx[1][1] = -params.g1 * point.phi1 * ratio * (1.0 + 0.5 * ratio * ratio);
            sym(&mut xx, 0, 1, -params.g1 * point.phi1 * a / psi_m * (1.0 + ratio * ratio));
            sym(&mut xx, 0, 2, -params.g1 * a * ratio);
            sym(&mut xx, 1, 2, params.g1 * psi_m * (1.0 - ratio * ratio));
            sym(&mut xx, 0, 3, params.g2 * b);
            sym(&mut xx, 1, 3, params.g2 * a);
            sym(&mut hop, 0, 1, 2.0 * params.g2 * point.phi2);
        }
        Frame::M2 => {
            let shift = -2.0 * params.g2 * point.phi2 * ratio;
            diag = [
                -params.delta + shift,
                params.cap_delta - params.delta + shift,
                params.omega1,
                params.omega2,
            ];
            xx[0][0] = -0.5 * params.g2 * point.phi2 * a * a * b / (psi_m * psi_m * psi_m);
            xx[1][1] = -params.g2 * point.phi2 * ratio * (1.0 + 0.5 * ratio * ratio);
            sym(&mut xx, 0, 1, -params.g2 * point.phi2 * a / psi_m * (1.0 + ratio * ratio));
            sym(&mut xx, 0, 3, -params.g2 * a * ratio);
            sym(&mut xx, 1, 3, params.g2 * psi_m * (1.0 - ratio * ratio));
            sym(&mut xx, 0, 2, params.g1 * b);
            sym(&mut xx, 1, 2, params.g1 * a);
            sym(&mut hop, 0, 1, 2.0 * params.g1 * point.phi1);
        }
    }

    Ok(QuadraticForm {
        frame: point.frame,
        diag,
        xx,
        hop,
    })
}

/// Eigenfrequencies of the quadratic form by the position-representation
/// method: H = ½(PᵀTP + XᵀVX) with T = diag + hop, V_ii = diag_i + 4·xx_ii,
/// V_ij = 2·xx_ij + hop_ij; ε² are the eigenvalues of T^{1/2} V T^{1/2}.
/// Negative ε² are reported as [`ModeEnergy::Imaginary`]. Falls back to the
/// non-symmetric eigenproblem of T·V when T is not positive definite.
pub fn bogoliubov_frequencies(form: &QuadraticForm) -> Vec<ModeEnergy> {
    let mut t = Matrix4::zeros();
    let mut v = Matrix4::zeros();
    for i in 0..4 {
        t[(i, i)] = form.diag[i];
        v[(i, i)] = form.diag[i] + 4.0 * form.xx[i][i];
        for j in 0..4 {
            if i != j {
                t[(i, j)] += form.hop[i][j];
                v[(i, j)] += 2.0 * form.xx[i][j] + form.hop[i][j];
            }
        }
    }

    let scale: f64 = (0..4).map(|i| form.diag[i].abs()).fold(1.0, f64::max);
    let t_eig = t.symmetric_eigen();
    let mut eps_sq: Vec<f64> = if t_eig.eigenvalues.iter().all(|&e| e > 1e-12 * scale) {
        // T^(1/2) from the eigendecomposition, then a symmetric eigensolve.
        let mut sqrt_t: Matrix4<f64> = Matrix4::zeros();
        for k in 0..4 {
            let lk = t_eig.eigenvalues[k].sqrt();
            let col = t_eig.eigenvectors.column(k);
            for i in 0..4 {
                for j in 0..4 {
                    sqrt_t[(i, j)] += lk * col[i] * col[j];
                }
            }
        }
        let m: Matrix4<f64> = sqrt_t * v * sqrt_t;
        let sym_m = DMatrix::from_fn(4, 4, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        sym_m.symmetric_eigen().eigenvalues.iter().copied().collect()
    } else {
        let tv = DMatrix::from_fn(4, 4, |i, j| (t * v)[(i, j)]);
        tv.complex_eigenvalues()
            .iter()
            .map(|z| if z.im.abs() > 1e-8 * scale * scale { -z.norm() } else { z.re })
            .collect()
    };
    eps_sq.sort_by(f64::total_cmp);

    let mut out: Vec<ModeEnergy> = eps_sq.into_iter().map(ModeEnergy::from_eps_sq).collect();
    out.sort_by(|a, b| {
        let (fa, va) = a.sort_key();
        let (fb, vb) = b.sort_key();
        fa.cmp(&fb).then(va.total_cmp(&vb))
    });
    out
}
