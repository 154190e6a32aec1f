//! Physical parameters of the Λ-configuration model and the closed-form
//! critical coupling strengths.
//!
//! Energies are measured from the lowest single-particle level: the two gaps
//! Δ = E₃ − E₁ and δ = E₂ − E₁ enter every formula, while E₁ itself is a pure
//! offset. One consistent arbitrary energy unit is used throughout (ħ = 1).

use thiserror::Error;

/// The seven physical constants of the model.
///
/// Ordering E₁ ≤ E₂ ≤ E₃ is expressed as Δ ≥ δ ≥ 0. Couplings are restricted
/// to g ≥ 0: the spectrum is invariant under gₙ → −gₙ (absorb the sign into
/// aₙ → −aₙ), so negative couplings add nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Energy offset E₁ of the lowest level.
    pub e1: f64,
    /// Gap δ = E₂ − E₁ ≥ 0 between the two ground states.
    pub delta: f64,
    /// Gap Δ = E₃ − E₁ ≥ δ to the excited state.
    pub cap_delta: f64,
    /// Frequency ω₁ > 0 of the mode coupled to the |1⟩↔|3⟩ (blue) branch.
    pub omega1: f64,
    /// Frequency ω₂ > 0 of the mode coupled to the |2⟩↔|3⟩ (red) branch.
    pub omega2: f64,
    /// Blue-branch coupling g₁ ≥ 0.
    pub g1: f64,
    /// Red-branch coupling g₂ ≥ 0.
    pub g2: f64,
}

/// Critical coupling strengths derived from the gaps and mode frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCouplings {
    /// g₁,c = √(Δω₁)/2 — normal↔blue instability threshold.
    pub g1c: f64,
    /// g₂,c₁ = √((Δ−δ)ω₂)/2 — reality threshold of the red solution.
    pub g2c1: f64,
    /// g₂,c₂ = (√Δ+√δ)√ω₂/2 — normal↔red energy crossing.
    pub g2c2: f64,
    /// g₂,c = √(Δω₂)/2 — dark-state stability threshold.
    pub g2c: f64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("level ordering violated: need Delta >= delta >= 0")]
    OrderingViolation,
    #[error("mode frequencies must be positive")]
    NonPositiveFrequency,
    #[error("couplings must be non-negative")]
    NegativeCoupling,
    #[error("parameters must be finite")]
    NonFinite,
}

impl ModelParams {
    /// Validated constructor; see [`ModelParams::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        e1: f64,
        delta: f64,
        cap_delta: f64,
        omega1: f64,
        omega2: f64,
        g1: f64,
        g2: f64,
    ) -> Result<Self, ValidationError> {
        Self {
            e1,
            delta,
            cap_delta,
            omega1,
            omega2,
            g1,
            g2,
        }
        .validate()
    }

    /// Checks Δ ≥ δ ≥ 0, ω₁,ω₂ > 0, g₁,g₂ ≥ 0 and finiteness; returns the
    /// parameters unchanged when all invariants hold.
    pub fn validate(self) -> Result<Self, ValidationError> {
        let fields = [
            self.e1,
            self.delta,
            self.cap_delta,
            self.omega1,
            self.omega2,
            self.g1,
            self.g2,
        ];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(ValidationError::NonFinite);
        }
        if self.delta < 0.0 || self.cap_delta < self.delta {
            return Err(ValidationError::OrderingViolation);
        }
        if self.omega1 <= 0.0 || self.omega2 <= 0.0 {
            return Err(ValidationError::NonPositiveFrequency);
        }
        if self.g1 < 0.0 || self.g2 < 0.0 {
            return Err(ValidationError::NegativeCoupling);
        }
        Ok(self)
    }

    /// Same parameter set with the couplings replaced.
    pub fn with_couplings(&self, g1: f64, g2: f64) -> Self {
        Self { g1, g2, ..*self }
    }

    /// All four critical couplings in closed form.
    pub fn critical_couplings(&self) -> CriticalCouplings {
        let d = self.cap_delta;
        let s = self.delta;
        CriticalCouplings {
            g1c: (d * self.omega1).sqrt() / 2.0,
            g2c1: ((d - s) * self.omega2).sqrt() / 2.0,
            g2c2: (d.sqrt() + s.sqrt()) * self.omega2.sqrt() / 2.0,
            g2c: (d * self.omega2).sqrt() / 2.0,
        }
    }
}
