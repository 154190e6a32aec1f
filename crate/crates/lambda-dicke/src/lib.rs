//! Zero-temperature theory of the two-color (Λ-configuration) Dicke model.
//!
//! Three-level particles in Λ-configuration — two ground states |1⟩, |2⟩
//! coupled to one excited state |3⟩ via two independent bosonic modes — are
//! solved in the thermodynamic limit by a mean-field (Holstein–Primakoff)
//! treatment and cross-checked at finite particle number by exact
//! diagonalization in the symmetric subspace.
//!
//! - [`model`] — physical parameters and critical coupling strengths
//! - [`meanfield`] — ground-state energy landscape, stationary solutions,
//!   Hessian stability, phase classification, numeric minimizer oracle
//! - [`spectra`] — Bogoliubov excitation energies (closed form and generic
//!   quadratic-form diagonalization)
//! - [`darkstate`] — the δ = 0 non-radiating manifold: spectrum, stability,
//!   coherence
//! - [`phasemap`] — phase boundaries, transition orders, coupling-grid sweeps
//! - [`ed`] — finite-N exact diagonalization oracle

pub mod darkstate;
pub mod ed;
pub mod meanfield;
pub mod model;
pub mod phasemap;
pub mod spectra;

pub use meanfield::{CandidateSolution, MeanFieldPoint, PhaseLabel, Stability};
pub use model::{CriticalCouplings, ModelParams};
pub use spectra::ExcitationSpectrum;
