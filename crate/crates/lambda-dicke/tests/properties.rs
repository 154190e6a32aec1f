//! Cross-module invariants that complement the acceptance criteria.

use lambda_dicke::meanfield::{
    self, candidate_blue, candidate_normal, candidate_red, h0_full, minimize_numeric, Frame,
    MeanFieldPoint, PhaseLabel, Stability,
};
use lambda_dicke::model::ModelParams;
use lambda_dicke::phasemap::boundary_blue_red;
use lambda_dicke::spectra::{build_h2, spectrum_closed_form};

fn fig3(g1: f64, g2: f64) -> ModelParams {
    ModelParams::new(0.0, 0.75, 1.0, 1.0, 0.25, g1, g2).unwrap()
}

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

/// The X-quadrature matrix V of the fluctuation Hamiltonian must equal half
/// the Hessian of the full classical energy in the four displacement
/// variables (Ψ_lo, Ψ₃, φ₁, φ₂) — the square-root curvature terms of the
/// quadratic form are exactly the chain-rule curvature of ψ_m. This checks
/// every coupling coefficient of the assembled form at generic points.
#[test]
fn quadratic_form_matches_classical_curvature() {
    let p = fig3(0.7, 0.45);
    let mut rng = Rng(0xfeed);
    for frame in [Frame::M1, Frame::M2] {
        for _ in 0..40 {
            let r = rng.next().sqrt() * 0.85;
            let t = rng.next() * std::f64::consts::FRAC_PI_2;
            let (a, b) = (r * t.cos(), r * t.sin());
            let phi1 = rng.next() - 0.5;
            let phi2 = rng.next() - 0.5;
            let point = MeanFieldPoint::new(frame, a, b, phi1, phi2).unwrap();
            let form = build_h2(&point, &p).unwrap();

            // V from the assembled form.
            let v: Vec<Vec<f64>> = (0..4)
                .map(|i| {
                    (0..4)
                        .map(|j| {
                            if i == j {
                                form.diag[i] + 4.0 * form.xx[i][i]
                            } else {
                                2.0 * form.xx[i][j] + form.hop[i][j]
                            }
                        })
                        .collect()
                })
                .collect();

            // Half the finite-difference Hessian of h0_full.
            let f = |x: [f64; 4]| {
                h0_full(
                    &MeanFieldPoint::new(frame, x[0], x[1], x[2], x[3]).unwrap(),
                    &p,
                )
                .unwrap()
            };
            let x0 = [a, b, phi1, phi2];
            let h = 1e-5;
            for i in 0..4 {
                for j in 0..4 {
                    let mut xpp = x0;
                    let mut xpm = x0;
                    let mut xmp = x0;
                    let mut xmm = x0;
                    xpp[i] += h;
                    xpp[j] += h;
                    xpm[i] += h;
                    xpm[j] -= h;
                    xmp[i] -= h;
                    xmp[j] += h;
                    xmm[i] -= h;
                    xmm[j] -= h;
                    let fd = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
                    let scale = 1.0 + v[i][j].abs();
                    assert!(
                        (v[i][j] - 0.5 * fd).abs() < 2e-5 * scale,
                        "{frame:?} V[{i}][{j}] = {} vs half-Hessian {} at ({a}, {b}, {phi1}, {phi2})",
                        v[i][j],
                        0.5 * fd
                    );
                }
            }
        }
    }
}

/// Energy ordering along the blue branch: below E1 above onset, equality at
/// the critical coupling.
#[test]
fn blue_energy_ordering() {
    let crit = fig3(0.0, 0.0).critical_couplings();
    assert_eq!(
        candidate_blue(&fig3(crit.g1c, 0.2)).energy_per_particle,
        0.0
    );
    for i in 1..60 {
        let g1 = crit.g1c + 0.02 * i as f64;
        let e = candidate_blue(&fig3(g1, 0.2)).energy_per_particle;
        assert!(e < 0.0, "blue energy must undercut the normal state at g1={g1}");
    }
}

/// The red and normal energies cross exactly at g2c2 (closed-form identity).
#[test]
fn red_crossing_identity() {
    for delta in [0.1, 0.4, 0.75] {
        let p = ModelParams::new(0.0, delta, 1.0, 1.0, 0.25, 0.0, 0.0).unwrap();
        let g2c2 = p.critical_couplings().g2c2;
        let e = candidate_red(&p.with_couplings(0.0, g2c2)).energy_per_particle;
        assert!(e.abs() < 1e-12, "delta={delta}: crossing residual {e}");
    }
}

/// classify() flips its label exactly at the analytic blue/red boundary
/// (within one fine grid step) for a scan of g2 values.
#[test]
fn classify_flips_at_blue_red_boundary() {
    let p = fig3(0.0, 0.0);
    let crit = p.critical_couplings();
    for i in 0..20 {
        let g2 = crit.g2c2 + 0.02 + (2.0 - crit.g2c2) * i as f64 / 19.0;
        let g1_bar = boundary_blue_red(g2, &p).unwrap();
        let step = 1e-6;
        let below = meanfield::classify(&p.with_couplings(g1_bar - step, g2), 1e-12).label;
        let above = meanfield::classify(&p.with_couplings(g1_bar + step, g2), 1e-12).label;
        assert_eq!(below, PhaseLabel::RedSuperradiant, "g2={g2}");
        assert_eq!(above, PhaseLabel::BlueSuperradiant, "g2={g2}");
    }
}

/// Inside the red phase the normal state stays a local minimum up to g1c.
#[test]
fn normal_metastability_in_red_phase() {
    for g1 in [0.1, 0.3, 0.45] {
        let c = candidate_normal(&fig3(g1, 0.9));
        assert_eq!(c.stability, Stability::Minimum);
    }
    let c = candidate_normal(&fig3(0.55, 0.9));
    assert_ne!(c.stability, Stability::Minimum);
}

/// Numeric minimizer is deterministic and label-consistent in all phases,
/// including the degenerate delta = 0 dark regime.
#[test]
fn minimizer_determinism_and_dark_labels() {
    let p = fig3(0.35, 0.75);
    let a = minimize_numeric(&p, 48, 50).unwrap();
    let b = minimize_numeric(&p, 48, 50).unwrap();
    assert_eq!(a.energy_per_particle.to_bits(), b.energy_per_particle.to_bits());
    assert_eq!(a.point.psi3.to_bits(), b.point.psi3.to_bits());

    let p0 = ModelParams::new(0.0, 0.0, 1.0, 1.0, 0.25, 0.2, 0.1).unwrap();
    let m = minimize_numeric(&p0, 48, 50).unwrap();
    assert_eq!(m.label, PhaseLabel::Dark);
    assert!(m.energy_per_particle.abs() < 1e-12);
}

/// Spectra on a first-order boundary: both phases are locally stable there
/// (all branch energies real), the transition happens by energy crossing.
#[test]
fn both_phases_stable_on_first_order_boundary() {
    let p = fig3(0.0, 0.0);
    let g2 = 2.0 * p.critical_couplings().g2c2;
    let g1_bar = boundary_blue_red(g2, &p).unwrap();
    let blue = spectrum_closed_form(PhaseLabel::BlueSuperradiant, &p.with_couplings(g1_bar, g2))
        .unwrap();
    let red = spectrum_closed_form(PhaseLabel::RedSuperradiant, &p.with_couplings(g1_bar, g2))
        .unwrap();
    assert!(blue.all_real() && red.all_real());
}

/// Sweep cells never report the coexisting label and carry the spectrum of
/// their winning phase.
#[test]
fn sweep_cells_are_self_consistent() {
    let p = fig3(0.0, 0.0);
    let cells = lambda_dicke::phasemap::sweep_grid(
        &p,
        (0.0, 1.2),
        (0.0, 1.2),
        13,
        13,
        lambda_dicke::phasemap::SweepOptions::default(),
    );
    for cell in &cells {
        assert_ne!(cell.phase, PhaseLabel::UnphysicalCoexisting);
        let s = cell.spectrum.as_ref().expect("closed form exists");
        assert_eq!(s.phase, cell.phase);
        assert!(s.all_real(), "winning phase must be stable at ({}, {})", cell.g1, cell.g2);
        // Occupation and photon densities are consistent with the phase.
        match cell.phase {
            PhaseLabel::Normal => {
                assert_eq!(cell.phi1_sq, 0.0);
                assert_eq!(cell.phi2_sq, 0.0);
            }
            PhaseLabel::BlueSuperradiant => {
                assert!(cell.phi1_sq > 0.0 && cell.phi2_sq == 0.0);
            }
            PhaseLabel::RedSuperradiant => {
                assert!(cell.phi2_sq > 0.0 && cell.phi1_sq == 0.0);
                assert!((cell.psi2_sq + cell.psi3_sq - 1.0).abs() < 1e-12);
            }
            _ => {}
        }
    }
}

/// Parity doublet of the blue regime closes with N (sector ground states).
#[test]
fn ed_doublet_gap_shrinks() {
    use lambda_dicke::ed::{ground_state_with, EDConfig};
    let mut prev = f64::INFINITY;
    for n in [2usize, 4, 6] {
        let cutoff1 = (6.0 * n as f64 * 0.9375).ceil() as usize;
        let gap = {
            let solve = |tag| {
                let mut c = EDConfig::new(n, cutoff1, 6, fig3(1.0, 0.2));
                c.parity_sector = Some(tag);
                ground_state_with(&c, false).unwrap().ground_energy
            };
            (solve((0, 0)) - solve((1, 0))).abs()
        };
        assert!(gap < prev, "doublet gap must shrink: N={n}, gap={gap}");
        prev = gap;
    }
}

/// Below its stability window the red stationary point has a negative
/// effective mode frequency: the generic diagonalizer takes the
/// non-positive-definite branch and must flag the instability, consistently
/// with the closed form turning complex.
#[test]
fn unstable_red_point_flagged_by_both_routes() {
    let p = fig3(0.8, 0.2); // g2c1 < g2 < sqrt((Delta+delta)*omega2)/2
    let red = candidate_red(&p);
    assert!(red.valid);
    assert_ne!(red.stability, Stability::BoundaryMinimum);
    let closed = spectrum_closed_form(PhaseLabel::RedSuperradiant, &p).unwrap();
    assert!(!closed.all_real(), "closed form must flag the instability");
    let generic = lambda_dicke::spectra::bogoliubov_frequencies(
        &build_h2(&red.point, &p).unwrap(),
    );
    assert!(
        generic.iter().any(|e| e.real().is_none()),
        "generic route must flag the instability: {generic:?}"
    );
}

/// A nonzero energy offset shifts every reported energy rigidly and does not
/// confuse the frame-tie handling of the numeric minimizer.
#[test]
fn energy_offset_is_rigid() {
    let base = fig3(0.3, 0.2);
    let shifted = ModelParams::new(0.3, 0.75, 1.0, 1.0, 0.25, 0.3, 0.2).unwrap();
    let m = minimize_numeric(&shifted, 48, 50).unwrap();
    assert_eq!(m.label, PhaseLabel::Normal);
    assert!((m.energy_per_particle - 0.3).abs() < 1e-12);
    let c0 = meanfield::classify(&base, 1e-9);
    let c1 = meanfield::classify(&shifted, 1e-9);
    assert_eq!(c0.label, c1.label);
    assert!(
        (c1.winner.energy_per_particle - c0.winner.energy_per_particle - 0.3).abs() < 1e-12
    );

    // Blue region with offset: closed form and numeric route agree.
    let shifted = ModelParams::new(-0.7, 0.75, 1.0, 1.0, 0.25, 1.0, 0.2).unwrap();
    let m = minimize_numeric(&shifted, 48, 50).unwrap();
    assert_eq!(m.label, PhaseLabel::BlueSuperradiant);
    assert!((m.energy_per_particle - (-0.7 - 0.5625)).abs() < 1e-9);
}

/// Label agreement between the analytic classification and the numeric
/// minimizer across the degenerate (delta = 0) diagram, dark cells included.
#[test]
fn oracle_agreement_at_degenerate_gaps() {
    for j in 0..11 {
        for i in 0..11 {
            let p = ModelParams::new(
                0.0,
                0.0,
                1.0,
                1.0,
                0.25,
                i as f64 / 10.0,
                j as f64 / 10.0,
            )
            .unwrap();
            let cls = meanfield::classify(&p, 1e-9);
            let mut margin = f64::INFINITY;
            for c in &cls.candidates {
                if c.valid && c.label != cls.winner.label {
                    margin = margin.min(c.energy_per_particle - cls.winner.energy_per_particle);
                }
            }
            if margin <= 1e-6 {
                continue;
            }
            let m = minimize_numeric(&p, 48, 50).unwrap();
            assert_eq!(
                m.label, cls.label,
                "at (g1={}, g2={})",
                p.g1, p.g2
            );
            assert!((m.energy_per_particle - cls.winner.energy_per_particle).abs() < 1e-9);
        }
    }
}
