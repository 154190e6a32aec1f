//! Command-line front end for the two-color Dicke model solver.
//!
//! Exit codes: 0 success, 2 usage error, 3 validation/domain error,
//! 4 numerical non-convergence.

mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lambda_dicke::darkstate::{self, DarkStateError};
use lambda_dicke::ed::{self, EdError};
use lambda_dicke::meanfield::{self, CandidateSolution, PhaseLabel};
use lambda_dicke::model::{ModelParams, ValidationError};
use lambda_dicke::phasemap::{self, PhaseMapError};
use lambda_dicke::spectra::{self, ExcitationSpectrum};

use output::{Field, Format, OutputSpec, Table};
use params::ParamArgs;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(ValidationError),
    Domain(String),
    NonConvergence(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) | CliError::Domain(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(e) => write!(f, "invalid parameters: {e}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::NonConvergence(m) => write!(f, "did not converge: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<DarkStateError> for CliError {
    fn from(e: DarkStateError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<PhaseMapError> for CliError {
    fn from(e: PhaseMapError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<EdError> for CliError {
    fn from(e: EdError) -> Self {
        match e {
            EdError::NoConvergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args, Clone)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Decimal digits for numeric fields.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(6..=17))]
    precision: u32,
}

impl OutputArgs {
    fn spec(&self) -> OutputSpec {
        OutputSpec {
            format: match self.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            path: self.out.clone(),
            precision: self.precision as usize,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lambda-dicke",
    version,
    about = "Ground-state phases, excitation spectra and finite-N diagnostics of the two-color Dicke model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical coupling strengths and the triple point.
    Critical {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Phase assignment and all candidate solutions at one coupling point.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Energy degeneracy tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Phase diagram sweep over a coupling grid (g2-major row order).
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 0.0)]
        g1_min: f64,
        #[arg(long, default_value_t = 1.0)]
        g1_max: f64,
        /// Samples along g1 (1 = cut at g1_min).
        #[arg(long, default_value_t = 101)]
        n1: usize,
        #[arg(long, default_value_t = 0.0)]
        g2_min: f64,
        #[arg(long, default_value_t = 1.0)]
        g2_max: f64,
        /// Samples along g2 (1 = cut at g2_min).
        #[arg(long, default_value_t = 101)]
        n2: usize,
    },
    /// Reduced energy surfaces of both reference frames on an n x n grid
    /// over the unit disk (off-disk cells are empty fields).
    Surface {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 101)]
        n: usize,
    },
    /// Closed-form excitation spectrum at one coupling point.
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also list the spectra of the other phases where defined.
        #[arg(long)]
        all_phases: bool,
    },
    /// Dark-state manifold scan (requires delta = 0).
    Dark {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 101)]
        n_points: usize,
    },
    /// Blue/red phase boundary curve g1(g2) for g2 >= g2c2.
    Boundary {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Lower end of the g2 range (defaults to g2c2).
        #[arg(long)]
        g2_min: Option<f64>,
        /// Upper end of the g2 range (defaults to 3 * g2c2).
        #[arg(long)]
        g2_max: Option<f64>,
        #[arg(long, default_value_t = 101)]
        n: usize,
    },
    /// Finite-N exact diagonalization; one CSV row per particle number.
    Ed {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Particle numbers, comma separated (e.g. --n 2,4,6,8).
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Photon cutoff of mode 1 (default: mean-field guide).
        #[arg(long)]
        cutoff1: Option<usize>,
        /// Photon cutoff of mode 2 (default: mean-field guide).
        #[arg(long)]
        cutoff2: Option<usize>,
        /// Restrict to one parity sector, e.g. --sector 0,0.
        #[arg(long, value_delimiter = ',')]
        sector: Option<Vec<u8>>,
        /// Skip the doubled-cutoff convergence check.
        #[arg(long)]
        no_verify: bool,
        /// Basis dimension cap.
        #[arg(long, default_value_t = ed::DEFAULT_DIM_CAP)]
        max_dim: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lambda-dicke: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Critical { params, output } => cmd_critical(&params.resolve()?, &output.spec()),
        Command::Classify {
            params,
            output,
            tol,
        } => cmd_classify(&params.resolve()?, tol, &output.spec()),
        Command::Sweep {
            params,
            output,
            g1_min,
            g1_max,
            n1,
            g2_min,
            g2_max,
            n2,
        } => cmd_sweep(
            &params.resolve()?,
            (g1_min, g1_max),
            (g2_min, g2_max),
            n1,
            n2,
            &output.spec(),
        ),
        Command::Surface { params, output, n } => cmd_surface(&params.resolve()?, n, &output.spec()),
        Command::Spectrum {
            params,
            output,
            all_phases,
        } => cmd_spectrum(&params.resolve()?, all_phases, &output.spec()),
        Command::Dark {
            params,
            output,
            n_points,
        } => cmd_dark(&params.resolve()?, n_points, &output.spec()),
        Command::Boundary {
            params,
            output,
            g2_min,
            g2_max,
            n,
        } => cmd_boundary(&params.resolve()?, g2_min, g2_max, n, &output.spec()),
        Command::Ed {
            params,
            output,
            n,
            cutoff1,
            cutoff2,
            sector,
            no_verify,
            max_dim,
        } => cmd_ed(
            &params.resolve()?,
            &n,
            cutoff1,
            cutoff2,
            sector,
            no_verify,
            max_dim,
            &output.spec(),
        ),
    }
}

fn cmd_critical(params: &ModelParams, spec: &OutputSpec) -> Result<(), CliError> {
    let crit = params.critical_couplings();
    let (t1, t2) = phasemap::triple_point(params);
    let mut table = Table::new(vec!["g1c", "g2c1", "g2c2", "g2c", "triple_g1", "triple_g2"]);
    table.push(vec![
        Field::Num(crit.g1c),
        Field::Num(crit.g2c1),
        Field::Num(crit.g2c2),
        Field::Num(crit.g2c),
        Field::Num(t1),
        Field::Num(t2),
    ]);
    table.write(spec)?;
    Ok(())
}

fn spectrum_fields(s: Option<&ExcitationSpectrum>) -> [Field; 4] {
    match s {
        Some(s) => [
            Field::opt_num(s.eps[0].real()),
            Field::opt_num(s.eps[1].real()),
            Field::opt_num(s.eps[2].real()),
            Field::opt_num(s.eps[3].real()),
        ],
        None => [Field::Empty, Field::Empty, Field::Empty, Field::Empty],
    }
}

fn candidate_row(
    c: &CandidateSolution,
    winner: bool,
    degenerate: &str,
    params: &ModelParams,
) -> Vec<Field> {
    let (n1, n2, n3) = c.point.occupations();
    let spectrum = if c.valid {
        spectra::spectrum_closed_form(c.label, params).ok()
    } else {
        None
    };
    let eps = spectrum_fields(spectrum.as_ref());
    vec![
        Field::Str(c.label.as_str().to_string()),
        Field::Bool(c.valid),
        Field::Bool(winner),
        Field::opt_num(Some(c.energy_per_particle)),
        Field::opt_num(Some(c.energy_per_particle - params.e1)),
        Field::Str(c.stability.as_str().to_string()),
        Field::Int(match c.point.frame {
            meanfield::Frame::M1 => 1,
            meanfield::Frame::M2 => 2,
        }),
        Field::Num(c.point.psi_lo),
        Field::Num(c.point.psi3),
        Field::Num(c.point.psi_m()),
        Field::Num(c.point.phi1),
        Field::Num(c.point.phi2),
        Field::Num(n1),
        Field::Num(n2),
        Field::Num(n3),
        eps[0].clone(),
        eps[1].clone(),
        eps[2].clone(),
        eps[3].clone(),
        Field::Str(degenerate.to_string()),
    ]
}

fn cmd_classify(params: &ModelParams, tol: f64, spec: &OutputSpec) -> Result<(), CliError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let cls = meanfield::classify(params, tol);
    let degenerate = cls
        .degenerate
        .iter()
        .map(|l| l.as_str())
        .collect::<Vec<_>>()
        .join(";");
    let mut table = Table::new(vec![
        "label",
        "valid",
        "is_winner",
        "energy",
        "energy_rel",
        "stability",
        "frame",
        "psi_lo",
        "psi3",
        "psi_m",
        "phi1",
        "phi2",
        "n1",
        "n2",
        "n3",
        "eps_xm",
        "eps_xp",
        "eps_xpm",
        "eps_xpp",
        "degenerate",
    ]);
    // Winner first, then all candidates in fixed order.
    table.push(candidate_row(&cls.winner, true, &degenerate, params));
    for c in &cls.candidates {
        table.push(candidate_row(c, false, "", params));
    }
    table.write(spec)?;
    Ok(())
}

fn cmd_sweep(
    params: &ModelParams,
    g1_range: (f64, f64),
    g2_range: (f64, f64),
    n1: usize,
    n2: usize,
    spec: &OutputSpec,
) -> Result<(), CliError> {
    if n1 == 0 || n2 == 0 {
        return Err(CliError::Usage("--n1/--n2 must be at least 1".into()));
    }
    let cells = phasemap::sweep_grid(
        params,
        g1_range,
        g2_range,
        n1,
        n2,
        phasemap::SweepOptions::default(),
    );
    let mut table = Table::new(vec![
        "g1", "g2", "phase", "energy", "psi2sq", "psi3sq", "phi1sq", "phi2sq", "eps_xm", "eps_xp",
        "eps_xpm", "eps_xpp",
    ]);
    for cell in &cells {
        let eps = spectrum_fields(cell.spectrum.as_ref());
        table.push(vec![
            Field::Num(cell.g1),
            Field::Num(cell.g2),
            Field::Str(cell.phase.as_str().to_string()),
            Field::Num(cell.energy),
            Field::Num(cell.psi2_sq),
            Field::Num(cell.psi3_sq),
            Field::Num(cell.phi1_sq),
            Field::Num(cell.phi2_sq),
            eps[0].clone(),
            eps[1].clone(),
            eps[2].clone(),
            eps[3].clone(),
        ]);
    }
    table.write(spec)?;
    Ok(())
}

fn cmd_surface(params: &ModelParams, n: usize, spec: &OutputSpec) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let mut table = Table::new(vec!["psi2", "psi3", "h0_m1", "h0_m2", "dark_stable"]);
    for j in 0..n {
        let b = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
        for i in 0..n {
            let a = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let on_disk = a * a + b * b <= 1.0;
            let h_m1 = on_disk.then(|| meanfield::h0_reduced(a, b, params).unwrap());
            let h_m2 = on_disk.then(|| meanfield::h0_reduced_m2(a, b, params).unwrap());
            let dark = if params.delta == 0.0 && on_disk {
                let st = darkstate::dark_stability(a.abs(), params)?;
                Some(st.stable)
            } else {
                None
            };
            table.push(vec![
                Field::Num(a),
                Field::Num(b),
                Field::opt_num(h_m1),
                Field::opt_num(h_m2),
                dark.map(Field::Bool).unwrap_or(Field::Empty),
            ]);
        }
    }
    table.write(spec)?;
    Ok(())
}

fn cmd_spectrum(params: &ModelParams, all_phases: bool, spec: &OutputSpec) -> Result<(), CliError> {
    let cls = meanfield::classify(params, 1e-9);
    let phases: Vec<PhaseLabel> = if all_phases {
        let mut p = vec![
            PhaseLabel::Normal,
            PhaseLabel::BlueSuperradiant,
            PhaseLabel::RedSuperradiant,
        ];
        if params.delta == 0.0 {
            p.push(PhaseLabel::Dark);
        }
        p
    } else {
        vec![cls.label]
    };
    let mut table = Table::new(vec![
        "g1",
        "g2",
        "phase",
        "eps_xm",
        "eps_xp",
        "eps_xpm",
        "eps_xpp",
        "x",
        "eta",
        "bar_delta",
        "bar_delta_small",
        "omega1m",
        "omega2m",
        "lambda",
        "gtilde_x",
        "gtilde_xp",
    ]);
    let mut any = false;
    for phase in phases {
        let s = match spectra::spectrum_closed_form(phase, params) {
            Ok(s) => s,
            Err(
                spectra::SpectraError::PhaseMismatch { .. }
                | spectra::SpectraError::DegenerateBranch,
            ) if all_phases => continue,
            Err(e) => return Err(CliError::Domain(e.to_string())),
        };
        any = true;
        let eps = spectrum_fields(Some(&s));
        table.push(vec![
            Field::Num(params.g1),
            Field::Num(params.g2),
            Field::Str(phase.as_str().to_string()),
            eps[0].clone(),
            eps[1].clone(),
            eps[2].clone(),
            eps[3].clone(),
            Field::Int(s.branch.x as i64),
            Field::Num(s.branch.eta),
            Field::Num(s.branch.bar_delta),
            Field::Num(s.branch.bar_delta_small),
            Field::Num(s.branch.omega1m),
            Field::Num(s.branch.omega2m),
            Field::Num(s.branch.lambda),
            Field::Num(s.branch.gtilde_x),
            Field::Num(s.branch.gtilde_xp),
        ]);
    }
    if !any {
        return Err(CliError::Domain(
            "no closed-form spectrum at these couplings".into(),
        ));
    }
    table.write(spec)?;
    Ok(())
}

fn cmd_dark(params: &ModelParams, n_points: usize, spec: &OutputSpec) -> Result<(), CliError> {
    let rows = darkstate::dark_manifold_scan(params, n_points)?;
    let mut table = Table::new(vec![
        "psi2",
        "psi1",
        "coherence",
        "stable",
        "marginal",
        "psi2_max",
        "psi2_min",
        "eps_0",
        "eps_1",
        "eps_2",
        "eps_3",
        "unstable_modes",
    ]);
    for r in &rows {
        let unstable = r.spectrum.iter().filter(|e| !e.is_real()).count();
        table.push(vec![
            Field::Num(r.psi2),
            Field::Num(r.psi1),
            Field::Num(r.coherence_density),
            Field::Bool(r.stable),
            Field::Bool(r.marginal),
            Field::opt_num(r.psi2_max),
            Field::opt_num(r.psi2_min),
            Field::opt_num(r.spectrum[0].real()),
            Field::opt_num(r.spectrum[1].real()),
            Field::opt_num(r.spectrum[2].real()),
            Field::opt_num(r.spectrum[3].real()),
            Field::Int(unstable as i64),
        ]);
    }
    table.write(spec)?;
    Ok(())
}

fn cmd_boundary(
    params: &ModelParams,
    g2_min: Option<f64>,
    g2_max: Option<f64>,
    n: usize,
    spec: &OutputSpec,
) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let crit = params.critical_couplings();
    let lo = g2_min.unwrap_or(crit.g2c2);
    let hi = g2_max.unwrap_or(3.0 * crit.g2c2);
    if hi < lo {
        return Err(CliError::Usage("--g2-max must be >= --g2-min".into()));
    }
    let mut table = Table::new(vec!["g2", "g1"]);
    for i in 0..n {
        let g2 = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let g1 = phasemap::boundary_blue_red(g2, params)?;
        table.push(vec![Field::Num(g2), Field::Num(g1)]);
    }
    table.write(spec)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_ed(
    params: &ModelParams,
    ns: &[usize],
    cutoff1: Option<usize>,
    cutoff2: Option<usize>,
    sector: Option<Vec<u8>>,
    no_verify: bool,
    max_dim: usize,
    spec: &OutputSpec,
) -> Result<(), CliError> {
    let sector = match sector {
        Some(v) => {
            if v.len() != 2 || v[0] > 1 || v[1] > 1 {
                return Err(CliError::Usage("--sector takes two values in {0, 1}".into()));
            }
            Some((v[0], v[1]))
        }
        None => None,
    };
    let mut table = Table::new(vec![
        "n",
        "cutoff1",
        "cutoff2",
        "ground_energy",
        "energy_per_particle",
        "energy_per_particle_rel",
        "occ1",
        "occ2",
        "occ3",
        "photon1",
        "photon2",
        "parity1",
        "parity2",
        "coherence12",
        "gap",
        "cutoff_converged",
    ]);
    for &n in ns {
        let mut config = ed::EDConfig::with_default_cutoffs(n, *params);
        if let Some(c1) = cutoff1 {
            config.cutoff1 = c1;
        }
        if let Some(c2) = cutoff2 {
            config.cutoff2 = c2;
        }
        config.parity_sector = sector;
        config.max_dim = max_dim;
        let r = ed::ground_state_with(&config, !no_verify)?;
        table.push(vec![
            Field::Int(n as i64),
            Field::Int(config.cutoff1 as i64),
            Field::Int(config.cutoff2 as i64),
            Field::Num(r.ground_energy),
            Field::Num(r.energy_per_particle),
            Field::Num(r.energy_per_particle - params.e1),
            Field::Num(r.occupations[0]),
            Field::Num(r.occupations[1]),
            Field::Num(r.occupations[2]),
            Field::Num(r.photon_densities[0]),
            Field::Num(r.photon_densities[1]),
            Field::Num(r.parities[0]),
            Field::Num(r.parities[1]),
            Field::Num(r.coherence12),
            Field::Num(r.gap),
            Field::Bool(r.cutoff_converged),
        ]);
    }
    table.write(spec)?;
    Ok(())
}
