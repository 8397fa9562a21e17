//! Command-line front end.
//!
//! Exit status: 0 success, 2 input or domain error (including bad flags),
//! 3 numerical failure, 4 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::dielectric::{resistivity_spectrum, DielectricModel, ExtrapolationPolicy, OpticalTable};
use crate::drude_fit::{fit_drude, FitWindow, WeightPolicy};
use crate::error::{Error, Result};
use crate::experiments::{load_force_dataset, residuals, sensitivity_sweep, shift_separations, DatasetUnits};
use crate::lifshitz::{ForceJob, Geometry, LayerStack, QuadratureSpec, ThermalMode, ThermalSpec};
use crate::output::{fmt_num, write_csv, Provenance};
use crate::presets;
use crate::roughness::{self, averaged_force, RoughnessProfile};
use crate::units::{parse_length, parse_temperature};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CASIMIR_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "casimir", version, about = "Lifshitz forces between coated metal bodies")]
pub struct Cli {
    /// Flat `key = value` file with defaults for the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV file. Defaults to $CASIMIR_OUTPUT_DIR/<command>.csv, else stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Record the generation time in the output header.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit Drude parameters to an optical table.
    Fit(FitArgs),
    /// Tabulate ε(iζ) of a material.
    Epsilon(EpsilonArgs),
    /// Force (sphere–plate) or pressure (plate–plate) against separation.
    Force(ForceArgs),
    /// Residuals of a measured force curve against the model.
    Residual(ResidualArgs),
    /// Resistivity spectrum ρ(ω) of an optical table.
    CheckDrude(CheckDrudeArgs),
    /// Force change under relative variations of one material parameter.
    Sweep(SweepArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Epsilon(_) => "epsilon",
            Command::Force(_) => "force",
            Command::Residual(_) => "residual",
            Command::CheckDrude(_) => "check-drude",
            Command::Sweep(_) => "sweep",
        }
    }
}

const COMMAND_NAMES: &[&str] = &["fit", "epsilon", "force", "residual", "check-drude", "sweep"];

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct FitArgs {
    /// Optical table CSV (`omega_rad_s,eps_re,eps_im` or `lambda_um,n,k`).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "2um")]
    lambda_min: String,
    #[arg(long)]
    lambda_max: Option<String>,
    #[arg(long, value_enum, default_value_t = Weights::Uniform)]
    weights: Weights,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Weights {
    Uniform,
    Relerr,
}

impl From<Weights> for WeightPolicy {
    fn from(w: Weights) -> Self {
        match w {
            Weights::Uniform => WeightPolicy::Uniform,
            Weights::Relerr => WeightPolicy::RelErr,
        }
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct EpsilonArgs {
    /// Material name, `drude:...`, `plasma:...` or `table:<path>`.
    #[arg(long)]
    material: String,
    /// Tail policy for tables: drude, zero or power:<low>,<high>.
    #[arg(long, default_value = "drude")]
    extrapolation: String,
    #[arg(long, default_value_t = 1e13)]
    zeta_min: f64,
    #[arg(long, default_value_t = 1e17)]
    zeta_max: f64,
    /// Log-spaced points.
    #[arg(long, default_value_t = 100)]
    points: usize,
}

#[derive(Args, Debug)]
struct StackArgs {
    /// Named stack (paper-upper-limit, paper-upper-limit-au).
    #[arg(long, conflicts_with_all = ["material", "substrate", "top"])]
    preset: Option<String>,
    /// Homogeneous bodies of this material.
    #[arg(long, conflicts_with_all = ["substrate", "top"])]
    material: Option<String>,
    /// Film material on top of the substrate.
    #[arg(long, requires_all = ["thickness", "substrate"])]
    top: Option<String>,
    /// Film thickness.
    #[arg(long)]
    thickness: Option<String>,
    /// Substrate material.
    #[arg(long)]
    substrate: Option<String>,
    /// Tail policy for table materials.
    #[arg(long, default_value = "drude")]
    extrapolation: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum GeometryKind {
    SpherePlate,
    PlatePlate,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Mode {
    Sum,
    Integral,
}

#[derive(Args, Debug)]
struct JobArgs {
    #[command(flatten)]
    stack: StackArgs,
    #[arg(long, value_enum, default_value_t = GeometryKind::SpherePlate)]
    geometry: GeometryKind,
    /// Sphere radius.
    #[arg(long, default_value = "100um")]
    radius: String,
    #[arg(long, default_value = "300K")]
    temperature: String,
    /// Matsubara sum or zero-temperature integral.
    #[arg(long, value_enum, default_value_t = Mode::Sum)]
    mode: Mode,
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    #[arg(long, default_value_t = 50.0)]
    x_max_offset: f64,
    #[arg(long, default_value_t = 1e-10)]
    tail_tol: f64,
}

#[derive(Args, Debug)]
struct SeparationArgs {
    /// Explicit comma-separated separations; overrides the range.
    #[arg(long)]
    a: Option<String>,
    #[arg(long, default_value = "100nm")]
    a_min: String,
    #[arg(long, default_value = "900nm")]
    a_max: String,
    /// Evenly spaced points from a-min to a-max.
    #[arg(long, default_value_t = 9)]
    points: usize,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ForceArgs {
    #[command(flatten)]
    job: JobArgs,
    #[command(flatten)]
    separations: SeparationArgs,
    /// Height distribution CSV (`height_m,weight`) to average over.
    #[arg(long)]
    roughness: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ResidualArgs {
    /// Force dataset CSV (`a,force[,sigma]`).
    #[arg(long)]
    data: PathBuf,
    /// Units of the dataset columns, e.g. `nm,pN`; else read from the file.
    #[arg(long)]
    units: Option<String>,
    /// Shift added to every separation, e.g. 16nm.
    #[arg(long, default_value = "0")]
    shift: String,
    #[command(flatten)]
    job: JobArgs,
    #[arg(long)]
    roughness: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct CheckDrudeArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct SweepArgs {
    /// substrate.omega_p, substrate.omega_tau, substrate.rho0, top.omega_p,
    /// top.omega_tau, top.rho0 or top.thickness.
    #[arg(long)]
    parameter: String,
    /// Comma-separated relative changes.
    #[arg(long, default_value = "-0.1,0.1", allow_hyphen_values = true)]
    deltas: String,
    #[command(flatten)]
    job: JobArgs,
    #[command(flatten)]
    separations: SeparationArgs,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

/// Runs the command line with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse(&args) {
        Ok(cli) => cli,
        Err(ParseFailure::Clap(e)) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
        Err(ParseFailure::Casimir(e)) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

enum ParseFailure {
    Clap(clap::Error),
    Casimir(Error),
}

/// Parses argv; flags from `--config` are inserted right after the
/// subcommand so that explicit flags override them.
fn parse(args: &[OsString]) -> std::result::Result<Cli, ParseFailure> {
    // Required flags may live in the config file, so find it before clap.
    let mut config = None;
    for (i, a) in args.iter().enumerate().skip(1) {
        match a.to_str() {
            Some("--config") => config = args.get(i + 1).map(PathBuf::from),
            Some(s) if s.starts_with("--config=") => config = Some(PathBuf::from(&s["--config=".len()..])),
            Some("--") => break,
            _ => {}
        }
    }
    let Some(path) = config else {
        return Cli::try_parse_from(args).map_err(ParseFailure::Clap);
    };
    let extra = config_args(&path).map_err(ParseFailure::Casimir)?;
    let pos = args
        .iter()
        .position(|a| a.to_str().is_some_and(|s| COMMAND_NAMES.contains(&s)))
        .map(|p| p + 1)
        .unwrap_or(args.len());
    let mut merged: Vec<OsString> = args[..pos].to_vec();
    merged.extend(extra.into_iter().map(OsString::from));
    merged.extend_from_slice(&args[pos..]);
    Cli::try_parse_from(&merged).map_err(ParseFailure::Clap)
}

/// `key = value` lines → `--key=value` flags. `true` / `false` switch
/// boolean flags.
fn config_args(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Input(format!("{}:{}: expected 'key = value'", path.display(), i + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if key == "config" {
            return Err(Error::Input(format!("{}:{}: nested config files are not supported", path.display(), i + 1)));
        }
        match v.trim() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => out.push(format!("--{key}={v}")),
        }
    }
    Ok(out)
}

struct Emitter<'a> {
    cli: &'a Cli,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Emitter<'_> {
    fn emit(&mut self, mut provenance: Provenance, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if self.cli.timestamp {
            provenance.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        }
        let target = match (&self.cli.output, std::env::var_os(OUTPUT_DIR_ENV)) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(dir)) if !dir.is_empty() => {
                Some(Path::new(&dir).join(format!("{}.csv", self.cli.command.name())))
            }
            _ => None,
        };
        match target {
            Some(path) => {
                let file = std::fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                write_csv(std::io::BufWriter::new(file), &provenance, columns, rows)?;
                writeln!(self.err, "wrote {}", path.display())?;
            }
            None => write_csv(&mut *self.out, &provenance, columns, rows)?,
        }
        Ok(())
    }

    fn warn(&mut self, msg: &str) {
        let _ = writeln!(self.err, "warning: {msg}");
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut em = Emitter { cli, out, err };
    match &cli.command {
        Command::Fit(a) => cmd_fit(a, &mut em),
        Command::Epsilon(a) => cmd_epsilon(a, &mut em),
        Command::Force(a) => cmd_force(a, &mut em),
        Command::Residual(a) => cmd_residual(a, &mut em),
        Command::CheckDrude(a) => cmd_check_drude(a, &mut em),
        Command::Sweep(a) => cmd_sweep(a, &mut em),
    }
}

fn cmd_fit(a: &FitArgs, em: &mut Emitter<'_>) -> Result<()> {
    let table = OpticalTable::from_csv_path(&a.input)?;
    let window = FitWindow::new(
        parse_length(&a.lambda_min)?,
        a.lambda_max.as_deref().map(parse_length).transpose()?.unwrap_or(f64::INFINITY),
    )?;
    let weights: WeightPolicy = a.weights.into();
    let r = fit_drude(&table, window, weights)?;
    let _ = writeln!(
        em.err,
        "omega_p = {:e} ± {:e} rad/s, omega_tau = {:e} ± {:e} rad/s, rho0 = {:.4} uOhm*cm ({} points, weights {}, rms residual {:e})",
        r.params.omega_p(),
        r.sigma_omega_p,
        r.params.omega_tau(),
        r.sigma_omega_tau,
        r.params.resistivity() / 1e-8,
        r.n_points_used,
        r.weights,
        r.residual_norm
    );
    let mut p = Provenance::new("fit");
    p.setting("input", a.input.display())
        .setting("lambda_min_m", fmt_num(window.lambda_min))
        .setting("lambda_max_m", fmt_num(window.lambda_max))
        .setting("weights", weights);
    p.mode = Some("levenberg-marquardt".into());
    p.notes.push(format!("sigmas assume the '{weights}' residual weighting"));
    em.emit(
        p,
        &[
            "omega_p_rad_s",
            "sigma_omega_p_rad_s",
            "omega_tau_rad_s",
            "sigma_omega_tau_rad_s",
            "rho0_ohm_m",
            "residual_norm",
            "n_points",
            "iterations",
            "weights",
        ],
        &[vec![
            fmt_num(r.params.omega_p()),
            fmt_num(r.sigma_omega_p),
            fmt_num(r.params.omega_tau()),
            fmt_num(r.sigma_omega_tau),
            fmt_num(r.params.resistivity()),
            fmt_num(r.residual_norm),
            r.n_points_used.to_string(),
            r.iterations.to_string(),
            weights.to_string(),
        ]],
    )
}

fn log_space(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
        return Err(Error::Domain(format!("invalid range [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo * (step * i as f64).exp() })
        .collect())
}

fn cmd_epsilon(a: &EpsilonArgs, em: &mut Emitter<'_>) -> Result<()> {
    let policy: ExtrapolationPolicy = a.extrapolation.parse()?;
    let model = presets::parse_material(&a.material, policy)?;
    let zetas = log_space(a.zeta_min, a.zeta_max, a.points)?;
    let eps = zetas
        .par_iter()
        .map(|&z| model.eps_imag_axis(z))
        .collect::<Result<Vec<_>>>()?;
    let mut p = Provenance::new("epsilon");
    p.setting("material", &model)
        .setting("zeta_min", fmt_num(a.zeta_min))
        .setting("zeta_max", fmt_num(a.zeta_max))
        .setting("points", a.points);
    if let DielectricModel::Tabulated(t) = &model {
        p.mode = Some("kramers-kronig".into());
        p.setting("extrapolation", t.policy());
    } else {
        p.mode = Some("closed-form".into());
    }
    let rows: Vec<_> = zetas.iter().zip(eps).map(|(z, e)| vec![fmt_num(*z), fmt_num(e)]).collect();
    em.emit(p, &["zeta_rad_s", "eps"], &rows)
}

fn build_stack(s: &StackArgs) -> Result<LayerStack> {
    let policy: ExtrapolationPolicy = s.extrapolation.parse()?;
    let material = |spec: &str| presets::parse_material(spec, policy);
    match (&s.preset, &s.material, &s.top, &s.substrate) {
        (Some(name), ..) => presets::stack(name),
        (None, Some(m), None, None) => Ok(LayerStack::homogeneous(material(m)?)),
        (None, None, Some(top), Some(sub)) => {
            let h = parse_length(s.thickness.as_deref().unwrap_or_default())?;
            LayerStack::layered(material(top)?, h, material(sub)?)
        }
        (None, None, None, Some(sub)) => Ok(LayerStack::homogeneous(material(sub)?)),
        _ => Err(Error::Input(
            "give one of --preset, --material, or --substrate [--top --thickness]".into(),
        )),
    }
}

struct Job {
    job: ForceJob,
    quantity: &'static str,
}

fn build_job(j: &JobArgs) -> Result<Job> {
    let stack = build_stack(&j.stack)?;
    let thermal = match j.mode {
        Mode::Sum => ThermalSpec::sum(parse_temperature(&j.temperature)?),
        Mode::Integral => ThermalSpec::zero_temperature(),
    };
    let quad = QuadratureSpec {
        rel_tol: j.rel_tol,
        x_max_offset: j.x_max_offset,
        matsubara_tail_tol: j.tail_tol,
    };
    let (radius, quantity) = match j.geometry {
        GeometryKind::SpherePlate => (Some(parse_length(&j.radius)?), "force_N"),
        GeometryKind::PlatePlate => (None, "pressure_Pa"),
    };
    Ok(Job {
        job: ForceJob {
            stack,
            radius,
            thermal,
            quad,
        },
        quantity,
    })
}

fn job_provenance(command: &str, job: &ForceJob) -> Provenance {
    let mut p = Provenance::new(command);
    p.setting("stack", &job.stack);
    match job.radius {
        Some(r) => p.setting("geometry", format!("sphere-plate(R={})", fmt_num(r))),
        None => p.setting("geometry", "plate-plate"),
    };
    p.setting("thermal", job.thermal);
    p.mode = Some(match job.thermal.mode {
        ThermalMode::MatsubaraSum => format!("matsubara-sum(T={} K)", job.thermal.temperature),
        ThermalMode::ZeroTemperatureIntegral => "zero-temperature-integral".into(),
    });
    let q = job.quad;
    p.tolerances = Some(format!(
        "rel_tol={},x_max_offset={},matsubara_tail_tol={}",
        fmt_num(q.rel_tol),
        fmt_num(q.x_max_offset),
        fmt_num(q.matsubara_tail_tol)
    ));
    p
}

fn separations(s: &SeparationArgs) -> Result<Vec<f64>> {
    let list = match &s.a {
        Some(list) => list.split(',').map(parse_length).collect::<Result<Vec<_>>>()?,
        None => {
            let (lo, hi) = (parse_length(&s.a_min)?, parse_length(&s.a_max)?);
            if !(lo > 0.0 && hi >= lo) || s.points == 0 {
                return Err(Error::Domain(format!("invalid separation range [{lo}, {hi}]")));
            }
            if s.points == 1 {
                vec![lo]
            } else {
                let n = s.points - 1;
                (0..=n)
                    .map(|i| (lo * (n - i) as f64 + hi * i as f64) / n as f64)
                    .collect()
            }
        }
    };
    if list.is_empty() || list.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::Domain("separations must be > 0".into()));
    }
    Ok(list)
}

/// Validates every separation; sphere–plate warnings are summarised.
fn geometry_warnings(job: &ForceJob, seps: &[f64]) -> Result<Vec<String>> {
    let mut flagged = Vec::new();
    for &a in seps {
        let g = match job.radius {
            Some(radius) => Geometry::SpherePlate { a, radius },
            None => Geometry::PlatePlate { a },
        };
        if !g.validate()?.is_empty() {
            flagged.push(a);
        }
    }
    Ok(match (job.radius, flagged.iter().copied().reduce(f64::max)) {
        (Some(r), Some(a_max)) => vec![format!(
            "R/a below {} at {} of {} separations (smallest R/a = {:.0}); proximity-force corrections may matter",
            Geometry::WARN_RADIUS_RATIO,
            flagged.len(),
            seps.len(),
            r / a_max
        )],
        _ => Vec::new(),
    })
}

fn load_roughness(path: &Option<PathBuf>, p: &mut Provenance) -> Result<Option<RoughnessProfile>> {
    let Some(path) = path else { return Ok(None) };
    let profile = RoughnessProfile::from_csv_path(path)?;
    p.setting("roughness", path.display());
    p.notes.push(format!("roughness: {}", roughness::MODEL_LABEL));
    Ok(Some(profile))
}

fn cmd_force(a: &ForceArgs, em: &mut Emitter<'_>) -> Result<()> {
    let Job { job, quantity } = build_job(&a.job)?;
    let seps = separations(&a.separations)?;
    let mut p = job_provenance("force", &job);
    p.setting("separations_m", seps.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(" "));
    let profile = load_roughness(&a.roughness, &mut p)?;
    for w in geometry_warnings(&job, &seps)? {
        em.warn(&w);
        p.notes.push(w);
    }
    let (columns, rows): (Vec<&str>, Vec<Vec<String>>) = match &profile {
        None => {
            let results = seps
                .par_iter()
                .map(|&s| job.evaluate(s).map_err(|e| e.context(format!("a = {s:e} m"))))
                .collect::<Result<Vec<_>>>()?;
            let rows = seps
                .iter()
                .zip(results)
                .map(|(s, r)| {
                    vec![
                        fmt_num(*s),
                        fmt_num(r.value),
                        r.n_terms_used.to_string(),
                        fmt_num(r.tail_estimate),
                    ]
                })
                .collect();
            (vec!["a_m", quantity, "n_terms", "tail_estimate"], rows)
        }
        Some(profile) => {
            let values = seps
                .par_iter()
                .map(|&s| averaged_force(|x| job.value(x), profile, s).map_err(|e| e.context(format!("a = {s:e} m"))))
                .collect::<Result<Vec<_>>>()?;
            let rows = seps.iter().zip(values).map(|(s, v)| vec![fmt_num(*s), fmt_num(v)]).collect();
            (vec!["a_m", quantity], rows)
        }
    };
    em.emit(p, &columns, &rows)
}

fn cmd_residual(a: &ResidualArgs, em: &mut Emitter<'_>) -> Result<()> {
    let Job { job, .. } = build_job(&a.job)?;
    let units: Option<DatasetUnits> = a.units.as_deref().map(str::parse).transpose()?;
    let raw = load_force_dataset(&a.data, units)?;
    let shift = parse_length(&a.shift)?;
    let ds = shift_separations(&raw, shift);
    let mut p = job_provenance("residual", &job);
    p.setting("data", a.data.display())
        .setting("shift_applied_m", fmt_num(ds.shift_applied()));
    let profile = load_roughness(&a.roughness, &mut p)?;
    for w in geometry_warnings(&job, &ds.separations())? {
        em.warn(&w);
        p.notes.push(w);
    }
    let table = match &profile {
        None => residuals(&ds, |x| job.value(x))?,
        Some(profile) => residuals(&ds, |x| averaged_force(|y| job.value(y), profile, x))?,
    };
    em.emit(p, &table.columns(), &table.csv_rows())
}

fn cmd_check_drude(a: &CheckDrudeArgs, em: &mut Emitter<'_>) -> Result<()> {
    let table = OpticalTable::from_csv_path(&a.input)?;
    let spectrum = resistivity_spectrum(&table.to_pairs())?;
    let defined: Vec<f64> = spectrum.iter().filter_map(|r| r.rho).collect();
    let mut p = Provenance::new("check-drude");
    p.setting("input", a.input.display());
    p.mode = Some("resistivity-spectrum".into());
    if let (Some(lo), Some(hi)) = (
        defined.iter().copied().reduce(f64::min),
        defined.iter().copied().reduce(f64::max),
    ) {
        p.notes.push(format!("rho range {} .. {} ohm*m", fmt_num(lo), fmt_num(hi)));
    }
    let rows: Vec<_> = spectrum
        .iter()
        .map(|r| vec![fmt_num(r.omega), r.rho.map(fmt_num).unwrap_or_default()])
        .collect();
    em.emit(p, &["omega_rad_s", "rho_ohm_m"], &rows)
}

fn cmd_sweep(a: &SweepArgs, em: &mut Emitter<'_>) -> Result<()> {
    let Job { job, .. } = build_job(&a.job)?;
    let seps = separations(&a.separations)?;
    let deltas = a
        .deltas
        .split(',')
        .map(|d| d.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad delta '{d}'"))))
        .collect::<Result<Vec<_>>>()?;
    let mut p = job_provenance("sweep", &job);
    p.setting("parameter", &a.parameter)
        .setting("deltas", deltas.iter().map(|d| fmt_num(*d)).collect::<Vec<_>>().join(" "))
        .setting("separations_m", seps.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(" "));
    for w in geometry_warnings(&job, &seps)? {
        em.warn(&w);
        p.notes.push(w);
    }
    let points = sensitivity_sweep(&job, &a.parameter, &deltas, &seps)?;
    let rows: Vec<_> = points
        .iter()
        .map(|s| {
            vec![
                fmt_num(s.delta),
                fmt_num(s.a),
                fmt_num(s.f_base),
                fmt_num(s.f_perturbed),
                fmt_num(s.delta_f),
            ]
        })
        .collect();
    em.emit(p, &["delta", "a_m", "f_base", "f_perturbed", "delta_f"], &rows)
}
