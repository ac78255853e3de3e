use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use helm_core::acceptance::{self, CriterionReport};
use helm_core::hexp::eval_ode;
use helm_core::outer::{outer_reconstruct, power_spectrum, ModulusData, DEFAULT_DELTA};
use helm_core::profile::read_profile;
use helm_core::scattering::{self, fmt_f64, linear_grid, sweep};
use helm_core::study::{converge, opuc_table, write_converge_csv, write_opuc_csv};
use helm_core::transfer::Transfer;
use helm_core::{Complex64, Error, Evaluator, ImpedanceProfile};
use serde::Serialize;

const EXIT_PARSE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "helm", version, about = "Wave propagation through impedance profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Evaluator for the transfer matrices
    #[arg(long, value_enum, default_value_t = MethodArg::Ode, global = true)]
    method: MethodArg,
    /// Truncation order of the series evaluator
    #[arg(long, default_value_t = 25, global = true)]
    order: usize,
    /// RK4 steps per segment (also the quadrature grid of the series evaluator)
    #[arg(long, default_value_t = 4096, global = true)]
    steps: usize,
    /// Number of Verblunsky coefficients for the polynomial evaluator
    #[arg(long, default_value_t = 100_000, global = true)]
    n: usize,
    /// Sup-norm tolerance of the Picard cross-check in `field --compare`
    #[arg(long, default_value_t = 1e-12, global = true)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Suppress the summary written to stderr
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Write the table here instead of stdout
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    Series,
    Ode,
    Opuc,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transmission and reflection coefficients on a uniform frequency grid
    Smatrix {
        profile: PathBuf,
        #[arg(long)]
        sigma_min: f64,
        #[arg(long)]
        sigma_max: f64,
        #[arg(long, default_value_t = 256)]
        n_points: usize,
    },
    /// The wave field u and its derivative at chosen points
    Field {
        profile: PathBuf,
        #[arg(long)]
        sigma: f64,
        /// Comma-separated sample points; defaults to cell midpoints
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        /// Number of midpoint samples when --x is absent
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1.0)]
        u0: f64,
        #[arg(long, default_value_t = 0.0)]
        du0: f64,
        /// Add columns from direct integration and Picard iteration
        #[arg(long)]
        compare: bool,
    },
    /// Error of each evaluator against a direct solve, per resolution
    Converge {
        profile: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "ode")]
        methods: Vec<MethodArg>,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
        resolutions: Vec<usize>,
    },
    /// Sech in the upper half plane rebuilt from |Sech| on the real line
    Outer {
        profile: PathBuf,
        /// Points such as `0.5+0.5i`; repeat the flag for more
        #[arg(long = "sigma", required = true)]
        sigmas: Vec<Complex64>,
        /// Half-width of the sampled real interval
        #[arg(long, default_value_t = 200.0)]
        s_max: f64,
        #[arg(long, default_value_t = 16_385)]
        grid: usize,
        /// Read |Sech| samples from this CSV instead of computing them
        #[arg(long)]
        modulus: Option<PathBuf>,
        /// Save the computed |Sech| samples as CSV
        #[arg(long)]
        save_modulus: Option<PathBuf>,
    },
    /// Polynomial approximation error as the number of coefficients grows
    Opuc {
        profile: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long = "n-list", value_delimiter = ',', default_value = "1000,10000,100000")]
        n_list: Vec<usize>,
    },
    /// Run the acceptance criteria
    Acceptance {
        /// Run only this criterion
        #[arg(long)]
        criterion: Option<usize>,
        /// Directory for the convergence tables
        #[arg(long)]
        tables: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("{0} acceptance criteria failed")]
    Failed(usize),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Core(Error::Parse(_) | Error::InvalidProfile(_) | Error::InvalidArgument(_)) => EXIT_PARSE,
            CliError::Usage(_) => EXIT_PARSE,
            CliError::Core(_) => EXIT_NUMERIC,
            CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("HELM_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: HELM_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(EXIT_PARSE);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn evaluator(opts: &Common, method: MethodArg, resolution: Option<usize>) -> Evaluator {
    match method {
        MethodArg::Series => Evaluator::Series {
            max_order: opts.order,
            grid_n: resolution.unwrap_or(opts.steps),
        },
        MethodArg::Ode => Evaluator::Ode {
            steps: resolution.unwrap_or(opts.steps),
        },
        MethodArg::Opuc => Evaluator::Opuc {
            n: resolution.unwrap_or(opts.n),
        },
    }
}

fn emit(opts: &Common, body: &str) -> CliResult<()> {
    match &opts.out {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(rows: &T) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("tables always serialize");
    s.push('\n');
    s
}

fn note(opts: &Common, msg: impl AsRef<str>) {
    if !opts.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

fn load(path: &Path) -> CliResult<ImpedanceProfile> {
    Ok(read_profile(path)?)
}

fn run(cli: Cli) -> CliResult<()> {
    let opts = cli.opts;
    match cli.command {
        Command::Smatrix {
            profile,
            sigma_min,
            sigma_max,
            n_points,
        } => cmd_smatrix(&opts, &profile, sigma_min, sigma_max, n_points),
        Command::Field {
            profile,
            sigma,
            x,
            points,
            u0,
            du0,
            compare,
        } => cmd_field(&opts, &profile, sigma, x, points, (u0, du0), compare),
        Command::Converge {
            profile,
            sigma,
            methods,
            resolutions,
        } => cmd_converge(&opts, &profile, sigma, &methods, &resolutions),
        Command::Outer {
            profile,
            sigmas,
            s_max,
            grid,
            modulus,
            save_modulus,
        } => cmd_outer(&opts, &profile, &sigmas, s_max, grid, modulus, save_modulus),
        Command::Opuc { profile, sigma, n_list } => cmd_opuc(&opts, &profile, sigma, &n_list),
        Command::Acceptance { criterion, tables } => cmd_acceptance(&opts, criterion, tables),
    }
}

fn cmd_smatrix(opts: &Common, path: &Path, lo: f64, hi: f64, n: usize) -> CliResult<()> {
    if n == 0 || !(hi >= lo) || (n > 1 && hi == lo) {
        return Err(CliError::Usage(format!(
            "need sigma-min < sigma-max and n-points >= 1, got [{lo}, {hi}] with {n}"
        )));
    }
    let profile = load(path)?;
    let grid = linear_grid(lo, hi, n);
    let entries = sweep(&profile, &grid, evaluator(opts, opts.method, None))?;
    let body = match opts.format {
        Format::Csv => {
            let mut buf = Vec::new();
            scattering::write_csv(&entries, &mut buf)?;
            String::from_utf8(buf).expect("ascii table")
        }
        Format::Json => {
            let mut s = scattering::to_json(&entries);
            s.push('\n');
            s
        }
    };
    emit(opts, &body)?;
    let worst = entries.iter().map(|e| e.unitarity_residual()).fold(0.0, f64::max);
    note(opts, format!("{} frequencies, max unitarity residual {worst:.3e}", entries.len()));
    Ok(())
}

#[derive(Serialize)]
struct FieldRow {
    x: f64,
    re_u: f64,
    im_u: f64,
    re_du: f64,
    im_du: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ode_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    picard_gap: Option<f64>,
}

fn gap(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> f64 {
    (a.0 - b.0).norm().max((a.1 - b.1).norm())
}

fn cmd_field(
    opts: &Common,
    path: &Path,
    sigma: f64,
    xs: Vec<f64>,
    points: usize,
    (u0, du0): (f64, f64),
    compare: bool,
) -> CliResult<()> {
    let profile = load(path)?;
    let xs = if xs.is_empty() {
        if points == 0 {
            return Err(CliError::Usage("--points must be positive".into()));
        }
        (0..points)
            .map(|k| profile.x0() + profile.length() * (k as f64 + 0.5) / points as f64)
            .collect()
    } else {
        xs
    };
    let (u0, du0) = (Complex64::new(u0, 0.0), Complex64::new(du0, 0.0));
    let tr = Transfer::new(&profile, evaluator(opts, opts.method, None));
    let (direct, picard) = if compare {
        (
            Some(helm_core::oracle::ode_solve(
                &profile,
                sigma,
                u0,
                du0,
                &xs,
                helm_core::oracle::DEFAULT_STEPS_PER_UNIT,
            )?),
            Some(helm_core::oracle::picard_field(&profile, sigma, u0, du0, &xs, opts.tol)?),
        )
    } else {
        (None, None)
    };
    let mut rows = Vec::with_capacity(xs.len());
    for (k, &x) in xs.iter().enumerate() {
        let v = tr.wavefield(sigma, u0, du0, x, None)?;
        rows.push(FieldRow {
            x,
            re_u: v.0.re,
            im_u: v.0.im,
            re_du: v.1.re,
            im_du: v.1.im,
            ode_gap: direct.as_ref().map(|d| gap(v, d[k])),
            picard_gap: picard.as_ref().map(|p| gap(v, p[k])),
        });
    }
    let body = match opts.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut s = String::from("x,re_u,im_u,re_du,im_du");
            if compare {
                s.push_str(",ode_gap,picard_gap");
            }
            s.push('\n');
            for r in &rows {
                let mut cols = vec![r.x, r.re_u, r.im_u, r.re_du, r.im_du];
                cols.extend(r.ode_gap);
                cols.extend(r.picard_gap);
                s.push_str(&cols.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
    };
    emit(opts, &body)?;
    if compare {
        let worst = rows
            .iter()
            .map(|r| r.ode_gap.unwrap_or(0.0).max(r.picard_gap.unwrap_or(0.0)))
            .fold(0.0, f64::max);
        note(opts, format!("{} points, max gap to the oracles {worst:.3e}", rows.len()));
    } else {
        note(opts, format!("{} points", rows.len()));
    }
    Ok(())
}

fn cmd_converge(opts: &Common, path: &Path, sigma: f64, methods: &[MethodArg], res: &[usize]) -> CliResult<()> {
    let profile = load(path)?;
    let evs: Vec<Evaluator> = methods
        .iter()
        .flat_map(|&m| res.iter().map(move |&r| (m, r)))
        .map(|(m, r)| evaluator(opts, m, Some(r)))
        .collect();
    let rows = converge(&profile, sigma, &evs)?;
    let body = match opts.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut buf = Vec::new();
            write_converge_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("ascii table")
        }
    };
    emit(opts, &body)?;
    note(opts, format!("{} rows", rows.len()));
    Ok(())
}

#[derive(Serialize)]
struct OuterRow {
    re_sigma: f64,
    im_sigma: f64,
    re_sech: f64,
    im_sech: f64,
    re_direct: f64,
    im_direct: f64,
    relative_error: f64,
}

fn cmd_outer(
    opts: &Common,
    path: &Path,
    sigmas: &[Complex64],
    s_max: f64,
    grid: usize,
    modulus: Option<PathBuf>,
    save: Option<PathBuf>,
) -> CliResult<()> {
    let profile = load(path)?;
    let data = match modulus {
        Some(m) => ModulusData::read_csv(io::BufReader::new(fs::File::open(&m)?))?,
        None => {
            if !(s_max > 0.0) || grid < 2 {
                return Err(CliError::Usage("need s-max > 0 and grid >= 2".into()));
            }
            power_spectrum(&profile, &linear_grid(-s_max, s_max, grid), evaluator(opts, opts.method, None))?
        }
    };
    if let Some(path) = save {
        data.write_csv(io::BufWriter::new(fs::File::create(path)?))?;
    }
    let pieces = profile.ac_pieces()?;
    let mut rows = Vec::with_capacity(sigmas.len());
    for &s in sigmas {
        let v = outer_reconstruct(&data, s, DEFAULT_DELTA)?;
        let d = eval_ode(pieces, s, opts.steps)?.hyperbolic()?.sech;
        rows.push(OuterRow {
            re_sigma: s.re,
            im_sigma: s.im,
            re_sech: v.re,
            im_sech: v.im,
            re_direct: d.re,
            im_direct: d.im,
            relative_error: (v - d).norm() / d.norm(),
        });
    }
    let body = match opts.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut s = String::from("re_sigma,im_sigma,re_sech,im_sech,re_direct,im_direct,relative_error\n");
            for r in &rows {
                let cols = [r.re_sigma, r.im_sigma, r.re_sech, r.im_sech, r.re_direct, r.im_direct, r.relative_error];
                s.push_str(&cols.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
    };
    emit(opts, &body)?;
    note(
        opts,
        format!(
            "{} samples of |Sech|, edge |log|Sech|| = {:.2e}",
            data.grid().len(),
            data.edge_log_magnitude()
        ),
    );
    Ok(())
}

fn cmd_opuc(opts: &Common, path: &Path, sigma: f64, ns: &[usize]) -> CliResult<()> {
    let profile = load(path)?;
    let rows = opuc_table(&profile, sigma, ns, opts.steps)?;
    let body = match opts.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut buf = Vec::new();
            write_opuc_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("ascii table")
        }
    };
    emit(opts, &body)?;
    note(opts, format!("{} rows against {} RK4 steps", rows.len(), opts.steps));
    Ok(())
}

#[derive(Serialize)]
struct ReportRow {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
    seconds: f64,
    budget_seconds: u64,
}

fn cmd_acceptance(opts: &Common, criterion: Option<usize>, tables: Option<PathBuf>) -> CliResult<()> {
    let reports: Vec<CriterionReport> = match criterion {
        Some(id) if (1..=acceptance::CRITERIA).contains(&id) => vec![acceptance::run(id)],
        Some(id) => {
            return Err(CliError::Usage(format!(
                "criterion must be in 1..={}, got {id}",
                acceptance::CRITERIA
            )))
        }
        None => acceptance::run_all(),
    };
    if let Some(dir) = &tables {
        fs::create_dir_all(dir)?;
        for (name, body) in reports.iter().flat_map(|r| &r.artifacts) {
            fs::write(dir.join(name), body)?;
        }
    }
    let body = match opts.format {
        Format::Json => json(
            &reports
                .iter()
                .map(|r| ReportRow {
                    id: r.id,
                    title: r.title,
                    passed: r.passed,
                    detail: r.detail.clone(),
                    seconds: r.elapsed.as_secs_f64(),
                    budget_seconds: r.budget.as_secs(),
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => reports.iter().map(|r| format!("{r}\n")).collect(),
    };
    emit(opts, &body)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    note(opts, format!("{} of {} passed", reports.len() - failed, reports.len()));
    if failed > 0 {
        return Err(CliError::Failed(failed));
    }
    Ok(())
}
