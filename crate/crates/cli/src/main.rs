use clap::{Args, Parser, Subcommand, ValueEnum};
use relstab_cli::error::{CliError, EXIT_CONSISTENCY, EXIT_INPUT, EXIT_OK};
use relstab_cli::presets::listing;
use relstab_cli::request::{AnalysisRequest, CaseSpec, DynamicsOptions, PotentialRequest, Section};
use relstab_cli::simulate::{simulate, to_json_lines, SimulationOptions};
use relstab_cli::table::{render_report, render_sweep};
use relstab_cli::{run_analysis, run_analysis_timed, run_selfcheck, run_sweep, Status};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Linear stability of planar N-body relative equilibria.
#[derive(Parser)]
#[command(name = "relstab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse one case and emit a stability report.
    Analyze(AnalyzeArgs),
    /// Repeat an analysis over a grid of homogeneity exponents.
    Sweep(SweepArgs),
    /// Integrate the rotating-frame equations and dump the trajectory.
    Simulate(SimulateArgs),
    /// List the preset cases.
    Presets(OutputArgs),
    /// Run the invariant battery.
    Selfcheck(SelfcheckArgs),
}

#[derive(Clone, Copy, ValueEnum, Default, PartialEq)]
enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file. Defaults to a file in $RELSTAB_OUT_DIR if set, stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "RELSTAB_OUT_DIR", hide_env_values = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CaseArgs {
    /// Preset name, `polygon(n)` or `polygon(n, potential)`.
    #[arg(long)]
    case: Option<String>,
    /// Homogeneity exponent (shorthand for `--potential <alpha>`).
    #[arg(long, conflicts_with = "potential", allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// `newtonian`, `manev`, `schwarzschild`, an exponent, or `c:a,c:a,...`.
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    /// Request file (JSON); flags given alongside override its fields.
    #[arg(long)]
    request: Option<PathBuf>,
    /// Refine the configuration to a central configuration first.
    #[arg(long)]
    refine: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Classification tolerance, relative to the spectral radius.
    #[arg(long)]
    tol: Option<f64>,
    /// Report sections, comma separated (omega, hessian, decomposition, blocks, oracle, verdict, dynamics).
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    /// Add the dynamics section.
    #[arg(long)]
    dynamics: bool,
    /// Record wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[arg(long)]
    tol: Option<f64>,
    /// Values, comma separated, or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[arg(long, default_value_t = 10.0)]
    periods: f64,
    #[arg(long, default_value_t = 1e4)]
    steps_per_period: f64,
    /// Displacement along the dominant mode, relative to the radius.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Keep every n-th step.
    #[arg(long, default_value_t = 100)]
    stride: usize,
    /// Trajectory file (JSON Lines). Defaults as for `analyze`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "RELSTAB_OUT_DIR", hide_env_values = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Random central configurations added to the presets.
    #[arg(long, default_value_t = 25)]
    random: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("relstab: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => sweep(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Presets(o) => {
            let items = listing();
            let text = match o.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&items)?),
                Format::Table => items
                    .iter()
                    .map(|p| {
                        let flag = if p.reference_flag.is_some() { ", flagged" } else { "" };
                        format!("{:<24} n = {}  {}  (published omega^2 = {}{flag})\n", p.name, p.n, p.description, p.reference_omega_squared)
                    })
                    .collect(),
            };
            emit(&text, &o, "presets")?;
            Ok(EXIT_OK)
        }
        Command::Selfcheck(a) => {
            let report = run_selfcheck(a.random, a.seed);
            let text = match a.output.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
                Format::Table => report.checks.iter().map(|c| c.line() + "\n").collect(),
            };
            emit(&text, &a.output, "selfcheck")?;
            Ok(if report.passed { EXIT_OK } else { EXIT_CONSISTENCY })
        }
    }
}

fn build_request(args: &CaseArgs) -> Result<AnalysisRequest, CliError> {
    let mut req = match &args.request {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            serde_json::from_str::<AnalysisRequest>(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => {
            let case = args.case.as_deref().ok_or_else(|| CliError::Input("give --case or --request".into()))?;
            AnalysisRequest::preset(case)
        }
    };
    if args.request.is_some() {
        if let Some(c) = &args.case {
            req.case = CaseSpec::Preset(c.clone());
        }
    }
    if let Some(alpha) = args.alpha {
        req.potential = Some(PotentialRequest::Homogeneous { alpha });
    }
    if let Some(p) = &args.potential {
        req.potential = Some(PotentialRequest::parse(p)?);
    }
    if args.refine {
        req.tolerances.refine = true;
    }
    Ok(req)
}

fn analyze(a: AnalyzeArgs) -> Result<i32, CliError> {
    let mut req = build_request(&a.case)?;
    if let Some(t) = a.tol {
        req.tolerances.classify = t;
    }
    if let Some(list) = &a.outputs {
        req.outputs = list.iter().map(|s| Section::parse(s.trim())).collect::<Result<_, _>>()?;
    }
    if a.dynamics && !req.wants(Section::Dynamics) {
        req.outputs.push(Section::Dynamics);
    }
    if req.wants(Section::Dynamics) && req.dynamics.is_none() {
        req.dynamics = Some(DynamicsOptions::default());
    }
    let report = if a.timing { run_analysis_timed(&req)? } else { run_analysis(&req)? };
    let text = match a.output.format {
        Format::Json => report.to_json(),
        Format::Table => render_report(&report),
    };
    emit(&text, &a.output, &file_stem(&report.case.name))?;
    if report.status == Status::ConsistencyFailure {
        eprintln!("relstab: block spectra do not match the oracle");
        return Ok(EXIT_CONSISTENCY);
    }
    Ok(EXIT_OK)
}

fn sweep(a: SweepArgs) -> Result<i32, CliError> {
    let mut req = build_request(&a.case)?;
    if let Some(t) = a.tol {
        req.tolerances.classify = t;
    }
    let grid = parse_grid(&a.grid)?;
    let report = run_sweep(&req, "alpha", &grid)?;
    let text = match a.output.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
        Format::Table => render_sweep(&report),
    };
    emit(&text, &a.output, &format!("sweep-{}", file_stem(&case_label(&req))))?;
    let codes: Vec<i32> = report.points.iter().filter_map(|p| p.exit_code).collect();
    Ok(if codes.contains(&EXIT_CONSISTENCY) {
        EXIT_CONSISTENCY
    } else if codes.contains(&EXIT_INPUT) {
        EXIT_INPUT
    } else {
        EXIT_OK
    })
}

fn simulate_cmd(a: SimulateArgs) -> Result<i32, CliError> {
    let req = build_request(&a.case)?;
    let case = req.resolve()?;
    let opts = SimulationOptions { periods: a.periods, steps_per_period: a.steps_per_period, epsilon: a.epsilon, stride: a.stride };
    let (header, records) = simulate(&case, opts)?;
    let text = to_json_lines(&header, &records)?;
    let out = OutputArgs { format: Format::Json, out: a.out, out_dir: a.out_dir };
    let path = target(&out, &format!("trajectory-{}", file_stem(&case.name)), "jsonl");
    write_or_print(&text, path.as_deref())?;
    if let Some(t) = header.collision_time {
        eprintln!("relstab: collision at t = {t}");
    }
    Ok(EXIT_OK)
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("`{s}` is not a number")));
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = t.split(':').collect();
    if parts.len() == 3 {
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(CliError::Input("grid `start:stop:step` needs step > 0 and stop >= start".into()));
        }
        // rounding keeps the endpoint when (stop - start) / step is integral up to roundoff
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=count).map(|k| start + k as f64 * step).collect());
    }
    t.split(',').map(num).collect()
}

fn case_label(req: &AnalysisRequest) -> String {
    match &req.case {
        CaseSpec::Preset(name) => name.clone(),
        CaseSpec::Explicit(c) => format!("explicit-{}", c.n),
    }
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn target(o: &OutputArgs, stem: &str, ext: &str) -> Option<PathBuf> {
    o.out.clone().or_else(|| o.out_dir.as_ref().map(|d| d.join(format!("{stem}.{ext}"))))
}

fn emit(text: &str, o: &OutputArgs, stem: &str) -> Result<(), CliError> {
    let ext = if o.format == Format::Json { "json" } else { "txt" };
    write_or_print(text, target(o, stem, ext).as_deref())
}

fn write_or_print(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
            }
            std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
