//! `emdet` — scans and checks for electric-magnetic photodetection models.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{RunOutput, VerifyOutput};
use config::{CliError, Params};

/// Environment variable naming the default output directory.
const OUTPUT_DIR_ENV: &str = "EMDET_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "emdet",
    version,
    about = "Electric-magnetic photodetection: far-field patterns, single-photon fringes, \
             resonant absorption, event sampling and an invariant checker",
    after_help = "Every parameter can also come from a config file (--config) with one \
                  `key = value` pair per line; explicit flags override file entries. \
                  Complex values use the literal grammar `a`, `bi`, `a+bi` (e.g. -1, 0.5+0.5i). \
                  Ranges are `min:max:count`. Exit codes: 0 success, 1 usage error, \
                  2 numerical precondition violation, 3 I/O error."
)]
struct Cli {
    /// Config file with `key = value` lines; flags override file entries.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output file path (default: $EMDET_OUTPUT_DIR/<command>.<format>).
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Two-dipole far-field pattern along a polar or azimuthal cut.
    Farfield(FarfieldArgs),
    /// Single-photon detection probability over one or more fringe periods.
    Fringe(FringeArgs),
    /// POVM element of the detector at one position.
    Povm(PovmArgs),
    /// Bloch vector of the detector-selected mode over a real zeta sweep.
    Bloch(BlochArgs),
    /// Absorption spectrum of the lossy resonant detector.
    Resonance(ResonanceArgs),
    /// Time-domain relaxation of the driven resonance (RK4).
    Evolve(EvolveArgs),
    /// On-resonance absorption versus the internal-to-radiative loss ratio.
    Critical(CriticalArgs),
    /// Synthetic detection events with visibility/phase recovery.
    Sample(SampleArgs),
    /// Run the full invariant suite and exit nonzero on any failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FarfieldArgs {
    /// Dipole separation in wavelengths (default 3).
    #[arg(long = "d-over-lambda", allow_hyphen_values = true)]
    d_over_lambda: Option<String>,
    /// Detector response ratio, complex literal (default 0).
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    /// Cut type: polar (vary theta) or azimuthal (vary phi); default polar.
    #[arg(long, allow_hyphen_values = true)]
    cut: Option<String>,
    /// Fixed azimuth in radians for the polar cut (default 0).
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Fixed polar angle in radians for the azimuthal cut (default pi/2).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Grid points per cut (default 721).
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
}

#[derive(Args)]
struct FringeArgs {
    /// Detector response ratio, complex literal (default 0).
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    /// Relative phase of the photon state in radians (default 0).
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Grid points (default 1001).
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Number of fringe periods to scan (default 1).
    #[arg(long, allow_hyphen_values = true)]
    periods: Option<String>,
    /// Single-photon field amplitude (default 1).
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
    /// Wavenumber (default 2*pi).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
}

#[derive(Args)]
struct PovmArgs {
    /// Detector response ratio, complex literal (default 0).
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    /// Detector position (default 0).
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Single-photon field amplitude (default 1).
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
    /// Wavenumber (default 2*pi).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
}

#[derive(Args)]
struct BlochArgs {
    /// Real zeta sweep as min:max:count (default -1:1:201).
    #[arg(long = "zeta-range", allow_hyphen_values = true)]
    zeta_range: Option<String>,
    /// Detector position (default 0).
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Wavenumber (default 2*pi).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
}

#[derive(Args)]
struct ResonanceArgs {
    /// Electric radiative rate (default 1).
    #[arg(long = "gamma-e", allow_hyphen_values = true)]
    gamma_e: Option<String>,
    /// Magnetic radiative rate (default 1).
    #[arg(long = "gamma-m", allow_hyphen_values = true)]
    gamma_m: Option<String>,
    /// Internal loss rate (default 2, critical for the default couplings).
    #[arg(long = "gamma-i", allow_hyphen_values = true)]
    gamma_i: Option<String>,
    /// Detuning sweep as min:max:count (default -10:10:801).
    #[arg(long = "delta-range", allow_hyphen_values = true)]
    delta_range: Option<String>,
}

#[derive(Args)]
struct EvolveArgs {
    /// Electric radiative rate (default 1).
    #[arg(long = "gamma-e", allow_hyphen_values = true)]
    gamma_e: Option<String>,
    /// Magnetic radiative rate (default 1).
    #[arg(long = "gamma-m", allow_hyphen_values = true)]
    gamma_m: Option<String>,
    /// Internal loss rate (default 2).
    #[arg(long = "gamma-i", allow_hyphen_values = true)]
    gamma_i: Option<String>,
    /// Drive detuning (default 0).
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Drive amplitude, complex literal (default 1).
    #[arg(long = "s-in", allow_hyphen_values = true)]
    s_in: Option<String>,
    /// Initial mode amplitude, complex literal (default 0).
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<String>,
    /// Integration end time (default 20/Gamma).
    #[arg(long = "t-end", allow_hyphen_values = true)]
    t_end: Option<String>,
    /// Integrator step (default 0.005/Gamma; must be <= 0.1/Gamma).
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
}

#[derive(Args)]
struct CriticalArgs {
    /// Total radiative rate (default 1).
    #[arg(long = "gamma-r", allow_hyphen_values = true)]
    gamma_r: Option<String>,
    /// Grid points over the ratio range [0, 4] (default 401).
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
}

#[derive(Args)]
struct SampleArgs {
    /// Detector response ratio, complex literal (default 0).
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    /// Relative phase of the photon state in radians (default 0).
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Number of events (default 100000).
    #[arg(long, allow_hyphen_values = true)]
    events: Option<String>,
    /// RNG seed (default 0).
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Histogram bins (default 64, minimum 8).
    #[arg(long, allow_hyphen_values = true)]
    bins: Option<String>,
    /// Single-photon field amplitude (default 1).
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
    /// Wavenumber (default 2*pi).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Farfield(_) => "farfield",
            Command::Fringe(_) => "fringe",
            Command::Povm(_) => "povm",
            Command::Bloch(_) => "bloch",
            Command::Resonance(_) => "resonance",
            Command::Evolve(_) => "evolve",
            Command::Critical(_) => "critical",
            Command::Sample(_) => "sample",
            Command::Verify(_) => "verify",
        }
    }

    fn overrides(&self) -> Vec<(&'static str, Option<String>)> {
        match self {
            Command::Farfield(a) => vec![
                ("d-over-lambda", a.d_over_lambda.clone()),
                ("zeta", a.zeta.clone()),
                ("cut", a.cut.clone()),
                ("phi", a.phi.clone()),
                ("theta", a.theta.clone()),
                ("points", a.points.clone()),
            ],
            Command::Fringe(a) => vec![
                ("zeta", a.zeta.clone()),
                ("phi", a.phi.clone()),
                ("points", a.points.clone()),
                ("periods", a.periods.clone()),
                ("amplitude", a.amplitude.clone()),
                ("k", a.k.clone()),
            ],
            Command::Povm(a) => vec![
                ("zeta", a.zeta.clone()),
                ("x", a.x.clone()),
                ("amplitude", a.amplitude.clone()),
                ("k", a.k.clone()),
            ],
            Command::Bloch(a) => vec![
                ("zeta-range", a.zeta_range.clone()),
                ("x", a.x.clone()),
                ("k", a.k.clone()),
            ],
            Command::Resonance(a) => vec![
                ("gamma-e", a.gamma_e.clone()),
                ("gamma-m", a.gamma_m.clone()),
                ("gamma-i", a.gamma_i.clone()),
                ("delta-range", a.delta_range.clone()),
            ],
            Command::Evolve(a) => vec![
                ("gamma-e", a.gamma_e.clone()),
                ("gamma-m", a.gamma_m.clone()),
                ("gamma-i", a.gamma_i.clone()),
                ("delta", a.delta.clone()),
                ("s-in", a.s_in.clone()),
                ("a0", a.a0.clone()),
                ("t-end", a.t_end.clone()),
                ("dt", a.dt.clone()),
            ],
            Command::Critical(a) => vec![
                ("gamma-r", a.gamma_r.clone()),
                ("points", a.points.clone()),
            ],
            Command::Sample(a) => vec![
                ("zeta", a.zeta.clone()),
                ("phi", a.phi.clone()),
                ("events", a.events.clone()),
                ("seed", a.seed.clone()),
                ("bins", a.bins.clone()),
                ("amplitude", a.amplitude.clone()),
                ("k", a.k.clone()),
            ],
            Command::Verify(_) => vec![],
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successful outcomes
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let file_map = match &cli.config {
        Some(path) => config::load_config_file(path)?,
        None => BTreeMap::new(),
    };

    let (command_name, overrides) = match &cli.command {
        Some(command) => (command.name().to_string(), command.overrides()),
        None => {
            let name = file_map.get("command").cloned().ok_or_else(|| {
                CliError::Usage(
                    "no command given; pass a subcommand or a config file with a `command` key \
                     (see --help)"
                        .to_string(),
                )
            })?;
            (name, Vec::new())
        }
    };

    let mut overrides = overrides;
    if let Some(output) = &cli.output {
        overrides.push(("output", Some(output.display().to_string())));
    }
    if let Some(format) = &cli.format {
        overrides.push(("format", Some(format.clone())));
    }
    let params = Params::merge(file_map, overrides);

    let format = match params.raw("format").unwrap_or("csv") {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => {
            return Err(CliError::Usage(format!(
                "invalid format `{other}` (choices: csv, json)"
            )))
        }
    };
    let output_path = resolve_output_path(&params, &command_name, format);

    if command_name == "verify" {
        let VerifyOutput {
            results,
            all_passed,
        } = commands::run_verify(&params)?;
        for check in &results {
            println!("{}", commands::format_check_line(check));
        }
        let passed = results.iter().filter(|r| r.passed).count();
        println!("verify: {passed}/{} checks passed", results.len());
        write_verify_report(&results, &output_path, format)?;
        println!("wrote {}", output_path.display());
        return Ok(if all_passed {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(2)
        });
    }

    let RunOutput { table, summary } = match command_name.as_str() {
        "farfield" => commands::run_farfield(&params)?,
        "fringe" => commands::run_fringe(&params)?,
        "povm" => commands::run_povm(&params)?,
        "bloch" => commands::run_bloch(&params)?,
        "resonance" => commands::run_resonance(&params)?,
        "evolve" => commands::run_evolve(&params)?,
        "critical" => commands::run_critical(&params)?,
        "sample" => commands::run_sample(&params)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown command `{other}` (see --help)"
            )))
        }
    };

    write_table(&table, &output_path, format)?;
    println!("{summary} -> {}", output_path.display());
    Ok(ExitCode::SUCCESS)
}

fn resolve_output_path(params: &Params, command: &str, format: Format) -> PathBuf {
    if let Some(path) = params.raw("output") {
        return PathBuf::from(path);
    }
    let dir = std::env::var(OUTPUT_DIR_ENV).unwrap_or_else(|_| ".".to_string());
    Path::new(&dir).join(format!("{command}.{}", format.extension()))
}

fn create_writer(path: &Path) -> Result<BufWriter<File>, CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn write_table(
    table: &emdet::ScanTable,
    path: &Path,
    format: Format,
) -> Result<(), CliError> {
    let mut writer = create_writer(path)?;
    let io_err = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    match format {
        Format::Csv => table.write_csv(&mut writer).map_err(io_err)?,
        Format::Json => table.write_json(&mut writer).map_err(io_err)?,
    }
    writer.flush().map_err(io_err)
}

fn write_verify_report(
    results: &[emdet::verify::CheckResult],
    path: &Path,
    format: Format,
) -> Result<(), CliError> {
    let mut writer = create_writer(path)?;
    let io_err = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    match format {
        Format::Csv => {
            writeln!(writer, "# command=verify").map_err(io_err)?;
            writeln!(writer, "name,max_error,threshold,passed").map_err(io_err)?;
            for r in results {
                writeln!(
                    writer,
                    "{},{},{},{}",
                    r.name,
                    emdet::scan::fmt_sig17(r.max_error),
                    emdet::scan::fmt_sig17(r.threshold),
                    u8::from(r.passed)
                )
                .map_err(io_err)?;
            }
        }
        Format::Json => {
            let entries: Vec<serde_json::Value> = results
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "name": r.name,
                        "max_error": r.max_error,
                        "threshold": r.threshold,
                        "passed": r.passed,
                        "detail": r.detail,
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut writer, &entries).map_err(|e| {
                CliError::Io(format!("cannot write {}: {e}", path.display()))
            })?;
            writeln!(writer).map_err(io_err)?;
        }
    }
    writer.flush().map_err(io_err)
}
