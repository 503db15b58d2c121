mod commands;
mod scenario_file;
mod table;

use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use table::Format;

/// Weak pre- and post-selected measurement calculator.
#[derive(Debug, Parser)]
#[command(name = "weakpps", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Seed for the Monte Carlo columns and randomized checks.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// List the built-in presets and exit.
    #[arg(long)]
    list_presets: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct Source {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in preset name (see --list-presets).
    #[arg(long)]
    preset: Option<String>,
    /// Override the number of sweep points.
    #[arg(long)]
    steps: Option<usize>,
    /// Override the method columns (comma separated).
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Override the Monte Carlo trials per point.
    #[arg(long)]
    mc_trials: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weak value, associated weak value and post-selection probability of a system.
    Weakvalue {
        #[arg(long, conflicts_with = "preset")]
        scenario: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Preselection polar angle for the standard qubit system.
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        p_in: f64,
    },
    /// Pointer deflection versus coupling, preselection angle or meter mean (default preset fig1).
    DeflectionScan(Source),
    /// Pointer deflection versus the phase of the weak value (default preset fig2).
    ThetaScan(Source),
    /// Narrow resonance for a large meter mean (default preset fig4).
    ResonanceScan(Source),
    /// Post-selected pointer distribution for one sweep point of a scenario.
    Distribution {
        #[command(flatten)]
        source: Source,
        /// Sweep index of the point to use.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Meter index within the scenario.
        #[arg(long, default_value_t = 0)]
        meter: usize,
        /// Grid points of the continuous readout.
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Half-width of the readout window in units of ΔR.
        #[arg(long, default_value_t = 5.0)]
        width: f64,
    },
    /// Phase detection with a which-path qubit, swept over the phase.
    Interferometer {
        #[arg(long, default_value_t = 1e-3)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        delta_q: f64,
        /// Number of samples N entering the SNR values.
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = -0.01, allow_hyphen_values = true)]
        phi_start: f64,
        #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
        phi_end: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        /// Monte Carlo trials per phase for an empirical SNR column (0 disables it).
        #[arg(long, default_value_t = 0)]
        mc_trials: u64,
    },
    /// ABL and weak probabilities of the three-box example.
    Threebox,
    /// Measurement strengths, regime and amplification over a scenario sweep.
    Regimes(Source),
    /// Run the numerical self-check suite; exits with status 2 on failure.
    Verify,
}

fn init_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("WEAKPPS_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| format!("WEAKPPS_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err("WEAKPPS_THREADS must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, String> {
    init_threads()?;
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let (table, ok) = if cli.list_presets {
        (commands::list_presets(), true)
    } else {
        let Some(command) = cli.command else {
            return Err("no subcommand given (see --help)".into());
        };
        match command {
            Command::Weakvalue {
                scenario,
                preset,
                kappa,
                nu,
                p_in,
            } => (
                commands::weakvalue(scenario.as_deref(), preset.as_deref(), kappa, nu, p_in)?,
                true,
            ),
            Command::DeflectionScan(src) => (
                commands::scan(&src, commands::ScanKind::Deflection, cli.seed)?,
                true,
            ),
            Command::ThetaScan(src) => (
                commands::scan(&src, commands::ScanKind::Theta, cli.seed)?,
                true,
            ),
            Command::ResonanceScan(src) => (
                commands::scan(&src, commands::ScanKind::Resonance, cli.seed)?,
                true,
            ),
            Command::Distribution {
                source,
                index,
                meter,
                points,
                width,
            } => (
                commands::distribution(&source, index, meter, points, width)?,
                true,
            ),
            Command::Interferometer {
                gamma,
                delta_q,
                n,
                phi_start,
                phi_end,
                steps,
                mc_trials,
            } => {
                let params = commands::InterferometerArgs {
                    gamma,
                    delta_q,
                    n,
                    phi_start,
                    phi_end,
                    steps,
                    mc_trials,
                };
                (commands::interferometer(&params, cli.seed)?, true)
            }
            Command::Threebox => (commands::threebox()?, true),
            Command::Regimes(src) => (commands::regimes(&src)?, true),
            Command::Verify => commands::verify(cli.seed),
        }
    };
    table
        .write(cli.format, &mut out)
        .map_err(|e| e.to_string())?;
    out.flush().map_err(|e| e.to_string())?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
