use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qvpath::cli::{cmd_lorentz, cmd_simulate, cmd_sweep, cmd_verify, CliError, ConfigFile, ModelChoice};

/// Quantum virtual path simulations.
///
/// Exit codes: 0 ok, 1 verification failure or I/O error, 2 invalid
/// configuration, 3 numerical degeneracy.
#[derive(Parser)]
#[command(name = "qvpath", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one QVP and write distribution.csv
    Simulate(RunArgs),
    /// Build a QVP per step count and write sweep.csv
    Sweep(RunArgs),
    /// Run the invariant suite; exit 0 iff every check passes
    Verify,
    /// Boost an interval and print dx',dt'
    #[command(allow_negative_numbers = true)]
    Lorentz {
        #[arg(long)]
        dx: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        v: f64,
        /// Speed of light
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RunArgs {
    /// TOML file with any of the keys below; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generator pair [default: symmetric]
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    /// T-violation strength, |lambda| < 1 [default: 0.1]
    #[arg(long)]
    lambda: Option<f64>,
    /// Target spread sigma_w [default: 1]
    #[arg(long)]
    sigma: Option<f64>,
    /// Step count, or a comma-separated increasing list for sweep
    #[arg(long, alias = "n-list", value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Odd number of lattice sites [default: sized to 8x the expected support]
    #[arg(long)]
    sites: Option<usize>,
    /// Lattice spacing [default: max(sigma/2, 2 delta_w at the smallest N)]
    #[arg(long)]
    spacing: Option<f64>,
    /// Resolution limit; warns when delta_w exceeds it
    #[arg(long)]
    delta_w_min: Option<f64>,
    /// Output directory [default: .]
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write an SVG plot
    #[arg(long)]
    svg: bool,
}

impl RunArgs {
    fn merged(self) -> Result<ConfigFile, CliError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            model: self.model,
            lambda: self.lambda,
            sigma: self.sigma,
            n: self.n,
            sites: self.sites,
            spacing: self.spacing,
            delta_w_min: self.delta_w_min,
            out_dir: self.out_dir,
            svg: self.svg.then_some(true),
        };
        Ok(flags.over(file))
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Simulate(args) => {
            for p in cmd_simulate(args.merged()?)? {
                log::info!("wrote {}", p.display());
            }
        }
        Command::Sweep(args) => {
            for p in cmd_sweep(args.merged()?)? {
                log::info!("wrote {}", p.display());
            }
        }
        Command::Verify => {
            // the suite deliberately runs on small lattices
            log::set_max_level(log::LevelFilter::Error);
            let ok = cmd_verify(&mut std::io::stdout().lock())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Lorentz { dx, dt, v, c } => println!("{}", cmd_lorentz(dx, dt, v, c)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
