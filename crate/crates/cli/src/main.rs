use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcodes::classify1d::DEFAULT_N_MAX;
use qcodes::css2d::DEFAULT_B_MAX;

use qcodes_cli::codefile::{self, CodeFile};
use qcodes_cli::commands::{self, MatrixFile, Report};
use qcodes_cli::error::CliError;

#[derive(Parser)]
#[command(name = "qcodes", version, about = "Analyse and classify additive and translation-invariant quantum codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Code definition file (JSON).
    #[arg(long, global = true)]
    code: Option<PathBuf>,
    /// Torus side lengths, comma separated.
    #[arg(long = "L", global = true, value_delimiter = ',')]
    l: Vec<usize>,
    /// 1-based qudit indices, comma separated.
    #[arg(long, global = true)]
    region: Option<String>,
    /// Largest logical weight searched when computing the distance.
    #[arg(long, global = true)]
    weight_cap: Option<usize>,
    /// Search bound for x^n - 1 in one dimension.
    #[arg(long, global = true, default_value_t = DEFAULT_N_MAX)]
    nmax: usize,
    /// Search bound for the coarse-graining factor in two dimensions.
    #[arg(long, global = true, default_value_t = DEFAULT_B_MAX)]
    bmax: usize,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Code parameters n, k, d on tori of the given sizes.
    Params,
    /// Normal form and witness script (D = 1 or CSS with D = 2).
    Classify,
    /// Entanglement entropy of a region in a completed stabilizer state.
    Entropy,
    /// Smith normal form of an integer or F_p[x] matrix file.
    Snf { matrix: PathBuf },
    /// Betti numbers of L x L tori.
    Homology,
    /// Gate script bringing a D = 0 stabilizer list to single-qudit X's.
    Canon,
    /// Isotropy, exactness and annihilator report.
    Check,
}

fn code_file(cli: &Cli) -> Result<CodeFile, CliError> {
    let path = cli.code.as_deref().ok_or_else(|| CliError::Input("--code FILE is required".into()))?;
    codefile::read(path)
}

fn read_matrix(path: &Path) -> Result<MatrixFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    MatrixFile::from_json(&text)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Params => commands::params(&code_file(cli)?.to_code()?, &cli.l, cli.weight_cap),
        Command::Classify => commands::classify(&code_file(cli)?.to_code()?, cli.nmax, cli.bmax),
        Command::Entropy => {
            let region = cli.region.as_deref().ok_or_else(|| CliError::Input("--region is required".into()))?;
            commands::entropy(&code_file(cli)?.to_code()?, &cli.l, region)
        }
        Command::Snf { matrix } => commands::snf(&read_matrix(matrix)?),
        Command::Homology => commands::homology(&cli.l),
        Command::Canon => commands::canon(&code_file(cli)?.to_code()?),
        Command::Check => commands::check(&code_file(cli)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default = if matches!(cli.command, Command::Canon) { Format::Text } else { Format::Json };
    match run(&cli) {
        Ok(report) => {
            match cli.format.unwrap_or(default) {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("JSON value serializes")),
                Format::Text => print!("{}", report.text),
            }
            ExitCode::from(u8::from(report.failed))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
