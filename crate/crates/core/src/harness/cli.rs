//! `ostrowski <subcommand>`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage, parse or validation
//! error, 3 overflow, index, range or cap error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use super::experiments::{
    pseudorandomness_experiment, spectrum_experiment, ExperimentConfig, OutputFormat, Tabular,
};
use super::verify::{default_alphas, default_functions, verify_all, VerifyConfig};
use crate::alphafun::{AlphaFunction, AtomRegistry, FnSpec};
use crate::cfrac::{covering, expand, QuotientSpec};
use crate::error::Error;
use crate::numeration::{decode_digits, encode, psi};
use crate::spectral::expsum::DEFAULT_GRID;
use crate::spectral::{correlation_profile, fourier_coeffs, spectrum_scan};

const DEFAULT_ALPHA: &str = "golden";
const DEFAULT_FN: &str = "theta:1/2";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "ostrowski",
    version,
    about = "Ostrowski numeration and correlation spectra of alpha-multiplicative functions"
)]
pub struct Cli {
    /// Partial quotients: golden, silver, periodic:<pre>/<period>, list:<a1,a2,...>
    #[arg(long, global = true)]
    pub alpha: Option<String>,

    /// Function: one, theta:<x>, theta:<x>+beta:<y>, atoms:<file.json>, table:<name>
    #[arg(long = "fn", global = true)]
    pub func: Option<String>,

    /// Output file, or `csv` / `json` to pick the format on stdout
    #[arg(long, global = true)]
    pub out: Option<String>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Registers an atom table for `table:<name>`, given as NAME=PATH
    #[arg(long = "table", global = true, value_name = "NAME=PATH")]
    pub tables: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Ostrowski digits, digit sum and truncations of n
    Encode {
        #[arg(long)]
        n: u64,
        /// Levels for ψ_λ(n) (default: every level up to the top digit)
        #[arg(long = "lambda", value_delimiter = ',')]
        lambdas: Vec<usize>,
    },
    /// The integer with the given digits, least significant first
    Decode {
        #[arg(long, value_delimiter = ',', required = true)]
        digits: Vec<u32>,
    },
    /// Digit sum of n
    Sigma {
        #[arg(long)]
        n: u64,
    },
    /// Partial quotients and convergents p_i/q_i for i ≤ K
    Convergents {
        #[arg(long = "K", default_value_t = 20)]
        k: usize,
    },
    /// Correlations γ̂_r for r < R at truncation N
    Correlate {
        #[arg(long = "R")]
        r: usize,
        #[arg(long = "N")]
        n: u64,
    },
    /// Fourier coefficients G_λ(h) at scale q_λ
    Fourier {
        #[arg(long)]
        lambda: usize,
    },
    /// Estimate of sup_β |(1/N) Σ g(n) e(−nβ)|
    Spectrum {
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Runs the verification suite
    Verify {
        /// Comma-separated check families
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Runs a desk-scale experiment
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        #[arg(long = "N", default_value_t = 100_000)]
        n: u64,
        #[arg(long = "R-list", value_delimiter = ',')]
        r_list: Vec<usize>,
        #[arg(long = "lambda-list", value_delimiter = ',')]
        lambda_list: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Pseudorandomness,
    Spectrum,
}

/// Whether the command's checks passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    CheckFailed,
}

/// Failure of a command, before any check verdict.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Lib(e) => write!(f, "{e}"),
            Self::Io(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Lib(Error::Parse(_) | Error::Validation(_)) | Self::Io(_) => 2,
            Self::Lib(
                Error::Overflow { .. } | Error::Index { .. } | Error::Range(_) | Error::Cap { .. },
            ) => 3,
        }
    }
}

/// Where and how a command writes its result.
struct Sink {
    path: Option<String>,
    format: Option<OutputFormat>,
}

impl Sink {
    fn new(out: Option<&str>, format: Option<OutputFormat>) -> Self {
        match out {
            Some(f @ ("csv" | "json")) => Self {
                path: None,
                format: Some(f.parse().expect("known format")),
            },
            other => Self {
                path: other.map(str::to_string),
                format,
            },
        }
    }

    fn format_or(&self, default: OutputFormat) -> OutputFormat {
        self.format.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        let text = if text.ends_with('\n') {
            text.to_string()
        } else {
            format!("{text}\n")
        };
        match &self.path {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Io(format!("cannot write {path}: {e}"))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
        }
    }
}

impl Cli {
    fn alpha(&self) -> Result<QuotientSpec, Error> {
        self.alpha.as_deref().unwrap_or(DEFAULT_ALPHA).parse()
    }

    fn func(&self) -> Result<FnSpec, Error> {
        self.func.as_deref().unwrap_or(DEFAULT_FN).parse()
    }

    fn registry(&self) -> Result<AtomRegistry, Error> {
        let mut registry = AtomRegistry::new();
        for entry in &self.tables {
            let (name, path) = entry
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("--table expects NAME=PATH, got {entry:?}")))?;
            registry.load(name, path)?;
        }
        Ok(registry)
    }

    /// `g` over a scale covering `n < reach`.
    fn function(&self, reach: u64) -> Result<AlphaFunction, Error> {
        let scale = covering(&self.alpha()?, reach)?;
        self.registry()?.build(&self.func()?, scale)
    }

    fn header(&self) -> String {
        format!(
            "# {}",
            serde_json::to_string(self).expect("arguments serialize")
        )
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(threads) = cli.threads {
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let sink = Sink::new(cli.out.as_deref(), cli.format);
    match &cli.command {
        Command::Encode { n, lambdas } => {
            let scale = covering(&cli.alpha()?, *n)?;
            let d = encode(*n, &scale)?;
            let levels: Vec<usize> = if lambdas.is_empty() {
                (0..=d.digits().len()).collect()
            } else {
                lambdas.clone()
            };
            let psi: BTreeMap<usize, u64> = levels
                .into_iter()
                .map(|l| Ok((l, psi(*n, l, &scale)?)))
                .collect::<Result<_, Error>>()?;
            let value = json!({ "n": n, "digits": d.digits(), "sigma": d.sigma(), "psi": psi });
            sink.emit(&match sink.format_or(OutputFormat::Json) {
                OutputFormat::Json => to_json(&value),
                OutputFormat::Csv => {
                    let mut s = format!("{}\nlambda,psi\n", cli.header());
                    for (l, p) in &psi {
                        let _ = writeln!(s, "{l},{p}");
                    }
                    s
                }
            })?;
        }
        Command::Decode { digits } => {
            let scale = expand(&cli.alpha()?, digits.len().max(1))?;
            let n = decode_digits(digits, &scale)?;
            let sigma: u64 = digits.iter().map(|&d| d as u64).sum();
            let value = json!({ "n": n, "digits": digits, "sigma": sigma });
            sink.emit(&match sink.format_or(OutputFormat::Json) {
                OutputFormat::Json => to_json(&value),
                OutputFormat::Csv => format!("{}\nn,sigma\n{n},{sigma}", cli.header()),
            })?;
        }
        Command::Sigma { n } => {
            let scale = covering(&cli.alpha()?, *n)?;
            let sigma = encode(*n, &scale)?.sigma();
            sink.emit(&match sink.format_or(OutputFormat::Json) {
                OutputFormat::Json => to_json(&json!({ "n": n, "sigma": sigma })),
                OutputFormat::Csv => format!("{}\nn,sigma\n{n},{sigma}", cli.header()),
            })?;
        }
        Command::Convergents { k } => {
            let table = expand(&cli.alpha()?, (*k).max(1))?;
            let rows: Vec<_> = (0..=*k)
                .map(|i| json!({ "i": i, "a": (i > 0).then(|| table.a(i)).flatten(), "p": table.p(i), "q": table.q(i) }))
                .collect();
            sink.emit(&match sink.format_or(OutputFormat::Csv) {
                OutputFormat::Json => to_json(&rows),
                OutputFormat::Csv => {
                    let mut s = format!("{}\ni,a,p,q\n", cli.header());
                    for i in 0..=*k {
                        let a = if i > 0 {
                            table.a(i).map_or(String::new(), |a| a.to_string())
                        } else {
                            String::new()
                        };
                        let _ = writeln!(s, "{i},{a},{},{}", table.p(i), table.q(i));
                    }
                    s
                }
            })?;
        }
        Command::Correlate { r, n } => {
            let g = cli.function(n + *r as u64)?;
            let profile = correlation_profile(&g, *r, *n)?;
            sink.emit(&match sink.format_or(OutputFormat::Csv) {
                OutputFormat::Json => to_json(&profile),
                OutputFormat::Csv => {
                    let mut s = format!("{}\nr,re,im,abs\n", cli.header());
                    for (i, z) in profile.gamma.iter().enumerate() {
                        let _ = writeln!(s, "{i},{:e},{:e},{:e}", z.re, z.im, z.norm());
                    }
                    let _ = writeln!(
                        s,
                        "quadratic_mean,{:e},absolute_mean,{:e}",
                        profile.quadratic_mean, profile.absolute_mean
                    );
                    s
                }
            })?;
        }
        Command::Fourier { lambda } => {
            let reach = expand(&cli.alpha()?, (*lambda).max(1))?.q(*lambda);
            let g = cli.function(reach)?;
            let table = fourier_coeffs(&g, *lambda)?;
            sink.emit(&match sink.format_or(OutputFormat::Csv) {
                OutputFormat::Json => to_json(&json!({
                    "lambda": table.lambda,
                    "q": table.q,
                    "energy": table.energy(),
                    "coeffs": table.coeffs,
                })),
                OutputFormat::Csv => {
                    let mut s = format!("{}\nh,re,im,abs\n", cli.header());
                    for (h, z) in table.coeffs.iter().enumerate() {
                        let _ = writeln!(s, "{h},{:e},{:e},{:e}", z.re, z.im, z.norm());
                    }
                    let _ = writeln!(s, "energy,{:e},,", table.energy());
                    s
                }
            })?;
        }
        Command::Spectrum { n, grid } => {
            let g = cli.function(*n)?;
            let scan = spectrum_scan(&g, *n, *grid)?;
            sink.emit(&match sink.format_or(OutputFormat::Json) {
                OutputFormat::Json => to_json(&scan),
                OutputFormat::Csv => {
                    let mut s = format!("{}\nj,beta,value\n", cli.header());
                    for (j, v) in scan.profile.iter().enumerate() {
                        let _ = writeln!(s, "{j},{},{:e}", j as f64 / *grid as f64, v);
                    }
                    let _ = writeln!(s, "peak,{},{:e}", scan.beta_peak, scan.peak_value);
                    s
                }
            })?;
        }
        Command::Verify { only } => {
            let config = VerifyConfig {
                alphas: match &cli.alpha {
                    Some(a) => vec![a.parse()?],
                    None => default_alphas(),
                },
                functions: match &cli.func {
                    Some(f) => vec![f.parse()?],
                    None => default_functions(),
                },
                seed: cli.seed,
                only: (!only.is_empty()).then(|| only.clone()),
            };
            let report = verify_all(&config, &cli.registry()?)?;
            eprintln!("{}", report.summary());
            sink.emit(&match sink.format_or(OutputFormat::Json) {
                OutputFormat::Json => to_json(&report),
                OutputFormat::Csv => {
                    let mut s = format!(
                        "{}\ncheck_name,instances_run,instances_passed,worst_margin\n",
                        cli.header()
                    );
                    for f in &report.families {
                        let margin = f.worst_margin.map_or(String::new(), |m| format!("{m:e}"));
                        let _ = writeln!(
                            s,
                            "{},{},{},{margin}",
                            f.check_name, f.instances_run, f.instances_passed
                        );
                    }
                    s
                }
            })?;
            if !report.passed() {
                return Ok(Outcome::CheckFailed);
            }
        }
        Command::Experiment {
            kind,
            n,
            r_list,
            lambda_list,
        } => {
            let defaults = ExperimentConfig::default();
            let config = ExperimentConfig {
                alpha_spec: cli.alpha.clone().unwrap_or_else(|| DEFAULT_ALPHA.into()),
                fn_spec: cli.func.clone().unwrap_or_else(|| DEFAULT_FN.into()),
                n: *n,
                r_list: if r_list.is_empty() {
                    defaults.r_list
                } else {
                    r_list.clone()
                },
                lambda_list: lambda_list.clone(),
                seed: cli.seed,
                output_path: sink.path.clone(),
                format: sink.format_or(OutputFormat::Csv),
            };
            let registry = cli.registry()?;
            let text = match kind {
                ExperimentKind::Pseudorandomness => {
                    pseudorandomness_experiment(&config, &registry)?.render(config.format)
                }
                ExperimentKind::Spectrum => {
                    spectrum_experiment(&config, &registry)?.render(config.format)
                }
            };
            sink.emit(&text)?;
        }
    }
    Ok(Outcome::Pass)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
