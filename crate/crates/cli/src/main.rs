//! `dimerchain` command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, ValueEnum};

use dimerchain::config::{Command, Format, InjectTarget, PartialConfig, Values};
use dimerchain::{Error, ErrorKind, Family};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Eigenvalues with parity, IPR, peak site and band label
    Spectrum,
    /// Amplitudes of the localized and representative band states
    Eigenstates,
    /// Disorder-averaged maximum occupancies and spectra
    Disorder,
    /// Time evolution of one injected excitation
    Evolve,
    /// Quantum-memory fidelity and phase, site vs eigenstate encoding
    Memory,
    /// Mirror state transfer scan over coupling ratios
    Pst,
    /// Winding number, Zak phase and localized-state census
    Classify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Eigenstates => Command::Eigenstates,
            Cmd::Disorder => Command::Disorder,
            Cmd::Evolve => Command::Evolve,
            Cmd::Memory => Command::Memory,
            Cmd::Pst => Command::Pst,
            Cmd::Classify => Command::Classify,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn parse_inject(s: &str) -> Result<InjectTarget, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Dimerized spin-chain simulations. Every run writes its tables plus a
/// manifest.json into the output directory.
#[derive(Debug, Parser)]
#[command(name = "dimerchain", version)]
struct Cli {
    /// Experiment to run (may also come from --config or --figure)
    #[arg(value_enum)]
    command: Option<Cmd>,

    /// JSON config file or a manifest from an earlier run; flags override it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Chain family: a (weakly coupled centre) or b (strongly coupled centre)
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,

    /// Number of sites (odd, >= 5)
    #[arg(long, value_name = "N")]
    sites: Option<usize>,

    /// Strong coupling Δ
    #[arg(long, value_name = "Δ")]
    strong: Option<f64>,

    /// Weak coupling δ
    #[arg(long, value_name = "δ")]
    weak: Option<f64>,

    /// Coupling ratio Δ/δ (sets δ = Δ/r); pst accepts a comma-separated list
    #[arg(long, value_name = "r", value_delimiter = ',', num_args = 1..)]
    ratio: Option<Vec<f64>>,

    /// Disorder scale(s) E, comma-separated
    #[arg(long, value_name = "E", value_delimiter = ',', num_args = 1..)]
    disorder: Option<Vec<f64>>,

    /// Disorder realizations per scale
    #[arg(long, value_name = "R")]
    realizations: Option<usize>,

    /// Seed of the disorder ensemble
    #[arg(long, value_name = "S")]
    seed: Option<u64>,

    /// Time horizon in 1/Δ units (raw time with --raw-time)
    #[arg(long, value_name = "T")]
    tmax: Option<f64>,

    /// Number of time samples (k-points for classify)
    #[arg(long, value_name = "K")]
    samples: Option<usize>,

    /// Injection site label, or "gapstate" for the localized eigenstate
    #[arg(long, value_name = "SITE|gapstate", value_parser = parse_inject, allow_hyphen_values = true)]
    inject: Option<InjectTarget>,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Preset reproducing figure 2-7
    #[arg(long, value_name = "F")]
    figure: Option<u8>,

    /// Interpret --tmax as raw time instead of 1/Δ units
    #[arg(long)]
    raw_time: bool,
}

impl Cli {
    fn flags(&self) -> PartialConfig {
        PartialConfig {
            command: self.command.map(Into::into),
            family: self.family.map(|f| match f {
                FamilyArg::A => Family::WeakCenter,
                FamilyArg::B => Family::StrongCenter,
            }),
            sites: self.sites,
            strong: self.strong,
            weak: self.weak,
            ratio: self.ratio.clone().map(Values::Many),
            disorder: self.disorder.clone().map(Values::Many),
            realizations: self.realizations,
            seed: self.seed,
            tmax: self.tmax,
            samples: self.samples,
            inject: self.inject,
            out: self.out.clone(),
            format: self.format.map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            }),
            figure: self.figure,
            raw_time: self.raw_time.then_some(true),
        }
    }
}

fn fail(kind: &str, code: i32, message: &str) -> ExitCode {
    let line = serde_json::json!({ "error": kind, "code": code, "message": message });
    eprintln!("{line}");
    ExitCode::from(code as u8)
}

fn fail_with(e: &Error) -> ExitCode {
    let kind: ErrorKind = e.kind();
    fail(kind.as_str(), kind.exit_code(), &e.to_string())
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let file = match &cli.config {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
            PartialConfig::from_json(&bytes)?
        }
        None => PartialConfig::default(),
    };
    let cfg = cli.flags().overlay(file).resolve()?;
    let summary = dimerchain::run::run(&cfg)?;
    for a in &summary.manifest.artifacts {
        println!("{}", cfg.out.join(&a.file).display());
    }
    println!("{}", cfg.out.join(dimerchain::output::MANIFEST_FILE).display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            return fail("config", ErrorKind::Config.exit_code(), first.trim_start_matches("error: "));
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail_with(&e),
    }
}
