//! Command line front end for the `skcf` library: canonical forms, SLOCC
//! equivalence, class enumeration, orbit spot checks, and registry lookup.
//!
//! Exit codes: 0 on success (and for `equiv` when the states are equivalent),
//! 1 when `equiv` finds the states inequivalent or `orbit-check` records a
//! failure, 2 on input or usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use skcf::{
    canonicalize, enumerate_all, enumerate_classes, equivalent, find_label, orbit_check,
    pencil_of_state, representative_state, CanonicalForm, ClassEntry, NormalizationMode, State,
};

#[derive(Parser)]
#[command(
    name = "skcf",
    version,
    about = "Kronecker canonical forms of 2xmxn pure states"
)]
struct Cli {
    /// Comparison tolerance for approximate values
    #[arg(long, global = true, env = "SKCF_TOL", default_value_t = skcf::DEFAULT_TOL)]
    tol: f64,

    /// Eigenvalue normalization mode
    #[arg(long, global = true, value_enum, default_value_t = Mode::Restricted)]
    mode: Mode,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Restricted,
    AllTriples,
}

impl From<Mode> for NormalizationMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Restricted => NormalizationMode::Restricted,
            Mode::AllTriples => NormalizationMode::AllTriples,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Ket,
    Pencil,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a state
    Canon {
        /// State JSON file
        state: PathBuf,
    },
    /// Decide SLOCC equivalence of two states
    Equiv {
        /// First state JSON file
        a: PathBuf,
        /// Second state JSON file
        b: PathBuf,
    },
    /// List SLOCC classes of 2xmxn systems
    Enumerate {
        /// Dimension of the second party
        #[arg(long)]
        m: usize,
        /// Dimension of the third party; all n up to stabilization if absent
        #[arg(long)]
        n: Option<usize>,
        /// Include classes with degenerate local ranks
        #[arg(long)]
        all_ranks: bool,
    },
    /// Canonicalize random SLOCC perturbations of a state and compare
    OrbitCheck {
        /// State JSON file
        state: PathBuf,
        /// Number of random perturbations
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print one registry class by label
    Show {
        /// Class label, e.g. ABC-3 or A:B:C
        label: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let tol = cli.tol;
    let mode = NormalizationMode::from(cli.mode);
    match &cli.command {
        Command::Canon { state } => {
            let s = load_state(state)?;
            let form = canonicalize(&s, tol, mode).map_err(|e| e.to_string())?;
            print_form(&form, cli.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { a, b } => {
            let sa = load_state(a)?;
            let sb = load_state(b)?;
            let same = equivalent(&sa, &sb, tol, mode).map_err(|e| e.to_string())?;
            match cli.format {
                Format::Json => println!("{{\"equivalent\":{same}}}"),
                _ => println!("{}", if same { "equivalent" } else { "not-equivalent" }),
            }
            Ok(if same {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Enumerate { m, n, all_ranks } => {
            let classes = match n {
                Some(n) => enumerate_classes(*m, *n, *all_ranks),
                None => enumerate_all(*m),
            }
            .map_err(|e| e.to_string())?;
            print_classes(&classes, cli.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::OrbitCheck {
            state,
            trials,
            seed,
        } => {
            let s = load_state(state)?;
            let report = orbit_check(&s, *trials, *seed, tol).map_err(|e| e.to_string())?;
            println!(
                "{}",
                serde_json::to_string(&report).map_err(|e| e.to_string())?
            );
            Ok(if report.failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Show { label } => {
            let entry = find_label(label).map_err(|e| e.to_string())?;
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string(&entry).map_err(|e| e.to_string())?
                ),
                Format::Ket => println!("{}", entry.ket),
                Format::Pencil => println!("{}", pencil_text(&entry.form)?),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_state(path: &Path) -> Result<State, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn print_form(form: &CanonicalForm, format: Format) -> Result<(), String> {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string(form).map_err(|e| e.to_string())?
        ),
        Format::Ket => {
            let rep = representative_state(form).map_err(|e| e.to_string())?;
            println!("{}", rep.ket_string());
        }
        Format::Pencil => println!("{}", pencil_text(form)?),
    }
    Ok(())
}

fn print_classes(classes: &[ClassEntry], format: Format) -> Result<(), String> {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string(classes).map_err(|e| e.to_string())?
        ),
        Format::Ket => {
            for entry in classes {
                let (a, b, c) = entry.dims;
                println!("{}\t{a}x{b}x{c}\t{}", entry.label, entry.ket);
            }
        }
        Format::Pencil => {
            for entry in classes {
                let (a, b, c) = entry.dims;
                println!("{} ({a}x{b}x{c})", entry.label);
                println!("{}\n", pencil_text(&entry.form)?);
            }
        }
    }
    Ok(())
}

fn pencil_text(form: &CanonicalForm) -> Result<String, String> {
    let rep = representative_state(form).map_err(|e| e.to_string())?;
    Ok(pencil_of_state(&rep).pretty())
}
