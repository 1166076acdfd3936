//! Command-line front end for the `enriques` library.
//!
//! Diagrams are read and written in the JSON form
//! `{"r": 3, "pred": [null, 1, 2], "second": [null, null, 1]}`.
//! Exit status is 0 on success, 1 on invalid input and 2 when a budget
//! runs out; errors go to stderr as a JSON object.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use enriques::analysis::{
    decide_prime, prime_sufficient, prove_specialization, AnalysisError, PrimalityVerdict,
    SpecializationConfig,
};
use enriques::poset::build_eff_poset;
use enriques::render;
use enriques::{
    enumerate_unordered, validate, BudgetExceeded, EnumerationBudget, OrderedDiagram,
    ProximityMatrix, RawDiagram,
};

#[derive(Parser)]
#[command(
    name = "enriques",
    version,
    about = "Ordered Enriques diagrams and their proximity matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct BudgetArgs {
    /// Maximum number of diagrams visited by an exhaustive search
    #[arg(long = "budget", default_value_t = 50_000_000)]
    max_count: u64,
    /// Largest diagram size accepted for exhaustive work
    #[arg(long, default_value_t = 8)]
    max_r: usize,
    /// Wall-clock limit in seconds
    #[arg(long)]
    time_limit: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> EnumerationBudget {
        EnumerationBudget {
            max_r: self.max_r,
            max_count: self.max_count,
            time_limit: self.time_limit.map(Duration::from_secs),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PosetFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Check a diagram against the axioms
    Validate { file: PathBuf },
    /// Counts, vertex classes, proximity matrix and its inverse
    Info { file: PathBuf },
    /// Every ordered diagram with r vertices, one JSON object per line
    Enumerate {
        #[arg(short)]
        r: usize,
        #[arg(long, conflicts_with = "unordered")]
        count_only: bool,
        /// One representative per unordered diagram
        #[arg(long)]
        unordered: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Primality verdict with its witness
    Prime {
        file: PathBuf,
        /// Fall back to exhaustive search when no sufficient criterion applies
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Try to prove or refute that the first diagram specializes to the second
    Specializes {
        file1: PathBuf,
        file2: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Eff-containment order on all ordered diagrams with r vertices
    Poset {
        #[arg(short)]
        r: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: PosetFormat,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Extension at a free vertex, with the matching bullet diagram
    Extend {
        file: PathBuf,
        #[arg(long = "at")]
        q: usize,
    },
    /// Graphviz drawing of a diagram
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: RenderFormat,
    },
}

/// A failure carrying its exit status and a JSON description.
struct Failure {
    code: u8,
    body: Value,
}

impl Failure {
    fn input(kind: &str, message: impl ToString) -> Self {
        Failure {
            code: 1,
            body: json!({"error": kind, "message": message.to_string()}),
        }
    }

    fn budget(e: &BudgetExceeded) -> Self {
        Failure {
            code: 2,
            body: json!({"error": "budget_exceeded", "message": e.to_string()}),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match &e {
            AnalysisError::Budget(b) => Failure::budget(b),
            AnalysisError::SizeMismatch { .. } => Failure::input("size_mismatch", e),
            _ => Failure::input("analysis", e),
        }
    }
}

fn read_raw(path: &Path) -> Result<RawDiagram, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input("parse", format!("{}: {e}", path.display())))
}

fn read_diagram(path: &Path) -> Result<OrderedDiagram, Failure> {
    let raw = read_raw(path)?;
    validate(&raw).map_err(|e| Failure {
        code: 1,
        body: json!({"error": "invalid_diagram", "message": e.to_string(), "violations": e.violations}),
    })
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string(v).expect("json values serialize")
    );
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => {
            let raw = read_raw(&file)?;
            match validate(&raw) {
                Ok(d) => print_json(&json!({"valid": true, "r": d.r(), "violations": []})),
                Err(e) => {
                    print_json(&json!({"valid": false, "r": raw.r, "violations": e.violations}));
                    return Err(Failure {
                        code: 1,
                        body: json!({"error": "invalid_diagram", "message": e.to_string()}),
                    });
                }
            }
        }
        Command::Info { file } => {
            let d = read_diagram(&file)?;
            let p = ProximityMatrix::of(&d);
            let inv = p.inverse().map_err(|e| Failure::input("matrix", e))?;
            print_json(&json!({
                "diagram": d,
                "r": d.r(),
                "dim": d.dim(),
                "roots": d.roots(),
                "frees": d.frees(),
                "satellites": d.satellites(),
                "classes": d.vertex_classes(),
                "proximity_matrix": p.as_matrix(),
                "inverse": inv,
            }));
        }
        Command::Enumerate {
            r,
            count_only,
            unordered,
            budget,
        } => {
            let budget = budget.budget();
            if r == 0 {
                return Err(Failure::input("argument", "r must be at least 1"));
            }
            if count_only {
                let n = enriques::enumerate::count_ordered(r, &budget)
                    .map_err(|e| Failure::budget(&e))?;
                println!("{n}");
            } else {
                let ds = if unordered {
                    enumerate_unordered(r, &budget)
                } else {
                    enriques::enumerate::enumerate_ordered_par(r, &budget)
                }
                .map_err(|e| Failure::budget(&e))?;
                let mut out = String::new();
                for d in &ds {
                    out.push_str(&serde_json::to_string(d).expect("diagrams serialize"));
                    out.push('\n');
                }
                print!("{out}");
            }
        }
        Command::Prime {
            file,
            exhaustive,
            budget,
        } => {
            let d = read_diagram(&file)?;
            let budget = budget.budget();
            let mut verdict = prime_sufficient(&d);
            if exhaustive && !verdict.is_prime() {
                budget.check_r(d.r()).map_err(|e| Failure::budget(&e))?;
                verdict = decide_prime(&d, &budget);
            }
            print_json(&verdict.to_json());
            if exhaustive {
                if let PrimalityVerdict::Unknown(note) = verdict {
                    return Err(Failure {
                        code: 2,
                        body: json!({"error": "budget_exceeded", "message": note}),
                    });
                }
            }
        }
        Command::Specializes {
            file1,
            file2,
            budget,
        } => {
            let d1 = read_diagram(&file1)?;
            let d2 = read_diagram(&file2)?;
            let config = SpecializationConfig {
                budget: budget.budget(),
                ..SpecializationConfig::default()
            };
            print_json(&prove_specialization(&d1, &d2, &config)?.to_json());
        }
        Command::Poset { r, format, budget } => {
            if r == 0 {
                return Err(Failure::input("argument", "r must be at least 1"));
            }
            let poset = build_eff_poset(r, &budget.budget())?;
            match format {
                PosetFormat::Json => print_json(&poset.to_json()),
                PosetFormat::Dot => print!("{}", poset.to_dot()),
            }
        }
        Command::Extend { file, q } => {
            let d = read_diagram(&file)?;
            let (bullet, extended) = d
                .extension_pair(q)
                .map_err(|e| Failure::input("not_extensible", e))?;
            print_json(
                &json!({"extended": extended, "bullet": bullet, "bullet_appended": d.bullet()}),
            );
        }
        Command::Render { file, format } => {
            let d = read_diagram(&file)?;
            match format {
                RenderFormat::Dot => print!("{}", render::to_dot(&d)),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.body);
            ExitCode::from(f.code)
        }
    }
}
