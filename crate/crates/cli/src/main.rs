//! `sheafcalc`: validation, cohomology and spectral sequence reports for
//! sheaves on finite spaces.

mod checks;
mod commands;
mod error;
mod format;
mod inputs;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sheaf_core::spectral::Axis;

use commands::Report;
use error::CliError;
use inputs::{Caps, Inputs};

#[derive(Parser)]
#[command(name = "sheafcalc", version, about = "Exact sheaf cohomology on finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Largest number of open sets a space may have.
    #[arg(long, global = true, env = "SHEAFCALC_MAX_OPENS", default_value_t = 4096)]
    max_opens: usize,
    /// Largest number of points a space may have.
    #[arg(long, global = true, default_value_t = 12)]
    max_points: usize,
    /// Largest accepted `--max-degree`.
    #[arg(long, global = true, default_value_t = 8)]
    degree_cap: usize,
    /// Largest spectral sequence page that may be computed or shown.
    #[arg(long, global = true, default_value_t = 12)]
    pages_cap: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    P,
    Q,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a space and optionally check the sheaf axioms of a sheaf on it.
    Check {
        #[arg(long)]
        space: String,
        #[arg(long)]
        sheaf: Option<String>,
    },
    /// Sheaf cohomology through the Godement resolution, checked against the
    /// order-complex oracle.
    Cohomology {
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        sheaf: String,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Whether every restriction from the whole space is onto.
    Flasque {
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        sheaf: String,
    },
    /// Hypercohomology of a complex of sheaves with both spectral sequences.
    Hyper {
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        complex: String,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        /// Show pages up to this one.
        #[arg(long)]
        pages: Option<usize>,
    },
    /// Spectral sequence of a double complex.
    Ss {
        #[arg(long)]
        complex: String,
        #[arg(long, value_enum, default_value_t = AxisArg::P)]
        axis: AxisArg,
        /// Show pages up to this one.
        #[arg(long)]
        pages: Option<usize>,
    },
    /// Summary of the Godement resolution of a sheaf.
    Resolve {
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        sheaf: String,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Compare sheaf cohomology with the cohomology of the global sections of
    /// a resolution.
    AcyclicCheck {
        #[arg(long)]
        space: Option<String>,
        /// Use the Godement resolution of this sheaf.
        #[arg(long, conflicts_with = "complex")]
        sheaf: Option<String>,
        /// A bundled resolution or a sheaf-complex file carrying one.
        #[arg(long)]
        complex: Option<String>,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// The bundled examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
    /// Print the canonical file of a bundled space, sheaf or complex.
    Export {
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        sheaf: Option<String>,
        #[arg(long)]
        complex: Option<String>,
        /// Length of bundled Godement complexes.
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Run the bundled acceptance checks.
    Run {
        #[arg(long)]
        criterion: Option<usize>,
    },
}

fn dispatch(command: &Command, inputs: Inputs) -> Result<Report, CliError> {
    let opt = Option::as_deref;
    match command {
        Command::Check { space, sheaf } => commands::check(inputs, space, opt(sheaf)),
        Command::Cohomology { space, sheaf, max_degree } => commands::cohomology(inputs, opt(space), sheaf, *max_degree),
        Command::Flasque { space, sheaf } => commands::flasque(inputs, opt(space), sheaf),
        Command::Hyper { space, complex, max_degree, pages } => {
            commands::hyper(inputs, opt(space), complex, *max_degree, *pages)
        }
        Command::Ss { complex, axis, pages } => {
            let axis = match axis {
                AxisArg::P => Axis::ByP,
                AxisArg::Q => Axis::ByQ,
            };
            commands::ss(inputs, complex, axis, *pages)
        }
        Command::Resolve { space, sheaf, max_degree } => commands::resolve(inputs, opt(space), sheaf, *max_degree),
        Command::AcyclicCheck { space, sheaf, complex, max_degree } => {
            commands::acyclic_check(inputs, opt(space), opt(sheaf), opt(complex), *max_degree)
        }
        Command::Corpus { action: CorpusAction::List } => commands::corpus_list(inputs),
        Command::Corpus { action: CorpusAction::Run { criterion } } => commands::corpus_run(inputs, *criterion),
        Command::Corpus { action: CorpusAction::Export { .. } } => unreachable!("handled before dispatch"),
    }
}

fn render_json(report: &Report, args: &[String], elapsed_ms: u128) -> String {
    let v = json!({
        "format_version": format::FORMAT_VERSION,
        "kind": "report",
        "command": report.command,
        "args": args,
        "inputs": report.inputs.records.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "result": Value::Object(report.result.clone()),
        "timing": { "elapsed_ms": elapsed_ms.to_string() },
    });
    format::canonical_string(&v)
}

fn render_text(report: &Report, args: &[String], elapsed_ms: u128) -> String {
    let mut out = format!("sheafcalc {}\n", args.join(" "));
    for r in &report.inputs.records {
        out.push_str(&format!("input {} {} sha256 {}\n", r.role, r.source, r.sha256));
    }
    for l in &report.lines {
        out.push_str(l);
        out.push('\n');
    }
    out.push_str(&format!("elapsed: {elapsed_ms} ms\n"));
    out
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let caps = Caps {
        points: cli.opts.max_points,
        opens: cli.opts.max_opens,
        degree: cli.opts.degree_cap,
        pages: cli.opts.pages_cap,
    };
    let start = Instant::now();
    let json_mode = cli.opts.format == OutputFormat::Json;
    if let Command::Corpus { action: CorpusAction::Export { space, sheaf, complex, max_degree } } = &cli.command {
        let opt = Option::as_deref;
        return match commands::corpus_export(Inputs::new(caps), opt(space), opt(sheaf), opt(complex), *max_degree) {
            Ok(doc) => {
                print!("{doc}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e, json_mode),
        };
    }
    match dispatch(&cli.command, Inputs::new(caps)) {
        Ok(report) => {
            let ms = start.elapsed().as_millis();
            let out = if json_mode { render_json(&report, &args, ms) } else { render_text(&report, &args, ms) };
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, json_mode),
    }
}

fn fail(e: &CliError, json_mode: bool) -> ExitCode {
    if json_mode {
        print!("{}", format::canonical_string(&e.to_json()));
    } else {
        eprintln!("error: {e}");
    }
    ExitCode::from(e.exit_code())
}
