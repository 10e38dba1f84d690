//! The `macc` command line.
//!
//! ```text
//! macc check    --models DIR... --root TYPE [--libs DIR...]
//! macc bind     --models DIR... --root TYPE --libs DIR... --app FILE
//! macc generate --models DIR... --root TYPE --libs DIR... --app FILE --out DIR
//! macc simulate --models DIR... --root TYPE --libs DIR... --app FILE
//!               --scenario FILE [--trace FILE] [--steps N]
//! ```
//!
//! Diagnostics go to stderr, one line each, sorted by file, line, column,
//! and code. Results (the binding table, generated file paths, the trace
//! without `--trace`) go to stdout.
//!
//! Exit codes:
//!
//! ```text
//! 0  success; warnings may have been printed
//! 1  the model, configuration, or scenario is in error
//! 2  command line usage error
//! 3  an input could not be read or an output could not be written
//! ```

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::binding::{apply_binding, binding_table, render_binding_table};
use crate::check::{check_architecture, check_binding, check_binding_for_simulation};
use crate::codegen;
use crate::diag::{sort_diagnostics, Diagnostic, Severity};
use crate::model::{instantiate, ApplicationConfiguration, InstanceTree};
use crate::parse::workspace::{
    load_application, load_libraries, load_workspace, Libraries, Workspace,
};
use crate::sim;

#[derive(Debug, Parser)]
#[command(
    name = "macc",
    version,
    about = "Architecture model compiler and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse the model directories and report well-formedness diagnostics
    Check(CheckArgs),
    /// Resolve an application's bindings and print the binding table
    Bind(BindArgs),
    /// Generate platform sources for an application
    Generate(GenerateArgs),
    /// Execute an application against a scenario and emit the trace
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Directory scanned recursively for .arc and .cd files; repeatable
    #[arg(long = "models", value_name = "DIR", required = true)]
    models: Vec<PathBuf>,
    /// Root component type instantiated for the application
    #[arg(long, value_name = "TYPE")]
    root: String,
    /// Directory scanned recursively for .lib manifests; repeatable
    #[arg(long = "libs", value_name = "DIR")]
    libs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct BindArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Application configuration file (.app)
    #[arg(long, value_name = "FILE")]
    app: PathBuf,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Application configuration file (.app)
    #[arg(long, value_name = "FILE")]
    app: PathBuf,
    /// Output directory for generated sources
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Application configuration file (.app)
    #[arg(long, value_name = "FILE")]
    app: PathBuf,
    /// Scenario file (JSON)
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,
    /// Trace output file; stdout when omitted
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Overrides the scenario's step count
    #[arg(long, value_name = "N")]
    steps: Option<u64>,
}

/// Runs the command line and returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; clap reports them
            // with exit code 0 and usage errors with 2.
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Check(args) => cmd_check(&args),
        Command::Bind(args) => cmd_bind(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Simulate(args) => cmd_simulate(&args),
    }
}

const EXIT_OK: i32 = 0;
const EXIT_MODEL: i32 = 1;
const EXIT_IO: i32 = 3;

fn load_model(args: &ModelArgs) -> Result<(Workspace, Libraries), i32> {
    let ws = match load_workspace(&args.models) {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("error: {}", e);
            return Err(EXIT_IO);
        }
    };
    let libs = match load_libraries(&args.libs) {
        Ok(libs) => libs,
        Err(e) => {
            eprintln!("error: {}", e);
            return Err(EXIT_IO);
        }
    };
    Ok((ws, libs))
}

/// Parse diagnostics from sources and manifests plus the architecture
/// well-formedness report, unsorted.
fn model_diagnostics(ws: &Workspace, libs: &Libraries) -> Vec<Diagnostic> {
    let mut diags = ws.diagnostics.clone();
    diags.extend(libs.diagnostics.iter().cloned());
    diags.extend(check_architecture(&ws.model).diagnostics);
    diags
}

/// Sorts, prints to stderr, and reports whether any diagnostic is an error.
fn emit(diags: &mut [Diagnostic]) -> bool {
    sort_diagnostics(diags);
    for d in diags.iter() {
        eprintln!("{}", d.render());
    }
    diags.iter().any(|d| d.severity == Severity::Error)
}

fn cmd_check(args: &CheckArgs) -> i32 {
    let (ws, libs) = match load_model(&args.model) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let mut diags = model_diagnostics(&ws, &libs);
    if emit(&mut diags) {
        return EXIT_MODEL;
    }
    if let Err(e) = instantiate(&ws.model, &args.model.root) {
        eprintln!("error: {}", e);
        return EXIT_MODEL;
    }
    EXIT_OK
}

/// Shared front half of bind, generate, and simulate: load everything,
/// merge model and binding diagnostics into one sorted block, and resolve
/// the bindings onto the instance tree.
fn bind_application(
    model_args: &ModelArgs,
    app_path: &Path,
    for_simulation: bool,
) -> Result<(Workspace, Libraries, ApplicationConfiguration, InstanceTree), i32> {
    let (ws, libs) = load_model(model_args)?;
    let mut diags = model_diagnostics(&ws, &libs);
    let config = match load_application(app_path) {
        Err(e) => {
            eprintln!("error: {}", e);
            return Err(EXIT_IO);
        }
        Ok(Err(d)) => {
            diags.push(d);
            emit(&mut diags);
            return Err(EXIT_MODEL);
        }
        Ok(Ok(config)) => config,
    };
    if diags.iter().any(|d| d.severity == Severity::Error) {
        emit(&mut diags);
        return Err(EXIT_MODEL);
    }
    let tree = match instantiate(&ws.model, &model_args.root) {
        Ok(tree) => tree,
        Err(e) => {
            emit(&mut diags);
            eprintln!("error: {}", e);
            return Err(EXIT_MODEL);
        }
    };
    let app_file = app_path.to_string_lossy();
    let report = if for_simulation {
        check_binding_for_simulation(&tree, &config, &app_file, &libs.manifests)
    } else {
        check_binding(
            &tree,
            &config,
            &app_file,
            &libs.manifests,
            codegen::registry(),
        )
    };
    diags.extend(report.diagnostics);
    if emit(&mut diags) {
        return Err(EXIT_MODEL);
    }
    let bound = match apply_binding(&tree, &config, &libs.manifests) {
        Ok(bound) => bound,
        Err(e) => {
            eprintln!("error: {}", e);
            return Err(EXIT_MODEL);
        }
    };
    Ok((ws, libs, config, bound))
}

fn cmd_bind(args: &BindArgs) -> i32 {
    let (_, _, _, bound) = match bind_application(&args.model, &args.app, false) {
        Ok(v) => v,
        Err(code) => return code,
    };
    print!("{}", render_binding_table(&binding_table(&bound)));
    EXIT_OK
}

fn cmd_generate(args: &GenerateArgs) -> i32 {
    let (ws, _, config, bound) = match bind_application(&args.model, &args.app, false) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let set = match codegen::orchestrate(&ws.model, &bound, &config, &args.out) {
        Ok(set) => set,
        Err(e @ codegen::CodegenError::Write { .. }) => {
            eprintln!("error: {}", e);
            return EXIT_IO;
        }
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_MODEL;
        }
    };
    for file in &set.files {
        println!("{}", args.out.join(&file.path).display());
    }
    EXIT_OK
}

fn cmd_simulate(args: &SimulateArgs) -> i32 {
    let (ws, libs, _, bound) = match bind_application(&args.model, &args.app, true) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let text = match std::fs::read_to_string(&args.scenario) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read '{}': {}", args.scenario.display(), e);
            return EXIT_IO;
        }
    };
    let mut scenario = match sim::load_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: invalid scenario: {}", e);
            return EXIT_MODEL;
        }
    };
    if let Some(steps) = args.steps {
        scenario.steps = steps;
    }
    let trace = match sim::run(&bound, &ws.model, &scenario, &libs.manifests) {
        Ok(trace) => trace,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_MODEL;
        }
    };
    match &args.trace {
        Some(path) => {
            if let Err(e) = std::fs::write(path, trace.to_jsonl()) {
                eprintln!("error: cannot write '{}': {}", path.display(), e);
                return EXIT_IO;
            }
        }
        None => print!("{}", trace.to_jsonl()),
    }
    EXIT_OK
}
