use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use feq_core::harness::{run_fixture, Fixture};
use feq_core::{EngineConfig, Shell};

#[derive(Parser)]
#[command(name = "feq", version, about = "Temporal reasoner with functional equivalence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a script and print its transcript.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: EngineOpts,
        /// Print stored contingencies and equivalences at the end.
        #[arg(long)]
        dump_memory: bool,
    },
    /// Read lines from standard input interactively.
    Repl {
        #[command(flatten)]
        opts: EngineOpts,
    },
    /// Scenario fixtures with embedded expectations.
    Harness {
        #[command(subcommand)]
        command: HarnessCommand,
    },
}

#[derive(Subcommand)]
enum HarnessCommand {
    /// Run a fixture and report each expectation.
    Run {
        fixture: PathBuf,
        #[arg(long, value_name = "PATH")]
        emit_transcript: Option<PathBuf>,
        #[command(flatten)]
        opts: EngineOpts,
    },
}

#[derive(Args)]
struct EngineOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=100))]
    volume: Option<u32>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Exit with an error on the first malformed line.
    #[arg(long)]
    strict: bool,
}

impl EngineOpts {
    fn config(&self) -> EngineConfig {
        let mut c = EngineConfig { seed: self.seed, ..EngineConfig::default() };
        if let Some(v) = self.volume {
            c.volume = v;
        }
        if let Some(t) = self.threshold {
            c.decision_threshold = t;
        }
        c
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { file, opts, dump_memory } => run_file(&file, &opts, dump_memory),
        Command::Repl { opts } => repl(&opts),
        Command::Harness { command: HarnessCommand::Run { fixture, emit_transcript, opts } } => {
            harness(&fixture, emit_transcript.as_deref(), &opts)
        }
    }
}

fn run_file(file: &Path, opts: &EngineOpts, dump_memory: bool) -> Result<ExitCode> {
    let reader = BufReader::new(File::open(file).with_context(|| format!("cannot open {}", file.display()))?);
    let mut shell = Shell::new(opts.config()).strict(opts.strict);
    let report = shell.run_script(reader).with_context(|| format!("cannot read {}", file.display()))?;
    let mut out = io::stdout().lock();
    for line in &report.transcript {
        writeln!(out, "{line}")?;
    }
    if dump_memory {
        for line in shell.engine().dump_memory() {
            writeln!(out, "{line}")?;
        }
    }
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    Ok(if opts.strict && report.errors() > 0 { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn repl(opts: &EngineOpts) -> Result<ExitCode> {
    let mut shell = Shell::new(opts.config());
    let mut out = io::stdout().lock();
    let mut errors = 0;
    for line in io::stdin().lock().lines() {
        let (lines, diagnostic) = shell.run_line(&line?);
        for l in lines {
            writeln!(out, "{l}")?;
        }
        out.flush()?;
        if let Some(d) = diagnostic {
            eprintln!("{d}");
            errors += 1;
            if opts.strict {
                break;
            }
        }
    }
    Ok(if opts.strict && errors > 0 { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn harness(path: &Path, emit_transcript: Option<&Path>, opts: &EngineOpts) -> Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let name = path.file_stem().map_or_else(|| "fixture".into(), |s| s.to_string_lossy().into_owned());
    let fixture = Fixture::parse(&name, &text)?;
    let report = run_fixture(&fixture, opts.config())?;
    if let Some(p) = emit_transcript {
        fs::write(p, report.transcript_text()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    println!("{report}");
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
