//! Command-line front end: argument handling, exit codes and rendering.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use termcheck_core::{
    parse_program, parse_query, test, DetectorConfig, EngineConfig, GrowthRule, Literal, TestConfig, Verdict,
};

pub mod render;

pub const EXIT_TERMINATING: i32 = 0;
pub const EXIT_NON_TERMINATING: i32 = 1;
pub const EXIT_FAULT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvMode {
    Subterm,
    DirectArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

/// Decide whether a logic program terminates for the given concrete queries.
#[derive(Debug, Parser)]
#[command(name = "termcheck", version)]
pub struct Args {
    /// Program file
    pub program: PathBuf,
    /// Query atom; repeat for several queries, checked in order
    #[arg(long = "query", required = true, value_name = "ATOM")]
    pub queries: Vec<String>,
    /// Chain repetitions needed before flagging a derivation (at least 2)
    #[arg(long, default_value_t = 2, value_name = "N")]
    pub depth_bound: usize,
    /// Node budget per query
    #[arg(long, default_value_t = 1_000_000, value_name = "N")]
    pub max_nodes: usize,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub occurs_check: Switch,
    /// Growth rule for expanded variants
    #[arg(long, value_enum, default_value_t = EvMode::Subterm)]
    pub ev_mode: EvMode,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

impl Args {
    pub fn config(&self) -> TestConfig {
        TestConfig {
            engine: EngineConfig {
                occurs_check: self.occurs_check == Switch::On,
                max_nodes: self.max_nodes,
                record_tree: self.format == Format::Dot,
            },
            detector: DetectorConfig {
                depth: self.depth_bound,
                growth: match self.ev_mode {
                    EvMode::Subterm => GrowthRule::Subterm,
                    EvMode::DirectArg => GrowthRule::DirectArg,
                },
            },
        }
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn usage(message: String) -> Self {
        Output { code: EXIT_USAGE, stdout: String::new(), stderr: message }
    }
}

pub fn exit_code(verdict: &Verdict) -> i32 {
    match verdict {
        Verdict::Terminating { .. } => EXIT_TERMINATING,
        Verdict::MostLikelyNonTerminating { .. } => EXIT_NON_TERMINATING,
        Verdict::Fault { .. } => EXIT_FAULT,
    }
}

/// Runs the command line `argv` (program name first).
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Output { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Output::usage(text),
            };
        }
    };
    if args.depth_bound < 2 {
        return Output::usage(format!("error: --depth-bound must be at least 2, got {}\n", args.depth_bound));
    }
    if args.max_nodes == 0 {
        return Output::usage("error: --max-nodes must be positive\n".into());
    }
    match std::fs::read_to_string(&args.program) {
        Ok(source) => execute(&args, &source),
        Err(e) => Output::usage(format!("error: cannot read {}: {e}\n", args.program.display())),
    }
}

/// Checks `source` as the program named in `args`.
pub fn execute(args: &Args, source: &str) -> Output {
    let program = match parse_program(source) {
        Ok(p) => p,
        Err(e) => return Output::usage(format!("error: {}:{e}\n", args.program.display())),
    };
    let mut queries: Vec<Literal> = Vec::with_capacity(args.queries.len());
    for (i, q) in args.queries.iter().enumerate() {
        match parse_query(q) {
            Ok(lit) => queries.push(lit),
            Err(e) => return Output::usage(format!("error: query {} `{q}`: {e}\n", i + 1)),
        }
    }
    let verdict = test(&program, &queries, &args.config());
    let stdout = match args.format {
        Format::Text => render::text(&verdict, &args.queries),
        Format::Json => render::json(&verdict, &args.queries),
        Format::Dot => render::dot(&verdict, &args.queries),
    };
    Output { code: exit_code(&verdict), stdout, stderr: String::new() }
}
