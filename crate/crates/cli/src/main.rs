#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use gxtr_core::{Error, Result};
use serde_json::Value;

use args::{Cli, Command};
use commands::Globals;

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 1;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let argv: Vec<String> = std::env::args().collect();
    match parse(argv).and_then(|cli| cli.map(run).transpose()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => EXIT_IO,
                e if e.is_numerical() => EXIT_NUMERICAL,
                _ => EXIT_USAGE,
            })
        }
    }
}

/// Parse argv, splicing in the `--config` file if one is named. `Ok(None)`
/// means clap already handled the request (help, version).
fn parse(argv: Vec<String>) -> Result<Option<Cli>> {
    let Some(cli) = try_parse(&argv)? else { return Ok(None) };
    let Some(path) = cli.config.as_ref() else { return Ok(Some(cli)) };
    let sub = subcommand_name(&cli.command);
    let flags = config::to_flags(&config::load(path)?, sub)?;
    let at = argv
        .iter()
        .position(|a| a == sub)
        .ok_or_else(|| Error::Config(format!("subcommand '{sub}' not found in arguments")))?;
    let mut merged = argv[..=at].to_vec();
    merged.extend(flags);
    merged.extend_from_slice(&argv[at + 1..]);
    try_parse(&merged)
}

fn try_parse(argv: &[String]) -> Result<Option<Cli>> {
    match Cli::try_parse_from(argv) {
        Ok(cli) => Ok(Some(cli)),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            Ok(None)
        }
        Err(e) => {
            let _ = e.print();
            std::process::exit(EXIT_USAGE.into());
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Eval(_) => "eval",
        Command::EstimateConstant(_) => "estimate-constant",
        Command::Simulate(_) => "simulate",
        Command::Tail(_) => "tail",
        Command::Gumbel(_) => "gumbel",
        Command::Probe(_) => "probe",
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Error::Parameter("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let g = Globals {
        seed: cli.seed.unwrap_or(0),
        out: cli.out.as_deref(),
        format: cli.format.as_deref(),
    };
    if g.format.is_some() && g.out.is_none() {
        return Err(Error::Parameter("--format needs --out".into()));
    }
    let v = match &cli.command {
        Command::Eval(a) => {
            if cli.out.is_some() {
                return Err(Error::Parameter("eval prints to stdout; --out is not used".into()));
            }
            commands::eval(a)?
        }
        Command::EstimateConstant(a) => commands::estimate_constant(a, &g)?,
        Command::Simulate(a) => commands::simulate(a, &g)?,
        Command::Tail(a) => commands::tail(a, &g)?,
        Command::Gumbel(a) => commands::gumbel(a, &g)?,
        Command::Probe(a) => commands::probe(a, &g)?,
    };
    let mut stdout = std::io::stdout().lock();
    let text = if cli.json {
        gxtr_core::harness::canonical_json(&v)?
    } else {
        human(&v)
    };
    match writeln!(stdout, "{text}") {
        // a closed pipe (e.g. `| head`) is not a failure of the run
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// One `key: value` line per top-level field; nested values stay compact JSON.
fn human(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}"),
                v => format!("{k}: {v}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        v => v.to_string(),
    }
}
