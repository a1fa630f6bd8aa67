//! Command-line front end: argument and config-file parsing, dispatch to
//! the experiments, and result files plus a manifest per run.
//!
//! Exit codes: `0` success, `2` configuration or input error, `3` a
//! diagnostic check failed (results are still written).

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Arg, ArgAction, ArgMatches, Command};

use commands::{CliError, Outcome};
use config::{spec, Resolved, COMMANDS};
use output::{git_describe, write_file, Manifest};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "CONTPERC_OUT";

fn cli() -> Command {
    let mut cmd = Command::new("contperc")
        .about("Monte Carlo experiments on the percolated random geometric graph")
        .subcommand_required(false)
        .arg(Arg::new("config").long("config").value_name("FILE").global(true).help("key = value config file"))
        .arg(
            Arg::new("from-manifest")
                .long("from-manifest")
                .value_name("FILE")
                .help("re-run the command and configuration recorded in a manifest"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .global(true)
                .help(format!("output directory (default ${OUT_ENV} or ./results)")),
        )
        .arg(
            Arg::new("parallel")
                .long("parallel")
                .value_name("N")
                .global(true)
                .value_parser(clap::value_parser!(usize))
                .help("worker threads (default: available cores)"),
        );
    for c in COMMANDS {
        let mut sub = Command::new(c.name).about(c.about);
        for k in c.keys {
            let help = match k.default {
                Some(d) => format!("{} [default: {d}]", k.help),
                None => k.help.to_string(),
            };
            sub = sub.arg(Arg::new(k.name).long(k.name).value_name("VALUE").action(ArgAction::Set).allow_hyphen_values(true).help(help));
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn resolve(m: &ArgMatches) -> Result<Resolved, CliError> {
    let manifest: Option<serde_json::Value> = match m.get_one::<String>("from-manifest") {
        Some(path) => Some(serde_json::from_str(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let manifest_cmd = manifest.as_ref().and_then(|v| v["command"].as_str().map(str::to_string));
    let (name, sub) = match (m.subcommand(), &manifest_cmd) {
        (Some((name, _)), Some(mc)) if name != mc => {
            return Err(CliError::Config(format!("manifest is for '{mc}', not '{name}'")));
        }
        (Some((name, sub)), _) => (name.to_string(), Some(sub)),
        (None, Some(mc)) => (mc.clone(), None),
        (None, None) => return Err(CliError::Config("no command given".into())),
    };
    let command = spec(&name).ok_or_else(|| CliError::Config(format!("unknown command '{name}'")))?;
    let mut r = Resolved::new(command);
    if let Some(obj) = manifest.as_ref().and_then(|v| v["config"].as_object()) {
        for (k, v) in obj {
            let v = v.as_str().ok_or_else(|| CliError::Config(format!("manifest value of '{k}' is not a string")))?;
            r.set(k, v)?;
        }
    }
    if let Some(path) = m.get_one::<String>("config") {
        r.apply_file(&std::fs::read_to_string(path)?)?;
    }
    if let Some(sub) = sub {
        for k in command.keys {
            if let Some(v) = sub.get_one::<String>(k.name) {
                r.set(k.name, v)?;
            }
        }
    }
    Ok(r)
}

fn out_dir(m: &ArgMatches) -> PathBuf {
    m.get_one::<String>("out")
        .cloned()
        .or_else(|| std::env::var(OUT_ENV).ok())
        .unwrap_or_else(|| "results".to_string())
        .into()
}

fn execute(r: &Resolved, dir: &Path, parallel: Option<usize>) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let outcome = match parallel {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?
            .install(|| commands::run(r))?,
        None => commands::run(r)?,
    };
    for (name, contents) in &outcome.files {
        write_file(dir, name, contents)?;
    }
    let manifest = Manifest {
        schema_version: 1,
        command: r.command.to_string(),
        config: r.to_json(),
        config_hash: r.hash(),
        git_describe: git_describe(),
        seeds: outcome.seeds.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: outcome.files.iter().map(|f| f.0.clone()).collect(),
        status: match &outcome.diagnostic {
            Some(d) => format!("diagnostic failure: {d}"),
            None => "ok".to_string(),
        },
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_file(dir, "manifest.json", &text)?;
    Ok(outcome)
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let m = match cli().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if m.get_one::<usize>("parallel") == Some(&0) {
        eprintln!("configuration error: '--parallel' must be >= 1");
        return 2;
    }
    let result = resolve(&m).and_then(|r| execute(&r, &out_dir(&m), m.get_one::<usize>("parallel").copied()));
    match result {
        Ok(o) => match o.diagnostic {
            Some(d) => {
                eprintln!("diagnostic failure: {d}");
                3
            }
            None => 0,
        },
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
