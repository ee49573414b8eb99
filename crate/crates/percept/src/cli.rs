//! Argument parsing. Every configuration key doubles as a long flag.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches};

use crate::config::{KeyKind, KEYS};
use crate::error::Result;
use crate::pipeline::{run_pipeline, Command};
use crate::StudyConfig;

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn shared_args() -> Vec<Arg> {
    let mut args = vec![Arg::new("config")
        .long("config")
        .value_name("FILE")
        .value_parser(clap::value_parser!(PathBuf))
        .help("key = value settings file")];
    for k in KEYS {
        let arg = Arg::new(k.name).long(flag_name(k.name)).help(k.help);
        args.push(match k.kind {
            KeyKind::Switch => arg.action(ArgAction::SetTrue),
            _ => arg.value_name("VALUE"),
        });
    }
    args
}

/// The `percept` command definition.
pub fn command() -> clap::Command {
    let subcommands = Command::ALL
        .iter()
        .map(|c| clap::Command::new(c.name()).about(c.about()).args(shared_args()));
    clap::Command::new("percept")
        .about("Perceptual feature study pipeline")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommands(subcommands)
}

fn overrides(m: &ArgMatches) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for k in KEYS {
        match k.kind {
            KeyKind::Switch => {
                if m.get_flag(k.name) {
                    out.insert(k.name.to_owned(), "true".to_owned());
                }
            }
            _ => {
                if let Some(v) = m.get_one::<String>(k.name) {
                    out.insert(k.name.to_owned(), v.clone());
                }
            }
        }
    }
    out
}

fn execute(name: &str, m: &ArgMatches) -> Result<String> {
    let command = Command::ALL.into_iter().find(|c| c.name() == name).expect("registered subcommand");
    let cfg = StudyConfig::resolve(m.get_one::<PathBuf>("config").map(PathBuf::as_path), &overrides(m))?;
    let outputs = run_pipeline(&cfg, command)?;
    outputs.write(&cfg.out_dir)?;
    Ok(outputs.report)
}

/// Parses `args`, runs the chosen stage and returns the exit status:
/// 0 on success, 1 on a data error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match execute(name, sub) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(report.as_bytes());
            let _ = stdout.flush();
            0
        }
        Err(e) => {
            eprintln!("percept {name}: {e}");
            e.exit_code()
        }
    }
}
