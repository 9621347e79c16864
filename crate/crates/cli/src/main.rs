//! `qtunnel <scenario> [--config FILE] [--key value ...] --out PATH`
//!
//! Regenerates tunneling-profile data as CSV. Every config-file key has a
//! matching `--key` flag; flags win over file values.

mod config;
mod error;
mod output;
mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};

use config::{RunConfig, Scenario, Settings, KEYS};
use error::CliError;

fn key_args() -> Vec<Arg> {
    KEYS.iter()
        .filter(|k| k.name != "scenario")
        .map(|k| {
            Arg::new(k.name)
                .long(k.name)
                .value_name("VALUE")
                .help(k.help)
                .allow_hyphen_values(true)
                .action(ArgAction::Set)
        })
        .collect()
}

fn cli() -> Command {
    let mut cmd = Command::new("qtunnel")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Tunneling through rectangular and smooth barriers: total and effective potentials as CSV")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sc in Scenario::ALL {
        cmd = cmd.subcommand(
            Command::new(sc.name())
                .about(sc.about())
                .arg(Arg::new("config").long("config").value_name("FILE").help("key = value configuration file"))
                .args(key_args()),
        );
    }
    cmd.subcommand(
        Command::new("validate")
            .about("check a configuration file without running it; exit 0 iff clean")
            .arg(Arg::new("file").required(true).value_name("FILE")),
    )
}

fn read_settings(path: &Path) -> Result<(Settings, config::Diagnostics), CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Settings::parse(&text)
}

fn run_scenario(sc: Scenario, m: &ArgMatches) -> Result<PathBuf, CliError> {
    let (mut settings, diags) = match m.get_one::<String>("config") {
        Some(p) => read_settings(Path::new(p))?,
        None => Default::default(),
    };
    if !diags.is_empty() {
        return Err(CliError::Invalid(diags));
    }
    for k in KEYS.iter().filter(|k| k.name != "scenario") {
        if let Some(v) = m.get_one::<String>(k.name) {
            settings.set_flag(k.name, v);
        }
    }
    let cfg = RunConfig::resolve(sc, &settings).map_err(CliError::Invalid)?;
    let out = cfg.out.clone().ok_or_else(|| CliError::Usage("no output path; pass --out PATH".into()))?;
    let table = scenario::run(&cfg)?;
    let bytes = output::render(&cfg, &table)?;
    output::write_atomic(&out, &bytes)?;
    Ok(out)
}

fn validate(path: &Path) -> Result<(), CliError> {
    let (settings, mut diags) = read_settings(path)?;
    let scenario = match settings.entries.get("scenario") {
        Some(e) => match Scenario::parse(&e.value) {
            Some(sc) => Some(sc),
            None => {
                diags.0.push(format!("{}: unknown scenario `{}`", e.origin, e.value));
                None
            }
        },
        None => {
            diags.0.push("missing `scenario` key".into());
            None
        }
    };
    if let Some(sc) = scenario {
        if let Err(d) = RunConfig::resolve(sc, &settings) {
            diags.0.extend(d.0);
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid(diags))
    }
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let result = if name == "validate" {
        let file = sub.get_one::<String>("file").expect("required");
        validate(Path::new(file)).map(|()| println!("{file}: ok"))
    } else {
        let sc = Scenario::parse(name).expect("registered scenario");
        run_scenario(sc, sub).map(|out| println!("wrote {}", out.display()))
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(e.exit_code())
        }
    }
}
