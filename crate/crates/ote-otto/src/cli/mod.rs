//! Command-line interface: argument parsing, dispatch, exit codes.
//!
//! `ote-otto <command> --config <path> [--out <path>] [--format csv|json]
//! [--threads N]`. Commands: `rates`, `steady`, `cycle`, `sweep`, and
//! `reproduce <study>` (which runs a bundled preset instead of a config
//! file). Exit codes: 0 success, 1 configuration problem, 2 numerical
//! failure, 3 I/O failure. The worker-thread count comes from `--threads`,
//! or from `OTE_OTTO_THREADS` when the flag is absent.

pub mod config;
pub mod runner;
pub mod table;

pub use config::{load_config, parse_config, CycleMode, OutputFormat, RunConfig};
pub use runner::{
    cycle_table, rates_table, steady_table, study_table, sweep_table, StudyTarget,
};
pub use table::{Column, ResultTable};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ote-otto",
    version,
    about = "Quantum Otto cycles driven by the out-of-equilibrium field of a heated slab"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the result table here instead of the config's output path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format override.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Worker threads for sweeps and field quadratures.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Subcommand)]
enum Cmd {
    /// Exchange rates and effective temperature over the frequency grid.
    Rates,
    /// Composite steady state and apparent working-fluid temperature.
    Steady,
    /// One cycle at the configured compression ratio (and stroke speed).
    Cycle,
    /// Cycle family over the configured grids.
    Sweep,
    /// Run a bundled study preset.
    Reproduce {
        #[arg(value_enum)]
        target: StudyTarget,
    },
}

/// Entry point used by `main`; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Testable entry point: parse `args`, execute, map errors to exit codes.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("OTE_OTTO_THREADS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                Error::config(format!(
                    "OTE_OTTO_THREADS must be a positive integer, got '{s}'"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            return Err(Error::config("thread count must be at least 1"));
        }
        // The global pool can be sized only once per process; a late call
        // (e.g. after an implicit default initialization) keeps the
        // existing pool, which is the best available behavior.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    init_threads(cli.threads)?;
    let (cfg, table) = match cli.command {
        Cmd::Reproduce { target } => {
            if cli.config.is_some() {
                return Err(Error::config(
                    "reproduce runs its bundled preset; --config is not accepted",
                ));
            }
            runner::study_table(target)?
        }
        cmd => {
            let path = cli.config.as_deref().ok_or_else(|| {
                Error::config("--config <path> is required for this command")
            })?;
            let cfg = config::load_config(path)?;
            let table = match cmd {
                Cmd::Rates => runner::rates_table(&cfg)?,
                Cmd::Steady => runner::steady_table(&cfg)?,
                Cmd::Cycle => runner::cycle_table(&cfg)?,
                Cmd::Sweep => runner::sweep_table(&cfg)?,
                Cmd::Reproduce { .. } => unreachable!("handled above"),
            };
            (cfg, table)
        }
    };
    let format = cli.format.unwrap_or(cfg.output.format);
    let path = cli.out.or_else(|| cfg.output.path.clone());
    table.write_to(path.as_deref(), format, cfg.output.precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;
    use std::path::Path;

    fn temp_path(tag: &str) -> PathBuf {
        std::env::temp_dir().join(format!(
            "ote-otto-{}-{tag}",
            std::process::id()
        ))
    }

    fn write_temp(tag: &str, contents: &str) -> PathBuf {
        let p = temp_path(tag);
        fs::write(&p, contents).unwrap();
        p
    }

    const SMALL_RUN: &str = r#"
        [environment]
        material = "sic"
        slab_temperature = 700.0
        blackbody_temperature = 200.0

        [cycle]
        mode = "standard"
        k_grid = { start = 0.4, stop = 0.8, points = 4 }
    "#;

    #[test]
    fn missing_config_file_exits_with_the_io_code() {
        let code = run_from([
            "ote-otto",
            "sweep",
            "--config",
            "/nonexistent/run.toml",
        ]);
        assert_eq!(code, 3);
    }

    #[test]
    fn invalid_config_exits_with_the_config_code() {
        let p = write_temp("bad.toml", "[environment]\nmaterial = \"unobtainium\"\nslab_temperature = 1.0\nblackbody_temperature = 1.0\n");
        let code = run_from([
            "ote-otto".to_string(),
            "sweep".into(),
            "--config".into(),
            p.display().to_string(),
        ]);
        assert_eq!(code, 1);
        let _ = fs::remove_file(p);
    }

    #[test]
    fn missing_config_flag_is_a_config_error() {
        assert_eq!(run_from(["ote-otto", "sweep"]), 1);
    }

    #[test]
    fn sweep_writes_a_parseable_table_and_exits_cleanly() {
        let cfg = write_temp("run.toml", SMALL_RUN);
        let out = temp_path("run.csv");
        let code = run_from([
            "ote-otto".to_string(),
            "sweep".into(),
            "--config".into(),
            cfg.display().to_string(),
            "--out".into(),
            out.display().to_string(),
        ]);
        assert_eq!(code, 0);
        let text = fs::read_to_string(&out).unwrap();
        let table = ResultTable::from_csv(&text).unwrap();
        assert_eq!(table.rows.len(), 4);
        assert_eq!(table.metadata.get("command").unwrap(), "sweep");
        assert!(table.metadata.contains_key("config_digest"));
        assert!(table.metadata.contains_key("version"));
        assert!(table.metadata.contains_key("timestamp"));
        let _ = fs::remove_file(cfg);
        let _ = fs::remove_file(out);
    }

    #[test]
    fn format_flag_overrides_the_config() {
        let cfg = write_temp("fmt.toml", SMALL_RUN);
        let out = temp_path("fmt.json");
        let code = run_from([
            "ote-otto".to_string(),
            "sweep".into(),
            "--config".into(),
            cfg.display().to_string(),
            "--out".into(),
            out.display().to_string(),
            "--format".into(),
            "json".into(),
        ]);
        assert_eq!(code, 0);
        let table = ResultTable::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(table.rows.len(), 4);
        let _ = fs::remove_file(cfg);
        let _ = fs::remove_file(out);
    }

    #[test]
    fn reproduce_rejects_an_explicit_config() {
        let p = write_temp("extra.toml", SMALL_RUN);
        let code = run_from([
            "ote-otto".to_string(),
            "reproduce".into(),
            "sec4".into(),
            "--config".into(),
            p.display().to_string(),
        ]);
        assert_eq!(code, 1);
        let _ = fs::remove_file(p);
    }

    #[test]
    fn help_and_version_exit_zero() {
        assert_eq!(run_from(["ote-otto", "--help"]), 0);
        assert_eq!(run_from(["ote-otto", "--version"]), 0);
        assert_eq!(run_from(["ote-otto", "no-such-command"]), 1);
    }

    #[test]
    fn preset_files_exist_on_disk_and_match_the_embedded_copies() {
        // the embedded presets are the files in presets/ — keep them in sync
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
        for target in [
            StudyTarget::Fig5,
            StudyTarget::Fig6,
            StudyTarget::Fig7,
            StudyTarget::Sec4,
        ] {
            let on_disk =
                fs::read_to_string(root.join(format!("{}.toml", target.name()))).unwrap();
            assert_eq!(on_disk, target.preset_text());
            // and each preset must parse cleanly
            parse_config(target.preset_text()).unwrap();
        }
    }
}
