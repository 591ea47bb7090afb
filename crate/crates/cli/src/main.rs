use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cmsqueeze::sweep::{
    describe_base_point, emit, figure_preset, run_sweep, OutputFormat, ResultTable, RowReport, SweepConfig, SweepOptions,
    Target, PRESET_NAMES,
};
use cmsqueeze::Error;

/// Squeezing of magnons, phonons and cavity output in cavity magnomechanics.
#[derive(Parser)]
#[command(name = "cmsqueeze", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in figure preset.
    Preset {
        /// One of fig2a, fig2b, fig3a-fig3d, fig4a-fig4c, figS1.
        name: String,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run the sweep described by a config file.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Check a config file and describe its first grid point.
    Validate { config: PathBuf },
    /// Compute output-field squeezing spectra from a config file.
    Spectrum {
        config: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Args)]
struct RunFlags {
    /// Output file; defaults to output.path from the config, else stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// csv or json; defaults to output.format from the config.
    #[arg(long, short)]
    format: Option<String>,
    /// Worker threads (0 = one per core).
    #[arg(long, short, default_value_t = 0)]
    jobs: usize,
    /// No progress on stderr.
    #[arg(long, short)]
    quiet: bool,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(_) | Error::InvalidParameter(_) | Error::Io { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn execute(config: &SweepConfig, flags: &RunFlags) -> Result<(), Failure> {
    let format = match &flags.format {
        Some(f) => OutputFormat::parse(f)?,
        None => config.format,
    };
    let quiet = flags.quiet;
    let progress = |r: RowReport<'_>| {
        if r.status != "ok" {
            eprintln!("point {}: {}", r.index, r.status);
        }
        if r.done == r.total || r.done % 100 == 0 {
            eprintln!("{}/{} points", r.done, r.total);
        }
    };
    let table = run_sweep(
        config,
        &SweepOptions { jobs: flags.jobs },
        if quiet { None } else { Some(&progress) },
    )?;

    match flags.out.as_ref().or(config.path.as_ref()) {
        Some(path) => emit(&table, config, format, path)?,
        None => {
            let text = match format {
                OutputFormat::Csv => table.to_csv()?,
                OutputFormat::Json => table.to_json(config)?,
            };
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))?;
        }
    }
    if whole_run_failed(&table) {
        return Err(Failure::Numerical("no grid point could be evaluated".into()));
    }
    Ok(())
}

fn whole_run_failed(table: &ResultTable) -> bool {
    let Some(status) = table.column("status") else {
        return false;
    };
    !status.is_empty() && status.iter().all(|s| s.as_text().is_some_and(|t| t.starts_with("error")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Preset { name, run } => {
            let config = figure_preset(&name).map_err(|_| {
                Failure::Usage(format!("unknown preset '{name}'; available: {}", PRESET_NAMES.join(", ")))
            })?;
            execute(&config, &run)
        }
        Command::Sweep { config, run } => execute(&SweepConfig::from_file(&config)?, &run),
        Command::Spectrum { config, run } => {
            let config = SweepConfig::from_file(&config)?;
            if config.target != Target::OutputSpectrum {
                return Err(Failure::Usage(format!(
                    "spectrum needs sweep.target = output_spectrum, found {}",
                    config.target.name()
                )));
            }
            execute(&config, &run)
        }
        Command::Validate { config } => {
            let config = SweepConfig::from_file(&config)?;
            print!("{}", describe_base_point(&config)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
