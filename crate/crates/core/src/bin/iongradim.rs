use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use iongradim::cli::{emit, execute, parse_config, OutputFormat};

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
}

/// Run an ion-crystal magnetometry simulation from a TOML config.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_path` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `output_format` in the config.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Inject quoted field values instead of computing them.
    #[arg(long, value_enum)]
    paper_values: Option<Switch>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("IONGRADIM_LOG", "warn")).init();
    let args = Args::parse();

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(errors) => {
            for e in &errors.0 {
                eprintln!("error: {}: {e}", args.config.display());
            }
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_path = out.display().to_string();
    }
    if let Some(f) = args.format {
        config.output_format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Text => OutputFormat::Text,
        };
    }
    if let Some(s) = args.paper_values {
        config.paper_values = matches!(s, Switch::On);
    }

    log::info!("running {} with seed {}", config.command.name(), config.seed);
    let bundle = match execute(&config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for note in &bundle.annotations {
        log::info!("{note}");
    }
    match emit(&bundle, config.output_format, config.output_path.as_ref()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: writing {}: {e}", config.output_path);
            ExitCode::from(2)
        }
    }
}
