use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use radinfo::config::{resolve_file, Kind, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Verb {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Sweep,
}

impl From<Verb> for Kind {
    fn from(v: Verb) -> Self {
        match v {
            Verb::Fig1 => Kind::Fig1,
            Verb::Fig2 => Kind::Fig2,
            Verb::Fig3 => Kind::Fig3,
            Verb::Fig4 => Kind::Fig4,
            Verb::Sweep => Kind::Sweep,
        }
    }
}

/// Radar information experiments: posterior surfaces, range-Doppler
/// information, entropy error and Doppler scattering information.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    experiment: Verb,
    /// TOML config; a previous run's manifest.txt works too.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Use the full-size parameters instead of the desk-scale defaults.
    #[arg(long)]
    paper_scale: bool,
    /// Worker threads; 0 or absent picks one per core.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = Kind::from(cli.experiment);
    let overrides = Overrides { seed: cli.seed, trials: cli.trials, paper_scale: cli.paper_scale };
    let result = resolve_file(kind, cli.config.as_deref(), &overrides)
        .and_then(|spec| radinfo::run(kind, &spec, &cli.out, cli.threads));
    match result {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            println!("{} ({} rows)", summary.csv.display(), summary.rows);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
