use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mstnet::community::Weighting;
use mstnet::config::{ConfigFile, ConfigOverrides, RunConfig};
use mstnet::pipeline::run_pipeline;
use mstnet::synth::{generate, write_panel, SynthSpec};
use mstnet::Error;

#[derive(Parser)]
#[command(
    name = "mstnet",
    version,
    about = "Minimal spanning trees and communities of stock correlation networks"
)]
struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline over every configured window.
    Run(RunArgs),
    /// Write a planted-block synthetic panel (prices, sectors, caps, config).
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    prices: Option<PathBuf>,
    #[arg(long)]
    sectors: Option<PathBuf>,
    #[arg(long)]
    caps: Option<PathBuf>,
    /// START:END:LABEL, repeatable; replaces the configured windows.
    #[arg(long = "window")]
    windows: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    resolution: Option<f64>,
    /// Weight tree edges by strength (1 / distance) for modularity.
    #[arg(long, conflicts_with = "unweighted")]
    weighted: bool,
    /// Count every tree edge as weight 1 for modularity.
    #[arg(long)]
    unweighted: bool,
    /// Drop zero-variance tickers instead of failing.
    #[arg(long)]
    drop_constant: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// graphml, dot, json or csv; repeatable; replaces the configured formats.
    #[arg(long = "format")]
    formats: Vec<String>,
    #[arg(long)]
    histogram_bins: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    blocks: usize,
    #[arg(long)]
    per_block: usize,
    #[arg(long)]
    days: usize,
    #[arg(long)]
    rho_in: f64,
    #[arg(long)]
    rho_out: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn run(args: RunArgs) -> Result<(), Error> {
    let overrides = ConfigOverrides {
        prices: args.prices,
        sectors: args.sectors,
        caps: args.caps,
        window: args.windows,
        seed: args.seed,
        resolution: args.resolution,
        weighted: match (args.weighted, args.unweighted) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        },
        drop_constant: args.drop_constant.then_some(true),
        output_dir: args.output_dir,
        format: args.formats,
        histogram_bins: args.histogram_bins,
    };
    let config = match &args.config {
        Some(path) => RunConfig::load(path, overrides)?,
        None => RunConfig::from_overrides(overrides)?,
    };
    let outcome = run_pipeline(&config)?;
    if outcome.ignored_sector_entries > 0 {
        eprintln!(
            "warning: {} sector entries have no price column",
            outcome.ignored_sector_entries
        );
    }
    println!(
        "{:<16} {:>5} {:>6} {:>5} {:>7} {:>7} {:>4}  weighting",
        "window", "N", "d", "C", "Q", "sigma%", "mk"
    );
    for w in &outcome.windows {
        let b = &w.bundle;
        let m = &b.metrics;
        println!(
            "{:<16} {:>5} {:>6} {:>5.1} {:>7.3} {:>7.1} {:>4}  {} (sigma = {:.4})",
            b.label,
            m.n_nodes,
            m.diameter,
            m.char_path_length,
            m.modularity,
            100.0 * m.sigma,
            m.max_degree,
            match b.weighting {
                Weighting::Strength => "strength",
                Weighting::Unweighted => "unweighted",
            },
            m.sigma
        );
        if !b.dropped_missing.is_empty() || !b.dropped_constant.is_empty() {
            eprintln!(
                "{}: dropped {} tickers with gaps, {} constant",
                b.label,
                b.dropped_missing.len(),
                b.dropped_constant.len()
            );
        }
    }
    println!("wrote {}", outcome.table1_path.display());
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    let spec = SynthSpec::new(
        args.blocks,
        args.per_block,
        args.days,
        args.rho_in,
        args.rho_out,
        args.seed,
    );
    let table = generate(&spec)?;
    let files = write_panel(&table, &args.out)?;
    let (start, end) = table.date_range();
    let config = ConfigFile {
        prices: Some("prices.csv".into()),
        sectors: Some("sectors.csv".into()),
        caps: Some("caps.csv".into()),
        window: vec![format!("{start}:{end}:all")],
        seed: Some(args.seed),
        output_dir: Some("results".into()),
        ..Default::default()
    };
    let config_path = args.out.join("config.toml");
    std::fs::write(&config_path, config.to_toml()?).map_err(|e| Error::Io {
        path: config_path.clone(),
        source: e,
    })?;
    println!(
        "wrote {} tickers x {} days to {} ({})",
        table.n_tickers(),
        table.n_dates(),
        files.prices.parent().unwrap_or(&args.out).display(),
        config_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Synth(args) => synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
