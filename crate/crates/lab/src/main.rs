use clap::Parser;
use dunkl_lab::{run, ExperimentConfig, Suite};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical checks for commutators of Calderón-Zygmund operators in the Dunkl setting.
#[derive(Parser)]
#[command(name = "dunkl-lab", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Suite,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output_dir` from the configuration, then `./dunkl-lab-out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Overrides the configuration seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ExperimentConfig::load(&cli.config).and_then(|mut cfg| {
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        let out = cli.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("dunkl-lab-out"));
        run(&cfg, cli.subcommand, &out, cli.jobs).map(|o| (o, out))
    });
    match result {
        Ok((outcome, out)) => {
            for r in &outcome.reports {
                let status = if r.passed() { "ok" } else { "FAILED" };
                println!("{:<18} {status:<6} {:>8.1}s  {} gates", r.suite, r.runtime_s, r.gates.len());
                for g in r.failed_gates() {
                    println!("    failed: {} ({})", g.name, g.detail);
                }
            }
            println!("reports written to {}", out.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("dunkl-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
