use clap::{Parser, ValueEnum};
use corner_lens::cli::{main_with, Command};
use std::path::PathBuf;

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Spectrum,
    Frequency,
    Profile,
    Counterexample,
    Verify,
}

/// Frequency functions, cap spectra and blow-up profiles at conical boundary points.
#[derive(Parser)]
#[command(name = "corner-lens", version)]
struct Args {
    command: Cmd,
    /// JSON (or .toml) run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() {
    let args = Args::parse();
    if let Some(j) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
        {
            eprintln!("{{\"error\":{{\"kind\":\"config\",\"message\":\"{e}\"}}}}");
            std::process::exit(2);
        }
    }
    let cmd = match args.command {
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Frequency => Command::Frequency,
        Cmd::Profile => Command::Profile,
        Cmd::Counterexample => Command::Counterexample,
        Cmd::Verify => Command::Verify,
    };
    std::process::exit(main_with(cmd, &args.config, &args.out, args.seed));
}
