use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use wavestab_cli::{run, Command, RunOptions};

#[derive(Parser)]
#[command(name = "wavestab", version, about = "Stability analysis of periodic traveling waves")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the wave profile and write it with a JSON summary.
    Profile(Common),
    /// Run every stability criterion on one wave.
    Stability(Common),
    /// Run a grid of analyses along one parameter axis.
    Scan(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, env = "WAVESTAB_THREADS")]
    threads: Option<usize>,
    /// Leave the timestamp out of JSON outputs.
    #[arg(long)]
    no_timestamp: bool,
}

fn main() {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Profile(a) => (Command::Profile, a),
        Cmd::Stability(a) => (Command::Stability, a),
        Cmd::Scan(a) => (Command::Scan, a),
    };
    if let Some(n) = args.threads.filter(|n| *n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not configure {n} threads: {e}");
        }
    }
    let opts = RunOptions { timestamp: !args.no_timestamp };
    std::process::exit(run(command, &args.config, &args.out, &opts));
}
