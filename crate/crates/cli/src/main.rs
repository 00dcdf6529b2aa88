use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inertia_lab::{execute_with_jobs, presets, resolve_config, Command, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "inertia-lab", version, about = "Damped inertial gradient dynamics: simulate, check, rate, iterate, sweep")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the dynamic and write trajectory.csv.
    Simulate(RunArgs),
    /// Evaluate a condition set on a grid and write margins.csv.
    Check(RunArgs),
    /// Test a rate claim on a trajectory (read or simulated).
    Rate(RunArgs),
    /// Run the inertial proximal algorithm and write iterates.csv.
    Ip(RunArgs),
    /// Run a command over a parameter grid.
    Sweep(RunArgs),
    /// List built-in presets, or print one as JSON.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in config name (see `presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Override a config key, e.g. `--set simulate.horizon=100`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    sets: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Concurrent sweep points.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn run(cmd: Command, args: RunArgs) -> i32 {
    match resolve_config(args.preset.as_deref(), args.config.as_deref(), &args.sets) {
        Ok(doc) => execute_with_jobs(cmd, doc, &args.out, args.jobs),
        Err(e) => {
            eprintln!("inertia-lab {cmd}: {e}");
            let summary = serde_json::json!({
                "command": cmd.as_str(),
                "status": "error",
                "exit_code": e.exit_code(),
                "error": e.to_string(),
                "config": null,
                "result": null,
            });
            if std::fs::create_dir_all(&args.out).is_ok() {
                let text = serde_json::to_string_pretty(&summary).unwrap_or_default() + "\n";
                let _ = std::fs::write(args.out.join("summary.json"), text);
            }
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Cmd::Simulate(a) => run(Command::Simulate, a),
        Cmd::Check(a) => run(Command::Check, a),
        Cmd::Rate(a) => run(Command::Rate, a),
        Cmd::Ip(a) => run(Command::Ip, a),
        Cmd::Sweep(a) => run(Command::Sweep, a),
        Cmd::Presets { name: None } => {
            for n in presets::NAMES {
                let doc = presets::preset(n).expect("built-in preset");
                let cmd = doc["command"].as_str().unwrap_or("");
                let desc = doc["description"].as_str().unwrap_or("");
                println!("{n:<18} {cmd:<9} {desc}");
            }
            0
        }
        Cmd::Presets { name: Some(n) } => match presets::preset(&n) {
            Ok(doc) => {
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
                0
            }
            Err(e) => {
                eprintln!("inertia-lab presets: {e}");
                EXIT_CONFIG
            }
        },
    };
    ExitCode::from(code.clamp(0, 255) as u8)
}
