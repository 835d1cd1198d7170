use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gamma_affine_cli::{catalogue, config, suites};

#[derive(Parser)]
#[command(name = "gamma-affine", about = "Exact verifier for twisted affine Lie algebra identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a config and run verification suites.
    Check {
        /// Path to a session config.
        cfg: PathBuf,
        /// Suite to run (default: the config's own list).
        #[arg(long)]
        suite: Option<String>,
        /// Override the degree window.
        #[arg(long)]
        window: Option<i64>,
        /// Override the module truncation depth.
        #[arg(long)]
        depth: Option<i64>,
        /// Also write the report to a file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List the bundled example presentations.
    Examples,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Examples => {
            for e in catalogue::entries() {
                let args = if e.args.is_empty() {
                    String::new()
                } else {
                    format!(" <{}>", e.args.replace(' ', "> <"))
                };
                println!("{}{}  (window {})\n    {}", e.name, args, e.default_window, e.description);
            }
            ExitCode::SUCCESS
        }
        Command::Check { cfg, suite, window, depth, report } => {
            let name = cfg
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "config".to_string());
            let text = match std::fs::read_to_string(&cfg) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {}", cfg.display(), e);
                    return ExitCode::from(2);
                }
            };
            let mut session = match config::parse_config(&name, &text) {
                Ok(s) => s,
                Err(errors) => {
                    for e in errors {
                        eprintln!("error: {}", e);
                    }
                    return ExitCode::from(2);
                }
            };
            if let Some(w) = window {
                session.window = w;
            }
            if let Some(d) = depth {
                session.depth = d;
            }
            let selected = match suite {
                Some(s) => vec![s],
                None => session.suites.clone(),
            };
            let mut all_pass = true;
            let mut rendered = String::new();
            for s in &selected {
                match suites::run_suite(&session, s) {
                    Ok(vr) => {
                        all_pass &= vr.passed();
                        rendered.push_str(&vr.render());
                    }
                    Err(e) => {
                        eprintln!("error: {}", e);
                        return ExitCode::from(2);
                    }
                }
            }
            print!("{}", rendered);
            if let Some(path) = report {
                if let Err(e) = std::fs::write(&path, &rendered) {
                    eprintln!("error: cannot write {}: {}", path.display(), e);
                    return ExitCode::from(2);
                }
            }
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
