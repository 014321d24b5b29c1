use charpoisson_cli::{render, run, Cli};
use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let seed = std::env::var("CHARPOISSON_SEED").ok();
    let report = match run(&cli, echo, seed.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = render(&report, cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        for sc in report.scenarios.iter().filter(|s| !s.passed) {
            eprintln!("failed: {}", sc.scenario.label());
        }
        ExitCode::from(1)
    }
}
