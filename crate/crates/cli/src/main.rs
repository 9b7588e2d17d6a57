use std::process::ExitCode;

use clap::Parser;
use vqcfd_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(err) => {
            let chain: Vec<String> = err.chain().map(|e| e.to_string()).collect();
            let report =
                serde_json::json!({ "error": { "message": err.to_string(), "causes": chain } });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
