use std::process::ExitCode;

use hardy_leray_cli::{run, RunConfig, EXIT_USAGE};

const THREADS_VAR: &str = "HARDY_LERAY_THREADS";

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let (cfg, print_config) = match RunConfig::parse_from(std::env::args_os()) {
        Ok(parsed) => parsed,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    if print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }

    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.code() as u8);
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
        None => print!("{}", outcome.output),
    }
    ExitCode::from(outcome.code as u8)
}
