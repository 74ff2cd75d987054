use bergmap::cli::{init_threads, run, Cli};
use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bergmap: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
