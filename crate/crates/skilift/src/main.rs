use std::process::ExitCode;

use clap::Parser;
use skilift::cli::{run, sim_cap_from_env, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match sim_cap_from_env() {
        Ok(Some(cap)) => skilift_core::sim::set_cap(cap),
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (g, out) = match run(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", out.render(g.format));
    if let Some(dir) = &g.output_dir {
        if let Err(e) = out.write_files(dir) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if out.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
