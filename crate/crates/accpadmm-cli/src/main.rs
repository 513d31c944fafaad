use std::io;
use std::process::ExitCode;

use accpadmm_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
