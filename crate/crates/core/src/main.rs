use std::io::{self, BufWriter};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = rosi::cli::main_with(std::env::args_os(), io::stdin().lock(), &mut out, &mut io::stderr());
    ExitCode::from(code as u8)
}
