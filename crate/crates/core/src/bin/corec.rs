use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    // Deeply nested expressions recurse in the parser and printer.
    let worker = std::thread::Builder::new().stack_size(256 << 20).spawn(|| {
        let stdin = io::stdin();
        let mut input = stdin.lock();
        let mut out = io::stdout().lock();
        let mut err = io::stderr().lock();
        let code = corec::cli::run(std::env::args_os(), &mut input, &mut out, &mut err);
        let _ = out.flush();
        code
    });
    let code = worker.expect("spawn main thread").join().unwrap_or(4);
    ExitCode::from(code as u8)
}
