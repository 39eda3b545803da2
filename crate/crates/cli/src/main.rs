use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = nlgames_cli::main_with(std::env::args_os(), &mut out, &mut io::stderr());
    if out.flush().is_err() && code == nlgames_cli::exit::SUCCESS {
        std::process::exit(nlgames_cli::exit::IO);
    }
    std::process::exit(code);
}
