use std::io::Write;

fn main() {
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let code = posweight_cli::run(std::env::args_os(), &mut out, &mut std::io::stderr());
    let _ = out.flush();
    drop(out);
    std::process::exit(code);
}
