use std::io::Write;

fn main() {
    if let Some(n) = std::env::var("MATLOGIC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let (code, text) = matlogic::cli::run_command(std::env::args().skip(1));
    let mut out: Box<dyn Write> = if code == 2 || code == 3 {
        Box::new(std::io::stderr())
    } else {
        Box::new(std::io::stdout())
    };
    let _ = out.write_all(text.as_bytes());
    std::process::exit(code);
}
