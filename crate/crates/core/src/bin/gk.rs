use std::io::Write;

fn main() {
    let out = gkcat::cli::run_cli(std::env::args_os());
    if out.code == gkcat::cli::EXIT_MALFORMED {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
        let _ = std::io::stdout().flush();
    }
    std::process::exit(out.code);
}
