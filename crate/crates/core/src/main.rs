fn main() {
    let (code, out) = kleaf::cli::run_command(std::env::args_os());
    // failed verification reports still belong on stdout
    if code != 0 && (code == 2 || out.starts_with("error:")) {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    std::process::exit(code);
}
