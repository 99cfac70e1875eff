fn main() {
    let (code, text) = spectrakit_cli::execute(std::env::args_os());
    if code == spectrakit_cli::EXIT_OK || text.trim_start().starts_with('{') {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    std::process::exit(code);
}
