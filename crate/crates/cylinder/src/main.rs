//! Thin binary entry: everything lives in the library's `cli` module.

fn main() {
    std::process::exit(cylinder::cli::run(std::env::args_os()));
}
