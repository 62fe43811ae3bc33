fn main() {
    std::process::exit(lindblad_zeno::cli::run(std::env::args_os()));
}
