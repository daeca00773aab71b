fn main() {
    std::process::exit(vacuum_cavity_forces::cli::run(std::env::args_os()));
}
