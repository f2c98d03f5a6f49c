fn main() {
    std::process::exit(fda_flock::cli::run_main());
}
