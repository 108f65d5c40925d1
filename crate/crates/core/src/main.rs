fn main() {
    std::process::exit(spatial_outlier::cli::run_cli(std::env::args_os()));
}
