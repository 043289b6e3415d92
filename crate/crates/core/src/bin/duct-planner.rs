fn main() {
    std::process::exit(duct_planner::cli::run(std::env::args_os()));
}
