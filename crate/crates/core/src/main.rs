fn main() {
    std::process::exit(panelcount::cli::run_cli());
}
