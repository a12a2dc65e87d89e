fn main() {
    std::process::exit(jssp::pipeline::cli::run());
}
