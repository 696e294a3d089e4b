fn main() {
    std::process::exit(flucmo::run(std::env::args_os()));
}
