fn main() {
    std::process::exit(otima::run(std::env::args_os()));
}
