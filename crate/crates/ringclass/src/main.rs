fn main() {
    std::process::exit(ringclass::run(std::env::args_os()));
}
