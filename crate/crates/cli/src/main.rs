fn main() {
    std::process::exit(rotjac::run(std::env::args_os()));
}
