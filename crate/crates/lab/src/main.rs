fn main() {
    std::process::exit(dampwave_lab::run(std::env::args_os()));
}
