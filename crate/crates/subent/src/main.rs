fn main() {
    std::process::exit(subent::run(std::env::args_os()));
}
