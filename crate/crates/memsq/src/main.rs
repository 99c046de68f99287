fn main() {
    std::process::exit(memsq::run(std::env::args_os()));
}
