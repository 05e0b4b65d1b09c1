fn main() {
    std::process::exit(softmax_gan::cli::cli_main(std::env::args()))
}
