fn main() {
    let code = nerf_vfx::cli::run(std::env::args_os(), &mut std::io::stderr());
    std::process::exit(code);
}
