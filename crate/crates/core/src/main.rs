use std::io;

fn main() {
    env_logger::init();
    let status = pta_synth::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(status.code());
}
