use std::process::ExitCode;

fn main() -> ExitCode {
    let seed = std::env::var(twohop::cli::SEED_ENV).ok();
    let code = twohop::cli::run(std::env::args_os(), seed.as_deref());
    ExitCode::from(code as u8)
}
