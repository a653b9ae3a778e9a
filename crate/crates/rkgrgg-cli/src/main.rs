use std::process::ExitCode;

fn main() -> ExitCode {
    // Die quietly when stdout closes early (e.g. piping into `head`),
    // like other line-oriented Unix tools, instead of panicking on the
    // failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let code = rkgrgg_cli::run(std::env::args_os());
    ExitCode::from(code.clamp(0, 255) as u8)
}
