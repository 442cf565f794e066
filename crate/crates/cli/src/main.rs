use std::process::ExitCode;

use clap::Parser;

/// Restore the default SIGPIPE disposition so that writing into a closed
/// pipe (e.g. `np-gadget roundtrip | head`) terminates the process quietly
/// instead of panicking inside `println!`.
#[cfg(unix)]
fn reset_sigpipe() {
    // SAFETY: SIG_DFL is always a valid handler, and this runs before any
    // other thread exists.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = np_gadget::commands::Cli::parse();
    match np_gadget::commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
