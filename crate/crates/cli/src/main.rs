use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let report = tolrep_cli::run(std::env::args_os());
    let sink: &mut dyn Write = if report.code == tolrep_cli::EXIT_USAGE {
        &mut std::io::stderr()
    } else {
        &mut std::io::stdout()
    };
    let _ = sink.write_all(report.text.as_bytes());
    ExitCode::from(report.code as u8)
}
