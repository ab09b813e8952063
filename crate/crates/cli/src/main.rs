use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match qi_cli::run(&argv) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qi: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
