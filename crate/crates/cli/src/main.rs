use std::process::ExitCode;

fn main() -> ExitCode {
    let result = convproj_cli::dispatch(std::env::args().skip(1));
    if result.exit_code == 0 {
        println!("{}", result.summary);
        if result.report_path.is_none() {
            println!("{}", result.report);
        }
    } else {
        eprintln!("{}", result.summary);
        if result.report_path.is_none() && !result.report.is_empty() {
            println!("{}", result.report);
        }
    }
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    ExitCode::from(result.exit_code as u8)
}
