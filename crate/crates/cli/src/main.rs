use std::io::Write;

fn main() {
    let budget = std::env::var(owi_cli::BUDGET_ENV).ok();
    let out = owi_cli::run(std::env::args_os(), budget.as_deref());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
