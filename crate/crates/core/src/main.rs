use clap::Parser;

fn main() {
    let cli = ktgerm::cli::Cli::parse();
    match ktgerm::cli::run(&cli) {
        Ok((stdout, code)) => {
            if let Some(s) = stdout {
                print!("{s}");
            }
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
