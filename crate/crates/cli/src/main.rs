use clap::Parser;

fn main() {
    let cli = hpspline_cli::Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = hpspline_cli::run(&cli, &mut stdout.lock()) {
        eprintln!("hpspline: {e}");
        if let hpspline_cli::CliError::Model(hpspline::HpError::Singular { .. }) = e {
            eprintln!("hint: increase --lambda, reduce --knots, or add data sites");
        }
        std::process::exit(e.exit_code());
    }
}
