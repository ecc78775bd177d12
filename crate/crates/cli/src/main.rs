use clap::Parser;

fn main() {
    let cli = logitdyn_cli::Cli::parse();
    match logitdyn_cli::run(cli) {
        Ok(outcome) => {
            if let Some(json) = &outcome.json {
                println!("{json}");
            } else {
                print!("{}", outcome.text);
            }
            std::process::exit(if outcome.pass { 0 } else { 1 });
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(1);
        }
    }
}
