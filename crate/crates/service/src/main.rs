use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use drs_service::{repl, Mode, Session, SessionFile};

#[derive(Parser)]
#[command(name = "drs", version, about = "Dynamic reasoning sessions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive session on stdin/stdout.
    Repl {
        #[arg(long, default_value = "dma")]
        mode: Mode,
        /// Resolve contradictions without asking.
        #[arg(long)]
        auto: bool,
        /// Start from a saved session file.
        #[arg(long)]
        load: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
    /// Replay a session file and print its beliefs.
    Replay {
        file: PathBuf,
        /// Print the link graph as DOT instead.
        #[arg(long)]
        dot: bool,
    },
}

fn load(path: &PathBuf) -> Result<Session, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = SessionFile::from_json(&text).map_err(|e| format!("{}: {e}", e.code()))?;
    Session::from_file(&file).map_err(|e| format!("{}: {e}", e.code()))
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Repl { mode, auto, load: path } => {
            let session = match path {
                Some(p) => load(&p),
                None => Ok(Session::new(mode, auto)),
            };
            session.and_then(|mut s| repl::run(&mut s, io::stdin().lock(), io::stdout()).map_err(|e| e.to_string()))
        }
        Command::Serve { addr } => match tokio::runtime::Runtime::new() {
            Ok(rt) => rt.block_on(async {
                eprintln!("listening on {addr}");
                drs_service::http::serve(&addr).await.map_err(|e| e.to_string())
            }),
            Err(e) => Err(e.to_string()),
        },
        Command::Replay { file, dot } => load(&file).and_then(|mut s| {
            let line = if dot { "graph --dot" } else { "beliefs --all" };
            repl::command(&mut s, line, &mut io::stdout()).map(drop).map_err(|e| e.to_string())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
