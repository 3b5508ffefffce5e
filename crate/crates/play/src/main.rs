use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;

use lowrand_play::{router, Store};

/// Serves live repeated-game sessions against the exploitation engines.
#[derive(Parser)]
#[command(name = "lowrand-play", version)]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Append-only session journal, replayed on start.
    #[arg(long)]
    journal: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = Args::parse();
    let store = match &args.journal {
        Some(p) => Store::with_journal(p)?,
        None => Store::new(),
    };
    eprintln!("{} sessions restored; listening on {}", store.len(), args.addr);
    let listener = tokio::net::TcpListener::bind(args.addr).await?;
    axum::serve(listener, router(Arc::new(store))).await?;
    Ok(())
}
