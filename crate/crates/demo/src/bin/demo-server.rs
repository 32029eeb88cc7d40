use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use newscert_demo::{serve, ServeConfig, TlsIdentity};

/// Serve a directory for endorsement demos and end-to-end tests.
#[derive(Parser)]
#[command(name = "demo-server", version)]
struct Args {
    /// Directory to serve.
    root: PathBuf,

    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,

    /// Serve this asset (path relative to the root) with its last byte flipped.
    #[arg(long, value_name = "PATH")]
    tamper: Vec<String>,

    /// Serve HTTPS with a freshly generated certificate.
    #[arg(long)]
    tls: bool,

    /// Where to write the TLS root certificate clients should trust.
    #[arg(long, value_name = "FILE", requires = "tls")]
    tls_root_out: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    match run(args).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("demo-server: {e}");
            ExitCode::FAILURE
        }
    }
}

async fn run(args: Args) -> Result<(), Box<dyn std::error::Error>> {
    let mut config = ServeConfig::new(&args.root, args.bind);
    config.tamper = args.tamper;
    if args.tls {
        let hosts = vec!["localhost".to_owned(), args.bind.ip().to_string()];
        let identity = TlsIdentity::generate(&hosts)?;
        match &args.tls_root_out {
            Some(path) => std::fs::write(path, &identity.root_pem)?,
            None => eprint!("TLS root certificate:\n{}", identity.root_pem),
        }
        config.tls = Some(identity);
    }
    let handle = serve(config).await?;
    println!("serving {} at {}", args.root.display(), handle.url());
    tokio::signal::ctrl_c().await?;
    handle.shutdown().await;
    Ok(())
}
