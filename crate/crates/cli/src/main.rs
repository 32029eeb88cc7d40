use std::collections::HashMap;
use std::io::{self, IsTerminal, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use newscert_core::{
    certificate_to_pem, issue_demo_chain, parse_sidecar, private_key_to_pem, sidecar_path_for,
    MetadataField, TrustPolicy, VerificationStatus,
};
use newscert_signer::{
    annotate_html, batch_sign, resolve_metadata, sign_asset, BatchOptions, Credentials,
    LinePrompter, MetadataInput, MetadataSource, SignError, SignRequest,
};
use newscert_verifier::{
    crawl_page, load_trust_dir, page_report_json, render_page_text, render_report_text,
    report_json, verify_chunked_reader, verify_file,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Endorse news media with detached XMP sidecar signatures, and verify them.
#[derive(Parser)]
#[command(name = "newscert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a demo root CA and an endorser key and certificate.
    Keygen {
        /// Endorsing organization, used as the certificate O= attribute.
        #[arg(long)]
        name: String,
        /// Receives endorser.pem and endorser.key.pem; the root goes in trust/.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overwrite existing files.
        #[arg(long)]
        force: bool,
    },
    /// Sign one asset and write its sidecar.
    Sign {
        asset: PathBuf,
        #[command(flatten)]
        meta: MetaArgs,
        #[command(flatten)]
        creds: CredArgs,
        /// Sidecar path (default: <asset>.xmp).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sign in chunks of this many bytes (at least 65536).
        #[arg(long)]
        chunk_size: Option<u64>,
    },
    /// Add x-media-cert attributes to an HTML page.
    Annotate {
        page: PathBuf,
        /// Mapping from media src to sidecar URL.
        #[arg(long = "map", value_name = "ASSET=SIDECAR", required = true, value_parser = parse_mapping)]
        mappings: Vec<(String, String)>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sign every media file in a directory.
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        meta: MetaArgs,
        #[command(flatten)]
        creds: CredArgs,
        /// Read each asset's metadata from <asset>.meta.json; flags act as the fallback.
        #[arg(long)]
        per_file: bool,
        /// Re-sign assets whose sidecar is still valid.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        chunk_size: Option<u64>,
    },
    /// Verify one asset against its sidecar.
    Verify {
        asset: PathBuf,
        /// Sidecar path (default: <asset>.xmp).
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[command(flatten)]
        trust: TrustArgs,
        #[arg(long)]
        json: bool,
        /// Also stream-verify each chunk of a chunked sidecar.
        #[arg(long)]
        chunks: bool,
    },
    /// Verify every annotated image and video on a page.
    Crawl {
        /// http(s) URL, file URL or local path of the page.
        page: String,
        #[command(flatten)]
        trust: TrustArgs,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        concurrency: u32,
    },
    /// Generate the demo site (pages, media, sidecars, trust root).
    BuildDemo { out: PathBuf },
    /// Serve a directory, optionally corrupting selected assets.
    DemoServer {
        root: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        #[arg(long, value_name = "PATH")]
        tamper: Vec<String>,
    },
}

#[derive(Args)]
struct MetaArgs {
    #[arg(long)]
    date_time: Option<String>,
    #[arg(long)]
    city: Option<String>,
    #[arg(long)]
    region: Option<String>,
    #[arg(long)]
    country: Option<String>,
    #[arg(long)]
    creator: Option<String>,
    #[arg(long)]
    headline: Option<String>,
    #[arg(long)]
    description: Option<String>,
}

impl MetaArgs {
    fn input(&self) -> MetadataInput {
        let mut input = MetadataInput::default();
        let values = [
            (MetadataField::DateTime, &self.date_time),
            (MetadataField::City, &self.city),
            (MetadataField::Region, &self.region),
            (MetadataField::Country, &self.country),
            (MetadataField::Creator, &self.creator),
            (MetadataField::Headline, &self.headline),
            (MetadataField::Description, &self.description),
        ];
        for (field, value) in values {
            if let Some(v) = value {
                input.set(field, v.clone());
            }
        }
        input
    }
}

#[derive(Args)]
struct CredArgs {
    /// Endorser private key (PEM).
    #[arg(long)]
    key: PathBuf,
    /// Endorser certificate (PEM); extra certificates after the first are ignored.
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args)]
struct TrustArgs {
    /// Directory (or file) of trusted root certificates in PEM.
    #[arg(long)]
    trust: PathBuf,
    /// Treat expired certificates as untrusted instead of warning.
    #[arg(long)]
    strict: bool,
}

impl TrustArgs {
    fn policy(&self) -> TrustPolicy {
        if self.strict {
            TrustPolicy::Strict
        } else {
            TrustPolicy::WarnOnExpiry
        }
    }
}

fn parse_mapping(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_owned(), b.to_owned())),
        _ => Err(format!("expected ASSET=SIDECAR, got '{s}'")),
    }
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("newscert: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Keygen { name, out, force } => keygen(&name, &out, force),
        Command::Sign {
            asset,
            meta,
            creds,
            out,
            chunk_size,
        } => {
            let metadata = collect_metadata(&meta, true)?;
            let req = SignRequest {
                asset_path: asset,
                metadata,
                key_path: creds.key,
                cert_chain_path: creds.cert,
                output_path: out,
                chunk_size,
            };
            let path = sign_asset(&req).map_err(sign_failure)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Annotate {
            page,
            mappings,
            out,
        } => {
            let html =
                std::fs::read_to_string(&page).map_err(|e| format!("{}: {e}", page.display()))?;
            let mapping: HashMap<_, _> = mappings.into_iter().collect();
            let annotated = annotate_html(&html, &mapping)?;
            match out {
                Some(path) => std::fs::write(&path, annotated)
                    .map_err(|e| format!("{}: {e}", path.display()))?,
                None => io::stdout().write_all(annotated.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Batch {
            dir,
            meta,
            creds,
            per_file,
            force,
            chunk_size,
        } => {
            let credentials = Credentials::load(&creds.key, &creds.cert).map_err(sign_failure)?;
            let metadata = if per_file {
                MetadataSource::PerFile {
                    default: collect_metadata(&meta, false).ok(),
                }
            } else {
                MetadataSource::Shared(collect_metadata(&meta, true)?)
            };
            let opts = BatchOptions {
                metadata,
                force,
                chunk_size,
            };
            let summary = batch_sign(&dir, &credentials, &opts)?;
            for p in &summary.signed {
                println!("signed  {}", p.display());
            }
            for p in &summary.skipped {
                println!("skipped {}", p.display());
            }
            for (p, reason) in &summary.failed {
                println!("failed  {}: {reason}", p.display());
            }
            println!(
                "{} signed, {} skipped, {} failed",
                summary.signed.len(),
                summary.skipped.len(),
                summary.failed.len()
            );
            Ok(exit_for(summary.is_success()))
        }
        Command::Verify {
            asset,
            sidecar,
            trust,
            json,
            chunks,
        } => verify(&asset, sidecar.as_deref(), &trust, json, chunks),
        Command::Crawl {
            page,
            trust,
            json,
            concurrency,
        } => {
            let store = load_trust_dir(&trust.trust, trust.policy())?;
            let report = runtime()?.block_on(crawl_page(&page, &store, concurrency as usize))?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&page_report_json(&report))?
                );
            } else {
                print!("{}", render_page_text(&report));
            }
            Ok(exit_for(!report.has_failures()))
        }
        Command::BuildDemo { out } => {
            let site = newscert_demo::build_demo_site(&out)?;
            println!("site:  {}", site.site_dir.display());
            println!("trust: {}", site.trust_dir.display());
            println!("keys:  {}", site.keys_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::DemoServer { root, bind, tamper } => runtime()?.block_on(async {
            let mut config = newscert_demo::ServeConfig::new(&root, bind);
            config.tamper = tamper;
            let handle = newscert_demo::serve(config).await?;
            println!("serving {} at {}", root.display(), handle.url());
            tokio::signal::ctrl_c().await?;
            handle.shutdown().await;
            Ok(ExitCode::SUCCESS)
        }),
    }
}

fn exit_for(success: bool) -> ExitCode {
    if success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn runtime() -> Result<tokio::runtime::Runtime, Failure> {
    Ok(tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?)
}

fn sign_failure(e: SignError) -> Failure {
    match e {
        SignError::InvalidMetadata(_) | SignError::ChunkSizeTooSmall(_) => {
            Failure::usage(e.to_string())
        }
        other => other.into(),
    }
}

/// Flags, then `NEWSCERT_*` variables, then prompts on an interactive terminal.
fn collect_metadata(
    meta: &MetaArgs,
    allow_prompt: bool,
) -> Result<newscert_core::EndorsementMetadata, Failure> {
    let env = MetadataInput::from_env(|name| std::env::var(name).ok());
    let interactive = allow_prompt && io::stdin().is_terminal();
    let result = if interactive {
        let mut prompter = LinePrompter::new(io::stdin().lock(), io::stderr());
        resolve_metadata(&meta.input(), &env, Some(&mut prompter))
    } else {
        resolve_metadata(&meta.input(), &env, None)
    };
    result.map_err(sign_failure)
}

fn keygen(name: &str, out: &Path, force: bool) -> CmdResult {
    if name.is_empty() {
        return Err(Failure::usage("--name must not be empty"));
    }
    let files = ["trust/root.pem", "endorser.pem", "endorser.key.pem"].map(|f| out.join(f));
    if !force {
        if let Some(existing) = files.iter().find(|p| p.exists()) {
            return Err(format!("{} exists; pass --force to overwrite", existing.display()).into());
        }
    }
    let trust_dir = out.join("trust");
    std::fs::create_dir_all(&trust_dir).map_err(|e| format!("{}: {e}", trust_dir.display()))?;
    let chain = issue_demo_chain(name)?;
    let contents = [
        certificate_to_pem(chain.root_der()),
        certificate_to_pem(chain.endorser_der()),
        private_key_to_pem(chain.endorser_key()),
    ];
    for (path, text) in files.iter().zip(contents) {
        std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(
    asset: &Path,
    sidecar: Option<&Path>,
    trust: &TrustArgs,
    json: bool,
    chunks: bool,
) -> CmdResult {
    let store = load_trust_dir(&trust.trust, trust.policy())?;
    let report = verify_file(asset, sidecar, &store)?;
    let mut failed = report.status.is_failure();
    let mut chunk_values = Vec::new();
    let mut chunk_lines = Vec::new();

    if chunks
        && report.status != VerificationStatus::NoSidecar
        && report.status != VerificationStatus::MalformedSidecar
    {
        let sidecar_path = sidecar.map_or_else(|| sidecar_path_for(asset), Path::to_owned);
        let doc = parse_sidecar(&std::fs::read_to_string(&sidecar_path)?)?;
        if doc.is_chunked() {
            let file = std::fs::File::open(asset)?;
            for item in verify_chunked_reader(file, &doc, &store)? {
                match item {
                    Ok(v) => {
                        failed |= v.status.is_failure();
                        chunk_lines.push(format!(
                            "  chunk {} [{}+{}]: {}",
                            v.index, v.byte_offset, v.byte_length, v.status
                        ));
                        chunk_values.push(serde_json::json!({
                            "index": v.index,
                            "offset": v.byte_offset,
                            "length": v.byte_length,
                            "status": v.status.as_str(),
                            "detail": v.detail,
                        }));
                    }
                    Err(e) => {
                        failed = true;
                        chunk_lines.push(format!("  stream error: {e}"));
                        chunk_values.push(serde_json::json!({ "error": e.to_string() }));
                    }
                }
            }
        } else {
            chunk_lines.push("  (sidecar has no chunk manifest)".into());
        }
    }

    if json {
        let mut value = report_json(&report);
        if chunks {
            value["chunks"] = serde_json::Value::Array(chunk_values);
        }
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("{}", render_report_text(&report));
        for line in chunk_lines {
            println!("{line}");
        }
    }
    Ok(exit_for(!failed))
}
