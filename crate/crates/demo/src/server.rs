//! Read-only static file server with a tamper mode.

use std::collections::HashSet;
use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::extract::State;
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;
use hyper_util::rt::{TokioExecutor, TokioIo};
use hyper_util::server::conn::auto;
use hyper_util::service::TowerToHyperService;
use newscert_core::{DemoCa, SubjectName, ValidityWindow, SIDECAR_EXTENSION};
use percent_encoding::percent_decode_str;
use rustls::pki_types::pem::PemObject;
use rustls::pki_types::{CertificateDer, PrivateKeyDer};
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use tokio_rustls::TlsAcceptor;

use crate::error::{DemoError, DemoResult};

/// Certificate chain and key for HTTPS, plus the PEM of the issuing root so
/// clients can trust it.
#[derive(Clone)]
pub struct TlsIdentity {
    pub chain_der: Vec<Vec<u8>>,
    pub key_pem: String,
    pub root_pem: String,
}

impl TlsIdentity {
    /// Throwaway CA and a server certificate for `hosts` (DNS names or IPs).
    pub fn generate(hosts: &[String]) -> DemoResult<Self> {
        let ca = DemoCa::generate(
            &SubjectName::common_name("newscert demo TLS root"),
            ValidityWindow::days_from_now(30),
        )?;
        let server = ca.issue_server(hosts, ValidityWindow::days_from_now(30))?;
        Ok(TlsIdentity {
            chain_der: vec![
                server.certificate_der.clone(),
                ca.certificate_der().to_vec(),
            ],
            key_pem: server.key_pem(),
            root_pem: ca.certificate_pem(),
        })
    }

    fn server_config(&self) -> DemoResult<rustls::ServerConfig> {
        let certs = self
            .chain_der
            .iter()
            .cloned()
            .map(CertificateDer::from)
            .collect();
        let key = PrivateKeyDer::from_pem_slice(self.key_pem.as_bytes())
            .map_err(|e| DemoError::Tls(e.to_string()))?;
        let provider = Arc::new(rustls::crypto::aws_lc_rs::default_provider());
        let mut config = rustls::ServerConfig::builder_with_provider(provider)
            .with_safe_default_protocol_versions()
            .map_err(|e| DemoError::Tls(e.to_string()))?
            .with_no_client_auth()
            .with_single_cert(certs, key)
            .map_err(|e| DemoError::Tls(e.to_string()))?;
        config.alpn_protocols = vec![b"h2".to_vec(), b"http/1.1".to_vec()];
        Ok(config)
    }
}

#[derive(Clone)]
pub struct ServeConfig {
    pub root: PathBuf,
    pub bind: SocketAddr,
    /// Paths relative to `root` whose responses get their last byte flipped.
    pub tamper: Vec<String>,
    pub tls: Option<TlsIdentity>,
}

impl ServeConfig {
    pub fn new(root: impl Into<PathBuf>, bind: SocketAddr) -> Self {
        ServeConfig {
            root: root.into(),
            bind,
            tamper: Vec::new(),
            tls: None,
        }
    }
}

/// A running server. Dropping the handle leaves the server running until the
/// runtime shuts down; call [`ServerHandle::shutdown`] to stop it.
pub struct ServerHandle {
    addr: SocketAddr,
    tls: bool,
    stop: Option<oneshot::Sender<()>>,
    task: JoinHandle<()>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Base URL ending in `/`.
    pub fn url(&self) -> String {
        let scheme = if self.tls { "https" } else { "http" };
        match self.addr {
            SocketAddr::V4(a) if a.ip().is_unspecified() => {
                format!("{scheme}://127.0.0.1:{}/", a.port())
            }
            addr => format!("{scheme}://{addr}/"),
        }
    }

    pub async fn shutdown(mut self) {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        let _ = self.task.await;
    }
}

struct Site {
    root: PathBuf,
    tamper: HashSet<PathBuf>,
}

/// Starts serving `config.root`. Must be called inside a Tokio runtime.
pub async fn serve(config: ServeConfig) -> DemoResult<ServerHandle> {
    let root = std::fs::canonicalize(&config.root).map_err(|e| DemoError::io(&config.root, e))?;
    if !root.is_dir() {
        return Err(DemoError::io(
            &root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "root is not a directory"),
        ));
    }
    let mut tamper = HashSet::new();
    for entry in &config.tamper {
        let rel = relative_path(entry).ok_or_else(|| DemoError::InvalidTamper(entry.clone()))?;
        if rel.extension().is_some_and(|e| e == SIDECAR_EXTENSION) {
            return Err(DemoError::InvalidTamper(entry.clone()));
        }
        tamper.insert(rel);
    }
    let tls = config
        .tls
        .as_ref()
        .map(TlsIdentity::server_config)
        .transpose()?;

    let listener =
        TcpListener::bind(config.bind)
            .await
            .map_err(|source| DemoError::BindFailure {
                addr: config.bind,
                source,
            })?;
    let addr = listener
        .local_addr()
        .map_err(|source| DemoError::BindFailure {
            addr: config.bind,
            source,
        })?;
    let router = Router::new()
        .fallback(handle)
        .with_state(Arc::new(Site { root, tamper }));
    let (stop_tx, stop_rx) = oneshot::channel::<()>();

    let task = match tls {
        None => tokio::spawn(async move {
            let _ = axum::serve(listener, router)
                .with_graceful_shutdown(async {
                    let _ = stop_rx.await;
                })
                .await;
        }),
        Some(config) => tokio::spawn(serve_tls(
            listener,
            router,
            TlsAcceptor::from(Arc::new(config)),
            stop_rx,
        )),
    };
    Ok(ServerHandle {
        addr,
        tls: config.tls.is_some(),
        stop: Some(stop_tx),
        task,
    })
}

async fn serve_tls(
    listener: TcpListener,
    router: Router,
    acceptor: TlsAcceptor,
    mut stop: oneshot::Receiver<()>,
) {
    loop {
        let tcp = tokio::select! {
            _ = &mut stop => return,
            accepted = listener.accept() => match accepted {
                Ok((tcp, _)) => tcp,
                Err(_) => continue,
            },
        };
        let acceptor = acceptor.clone();
        let service = TowerToHyperService::new(router.clone());
        tokio::spawn(async move {
            let Ok(tls) = acceptor.accept(tcp).await else {
                return;
            };
            let _ = auto::Builder::new(TokioExecutor::new())
                .serve_connection(TokioIo::new(tls), service)
                .await;
        });
    }
}

/// Decodes a URL path into a path relative to the root, refusing anything
/// that could escape it.
fn relative_path(raw: &str) -> Option<PathBuf> {
    let decoded = percent_decode_str(raw).decode_utf8().ok()?;
    let mut out = PathBuf::new();
    for component in Path::new(decoded.trim_start_matches('/')).components() {
        match component {
            Component::Normal(part) => out.push(part),
            Component::CurDir => {}
            _ => return None,
        }
    }
    Some(out)
}

async fn handle(State(site): State<Arc<Site>>, method: Method, uri: Uri) -> Response {
    if method != Method::GET && method != Method::HEAD {
        return StatusCode::METHOD_NOT_ALLOWED.into_response();
    }
    let Some(mut rel) = relative_path(uri.path()) else {
        return StatusCode::NOT_FOUND.into_response();
    };
    let mut path = site.root.join(&rel);
    if path.is_dir() {
        rel.push("index.html");
        path.push("index.html");
    }
    // Refuse symlinks pointing outside the root.
    match tokio::fs::canonicalize(&path).await {
        Ok(real) if real.starts_with(&site.root) => {}
        _ => return StatusCode::NOT_FOUND.into_response(),
    }
    let mut bytes = match tokio::fs::read(&path).await {
        Ok(bytes) => bytes,
        Err(_) => return StatusCode::NOT_FOUND.into_response(),
    };
    if site.tamper.contains(&rel) {
        if let Some(last) = bytes.last_mut() {
            *last ^= 0xFF;
        }
    }
    let body = if method == Method::HEAD {
        Body::empty()
    } else {
        Body::from(bytes)
    };
    (
        [
            (header::CONTENT_TYPE, content_type(&rel)),
            (header::CACHE_CONTROL, "no-store".to_owned()),
        ],
        body,
    )
        .into_response()
}

fn content_type(path: &Path) -> String {
    if path.extension().is_some_and(|e| e == SIDECAR_EXTENSION) {
        return "application/xml".into();
    }
    let mime = mime_guess::from_path(path).first_or_octet_stream();
    if mime.type_() == "text" {
        format!("{mime}; charset=utf-8")
    } else {
        mime.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths() {
        assert_eq!(relative_path("/a/b.png"), Some(PathBuf::from("a/b.png")));
        assert_eq!(relative_path("/a%20b.png"), Some(PathBuf::from("a b.png")));
        assert_eq!(relative_path("./x"), Some(PathBuf::from("x")));
        assert_eq!(relative_path("/../etc/passwd"), None);
        assert_eq!(relative_path("/a/%2e%2e/%2e%2e/secret"), None);
        assert_eq!(relative_path("/"), Some(PathBuf::new()));
    }

    #[test]
    fn content_types() {
        assert_eq!(content_type(Path::new("a.png.xmp")), "application/xml");
        assert_eq!(content_type(Path::new("a.png")), "image/png");
        assert_eq!(
            content_type(Path::new("index.html")),
            "text/html; charset=utf-8"
        );
        assert_eq!(content_type(Path::new("clip.mp4")), "video/mp4");
        assert_eq!(content_type(Path::new("blob")), "application/octet-stream");
    }
}
