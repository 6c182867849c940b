//! Networked eternal vertex cover sessions: JSON over HTTP plus a
//! server-sent event stream of round records.

pub mod api;
pub mod error;
pub mod session;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use api::router;
pub use error::ServiceError;
pub use session::{CreateSession, Session, SessionView};
pub use store::{RoundEvent, Store};

pub const DEFAULT_LISTEN_ADDR: &str = "127.0.0.1:8080";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    /// Session logs live here; `None` keeps everything in memory.
    pub data_dir: Option<PathBuf>,
}

impl ServiceConfig {
    /// Reads `EVC_LISTEN_ADDR` and `EVC_DATA_DIR`.
    pub fn from_env() -> Result<Self, ServiceError> {
        let listen = std::env::var("EVC_LISTEN_ADDR").unwrap_or_else(|_| DEFAULT_LISTEN_ADDR.into());
        let listen = listen.parse().map_err(|e| ServiceError::Storage(format!("EVC_LISTEN_ADDR `{listen}`: {e}")))?;
        let data_dir = std::env::var_os("EVC_DATA_DIR").map(PathBuf::from);
        Ok(ServiceConfig { listen, data_dir })
    }
}

/// Binds and serves until the process is stopped.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let store = match &config.data_dir {
        Some(dir) => Store::open(dir)?,
        None => Store::ephemeral(),
    };
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(store))).await?;
    Ok(())
}
