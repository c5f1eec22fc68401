use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use lexigraph_core::activities::AidTemplates;
use lexigraph_core::error::{Error, Result};
use lexigraph_core::Config;
use serde::{Deserialize, Serialize};

/// Service settings. Engine keys sit at the top level of the same TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    #[serde(flatten)]
    pub engine: Config,
    pub bind: SocketAddr,
    pub data_dir: PathBuf,
    pub max_upload_bytes: usize,
    /// Adds `GET /sessions/{id}/oracle`. For scripted tests only.
    pub expose_answer_oracle: bool,
    pub aids: AidTemplates,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            engine: Config::default(),
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            data_dir: PathBuf::from("lexigraph-data"),
            max_upload_bytes: 64 << 20,
            expose_answer_oracle: false,
            aids: AidTemplates::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ServiceConfig =
            toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        config.engine.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        Self::from_toml_str(&text)
    }
}
