use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The relaxed SDP solution has an eigenvalue too negative to clamp.
    #[error("infeasible SDP solution: minimum eigenvalue {min_eigenvalue:.3e} (largest {max_eigenvalue:.3e})")]
    InfeasibleSdp {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failed to parse config: {0}")]
    ConfigParse(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
