use std::path::PathBuf;

use thiserror::Error;

use crate::dataset::SiteId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown site id {0}")]
    UnknownSite(SiteId),

    #[error("site {site} has no value for attribute {attribute:?}")]
    MissingAttribute { site: SiteId, attribute: String },

    #[error("attribute {0:?} is not declared by the dataset")]
    UnknownAttribute(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("sites {0} and {1} are coincident; distance is zero")]
    DegenerateDistance(SiteId, SiteId),

    #[error("no neighbors to weight")]
    NoNeighbors,

    #[error("every weight factor is degenerate for the neighborhood of {0}")]
    DegenerateFactor(String),

    #[error("difference scores have zero spread; z-scores are undefined")]
    DegenerateDistribution,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("regime {regime} cannot be used with a {kind} dataset")]
    RegimeMismatch {
        regime: &'static str,
        kind: &'static str,
    },

    #[error("site sets differ: {0}")]
    SiteMismatch(String),

    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<u64>,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Write(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(
        path: impl Into<PathBuf>,
        line: Option<u64>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
