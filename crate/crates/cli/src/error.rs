use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] exq_core::Error),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CliError {
    /// 2 for unreadable input or configuration, 3 for invalid domains, 1 for
    /// everything else.
    pub fn exit_code(&self) -> u8 {
        use exq_core::Error as E;
        match self {
            Self::Read { .. } | Self::Config(_) | Self::Core(E::Parse(_)) => 2,
            Self::Core(
                E::InvalidDomain(_)
                | E::NotImmersed { .. }
                | E::SelfIntersecting { .. }
                | E::Clockwise(_)
                | E::Degenerate { .. },
            ) => 3,
            _ => 1,
        }
    }
}
