use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("channel {index} has width {width} below 2h = {limit}")]
    ChannelTooThin { index: usize, width: f64, limit: f64 },
    #[error("mesh has {components} connected components but the geometry is declared connected")]
    Disconnected { components: usize },
    #[error("mesh has no interior nodes at h = {0}")]
    EmptyMesh(f64),
    #[error("{name} = {value} lies outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("Newton failed after {iterations} iterations (residual {residual:e}, lambda {lambda})")]
    Newton {
        iterations: usize,
        residual: f64,
        lambda: f64,
        last_iterate: Vec<f64>,
    },
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error(transparent)]
    Core(#[from] vpl_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
