use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} lies outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("component {component} has no real root: 4·a·γ = {product} > 1")]
    NoRealRoot { component: usize, product: f64 },
    #[error("energy {energy} lies outside the segment range [{lo}, {hi}]")]
    EnergyOutOfRange { energy: f64, lo: f64, hi: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid branch selector: {0}")]
    InvalidSelector(String),
    #[error("branch has no admissible point ({dropped} dropped)")]
    EmptyBranch { dropped: usize },
    #[error("branch too coarse: {0}")]
    Resolution(String),
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("root not bracketed for {0}")]
    NotBracketed(&'static str),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
