use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: argument {value} is outside the domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{function}: result overflows at |z| = {magnitude}")]
    Range {
        function: &'static str,
        magnitude: f64,
    },

    #[error("packet with nu = {nu} is not normalizable (requires nu > 1/4)")]
    NonNormalizable { nu: f64 },

    #[error("no real waist: sigma_g(0)^4 = {sigma_g0_pow4} is below (hbar tau / m)^2 = {bound}")]
    NoWaist { sigma_g0_pow4: f64, bound: f64 },

    #[error("grid too coarse: local wavenumber {local_k} at |x| = {at} exceeds 0.8 x Nyquist ({nyquist})")]
    Aliasing { local_k: f64, nyquist: f64, at: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("snapshot series needs {requested} samples, above the cap of {cap}")]
    MemoryCap { requested: usize, cap: usize },

    #[error("time grid must be strictly increasing (index {index})")]
    TimeOrder { index: usize },

    #[error("{}", format_list(.0))]
    Config(Vec<String>),

    #[error("malformed snapshot: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_list(items: &[String]) -> String {
    let mut out = String::from("invalid scenario:");
    for item in items {
        out.push_str("\n  - ");
        out.push_str(item);
    }
    out
}

pub type Result<T> = std::result::Result<T, Error>;
