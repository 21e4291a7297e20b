use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("array centers coincide (|c_o| = 0)")]
    CoincidentCenters,

    #[error("transmit element {tx} coincides with receive element {rx}")]
    CoincidentElements { tx: usize, rx: usize },

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("spectrum has no positive eigenvalue")]
    ZeroSpectrum,

    #[error("gram matrix diagonal entry {index} is not positive ({value})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
