use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root finder did not reach tolerance within {iterations} iterations")]
    MaxIterations { iterations: usize },
    #[error("quadrature did not converge: estimate {estimate:e} with error bound {error:e}")]
    NonConvergence { estimate: f64, error: f64 },
    #[error("average-density limit did not stabilize (last estimates {last:e}, {previous:e})")]
    NoLimit { last: f64, previous: f64 },
    #[error("parameters outside the supported domain: {0}")]
    OutOfDomain(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("potential is not asymptotically constant on the requested side")]
    WrongClass,
    #[error("energy {energy} lies within the band-edge exclusion margin")]
    AtBandEdge { energy: f64 },
    #[error("energy {energy} lies in a spectral gap")]
    InGap { energy: f64 },
    #[error("energy {energy} is outside the continuous spectrum of this family")]
    OutOfSpectrum { energy: f64 },
    #[error("family {family} is not defined for this potential")]
    UnknownFamily { family: String },
    #[error("bad initial-state parameters: {0}")]
    BadParams(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("initial-state support [{lo}, {hi}] exceeds the oracle box [-{half_width}, {half_width}]")]
    SupportExceedsBox { lo: f64, hi: f64, half_width: f64 },
}
