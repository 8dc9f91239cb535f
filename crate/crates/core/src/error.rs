use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("argument `{name}` = {value} outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("moment of order {order} is infinite for this model")]
    UnsupportedMoment { order: usize },

    #[error("right inverse did not bracket level {level} (function does not diverge?)")]
    Bracketing { level: f64 },

    #[error("no positive real root of the derivative polynomial for log(rho) = {log_rho}")]
    NoPositiveRoot { log_rho: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error {error_estimate}")]
    Quadrature { estimate: f64, error_estimate: f64 },

    #[error("minimization failed: {0}")]
    Minimization(&'static str),

    #[error("config: {0}")]
    Config(String),
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "rho",
            value: rho,
            domain: "(0, 1)",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: v,
            domain: "(0, inf)",
        })
    }
}
