use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("t = {t} lies outside the open interval (0, pi/2)")]
    Domain { t: f64 },

    #[error("profile cannot be evaluated at t = {t}: {reason}")]
    Evaluation { t: f64, reason: String },

    #[error("tan r has a pole at t = {t} (r = {r})")]
    Pole { t: f64, r: f64 },

    #[error("integration diverged after t = {last_t}: {reason}")]
    Divergence { last_t: f64, reason: String },

    #[error("no sign change of the terminal gap on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { what: &'static str, iterations: usize, residual: f64 },
}
