//! Exact truncated q-series kernel.

pub mod classical;
pub mod logseries;
pub mod rational;
pub mod series;

pub use classical::{
    aux_series, dedekind_eta, divisor_sigma, eisenstein, eta_power, eta_power_at, euler_product,
    fit, jacobi_theta, Aux, Theta,
};
pub use logseries::LogQSeries;
pub use rational::{exp, int, parse_rational, rat, Exp, Rational};
pub use series::QSeries;
