//! Exact arithmetic: rationals, polynomials and truncated power series.

pub mod poly;
pub mod rat;
pub mod series;

pub use poly::{poly_integrate, Poly};
pub use rat::{parse_rat, to_fraction_string, Rat};
pub use series::{series_div, series_exp, series_log, BiSeries, Series1};
