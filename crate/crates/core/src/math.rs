// Scalar math routed through libm so results match bit for bit with and without `std`.
pub(crate) use libm::{cos, exp, log, log10, round, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const TAU: f64 = core::f64::consts::TAU;
