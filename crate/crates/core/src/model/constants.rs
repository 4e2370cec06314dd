//! CODATA 2018 exact / recommended values, SI units.

/// Elementary charge (C).
pub const Q: f64 = 1.602_176_634e-19;
/// Boltzmann constant (J/K).
pub const KB: f64 = 1.380_649e-23;
/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Fixed set of physical constants, for callers that prefer a value over
/// free-standing consts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub q: f64,
    pub kb: f64,
    pub eps0: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        q: Q,
        kb: KB,
        eps0: EPS0,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}
