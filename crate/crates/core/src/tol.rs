//! Numeric tolerances.
//!
//! Linear identities (sums to the order unit, normalization, idempotence of
//! exact maps) are held to `linear`; anything that passes through the LP
//! solver or an eigensolver is held to the looser `lp`; positivity of maps
//! and cone membership of transformed states use `map`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Exact linear identities: 1e-12.
    pub linear: f64,
    /// LP-derived objects and sampled certificates: 1e-9.
    pub lp: f64,
    /// Cone membership of map outputs and projector idempotence: 1e-10.
    pub map: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            linear: 1e-12,
            lp: 1e-9,
            map: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn with_linear(mut self, t: f64) -> Self {
        self.linear = t;
        self
    }

    pub fn with_lp(mut self, t: f64) -> Self {
        self.lp = t;
        self
    }

    pub fn with_map(mut self, t: f64) -> Self {
        self.map = t;
        self
    }
}
