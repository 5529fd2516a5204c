//! Lorentz transformation of a space/time interval along one axis.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LorentzError {
    #[error("speed of light must be positive and finite (got {0})")]
    BadLightSpeed(f64),
    #[error("boost velocity must satisfy |v| < c (got v = {v}, c = {c})")]
    Superluminal { v: f64, c: f64 },
    #[error("boosts use different light speeds ({0} vs {1})")]
    LightSpeedMismatch(f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub dx: f64,
    pub dt: f64,
}

impl Interval {
    pub fn new(dx: f64, dt: f64) -> Self {
        Self { dx, dt }
    }

    /// `c²Δt² − Δx²`
    pub fn invariant(&self, c: f64) -> f64 {
        c * c * self.dt * self.dt - self.dx * self.dx
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Boost {
    v: f64,
    c: f64,
}

impl Boost {
    pub fn new(v: f64, c: f64) -> Result<Self, LorentzError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(LorentzError::BadLightSpeed(c));
        }
        if !(v.is_finite() && v.abs() < c) {
            return Err(LorentzError::Superluminal { v, c });
        }
        Ok(Self { v, c })
    }

    /// Boost in units where `c = 1`.
    pub fn natural(v: f64) -> Result<Self, LorentzError> {
        Self::new(v, 1.0)
    }

    pub fn velocity(&self) -> f64 {
        self.v
    }

    pub fn light_speed(&self) -> f64 {
        self.c
    }

    /// `γ = 1/√(1 − v²/c²)`
    pub fn gamma(&self) -> f64 {
        let beta = self.v / self.c;
        1.0 / (1.0 - beta * beta).sqrt()
    }
}

/// `Δx' = γ(Δx − vΔt)`, `Δt' = γ(Δt − vΔx/c²)`.
pub fn boost_interval(i: Interval, b: Boost) -> Interval {
    let g = b.gamma();
    Interval {
        dx: g * (i.dx - b.v * i.dt),
        dt: g * (i.dt - b.v * i.dx / (b.c * b.c)),
    }
}

/// Relativistic velocity addition: applying `b1` then `b2` equals one boost
/// by `(v1 + v2)/(1 + v1·v2/c²)`.
pub fn compose_boosts(b1: Boost, b2: Boost) -> Result<Boost, LorentzError> {
    if b1.c != b2.c {
        return Err(LorentzError::LightSpeedMismatch(b1.c, b2.c));
    }
    let c = b1.c;
    Boost::new((b1.v + b2.v) / (1.0 + b1.v * b2.v / (c * c)), c)
}
