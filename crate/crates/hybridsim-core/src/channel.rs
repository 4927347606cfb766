//! Transmissivity bookkeeping for the two lossy down-links.
//!
//! Mode A is the continuous-variable (cat) mode and mode B the
//! discrete-variable mode; each travels its own pure-loss channel modeled as
//! a beam splitter of transmissivity T against a vacuum environment. Loss is
//! quoted in decibels via loss_db = −10 log₁₀(T).

use crate::fock::{FockError, FockResult};

/// Transmissivities of the CV-mode channel (`t_a`) and DV-mode channel
/// (`t_b`), each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPair {
    t_a: f64,
    t_b: f64,
}

impl ChannelPair {
    pub fn new(t_a: f64, t_b: f64) -> FockResult<Self> {
        for (name, t) in [("T_A", t_a), ("T_B", t_b)] {
            if !(0.0..=1.0).contains(&t) {
                return Err(FockError::Domain(format!(
                    "transmissivity {name} must lie in [0, 1], got {t}"
                )));
            }
        }
        Ok(Self { t_a, t_b })
    }

    /// Both channels at the same transmissivity.
    pub fn symmetric(t: f64) -> FockResult<Self> {
        Self::new(t, t)
    }

    /// Symmetric channels with the given total loss in dB split evenly,
    /// so each arm has T = 10^{−loss_db/20}.
    pub fn symmetric_from_total_loss_db(loss_db: f64) -> FockResult<Self> {
        if !(loss_db >= 0.0) {
            return Err(FockError::Domain(format!(
                "total loss must be a nonnegative dB value, got {loss_db}"
            )));
        }
        Self::symmetric(10f64.powf(-loss_db / 20.0))
    }

    /// Lossless pair (T_A = T_B = 1).
    pub fn lossless() -> Self {
        Self { t_a: 1.0, t_b: 1.0 }
    }

    pub fn t_a(&self) -> f64 {
        self.t_a
    }

    pub fn t_b(&self) -> f64 {
        self.t_b
    }

    /// Total loss −10 log₁₀(T_A T_B) in dB; infinite when either arm is
    /// fully opaque. Adding +0.0 turns the lossless −0.0 into +0.0.
    pub fn total_loss_db(&self) -> f64 {
        -10.0 * (self.t_a * self.t_b).log10() + 0.0
    }
}

/// Converts a per-arm loss in dB to a transmissivity T = 10^{−loss_db/10}.
pub fn loss_db_to_transmissivity(loss_db: f64) -> FockResult<f64> {
    if !(loss_db >= 0.0) {
        return Err(FockError::Domain(format!(
            "loss must be a nonnegative dB value, got {loss_db}"
        )));
    }
    Ok(10f64.powf(-loss_db / 10.0))
}
