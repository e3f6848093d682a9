use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::ladder::Ladder;

fn check_times(times: &[f64]) -> Result<(), MetricsError> {
    if times.is_empty() {
        return Err(MetricsError::EmptyLadder);
    }
    match times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        Some(&t) => Err(MetricsError::InvalidTime(t)),
        None => Ok(()),
    }
}

/// Wall time of a segment whose representations encode concurrently.
pub fn segment_encode_time(times: &[f64]) -> Result<f64, MetricsError> {
    check_times(times)?;
    Ok(times.iter().copied().fold(0.0, f64::max))
}

/// `kappa * sum(times)`: energy adds up across concurrent encodes.
pub fn encoding_energy(times: &[f64], kappa: f64) -> Result<f64, MetricsError> {
    check_times(times)?;
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(MetricsError::InvalidKappa(kappa));
    }
    Ok(kappa * times.iter().sum::<f64>())
}

/// Joules per second of encoding, optionally per resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_resolution: BTreeMap<u32, f64>,
}

impl EnergyModel {
    pub fn uniform(kappa: f64) -> Self {
        Self {
            kappa,
            per_resolution: BTreeMap::new(),
        }
    }

    pub fn kappa_for(&self, resolution: u32) -> f64 {
        self.per_resolution
            .get(&resolution)
            .copied()
            .unwrap_or(self.kappa)
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        for k in std::iter::once(&self.kappa).chain(self.per_resolution.values()) {
            if !(k.is_finite() && *k > 0.0) {
                return Err(MetricsError::InvalidKappa(*k));
            }
        }
        Ok(())
    }

    /// Energy of `(resolution, seconds)` encodes.
    pub fn energy(&self, encodes: &[(u32, f64)]) -> Result<f64, MetricsError> {
        self.validate()?;
        let times: Vec<f64> = encodes.iter().map(|e| e.1).collect();
        check_times(&times)?;
        if self.per_resolution.is_empty() {
            return encoding_energy(&times, self.kappa);
        }
        Ok(encodes.iter().map(|&(r, t)| self.kappa_for(r) * t).sum())
    }
}

pub fn storage_of_bitrates(bitrates: &[f64], duration: f64) -> Result<f64, MetricsError> {
    if bitrates.is_empty() {
        return Err(MetricsError::EmptyLadder);
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(MetricsError::InvalidDuration(duration));
    }
    Ok(bitrates.iter().sum::<f64>() * duration)
}

/// Megabits stored for one segment of `duration` seconds.
pub fn storage(ladder: &Ladder, duration: f64) -> Result<f64, MetricsError> {
    storage_of_bitrates(&ladder.bitrates().collect::<Vec<_>>(), duration)
}
