//! Physical-layer model: per-RRB SINR with same-index interference, Shannon
//! capacity, and the capacity matrix over every (RRH, RRB, user) triple.
//!
//! Rates are spectral efficiencies in bits/s/Hz. All powers handled here are
//! linear (watts); conversion from the dBm/Hz figures happens in
//! [`PowerProfile::from_psd`].

use crate::error::{check_index, Error, Result};

/// Topology counts. All counts are at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkDims {
    pub num_rrhs: usize,
    pub num_rrbs_per_rrh: usize,
    pub num_users: usize,
    pub num_files: usize,
}

impl NetworkDims {
    pub fn new(num_rrhs: usize, num_rrbs_per_rrh: usize, num_users: usize, num_files: usize) -> Result<Self> {
        let dims = Self {
            num_rrhs,
            num_rrbs_per_rrh,
            num_users,
            num_files,
        };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("num_rrhs", self.num_rrhs),
            ("num_rrbs_per_rrh", self.num_rrbs_per_rrh),
            ("num_users", self.num_users),
            ("num_files", self.num_files),
        ] {
            if v == 0 {
                return Err(Error::Domain(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// Total number of RRBs across all RRHs.
    pub fn total_rrbs(&self) -> usize {
        self.num_rrhs * self.num_rrbs_per_rrh
    }

    fn triple_index(&self, b: usize, z: usize, u: usize) -> usize {
        (b * self.num_rrbs_per_rrh + z) * self.num_users + u
    }

    fn check_triple(&self, b: usize, z: usize, u: usize) -> Result<()> {
        check_index("rrh", b, self.num_rrhs)?;
        check_index("rrb", z, self.num_rrbs_per_rrh)?;
        check_index("user", u, self.num_users)
    }
}

/// Converts a power spectral density in dBm/Hz to total linear power in
/// watts over `bandwidth_hz`.
pub fn psd_dbm_hz_to_watts(psd_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    10f64.powf((psd_dbm_hz - 30.0) / 10.0) * bandwidth_hz
}

/// Per-RRB transmit powers and the receiver noise power, both linear.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    dims: NetworkDims,
    tx_power: Vec<f64>,
    noise_power: f64,
    bandwidth_hz: f64,
}

impl PowerProfile {
    /// `tx_power` is indexed `[b][z]`; values are linear watts.
    pub fn new(dims: NetworkDims, tx_power: Vec<Vec<f64>>, noise_power: f64, bandwidth_hz: f64) -> Result<Self> {
        if bandwidth_hz.is_nan() || bandwidth_hz <= 0.0 {
            return Err(Error::Domain(format!("bandwidth must be positive, got {bandwidth_hz}")));
        }
        if !noise_power.is_finite() || noise_power < 0.0 {
            return Err(Error::Domain(format!(
                "noise power must be finite and nonnegative, got {noise_power}"
            )));
        }
        if tx_power.len() != dims.num_rrhs || tx_power.iter().any(|row| row.len() != dims.num_rrbs_per_rrh) {
            return Err(Error::MissingData(
                "transmit power must be given for every (rrh, rrb) pair".into(),
            ));
        }
        let flat: Vec<f64> = tx_power.into_iter().flatten().collect();
        if flat.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Domain("transmit powers must be finite and nonnegative".into()));
        }
        Ok(Self {
            dims,
            tx_power: flat,
            noise_power,
            bandwidth_hz,
        })
    }

    /// Uniform transmit PSD on every RRB, both PSDs in dBm/Hz.
    pub fn from_psd(dims: NetworkDims, tx_psd_dbm_hz: f64, noise_psd_dbm_hz: f64, bandwidth_hz: f64) -> Result<Self> {
        let p = psd_dbm_hz_to_watts(tx_psd_dbm_hz, bandwidth_hz);
        let noise = psd_dbm_hz_to_watts(noise_psd_dbm_hz, bandwidth_hz);
        Self::new(
            dims,
            vec![vec![p; dims.num_rrbs_per_rrh]; dims.num_rrhs],
            noise,
            bandwidth_hz,
        )
    }

    pub fn tx_power(&self, b: usize, z: usize) -> f64 {
        self.tx_power[b * self.dims.num_rrbs_per_rrh + z]
    }

    pub fn set_tx_power(&mut self, b: usize, z: usize, watts: f64) {
        self.tx_power[b * self.dims.num_rrbs_per_rrh + z] = watts;
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn dims(&self) -> NetworkDims {
        self.dims
    }
}

/// Linear power gains `|h|^2` for every (b, z, u).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    dims: NetworkDims,
    gain: Vec<f64>,
}

impl ChannelState {
    pub fn zeros(dims: NetworkDims) -> Self {
        Self {
            dims,
            gain: vec![0.0; dims.num_rrhs * dims.num_rrbs_per_rrh * dims.num_users],
        }
    }

    /// Builds from a `[b][z][u]` nested vector.
    pub fn from_nested(dims: NetworkDims, gain: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let complete = gain.len() == dims.num_rrhs
            && gain.iter().all(|per_b| {
                per_b.len() == dims.num_rrbs_per_rrh && per_b.iter().all(|per_z| per_z.len() == dims.num_users)
            });
        if !complete {
            return Err(Error::MissingData(
                "channel gain must be given for every (rrh, rrb, user) triple".into(),
            ));
        }
        let flat: Vec<f64> = gain.into_iter().flatten().flatten().collect();
        if flat.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::Domain("channel gains must be finite and nonnegative".into()));
        }
        Ok(Self { dims, gain: flat })
    }

    pub fn gain(&self, b: usize, z: usize, u: usize) -> f64 {
        self.gain[self.dims.triple_index(b, z, u)]
    }

    pub fn set_gain(&mut self, b: usize, z: usize, u: usize, value: f64) -> Result<()> {
        self.dims.check_triple(b, z, u)?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Domain(format!(
                "gain must be finite and nonnegative, got {value}"
            )));
        }
        let i = self.dims.triple_index(b, z, u);
        self.gain[i] = value;
        Ok(())
    }

    pub fn dims(&self) -> NetworkDims {
        self.dims
    }
}

/// SINR of user `u` served by RRB `z` of RRH `b`. Only RRBs with the same
/// index `z` in other RRHs interfere.
pub fn sinr(channel: &ChannelState, power: &PowerProfile, b: usize, z: usize, u: usize) -> Result<f64> {
    let dims = channel.dims();
    if power.dims() != dims {
        return Err(Error::MissingData(
            "power profile and channel state disagree on dimensions".into(),
        ));
    }
    dims.check_triple(b, z, u)?;
    let signal = power.tx_power(b, z) * channel.gain(b, z, u);
    let interference: f64 = (0..dims.num_rrhs)
        .filter(|&other| other != b)
        .map(|other| power.tx_power(other, z) * channel.gain(other, z, u))
        .sum();
    let denom = power.noise_power() + interference;
    if denom <= 0.0 {
        if signal == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain(format!(
            "zero noise and zero interference at (b={b}, z={z}, u={u})"
        )));
    }
    Ok(signal / denom)
}

/// Shannon capacity `log2(1 + s)` in bits/s/Hz.
pub fn capacity(s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain(format!("SINR must be nonnegative, got {s}")));
    }
    Ok((1.0 + s).log2())
}

/// Achievable rate of every (b, z, u) association.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityMatrix {
    dims: NetworkDims,
    rate: Vec<f64>,
}

impl CapacityMatrix {
    /// Direct construction from a `[b][z][u]` table of spectral efficiencies.
    /// Used for hand-built instances and fixtures.
    pub fn from_nested(dims: NetworkDims, rate: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let ch = ChannelState::from_nested(dims, rate).map_err(|e| match e {
            Error::Domain(_) => Error::Domain("rates must be finite and nonnegative".into()),
            other => other,
        })?;
        Ok(Self { dims, rate: ch.gain })
    }

    pub fn uniform(dims: NetworkDims, value: f64) -> Result<Self> {
        Self::from_nested(
            dims,
            vec![vec![vec![value; dims.num_users]; dims.num_rrbs_per_rrh]; dims.num_rrhs],
        )
    }

    pub fn rate(&self, b: usize, z: usize, u: usize) -> f64 {
        self.rate[self.dims.triple_index(b, z, u)]
    }

    pub fn try_rate(&self, b: usize, z: usize, u: usize) -> Result<f64> {
        self.dims.check_triple(b, z, u)?;
        Ok(self.rate(b, z, u))
    }

    pub fn set_rate(&mut self, b: usize, z: usize, u: usize, value: f64) -> Result<()> {
        self.dims.check_triple(b, z, u)?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Domain(format!(
                "rate must be finite and nonnegative, got {value}"
            )));
        }
        let i = self.dims.triple_index(b, z, u);
        self.rate[i] = value;
        Ok(())
    }

    /// Rates of every user on RRB `(b, z)`, indexed by user.
    pub fn column(&self, b: usize, z: usize) -> &[f64] {
        let start = self.dims.triple_index(b, z, 0);
        &self.rate[start..start + self.dims.num_users]
    }

    pub fn dims(&self) -> NetworkDims {
        self.dims
    }
}

pub fn capacity_matrix(channel: &ChannelState, power: &PowerProfile, dims: NetworkDims) -> Result<CapacityMatrix> {
    if channel.dims() != dims || power.dims() != dims {
        return Err(Error::MissingData(
            "channel or power profile incomplete for the given dimensions".into(),
        ));
    }
    let mut rate = Vec::with_capacity(channel.gain.len());
    for b in 0..dims.num_rrhs {
        for z in 0..dims.num_rrbs_per_rrh {
            for u in 0..dims.num_users {
                rate.push(capacity(sinr(channel, power, b, z, u)?)?);
            }
        }
    }
    Ok(CapacityMatrix { dims, rate })
}
