//! Link-budget primitives.
//!
//! All rates are computed from linear quantities; dB is only used at the
//! edges (parameter input and map storage).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Radio-horizon factor in km per sqrt(m) under standard atmospheric refraction.
pub const LOS_FACTOR_KM: f64 = 4.12;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Transmitter, receiver and channel parameters, all in linear SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Transmit power (W).
    pub p_t: f64,
    /// Transmit antenna gain (linear).
    pub g_t: f64,
    /// Receive antenna gain (linear).
    pub g_r: f64,
    /// Channel bandwidth (Hz).
    pub bandwidth: f64,
    /// Noise power spectral density (W/Hz).
    pub n0: f64,
    /// Carrier frequency (Hz).
    pub f: f64,
    /// Ship antenna height (m).
    pub z_tx: f64,
    /// Base-station antenna height (m).
    pub z_rx: f64,
}

impl Default for RadioParams {
    /// 15 dBm transmit power, 15/20 dBi antennas, 50 MHz at 10 GHz,
    /// -169 dBm/Hz noise, antennas at 10 m and 15 m.
    fn default() -> Self {
        Self {
            p_t: dbm_to_watts(15.0),
            g_t: db_to_linear(15.0),
            g_r: db_to_linear(20.0),
            bandwidth: 50e6,
            n0: dbm_to_watts(-169.0),
            f: 10e9,
            z_tx: 10.0,
            z_rx: 15.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_t", self.p_t),
            ("g_t", self.g_t),
            ("g_r", self.g_r),
            ("bandwidth", self.bandwidth),
            ("n0", self.n0),
            ("f", self.f),
            ("z_tx", self.z_tx),
            ("z_rx", self.z_rx),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("radio parameter {name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// SNR obtained with a unit channel gain, `G_t G_r P_t / (n0 B)`.
    pub fn snr_scale(&self) -> f64 {
        self.g_t * self.g_r * self.p_t / (self.n0 * self.bandwidth)
    }
}

/// Shannon rate in bits/s for a linear channel power gain.
pub fn shannon_rate(gain: f64, radio: &RadioParams) -> f64 {
    radio.bandwidth * (gain * radio.snr_scale()).ln_1p() / std::f64::consts::LN_2
}

/// Same rate computed through the dB domain; used to cross-check
/// [`shannon_rate`].
pub fn shannon_rate_db(loss_db: f64, radio: &RadioParams) -> f64 {
    let snr_db = linear_to_db(radio.snr_scale()) - loss_db;
    radio.bandwidth * (1.0 + db_to_linear(snr_db)).log2()
}

/// Free-space path loss in dB, `20 log10(4 pi d f / c)`.
pub fn free_space_loss_db(d: f64, f: f64) -> Result<f64> {
    if d.is_nan() || d <= 0.0 {
        return Err(Error::Domain(format!("free-space distance must be > 0, got {d}")));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * d * f / SPEED_OF_LIGHT).log10())
}

pub fn free_space_gain(d: f64, f: f64) -> Result<f64> {
    free_space_loss_db(d, f).map(|l| db_to_linear(-l))
}

/// Radio-horizon distance in meters for the two antenna heights.
pub fn los_range(z_tx: f64, z_rx: f64) -> f64 {
    LOS_FACTOR_KM * (z_tx.max(0.0).sqrt() + z_rx.max(0.0).sqrt()) * 1000.0
}
