//! Channel impairments: AWGN at a target Es/N0, Rayleigh multipath,
//! unsynchronized receiver truncation, and power normalization.
//!
//! Every operation is deterministic under an explicit seed, so full
//! impairment chains can be replayed bit for bit. When impairing batches in
//! parallel, derive per-symbol seeds as `base_seed ^ symbol_index`.

use crate::error::{Error, Result};
use crate::waveform::ComplexFrame;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// Symbol-energy to noise-density ratio in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsN0 {
    value_db: f64,
}

impl EsN0 {
    /// Positive infinity is the documented "no noise" sentinel.
    pub const NO_NOISE: EsN0 = EsN0 {
        value_db: f64::INFINITY,
    };

    pub fn new(value_db: f64) -> Result<Self> {
        if value_db.is_nan() || value_db == f64::NEG_INFINITY {
            return Err(Error::invalid(format!("Es/N0 must be finite or +inf, got {value_db}")));
        }
        Ok(EsN0 { value_db })
    }

    pub fn db(&self) -> f64 {
        self.value_db
    }

    pub fn is_no_noise(&self) -> bool {
        self.value_db == f64::INFINITY
    }
}

/// Adds circular complex Gaussian noise scaled to the requested Es/N0.
///
/// The noise variance is set against the frame's measured mean power, so the
/// ratio is exact regardless of upstream channel gain: total variance
/// `σ² = P/10^(EsN0/10)`, split evenly across the real and imaginary parts.
pub fn apply_awgn(frame: &ComplexFrame, esn0: EsN0, rng_seed: u64) -> ComplexFrame {
    if esn0.is_no_noise() {
        return frame.clone();
    }
    let sigma2 = frame.mean_power() / 10f64.powf(esn0.db() / 10.0);
    let per_dim = (sigma2 / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let samples = frame
        .samples()
        .iter()
        .map(|s| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            s + Complex64::new(per_dim * re, per_dim * im)
        })
        .collect();
    ComplexFrame::unchecked(samples, frame.sample_rate_hz())
}

/// Multipath power-delay profile with Rayleigh (complex Gaussian) taps.
///
/// Stored tap powers are renormalized at construction so the linear powers
/// sum to one; the ensemble-average channel gain is then unity.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    tap_delays: Vec<usize>,
    tap_powers_db: Vec<f64>,
    regenerate_per_symbol: bool,
    seed: u64,
}

impl ChannelProfile {
    pub fn new(
        tap_delays: Vec<usize>,
        tap_powers_db: Vec<f64>,
        regenerate_per_symbol: bool,
        seed: u64,
    ) -> Result<Self> {
        if tap_delays.is_empty() || tap_delays.len() != tap_powers_db.len() {
            return Err(Error::invalid(
                "tap delays and powers must be nonempty and of equal length",
            ));
        }
        if tap_delays[0] != 0 {
            return Err(Error::invalid("first tap delay must be 0"));
        }
        if !tap_delays.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("tap delays must be strictly increasing"));
        }
        if tap_powers_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("tap powers must be finite"));
        }
        let total: f64 = tap_powers_db.iter().map(|p| 10f64.powf(p / 10.0)).sum();
        let correction_db = 10.0 * total.log10();
        let tap_powers_db = tap_powers_db
            .iter()
            .map(|p| p - correction_db)
            .collect();
        Ok(ChannelProfile {
            tap_delays,
            tap_powers_db,
            regenerate_per_symbol,
            seed,
        })
    }

    /// Short frequency-selective default: taps at sample delays [0, 2, 5]
    /// with powers [0, −3, −6] dB, redrawn per symbol.
    pub fn default_indoor(seed: u64) -> Self {
        ChannelProfile::new(vec![0, 2, 5], vec![0.0, -3.0, -6.0], true, seed)
            .expect("static profile is valid")
    }

    pub fn tap_delays(&self) -> &[usize] {
        &self.tap_delays
    }

    /// Normalized tap powers in dB (linear powers sum to one).
    pub fn tap_powers_db(&self) -> &[f64] {
        &self.tap_powers_db
    }

    pub fn regenerate_per_symbol(&self) -> bool {
        self.regenerate_per_symbol
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_delay(&self) -> usize {
        *self.tap_delays.last().unwrap()
    }

    /// Draws one tap realization, `h_k = √(p_k/2)·(g₁ + j·g₂)`.
    pub fn draw_taps(&self, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.tap_powers_db
            .iter()
            .map(|p| {
                let scale = (10f64.powf(p / 10.0) / 2.0).sqrt();
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(scale * re, scale * im)
            })
            .collect()
    }
}

/// Convolves the frame with one tap realization drawn from the profile's
/// own seed. Output has the same length; the tail transient is dropped.
pub fn apply_multipath(frame: &ComplexFrame, profile: &ChannelProfile) -> Result<ComplexFrame> {
    apply_multipath_seeded(frame, profile, profile.seed())
}

/// [`apply_multipath`] with an explicit tap seed, for per-symbol redraws.
pub fn apply_multipath_seeded(
    frame: &ComplexFrame,
    profile: &ChannelProfile,
    tap_seed: u64,
) -> Result<ComplexFrame> {
    if profile.max_delay() >= frame.len() {
        return Err(Error::invalid(format!(
            "max tap delay {} must be below frame length {}",
            profile.max_delay(),
            frame.len()
        )));
    }
    let taps = profile.draw_taps(tap_seed);
    let x = frame.samples();
    let samples = (0..x.len())
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (h, &d) in taps.iter().zip(profile.tap_delays()) {
                if t >= d {
                    acc += h * x[t - d];
                }
            }
            acc
        })
        .collect();
    Ok(ComplexFrame::unchecked(samples, frame.sample_rate_hz()))
}

/// Optional hardware impairments; both effects default to off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardwareImpairments {
    /// Rotate the whole symbol by a uniform random phase.
    pub random_phase: bool,
    /// Carrier frequency offset in parts-per-million of the sample rate.
    pub cfo_ppm: f64,
}

impl Default for HardwareImpairments {
    fn default() -> Self {
        HardwareImpairments {
            random_phase: false,
            cfo_ppm: 0.0,
        }
    }
}

impl HardwareImpairments {
    pub fn is_off(&self) -> bool {
        !self.random_phase && self.cfo_ppm == 0.0
    }
}

/// Applies the configured phase rotation and CFO spin.
pub fn apply_hardware(
    frame: &ComplexFrame,
    imp: &HardwareImpairments,
    rng_seed: u64,
) -> ComplexFrame {
    if imp.is_off() {
        return frame.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let phase = if imp.random_phase {
        rng.random_range(0.0..2.0 * PI)
    } else {
        0.0
    };
    let dw = 2.0 * PI * imp.cfo_ppm * 1e-6;
    let samples = frame
        .samples()
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let angle = phase + dw * t as f64;
            s * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    ComplexFrame::unchecked(samples, frame.sample_rate_hz())
}

/// Cuts a contiguous window at a uniform random offset, mimicking a receiver
/// with no symbol synchronization.
pub fn random_truncate(frame: &ComplexFrame, window: usize, rng_seed: u64) -> Result<ComplexFrame> {
    if window == 0 {
        return Err(Error::invalid("window must be nonzero"));
    }
    if window > frame.len() {
        return Err(Error::invalid(format!(
            "window {window} exceeds frame length {}",
            frame.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let offset = rng.random_range(0..=frame.len() - window);
    Ok(ComplexFrame::unchecked(
        frame.samples()[offset..offset + window].to_vec(),
        frame.sample_rate_hz(),
    ))
}

/// Scales the frame to unit mean power (receiver AGC stand-in).
pub fn normalize_power(frame: &ComplexFrame) -> Result<ComplexFrame> {
    let p = frame.mean_power();
    if p <= 0.0 || !p.is_finite() {
        return Err(Error::degenerate(format!(
            "cannot normalize frame with mean power {p}"
        )));
    }
    let g = 1.0 / p.sqrt();
    Ok(ComplexFrame::unchecked(
        frame.samples().iter().map(|s| s * g).collect(),
        frame.sample_rate_hz(),
    ))
}
