//! OFDM/SEFDM symbol synthesis and the instantaneous-power decomposition.
//!
//! A symbol packs `N` QPSK sub-carriers at a fraction `alpha` of the
//! orthogonal spacing. At `alpha = 1` the sub-carriers are orthogonal
//! (plain OFDM); below 1 the spectrum is compressed and the sub-carriers
//! leak into each other, which is exactly the inter-carrier interference
//! the classifier downstream keys on.
//!
//! Two synthesis routes are provided: [`generate_symbol_direct`] evaluates
//! the defining sum term by term and serves as the oracle for
//! [`generate_symbol_ifft`], which realizes the same signal through a
//! length-`Q` inverse FFT with `Q = round(ρN/α)`.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Sub-carrier modulation. Only QPSK is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Qpsk,
}

/// Multicarrier signal parameters.
///
/// `alpha` is the bandwidth compression factor, conceptually the product of
/// sub-carrier spacing and symbol period; only the product matters here.
/// `alpha = 1` is orthogonal OFDM. The inverse-FFT route can only realize
/// compressions of the form `ρN/Q` for integer `Q`, so the constructor also
/// records `effective_alpha = ρN / round(ρN/α)`; for the signal sets used in
/// practice the rounding deviation stays below 0.1%.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SefdmConfig {
    n_subcarriers: usize,
    alpha: f64,
    oversampling: usize,
    modulation: Modulation,
    effective_alpha: f64,
}

impl SefdmConfig {
    pub fn new(n_subcarriers: usize, alpha: f64, oversampling: usize) -> Result<Self> {
        if n_subcarriers == 0 {
            return Err(Error::invalid("n_subcarriers must be at least 1"));
        }
        if oversampling == 0 {
            return Err(Error::invalid("oversampling must be at least 1"));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        let rho_n = (n_subcarriers * oversampling) as f64;
        let q = (rho_n / alpha).round();
        Ok(SefdmConfig {
            n_subcarriers,
            alpha,
            oversampling,
            modulation: Modulation::Qpsk,
            effective_alpha: rho_n / q,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    /// Compression actually realizable on the inverse-FFT grid.
    pub fn effective_alpha(&self) -> f64 {
        self.effective_alpha
    }

    /// Samples per symbol, `ρ·N`.
    pub fn symbol_len(&self) -> usize {
        self.n_subcarriers * self.oversampling
    }

    /// Inverse transform length `Q = round(ρN/α)`.
    pub fn transform_len(&self) -> usize {
        let rho_n = (self.n_subcarriers * self.oversampling) as f64;
        (rho_n / self.alpha).round() as usize
    }

    /// Same geometry with `alpha` snapped to `effective_alpha`.
    pub fn snapped(&self) -> SefdmConfig {
        SefdmConfig {
            alpha: self.effective_alpha,
            ..*self
        }
    }
}

/// One QPSK symbol per sub-carrier; every element has unit magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct QpskVector {
    symbols: Vec<Complex64>,
}

impl QpskVector {
    pub fn new(symbols: Vec<Complex64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::invalid("QPSK vector must be nonempty"));
        }
        for (i, s) in symbols.iter().enumerate() {
            if (s.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "QPSK symbol {i} has magnitude {} (expected 1)",
                    s.norm()
                )));
            }
        }
        Ok(QpskVector { symbols })
    }

    /// Skips the unit-magnitude check. Intended for diagnostics such as
    /// linearity probes; the synthesis routines accept any complex loading.
    pub fn from_symbols_unchecked(symbols: Vec<Complex64>) -> Self {
        QpskVector { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }
}

/// A run of complex baseband samples. `sample_rate_hz` is carried for
/// provenance only; all processing works in normalized frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFrame {
    samples: Vec<Complex64>,
    sample_rate_hz: f64,
}

impl ComplexFrame {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("frame must contain at least one sample"));
        }
        if let Some(i) = samples.iter().position(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample at index {i}")));
        }
        Ok(ComplexFrame {
            samples,
            sample_rate_hz,
        })
    }

    /// Internal constructor for outputs that are finite by construction.
    pub(crate) fn unchecked(samples: Vec<Complex64>, sample_rate_hz: f64) -> Self {
        ComplexFrame {
            samples,
            sample_rate_hz,
        }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of `|x|²` over the frame.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Gray-maps a bit vector onto QPSK symbols, two bits per sub-carrier.
///
/// Pair `(b1, b0)` selects the quadrant: `b1` the sign of the real part,
/// `b0` the sign of the imaginary part, so `00 → (+1+j)/√2` and
/// `11 → (−1−j)/√2`.
pub fn map_qpsk(bits: &[u8]) -> Result<QpskVector> {
    if bits.is_empty() || bits.len() % 2 != 0 {
        return Err(Error::invalid(format!(
            "bit count must be even and nonzero, got {}",
            bits.len()
        )));
    }
    if let Some(&b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::invalid(format!("bits must be 0 or 1, got {b}")));
    }
    let symbols = bits
        .chunks_exact(2)
        .map(|p| {
            let re = if p[0] == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            let im = if p[1] == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            Complex64::new(re, im)
        })
        .collect();
    Ok(QpskVector { symbols })
}

/// Synthesizes one symbol by direct evaluation of the defining sum:
///
/// `X_k = (1/√N) Σ_n s_n exp(j2πnkα/(ρN))`, `k = 0..ρN−1`.
///
/// Quadratic in the symbol length; kept as the independent reference for
/// the transform route.
pub fn generate_symbol_direct(cfg: &SefdmConfig, s: &QpskVector) -> Result<ComplexFrame> {
    if s.len() != cfg.n_subcarriers() {
        return Err(Error::invalid(format!(
            "expected {} sub-carrier symbols, got {}",
            cfg.n_subcarriers(),
            s.len()
        )));
    }
    let n = cfg.n_subcarriers();
    let m = cfg.symbol_len();
    let scale = 1.0 / (n as f64).sqrt();
    let step = 2.0 * PI * cfg.alpha() / m as f64;
    let samples = (0..m)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, sym) in s.symbols().iter().enumerate() {
                let angle = step * (idx * k) as f64;
                acc += sym * Complex64::new(angle.cos(), angle.sin());
            }
            acc * scale
        })
        .collect();
    Ok(ComplexFrame::unchecked(samples, 1.0))
}

/// Synthesizes one symbol through a length-`Q` inverse FFT.
///
/// The sub-carrier symbols occupy bins `0..N−1` of a length-`Q` spectrum,
/// `Q = round(ρN/α)`; the first `ρN` output samples are kept and scaled by
/// `1/√N`. The result equals [`generate_symbol_direct`] evaluated at
/// `effective_alpha = ρN/Q`.
pub fn generate_symbol_ifft(cfg: &SefdmConfig, s: &QpskVector) -> Result<ComplexFrame> {
    if s.len() != cfg.n_subcarriers() {
        return Err(Error::invalid(format!(
            "expected {} sub-carrier symbols, got {}",
            cfg.n_subcarriers(),
            s.len()
        )));
    }
    let m = cfg.symbol_len();
    let q = cfg.transform_len();
    if q < m {
        return Err(Error::invalid(format!(
            "transform length {q} shorter than symbol length {m} (alpha > 1?)"
        )));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); q];
    buf[..s.len()].copy_from_slice(s.symbols());
    fft::inverse(q).process(&mut buf);
    // rustfft's inverse is unnormalized: buf[k] = Σ_n s_n e^{+j2πnk/Q}.
    let scale = 1.0 / (cfg.n_subcarriers() as f64).sqrt();
    buf.truncate(m);
    for v in &mut buf {
        *v *= scale;
    }
    Ok(ComplexFrame::unchecked(buf, 1.0))
}

/// Element-wise instantaneous power `|X_k|²`.
pub fn instantaneous_power(frame: &ComplexFrame) -> Vec<f64> {
    frame.samples().iter().map(|s| s.norm_sqr()).collect()
}

/// Inter-carrier interference term of the power decomposition at sample `k`:
///
/// `(1/N) Σ_n Σ_{m≠n} s_n s_m* exp(j2π(n−m)kα/(ρN))`.
///
/// Evaluated as the literal double sum, so this is the definitional
/// reference; with unit-magnitude symbols, `|X_k|² = 1 + Re(ICI_k)` and the
/// imaginary part vanishes up to rounding.
pub fn ici_component(cfg: &SefdmConfig, s: &QpskVector, k: usize) -> Result<Complex64> {
    if s.len() != cfg.n_subcarriers() {
        return Err(Error::invalid(format!(
            "expected {} sub-carrier symbols, got {}",
            cfg.n_subcarriers(),
            s.len()
        )));
    }
    if k >= cfg.symbol_len() {
        return Err(Error::invalid(format!(
            "sample index {k} out of range 0..{}",
            cfg.symbol_len()
        )));
    }
    let n = cfg.n_subcarriers();
    let step = 2.0 * PI * cfg.alpha() / cfg.symbol_len() as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, sa) in s.symbols().iter().enumerate() {
        for (b, sb) in s.symbols().iter().enumerate() {
            if a == b {
                continue;
            }
            let angle = step * ((a as f64 - b as f64) * k as f64);
            acc += sa * sb.conj() * Complex64::new(angle.cos(), angle.sin());
        }
    }
    Ok(acc / n as f64)
}

/// ICI term for every sample of the symbol.
///
/// Groups the double sum by carrier offset `d = n − m`: one pass builds the
/// lag products `c_d = (1/N) Σ_n s_n s_{n−d}*`, then each sample accumulates
/// `Σ_d (c_d e^{jθdk} + c_d* e^{−jθdk})` with `θ = 2πα/(ρN)`. Same quantity
/// as [`ici_component`], an order of magnitude cheaper over a full symbol.
pub fn ici_profile(cfg: &SefdmConfig, s: &QpskVector) -> Result<Vec<Complex64>> {
    if s.len() != cfg.n_subcarriers() {
        return Err(Error::invalid(format!(
            "expected {} sub-carrier symbols, got {}",
            cfg.n_subcarriers(),
            s.len()
        )));
    }
    let n = cfg.n_subcarriers();
    let m = cfg.symbol_len();
    let syms = s.symbols();
    // Positive-lag autocorrelation, c[d-1] = (1/N) Σ_n s_n s_{n-d}*.
    let lags: Vec<Complex64> = (1..n)
        .map(|d| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in d..n {
                acc += syms[i] * syms[i - d].conj();
            }
            acc / n as f64
        })
        .collect();
    let theta = 2.0 * PI * cfg.alpha() / m as f64;
    let profile = (0..m)
        .map(|k| {
            // Phasor powers w^d for w = e^{jθk}, accumulated incrementally.
            let w = Complex64::new((theta * k as f64).cos(), (theta * k as f64).sin());
            let mut p = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for c in &lags {
                p *= w;
                acc += c * p + (c * p).conj();
            }
            acc
        })
        .collect();
    Ok(profile)
}
