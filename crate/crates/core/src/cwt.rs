//! Continuous wavelet transform with generalized Morse wavelets.
//!
//! The Morse family is analytic: its frequency response `ω^β·exp(−ω^γ)`
//! lives entirely on positive frequencies, so filtering happens in the
//! frequency domain — multiply the signal spectrum by a scaled filter, come
//! back with an inverse FFT, and keep the magnitude. Scales are laid out
//! logarithmically with a fixed number of voices per octave; the finest
//! scale places the wavelet peak at Nyquist.
//!
//! Boundary handling is periodic (a consequence of the FFT route), which
//! keeps the transform exactly covariant under circular time shifts.

use crate::error::{Error, Result};
use crate::fft;
use crate::stats::{self, DomainTag, FeatureVector, StatKind};
use crate::waveform::ComplexFrame;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Generalized Morse wavelet parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    gamma: f64,
    beta: f64,
}

impl MorseParams {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!(
                "Morse parameters must be positive, got gamma {gamma}, beta {beta}"
            )));
        }
        Ok(MorseParams { gamma, beta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Peak angular frequency `ω_p = (β/γ)^{1/γ}` of the mother wavelet.
    pub fn peak_omega(&self) -> f64 {
        (self.beta / self.gamma).powf(1.0 / self.gamma)
    }
}

impl Default for MorseParams {
    /// γ = 3, β = 20: the symmetric member commonly used for
    /// time-frequency analysis.
    fn default() -> Self {
        MorseParams {
            gamma: 3.0,
            beta: 20.0,
        }
    }
}

/// Logarithmic scale ladder, `s_j = s_min·2^{j/voices}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    octaves: usize,
    voices_per_octave: usize,
    scales: Vec<f64>,
}

/// Builds the scale ladder for the given octave/voice counts. The smallest
/// scale maps the wavelet peak onto the Nyquist frequency π.
pub fn build_scale_grid(
    octaves: usize,
    voices_per_octave: usize,
    params: &MorseParams,
) -> Result<ScaleGrid> {
    if octaves == 0 || voices_per_octave == 0 {
        return Err(Error::invalid("octaves and voices must both be at least 1"));
    }
    let s_min = params.peak_omega() / PI;
    let scales = (0..octaves * voices_per_octave)
        .map(|j| s_min * 2f64.powf(j as f64 / voices_per_octave as f64))
        .collect();
    Ok(ScaleGrid {
        octaves,
        voices_per_octave,
        scales,
    })
}

impl ScaleGrid {
    pub fn octaves(&self) -> usize {
        self.octaves
    }

    pub fn voices_per_octave(&self) -> usize {
        self.voices_per_octave
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

/// Scale × time magnitude matrix produced by the transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalogram {
    magnitudes: Vec<f64>, // row-major, n_scales × n_time
    n_scales: usize,
    n_time: usize,
    grid: ScaleGrid,
}

impl Scalogram {
    pub(crate) fn from_rows(rows: Vec<Vec<f64>>, grid: ScaleGrid) -> Self {
        let n_scales = rows.len();
        let n_time = rows.first().map_or(0, |r| r.len());
        let mut magnitudes = Vec::with_capacity(n_scales * n_time);
        for row in rows {
            debug_assert_eq!(row.len(), n_time);
            magnitudes.extend(row);
        }
        Scalogram {
            magnitudes,
            n_scales,
            n_time,
            grid,
        }
    }

    pub fn n_scales(&self) -> usize {
        self.n_scales
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn row(&self, scale_idx: usize) -> &[f64] {
        &self.magnitudes[scale_idx * self.n_time..(scale_idx + 1) * self.n_time]
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }
}

/// Analytic Morse filter sampled on the length-`n` DFT grid.
///
/// `ψ̂(ω_k) = a·(s·ω_k)^β·exp(−(s·ω_k)^γ)` for `ω_k = 2πk/n` up to the
/// Nyquist bin, zero on negative frequencies. The amplitude `a` normalizes
/// the largest sampled value to exactly 2, so a unit-amplitude tone at a
/// scale's peak frequency comes through the transform with unit magnitude.
pub fn morse_filter(params: &MorseParams, scale: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("transform length must be at least 2"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!("scale must be positive, got {scale}")));
    }
    let mut filter = vec![0.0; n];
    let (gamma, beta) = (params.gamma(), params.beta());
    let mut peak = 0.0f64;
    for (k, value) in filter.iter_mut().enumerate().take(n / 2 + 1) {
        if k == 0 {
            continue; // ω^β kills DC for β > 0
        }
        let sw = scale * 2.0 * PI * k as f64 / n as f64;
        // Log-space evaluation; underflows cleanly to zero far above the peak.
        let v = (beta * sw.ln() - sw.powf(gamma)).exp();
        *value = v;
        peak = peak.max(v);
    }
    if peak > 0.0 {
        let a = 2.0 / peak;
        for v in &mut filter {
            *v *= a;
        }
    }
    Ok(filter)
}

/// Precomputed filter bank and FFT plans for transforming many windows of
/// the same length.
pub struct CwtPlan {
    grid: ScaleGrid,
    params: MorseParams,
    n: usize,
    filters: Vec<Vec<f64>>,
    fwd: Arc<dyn rustfft::Fft<f64>>,
    inv: Arc<dyn rustfft::Fft<f64>>,
}

impl CwtPlan {
    pub fn new(grid: &ScaleGrid, params: &MorseParams, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("transform length must be at least 2"));
        }
        let filters = grid
            .scales()
            .iter()
            .map(|&s| morse_filter(params, s, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(CwtPlan {
            grid: grid.clone(),
            params: *params,
            n,
            filters,
            fwd: fft::forward(n),
            inv: fft::inverse(n),
        })
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    pub fn params(&self) -> &MorseParams {
        &self.params
    }

    pub fn window(&self) -> usize {
        self.n
    }

    /// Transforms one real signal into its scale × time magnitude matrix.
    pub fn scalogram(&self, signal: &[f64]) -> Result<Scalogram> {
        if signal.len() != self.n {
            return Err(Error::invalid(format!(
                "signal length {} does not match plan length {}",
                signal.len(),
                self.n
            )));
        }
        let mut spectrum: Vec<Complex64> =
            signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut spectrum);
        let inv_n = 1.0 / self.n as f64;
        let rows: Vec<Vec<f64>> = self
            .filters
            .iter()
            .map(|filter| {
                let mut buf: Vec<Complex64> = spectrum
                    .iter()
                    .zip(filter)
                    .map(|(x, &f)| x * f)
                    .collect();
                self.inv.process(&mut buf);
                buf.iter().map(|c| c.norm() * inv_n).collect()
            })
            .collect();
        Ok(Scalogram::from_rows(rows, self.grid.clone()))
    }

    /// Wavelet feature vector of a complex frame: the real and imaginary
    /// parts are transformed separately, each scalogram is reduced along
    /// time with every requested statistic, and the blocks are concatenated
    /// as `[kind × (real, imag)]` in canonical kind order. Length is
    /// `2·n_scales·|kinds|`.
    pub fn feature_vector(&self, frame: &ComplexFrame, kinds: &[StatKind]) -> Result<FeatureVector> {
        if frame.len() != self.n {
            return Err(Error::invalid(format!(
                "frame length {} does not match plan length {}",
                frame.len(),
                self.n
            )));
        }
        let kinds = stats::canonical_kinds(kinds)?;
        let re: Vec<f64> = frame.samples().iter().map(|s| s.re).collect();
        let im: Vec<f64> = frame.samples().iter().map(|s| s.im).collect();
        let sc_re = self.scalogram(&re)?;
        let sc_im = self.scalogram(&im)?;
        let mut values = Vec::with_capacity(2 * self.grid.len() * kinds.len());
        for &kind in &kinds {
            values.extend(reduce_time_axis(&sc_re, kind)?);
            values.extend(reduce_time_axis(&sc_im, kind)?);
        }
        FeatureVector::new(
            values,
            0,
            crate::stats::FeatureMeta {
                alpha: 0.0,
                esn0_db: 0.0,
                domain: DomainTag::Wavelet,
            },
        )
    }
}

/// One-shot transform; builds a plan internally. Prefer [`CwtPlan`] when
/// processing batches.
pub fn cwt(signal: &[f64], grid: &ScaleGrid, params: &MorseParams) -> Result<Scalogram> {
    if signal.len() < 2 {
        return Err(Error::invalid("signal must contain at least 2 samples"));
    }
    CwtPlan::new(grid, params, signal.len())?.scalogram(signal)
}

/// Collapses each scale row to a single statistic; output length equals the
/// number of scales.
pub fn reduce_time_axis(scalogram: &Scalogram, kind: StatKind) -> Result<Vec<f64>> {
    (0..scalogram.n_scales())
        .map(|i| stats::stat(scalogram.row(i), kind))
        .collect()
}

/// One-shot wavelet feature vector; see [`CwtPlan::feature_vector`].
pub fn wavelet_feature_vector(
    frame: &ComplexFrame,
    grid: &ScaleGrid,
    params: &MorseParams,
    kinds: &[StatKind],
) -> Result<FeatureVector> {
    CwtPlan::new(grid, params, frame.len())?.feature_vector(frame, kinds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_grid() -> ScaleGrid {
        build_scale_grid(7, 10, &MorseParams::default()).unwrap()
    }

    #[test]
    fn grid_has_expected_shape() {
        let grid = paper_grid();
        assert_eq!(grid.len(), 70);
        assert!(grid.scales().windows(2).all(|w| w[0] < w[1]));
        // Finest scale peaks at Nyquist.
        let params = MorseParams::default();
        assert!((params.peak_omega() / grid.scales()[0] - PI).abs() <= 1e-12);
    }

    #[test]
    fn single_octave_single_voice_grid() {
        let params = MorseParams::default();
        let grid = build_scale_grid(1, 1, &params).unwrap();
        assert_eq!(grid.scales(), &[params.peak_omega() / PI]);
    }

    #[test]
    fn peak_omega_matches_numerical_maximization() {
        let params = MorseParams::new(3.0, 20.0).unwrap();
        // Grid-search oracle over ω^β e^{−ω^γ}.
        let objective = |w: f64| 20.0 * w.ln() - w.powi(3);
        let mut best_w = 0.0;
        let mut best = f64::NEG_INFINITY;
        let mut w = 1e-3;
        while w < 10.0 {
            let v = objective(w);
            if v > best {
                best = v;
                best_w = w;
            }
            w += 1e-5;
        }
        assert!((params.peak_omega() - (20.0f64 / 3.0).powf(1.0 / 3.0)).abs() <= 1e-15);
        assert!((params.peak_omega() - best_w).abs() <= 1e-4);
    }

    #[test]
    fn filter_is_zero_at_dc_and_on_negative_frequencies() {
        let params = MorseParams::default();
        let f = morse_filter(&params, 1.0, 64).unwrap();
        assert_eq!(f[0], 0.0);
        for &v in &f[33..] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn filter_peak_is_exactly_two_near_peak_frequency() {
        let params = MorseParams::default();
        let n = 1024;
        for &scale in &[0.7, 1.0, 3.8, 20.0] {
            let f = morse_filter(&params, scale, n).unwrap();
            let max = f.iter().cloned().fold(0.0f64, f64::max);
            assert!((max - 2.0).abs() <= 1e-12, "scale {scale}: max {max}");
            let argmax = f
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            let target = params.peak_omega() / scale;
            let k_target = target * n as f64 / (2.0 * PI);
            assert!(
                (argmax as f64 - k_target).abs() <= 1.0,
                "scale {scale}: argmax bin {argmax}, continuous peak bin {k_target}"
            );
        }
    }

    #[test]
    fn doubling_the_scale_compresses_the_filter() {
        let params = MorseParams::default();
        let n = 1024;
        let s = 1.3;
        let f1 = morse_filter(&params, s, n).unwrap();
        let f2 = morse_filter(&params, 2.0 * s, n).unwrap();
        for k in 1..n / 4 {
            assert!(
                (f2[k] - f1[2 * k]).abs() <= 1e-3,
                "bin {k}: {} vs {}",
                f2[k],
                f1[2 * k]
            );
        }
    }

    #[test]
    fn zero_signal_gives_zero_scalogram() {
        let grid = paper_grid();
        let sc = cwt(&vec![0.0; 256], &grid, &MorseParams::default()).unwrap();
        assert_eq!(sc.n_scales(), 70);
        assert_eq!(sc.n_time(), 256);
        for i in 0..sc.n_scales() {
            assert!(sc.row(i).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn tone_localizes_to_the_matching_scale() {
        let grid = paper_grid();
        let params = MorseParams::default();
        let n = 1024;
        let w0 = PI / 4.0;
        let signal: Vec<f64> = (0..n).map(|t| (w0 * t as f64).cos()).collect();
        let sc = cwt(&signal, &grid, &params).unwrap();
        let best = (0..sc.n_scales())
            .max_by(|&a, &b| {
                let ma: f64 = sc.row(a).iter().sum();
                let mb: f64 = sc.row(b).iter().sum();
                ma.partial_cmp(&mb).unwrap()
            })
            .unwrap();
        let peak_freq = params.peak_omega() / grid.scales()[best];
        let voice_ratio = 2f64.powf(1.0 / grid.voices_per_octave() as f64);
        let ratio = (peak_freq / w0).max(w0 / peak_freq);
        assert!(
            ratio <= voice_ratio + 1e-9,
            "peak frequency {peak_freq} vs tone {w0} (ratio {ratio})"
        );
    }

    #[test]
    fn impulse_localizes_in_time() {
        let grid = paper_grid();
        let n = 512;
        let t0 = 313;
        let mut signal = vec![0.0; n];
        signal[t0] = 1.0;
        let sc = cwt(&signal, &grid, &MorseParams::default()).unwrap();
        for i in 0..sc.n_scales() {
            let argmax = sc.row(i)
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(argmax, t0, "scale row {i}");
        }
    }

    #[test]
    fn shift_covariance_is_exact_under_periodic_boundaries() {
        let grid = paper_grid();
        let params = MorseParams::default();
        let mut rng_state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            // xorshift; any fixed noise works here
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 256;
        let shift = 37;
        let signal: Vec<f64> = (0..n).map(|_| next()).collect();
        let mut shifted = signal.clone();
        shifted.rotate_right(shift);
        let a = cwt(&signal, &grid, &params).unwrap();
        let b = cwt(&shifted, &grid, &params).unwrap();
        for i in 0..a.n_scales() {
            let mut row = a.row(i).to_vec();
            row.rotate_right(shift);
            for (x, y) in row.iter().zip(b.row(i)) {
                assert!((x - y).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn magnitudes_scale_linearly_with_amplitude() {
        let grid = paper_grid();
        let params = MorseParams::default();
        let n = 256;
        let signal: Vec<f64> = (0..n).map(|t| (0.3 * t as f64).cos()).collect();
        let scaled: Vec<f64> = signal.iter().map(|v| 2.5 * v).collect();
        let a = cwt(&signal, &grid, &params).unwrap();
        let b = cwt(&scaled, &grid, &params).unwrap();
        for i in 0..a.n_scales() {
            for (x, y) in a.row(i).iter().zip(b.row(i)) {
                assert!((2.5 * x - y).abs() <= 1e-9 * y.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn reduction_has_one_value_per_scale() {
        let grid = paper_grid();
        let signal: Vec<f64> = (0..1024).map(|t| (0.1 * t as f64).sin()).collect();
        let sc = cwt(&signal, &grid, &MorseParams::default()).unwrap();
        assert_eq!(sc.n_scales(), 70);
        assert_eq!(sc.n_time(), 1024);
        let reduced = reduce_time_axis(&sc, StatKind::Variance).unwrap();
        assert_eq!(reduced.len(), 70);
    }

    #[test]
    fn variance_reduction_of_constant_rows_is_zero() {
        let grid = build_scale_grid(1, 2, &MorseParams::default()).unwrap();
        let sc = Scalogram::from_rows(vec![vec![1.5; 16], vec![0.25; 16]], grid);
        let reduced = reduce_time_axis(&sc, StatKind::Variance).unwrap();
        assert_eq!(reduced, vec![0.0, 0.0]);
    }

    #[test]
    fn iqr_reduction_matches_rowwise_oracle() {
        let grid = build_scale_grid(2, 3, &MorseParams::default()).unwrap();
        let mut state = 77u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as f64 / (1u64 << 31) as f64
        };
        let signal: Vec<f64> = (0..128).map(|_| next() - 0.5).collect();
        let sc = cwt(&signal, &grid, &MorseParams::default()).unwrap();
        let reduced = reduce_time_axis(&sc, StatKind::Iqr).unwrap();
        for (i, &v) in reduced.iter().enumerate() {
            let expect = stats::stat(sc.row(i), StatKind::Iqr).unwrap();
            assert_eq!(v, expect);
        }
    }

    #[test]
    fn feature_vector_lengths_follow_the_kind_count() {
        let grid = paper_grid();
        let params = MorseParams::default();
        let samples: Vec<Complex64> = (0..1024)
            .map(|t| Complex64::new((0.2 * t as f64).cos(), (0.11 * t as f64).sin()))
            .collect();
        let frame = ComplexFrame::new(samples, 1.0).unwrap();
        let fv = wavelet_feature_vector(&frame, &grid, &params, &[StatKind::Variance]).unwrap();
        assert_eq!(fv.len(), 140);
        let fv =
            wavelet_feature_vector(&frame, &grid, &params, &[StatKind::Variance, StatKind::Iqr])
                .unwrap();
        assert_eq!(fv.len(), 280);
    }

    #[test]
    fn purely_real_frame_has_zero_imaginary_features() {
        let grid = paper_grid();
        let params = MorseParams::default();
        let samples: Vec<Complex64> = (0..256)
            .map(|t| Complex64::new((0.4 * t as f64).cos(), 0.0))
            .collect();
        let frame = ComplexFrame::new(samples, 1.0).unwrap();
        let fv = wavelet_feature_vector(&frame, &grid, &params, &[StatKind::Variance]).unwrap();
        assert_eq!(fv.len(), 140);
        for &v in &fv.values[70..] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn cwt_rejects_degenerate_signals() {
        let grid = paper_grid();
        assert!(cwt(&[], &grid, &MorseParams::default()).is_err());
        assert!(cwt(&[1.0], &grid, &MorseParams::default()).is_err());
    }

    #[test]
    fn morse_params_reject_nonpositive_values() {
        assert!(MorseParams::new(0.0, 20.0).is_err());
        assert!(MorseParams::new(3.0, -1.0).is_err());
        assert!(build_scale_grid(0, 10, &MorseParams::default()).is_err());
    }
}
