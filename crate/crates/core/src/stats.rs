//! One-dimensional statistical features over sample vectors.
//!
//! Five statistics are defined; composites concatenate them in enum order.
//! Statistics over complex frames are computed on sample magnitudes, which
//! makes them insensitive to a global phase offset.

use crate::error::{Error, Result};
use crate::fft;
use crate::waveform::ComplexFrame;

/// The supported statistics. Canonical feature order is the enum order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatKind {
    Mean,
    Variance,
    Skewness,
    MaxMinRatio,
    Iqr,
}

impl StatKind {
    pub const ALL: [StatKind; 5] = [
        StatKind::Mean,
        StatKind::Variance,
        StatKind::Skewness,
        StatKind::MaxMinRatio,
        StatKind::Iqr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StatKind::Mean => "mean",
            StatKind::Variance => "variance",
            StatKind::Skewness => "skewness",
            StatKind::MaxMinRatio => "maxmin-ratio",
            StatKind::Iqr => "iqr",
        }
    }
}

/// Which signal view a feature vector was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainTag {
    Time,
    Frequency,
    Wavelet,
}

/// Provenance attached to each feature vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureMeta {
    pub alpha: f64,
    pub esn0_db: f64,
    pub domain: DomainTag,
}

/// A fixed-length real feature vector with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: usize,
    pub meta: FeatureMeta,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, label: usize, meta: FeatureMeta) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature at index {i}")));
        }
        Ok(FeatureVector {
            values,
            label,
            meta,
        })
    }

    pub(crate) fn unlabeled(values: Vec<f64>, domain: DomainTag) -> Result<Self> {
        FeatureVector::new(
            values,
            0,
            FeatureMeta {
                alpha: 0.0,
                esn0_db: 0.0,
                domain,
            },
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Linear-interpolation percentile on a sorted slice: rank `r = q·(n−1)`,
/// value interpolated between `floor(r)` and `ceil(r)`.
fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let r = q * (sorted.len() - 1) as f64;
    let lo = r.floor() as usize;
    let hi = r.ceil() as usize;
    sorted[lo] + (r - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Evaluates one statistic.
///
/// Variance is the population variance (divide by `n`); skewness is the
/// Fisher-Pearson `g1 = m3/m2^{3/2}`, defined as 0 when `m2 ≤ 1e-30`; the
/// IQR uses linear-interpolation percentiles.
pub fn stat(values: &[f64], kind: StatKind) -> Result<f64> {
    let min_len = match kind {
        StatKind::Mean | StatKind::MaxMinRatio => 1,
        _ => 2,
    };
    if values.len() < min_len {
        return Err(Error::invalid(format!(
            "{} requires at least {min_len} values, got {}",
            kind.name(),
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Ok(match kind {
        StatKind::Mean => mean,
        StatKind::Variance => values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n,
        StatKind::Skewness => {
            let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            if m2 <= 1e-30 {
                0.0
            } else {
                let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
                m3 / m2.powf(1.5)
            }
        }
        StatKind::MaxMinRatio => {
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            if min == 0.0 {
                return Err(Error::degenerate("max/min ratio undefined for zero minimum"));
            }
            max / min
        }
        StatKind::Iqr => {
            let mut sorted = values.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            percentile_sorted(&sorted, 0.75) - percentile_sorted(&sorted, 0.25)
        }
    })
}

/// Sorts and dedups the requested kinds into canonical enum order.
pub(crate) fn canonical_kinds(kinds: &[StatKind]) -> Result<Vec<StatKind>> {
    if kinds.is_empty() {
        return Err(Error::invalid("at least one statistic kind is required"));
    }
    let mut out = kinds.to_vec();
    out.sort();
    out.dedup();
    Ok(out)
}

fn stats_of(values: &[f64], kinds: &[StatKind], domain: DomainTag) -> Result<FeatureVector> {
    let kinds = canonical_kinds(kinds)?;
    let features = kinds
        .iter()
        .map(|&k| stat(values, k))
        .collect::<Result<Vec<f64>>>()?;
    FeatureVector::unlabeled(features, domain)
}

/// Statistics of the time-domain magnitude sequence `|x_t|`, concatenated in
/// canonical order.
pub fn time_domain_features(frame: &ComplexFrame, kinds: &[StatKind]) -> Result<FeatureVector> {
    let mags: Vec<f64> = frame.samples().iter().map(|s| s.norm()).collect();
    stats_of(&mags, kinds, DomainTag::Time)
}

/// Statistics of the DFT magnitude spectrum of the frame.
pub fn frequency_domain_features(
    frame: &ComplexFrame,
    kinds: &[StatKind],
) -> Result<FeatureVector> {
    let spectrum = fft::fft(frame.samples());
    let mags: Vec<f64> = spectrum.iter().map(|s| s.norm()).collect();
    stats_of(&mags, kinds, DomainTag::Frequency)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Independent percentile oracle: plain sort plus interpolation, written
    /// from the definition rather than reusing the implementation.
    fn iqr_oracle(values: &[f64]) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pick = |q: f64| {
            let r = q * (v.len() as f64 - 1.0);
            let lo = r.floor() as usize;
            let frac = r - lo as f64;
            if frac == 0.0 {
                v[lo]
            } else {
                v[lo] * (1.0 - frac) + v[lo + 1] * frac
            }
        };
        pick(0.75) - pick(0.25)
    }

    #[test]
    fn constant_vector_statistics() {
        let v = [3.0, 3.0, 3.0, 3.0];
        assert_eq!(stat(&v, StatKind::Variance).unwrap(), 0.0);
        assert_eq!(stat(&v, StatKind::Iqr).unwrap(), 0.0);
        assert_eq!(stat(&v, StatKind::MaxMinRatio).unwrap(), 1.0);
        assert_eq!(stat(&v, StatKind::Skewness).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_vector_has_zero_mean_and_skew() {
        let v = [-2.0, -1.0, 1.0, 2.0];
        assert_eq!(stat(&v, StatKind::Mean).unwrap(), 0.0);
        assert!(stat(&v, StatKind::Skewness).unwrap().abs() <= 1e-15);
    }

    #[test]
    fn iqr_golden_value_for_one_through_eight() {
        let v: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        // Frozen from the sort-and-interpolate oracle: P25 = 2.75, P75 = 6.25.
        assert_eq!(stat(&v, StatKind::Iqr).unwrap(), 3.5);
        assert_eq!(iqr_oracle(&v), 3.5);
    }

    #[test]
    fn iqr_matches_oracle_on_random_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for len in [2usize, 3, 5, 17, 100, 1024] {
            let v: Vec<f64> = (0..len).map(|_| rng.random_range(-5.0..5.0)).collect();
            let got = stat(&v, StatKind::Iqr).unwrap();
            assert!((got - iqr_oracle(&v)).abs() <= 1e-12, "len {len}");
        }
    }

    #[test]
    fn maxmin_rejects_zero_minimum() {
        assert!(matches!(
            stat(&[0.0, 1.0], StatKind::MaxMinRatio),
            Err(crate::Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn short_inputs_are_rejected() {
        assert!(stat(&[], StatKind::Mean).is_err());
        assert!(stat(&[1.0], StatKind::Variance).is_err());
        assert!(stat(&[1.0], StatKind::Skewness).is_err());
        assert!(stat(&[1.0], StatKind::Iqr).is_err());
        assert!(stat(&[1.0], StatKind::MaxMinRatio).is_ok());
    }

    #[test]
    fn scale_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v: Vec<f64> = (0..64).map(|_| rng.random_range(0.5..4.0)).collect();
        let c = 2.5;
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        let tol = 1e-12;
        assert!(
            (stat(&scaled, StatKind::Mean).unwrap() - c * stat(&v, StatKind::Mean).unwrap()).abs()
                <= tol
        );
        assert!(
            (stat(&scaled, StatKind::Variance).unwrap()
                - c * c * stat(&v, StatKind::Variance).unwrap())
            .abs()
                <= tol
        );
        assert!(
            (stat(&scaled, StatKind::Skewness).unwrap() - stat(&v, StatKind::Skewness).unwrap())
                .abs()
                <= tol
        );
        assert!(
            (stat(&scaled, StatKind::MaxMinRatio).unwrap()
                - stat(&v, StatKind::MaxMinRatio).unwrap())
            .abs()
                <= tol
        );
        assert!(
            (stat(&scaled, StatKind::Iqr).unwrap() - c * stat(&v, StatKind::Iqr).unwrap()).abs()
                <= tol
        );
    }

    #[test]
    fn permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..50).map(|_| rng.random_range(0.1..9.0)).collect();
        let mut shuffled = v.clone();
        // Fisher-Yates with the seeded generator.
        for i in (1..shuffled.len()).rev() {
            let j = rng.random_range(0..=i);
            shuffled.swap(i, j);
        }
        for kind in StatKind::ALL {
            let a = stat(&v, kind).unwrap();
            let b = stat(&shuffled, kind).unwrap();
            assert!((a - b).abs() <= 1e-12, "{}", kind.name());
        }
    }

    #[test]
    fn time_features_have_requested_arity_and_order() {
        let frame = ComplexFrame::new(vec![Complex64::new(0.6, 0.8); 16], 1.0).unwrap();
        let fv = time_domain_features(&frame, &[StatKind::Variance]).unwrap();
        assert_eq!(fv.values, vec![0.0]);
        let fv = time_domain_features(&frame, &StatKind::ALL).unwrap();
        assert_eq!(fv.len(), 5);
        // Duplicates and reordering collapse to canonical order.
        let fv2 = time_domain_features(
            &frame,
            &[StatKind::Iqr, StatKind::Mean, StatKind::Iqr],
        )
        .unwrap();
        assert_eq!(fv2.len(), 2);
        assert_eq!(fv2.values[0], fv.values[0]); // mean first
    }

    #[test]
    fn time_features_ignore_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let samples: Vec<Complex64> = (0..128)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let rot = Complex64::new(0.0, 1.234).exp();
        let rotated: Vec<Complex64> = samples.iter().map(|s| s * rot).collect();
        let a = time_domain_features(&ComplexFrame::new(samples, 1.0).unwrap(), &StatKind::ALL)
            .unwrap();
        let b = time_domain_features(&ComplexFrame::new(rotated, 1.0).unwrap(), &StatKind::ALL)
            .unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn frequency_features_match_naive_dft_oracle() {
        // Off-bin tone so leakage keeps every magnitude nonzero.
        let n = 64;
        let w0 = 2.0 * PI * 7.3 / n as f64;
        let samples: Vec<Complex64> = (0..n)
            .map(|t| Complex64::new((w0 * t as f64).cos(), (w0 * t as f64).sin()))
            .collect();
        let frame = ComplexFrame::new(samples.clone(), 1.0).unwrap();
        let fv = frequency_domain_features(&frame, &StatKind::ALL).unwrap();

        // Naive O(n^2) DFT as the oracle.
        let mut mags = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, s) in samples.iter().enumerate() {
                let angle = -2.0 * PI * (k * t) as f64 / n as f64;
                acc += s * Complex64::new(angle.cos(), angle.sin());
            }
            mags.push(acc.norm());
        }
        let expect = [
            stat(&mags, StatKind::Mean).unwrap(),
            stat(&mags, StatKind::Variance).unwrap(),
            stat(&mags, StatKind::Skewness).unwrap(),
            stat(&mags, StatKind::MaxMinRatio).unwrap(),
            stat(&mags, StatKind::Iqr).unwrap(),
        ];
        for (got, want) in fv.values.iter().zip(expect) {
            let tol = 1e-9 * want.abs().max(1.0);
            assert!((got - want).abs() <= tol, "{got} vs {want}");
        }
    }

    #[test]
    fn frequency_features_are_time_shift_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let samples: Vec<Complex64> = (0..256)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut shifted = samples.clone();
        shifted.rotate_left(37);
        let a = frequency_domain_features(
            &ComplexFrame::new(samples, 1.0).unwrap(),
            &StatKind::ALL,
        )
        .unwrap();
        let b = frequency_domain_features(
            &ComplexFrame::new(shifted, 1.0).unwrap(),
            &StatKind::ALL,
        )
        .unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn mean_of_white_spectrum_means_is_stable() {
        // Two independent Monte-Carlo batches agree within 5%.
        let batch = |seed_base: u64| {
            let mut total = 0.0;
            let trials = 2000;
            for i in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed_base + i);
                let samples: Vec<Complex64> = (0..256)
                    .map(|_| {
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    })
                    .collect();
                let frame = ComplexFrame::new(samples, 1.0).unwrap();
                total += frequency_domain_features(&frame, &[StatKind::Mean])
                    .unwrap()
                    .values[0];
            }
            total / trials as f64
        };
        let a = batch(10_000);
        let b = batch(20_000);
        assert!((a - b).abs() / a.abs() <= 0.05, "{a} vs {b}");
    }
}
