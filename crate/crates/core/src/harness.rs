//! Dataset construction, training protocols, Es/N0 sweeps, and report
//! emission.
//!
//! A dataset row is one synthesized symbol pushed through the impairment
//! chain (multipath → hardware → AWGN → normalize → truncate) and
//! featurized. Every random draw is keyed off the protocol seed, the role
//! (train or per-sweep-point test), the stream (bits, noise, ...), the class
//! and the symbol index, so identical settings reproduce identical datasets,
//! models, and reports regardless of thread count.

use crate::channel::{
    apply_awgn, apply_hardware, apply_multipath_seeded, normalize_power, random_truncate,
    ChannelProfile, EsN0, HardwareImpairments,
};
use crate::cwt::{build_scale_grid, CwtPlan, MorseParams};
use crate::error::{Error, Result};
use crate::exec;
use crate::stats::{
    frequency_domain_features, time_domain_features, FeatureVector, StatKind,
};
use crate::svm::{self, EcocModel, EcocParams};
use crate::waveform::{generate_symbol_ifft, map_qpsk, SefdmConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// A labeled set of compression factors; class index = position in `alphas`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalPattern {
    name: String,
    alphas: Vec<f64>,
}

impl SignalPattern {
    /// Coarsely spaced four-class set.
    pub fn type_i() -> Self {
        SignalPattern {
            name: "type-i".into(),
            alphas: vec![1.0, 0.9, 0.8, 0.7],
        }
    }

    /// Finely spaced seven-class set.
    pub fn type_ii() -> Self {
        SignalPattern {
            name: "type-ii".into(),
            alphas: vec![1.0, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7],
        }
    }

    pub fn custom(name: impl Into<String>, alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::invalid("pattern needs at least one alpha"));
        }
        for &a in &alphas {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::invalid(format!("alpha {a} outside (0, 1]")));
            }
        }
        let mut sorted = alphas.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("pattern alphas must be distinct"));
        }
        Ok(SignalPattern {
            name: name.into(),
            alphas,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn n_classes(&self) -> usize {
        self.alphas.len()
    }
}

/// Which view of the signal feeds the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// All five statistics of the time-domain magnitudes.
    TStat,
    /// All five statistics of the DFT magnitudes.
    FStat,
    /// Wavelet scalogram reduced by variance (140 features).
    WaveletVar,
    /// Wavelet scalogram reduced by IQR (140 features).
    WaveletIqr,
    /// Variance and IQR reductions concatenated (280 features).
    WaveletVarIqr,
}

impl FeatureMode {
    pub const ALL: [FeatureMode; 5] = [
        FeatureMode::TStat,
        FeatureMode::FStat,
        FeatureMode::WaveletVar,
        FeatureMode::WaveletIqr,
        FeatureMode::WaveletVarIqr,
    ];

    pub fn kinds(&self) -> &'static [StatKind] {
        match self {
            FeatureMode::TStat | FeatureMode::FStat => &StatKind::ALL,
            FeatureMode::WaveletVar => &[StatKind::Variance],
            FeatureMode::WaveletIqr => &[StatKind::Iqr],
            FeatureMode::WaveletVarIqr => &[StatKind::Variance, StatKind::Iqr],
        }
    }

    pub fn is_wavelet(&self) -> bool {
        matches!(
            self,
            FeatureMode::WaveletVar | FeatureMode::WaveletIqr | FeatureMode::WaveletVarIqr
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeatureMode::TStat => "t-stat",
            FeatureMode::FStat => "f-stat",
            FeatureMode::WaveletVar => "wavelet-var",
            FeatureMode::WaveletIqr => "wavelet-iqr",
            FeatureMode::WaveletVarIqr => "wavelet-var-iqr",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        FeatureMode::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature mode '{s}'")))
    }

    /// Feature vector length under a grid with `n_scales` scales.
    pub fn feature_len(&self, n_scales: usize) -> usize {
        if self.is_wavelet() {
            2 * n_scales * self.kinds().len()
        } else {
            self.kinds().len()
        }
    }
}

/// Everything needed to build datasets and train one classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingProtocol {
    pub n_subcarriers: usize,
    pub oversampling: usize,
    pub sample_rate_hz: f64,
    /// Receiver window cut from each symbol.
    pub window: usize,
    pub octaves: usize,
    pub voices_per_octave: usize,
    pub morse: MorseParams,
    pub feature_mode: FeatureMode,
    /// Training symbols draw their Es/N0 uniformly from this mix.
    pub esn0_mix_db: Vec<f64>,
    pub per_class_train: usize,
    pub per_class_test: usize,
    pub seed: u64,
    pub multipath: Option<ChannelProfile>,
    pub hardware: HardwareImpairments,
    pub svm: EcocParams,
}

impl TrainingProtocol {
    /// Desk-scale defaults for the standard signal set: 256 sub-carriers,
    /// 8× oversampling, 1024-sample windows, 7×10 wavelet grid, 500 train /
    /// 200 test symbols per class, AWGN only.
    pub fn desk_default(feature_mode: FeatureMode, esn0_mix_db: Vec<f64>, seed: u64) -> Self {
        TrainingProtocol {
            n_subcarriers: 256,
            oversampling: 8,
            sample_rate_hz: 200_000.0,
            window: 1024,
            octaves: 7,
            voices_per_octave: 10,
            morse: MorseParams::default(),
            feature_mode,
            esn0_mix_db,
            per_class_train: 500,
            per_class_test: 200,
            seed,
            multipath: None,
            hardware: HardwareImpairments::default(),
            svm: EcocParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.esn0_mix_db.is_empty() {
            return Err(Error::invalid("Es/N0 mix must be nonempty"));
        }
        if self.esn0_mix_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("Es/N0 mix values must be finite"));
        }
        if self.per_class_train == 0 || self.per_class_test == 0 {
            return Err(Error::invalid("per-class symbol counts must be at least 1"));
        }
        if self.window < 2 {
            return Err(Error::invalid("window must be at least 2 samples"));
        }
        if self.window > self.n_subcarriers * self.oversampling {
            return Err(Error::invalid(format!(
                "window {} exceeds symbol length {}",
                self.window,
                self.n_subcarriers * self.oversampling
            )));
        }
        if self.octaves == 0 || self.voices_per_octave == 0 {
            return Err(Error::invalid("scale grid needs octaves and voices >= 1"));
        }
        Ok(())
    }

    pub fn n_scales(&self) -> usize {
        self.octaves * self.voices_per_octave
    }

    pub fn feature_len(&self) -> usize {
        self.feature_mode.feature_len(self.n_scales())
    }
}

/// Dataset role; test sets at sweep points carry their own tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Train,
    Test,
}

// Seed-stream identifiers.
const STREAM_BITS: u64 = 1;
const STREAM_ESN0: u64 = 2;
const STREAM_TAPS: u64 = 3;
const STREAM_PHASE: u64 = 4;
const STREAM_NOISE: u64 = 5;
const STREAM_TRUNC: u64 = 6;

const TAG_TRAIN: u64 = 0xA1;
const TAG_TEST: u64 = 0xB2;

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Base seed for one (role, stream, class) tuple; per-symbol seeds are
/// `base ^ symbol_index`.
fn stream_base(seed: u64, role_tag: u64, stream: u64, class_idx: usize) -> u64 {
    let mut h = seed;
    for p in [role_tag, stream, class_idx as u64] {
        h = mix64(h ^ p);
    }
    h
}

fn role_tag(role: Role) -> u64 {
    match role {
        Role::Train => TAG_TRAIN,
        Role::Test => TAG_TEST,
    }
}

/// Builds a balanced labeled dataset: `per_class` symbols per pattern class,
/// impaired and featurized per the protocol.
pub fn build_dataset(
    pattern: &SignalPattern,
    protocol: &TrainingProtocol,
    role: Role,
) -> Result<Vec<FeatureVector>> {
    let per_class = match role {
        Role::Train => protocol.per_class_train,
        Role::Test => protocol.per_class_test,
    };
    build_rows(
        pattern,
        protocol,
        per_class,
        &protocol.esn0_mix_db,
        role_tag(role),
    )
}

fn build_rows(
    pattern: &SignalPattern,
    protocol: &TrainingProtocol,
    per_class: usize,
    mix: &[f64],
    role_tag: u64,
) -> Result<Vec<FeatureVector>> {
    protocol.validate()?;
    if mix.is_empty() {
        return Err(Error::invalid("Es/N0 mix must be nonempty"));
    }
    let plan = if protocol.feature_mode.is_wavelet() {
        let grid = build_scale_grid(protocol.octaves, protocol.voices_per_octave, &protocol.morse)?;
        Some(CwtPlan::new(&grid, &protocol.morse, protocol.window)?)
    } else {
        None
    };
    let configs: Vec<SefdmConfig> = pattern
        .alphas()
        .iter()
        .map(|&a| SefdmConfig::new(protocol.n_subcarriers, a, protocol.oversampling))
        .collect::<Result<_>>()?;

    let total = pattern.n_classes() * per_class;
    exec::map_indexed(total, |idx| {
        let class_idx = idx / per_class;
        let sym = (idx % per_class) as u64;
        synthesize_row(
            protocol,
            &configs[class_idx],
            plan.as_ref(),
            mix,
            role_tag,
            class_idx,
            sym,
        )
    })
    .into_iter()
    .collect()
}

fn synthesize_row(
    protocol: &TrainingProtocol,
    cfg: &SefdmConfig,
    plan: Option<&CwtPlan>,
    mix: &[f64],
    role_tag: u64,
    class_idx: usize,
    sym: u64,
) -> Result<FeatureVector> {
    let seed_for = |stream: u64| stream_base(protocol.seed, role_tag, stream, class_idx) ^ sym;

    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(STREAM_BITS));
    let bits: Vec<u8> = (0..2 * cfg.n_subcarriers())
        .map(|_| rng.random_range(0..=1u8))
        .collect();
    let loading = map_qpsk(&bits)?;
    let mut frame = generate_symbol_ifft(cfg, &loading)?;

    if let Some(profile) = &protocol.multipath {
        let tap_seed = if profile.regenerate_per_symbol() {
            seed_for(STREAM_TAPS)
        } else {
            profile.seed()
        };
        frame = apply_multipath_seeded(&frame, profile, tap_seed)?;
    }
    if !protocol.hardware.is_off() {
        frame = apply_hardware(&frame, &protocol.hardware, seed_for(STREAM_PHASE));
    }

    let esn0_db = if mix.len() == 1 {
        mix[0]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(STREAM_ESN0));
        mix[rng.random_range(0..mix.len())]
    };
    frame = apply_awgn(&frame, EsN0::new(esn0_db)?, seed_for(STREAM_NOISE));
    frame = normalize_power(&frame)?;
    frame = random_truncate(&frame, protocol.window, seed_for(STREAM_TRUNC))?;

    let kinds = protocol.feature_mode.kinds();
    let mut fv = match (protocol.feature_mode, plan) {
        (FeatureMode::TStat, _) => time_domain_features(&frame, kinds)?,
        (FeatureMode::FStat, _) => frequency_domain_features(&frame, kinds)?,
        (_, Some(plan)) => plan.feature_vector(&frame, kinds)?,
        (_, None) => unreachable!("wavelet modes always carry a plan"),
    };
    fv.label = class_idx;
    fv.meta.alpha = cfg.alpha();
    fv.meta.esn0_db = esn0_db;
    Ok(fv)
}

/// An ECOC model plus the pattern and protocol that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub ecoc: EcocModel,
    pub pattern: SignalPattern,
    pub protocol: TrainingProtocol,
}

impl TrainedModel {
    /// Alpha value of a predicted class label.
    pub fn alpha_of(&self, label: usize) -> f64 {
        self.pattern.alphas()[label]
    }
}

/// Builds the training dataset and fits the ECOC classifier.
pub fn run_protocol(pattern: &SignalPattern, protocol: &TrainingProtocol) -> Result<TrainedModel> {
    let rows = build_dataset(pattern, protocol, Role::Train)?;
    let ecoc = svm::train_ecoc(&rows, &protocol.svm)?;
    Ok(TrainedModel {
        ecoc,
        pattern: pattern.clone(),
        protocol: protocol.clone(),
    })
}

/// Accuracy and confusion at one test Es/N0.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub esn0_db: f64,
    pub accuracy: f64,
    pub n_test: usize,
    pub confusion: Vec<Vec<usize>>,
}

/// Result of an Es/N0 sweep, with full provenance for report emission.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub pattern: SignalPattern,
    pub protocol: TrainingProtocol,
    pub per_class_test: usize,
    pub points: Vec<SweepPoint>,
}

/// Tests the model on freshly generated sets, one per requested Es/N0.
pub fn sweep(
    model: &TrainedModel,
    pattern: &SignalPattern,
    test_esn0_db: &[f64],
    per_class_test: usize,
) -> Result<SweepResult> {
    if test_esn0_db.is_empty() {
        return Err(Error::invalid("sweep needs at least one test Es/N0"));
    }
    if pattern.n_classes() != model.ecoc.n_classes() {
        return Err(Error::Incompatible(format!(
            "model trained on {} classes, pattern has {}",
            model.ecoc.n_classes(),
            pattern.n_classes()
        )));
    }
    let mut points = Vec::with_capacity(test_esn0_db.len());
    for &db in test_esn0_db {
        if !db.is_finite() {
            return Err(Error::invalid(format!("test Es/N0 must be finite, got {db}")));
        }
        let rows = build_rows(
            pattern,
            &model.protocol,
            per_class_test,
            &[db],
            TAG_TEST ^ db.to_bits(),
        )?;
        // Train/test feature join: lengths must agree with the model.
        if rows[0].len() != model.ecoc.feature_dim() {
            return Err(Error::Incompatible(format!(
                "feature length {} does not match model dimension {}",
                rows[0].len(),
                model.ecoc.feature_dim()
            )));
        }
        let eval = svm::evaluate(&model.ecoc, &rows)?;
        points.push(SweepPoint {
            esn0_db: db,
            accuracy: eval.accuracy,
            n_test: rows.len(),
            confusion: eval.confusion,
        });
    }
    Ok(SweepResult {
        pattern: pattern.clone(),
        protocol: model.protocol.clone(),
        per_class_test,
        points,
    })
}

/// Formats a dB value for filenames and CSV cells: integral values drop the
/// decimal point.
pub fn fmt_db(db: f64) -> String {
    if db == db.trunc() {
        format!("{}", db as i64)
    } else {
        format!("{db}")
    }
}

fn fmt_f64_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `accuracy_sweep.csv`, one `confusion_<esn0>.csv` per point, and
/// `protocol.meta` into `out_dir`. Returns the paths written. Re-running
/// with identical inputs produces byte-identical files.
pub fn emit_reports(result: &SweepResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let mut csv = String::from("test_esn0_db,accuracy,n_test\n");
    for p in &result.points {
        let _ = writeln!(csv, "{},{},{}", fmt_db(p.esn0_db), p.accuracy, p.n_test);
    }
    let path = out_dir.join("accuracy_sweep.csv");
    write_file(&path, &csv)?;
    written.push(path);

    for p in &result.points {
        let mut csv = String::new();
        let _ = writeln!(csv, "{}", fmt_f64_list(result.pattern.alphas()));
        for row in &p.confusion {
            let line = row
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(csv, "{line}");
        }
        let path = out_dir.join(format!("confusion_{}.csv", fmt_db(p.esn0_db)));
        write_file(&path, &csv)?;
        written.push(path);
    }

    let path = out_dir.join("protocol.meta");
    write_file(&path, &protocol_meta_text(result))?;
    written.push(path);
    Ok(written)
}

fn protocol_meta_text(result: &SweepResult) -> String {
    let p = &result.protocol;
    let mut s = String::new();
    let _ = writeln!(s, "pattern = {}", result.pattern.name());
    let _ = writeln!(s, "alphas = {}", fmt_f64_list(result.pattern.alphas()));
    let _ = writeln!(s, "feature_mode = {}", p.feature_mode.name());
    let _ = writeln!(s, "n_subcarriers = {}", p.n_subcarriers);
    let _ = writeln!(s, "oversampling = {}", p.oversampling);
    let _ = writeln!(s, "sample_rate_hz = {}", p.sample_rate_hz);
    let _ = writeln!(s, "window = {}", p.window);
    let _ = writeln!(s, "octaves = {}", p.octaves);
    let _ = writeln!(s, "voices_per_octave = {}", p.voices_per_octave);
    let _ = writeln!(s, "morse_gamma = {}", p.morse.gamma());
    let _ = writeln!(s, "morse_beta = {}", p.morse.beta());
    let _ = writeln!(s, "train_esn0_mix_db = {}", fmt_f64_list(&p.esn0_mix_db));
    let _ = writeln!(s, "per_class_train = {}", p.per_class_train);
    let _ = writeln!(s, "per_class_test = {}", result.per_class_test);
    let _ = writeln!(s, "seed = {}", p.seed);
    match &p.multipath {
        None => {
            let _ = writeln!(s, "multipath = none");
        }
        Some(profile) => {
            let delays = profile
                .tap_delays()
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(
                s,
                "multipath = delays={} powers_db={} regenerate_per_symbol={} seed={}",
                delays,
                fmt_f64_list(profile.tap_powers_db()),
                profile.regenerate_per_symbol(),
                profile.seed()
            );
        }
    }
    let _ = writeln!(s, "random_phase = {}", p.hardware.random_phase);
    let _ = writeln!(s, "cfo_ppm = {}", p.hardware.cfo_ppm);
    let _ = writeln!(s, "svm_c = {}", p.svm.c);
    let _ = writeln!(s, "svm_degree = {}", p.svm.degree);
    match p.svm.gamma {
        None => {
            let _ = writeln!(s, "svm_gamma = auto");
        }
        Some(g) => {
            let _ = writeln!(s, "svm_gamma = {g}");
        }
    }
    let _ = writeln!(s, "svm_coef0 = {}", p.svm.coef0);
    let _ = writeln!(s, "svm_tol = {}", p.svm.tol);
    let decoding = match p.svm.decoding {
        svm::Decoding::LossWeighted => "loss-weighted",
        svm::Decoding::Hamming => "hamming",
    };
    let _ = writeln!(s, "decoding = {decoding}");
    let _ = writeln!(
        s,
        "test_esn0_db = {}",
        fmt_f64_list(&result.points.iter().map(|p| p.esn0_db).collect::<Vec<_>>())
    );
    s
}
