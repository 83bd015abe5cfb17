//! Multiclass classification: one-vs-one ECOC over binary kernel SVMs.
//!
//! Features are standardized, one binary SVM is trained per class pair with
//! a polynomial kernel (degree two by default), and predictions decode the
//! binary decisions against the coding matrix with a hinge-loss-weighted
//! rule (Hamming decoding available as an option).

mod smo;

use crate::error::{Error, Result};
use crate::exec;
use crate::stats::FeatureVector;

/// Kernel family. Only polynomial kernels are defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Polynomial,
}

/// `K(x, y) = (gamma·⟨x,y⟩ + coef0)^degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub degree: u32,
    pub gamma: f64,
    pub coef0: f64,
}

impl KernelSpec {
    pub fn polynomial(degree: u32, gamma: f64, coef0: f64) -> Result<Self> {
        if degree < 1 {
            return Err(Error::invalid("kernel degree must be at least 1"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
        }
        Ok(KernelSpec {
            kind: KernelKind::Polynomial,
            degree,
            gamma,
            coef0,
        })
    }
}

/// Kernel evaluation without length checking; callers validate once.
pub(crate) fn kernel_value(x: &[f64], y: &[f64], spec: &KernelSpec) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (spec.gamma * dot + spec.coef0).powi(spec.degree as i32)
}

/// Evaluates the kernel on a pair of equal-length vectors.
pub fn kernel(x: &[f64], y: &[f64], spec: &KernelSpec) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "kernel arguments differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(kernel_value(x, y, spec))
}

/// Per-dimension affine map to zero mean, unit variance. Dimensions with
/// (near-)zero variance keep std 1 so they map to constant zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Standardizer {
    /// Learns means and population stds from the training features.
    pub fn fit(features: &[FeatureVector]) -> Result<Self> {
        if features.len() < 2 {
            return Err(Error::invalid("standardizer needs at least 2 training rows"));
        }
        let dim = features[0].len();
        if features.iter().any(|f| f.len() != dim) {
            return Err(Error::invalid("feature rows differ in length"));
        }
        let n = features.len() as f64;
        let mut means = vec![0.0; dim];
        for f in features {
            for (m, v) in means.iter_mut().zip(&f.values) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut vars = vec![0.0; dim];
        for f in features {
            for ((var, v), m) in vars.iter_mut().zip(&f.values).zip(&means) {
                *var += (v - m) * (v - m);
            }
        }
        let stds = vars
            .iter()
            .map(|&v| {
                let s = (v / n).sqrt();
                if s < 1e-12 {
                    1.0
                } else {
                    s
                }
            })
            .collect();
        Ok(Standardizer { means, stds })
    }

    /// Rebuilds a standardizer from stored parameters.
    pub fn from_parts(means: Vec<f64>, stds: Vec<f64>) -> Result<Self> {
        if means.len() != stds.len() {
            return Err(Error::Format("standardizer mean/std length mismatch".into()));
        }
        if stds.iter().any(|&s| !(s >= 1e-12) || !s.is_finite()) {
            return Err(Error::Format("standardizer stds must be >= 1e-12".into()));
        }
        Ok(Standardizer { means, stds })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.means.len() {
            return Err(Error::invalid(format!(
                "feature length {} does not match standardizer dimension {}",
                x.len(),
                self.means.len()
            )));
        }
        Ok(x.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }
}

/// A trained binary SVM in support-vector form.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm {
    support_vectors: Vec<Vec<f64>>,
    dual_coefs: Vec<f64>, // α_i·y_i per support vector
    bias: f64,
    kernel: KernelSpec,
    c: f64,
    max_kkt_violation: f64,
}

impl BinarySvm {
    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    pub fn dual_coefs(&self) -> &[f64] {
        &self.dual_coefs
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Largest KKT residual over the training set when training finished.
    pub fn max_kkt_violation(&self) -> f64 {
        self.max_kkt_violation
    }

    pub fn from_parts(
        support_vectors: Vec<Vec<f64>>,
        dual_coefs: Vec<f64>,
        bias: f64,
        kernel: KernelSpec,
        c: f64,
        max_kkt_violation: f64,
    ) -> Result<Self> {
        if support_vectors.len() != dual_coefs.len() {
            return Err(Error::Format(
                "support vector and coefficient counts differ".into(),
            ));
        }
        Ok(BinarySvm {
            support_vectors,
            dual_coefs,
            bias,
            kernel,
            c,
            max_kkt_violation,
        })
    }

    /// Decision value `f(x) = Σ α_i·y_i·K(s_i, x) + b`.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if let Some(sv) = self.support_vectors.first() {
            if sv.len() != x.len() {
                return Err(Error::invalid(format!(
                    "feature length {} does not match trained dimension {}",
                    x.len(),
                    sv.len()
                )));
            }
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, coef)| coef * kernel_value(sv, x, &self.kernel))
            .sum::<f64>()
            + self.bias)
    }
}

/// Trains one binary SVM with SMO. Labels must be ±1 and both classes
/// present.
pub fn train_binary_svm(
    x: &[Vec<f64>],
    y: &[f64],
    c: f64,
    spec: &KernelSpec,
    tol: f64,
) -> Result<BinarySvm> {
    train_binary_svm_monitored(x, y, c, spec, tol, None)
}

/// [`train_binary_svm`] with a per-iteration dual-objective monitor hook.
pub fn train_binary_svm_monitored(
    x: &[Vec<f64>],
    y: &[f64],
    c: f64,
    spec: &KernelSpec,
    tol: f64,
    monitor: Option<&mut dyn FnMut(f64)>,
) -> Result<BinarySvm> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::invalid(
            "training data and labels must be nonempty and of equal length",
        ));
    }
    let dim = x[0].len();
    if x.iter().any(|r| r.len() != dim) {
        return Err(Error::invalid("training rows differ in length"));
    }
    if y.iter().any(|&l| l != 1.0 && l != -1.0) {
        return Err(Error::invalid("labels must be +1 or -1"));
    }
    if !y.iter().any(|&l| l == 1.0) || !y.iter().any(|&l| l == -1.0) {
        return Err(Error::invalid("both classes must be present"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("box constraint must be positive, got {c}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }

    let sol = smo::solve(x, y, c, spec, tol, monitor);
    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for (t, &a) in sol.alphas.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(x[t].clone());
            dual_coefs.push(a * y[t]);
        }
    }
    Ok(BinarySvm {
        support_vectors,
        dual_coefs,
        bias: sol.bias,
        kernel: *spec,
        c,
        max_kkt_violation: sol.max_kkt_violation,
    })
}

/// K × L coding matrix with entries in {−1, 0, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingMatrix {
    n_classes: usize,
    entries: Vec<i8>, // row-major
}

/// One-vs-one coding: `L = K(K−1)/2` columns in lexicographic pair order,
/// `+1` at the first class of the pair, `−1` at the second.
pub fn build_ovo_coding(n_classes: usize) -> Result<CodingMatrix> {
    if n_classes < 2 {
        return Err(Error::invalid("coding needs at least 2 classes"));
    }
    let n_learners = n_classes * (n_classes - 1) / 2;
    let mut entries = vec![0i8; n_classes * n_learners];
    let mut col = 0;
    for i in 0..n_classes {
        for j in i + 1..n_classes {
            entries[i * n_learners + col] = 1;
            entries[j * n_learners + col] = -1;
            col += 1;
        }
    }
    Ok(CodingMatrix {
        n_classes,
        entries,
    })
}

impl CodingMatrix {
    pub fn from_parts(n_classes: usize, n_learners: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != n_classes * n_learners {
            return Err(Error::Format("coding matrix size mismatch".into()));
        }
        if entries.iter().any(|&e| e < -1 || e > 1) {
            return Err(Error::Format("coding entries must be in {-1, 0, 1}".into()));
        }
        let m = CodingMatrix {
            n_classes,
            entries,
        };
        for a in 0..n_learners {
            for b in a + 1..n_learners {
                if (0..n_classes).all(|k| m.get(k, a) == m.get(k, b)) {
                    return Err(Error::Format(format!("duplicate coding columns {a} and {b}")));
                }
            }
        }
        Ok(m)
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_learners(&self) -> usize {
        if self.n_classes == 0 {
            0
        } else {
            self.entries.len() / self.n_classes
        }
    }

    pub fn get(&self, class_idx: usize, learner_idx: usize) -> i8 {
        self.entries[class_idx * self.n_learners() + learner_idx]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// The (+1, −1) class-index pair of a column, when it has exactly one of
    /// each.
    pub fn column_pair(&self, learner_idx: usize) -> Option<(usize, usize)> {
        let mut pos = None;
        let mut neg = None;
        for k in 0..self.n_classes {
            match self.get(k, learner_idx) {
                1 => {
                    if pos.replace(k).is_some() {
                        return None;
                    }
                }
                -1 => {
                    if neg.replace(k).is_some() {
                        return None;
                    }
                }
                _ => {}
            }
        }
        pos.zip(neg)
    }
}

/// How binary decisions are aggregated into a class decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoding {
    /// Average hinge loss `max(0, 1−z)/2` of the coded decisions.
    LossWeighted,
    /// Average disagreement `(1−sign(z))/2` of the coded decisions.
    Hamming,
}

/// Training hyperparameters for the ECOC model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcocParams {
    pub c: f64,
    pub degree: u32,
    /// Kernel scale; `None` resolves to `1/feature_dimension`.
    pub gamma: Option<f64>,
    pub coef0: f64,
    pub tol: f64,
    pub decoding: Decoding,
}

impl Default for EcocParams {
    fn default() -> Self {
        EcocParams {
            c: 1.0,
            degree: 2,
            gamma: None,
            coef0: 1.0,
            tol: 1e-3,
            decoding: Decoding::LossWeighted,
        }
    }
}

/// Trained multiclass model: standardizer, coding matrix, binary learners.
#[derive(Debug, Clone, PartialEq)]
pub struct EcocModel {
    standardizer: Standardizer,
    coding: CodingMatrix,
    learners: Vec<BinarySvm>,
    class_labels: Vec<usize>,
    decoding: Decoding,
}

impl EcocModel {
    pub fn from_parts(
        standardizer: Standardizer,
        coding: CodingMatrix,
        learners: Vec<BinarySvm>,
        class_labels: Vec<usize>,
        decoding: Decoding,
    ) -> Result<Self> {
        if coding.n_learners() != learners.len() {
            return Err(Error::Format(format!(
                "coding matrix has {} columns but {} learners were provided",
                coding.n_learners(),
                learners.len()
            )));
        }
        if coding.n_classes() != class_labels.len() {
            return Err(Error::Format("class label count mismatch".into()));
        }
        Ok(EcocModel {
            standardizer,
            coding,
            learners,
            class_labels,
            decoding,
        })
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn coding(&self) -> &CodingMatrix {
        &self.coding
    }

    pub fn learners(&self) -> &[BinarySvm] {
        &self.learners
    }

    pub fn class_labels(&self) -> &[usize] {
        &self.class_labels
    }

    pub fn decoding(&self) -> Decoding {
        self.decoding
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.standardizer.dim()
    }
}

/// Trains the full ECOC model: standardizer on all rows, then one binary
/// SVM per coding column on the rows of its two classes.
pub fn train_ecoc(features: &[FeatureVector], params: &EcocParams) -> Result<EcocModel> {
    if features.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    let dim = features[0].len();
    if dim == 0 || features.iter().any(|f| f.len() != dim) {
        return Err(Error::invalid("feature rows must be nonempty and equal-length"));
    }
    let mut class_labels: Vec<usize> = features.iter().map(|f| f.label).collect();
    class_labels.sort_unstable();
    class_labels.dedup();
    if class_labels.len() < 2 {
        return Err(Error::invalid("training set must contain at least 2 classes"));
    }
    for &label in &class_labels {
        let count = features.iter().filter(|f| f.label == label).count();
        if count < 2 {
            return Err(Error::invalid(format!(
                "class {label} has {count} examples; at least 2 are required"
            )));
        }
    }

    let standardizer = Standardizer::fit(features)?;
    let standardized: Vec<Vec<f64>> = features
        .iter()
        .map(|f| standardizer.apply(&f.values))
        .collect::<Result<_>>()?;

    let coding = build_ovo_coding(class_labels.len())?;
    let spec = KernelSpec::polynomial(
        params.degree,
        params.gamma.unwrap_or(1.0 / dim as f64),
        params.coef0,
    )?;

    let learners = exec::map_indexed(coding.n_learners(), |l| {
        let (pos, neg) = coding
            .column_pair(l)
            .expect("one-vs-one columns always have a class pair");
        let (pos_label, neg_label) = (class_labels[pos], class_labels[neg]);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (row, f) in standardized.iter().zip(features) {
            if f.label == pos_label {
                x.push(row.clone());
                y.push(1.0);
            } else if f.label == neg_label {
                x.push(row.clone());
                y.push(-1.0);
            }
        }
        train_binary_svm(&x, &y, params.c, &spec, params.tol)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    EcocModel::from_parts(standardizer, coding, learners, class_labels, params.decoding)
}

/// Decodes binary decision values into `(class index, per-class losses)`.
pub fn decode_losses(
    coding: &CodingMatrix,
    decisions: &[f64],
    decoding: Decoding,
) -> (usize, Vec<f64>) {
    let losses: Vec<f64> = (0..coding.n_classes())
        .map(|k| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (l, &f) in decisions.iter().enumerate() {
                let m = coding.get(k, l) as f64;
                if m != 0.0 {
                    let z = m * f;
                    num += match decoding {
                        Decoding::LossWeighted => (1.0 - z).max(0.0) / 2.0,
                        Decoding::Hamming => (1.0 - z.signum()) / 2.0,
                    };
                    den += m.abs();
                }
            }
            num / den
        })
        .collect();
    let mut best = 0;
    for (k, &loss) in losses.iter().enumerate() {
        if loss < losses[best] {
            best = k;
        }
    }
    (best, losses)
}

/// Predicts the class label of one feature vector; also returns the
/// per-class decoding losses. Ties break toward the lowest class index.
pub fn predict(model: &EcocModel, x: &[f64]) -> Result<(usize, Vec<f64>)> {
    let z = model.standardizer.apply(x)?;
    let decisions = model
        .learners
        .iter()
        .map(|svm| svm.decision(&z))
        .collect::<Result<Vec<f64>>>()?;
    let (idx, losses) = decode_losses(&model.coding, &decisions, model.decoding);
    Ok((model.class_labels[idx], losses))
}

/// Accuracy and confusion counts over a labeled test set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    /// `confusion[i][j]`: count of rows with true class index `i` predicted
    /// as class index `j`, indices into `class_labels`.
    pub confusion: Vec<Vec<usize>>,
    pub class_labels: Vec<usize>,
}

/// Runs the model over a labeled set and tallies the confusion matrix.
pub fn evaluate(model: &EcocModel, features: &[FeatureVector]) -> Result<Evaluation> {
    if features.is_empty() {
        return Err(Error::invalid("test set is empty"));
    }
    let k = model.n_classes();
    let class_index = |label: usize| -> Result<usize> {
        model
            .class_labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::invalid(format!("test label {label} unknown to the model")))
    };
    let predictions = exec::map_indexed(features.len(), |i| {
        predict(model, &features[i].values).map(|(label, _)| label)
    })
    .into_iter()
    .collect::<Result<Vec<usize>>>()?;

    let mut confusion = vec![vec![0usize; k]; k];
    let mut correct = 0usize;
    for (f, &pred) in features.iter().zip(&predictions) {
        let ti = class_index(f.label)?;
        let pi = class_index(pred)?;
        confusion[ti][pi] += 1;
        if ti == pi {
            correct += 1;
        }
    }
    Ok(Evaluation {
        accuracy: correct as f64 / features.len() as f64,
        confusion,
        class_labels: model.class_labels.clone(),
    })
}
