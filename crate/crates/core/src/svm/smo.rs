//! Sequential minimal optimization for the C-SVC dual problem.
//!
//! Solves `min ½αᵀQα − eᵀα` subject to `0 ≤ α ≤ C`, `yᵀα = 0`, with
//! `Q_ij = y_i y_j K(x_i, x_j)`. Each iteration picks the maximal violating
//! pair (the steepest feasible ascent/descent pair), optimizes the two
//! coordinates analytically, and updates the gradient. Termination is by
//! duality-gap style criterion: `m(α) − M(α) ≤ tol`.

use super::{kernel_value, KernelSpec};
use std::collections::VecDeque;

/// Bound snapping tolerance, relative to C.
const SNAP: f64 = 1e-12;
/// Floor for the quadratic coefficient of a working pair.
const TAU: f64 = 1e-12;
/// Kernel row cache budget in bytes.
const CACHE_BUDGET: usize = 128 << 20;

pub(crate) struct SmoSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    /// Largest KKT residual over the training set at termination.
    pub max_kkt_violation: f64,
    pub iterations: usize,
}

/// Kernel rows computed on demand with FIFO eviction under a byte budget.
struct KernelCache<'a> {
    x: &'a [Vec<f64>],
    spec: &'a KernelSpec,
    rows: Vec<Option<Box<[f64]>>>,
    resident: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    fn new(x: &'a [Vec<f64>], spec: &'a KernelSpec) -> Self {
        let n = x.len();
        let capacity = (CACHE_BUDGET / (8 * n.max(1))).clamp(2, n.max(2));
        KernelCache {
            x,
            spec,
            rows: vec![None; n],
            resident: VecDeque::new(),
            capacity,
        }
    }

    fn ensure(&mut self, i: usize, protect: usize) {
        if self.rows[i].is_some() {
            return;
        }
        if self.resident.len() >= self.capacity {
            if let Some(pos) = self.resident.iter().position(|&r| r != protect) {
                let evict = self.resident.remove(pos).unwrap();
                self.rows[evict] = None;
            }
        }
        let xi = &self.x[i];
        let row: Box<[f64]> = self
            .x
            .iter()
            .map(|xt| kernel_value(xi, xt, self.spec))
            .collect();
        self.rows[i] = Some(row);
        self.resident.push_back(i);
    }

    fn pair(&mut self, i: usize, j: usize) -> (&[f64], &[f64]) {
        self.ensure(i, j);
        self.ensure(j, i);
        (
            self.rows[i].as_deref().unwrap(),
            self.rows[j].as_deref().unwrap(),
        )
    }
}

/// Runs the solver. `monitor`, when given, receives the dual objective once
/// per iteration.
pub(crate) fn solve(
    x: &[Vec<f64>],
    y: &[f64],
    c: f64,
    spec: &KernelSpec,
    tol: f64,
    mut monitor: Option<&mut dyn FnMut(f64)>,
) -> SmoSolution {
    let n = x.len();
    let max_iter = 100_000.max(100 * n);
    let mut alphas = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n];
    let mut cache = KernelCache::new(x, spec);
    let diag: Vec<f64> = x.iter().map(|xi| kernel_value(xi, xi, spec)).collect();

    let mut iterations = 0;
    let (mut m_final, mut big_m_final) = (0.0, 0.0);
    while iterations < max_iter {
        // Maximal violating pair: i maximizes v_t = −y_t·G_t over the set
        // that can move up, j minimizes it over the set that can move down.
        let mut i = usize::MAX;
        let mut m = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut big_m = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let up = (y[t] > 0.0 && alphas[t] < c) || (y[t] < 0.0 && alphas[t] > 0.0);
            let down = (y[t] < 0.0 && alphas[t] < c) || (y[t] > 0.0 && alphas[t] > 0.0);
            if up && v > m {
                m = v;
                i = t;
            }
            if down && v < big_m {
                big_m = v;
                j = t;
            }
        }
        m_final = m;
        big_m_final = big_m;
        if i == usize::MAX || j == usize::MAX || m - big_m <= tol {
            break;
        }

        let (row_i, row_j) = cache.pair(i, j);
        let quad = (diag[i] + diag[j] - 2.0 * row_i[j]).max(TAU);
        // Feasible direction parameterized by δ = y_i·Δα_i = −y_j·Δα_j.
        let mut delta = (m - big_m) / quad;
        let bound_i = if y[i] > 0.0 { c - alphas[i] } else { alphas[i] };
        let bound_j = if y[j] > 0.0 { alphas[j] } else { c - alphas[j] };
        delta = delta.min(bound_i).min(bound_j);

        let da_i = y[i] * delta;
        let da_j = -y[j] * delta;
        alphas[i] = snap(alphas[i] + da_i, c);
        alphas[j] = snap(alphas[j] + da_j, c);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * row_i[t] * da_i + y[j] * row_j[t] * da_j);
        }

        iterations += 1;
        if let Some(mon) = monitor.as_deref_mut() {
            let obj: f64 = alphas
                .iter()
                .zip(&grad)
                .map(|(&a, &g)| 0.5 * a * (g - 1.0))
                .sum();
            mon(obj);
        }
    }

    // Bias from the free support vectors, midpoint of the violation bracket
    // when none are free.
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for t in 0..n {
        if alphas[t] > 0.0 && alphas[t] < c {
            free_sum += -y[t] * grad[t];
            free_count += 1;
        }
    }
    let bias = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        (m_final + big_m_final) / 2.0
    };

    // KKT residual per point: margin shortfall/overshoot against y·f(x) = 1.
    let mut max_kkt_violation = 0.0f64;
    for t in 0..n {
        let yf = grad[t] + 1.0 + y[t] * bias;
        let viol = if alphas[t] <= 0.0 {
            1.0 - yf
        } else if alphas[t] >= c {
            yf - 1.0
        } else {
            (yf - 1.0).abs()
        };
        max_kkt_violation = max_kkt_violation.max(viol);
    }

    SmoSolution {
        alphas,
        bias,
        max_kkt_violation,
        iterations,
    }
}

fn snap(a: f64, c: f64) -> f64 {
    let eps = SNAP * c.max(1.0);
    if a < eps {
        0.0
    } else if a > c - eps {
        c
    } else {
        a
    }
}
