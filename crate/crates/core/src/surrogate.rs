//! Gaussian-process regression surrogates over the two design variables.
//!
//! Inputs are min-max scaled to the unit square using the training data's
//! bounding box; targets are standardized. Hyperparameters (signal variance,
//! two length scales, noise variance) are fitted by maximizing the log
//! marginal likelihood from eight deterministic quasi-random starts.

use std::fs;
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::DesignPoint;

const FORMAT: &str = "satarch-gp";
const VERSION: u32 = 1;
const STARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Matern32,
    Matern52,
    SquaredExponential,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Matern32, Kernel::Matern52, Kernel::SquaredExponential];

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Matern32 => "matern32",
            Kernel::Matern52 => "matern52",
            Kernel::SquaredExponential => "se",
        }
    }

    /// Smaller is rougher; used to break score ties.
    fn roughness_rank(&self) -> u8 {
        match self {
            Kernel::Matern32 => 0,
            Kernel::Matern52 => 1,
            Kernel::SquaredExponential => 2,
        }
    }

    /// Unit-variance correlation at scaled distance `r`.
    pub fn corr(&self, r: f64) -> f64 {
        match self {
            Kernel::SquaredExponential => (-0.5 * r * r).exp(),
            Kernel::Matern32 => {
                let a = 3f64.sqrt() * r;
                (1.0 + a) * (-a).exp()
            }
            Kernel::Matern52 => {
                let a = 5f64.sqrt() * r;
                (1.0 + a + a * a / 3.0) * (-a).exp()
            }
        }
    }

    /// `-(1/r)·dcorr/dr`, so that `∂corr/∂ln ℓ_d = this · (Δ_d/ℓ_d)²`.
    fn radial_slope(&self, r: f64) -> f64 {
        match self {
            Kernel::SquaredExponential => (-0.5 * r * r).exp(),
            Kernel::Matern32 => 3.0 * (-(3f64.sqrt()) * r).exp(),
            Kernel::Matern52 => {
                let a = 5f64.sqrt() * r;
                5.0 / 3.0 * (1.0 + a) * (-a).exp()
            }
        }
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::ModelFormat(format!("unknown kernel `{s}`")))
    }
}

/// Natural-scale hyperparameters, in standardized target units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub signal_var: f64,
    pub length_scales: [f64; 2],
    pub noise_var: f64,
}

impl Hyperparams {
    /// From optimizer coordinates `[ln σf², ln ℓ₁, ln ℓ₂, ln(σn²/σf²)]`.
    fn from_theta(t: &[f64; 4]) -> Self {
        let sf2 = t[0].exp();
        Hyperparams {
            signal_var: sf2,
            length_scales: [t[1].exp(), t[2].exp()],
            noise_var: sf2 * t[3].exp(),
        }
    }
}

// The last lower bound is ln(1e-8): noise never drops below 1e-8 of the signal variance.
const THETA_LO: [f64; 4] = [-13.8, -6.9, -6.9, -18.420_680_743_952_367];
const THETA_HI: [f64; 4] = [13.8, 6.9, 6.9, 2.3];

fn project(t: &mut [f64; 4]) {
    for i in 0..4 {
        t[i] = t[i].clamp(THETA_LO[i], THETA_HI[i]);
    }
}

/// Input/target pairs for one surrogate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    pub inputs: Vec<DesignPoint>,
    pub targets: Vec<f64>,
}

impl TrainingSet {
    pub fn new(inputs: Vec<DesignPoint>, targets: Vec<f64>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::DegenerateData(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        if let Some(i) = targets.iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateData(format!("target {i} is not finite")));
        }
        Ok(TrainingSet { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

fn coords(x: &DesignPoint) -> [f64; 2] {
    [x.t_life_yr, x.m_p_des]
}

/// A fitted GP.
#[derive(Debug, Clone)]
pub struct SurrogateModel {
    pub kernel: Kernel,
    pub hyper: Hyperparams,
    pub log_marginal_likelihood: f64,
    lo: [f64; 2],
    span: [f64; 2],
    y_mean: f64,
    y_std: f64,
    jitter: f64,
    train: TrainingSet,
    x_unit: Vec<[f64; 2]>,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    kernel: Kernel,
    hyper: Hyperparams,
    log_marginal_likelihood: f64,
    lo: [f64; 2],
    span: [f64; 2],
    y_mean: f64,
    y_std: f64,
    jitter: f64,
    train: TrainingSet,
}

fn scaled_diff(a: &[f64; 2], b: &[f64; 2], ls: &[f64; 2]) -> [f64; 2] {
    [(a[0] - b[0]) / ls[0], (a[1] - b[1]) / ls[1]]
}

fn kernel_matrix(kernel: Kernel, x: &[[f64; 2]], h: &Hyperparams) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| {
        let d = scaled_diff(&x[i], &x[j], &h.length_scales);
        h.signal_var * kernel.corr((d[0] * d[0] + d[1] * d[1]).sqrt())
    })
}

/// Cholesky of `K + (σn² + jitter)·I`, escalating the jitter until it succeeds.
fn factor(kernel: Kernel, x: &[[f64; 2]], h: &Hyperparams, start_jitter: f64) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let base = kernel_matrix(kernel, x, h);
    let mut jitter = start_jitter;
    loop {
        let mut k = base.clone();
        for i in 0..x.len() {
            k[(i, i)] += h.noise_var + jitter;
        }
        if let Some(c) = k.cholesky() {
            return Ok((c, jitter));
        }
        jitter = if jitter == 0.0 {
            1e-10 * h.signal_var
        } else {
            jitter * 10.0
        };
        if jitter > 1e-2 * h.signal_var {
            return Err(Error::NotPositiveDefinite);
        }
    }
}

/// Log marginal likelihood and its gradient in optimizer coordinates.
fn lml_and_grad(kernel: Kernel, x: &[[f64; 2]], y: &DVector<f64>, theta: &[f64; 4]) -> Result<(f64, [f64; 4])> {
    let h = Hyperparams::from_theta(theta);
    let n = x.len();
    let (chol, _) = factor(kernel, x, &h, 0.0)?;
    let alpha = chol.solve(y);
    let log_det: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
    let lml = -0.5 * y.dot(&alpha) - 0.5 * log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
    // W = ααᵀ - K⁻¹; ∂lml/∂θ = ½ tr(W ∂K/∂θ).
    let w = &alpha * alpha.transpose() - chol.inverse();
    let mut g_sf = 0.0;
    let mut g_l = [0.0; 2];
    let mut g_noise = 0.0;
    for i in 0..n {
        g_noise += w[(i, i)];
        for j in 0..n {
            let d = scaled_diff(&x[i], &x[j], &h.length_scales);
            let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let wij = w[(i, j)];
            g_sf += wij * h.signal_var * kernel.corr(r);
            if i != j {
                let s = h.signal_var * kernel.radial_slope(r);
                g_l[0] += wij * s * d[0] * d[0];
                g_l[1] += wij * s * d[1] * d[1];
            }
        }
    }
    let g_noise = 0.5 * g_noise * h.noise_var;
    Ok((lml, [0.5 * g_sf + g_noise, 0.5 * g_l[0], 0.5 * g_l[1], g_noise]))
}

fn halton(i: usize, base: usize) -> f64 {
    let (mut f, mut r, mut k) = (1.0, 0.0, i);
    while k > 0 {
        f /= base as f64;
        r += f * (k % base) as f64;
        k /= base;
    }
    r
}

fn start_points() -> Vec<[f64; 4]> {
    let lo = [-1.0, -2.5, -2.5, -10.0];
    let hi = [1.0, 1.0, 1.0, -1.0];
    let bases = [2, 3, 5, 7];
    (1..=STARTS)
        .map(|i| {
            let mut t = [0.0; 4];
            for d in 0..4 {
                t[d] = lo[d] + (hi[d] - lo[d]) * halton(i, bases[d]);
            }
            t
        })
        .collect()
}

/// Projected L-BFGS ascent with backtracking.
fn maximize(kernel: Kernel, x: &[[f64; 2]], y: &DVector<f64>, start: [f64; 4]) -> Option<([f64; 4], f64)> {
    const MEM: usize = 6;
    let mut t = start;
    project(&mut t);
    let (mut f, mut g) = lml_and_grad(kernel, x, y, &t).ok()?;
    let mut hist: Vec<([f64; 4], [f64; 4])> = Vec::new();
    let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    for _ in 0..200 {
        // Two-loop recursion on the negated objective.
        let mut q = g.map(|v| -v);
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, yv) in hist.iter().rev() {
            let rho = 1.0 / dot(yv, s);
            let a = rho * dot(s, &q);
            for i in 0..4 {
                q[i] -= a * yv[i];
            }
            alphas.push((a, rho));
        }
        if let Some((s, yv)) = hist.last() {
            let gamma = dot(s, yv) / dot(yv, yv);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, yv), (a, rho)) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(yv, &q);
            for i in 0..4 {
                q[i] += s[i] * (a - b);
            }
        }
        let mut dir = q.map(|v| -v);
        if dot(&dir, &g) <= 0.0 {
            hist.clear();
            dir = g;
        }
        let mut step = if hist.is_empty() {
            (1.0 / dot(&g, &g).sqrt()).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..40 {
            let mut cand = [0.0; 4];
            for i in 0..4 {
                cand[i] = t[i] + step * dir[i];
            }
            project(&mut cand);
            let moved: [f64; 4] = std::array::from_fn(|i| cand[i] - t[i]);
            if dot(&moved, &moved) == 0.0 {
                break;
            }
            if let Ok((fc, gc)) = lml_and_grad(kernel, x, y, &cand) {
                if fc >= f + 1e-4 * dot(&g, &moved) {
                    accepted = Some((cand, fc, gc, moved));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((cand, fc, gc, moved)) = accepted else {
            break;
        };
        let dy: [f64; 4] = std::array::from_fn(|i| g[i] - gc[i]);
        if dot(&moved, &dy) > 1e-12 {
            hist.push((moved, dy));
            if hist.len() > MEM {
                hist.remove(0);
            }
        }
        let gain = fc - f;
        t = cand;
        f = fc;
        g = gc;
        if gain.abs() < 1e-9 * (1.0 + f.abs()) {
            break;
        }
    }
    Some((t, f))
}

impl SurrogateModel {
    fn assemble(kernel: Kernel, hyper: Hyperparams, train: TrainingSet, jitter: Option<f64>) -> Result<Self> {
        let pts: Vec<[f64; 2]> = train.inputs.iter().map(coords).collect();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &pts {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let span = [0, 1].map(|d| if hi[d] > lo[d] { hi[d] - lo[d] } else { 1.0 });
        let x_unit: Vec<[f64; 2]> = pts
            .iter()
            .map(|p| [(p[0] - lo[0]) / span[0], (p[1] - lo[1]) / span[1]])
            .collect();
        let n = train.len() as f64;
        let y_mean = train.targets.iter().sum::<f64>() / n;
        let var = train.targets.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n;
        let y_std = if var > 0.0 { var.sqrt() } else { 1.0 };
        let y = DVector::from_iterator(train.len(), train.targets.iter().map(|v| (v - y_mean) / y_std));
        let (chol, jitter) = factor(kernel, &x_unit, &hyper, jitter.unwrap_or(0.0))?;
        let alpha = chol.solve(&y);
        let log_det: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
        let lml = -0.5 * y.dot(&alpha) - 0.5 * log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln();
        Ok(SurrogateModel {
            kernel,
            hyper,
            log_marginal_likelihood: lml,
            lo,
            span,
            y_mean,
            y_std,
            jitter,
            train,
            x_unit,
            chol,
            alpha,
        })
    }

    fn unit(&self, x: &DesignPoint) -> [f64; 2] {
        let c = coords(x);
        [(c[0] - self.lo[0]) / self.span[0], (c[1] - self.lo[1]) / self.span[1]]
    }

    fn cross(&self, u: &[f64; 2]) -> DVector<f64> {
        let h = &self.hyper;
        DVector::from_iterator(
            self.x_unit.len(),
            self.x_unit.iter().map(|xi| {
                let d = scaled_diff(u, xi, &h.length_scales);
                h.signal_var * self.kernel.corr((d[0] * d[0] + d[1] * d[1]).sqrt())
            }),
        )
    }

    /// Posterior mean and latent variance at `x`, in target units.
    pub fn predict(&self, x: &DesignPoint) -> (f64, f64) {
        let ks = self.cross(&self.unit(x));
        let mean = ks.dot(&self.alpha) * self.y_std + self.y_mean;
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&ks)
            .expect("Cholesky factor has a positive diagonal");
        let var = (self.hyper.signal_var - v.dot(&v)).max(0.0) * self.y_std * self.y_std;
        (mean, var)
    }

    pub fn predict_mean(&self, x: &DesignPoint) -> f64 {
        self.cross(&self.unit(x)).dot(&self.alpha) * self.y_std + self.y_mean
    }

    pub fn training_set(&self) -> &TrainingSet {
        &self.train
    }

    pub fn to_json(&self) -> String {
        let f = ModelFile {
            format: FORMAT.into(),
            version: VERSION,
            kernel: self.kernel,
            hyper: self.hyper,
            log_marginal_likelihood: self.log_marginal_likelihood,
            lo: self.lo,
            span: self.span,
            y_mean: self.y_mean,
            y_std: self.y_std,
            jitter: self.jitter,
            train: self.train.clone(),
        };
        serde_json::to_string_pretty(&f).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if f.format != FORMAT || f.version != VERSION {
            return Err(Error::ModelFormat(format!(
                "expected {FORMAT} v{VERSION}, found {} v{}",
                f.format, f.version
            )));
        }
        let m = SurrogateModel::assemble(f.kernel, f.hyper, f.train, Some(f.jitter))?;
        if m.lo != f.lo || m.span != f.span || m.y_mean != f.y_mean || m.y_std != f.y_std {
            return Err(Error::ModelFormat("stored scaling does not match training data".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SurrogateModel::from_json(&text)
    }
}

/// Standardized targets and unit-box inputs exactly as the optimizer sees them.
fn standardized(ts: &TrainingSet, kernel: Kernel) -> Result<(Vec<[f64; 2]>, DVector<f64>)> {
    let probe = SurrogateModel::assemble(
        kernel,
        Hyperparams {
            signal_var: 1.0,
            length_scales: [1.0, 1.0],
            noise_var: 1e-2,
        },
        ts.clone(),
        None,
    )?;
    let y = DVector::from_iterator(ts.len(), ts.targets.iter().map(|v| (v - probe.y_mean) / probe.y_std));
    Ok((probe.x_unit, y))
}

/// Log marginal likelihood of `ts` and its gradient with respect to the
/// optimizer coordinates `[ln σf², ln ℓ₁, ln ℓ₂, ln(σn²/σf²)]`.
pub fn log_marginal_likelihood(ts: &TrainingSet, kernel: Kernel, theta: [f64; 4]) -> Result<(f64, [f64; 4])> {
    let (x, y) = standardized(ts, kernel)?;
    lml_and_grad(kernel, &x, &y, &theta)
}

/// Fits a GP with the given kernel by multi-start marginal-likelihood ascent.
pub fn fit(ts: &TrainingSet, kernel: Kernel) -> Result<SurrogateModel> {
    if ts.len() < 2 {
        return Err(Error::DegenerateData("need at least two training points".into()));
    }
    let (x, y) = standardized(ts, kernel)?;
    let x = &x;
    let best = start_points()
        .into_iter()
        .filter_map(|s| maximize(kernel, x, &y, s))
        .fold(None::<([f64; 4], f64)>, |acc, cur| match acc {
            Some(a) if a.1 >= cur.1 => Some(a),
            _ => Some(cur),
        })
        .ok_or(Error::NotPositiveDefinite)?;
    SurrogateModel::assemble(kernel, Hyperparams::from_theta(&best.0), ts.clone(), None)
}

/// Fits all three kernels in parallel, in [`Kernel::ALL`] order.
pub fn fit_all(ts: &TrainingSet) -> Result<Vec<SurrogateModel>> {
    Kernel::ALL.par_iter().map(|&k| fit(ts, k)).collect()
}

/// Coefficient of determination on a held-out set.
pub fn r_squared(m: &SurrogateModel, test: &TrainingSet) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::DegenerateData("empty test set".into()));
    }
    let n = test.len() as f64;
    let mean = test.targets.iter().sum::<f64>() / n;
    let ss_tot: f64 = test.targets.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::DegenerateData("test targets have zero variance".into()));
    }
    let ss_res: f64 = test
        .inputs
        .iter()
        .zip(&test.targets)
        .map(|(x, y)| (y - m.predict_mean(x)).powi(2))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Index of the best-scoring kernel; exact ties go to the rougher kernel.
pub fn select_by_score(scored: &[(Kernel, f64)]) -> usize {
    let mut best = 0;
    for (i, (k, s)) in scored.iter().enumerate().skip(1) {
        let (bk, bs) = scored[best];
        if *s > bs || (*s == bs && k.roughness_rank() < bk.roughness_rank()) {
            best = i;
        }
    }
    best
}

/// Picks the candidate with the highest test R², returning it with all scores.
pub fn select_model(candidates: Vec<SurrogateModel>, test: &TrainingSet) -> Result<(SurrogateModel, Vec<f64>)> {
    if candidates.is_empty() {
        return Err(Error::DegenerateData("no candidate models".into()));
    }
    let scores = candidates
        .iter()
        .map(|m| r_squared(m, test))
        .collect::<Result<Vec<f64>>>()?;
    let scored: Vec<(Kernel, f64)> = candidates
        .iter()
        .map(|m| m.kernel)
        .zip(scores.iter().copied())
        .collect();
    let i = select_by_score(&scored);
    let chosen = candidates.into_iter().nth(i).expect("index in range");
    Ok((chosen, scores))
}
