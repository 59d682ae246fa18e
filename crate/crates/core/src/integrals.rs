//! Weight functions, the singular integral J0 and the oscillatory integrals I_{q1,q2}(m).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::bivariate::{intersect_f64, Conic};
use crate::delta_kernel::{h_eval_bump, BumpSpec};
use crate::error::{Error, Result};
use crate::forms::{singular_locus_clearance, IntMatrix, QuadricPair, RealBox};
use crate::quadrature::{composite, gauss_legendre};

/// 0 for t ≤ 0, 1 for t ≥ 1, smooth in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let f = |s: f64| (-1.0 / s).exp();
    let a = f(t);
    a / (a + f(1.0 - t))
}

/// Even bump: 1 on [-1, 1], 0 outside [-2, 2].
pub fn bump_u(x: f64) -> f64 {
    smooth_step(2.0 - x.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    SmoothBox,
    SharpBox,
    BumpU,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub kind: WeightKind,
    #[serde(rename = "box")]
    pub bx: RealBox,
    #[serde(rename = "sharpness_H")]
    pub sharpness_h: f64,
}

impl WeightFunction {
    pub fn sharp(bx: RealBox) -> Self {
        Self { kind: WeightKind::SharpBox, bx, sharpness_h: f64::INFINITY }
    }

    pub fn dim(&self) -> usize {
        self.bx.dim()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        match self.kind {
            WeightKind::SharpBox => {
                if self.bx.contains(y) {
                    1.0
                } else {
                    0.0
                }
            }
            WeightKind::SmoothBox => {
                let h = self.sharpness_h;
                let mut w = 1.0;
                for (i, &v) in y.iter().enumerate() {
                    w *= smooth_step(h * (v - self.bx.lo[i]) + 1.0) * smooth_step(h * (self.bx.hi[i] - v) + 1.0);
                    if w == 0.0 {
                        return 0.0;
                    }
                }
                w
            }
            WeightKind::BumpU => y.iter().map(|&v| bump_u(v)).product(),
        }
    }

    /// Closed box outside which the weight vanishes.
    pub fn support(&self) -> RealBox {
        match self.kind {
            WeightKind::SharpBox => self.bx.clone(),
            WeightKind::SmoothBox => self.bx.thicken(1.0 / self.sharpness_h),
            WeightKind::BumpU => RealBox::cube(self.dim(), -2.0, 2.0),
        }
    }
}

/// Builds a weight; smooth weights must keep their support away from the
/// singular locus.
pub fn make_weight(pair: &QuadricPair, kind: WeightKind, bx: RealBox, sharpness_h: f64) -> Result<WeightFunction> {
    if bx.dim() != pair.n() {
        return Err(Error::DimensionMismatch { expected: pair.n(), got: bx.dim() });
    }
    let w = match kind {
        WeightKind::SharpBox => WeightFunction::sharp(bx),
        WeightKind::SmoothBox => {
            if sharpness_h.is_nan() || sharpness_h < 1.0 {
                return Err(Error::InvalidInput(format!("sharpness H must be ≥ 1, got {sharpness_h}")));
            }
            WeightFunction { kind, bx, sharpness_h }
        }
        WeightKind::BumpU => WeightFunction { kind, bx: RealBox::cube(pair.n(), -1.0, 1.0), sharpness_h: 1.0 },
    };
    if kind == WeightKind::SmoothBox {
        let clearance = singular_locus_clearance(pair, &w.support());
        if clearance <= 0.0 {
            return Err(Error::SupportTouchesSingularLocus { clearance });
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum J0Method {
    McLimit,
    Coarea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsPoint {
    pub eps1: f64,
    pub eps2: f64,
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularIntegralEstimate {
    pub value: f64,
    pub method: J0Method,
    pub eps_schedule: Vec<(f64, f64)>,
    /// Statistical error for mc_limit, refinement difference for coarea.
    pub stderr: f64,
    pub per_eps: Vec<EpsPoint>,
    /// Smallest max_{k<l} |J_kl| / (|∇Q1| |∇Q2|) seen on the surface (coarea only).
    pub min_chart_jacobian: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McParams {
    pub eps_schedule: Vec<f64>,
    pub samples: u64,
    pub batches: usize,
    pub seed: u64,
    pub max_rel_stderr: Option<f64>,
}

impl Default for McParams {
    fn default() -> Self {
        Self {
            eps_schedule: vec![0.2, 0.1, 0.05, 0.025],
            samples: 2_000_000,
            batches: 32,
            seed: 1,
            max_rel_stderr: None,
        }
    }
}

/// {t ∈ [lo, hi] : a t² + b t + c < 0}.
fn below(a: f64, b: f64, c: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let clip = |s: f64, e: f64| -> Option<(f64, f64)> {
        let (s, e) = (s.max(lo), e.min(hi));
        (s < e).then_some((s, e))
    };
    if a == 0.0 {
        return if b == 0.0 {
            if c < 0.0 { vec![(lo, hi)] } else { Vec::new() }
        } else if b > 0.0 {
            clip(lo, -c / b).into_iter().collect()
        } else {
            clip(-c / b, hi).into_iter().collect()
        };
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return if a > 0.0 { Vec::new() } else { vec![(lo, hi)] };
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (mut r1, mut r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    if a > 0.0 {
        clip(r1, r2).into_iter().collect()
    } else {
        clip(lo, r1).into_iter().chain(clip(r2, hi)).collect()
    }
}

fn intersect_intervals(x: &[(f64, f64)], y: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        let s = x[i].0.max(y[j].0);
        let e = x[i].1.min(y[j].1);
        if s < e {
            out.push((s, e));
        }
        if x[i].1 < y[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Q(prefix, t) = a t² + b t + c with t the last coordinate.
fn last_coordinate_poly(m: &IntMatrix, prefix: &[f64]) -> (f64, f64, f64) {
    let n = m.len();
    let last = n - 1;
    let mut c = 0.0;
    let mut b = 0.0;
    for i in 0..last {
        let mut row = 0.0;
        for j in 0..last {
            row += m[i][j] as f64 * prefix[j];
        }
        c += prefix[i] * row;
        b += 2.0 * m[i][last] as f64 * prefix[i];
    }
    (m[last][last] as f64, b, c)
}

/// ∫ W(prefix, t) dt over {t : |Q1| < ε1, |Q2| < ε2}.
fn slab_line_integral(
    pair: &QuadricPair,
    w: &WeightFunction,
    prefix: &[f64],
    p1: (f64, f64, f64),
    p2: (f64, f64, f64),
    eps: (f64, f64),
    lo: f64,
    hi: f64,
    gl: &(Vec<f64>, Vec<f64>),
    y: &mut Vec<f64>,
) -> f64 {
    let s1 = intersect_intervals(
        &below(p1.0, p1.1, p1.2 - eps.0, lo, hi),
        &below(-p1.0, -p1.1, -p1.2 - eps.0, lo, hi),
    );
    if s1.is_empty() {
        return 0.0;
    }
    let s2 = intersect_intervals(
        &below(p2.0, p2.1, p2.2 - eps.1, lo, hi),
        &below(-p2.0, -p2.1, -p2.2 - eps.1, lo, hi),
    );
    let set = intersect_intervals(&s1, &s2);
    let n = pair.n();
    let mut total = 0.0;
    for (s, e) in set {
        if w.kind == WeightKind::SharpBox {
            total += e - s;
            continue;
        }
        let panels = ((e - s) * 2.0 * w.sharpness_h).ceil().max(1.0) as usize;
        let h = (e - s) / panels as f64;
        y[..n - 1].copy_from_slice(prefix);
        for p in 0..panels {
            let a = s + p as f64 * h;
            for (xi, wi) in gl.0.iter().zip(&gl.1) {
                y[n - 1] = a + 0.5 * h * (xi + 1.0);
                total += 0.5 * h * wi * w.eval(y);
            }
        }
    }
    total
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Least-squares intercept of f against ε².
fn extrapolate(eps: &[f64], f: &[f64]) -> f64 {
    if eps.len() == 1 {
        return f[0];
    }
    let x: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let k = x.len() as f64;
    let xm = x.iter().sum::<f64>() / k;
    let fm = f.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - xm).powi(2)).sum();
    let sxf: f64 = x.iter().zip(f).map(|(a, b)| (a - xm) * (b - fm)).sum();
    fm - sxf / sxx * xm
}

/// J0 as the ε → 0 limit of (4ε1ε2)⁻¹ ∫_{|Q1|<ε1, |Q2|<ε2} W, by Monte Carlo
/// over the first n−1 coordinates with the last one integrated exactly.
pub fn singular_integral_limit(pair: &QuadricPair, w: &WeightFunction, params: &McParams) -> Result<SingularIntegralEstimate> {
    let n = pair.n();
    if w.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.dim() });
    }
    if params.eps_schedule.is_empty() || params.batches == 0 || params.samples < params.batches as u64 {
        return Err(Error::InvalidInput("empty schedule or too few samples".into()));
    }
    let sup = w.support();
    let prefix_volume: f64 = (0..n - 1).map(|i| sup.hi[i] - sup.lo[i]).product();
    let per_batch = params.samples / params.batches as u64;
    let gl = gauss_legendre(6);
    let eps = &params.eps_schedule;
    let batch_estimates: Vec<Vec<f64>> = (0..params.batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(b as u64);
            let mut acc = vec![0.0; eps.len()];
            let mut prefix = vec![0.0; n - 1];
            let mut y = vec![0.0; n];
            for _ in 0..per_batch {
                for (i, p) in prefix.iter_mut().enumerate() {
                    *p = rng.gen_range(sup.lo[i]..sup.hi[i]);
                }
                let p1 = last_coordinate_poly(&pair.q1.matrix, &prefix);
                let p2 = last_coordinate_poly(&pair.q2.matrix, &prefix);
                for (k, &e) in eps.iter().enumerate() {
                    acc[k] += slab_line_integral(pair, w, &prefix, p1, p2, (e, e), sup.lo[n - 1], sup.hi[n - 1], &gl, &mut y);
                }
            }
            acc.iter()
                .zip(eps)
                .map(|(s, e)| prefix_volume * s / per_batch as f64 / (4.0 * e * e))
                .collect()
        })
        .collect();
    let mut per_eps = Vec::new();
    for (k, &e) in eps.iter().enumerate() {
        let col: Vec<f64> = batch_estimates.iter().map(|r| r[k]).collect();
        let (m, s) = mean_and_stderr(&col);
        per_eps.push(EpsPoint { eps1: e, eps2: e, estimate: m, stderr: s });
    }
    let limits: Vec<f64> = batch_estimates.iter().map(|r| extrapolate(eps, r)).collect();
    let (value, stderr) = mean_and_stderr(&limits);
    if let Some(req) = params.max_rel_stderr {
        if value != 0.0 && stderr / value.abs() > req {
            return Err(Error::InsufficientSamples { achieved: stderr / value.abs(), requested: req });
        }
    }
    Ok(SingularIntegralEstimate {
        value,
        method: J0Method::McLimit,
        eps_schedule: eps.iter().map(|&e| (e, e)).collect(),
        stderr,
        per_eps,
        min_chart_jacobian: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoareaParams {
    /// Midpoint cells per free coordinate.
    pub grid: usize,
}

impl Default for CoareaParams {
    fn default() -> Self {
        Self { grid: 64 }
    }
}

fn chart_conic(m: &IntMatrix, i: usize, j: usize, y: &[f64]) -> Conic<f64> {
    let n = m.len();
    let (mut d, mut e, mut f) = (0.0, 0.0, 0.0);
    for k in 0..n {
        if k == i || k == j {
            continue;
        }
        d += 2.0 * m[i][k] as f64 * y[k];
        e += 2.0 * m[j][k] as f64 * y[k];
        for l in 0..n {
            if l != i && l != j {
                f += m[k][l] as f64 * y[k] * y[l];
            }
        }
    }
    Conic { a: m[i][i] as f64, b: 2.0 * m[i][j] as f64, c: m[j][j] as f64, d, e, f }
}

fn gradient(m: &IntMatrix, y: &[f64]) -> Vec<f64> {
    m.iter().map(|row| 2.0 * row.iter().zip(y).map(|(a, b)| *a as f64 * b).sum::<f64>()).collect()
}

struct CoareaSum {
    value: f64,
    min_jac: f64,
    failure: Option<Vec<f64>>,
}

fn coarea_once(pair: &QuadricPair, w: &WeightFunction, grid: usize) -> CoareaSum {
    let n = pair.n();
    let sup = w.support();
    let charts: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let parts: Vec<CoareaSum> = charts
        .par_iter()
        .map(|&(i, j)| {
            let others: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
            let steps: Vec<f64> = others.iter().map(|&k| (sup.hi[k] - sup.lo[k]) / grid as f64).collect();
            let cell: f64 = steps.iter().product();
            let total = grid.pow(others.len() as u32);
            let slab = |start: usize, end: usize| -> CoareaSum {
                let mut out = CoareaSum { value: 0.0, min_jac: f64::INFINITY, failure: None };
                let mut y = vec![0.0; n];
                for idx in start..end {
                    let mut t = idx;
                    for (s, &k) in others.iter().enumerate() {
                        y[k] = sup.lo[k] + (t % grid) as f64 * steps[s] + 0.5 * steps[s];
                        t /= grid;
                    }
                    let c1 = chart_conic(&pair.q1.matrix, i, j, &y);
                    let c2 = chart_conic(&pair.q2.matrix, i, j, &y);
                    let Some(points) = intersect_f64(&c1, &c2) else { continue };
                    for (u, v) in points {
                        if u < sup.lo[i] || u > sup.hi[i] || v < sup.lo[j] || v > sup.hi[j] {
                            continue;
                        }
                        y[i] = u;
                        y[j] = v;
                        let wy = w.eval(&y);
                        if wy == 0.0 {
                            continue;
                        }
                        let g1 = gradient(&pair.q1.matrix, &y);
                        let g2 = gradient(&pair.q2.matrix, &y);
                        let mut s4 = 0.0;
                        let mut jmax: f64 = 0.0;
                        for k in 0..n {
                            for l in k + 1..n {
                                let jkl = g1[k] * g2[l] - g1[l] * g2[k];
                                s4 += jkl.powi(4);
                                jmax = jmax.max(jkl.abs());
                            }
                        }
                        let norm = g1.iter().map(|x| x * x).sum::<f64>().sqrt() * g2.iter().map(|x| x * x).sum::<f64>().sqrt();
                        let rel = if norm > 0.0 { jmax / norm } else { 0.0 };
                        out.min_jac = out.min_jac.min(rel);
                        if rel < 1e-8 {
                            out.failure.get_or_insert_with(|| y.clone());
                            continue;
                        }
                        let jij = g1[i] * g2[j] - g1[j] * g2[i];
                        if jij == 0.0 {
                            continue;
                        }
                        out.value += cell * wy * jij.powi(4) / s4 / jij.abs();
                    }
                }
                out
            };
            let step = (total / 64).max(1);
            let bounds: Vec<(usize, usize)> = (0..total).step_by(step).map(|s| (s, (s + step).min(total))).collect();
            let pieces: Vec<CoareaSum> = bounds.par_iter().map(|&(s, e)| slab(s, e)).collect();
            combine(pieces)
        })
        .collect();
    combine(parts)
}

fn combine(parts: Vec<CoareaSum>) -> CoareaSum {
    let mut out = CoareaSum { value: 0.0, min_jac: f64::INFINITY, failure: None };
    for p in parts {
        out.value += p.value;
        out.min_jac = out.min_jac.min(p.min_jac);
        if out.failure.is_none() {
            out.failure = p.failure;
        }
    }
    out
}

/// J0 = ∫_{Q1=Q2=0} W |J|⁻¹ via the charts φ_ij = (Q1, Q2, y without y_i, y_j),
/// glued by the partition of unity ψ_ij = J_ij⁴ / Σ J_kl⁴.
pub fn singular_integral_coarea(pair: &QuadricPair, w: &WeightFunction, params: &CoareaParams) -> Result<SingularIntegralEstimate> {
    let n = pair.n();
    if w.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.dim() });
    }
    if !(2..=6).contains(&n) {
        return Err(Error::InvalidInput(format!("coarea quadrature supports 2 ≤ n ≤ 6, got {n}")));
    }
    let grid = params.grid.max(2);
    let fine = coarea_once(pair, w, grid);
    if let Some(point) = fine.failure {
        return Err(Error::ChartCoverageFailure { point });
    }
    let coarse = coarea_once(pair, w, grid / 2);
    Ok(SingularIntegralEstimate {
        value: fine.value,
        method: J0Method::Coarea,
        eps_schedule: Vec::new(),
        stderr: (fine.value - coarse.value).abs(),
        per_eps: Vec::new(),
        min_chart_jacobian: fine.min_jac.is_finite().then_some(fine.min_jac),
    })
}

/// Tensor-product Gauss–Legendre rule over a box.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub axes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl TensorRule {
    pub fn new(bx: &RealBox, panels: &[usize], order: usize) -> Self {
        let axes = (0..bx.dim()).map(|i| composite(bx.lo[i], bx.hi[i], panels[i], order)).collect();
        Self { axes }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.0.len()).collect()
    }
}

/// Weighted samples w_k F(y_k) of a function on a tensor rule.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub rule: TensorRule,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn sample<F: Fn(&[f64]) -> f64 + Sync>(rule: TensorRule, f: F) -> Self {
        let shape = rule.shape();
        let n = shape.len();
        let inner: usize = shape[1..].iter().product();
        let rows: Vec<Vec<f64>> = (0..shape[0])
            .into_par_iter()
            .map(|i0| {
                let mut y = vec![0.0; n];
                let mut row = Vec::with_capacity(inner);
                y[0] = rule.axes[0].0[i0];
                let w0 = rule.axes[0].1[i0];
                for rest in 0..inner {
                    let mut t = rest;
                    let mut wt = w0;
                    for k in (1..n).rev() {
                        let len = shape[k];
                        let idx = t % len;
                        t /= len;
                        y[k] = rule.axes[k].0[idx];
                        wt *= rule.axes[k].1[idx];
                    }
                    row.push(wt * f(&y));
                }
                row
            })
            .collect();
        Self { rule, values: rows.concat() }
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Σ_k w_k F(y_k) e(−u·y_k).
    pub fn transform(&self, u: &[f64]) -> Complex64 {
        let per_axis: Vec<Vec<Complex64>> = self
            .rule
            .axes
            .iter()
            .zip(u)
            .map(|(ax, &ui)| ax.0.iter().map(|&y| Complex64::from_polar(1.0, -TAU * ui * y)).collect())
            .collect();
        self.contract(&per_axis.iter().map(|v| vec![v.clone()]).collect::<Vec<_>>())[0]
    }

    /// Transform on the lattice u = (scale_i m_i) for |m_i| ≤ mmax, row-major in m.
    pub fn transform_lattice(&self, scale: &[f64], mmax: i64) -> Vec<Complex64> {
        let tables: Vec<Vec<Vec<Complex64>>> = self
            .rule
            .axes
            .iter()
            .zip(scale)
            .map(|(ax, &s)| {
                (-mmax..=mmax)
                    .map(|m| ax.0.iter().map(|&y| Complex64::from_polar(1.0, -TAU * s * m as f64 * y)).collect())
                    .collect()
            })
            .collect();
        self.contract(&tables)
    }

    /// Contracts each axis against a family of phase vectors, last axis first.
    fn contract(&self, tables: &[Vec<Vec<Complex64>>]) -> Vec<Complex64> {
        let mut shape = self.rule.shape();
        let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for k in (0..shape.len()).rev() {
            let outer: usize = shape[..k].iter().product();
            let inner: usize = shape[k + 1..].iter().product();
            let g = shape[k];
            let fam = &tables[k];
            let nf = fam.len();
            let next: Vec<Complex64> = (0..outer)
                .into_par_iter()
                .flat_map_iter(|o| {
                    let base = o * g * inner;
                    let mut block = vec![Complex64::new(0.0, 0.0); nf * inner];
                    for (f, phase) in fam.iter().enumerate() {
                        for (gi, ph) in phase.iter().enumerate() {
                            let src = &data[base + gi * inner..base + (gi + 1) * inner];
                            let dst = &mut block[f * inner..(f + 1) * inner];
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d += s * ph;
                            }
                        }
                    }
                    block
                })
                .collect();
            data = next;
            shape[k] = nf;
        }
        data
    }
}

/// The amplitude h(q1/B, Q1(y)) h(q2/√B, B Q2(y)/q1) U(B Q2(y)/q1) W(y).
#[derive(Debug, Clone)]
pub struct Amplitude<'a> {
    pub pair: &'a QuadricPair,
    pub bump: BumpSpec,
    pub weight: &'a WeightFunction,
    pub q1: u64,
    pub q2: u64,
    pub b: f64,
}

impl Amplitude<'_> {
    pub fn eval(&self, y: &[f64]) -> f64 {
        let r1 = self.q1 as f64 / self.b;
        let r2 = self.q2 as f64 / self.b.sqrt();
        let z2 = self.pair.q2.eval_real(y) / r1;
        let u = bump_u(z2);
        if u == 0.0 {
            return 0.0;
        }
        let wv = self.weight.eval(y);
        if wv == 0.0 {
            return 0.0;
        }
        let h2 = h_eval_bump(&self.bump, r2, z2);
        if h2 == 0.0 {
            return 0.0;
        }
        wv * u * h2 * h_eval_bump(&self.bump, r1, self.pair.q1.eval_real(y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscParams {
    pub order: usize,
    /// Panels per unit length before frequency refinement.
    pub panels_per_unit: f64,
    pub points_per_wave: f64,
    pub max_nodes_per_axis: usize,
    /// Absolute error accepted between the base and doubled rules.
    pub tol: f64,
}

impl Default for OscParams {
    fn default() -> Self {
        Self { order: 8, panels_per_unit: 64.0, points_per_wave: 8.0, max_nodes_per_axis: 8192, tol: f64::INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryValue {
    pub value: Complex64,
    pub error: f64,
    pub nodes_per_axis: Vec<usize>,
}

fn panel_counts(bx: &RealBox, u_max: &[f64], params: &OscParams, refine: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..bx.dim() {
        let len = bx.hi[i] - bx.lo[i];
        let base = (params.panels_per_unit * len).ceil();
        let wave = (params.points_per_wave * u_max[i].abs() * len / params.order as f64).ceil();
        let p = base.max(wave).max(1.0) as usize * refine;
        if p * params.order > params.max_nodes_per_axis {
            return Err(Error::QuadratureNotConverged { estimate: f64::NAN });
        }
        out.push(p);
    }
    Ok(out)
}

/// Samples the amplitude on the base rule and its two-fold refinement.
pub fn sample_amplitude_pair(amp: &Amplitude, u_max: &[f64], params: &OscParams) -> Result<(SampledField, SampledField)> {
    let sup = amp.weight.support();
    let coarse = panel_counts(&sup, u_max, params, 1)?;
    let fine = panel_counts(&sup, u_max, params, 2)?;
    let f = |y: &[f64]| amp.eval(y);
    Ok((
        SampledField::sample(TensorRule::new(&sup, &coarse, params.order), f),
        SampledField::sample(TensorRule::new(&sup, &fine, params.order), f),
    ))
}

/// I_{q1,q2}(m) = ∫ h(r1, Q1) h(r2, Q2/r1) U(Q2/r1) W(y) e(−u·y) dy with
/// r1 = q1/B, r2 = q2/√B, u = B m/(q1 q2).
pub fn oscillatory_i(
    pair: &QuadricPair,
    q1: u64,
    q2: u64,
    m: &[i64],
    b: f64,
    w: &WeightFunction,
    bump: &BumpSpec,
    params: &OscParams,
) -> Result<OscillatoryValue> {
    let n = pair.n();
    if n > 3 {
        return Err(Error::InvalidInput(format!("oscillatory quadrature supports n ≤ 3, got {n}")));
    }
    if m.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.len() });
    }
    let scale = b / (q1 * q2) as f64;
    let u: Vec<f64> = m.iter().map(|&x| x as f64 * scale).collect();
    let amp = Amplitude { pair, bump: *bump, weight: w, q1, q2, b };
    let (coarse, fine) = sample_amplitude_pair(&amp, &u, params)?;
    let v0 = coarse.transform(&u);
    let v1 = fine.transform(&u);
    let error = (v1 - v0).norm();
    if error > params.tol {
        return Err(Error::QuadratureNotConverged { estimate: error });
    }
    Ok(OscillatoryValue { value: v1, error, nodes_per_axis: fine.rule.shape() })
}

/// |I(u)| along a coordinate axis for a generic amplitude, via the marginal
/// on that axis followed by a one-dimensional Fourier transform.
pub fn axis_profile(field: &SampledField, axis: usize, us: &[f64]) -> Vec<Complex64> {
    let shape = field.rule.shape();
    let inner: usize = shape[axis + 1..].iter().product();
    let g = shape[axis];
    let mut marginal = vec![0.0; g];
    for (idx, v) in field.values.iter().enumerate() {
        marginal[(idx / inner) % g] += v;
    }
    let nodes = &field.rule.axes[axis].0;
    us.iter()
        .map(|&u| {
            nodes
                .iter()
                .zip(&marginal)
                .map(|(&y, &mv)| Complex64::from_polar(mv, -TAU * u * y))
                .sum()
        })
        .collect()
}

/// I(u) on the lattice u = scale·m by the trapezoidal rule on a uniform grid and an FFT.
/// The period P ≥ support length is R/scale, so u = scale·m is FFT bin R·m; only
/// those bins are needed, so samples are folded modulo P/R before transforming.
/// Spectrally accurate for smooth compactly supported F.
#[derive(Debug, Clone)]
pub struct FftLattice {
    pub n: usize,
    /// Largest |m_i| the grid resolves below the Nyquist bin.
    pub m_band: i64,
    /// Unfolded nodes per axis.
    pub grid: usize,
    pub period: f64,
    values: Vec<Complex64>,
    side: usize,
}

impl FftLattice {
    pub fn new<F: Fn(&[f64]) -> f64 + Sync>(f: F, support: &RealBox, scale: f64, grid: usize) -> Result<Self> {
        let n = support.dim();
        let len = (0..n).map(|i| support.hi[i] - support.lo[i]).fold(0.0, f64::max);
        let r = (len * scale).ceil().max(1.0) as usize;
        let l = grid.div_ceil(r);
        let k = l * r;
        let period = r as f64 / scale;
        let dy = period / k as f64;
        let m_band = ((k / 2).saturating_sub(1) / r) as i64;
        if m_band < 1 {
            return Err(Error::QuadratureNotConverged { estimate: f64::NAN });
        }
        let lo = support.lo.clone();
        let hi = support.hi.clone();
        let inner = l.pow(n as u32 - 1);
        // One folded slab per residue of the first index; each sums r unfolded slabs.
        let slabs: Vec<Vec<f64>> = (0..l)
            .into_par_iter()
            .map(|j0| {
                let mut acc = vec![0.0; inner];
                let mut y = vec![0.0; n];
                let mut idx = vec![0usize; n];
                for t0 in 0..r {
                    y[0] = lo[0] + (j0 + t0 * l) as f64 * dy;
                    if y[0] > hi[0] {
                        continue;
                    }
                    if n == 1 {
                        acc[0] += f(&y);
                        continue;
                    }
                    // Odometer over the remaining unfolded indices.
                    idx[1..].iter_mut().for_each(|v| *v = 0);
                    'walk: loop {
                        let mut slot = 0usize;
                        let mut inside = true;
                        for a in 1..n {
                            y[a] = lo[a] + idx[a] as f64 * dy;
                            inside &= y[a] <= hi[a];
                            slot = slot * l + idx[a] % l;
                        }
                        if inside {
                            acc[slot] += f(&y);
                        }
                        let mut a = n;
                        loop {
                            a -= 1;
                            if a == 0 {
                                break 'walk;
                            }
                            idx[a] += 1;
                            if idx[a] < k && lo[a] + idx[a] as f64 * dy <= hi[a] {
                                break;
                            }
                            idx[a] = 0;
                        }
                    }
                }
                acc
            })
            .collect();
        let total = l.pow(n as u32);
        let mut data: Vec<Complex64> = slabs.concat().into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let fft = rustfft::FftPlanner::new().plan_fft_forward(l);
        let mut line = vec![Complex64::new(0.0, 0.0); l];
        for axis in 0..n {
            let stride = l.pow((n - 1 - axis) as u32);
            for start in 0..total {
                if (start / stride) % l != 0 {
                    continue;
                }
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[start + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
        let side = (2 * m_band + 1) as usize;
        let vol = dy.powi(n as i32);
        let values = (0..side.pow(n as u32))
            .map(|q| {
                let mut t = q;
                let mut flat = 0usize;
                let mut phase = 0.0;
                let mut stride = 1usize;
                for i in (0..n).rev() {
                    let m = (t % side) as i64 - m_band;
                    t /= side;
                    flat += m.rem_euclid(l as i64) as usize * stride;
                    stride *= l;
                    phase += scale * m as f64 * lo[i];
                }
                data[flat] * Complex64::from_polar(vol, -TAU * phase)
            })
            .collect();
        Ok(Self { n, m_band, grid: k, period, values, side })
    }

    /// I(scale·m) for |m_i| ≤ m_band.
    pub fn get(&self, m: &[i64]) -> Complex64 {
        let mut flat = 0usize;
        for &mi in m {
            assert!(mi.abs() <= self.m_band, "frequency outside the resolved band");
            flat = flat * self.side + (mi + self.m_band) as usize;
        }
        self.values[flat]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ternary() -> QuadricPair {
        QuadricPair::diagonal(&[1, -1, 0], &[1, 1, -2]).unwrap()
    }

    #[test]
    fn weights() {
        let pair = ternary();
        let w = make_weight(&pair, WeightKind::SmoothBox, RealBox::cube(3, 1.0, 2.0), 10.0).unwrap();
        assert_eq!(w.eval(&[1.5, 1.5, 1.5]), 1.0);
        assert_eq!(w.eval(&[2.2, 1.5, 1.5]), 0.0);
        let s = make_weight(&pair, WeightKind::SharpBox, RealBox::cube(3, 1.0, 2.0), 1.0).unwrap();
        assert_eq!(s.eval(&[1.0, 2.0, 1.5]), 1.0);
        assert_eq!(s.eval(&[0.99, 2.0, 1.5]), 0.0);
        let err = make_weight(&pair, WeightKind::SmoothBox, RealBox::new(vec![1.0, -1.0, -1.0], vec![2.0, 1.0, 1.0]).unwrap(), 4.0);
        assert!(matches!(err, Err(Error::SupportTouchesSingularLocus { .. })));
        assert_eq!(bump_u(0.7), 1.0);
        assert_eq!(bump_u(-2.5), 0.0);
        assert_eq!(bump_u(1.4), bump_u(-1.4));
    }

    #[test]
    fn fft_lattice_matches_tensor_rule() {
        let bx = RealBox::cube(2, 0.2, 1.1);
        let f = |y: &[f64]| bump_u(5.0 * (y[0] - 0.65)) * bump_u(6.0 * (y[1] - 0.65)) * (1.0 + y[0] * y[1]);
        let lat = FftLattice::new(f, &bx, 2.0, 512).unwrap();
        let field = SampledField::sample(TensorRule::new(&bx, &[64, 64], 8), f);
        for m in [[0i64, 0], [1, -2], [-3, 5], [7, 1]] {
            let u = [2.0 * m[0] as f64, 2.0 * m[1] as f64];
            assert!((lat.get(&m) - field.transform(&u)).norm() < 1e-10, "{m:?}");
        }
    }

    #[test]
    fn sublevel_sets() {
        assert_eq!(below(1.0, 0.0, -1.0, -5.0, 5.0), vec![(-1.0, 1.0)]);
        assert_eq!(below(-1.0, 0.0, 1.0, -5.0, 5.0), vec![(-5.0, -1.0), (1.0, 5.0)]);
        assert_eq!(below(0.0, 2.0, -2.0, -5.0, 5.0), vec![(-5.0, 1.0)]);
        assert!(below(1.0, 0.0, 1.0, -5.0, 5.0).is_empty());
    }

    #[test]
    fn transform_at_zero_is_integral() {
        let rule = TensorRule::new(&RealBox::cube(2, 0.0, 1.0), &[3, 2], 5);
        let f = SampledField::sample(rule, |y| y[0] * y[1] + 1.0);
        assert!((f.integral() - 1.25).abs() < 1e-13);
        assert!((f.transform(&[0.0, 0.0]).re - 1.25).abs() < 1e-13);
        let lat = f.transform_lattice(&[0.5, 1.5], 2);
        let direct = f.transform(&[0.5 * -1.0, 1.5 * 2.0]);
        assert!((lat[1 * 5 + 4] - direct).norm() < 1e-12);
    }
}
