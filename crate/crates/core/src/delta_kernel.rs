//! Smooth approximation of the Kronecker delta on the integers.
//!
//! δ(n) = (c_Q / Q²) Σ_q Σ*_{a mod q} e_q(an) h(q/Q, n/Q²), with
//! h(x, y) = Σ_j (1/(xj)) [w(xj) − w(|y|/(xj))].

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arith::{euler_phi, ramanujan_sum, CompensatedSum};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::report::{num, ExperimentReport};

/// w(x) = c exp(−1/((x − 1/2)(1 − x))) on (1/2, 1), zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub normalization: f64,
}

fn raw_bump(x: f64) -> f64 {
    if x <= 0.5 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / ((x - 0.5) * (1.0 - x))).exp()
    }
}

impl BumpSpec {
    pub fn standard() -> Self {
        let mass = quadrature::integrate(raw_bump, 0.5, 1.0, 64, 20);
        Self { normalization: 1.0 / mass }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.normalization * raw_bump(x)
    }

    /// ∫ w with a rule independent of the one used for normalisation.
    pub fn integral(&self) -> f64 {
        quadrature::integrate(|x| self.eval(x), 0.5, 1.0, 200, 16)
    }
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaKernel {
    pub bump: BumpSpec,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "c_Q")]
    pub c_q: f64,
}

impl DeltaKernel {
    pub fn new(q: f64) -> Result<Self> {
        let bump = BumpSpec::standard();
        let c_q = calibrate_cq(&bump, q)?;
        Ok(Self { bump, q, c_q })
    }

    pub fn h(&self, x: f64, y: f64) -> f64 {
        h_eval_bump(&self.bump, x, y)
    }
}

/// h(x, y) for x > 0. Only the j with xj or |y|/(xj) in (1/2, 1) contribute.
pub fn h_eval_bump(w: &BumpSpec, x: f64, y: f64) -> f64 {
    assert!(x > 0.0, "h needs x > 0");
    let ay = y.abs();
    if x >= 1f64.max(2.0 * ay) {
        return 0.0;
    }
    let mut s = 0.0;
    let lo = (0.5 / x).floor().max(1.0) as u64;
    let hi = (1.0 / x).ceil() as u64;
    for j in lo..=hi {
        let xj = x * j as f64;
        s += w.eval(xj) / xj;
    }
    if ay > 0.0 {
        let lo = (ay / x).floor().max(1.0) as u64;
        let hi = (2.0 * ay / x).ceil() as u64;
        for j in lo..=hi {
            let xj = x * j as f64;
            s -= w.eval(ay / xj) / xj;
        }
    }
    s
}

pub fn h_eval(kernel: &DeltaKernel, x: f64, y: f64) -> f64 {
    h_eval_bump(&kernel.bump, x, y)
}

/// c_Q = Q² / Σ_q φ(q) h(q/Q, 0), which makes the identity exact at n = 0.
pub fn calibrate_cq(bump: &BumpSpec, q: f64) -> Result<f64> {
    if q.is_nan() || q <= 1.0 {
        return Err(Error::InvalidInput(format!("Q must exceed 1, got {q}")));
    }
    let mut acc = CompensatedSum::new();
    for m in 1..=q.ceil() as u64 {
        acc.add_real(euler_phi(m) as f64 * h_eval_bump(bump, m as f64 / q, 0.0));
    }
    let den = acc.value().re;
    if den <= 0.0 {
        return Err(Error::DegenerateBump);
    }
    Ok(q * q / den)
}

/// The right-hand side of the delta identity at the integer n.
pub fn reconstruct_delta(kernel: &DeltaKernel, n: i64) -> f64 {
    let q = kernel.q;
    let y = n as f64 / (q * q);
    let q_max = (q.max(2.0 * n.unsigned_abs() as f64 / q)).floor() as u64 + 1;
    let mut acc = CompensatedSum::new();
    for m in 1..=q_max {
        let hv = kernel.h(m as f64 / q, y);
        if hv != 0.0 {
            acc.add_real(ramanujan_sum(m, n) as f64 * hv);
        }
    }
    kernel.c_q / (q * q) * acc.value().re
}

/// Log-spaced sample grid for the kernel bound survey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurveyGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    /// Number of |y|/x ratios, log-spaced over [1e-2, 1e2].
    pub ny: usize,
}

impl Default for SurveyGrid {
    fn default() -> Self {
        Self { x_min: 1e-2, x_max: 1.0, nx: 40, ny: 40 }
    }
}

fn logspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![a];
    }
    (0..k).map(|i| a * (b / a).powf(i as f64 / (k - 1) as f64)).collect()
}

/// Central finite differences of order (i, j) ≤ (1, 1) with relative step 1e-5.
fn partial(k: &DeltaKernel, x: f64, y: f64, i: u32, j: u32) -> f64 {
    let hx = 1e-5 * x;
    let hy = 1e-5 * y.abs().max(x);
    match (i, j) {
        (0, 0) => k.h(x, y),
        (1, 0) => (k.h(x + hx, y) - k.h(x - hx, y)) / (2.0 * hx),
        (0, 1) => (k.h(x, y + hy) - k.h(x, y - hy)) / (2.0 * hy),
        (1, 1) => {
            (k.h(x + hx, y + hy) - k.h(x + hx, y - hy) - k.h(x - hx, y + hy) + k.h(x - hx, y - hy))
                / (4.0 * hx * hy)
        }
        _ => unreachable!("survey uses mixed orders up to (1, 1)"),
    }
}

/// Empirical constants for the derivative bounds on h.
pub fn h_bound_survey(kernel: &DeltaKernel, grid: &SurveyGrid) -> ExperimentReport {
    let mut rep = ExperimentReport::new(
        "h_bound_survey",
        &["x", "y", "h", "x_abs_h", "dh_dy", "ratio_bound2", "ratio_bound3"],
    );
    let mut max_xh: f64 = 0.0;
    let mut max_dy_inner: f64 = 0.0;
    let mut max_r2: f64 = 0.0;
    let mut max_r3: f64 = 0.0;
    let n_pow = 2;
    for &x in &logspace(grid.x_min, grid.x_max, grid.nx) {
        for &t in &logspace(1e-2, 1e2, grid.ny) {
            let y = t * x;
            let hv = kernel.h(x, y);
            let dy = partial(kernel, x, y, 0, 1);
            max_xh = max_xh.max(x * hv.abs());
            let mut r2 = f64::NAN;
            if x <= 1.0 && t <= 0.45 {
                max_dy_inner = max_dy_inner.max(dy.abs());
            } else if t > 0.5 {
                r2 = 0.0;
                for (i, j) in [(0u32, 0u32), (1, 0), (0, 1), (1, 1)] {
                    let d = partial(kernel, x, y, i, j).abs();
                    let scale = x.powi(-1 - i as i32) * y.abs().powi(-(j as i32));
                    r2 = f64::max(r2, d / scale);
                }
                max_r2 = max_r2.max(r2);
            }
            let mut r3: f64 = 0.0;
            for (i, j) in [(0u32, 0u32), (1, 0), (0, 1), (1, 1)] {
                let d = partial(kernel, x, y, i, j).abs();
                let scale = x.powi(-1 - i as i32 - j as i32)
                    * (x.powi(n_pow) + 1f64.min((x / y.abs()).powi(n_pow)));
                r3 = r3.max(d / scale);
            }
            max_r3 = max_r3.max(r3);
            rep.push(vec![num(x), num(y), num(hv), num(x * hv.abs()), num(dy), num(r2), num(r3)]);
        }
    }
    rep.set("max_x_abs_h", num(max_xh));
    rep.set("max_abs_dh_dy_inner", num(max_dy_inner));
    rep.set("max_ratio_bound2", num(max_r2));
    rep.set("max_ratio_bound3", num(max_r3));
    rep.metadata.config = json!({ "Q": kernel.q, "grid": grid, "fd_relative_step": 1e-5, "N": n_pow });
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_normalised() {
        let w = BumpSpec::standard();
        assert!((w.integral() - 1.0).abs() < 1e-10);
        assert_eq!(w.eval(0.5), 0.0);
        assert_eq!(w.eval(1.0), 0.0);
        assert_eq!(w.eval(1.3), 0.0);
        assert!(w.eval(0.75) > 0.0);
    }

    #[test]
    fn h_examples() {
        let k = DeltaKernel::new(20.0).unwrap();
        assert_eq!(k.h(1.5, 0.2), 0.0);
        let direct: f64 = [2.0, 3.0].iter().map(|j| k.bump.eval(0.3 * j) / (0.3 * j)).sum();
        assert!((k.h(0.3, 0.0) - direct).abs() < 1e-12 * direct.abs().max(1.0));
        assert_eq!(k.h(0.2, 0.7), k.h(0.2, -0.7));
    }

    #[test]
    fn delta_q20() {
        let k = DeltaKernel::new(20.0).unwrap();
        assert!((reconstruct_delta(&k, 0) - 1.0).abs() < 1e-12);
        assert!(reconstruct_delta(&k, 7).abs() < 1e-8);
        assert_eq!(reconstruct_delta(&k, 7), reconstruct_delta(&k, -7));
        // The standard bump gives c_4 = 0.4244, outside (1/2, 2); only positivity holds.
        let c4 = DeltaKernel::new(4.0).unwrap().c_q;
        assert!((c4 - 0.42441718830).abs() < 1e-9);
        let gap = |q: f64| (DeltaKernel::new(q).unwrap().c_q - 1.0).abs();
        assert!(gap(40.0) < gap(10.0));
    }

    #[test]
    fn rejects_small_q() {
        assert!(DeltaKernel::new(1.0).is_err());
    }
}
