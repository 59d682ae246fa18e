//! Intersections of two plane conics, in floating point and exactly over ℤ.
//!
//! Conics are a u² + b uv + c v² + d u + e v + f. Eliminating v gives the
//! resultant, a polynomial of degree ≤ 4 in u.

use num_complex::Complex64;
use num_traits::Zero;
use std::ops::{Add, Mul, Sub};

use crate::arith::isqrt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
    pub f: T,
}

impl<T> Conic<T>
where
    T: Copy + Add<Output = T> + Mul<Output = T>,
{
    pub fn eval(&self, u: T, v: T) -> T {
        self.a * u * u + self.b * u * v + self.c * v * v + self.d * u + self.e * v + self.f
    }
}

impl<T: Copy + Zero + PartialEq> Conic<T> {
    /// No uv, u or v terms: linear in (u², v²).
    pub fn is_pure_squares(&self) -> bool {
        self.b.is_zero() && self.d.is_zero() && self.e.is_zero()
    }
}

fn pmul<T: Copy + Zero + Add<Output = T> + Mul<Output = T>>(p: &[T], q: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] = out[i + j] + a * b;
        }
    }
    out
}

fn psub<T: Copy + Zero + Sub<Output = T>>(p: &[T], q: &[T]) -> Vec<T> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| {
            let a = p.get(i).copied().unwrap_or_else(T::zero);
            let b = q.get(i).copied().unwrap_or_else(T::zero);
            a - b
        })
        .collect()
}

/// Resultant in v, as coefficients of u in ascending order.
pub fn resultant_in_v<T>(c1: &Conic<T>, c2: &Conic<T>) -> Vec<T>
where
    T: Copy + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let p2 = [c1.c];
    let p1 = [c1.e, c1.b];
    let p0 = [c1.f, c1.d, c1.a];
    let q2 = [c2.c];
    let q1 = [c2.e, c2.b];
    let q0 = [c2.f, c2.d, c2.a];
    let x = psub(&pmul(&p2, &q0), &pmul(&p0, &q2));
    let y = psub(&pmul(&p2, &q1), &pmul(&p1, &q2));
    let z = psub(&pmul(&p1, &q0), &pmul(&p0, &q1));
    psub(&pmul(&x, &x), &pmul(&y, &z))
}

fn horner(p: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut dv = 0.0;
    for &c in p.iter().rev() {
        dv = dv * x + v;
        v = v * x + c;
    }
    (v, dv)
}

/// All complex roots of a polynomial (ascending coefficients, nonzero lead)
/// by Aberth iteration with a fixed iteration cap.
pub fn poly_roots(p: &[f64]) -> Vec<Complex64> {
    let deg = p.len() - 1;
    let lead = p[deg];
    let monic: Vec<f64> = p.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..deg].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..deg {
            let (mut v, mut dv) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for &c in monic.iter().rev() {
                dv = dv * z[i] + v;
                v = v * z[i] + c;
            }
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulse: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulse);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Roots of a real polynomial (ascending coefficients) with |Im| ≤ `im_tol`,
/// each polished by Newton steps.
pub fn real_roots(p: &[f64], im_tol: f64) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = p.len() - 1;
    while deg > 0 && p[deg].abs() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let mut out: Vec<f64> = poly_roots(&p[..=deg])
        .into_iter()
        .filter(|z| z.re.is_finite() && z.im.abs() <= im_tol * (1.0 + z.re.abs()))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..8 {
                let (v, dv) = horner(&p[..=deg], x);
                if dv == 0.0 {
                    break;
                }
                let step = v / dv;
                if !step.is_finite() {
                    break;
                }
                x -= step;
            }
            x
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    out
}

fn newton2(c1: &Conic<f64>, c2: &Conic<f64>, mut u: f64, mut v: f64) -> (f64, f64) {
    for _ in 0..30 {
        let f1 = c1.eval(u, v);
        let f2 = c2.eval(u, v);
        let j11 = 2.0 * c1.a * u + c1.b * v + c1.d;
        let j12 = c1.b * u + 2.0 * c1.c * v + c1.e;
        let j21 = 2.0 * c2.a * u + c2.b * v + c2.d;
        let j22 = c2.b * u + 2.0 * c2.c * v + c2.e;
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 {
            break;
        }
        let du = (f1 * j22 - f2 * j12) / det;
        let dv = (j11 * f2 - j21 * f1) / det;
        u -= du;
        v -= dv;
        if du.abs() + dv.abs() <= 1e-15 * (1.0 + u.abs() + v.abs()) {
            break;
        }
    }
    (u, v)
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-12 * b * b.max(1.0) {
        return Vec::new();
    }
    let s = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * s);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Real common zeros. `None` when the resultant vanishes identically.
pub fn intersect_f64(c1: &Conic<f64>, c2: &Conic<f64>) -> Option<Vec<(f64, f64)>> {
    if c1.is_pure_squares() && c2.is_pure_squares() {
        let det = c1.a * c2.c - c1.c * c2.a;
        if det == 0.0 {
            return None;
        }
        let uu = (-c1.f * c2.c + c2.f * c1.c) / det;
        let vv = (-c1.a * c2.f + c2.a * c1.f) / det;
        if uu < 0.0 || vv < 0.0 {
            return Some(Vec::new());
        }
        let (u, v) = (uu.sqrt(), vv.sqrt());
        let mut out = Vec::with_capacity(4);
        for su in [-1.0, 1.0] {
            for sv in [-1.0, 1.0] {
                if (u == 0.0 && su < 0.0) || (v == 0.0 && sv < 0.0) {
                    continue;
                }
                out.push((su * u, sv * v));
            }
        }
        return Some(out);
    }
    let res = resultant_in_v(c1, c2);
    let scale = [c1, c2]
        .iter()
        .flat_map(|c| [c.a, c.b, c.c, c.d, c.e, c.f])
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if res.iter().all(|r| r.abs() <= 1e-13 * scale.powi(4).max(1e-300)) {
        return None;
    }
    let mut out: Vec<(f64, f64)> = Vec::new();
    for u in real_roots(&res, 1e-5) {
        let mut vs = quadratic_roots(c1.c, c1.b * u + c1.e, c1.a * u * u + c1.d * u + c1.f);
        vs.extend(quadratic_roots(c2.c, c2.b * u + c2.e, c2.a * u * u + c2.d * u + c2.f));
        for v in vs {
            let (pu, pv) = newton2(c1, c2, u, v);
            let tol = 1e-9 * scale * (1.0 + pu * pu + pv * pv);
            if c1.eval(pu, pv).abs() <= tol && c2.eval(pu, pv).abs() <= tol {
                let dup = out
                    .iter()
                    .any(|&(a, b)| (a - pu).abs() + (b - pv).abs() <= 1e-9 * (1.0 + pu.abs() + pv.abs()));
                if !dup {
                    out.push((pu, pv));
                }
            }
        }
    }
    Some(out)
}

fn eval_i128(p: &[i128], x: i128) -> Option<i128> {
    let mut v: i128 = 0;
    for &c in p.iter().rev() {
        v = v.checked_mul(x)?.checked_add(c)?;
    }
    Some(v)
}

/// Integer roots v of c v² + b v + a0 = 0, or `None` if the polynomial is zero.
fn integer_quadratic_roots(c: i128, b: i128, a0: i128) -> Option<Vec<i128>> {
    if c == 0 {
        if b == 0 {
            return if a0 == 0 { None } else { Some(Vec::new()) };
        }
        return Some(if a0 % b == 0 { vec![-a0 / b] } else { Vec::new() });
    }
    let disc = b.checked_mul(b).and_then(|x| x.checked_sub(4 * c * a0));
    let Some(disc) = disc else { return Some(Vec::new()) };
    if disc < 0 {
        return Some(Vec::new());
    }
    let s = isqrt(disc);
    if s * s != disc {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    for num in [-b + s, -b - s] {
        if num % (2 * c) == 0 {
            out.push(num / (2 * c));
        }
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

/// Integer common zeros with u in [u_lo, u_hi] and v in [v_lo, v_hi].
/// `None` when the system is degenerate and the caller must scan.
pub fn intersect_integer(
    c1: &Conic<i128>,
    c2: &Conic<i128>,
    (u_lo, u_hi): (i128, i128),
    (v_lo, v_hi): (i128, i128),
) -> Option<Vec<(i128, i128)>> {
    let in_box = |u: i128, v: i128| u_lo <= u && u <= u_hi && v_lo <= v && v <= v_hi;
    if c1.is_pure_squares() && c2.is_pure_squares() {
        let det = c1.a * c2.c - c1.c * c2.a;
        if det == 0 {
            return None;
        }
        let nu = -c1.f * c2.c + c2.f * c1.c;
        let nv = -c1.a * c2.f + c2.a * c1.f;
        if nu % det != 0 || nv % det != 0 {
            return Some(Vec::new());
        }
        let (uu, vv) = (nu / det, nv / det);
        if uu < 0 || vv < 0 {
            return Some(Vec::new());
        }
        let (u, v) = (isqrt(uu), isqrt(vv));
        if u * u != uu || v * v != vv {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        for su in [-1, 1] {
            for sv in [-1, 1] {
                if (u == 0 && su < 0) || (v == 0 && sv < 0) {
                    continue;
                }
                if in_box(su * u, sv * v) {
                    out.push((su * u, sv * v));
                }
            }
        }
        return Some(out);
    }
    let res = resultant_in_v(c1, c2);
    if res.iter().all(|r| r.is_zero()) {
        return None;
    }
    let resf: Vec<f64> = res.iter().map(|&r| r as f64).collect();
    let mut us: Vec<i128> = Vec::new();
    for root in real_roots(&resf, 1e-3) {
        if root < u_lo as f64 - 2.0 || root > u_hi as f64 + 2.0 {
            continue;
        }
        let r = root.round() as i128;
        for u in r - 1..=r + 1 {
            if u >= u_lo && u <= u_hi {
                match eval_i128(&res, u) {
                    Some(0) => us.push(u),
                    Some(_) => {}
                    None => return None,
                }
            }
        }
    }
    us.sort_unstable();
    us.dedup();
    let mut out = Vec::new();
    for u in us {
        let a01 = c1.a * u * u + c1.d * u + c1.f;
        let a02 = c2.a * u * u + c2.d * u + c2.f;
        let vs = match integer_quadratic_roots(c1.c, c1.b * u + c1.e, a01) {
            Some(v) => v,
            None => match integer_quadratic_roots(c2.c, c2.b * u + c2.e, a02) {
                Some(v) => v,
                None => (v_lo..=v_hi).collect(),
            },
        };
        for v in vs {
            if in_box(u, v) && c1.eval(u, v) == 0 && c2.eval(u, v) == 0 {
                out.push((u, v));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}
