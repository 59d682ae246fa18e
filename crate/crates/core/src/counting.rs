//! Point counts, the nested delta-method rearrangements and the Poisson step.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arith::{gcd, ramanujan_table, root_table, CompensatedSum};
use crate::bivariate::{intersect_integer, Conic};
use crate::charsum::CharSumConfig;
use crate::delta_kernel::{h_eval_bump, BumpSpec, DeltaKernel};
use crate::error::{Error, Result};
use crate::forms::{IntMatrix, QuadricPair, RealBox};
use crate::integrals::{
    bump_u, singular_integral_coarea, Amplitude, CoareaParams, FftLattice, WeightFunction,
    WeightKind,
};
use crate::local_series::{singular_series, SeriesParams};
use crate::report::{num, ExperimentReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountConfig {
    /// Maximum number of prefixes (or lattice points) an enumeration may visit.
    pub budget: f64,
}

impl Default for CountConfig {
    fn default() -> Self {
        Self { budget: 2e9 }
    }
}

/// Integer ranges covered by B·box.
pub fn integer_box(b: f64, bx: &RealBox) -> Vec<(i64, i64)> {
    let s = bx.scaled(b);
    s.lo.iter()
        .zip(&s.hi)
        .map(|(lo, hi)| ((lo - 1e-9).ceil() as i64, (hi + 1e-9).floor() as i64))
        .collect()
}

fn range_len(r: (i64, i64)) -> f64 {
    (r.1 - r.0 + 1).max(0) as f64
}

fn eval_i(m: &IntMatrix, x: &[i64]) -> i128 {
    let mut s: i128 = 0;
    for (i, row) in m.iter().enumerate() {
        let mut r: i128 = 0;
        for (j, &c) in row.iter().enumerate() {
            r += c as i128 * x[j] as i128;
        }
        s += x[i] as i128 * r;
    }
    s
}

/// Residual conic in the last two coordinates for a fixed prefix.
fn residual_conic(m: &IntMatrix, x: &[i64]) -> Conic<i128> {
    let n = m.len();
    let (u, v) = (n - 2, n - 1);
    let (mut d, mut e, mut f): (i128, i128, i128) = (0, 0, 0);
    for k in 0..u {
        d += 2 * m[u][k] as i128 * x[k] as i128;
        e += 2 * m[v][k] as i128 * x[k] as i128;
        for l in 0..u {
            f += m[k][l] as i128 * x[k] as i128 * x[l] as i128;
        }
    }
    Conic { a: m[u][u] as i128, b: 2 * m[u][v] as i128, c: m[v][v] as i128, d, e, f }
}

/// Visits every integer zero of Q1 = Q2 = 0 in the box, one accumulator per
/// value of the leading coordinate (per box for n = 2), in ascending order.
pub fn visit_zeros<T, F>(pair: &QuadricPair, ibox: &[(i64, i64)], cfg: &CountConfig, make: impl Fn() -> T + Sync, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut T, &[i64]) + Sync,
{
    let n = pair.n();
    if ibox.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ibox.len() });
    }
    if n < 2 {
        return Err(Error::InvalidInput("need n ≥ 2".into()));
    }
    if ibox.iter().any(|r| r.1 < r.0) {
        return Ok(Vec::new());
    }
    let prefix_work: f64 = ibox[..n - 2].iter().map(|&r| range_len(r)).product();
    check(prefix_work, cfg)?;
    let (ur, vr) = (ibox[n - 2], ibox[n - 1]);
    let diag = pair.is_diagonal();
    let (a, bb) = (pair.q1.diag(), pair.q2.diag());

    let solve_prefix = |x: &mut Vec<i64>, acc: &mut T| {
        let c1 = residual_conic(&pair.q1.matrix, x);
        let c2 = residual_conic(&pair.q2.matrix, x);
        match intersect_integer(&c1, &c2, (ur.0 as i128, ur.1 as i128), (vr.0 as i128, vr.1 as i128)) {
            Some(points) => {
                for (u, v) in points {
                    x[n - 2] = u as i64;
                    x[n - 1] = v as i64;
                    f(acc, x);
                }
            }
            None => {
                for u in ur.0..=ur.1 {
                    for v in vr.0..=vr.1 {
                        x[n - 2] = u;
                        x[n - 1] = v;
                        if eval_i(&pair.q1.matrix, x) == 0 && eval_i(&pair.q2.matrix, x) == 0 {
                            f(acc, x);
                        }
                    }
                }
            }
        }
    };

    // Diagonal pairs: the residual system is linear in (u², v²).
    let solve_diag = |x: &mut Vec<i64>, s1: i128, s2: i128, acc: &mut T| {
        let (au, av, bu, bv) = (a[n - 2] as i128, a[n - 1] as i128, bb[n - 2] as i128, bb[n - 1] as i128);
        let det = au * bv - av * bu;
        if det == 0 {
            solve_prefix(x, acc);
            return;
        }
        let nu = -s1 * bv + av * s2;
        let nv = -au * s2 + bu * s1;
        if nu % det != 0 || nv % det != 0 {
            return;
        }
        let (uu, vv) = (nu / det, nv / det);
        if uu < 0 || vv < 0 {
            return;
        }
        let (Some(u), Some(v)) = (crate::arith::is_square(uu), crate::arith::is_square(vv)) else { return };
        for su in [1i128, -1] {
            if u == 0 && su < 0 {
                continue;
            }
            let uu = (su * u) as i64;
            if uu < ur.0 || uu > ur.1 {
                continue;
            }
            for sv in [1i128, -1] {
                if v == 0 && sv < 0 {
                    continue;
                }
                let vv = (sv * v) as i64;
                if vv < vr.0 || vv > vr.1 {
                    continue;
                }
                x[n - 2] = uu;
                x[n - 1] = vv;
                f(acc, x);
            }
        }
    };

    if n == 2 {
        let mut acc = make();
        let mut x = vec![0i64; 2];
        if diag {
            solve_diag(&mut x, 0, 0, &mut acc);
        } else {
            solve_prefix(&mut x, &mut acc);
        }
        return Ok(vec![acc]);
    }

    let slabs: Vec<i64> = (ibox[0].0..=ibox[0].1).collect();
    let out = slabs
        .par_iter()
        .map(|&x0| {
            let mut acc = make();
            let mut x = vec![0i64; n];
            x[0] = x0;
            let depth = n - 2;
            // Odometer over coordinates 1..depth with running diagonal sums.
            let mut idx: Vec<i64> = (0..depth).map(|k| ibox[k].0).collect();
            idx[0] = x0;
            loop {
                x[..depth].copy_from_slice(&idx);
                if diag {
                    let mut s1: i128 = 0;
                    let mut s2: i128 = 0;
                    for k in 0..depth {
                        let sq = x[k] as i128 * x[k] as i128;
                        s1 += a[k] as i128 * sq;
                        s2 += bb[k] as i128 * sq;
                    }
                    solve_diag(&mut x, s1, s2, &mut acc);
                } else {
                    solve_prefix(&mut x, &mut acc);
                }
                let mut k = depth - 1;
                loop {
                    if k == 0 {
                        return acc;
                    }
                    idx[k] += 1;
                    if idx[k] <= ibox[k].1 {
                        break;
                    }
                    idx[k] = ibox[k].0;
                    k -= 1;
                }
            }
        })
        .collect();
    Ok(out)
}

fn check(work: f64, cfg: &CountConfig) -> Result<()> {
    if work > cfg.budget {
        Err(Error::WorkBudgetExceeded { needed: work, budget: cfg.budget })
    } else {
        Ok(())
    }
}

/// #{m ∈ ℤⁿ ∩ B·box : Q1(m) = Q2(m) = 0}.
pub fn exact_count(pair: &QuadricPair, b: f64, bx: &RealBox, cfg: &CountConfig) -> Result<u64> {
    let ibox = integer_box(b, bx);
    Ok(visit_zeros(pair, &ibox, cfg, || 0u64, |c, _| *c += 1)?.into_iter().sum())
}

/// The zeros themselves, in lexicographic order.
pub fn zeros_in_box(pair: &QuadricPair, b: f64, bx: &RealBox, cfg: &CountConfig) -> Result<Vec<Vec<i64>>> {
    let ibox = integer_box(b, bx);
    let mut out: Vec<Vec<i64>> = visit_zeros(pair, &ibox, cfg, Vec::new, |v: &mut Vec<Vec<i64>>, x| v.push(x.to_vec()))?
        .into_iter()
        .flatten()
        .collect();
    out.sort();
    Ok(out)
}

/// Σ_{Q1(m) = Q2(m) = 0} W(m/B).
pub fn weighted_count(pair: &QuadricPair, b: f64, w: &WeightFunction, cfg: &CountConfig) -> Result<f64> {
    let ibox = integer_box(b, &w.support());
    let n = pair.n();
    let parts = visit_zeros(pair, &ibox, cfg, || 0.0f64, |s, x| {
        let y: Vec<f64> = x.iter().map(|&v| v as f64 / b).collect();
        debug_assert_eq!(y.len(), n);
        *s += w.eval(&y);
    })?;
    Ok(parts.into_iter().sum())
}

/// Every lattice point of the box with its form values and weight (W > 0 only).
struct LatticePoint {
    q1: i128,
    q2: i128,
    w: f64,
}

fn weighted_lattice(pair: &QuadricPair, b: f64, w: &WeightFunction, cfg: &CountConfig) -> Result<Vec<LatticePoint>> {
    let ibox = integer_box(b, &w.support());
    let n = pair.n();
    let total: f64 = ibox.iter().map(|&r| range_len(r)).product();
    check(total, cfg)?;
    let mut out = Vec::new();
    let mut idx: Vec<i64> = ibox.iter().map(|r| r.0).collect();
    if ibox.iter().any(|r| r.1 < r.0) {
        return Ok(out);
    }
    loop {
        let y: Vec<f64> = idx.iter().map(|&v| v as f64 / b).collect();
        let wv = w.eval(&y);
        if wv != 0.0 {
            out.push(LatticePoint {
                q1: eval_i(&pair.q1.matrix, &idx),
                q2: eval_i(&pair.q2.matrix, &idx),
                w: wv,
            });
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] <= ibox[k].1 {
                break;
            }
            idx[k] = ibox[k].0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    pub level: u8,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "c_B")]
    pub c_b: f64,
    #[serde(rename = "c_sqrtB")]
    pub c_sqrt_b: Option<f64>,
    /// Largest q1 that can contribute: max(B, 2 max|Q1(m)|/B) + 1.
    pub q1_cutoff: u64,
    /// Largest q2 that can contribute: 4√B (level 2).
    pub q2_cutoff: Option<u64>,
    /// c1 = 1 + sup|Q1| on supp W.
    pub nominal_c1: f64,
    pub per_q1: Vec<(u64, f64)>,
    pub per_q1q2: Vec<(u64, u64, f64)>,
    pub total: f64,
    /// Contribution from q1 > c1 B or q2 > 2√B.
    pub mass_beyond_nominal_cutoffs: f64,
}

/// The level-1 or level-2 nested rearrangement of Σ_m W(m/B) δ(Q1(m)) δ(Q2(m)).
pub fn nested_count(pair: &QuadricPair, b: f64, w: &WeightFunction, level: u8, cfg: &CountConfig) -> Result<DecompositionTrace> {
    if !(level == 1 || level == 2) {
        return Err(Error::InvalidInput(format!("level must be 1 or 2, got {level}")));
    }
    if b <= 1.0 {
        return Err(Error::InvalidInput("B must exceed 1".into()));
    }
    let kb = DeltaKernel::new(b)?;
    let bump = kb.bump;
    let sup = w.support();
    let lattice = weighted_lattice(pair, b, w, cfg)?;
    let b2 = b * b;
    let max_q1 = lattice.iter().map(|p| p.q1.unsigned_abs()).max().unwrap_or(0) as f64;
    let q1_cutoff = b.max(2.0 * max_q1 / b).floor() as u64 + 1;
    let nominal_c1 = 1.0 + sup.sup_abs_form(&pair.q1, 16).max(max_q1 / b2);
    let h1 = |q1: u64, v: i128| h_eval_bump(&bump, q1 as f64 / b, v as f64 / b2);

    if level == 1 {
        let zeros: Vec<&LatticePoint> = lattice.iter().filter(|p| p.q2 == 0).collect();
        let mut per_q1 = Vec::new();
        let mut total = CompensatedSum::new();
        let mut beyond = 0.0;
        for q1 in 1..=q1_cutoff {
            let ram = ramanujan_table(q1);
            let mut s = CompensatedSum::new();
            for p in &zeros {
                let hv = h1(q1, p.q1);
                if hv != 0.0 {
                    s.add_real(ram[p.q1.rem_euclid(q1 as i128) as usize] as f64 * hv * p.w);
                }
            }
            let v = kb.c_q / b2 * s.value().re;
            total.add_real(v);
            if q1 as f64 > nominal_c1 * b {
                beyond += v;
            }
            per_q1.push((q1, v));
        }
        return Ok(DecompositionTrace {
            level,
            b,
            c_b: kb.c_q,
            c_sqrt_b: None,
            q1_cutoff,
            q2_cutoff: None,
            nominal_c1,
            per_q1,
            per_q1q2: Vec::new(),
            total: total.value().re,
            mass_beyond_nominal_cutoffs: beyond,
        });
    }

    let rb = b.sqrt();
    let ks = DeltaKernel::new(rb)?;
    let q2_cutoff = (4.0 * rb).floor() as u64 + 1;
    let pref = kb.c_q * ks.c_q / (b2 * b);
    let rows: Vec<(u64, Vec<f64>)> = (1..=q1_cutoff)
        .into_par_iter()
        .map(|q1| {
            let ram1 = ramanujan_table(q1);
            let qi = q1 as i128;
            let pts: Vec<(f64, f64, f64)> = lattice
                .iter()
                .filter(|p| p.q2 % qi == 0)
                .filter_map(|p| {
                    let z = p.q2 as f64 / (q1 as f64 * b);
                    let u = bump_u(z);
                    if u == 0.0 {
                        return None;
                    }
                    let hv = h1(q1, p.q1);
                    if hv == 0.0 {
                        return None;
                    }
                    let c1 = ram1[p.q1.rem_euclid(qi) as usize] as f64;
                    Some((c1 * hv * u * p.w, z, (p.q2 / qi) as f64))
                })
                .collect();
            let sums: Vec<f64> = (1..=q2_cutoff)
                .map(|q2| {
                    let ram2 = ramanujan_table(q2);
                    let mut s = CompensatedSum::new();
                    for &(amp, z, n2) in &pts {
                        let h2 = h_eval_bump(&bump, q2 as f64 / rb, z);
                        if h2 != 0.0 {
                            s.add_real(amp * h2 * ram2[(n2 as i128).rem_euclid(q2 as i128) as usize] as f64);
                        }
                    }
                    pref * s.value().re
                })
                .collect();
            (q1, sums)
        })
        .collect();
    let mut per_q1 = Vec::new();
    let mut per_q1q2 = Vec::new();
    let mut total = CompensatedSum::new();
    let mut beyond = 0.0;
    for (q1, sums) in rows {
        let mut row = 0.0;
        for (k, v) in sums.into_iter().enumerate() {
            let q2 = k as u64 + 1;
            per_q1q2.push((q1, q2, v));
            row += v;
            total.add_real(v);
            if q1 as f64 > nominal_c1 * b || q2 as f64 > 2.0 * rb {
                beyond += v;
            }
        }
        per_q1.push((q1, row));
    }
    Ok(DecompositionTrace {
        level,
        b,
        c_b: kb.c_q,
        c_sqrt_b: Some(ks.c_q),
        q1_cutoff,
        q2_cutoff: Some(q2_cutoff),
        nominal_c1,
        per_q1,
        per_q1q2,
        total: total.value().re,
        mass_beyond_nominal_cutoffs: beyond,
    })
}

/// Residues x mod q with Q(x) ≡ 0, by CRT from prime-power enumerations.
pub fn congruence_residues(m: &IntMatrix, q: u64) -> Vec<Vec<i64>> {
    let n = m.len();
    let f = crate::arith::factorize(q);
    let mut acc: Vec<Vec<i64>> = vec![vec![0; n]];
    let mut modulus: i64 = 1;
    for (p, e) in f.factors.iter().copied() {
        let pe = p.pow(e) as i64;
        let local: Vec<Vec<i64>> = (0..pe.pow(n as u32))
            .filter_map(|idx| {
                let mut x = vec![0i64; n];
                let mut t = idx;
                for slot in x.iter_mut() {
                    *slot = t % pe;
                    t /= pe;
                }
                (eval_i(m, &x).rem_euclid(pe as i128) == 0).then_some(x)
            })
            .collect();
        let inv = crate::arith::inv_mod(modulus, pe as u64).expect("coprime moduli") as i64;
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for a in &acc {
            for l in &local {
                // x ≡ a mod modulus, x ≡ l mod pe.
                let x: Vec<i64> = a
                    .iter()
                    .zip(l)
                    .map(|(&ai, &li)| {
                        let t = ((li - ai).rem_euclid(pe) * inv).rem_euclid(pe);
                        ai + modulus * t
                    })
                    .collect();
                next.push(x);
            }
        }
        acc = next;
        modulus *= pe;
    }
    acc.sort();
    acc
}

/// Lattice points of the integer box with q | Q(m), lifted from residues.
pub fn congruence_filter(m: &IntMatrix, q: u64, ibox: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let qi = q as i64;
    let mut out = Vec::new();
    for r in congruence_residues(m, q) {
        let starts: Vec<i64> = r.iter().zip(ibox).map(|(&ri, &(lo, _))| lo + (ri - lo).rem_euclid(qi)).collect();
        if starts.iter().zip(ibox).any(|(&v, &(_, hi))| v > hi) {
            continue;
        }
        let mut x = starts.clone();
        'lift: loop {
            out.push(x.clone());
            let mut k = x.len();
            loop {
                if k == 0 {
                    break 'lift;
                }
                k -= 1;
                x[k] += qi;
                if x[k] <= ibox[k].1 {
                    break;
                }
                x[k] = starts[k];
            }
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonCheck {
    pub direct: Complex64,
    pub dual: Complex64,
    /// |dual(grid) − dual(grid/2)| at the same truncation.
    pub quadrature_error: f64,
    /// |dual(M) − dual(⌊M/2⌋)|.
    pub truncation_tail: f64,
    pub m_max: i64,
    pub grid: usize,
}

impl PoissonCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.direct - self.dual).norm() / self.direct.norm().max(1e-300)
    }
}

/// Default dual truncation H √B log B.
pub fn default_truncation(w: &WeightFunction, b: f64) -> Result<i64> {
    if !w.sharpness_h.is_finite() {
        return Err(Error::InvalidInput("sharp weights need an explicit truncation".into()));
    }
    Ok((w.sharpness_h * b.sqrt() * b.ln()).ceil() as i64)
}

/// N(a, q; B) = Σ_{q1 | Q2(m)} e_{q1q2}(a1 q2 Q1(m) + a2 Q2(m)) F(m/B), directly and
/// as (B/(q1q2))ⁿ Σ_{|m_i| ≤ M} I_{q1,q2}(m) Σ_{b mod q1q2, q1 | Q2(b)} e_{q1q2}(a1 q2 Q1(b) + a2 Q2(b) + b.m).
/// I is evaluated with the FFT trapezoidal rule on `grid` points per axis.
#[allow(clippy::too_many_arguments)]
pub fn poisson_check(
    pair: &QuadricPair,
    (q1, q2): (u64, u64),
    (a1, a2): (i64, i64),
    b: f64,
    w: &WeightFunction,
    bump: &BumpSpec,
    m_max: Option<i64>,
    grid: usize,
) -> Result<PoissonCheck> {
    let n = pair.n();
    if n > 3 {
        return Err(Error::InvalidInput(format!("Poisson check supports n ≤ 3, got {n}")));
    }
    if gcd(a1.rem_euclid(q1 as i64) as u64, q1) != 1 || gcd(a2.rem_euclid(q2 as i64) as u64, q2) != 1 {
        return Err(Error::InvalidInput("need gcd(a1, q1) = gcd(a2, q2) = 1".into()));
    }
    let big_n = q1 * q2;
    let nn = big_n as i64;
    let amp = Amplitude { pair, bump: *bump, weight: w, q1, q2, b };
    let roots = root_table(big_n);
    let phase = |v1: i128, v2: i128| -> Complex64 {
        let t = (a1 as i128 * q2 as i128 * v1 + a2 as i128 * v2).rem_euclid(nn as i128);
        roots[t as usize]
    };

    let ibox = integer_box(b, &w.support());
    let lattice_size: f64 = ibox.iter().map(|&r| range_len(r)).product();
    check(lattice_size, &CountConfig::default())?;
    let mut direct = Complex64::new(0.0, 0.0);
    let mut idx: Vec<i64> = ibox.iter().map(|r| r.0).collect();
    'outer: loop {
        let v2 = eval_i(&pair.q2.matrix, &idx);
        if v2 % q1 as i128 == 0 {
            let y: Vec<f64> = idx.iter().map(|&v| v as f64 / b).collect();
            let f = amp.eval(&y);
            if f != 0.0 {
                direct += phase(eval_i(&pair.q1.matrix, &idx), v2) * f;
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] <= ibox[k].1 {
                break;
            }
            idx[k] = ibox[k].0;
        }
    }

    let m_max = match m_max {
        Some(m) => m,
        None => default_truncation(w, b)?,
    };
    let scale = b / big_n as f64;
    let sup = w.support();
    let f = |y: &[f64]| amp.eval(y);
    let fine = FftLattice::new(f, &sup, scale, grid)?;
    let coarse = FftLattice::new(f, &sup, scale, grid / 2)?;
    if m_max > coarse.m_band {
        return Err(Error::QuadratureNotConverged { estimate: f64::NAN });
    }

    let mut residues: Vec<(Vec<i64>, Complex64)> = Vec::new();
    for t in 0..big_n.pow(n as u32) {
        let mut x = vec![0i64; n];
        let mut r = t;
        for slot in x.iter_mut() {
            *slot = (r % big_n) as i64;
            r /= big_n;
        }
        let v2 = eval_i(&pair.q2.matrix, &x);
        if v2 % q1 as i128 == 0 {
            let ph = phase(eval_i(&pair.q1.matrix, &x), v2);
            residues.push((x, ph));
        }
    }
    let side = (2 * m_max + 1) as usize;
    let half = m_max / 2;
    let zero = Complex64::new(0.0, 0.0);
    let (d_fine, d_coarse, d_half) = (0..side.pow(n as u32))
        .into_par_iter()
        .map(|k| {
            let mut m = vec![0i64; n];
            let mut r = k;
            for i in (0..n).rev() {
                m[i] = (r % side) as i64 - m_max;
                r /= side;
            }
            let mut s = zero;
            for (x, ph) in &residues {
                let lin: i64 = x.iter().zip(&m).map(|(a, b)| a * b).sum::<i64>().rem_euclid(nn);
                s += ph * roots[lin as usize];
            }
            let tf = fine.get(&m) * s;
            let inner = m.iter().all(|v| v.abs() <= half);
            (tf, coarse.get(&m) * s, if inner { tf } else { zero })
        })
        .reduce(|| (zero, zero, zero), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let pre = scale.powi(n as i32);
    Ok(PoissonCheck {
        direct,
        dual: d_fine * pre,
        quadrature_error: ((d_fine - d_coarse) * pre).norm(),
        truncation_tail: ((d_fine - d_half) * pre).norm(),
        m_max,
        grid,
    })
}

/// Table of (B, N(B), 𝔖 J0 B^{n−4}, ratio).
pub fn asymptotic_report(
    pair: &QuadricPair,
    w: &WeightFunction,
    b_list: &[f64],
    series: &SeriesParams,
    integral: &CoareaParams,
    cs_cfg: &CharSumConfig,
    count_cfg: &CountConfig,
) -> Result<ExperimentReport> {
    let n = pair.n() as i32;
    let ss = singular_series(pair, series, cs_cfg)?;
    let j0 = singular_integral_coarea(pair, w, integral)?;
    let mut rep = ExperimentReport::new("asymptotic", &["B", "N_B", "main_term", "ratio"]);
    for &b in b_list {
        let count = if w.kind == WeightKind::SharpBox {
            exact_count(pair, b, &w.bx, count_cfg)? as f64
        } else {
            weighted_count(pair, b, w, count_cfg)?
        };
        let main = ss.value * j0.value * b.powi(n - 4);
        rep.push(vec![num(b), num(count), num(main), num(count / main)]);
    }
    rep.set("singular_series", num(ss.value));
    rep.set("singular_series_descending", num(ss.value_descending));
    rep.set("singular_series_tail_heuristic", num(ss.tail_heuristic));
    rep.set("J0", num(j0.value));
    rep.set("J0_refinement_error", num(j0.stderr));
    for wmsg in &ss.warnings {
        rep.warn(wmsg.clone());
    }
    rep.metadata.config = json!({
        "pair": pair.spec(),
        "weight": w,
        "B_list": b_list,
        "series": series,
        "integral": integral,
        "budget": cs_cfg.budget,
        "count_budget": count_cfg.budget,
    });
    Ok(rep)
}
