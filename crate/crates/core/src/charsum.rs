//! The complete character sums C_{q1,q2}(m) and S_{q1,q2}(m).
//!
//! Both sums have their a-sums collapsed into Ramanujan sums:
//!
//! C_{q1,q2}(m) = Σ_{b mod q1q2, q1 | Q2(b)} c_{q1}(Q1(b)) c_{q2}(Q2(b)/q1) e(b.m / q1q2)
//! S_{q1,q2}(m) = Σ_{b mod q1q2, q1 | Q1(b), q1 | Q2(b)} c_{q2}(Q2(b)/q1) e(b.m / q1q2)

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use rustfft::FftPlanner;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::HashMap;

use crate::arith::{
    factorize, gcd, legendre, ramanujan_sum, ramanujan_table, root_table, twisted_gauss_sum, Eps,
};
use crate::error::{Error, Result};
use crate::forms::QuadricPair;
use crate::local_series::HenselCounter;
use crate::report::{num, ExperimentReport};

pub const DEFAULT_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    PrimePowerRecursion,
    ClosedForm,
    Multiplicative,
    /// Zero frequency at a good prime, from Hensel-lifted congruence counts.
    HenselCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharSumValue {
    pub value: f64,
    pub imag_residual: f64,
    pub method: Method,
    pub q1: u64,
    pub q2: u64,
    pub m: Vec<i64>,
}

impl CharSumValue {
    fn from_complex(z: Complex64, method: Method, q1: u64, q2: u64, m: &[i64]) -> Self {
        Self { value: z.re, imag_residual: z.im, method, q1, q2, m: m.to_vec() }
    }

    pub fn is_real(&self) -> bool {
        self.imag_residual.abs() <= 1e-6 * (1.0 + self.value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharSumConfig {
    /// Maximum number of elementary terms a single evaluation may touch.
    pub budget: f64,
}

impl Default for CharSumConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    C,
    S,
}

fn check_budget(needed: f64, cfg: &CharSumConfig) -> Result<()> {
    if needed > cfg.budget {
        Err(Error::WorkBudgetExceeded { needed, budget: cfg.budget })
    } else {
        Ok(())
    }
}

/// Direct enumeration over b mod q1q2, for several frequency vectors at once.
fn enumerate_sums(
    pair: &QuadricPair,
    q1: u64,
    q2: u64,
    ms: &[Vec<i64>],
    kind: Kind,
    cfg: &CharSumConfig,
) -> Result<Vec<Complex64>> {
    let n = pair.n();
    let big_n = q1 * q2;
    check_budget((big_n as f64).powi(n as i32), cfg)?;
    let nn = big_n as i64;
    let ram1 = ramanujan_table(q1);
    let ram2 = ramanujan_table(q2);
    let roots = root_table(big_n);
    let m1 = &pair.q1.matrix;
    let m2 = &pair.q2.matrix;
    let last = n - 1;
    let mred: Vec<Vec<i64>> = ms
        .iter()
        .map(|m| m.iter().map(|&x| x.rem_euclid(nn)).collect())
        .collect();

    let prefix_count = big_n.pow(last as u32);
    let slab = |start: u64, end: u64| -> Vec<Complex64> {
        let mut acc = vec![Complex64::zero(); ms.len()];
        let mut b = vec![0i64; n];
        for idx in start..end {
            let mut t = idx;
            for k in 0..last {
                b[k] = (t % big_n) as i64;
                t /= big_n;
            }
            // Prefix parts of Q(b) with b[last] = x: Q = pre + 2 lin x + d x^2.
            let (mut pre1, mut pre2, mut lin1, mut lin2) = (0i64, 0i64, 0i64, 0i64);
            for i in 0..last {
                pre1 += m1[i][i] * b[i] * b[i];
                pre2 += m2[i][i] * b[i] * b[i];
                for j in i + 1..last {
                    pre1 += 2 * m1[i][j] * b[i] * b[j];
                    pre2 += 2 * m2[i][j] * b[i] * b[j];
                }
                lin1 += m1[i][last] * b[i];
                lin2 += m2[i][last] * b[i];
            }
            pre1 = pre1.rem_euclid(nn);
            pre2 = pre2.rem_euclid(nn);
            lin1 = lin1.rem_euclid(nn);
            lin2 = lin2.rem_euclid(nn);
            let dots: Vec<i64> = mred
                .iter()
                .map(|m| (0..last).map(|k| m[k] * b[k]).sum::<i64>().rem_euclid(nn))
                .collect();
            let d1 = m1[last][last].rem_euclid(nn);
            let d2 = m2[last][last].rem_euclid(nn);
            for x in 0..nn {
                let v2 = (pre2 + (2 * lin2 + d2 * x) % nn * x).rem_euclid(nn);
                if v2 as u64 % q1 != 0 {
                    continue;
                }
                let v1 = (pre1 + (2 * lin1 + d1 * x) % nn * x).rem_euclid(nn);
                let w = match kind {
                    Kind::C => ram1[(v1 as u64 % q1) as usize] * ram2[((v2 as u64 / q1) % q2) as usize],
                    Kind::S => {
                        if v1 as u64 % q1 != 0 {
                            continue;
                        }
                        ram2[((v2 as u64 / q1) % q2) as usize]
                    }
                };
                if w == 0 {
                    continue;
                }
                let wf = w as f64;
                for (k, m) in mred.iter().enumerate() {
                    let ph = (dots[k] + m[last] * x) % nn;
                    acc[k] += roots[ph as usize] * wf;
                }
            }
        }
        acc
    };

    let chunks: Vec<(u64, u64)> = {
        let step = (prefix_count / 256).max(1);
        let mut v = Vec::new();
        let mut s = 0;
        while s < prefix_count {
            v.push((s, (s + step).min(prefix_count)));
            s += step;
        }
        v
    };
    let parts: Vec<Vec<Complex64>> = chunks.par_iter().map(|&(s, e)| slab(s, e)).collect();
    let mut total = vec![Complex64::zero(); ms.len()];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    Ok(total)
}

/// Table of G(A) = Σ_{x mod N} e_N(A x^2 + m x) for A in 0..N: bin e_N(m x) by
/// x^2 mod N, then one inverse DFT.
fn gauss1_table(big_n: u64, m: i64, roots: &[Complex64]) -> Vec<Complex64> {
    let nn = big_n as i64;
    let m = m.rem_euclid(nn);
    let mut buf = vec![Complex64::zero(); big_n as usize];
    for x in 0..nn {
        buf[(x * x % nn) as usize] += roots[(m * x % nn) as usize];
    }
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// Gauss-factorised evaluation for diagonal pairs. The congruence q1 | Q2(b)
/// (and q1 | Q1(b) for S) is detected with additive characters, after which
/// the b-sum splits into one-dimensional Gauss sums:
///
/// C = q1^-1 Σ*_{a1 mod q1} Σ_{c mod N, (c,q2)=1} Π_i G(a1 q2 λ1_i + c λ2_i, m_i)
/// S = q1^-2 Σ_{t mod q1}   Σ_{c mod N, (c,q2)=1} Π_i G(t q2 λ1_i + c λ2_i, m_i)
fn diagonal_sum(
    pair: &QuadricPair,
    q1: u64,
    q2: u64,
    m: &[i64],
    kind: Kind,
    cfg: &CharSumConfig,
) -> Result<Complex64> {
    let n = pair.n();
    let big_n = q1 * q2;
    let nn = big_n as i64;
    let l1 = pair.q1.diag();
    let l2 = pair.q2.diag();
    let mut distinct: Vec<i64> = m.iter().map(|x| x.rem_euclid(nn)).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let nf = big_n as f64;
    let outer_len = if distinct == [0] { 4.0 * (q1 as f64).log2().max(1.0) } else { q1 as f64 };
    let cost = nf * nf.log2().max(1.0) * distinct.len() as f64 + outer_len * nf * n as f64;
    check_budget(cost, cfg)?;
    let roots = root_table(big_n);
    let tables: HashMap<i64, Vec<Complex64>> = distinct
        .par_iter()
        .map(|&mi| (mi, gauss1_table(big_n, mi, &roots)))
        .collect();
    let cols: Vec<&Vec<Complex64>> = m.iter().map(|x| &tables[&x.rem_euclid(nn)]).collect();
    let outer: Vec<i64> = match kind {
        Kind::C => (0..q1.max(1))
            .filter(|&a| q1 == 1 || gcd(a, q1) == 1)
            .map(|a| a as i64)
            .collect(),
        Kind::S => (0..q1 as i64).collect(),
    };
    // With m ≡ 0 each G is constant on A·(unit)^2, and c -> c u^2 permutes the
    // inner range, so the outer sum only sees orbits of unit squares.
    let outer = if distinct == [0] { square_orbits(&outer, q1) } else { outer.into_iter().map(|a| (a, 1.0)).collect() };
    let units2: Vec<i64> = (0..nn).filter(|&c| gcd(c as u64, q2) == 1).collect();
    let q2i = q2 as i64;
    let total: Complex64 = outer
        .par_iter()
        .map(|&(a, weight)| {
            let mut s = Complex64::zero();
            for &c in &units2 {
                let mut prod = Complex64::new(1.0, 0.0);
                for i in 0..n {
                    let coef = (a * q2i % nn * l1[i].rem_euclid(nn) + c * l2[i].rem_euclid(nn)) % nn;
                    prod *= cols[i][coef as usize];
                }
                s += prod;
            }
            s * weight
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let norm = match kind {
        Kind::C => q1 as f64,
        Kind::S => (q1 * q1) as f64,
    };
    Ok(total / norm)
}

/// Representatives of `set` (closed under unit squares mod q) with orbit sizes.
fn square_orbits(set: &[i64], q: u64) -> Vec<(i64, f64)> {
    let qi = q as i64;
    if q <= 2 {
        return set.iter().map(|&a| (a, 1.0)).collect();
    }
    let mut squares: Vec<i64> = (1..qi).filter(|&u| gcd(u as u64, q) == 1).map(|u| u * u % qi).collect();
    squares.sort_unstable();
    squares.dedup();
    let mut seen = vec![false; q as usize];
    let mut out = Vec::new();
    for &a in set {
        if seen[a as usize] {
            continue;
        }
        let mut size = 0.0;
        for &s in &squares {
            let b = (a * s % qi) as usize;
            if !seen[b] {
                seen[b] = true;
                size += 1.0;
            }
        }
        out.push((a, size));
    }
    out
}

fn evaluate(pair: &QuadricPair, q1: u64, q2: u64, m: &[i64], kind: Kind, cfg: &CharSumConfig) -> Result<Complex64> {
    if m.len() != pair.n() {
        return Err(Error::DimensionMismatch { expected: pair.n(), got: m.len() });
    }
    if q1 == 0 || q2 == 0 {
        return Err(Error::InvalidInput("moduli must be positive".into()));
    }
    if pair.is_diagonal() {
        diagonal_sum(pair, q1, q2, m, kind, cfg)
    } else {
        Ok(enumerate_sums(pair, q1, q2, &[m.to_vec()], kind, cfg)?[0])
    }
}

/// C_{q1,q2}(m) directly from its definition (a-sums collapsed to Ramanujan sums).
pub fn c_bruteforce(pair: &QuadricPair, q1: u64, q2: u64, m: &[i64], cfg: &CharSumConfig) -> Result<CharSumValue> {
    let z = evaluate(pair, q1, q2, m, Kind::C, cfg)?;
    Ok(CharSumValue::from_complex(z, Method::Brute, q1, q2, m))
}

/// Several frequencies in one enumeration pass (non-diagonal pairs benefit).
pub fn c_bruteforce_many(
    pair: &QuadricPair,
    q1: u64,
    q2: u64,
    ms: &[Vec<i64>],
    cfg: &CharSumConfig,
) -> Result<Vec<CharSumValue>> {
    if pair.is_diagonal() {
        return ms.iter().map(|m| c_bruteforce(pair, q1, q2, m, cfg)).collect();
    }
    let zs = enumerate_sums(pair, q1, q2, ms, Kind::C, cfg)?;
    Ok(zs
        .into_iter()
        .zip(ms)
        .map(|(z, m)| CharSumValue::from_complex(z, Method::Brute, q1, q2, m))
        .collect())
}

pub fn s_bruteforce(pair: &QuadricPair, q1: u64, q2: u64, m: &[i64], cfg: &CharSumConfig) -> Result<CharSumValue> {
    let z = evaluate(pair, q1, q2, m, Kind::S, cfg)?;
    Ok(CharSumValue::from_complex(z, Method::Brute, q1, q2, m))
}

pub fn s_bruteforce_many(
    pair: &QuadricPair,
    q1: u64,
    q2: u64,
    ms: &[Vec<i64>],
    cfg: &CharSumConfig,
) -> Result<Vec<CharSumValue>> {
    if pair.is_diagonal() {
        return ms.iter().map(|m| s_bruteforce(pair, q1, q2, m, cfg)).collect();
    }
    let zs = enumerate_sums(pair, q1, q2, ms, Kind::S, cfg)?;
    Ok(zs
        .into_iter()
        .zip(ms)
        .map(|(z, m)| CharSumValue::from_complex(z, Method::Brute, q1, q2, m))
        .collect())
}

/// S with rational arguments: zero unless q1, q2 are positive integers and m
/// is integral.
pub fn s_rational(
    pair: &QuadricPair,
    q1: Rational64,
    q2: Rational64,
    m: &[Rational64],
    cfg: &CharSumConfig,
) -> Result<CharSumValue> {
    let integral = |r: &Rational64| r.is_integer();
    let mi: Vec<i64> = m.iter().map(|r| r.to_integer()).collect();
    if !integral(&q1) || !integral(&q2) || *q1.numer() < 1 || *q2.numer() < 1 || !m.iter().all(integral) {
        return Ok(CharSumValue {
            value: 0.0,
            imag_residual: 0.0,
            method: Method::Brute,
            q1: 0,
            q2: 0,
            m: mi,
        });
    }
    s_bruteforce(pair, q1.to_integer() as u64, q2.to_integer() as u64, &mi, cfg)
}

/// Closed form for C_{1,p^l}(m), available when p ∤ 2 det M2.
pub fn closed_form_c(pair: &QuadricPair, p: u64, l: u32, m: &[i64]) -> Option<Complex64> {
    if p == 2 || pair.det_m2 % p as i64 == 0 {
        return None;
    }
    let n = pair.n() as u32;
    let q = p.pow(l);
    let qs = pair.adjoint_value(m);
    let qs_red = qs.rem_euclid(q as i128) as i64;
    let eps = Eps::of(p).complex();
    let pow = (p as f64).powf((n * l) as f64 / 2.0);
    let chi = |a: i64| legendre(a, p) as f64;
    let z = if n % 2 == 0 {
        eps.powu(n * l) * chi(pair.det_m2).powi(l as i32) * pow * ramanujan_sum(q, qs_red) as f64
    } else if l % 2 == 0 {
        Complex64::new(pow * ramanujan_sum(q, qs_red) as f64, 0.0)
    } else {
        eps.powu(n) * chi(-1) * pow * twisted_gauss_sum(p, l, qs_red).complex()
    };
    Some(z)
}

/// The three terms of the prime-power identity
/// C = p^r S_{p^r,p^l}(m) − p^{r−2} S_{p^{r−1},p^{l+1}}(m) − p^{n+r−2} S_{p^{r−1},p^{−l}}(m/p).
pub fn recursion_terms(pair: &QuadricPair, p: u64, r: u32, l: u32, m: &[i64], cfg: &CharSumConfig) -> Result<[f64; 3]> {
    let n = pair.n() as i32;
    let pf = p as f64;
    let s1 = s_bruteforce(pair, p.pow(r), p.pow(l), m, cfg)?.value;
    let t1 = pf.powi(r as i32) * s1;
    if r == 0 {
        return Ok([t1, 0.0, 0.0]);
    }
    let s2 = s_bruteforce(pair, p.pow(r - 1), p.pow(l + 1), m, cfg)?.value;
    let t2 = pf.powi(r as i32 - 2) * s2;
    let t3 = if l == 0 && m.iter().all(|x| x % p as i64 == 0) {
        let mp: Vec<i64> = m.iter().map(|x| x / p as i64).collect();
        pf.powi(n + r as i32 - 2) * s_bruteforce(pair, p.pow(r - 1), 1, &mp, cfg)?.value
    } else {
        0.0
    };
    Ok([t1, t2, t3])
}

/// C_{p^r, p^l}(m) by the cheapest applicable route.
pub fn c_prime_power(pair: &QuadricPair, p: u64, r: u32, l: u32, m: &[i64], cfg: &CharSumConfig) -> Result<CharSumValue> {
    let (q1, q2) = (p.pow(r), p.pow(l));
    if r == 0 && l == 0 {
        return Ok(CharSumValue::from_complex(Complex64::new(1.0, 0.0), Method::PrimePowerRecursion, 1, 1, m));
    }
    if r == 0 {
        if let Some(z) = closed_form_c(pair, p, l, m) {
            return Ok(CharSumValue::from_complex(z, Method::ClosedForm, q1, q2, m));
        }
    }
    if m.iter().all(|&x| x == 0) && p != 2 && pair.is_good_prime(p) {
        let v = HenselCounter::new(pair, p).c_zero(r, l);
        return Ok(CharSumValue::from_complex(Complex64::new(v, 0.0), Method::HenselCount, q1, q2, m));
    }
    match recursion_terms(pair, p, r, l, m, cfg) {
        Ok([t1, t2, t3]) => Ok(CharSumValue {
            value: t1 - t2 - t3,
            imag_residual: 0.0,
            method: Method::PrimePowerRecursion,
            q1,
            q2,
            m: m.to_vec(),
        }),
        Err(Error::WorkBudgetExceeded { .. }) => c_bruteforce(pair, q1, q2, m, cfg),
        Err(e) => Err(e),
    }
}

/// C_{q1,q2}(m) as a product of prime-power factors.
pub fn c_assemble(pair: &QuadricPair, q1: u64, q2: u64, m: &[i64], cfg: &CharSumConfig) -> Result<CharSumValue> {
    let f1 = factorize(q1);
    let f2 = factorize(q2);
    let mut primes: Vec<u64> = f1.primes().chain(f2.primes()).collect();
    primes.sort_unstable();
    primes.dedup();
    let mut value = 1.0;
    let mut resid: f64 = 0.0;
    for p in primes {
        let v = c_prime_power(pair, p, f1.exponent_of(p), f2.exponent_of(p), m, cfg)?;
        value *= v.value;
        resid = resid.max(v.imag_residual.abs());
    }
    Ok(CharSumValue { value, imag_residual: resid, method: Method::Multiplicative, q1, q2, m: m.to_vec() })
}

fn is_integer_square(v: i128) -> bool {
    v >= 0 && crate::arith::is_square(v).is_some()
}

/// Empirical constants for the character-sum bounds.
pub fn bound_survey(pair: &QuadricPair, q_max: u64, m_samples: &[Vec<i64>], cfg: &CharSumConfig) -> Result<ExperimentReport> {
    let n = pair.n() as i32;
    let nf = n as f64;
    let mut rep = ExperimentReport::new(
        "bound_survey",
        &["bound", "class", "m", "modulus", "value", "ratio"],
    );
    let mut best: HashMap<&str, f64> = HashMap::new();
    let mut bump = |k: &'static str, v: f64| {
        let e = best.entry(k).or_insert(0.0);
        if v > *e {
            *e = v;
        }
    };
    for m in m_samples {
        let mtxt = format!("{m:?}");
        let qs = pair.adjoint_value(m);
        let cap = crate::forms::capacity_n(pair, m);
        // Running sum of C_{1,q2}(m) over q2 coprime to N(m).
        let (class, expo) = if n % 2 == 1 {
            let sign = if ((n - 1) / 2) % 2 == 0 { 1 } else { -1 };
            if is_integer_square(sign * qs) {
                ("square", (nf + 3.0) / 2.0)
            } else {
                ("non_square", (nf + 2.0) / 2.0)
            }
        } else if qs != 0 {
            ("q_star_nonzero", (nf + 2.0) / 2.0)
        } else {
            let sign: i128 = if (n / 2) % 2 == 0 { 1 } else { -1 };
            if is_integer_square(sign * pair.det_m2 as i128) {
                ("q_star_zero_square", (nf + 4.0) / 2.0)
            } else {
                ("q_star_zero_non_square", (nf + 3.0) / 2.0)
            }
        };
        let mut running = 0.0;
        let mut running_abs1 = 0.0;
        for q in 1..=q_max {
            if gcd(q, (cap % q as u128) as u64) == 1 {
                running += c_assemble(pair, 1, q, m, cfg)?.value;
            }
            let ratio = running.abs() / (q as f64).powf(expo);
            bump("q2_partial_sum", ratio);
            rep.push(vec![json!("q2_partial_sum"), json!(class), json!(mtxt), json!(q), num(running), num(ratio)]);

            let c1 = c_assemble(pair, q, 1, m, cfg)?.value;
            let r6 = c1.abs() / (q as f64).powf(nf / 2.0 + 1.0);
            bump("q1_pointwise", r6);
            rep.push(vec![json!("q1_pointwise"), json!("all"), json!(mtxt), json!(q), num(c1), num(r6)]);

            if pair.is_good_prime_product(q) {
                running_abs1 += c1.abs();
            }
            let r7 = running_abs1 / (q as f64).powf((nf + 3.0) / 2.0);
            bump("q1_coprime_sum", r7);
            rep.push(vec![json!("q1_coprime_sum"), json!("coprime_to_delta_v"), json!(mtxt), json!(q), num(running_abs1), num(r7)]);
        }
        // d1 | d2^∞ and d2 | d1^∞: same radical.
        for d1 in 2..=q_max {
            for d2 in 2..=q_max {
                let r1 = crate::arith::radical(d1);
                if r1 != crate::arith::radical(d2) {
                    continue;
                }
                let c = c_assemble(pair, d1, d2, m, cfg)?.value;
                let rad = r1 as f64;
                let g = gcd(r1, (qs.unsigned_abs() % r1 as u128) as u64) as f64;
                let ratio = c.abs() * rad / ((d1 * d2) as f64).powf(nf / 2.0 + 1.0) / g;
                bump("same_radical", ratio);
                rep.push(vec![json!("same_radical"), json!("same_radical"), json!(mtxt), json!(format!("{d1}x{d2}")), num(c), num(ratio)]);
            }
        }
    }
    let mut keys: Vec<_> = best.into_iter().collect();
    keys.sort_by(|a, b| a.0.cmp(b.0));
    for (k, v) in keys {
        rep.set(&format!("max_ratio_{k}"), num(v));
    }
    rep.metadata.config = json!({ "q_max": q_max, "m_samples": m_samples, "budget": cfg.budget });
    Ok(rep)
}

impl QuadricPair {
    /// True when every prime factor of q is good.
    pub fn is_good_prime_product(&self, q: u64) -> bool {
        factorize(q).primes().all(|p| self.is_good_prime(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::validate_pair;

    #[test]
    fn trivial_modulus() {
        let pair = validate_pair(vec![vec![1, 1], vec![1, -2]], vec![vec![2, 1], vec![1, -1]]).unwrap();
        let cfg = CharSumConfig::default();
        let v = c_bruteforce(&pair, 1, 1, &[3, -4], &cfg).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        let s = s_bruteforce(&pair, 1, 1, &[3, -4], &cfg).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_q2_three() {
        // Q2 = x^2 + y^2, q1 = 1, q2 = 3, m = 0 gives -6.
        let pair = QuadricPair::diagonal(&[1, 2], &[1, 1]).unwrap();
        let cfg = CharSumConfig::default();
        let v = c_bruteforce(&pair, 1, 3, &[0, 0], &cfg).unwrap();
        assert!((v.value + 6.0).abs() < 1e-9, "{v:?}");
        let closed = closed_form_c(&pair, 3, 1, &[0, 0]).unwrap();
        assert!((closed.re + 6.0).abs() < 1e-9);
    }

    #[test]
    fn s_rational_convention() {
        let pair = QuadricPair::diagonal(&[1, 2], &[1, 1]).unwrap();
        let cfg = CharSumConfig::default();
        let half = Rational64::new(1, 2);
        let one = Rational64::from_integer(1);
        let v = s_rational(&pair, half, one, &[one, one], &cfg).unwrap();
        assert_eq!(v.value, 0.0);
        let v = s_rational(&pair, one, one, &[half, one], &cfg).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn budget_gate() {
        let pair = validate_pair(vec![vec![1, 1], vec![1, -2]], vec![vec![2, 1], vec![1, -1]]).unwrap();
        let cfg = CharSumConfig { budget: 100.0 };
        assert!(matches!(
            c_bruteforce(&pair, 7, 11, &[0, 0], &cfg),
            Err(Error::WorkBudgetExceeded { .. })
        ));
    }
}
