//! Euler factors of the singular series and p-adic solution densities.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{legendre, primes_up_to, Eps};
use crate::charsum::{c_prime_power, CharSumConfig};
use crate::error::{Error, Result};
use crate::forms::{diagonalize_mod_p, IntMatrix, QuadricPair};

/// Σ_{x ∈ F_p^n} e_p(ᵗx A x) for symmetric A and odd p.
pub fn quadratic_gauss_sum_fp(a: &IntMatrix, p: u64) -> Complex64 {
    let n = a.len() as i32;
    let d = diagonalize_mod_p(a, p);
    let rk = d.len() as i32;
    let disc = d.iter().fold(1i64, |acc, &x| (acc * x).rem_euclid(p as i64));
    let g1 = Eps::of(p).complex() * (p as f64).sqrt();
    g1.powi(rk) * legendre(disc, p) as f64 * (p as f64).powi(n - rk)
}

/// Number of x ∈ F_p^n (zero included) with Q1(x) = Q2(x) = 0, and with Q2(x) = 0,
/// from the finite Fourier expansion of the congruence conditions.
pub fn fp_point_counts(pair: &QuadricPair, p: u64) -> (u128, u128) {
    assert!(p != 2, "odd primes only");
    let n = pair.n();
    let m1 = &pair.q1.matrix;
    let m2 = &pair.q2.matrix;
    let combo = |a1: i64, a2: i64| -> IntMatrix {
        (0..n)
            .map(|i| (0..n).map(|j| a1 * m1[i][j] + a2 * m2[i][j]).collect())
            .collect()
    };
    let pi = p as i64;
    let both: Complex64 = (0..pi)
        .into_par_iter()
        .map(|a1| (0..pi).map(|a2| quadratic_gauss_sum_fp(&combo(a1, a2), p)).sum::<Complex64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let only2: Complex64 = (0..pi).map(|a| quadratic_gauss_sum_fp(&combo(0, a), p)).sum();
    let pf = p as f64;
    let n12 = (both.re / (pf * pf)).round();
    let n2 = (only2.re / pf).round();
    (n12 as u128, n2 as u128)
}

/// Counts N(α, β; T) = #{b mod p^T : p^α | Q1(b), p^β | Q2(b)} at a good prime,
/// by lifting smooth points and recursing on b = p y.
#[derive(Debug, Clone)]
pub struct HenselCounter {
    pub p: u64,
    pub n: usize,
    /// Nonzero points mod p on Q1 = Q2 = 0.
    pub n12_star: BigInt,
    /// Nonzero points mod p on Q2 = 0.
    pub n2_star: BigInt,
}

impl HenselCounter {
    pub fn new(pair: &QuadricPair, p: u64) -> Self {
        assert!(p != 2 && pair.is_good_prime(p), "Hensel counts need a good odd prime");
        let (n12, n2) = fp_point_counts(pair, p);
        Self {
            p,
            n: pair.n(),
            n12_star: BigInt::from(n12) - 1,
            n2_star: BigInt::from(n2) - 1,
        }
    }

    fn pw(&self, e: i64) -> BigInt {
        assert!(e >= 0, "negative exponent {e}");
        num_traits::pow(BigInt::from(self.p), e as usize)
    }

    /// Requires α ≤ β ≤ T.
    pub fn count(&self, alpha: u32, beta: u32, t: u32) -> BigInt {
        debug_assert!(alpha <= beta && beta <= t.max(beta));
        if t == 0 {
            return BigInt::one();
        }
        let n = self.n as i64;
        let (a, b, tt) = (alpha as i64, beta as i64, t as i64);
        let lifts = n * (tt - 1);
        let nonzero = if a == 0 && b == 0 {
            (self.pw(n) - 1) * self.pw(lifts)
        } else if a == 0 {
            &self.n2_star * self.pw(lifts - (b - 1))
        } else {
            &self.n12_star * self.pw(lifts - (a - 1) - (b - 1))
        };
        nonzero + self.count(alpha.saturating_sub(2), beta.saturating_sub(2), t - 1)
    }

    /// C_{p^r, p^l}(0), expanding both Ramanujan sums into congruence counts.
    pub fn c_zero(&self, r: u32, l: u32) -> f64 {
        let t = r + l;
        let pw = |e: u32| self.pw(e as i64);
        let alphas: Vec<(u32, BigInt)> = if r == 0 {
            vec![(0, BigInt::one())]
        } else {
            vec![(r, pw(r)), (r - 1, -pw(r - 1))]
        };
        let betas: Vec<(u32, BigInt)> = if l == 0 {
            vec![(r, BigInt::one())]
        } else {
            vec![(t, pw(l)), (t - 1, -pw(l - 1))]
        };
        let mut total = BigInt::zero();
        for (a, ca) in &alphas {
            for (b, cb) in &betas {
                total += ca * cb * self.count(*a, *b, t);
            }
        }
        total.to_f64().unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub p: u64,
    pub level_k: u32,
    pub count: u128,
    pub density: f64,
    pub method: String,
}

/// Number of b mod p^k with Q1(b) ≡ Q2(b) ≡ 0 mod p^k, by enumeration.
pub fn enumerate_zero_count(pair: &QuadricPair, p: u64, k: u32) -> u128 {
    let n = pair.n();
    let q = p.pow(k) as i64;
    let m1 = &pair.q1.matrix;
    let m2 = &pair.q2.matrix;
    let last = n - 1;
    let prefixes = (q as u64).pow(last as u32);
    (0..prefixes)
        .into_par_iter()
        .map(|idx| {
            let mut b = vec![0i64; n];
            let mut t = idx;
            for slot in b.iter_mut().take(last) {
                *slot = (t % q as u64) as i64;
                t /= q as u64;
            }
            let (mut pre1, mut pre2, mut lin1, mut lin2) = (0i64, 0i64, 0i64, 0i64);
            for i in 0..last {
                for j in 0..last {
                    pre1 += m1[i][j] * b[i] * b[j];
                    pre2 += m2[i][j] * b[i] * b[j];
                }
                lin1 += m1[i][last] * b[i];
                lin2 += m2[i][last] * b[i];
            }
            let (pre1, pre2, lin1, lin2) =
                (pre1.rem_euclid(q), pre2.rem_euclid(q), lin1.rem_euclid(q), lin2.rem_euclid(q));
            let (d1, d2) = (m1[last][last].rem_euclid(q), m2[last][last].rem_euclid(q));
            let mut c = 0u128;
            for x in 0..q {
                if (pre2 + (2 * lin2 + d2 * x) % q * x) % q == 0 && (pre1 + (2 * lin1 + d1 * x) % q * x) % q == 0 {
                    c += 1;
                }
            }
            c
        })
        .sum()
}

/// Density p^{-k(n-2)} #{x mod p^k : Q1 ≡ Q2 ≡ 0}. Enumerates when p^{kn} fits the
/// budget; otherwise lifts from level 1 at good primes.
pub fn local_density(pair: &QuadricPair, p: u64, k: u32, cfg: &CharSumConfig) -> Result<DensityEstimate> {
    if k == 0 {
        return Err(Error::InvalidInput("level k must be positive".into()));
    }
    let n = pair.n() as i32;
    let work = (p as f64).powi(k as i32 * n);
    let norm = (p as f64).powi(k as i32 * (n - 2));
    if work <= cfg.budget {
        let count = enumerate_zero_count(pair, p, k);
        return Ok(DensityEstimate { p, level_k: k, count, density: count as f64 / norm, method: "enumeration".into() });
    }
    if p != 2 && pair.is_good_prime(p) {
        let big = HenselCounter::new(pair, p).count(k, k, k);
        let count = big
            .to_u128()
            .ok_or_else(|| Error::InvalidInput("count exceeds u128".into()))?;
        return Ok(DensityEstimate { p, level_k: k, count, density: big.to_f64().unwrap() / norm, method: "hensel".into() });
    }
    Err(Error::WorkBudgetExceeded { needed: work, budget: cfg.budget })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerFactorEstimate {
    pub p: u64,
    pub s1: f64,
    pub s2: f64,
    pub depth_k: u32,
    pub value: f64,
    /// Σ over r + l = K of |C_{p^r,p^l}(0)| p^{-r s1 - l s2}.
    pub last_term_magnitude: f64,
}

/// Truncated Euler factor Σ_{r+l ≤ K} C_{p^r,p^l}(0) p^{-r s1 - l s2}.
pub fn euler_factor(pair: &QuadricPair, p: u64, s1: f64, s2: f64, k: u32, cfg: &CharSumConfig) -> Result<EulerFactorEstimate> {
    let n = pair.n();
    let zero = vec![0i64; n];
    let pf = p as f64;
    let mut value = 0.0;
    let mut last = 0.0;
    for total in 0..=k {
        let mut shell = 0.0;
        let mut shell_abs = 0.0;
        for r in 0..=total {
            let l = total - r;
            let c = c_prime_power(pair, p, r, l, &zero, cfg)?.value;
            let term = c * pf.powf(-(r as f64) * s1 - l as f64 * s2);
            shell += term;
            shell_abs += term.abs();
        }
        value += shell;
        last = shell_abs;
    }
    Ok(EulerFactorEstimate { p, s1, s2, depth_k: k, value, last_term_magnitude: last })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub p_max: u64,
    pub depth: u32,
    /// Bad primes use depth max(depth, floor(log_p bad_modulus)).
    pub bad_modulus: u64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        Self { p_max: 100, depth: 4, bad_modulus: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSeriesEstimate {
    pub value: f64,
    pub value_descending: f64,
    pub factors: Vec<EulerFactorEstimate>,
    pub bad_primes: Vec<u64>,
    /// Σ_{P < p ≤ 10P} p^{2 - n/2}, the size of the first omitted terms.
    pub tail_heuristic: f64,
    pub warnings: Vec<String>,
}

pub fn depth_for_prime(pair: &QuadricPair, p: u64, params: &SeriesParams) -> u32 {
    if pair.is_good_prime(p) {
        return params.depth;
    }
    let mut k = 0;
    let mut q = 1u64;
    while q.saturating_mul(p) <= params.bad_modulus {
        q *= p;
        k += 1;
    }
    params.depth.max(k)
}

/// 𝔖 ≈ Π_{p ≤ P_max} D_p(n−1, n) with per-prime truncation diagnostics.
pub fn singular_series(pair: &QuadricPair, params: &SeriesParams, cfg: &CharSumConfig) -> Result<SingularSeriesEstimate> {
    let n = pair.n() as f64;
    let primes = primes_up_to(params.p_max);
    let factors: Vec<EulerFactorEstimate> = primes
        .par_iter()
        .map(|&p| euler_factor(pair, p, n - 1.0, n, depth_for_prime(pair, p, params), cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    if n < 7.0 {
        warnings.push(format!("n = {n} is below the absolute-convergence range at (n-1, n)"));
    }
    for f in &factors {
        if f.value <= 0.0 {
            warnings.push(format!("factor at p = {} is {:.3e} (local obstruction or truncation)", f.p, f.value));
        }
    }
    let value: f64 = factors.iter().map(|f| f.value).product();
    let value_descending: f64 = factors.iter().rev().map(|f| f.value).product();
    let tail_heuristic: f64 = primes_up_to(10 * params.p_max.max(1))
        .into_iter()
        .filter(|&p| p > params.p_max)
        .map(|p| (p as f64).powf(2.0 - n / 2.0))
        .sum();
    let bad_primes = primes.iter().copied().filter(|&p| !pair.is_good_prime(p)).collect();
    Ok(SingularSeriesEstimate { value, value_descending, factors, bad_primes, tail_heuristic, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::validate_pair;

    fn ternary() -> QuadricPair {
        QuadricPair::diagonal(&[1, -1, 0], &[1, 1, -2]).unwrap()
    }

    #[test]
    fn fp_counts_match_enumeration() {
        let pair = validate_pair(
            vec![vec![1, 1, 0], vec![1, -2, 1], vec![0, 1, 3]],
            vec![vec![2, 0, 1], vec![0, 1, 0], vec![1, 0, -1]],
        )
        .unwrap();
        for p in [3u64, 5, 7, 11, 13] {
            let (n12, _) = fp_point_counts(&pair, p);
            assert_eq!(n12, enumerate_zero_count(&pair, p, 1), "p={p}");
        }
    }

    #[test]
    fn hensel_counts_match_enumeration() {
        let pair = ternary();
        for p in [3u64, 5] {
            if !pair.is_good_prime(p) {
                continue;
            }
            let h = HenselCounter::new(&pair, p);
            for k in 1..=2 {
                assert_eq!(h.count(k, k, k).to_u128().unwrap(), enumerate_zero_count(&pair, p, k));
            }
        }
    }

    #[test]
    fn euler_trivial_depth() {
        let pair = ternary();
        let f = euler_factor(&pair, 3, 2.0, 3.0, 0, &CharSumConfig::default()).unwrap();
        assert_eq!(f.value, 1.0);
        let s = singular_series(&pair, &SeriesParams { p_max: 1, depth: 4, bad_modulus: 1 }, &CharSumConfig::default()).unwrap();
        assert_eq!(s.value, 1.0);
    }
}
