//! Modular arithmetic, Ramanujan and Gauss sums, quadratic characters.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Trial division up to 10^6, Pollard rho for the cofactor.
pub fn factorize(q: u64) -> Factorization {
    assert!(q >= 1, "factorize needs q >= 1");
    let mut n = q;
    let mut primes = Vec::new();
    let mut d = 2u64;
    while d * d <= n && d <= 1_000_000 {
        while n % d == 0 {
            primes.push(d);
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        split_large(n, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { value: q, factors }
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

pub fn mobius(q: u64) -> i64 {
    let f = factorize(q);
    if f.factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(q: u64) -> u64 {
    factorize(q)
        .factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn divisors(q: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(q).factors {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn radical(m: u64) -> u64 {
    assert!(m >= 1, "radical needs m >= 1");
    factorize(m).primes().product()
}

/// p-adic valuation; `None` for zero.
pub fn valuation(m: i64, p: u64) -> Option<u32> {
    if m == 0 {
        return None;
    }
    let mut m = m.unsigned_abs();
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    Some(v)
}

pub fn valuation_i128(m: i128, p: u64) -> Option<u32> {
    if m == 0 {
        return None;
    }
    let mut m = m.unsigned_abs();
    let p = p as u128;
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    Some(v)
}

/// c_q(m) = sum over d | (m, q) of mu(q/d) d.
pub fn ramanujan_sum(q: u64, m: i64) -> i64 {
    assert!(q >= 1, "ramanujan_sum needs q >= 1");
    let g = gcd(q, m.unsigned_abs());
    let g = if m == 0 { q } else { g };
    divisors(g)
        .into_iter()
        .map(|d| mobius(q / d) * d as i64)
        .sum()
}

/// Ramanujan sums c_q(x) for all residues x mod q, indexed by x.
pub fn ramanujan_table(q: u64) -> Vec<i64> {
    let divs = divisors(q);
    let mus: Vec<i64> = divs.iter().map(|&d| mobius(q / d)).collect();
    (0..q)
        .map(|x| {
            divs.iter()
                .zip(&mus)
                .filter(|(&d, _)| x % d == 0)
                .map(|(&d, &mu)| mu * d as i64)
                .sum()
        })
        .collect()
}

/// e(r/q) with r reduced symmetrically for accuracy.
pub fn unit_root(r: i128, q: u64) -> Complex64 {
    let q = q as i128;
    let mut r = r.rem_euclid(q);
    if 2 * r > q {
        r -= q;
    }
    let (s, c) = (TAU * r as f64 / q as f64).sin_cos();
    Complex64::new(c, s)
}

/// Table of e(r/q) for r in 0..q.
pub fn root_table(q: u64) -> Vec<Complex64> {
    (0..q as i128).map(|r| unit_root(r, q)).collect()
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Default)]
pub struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
    terms: u64,
    max_partial: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
        self.terms += 1;
        let mag = self.re.abs().max(self.im.abs()).max(z.norm());
        if mag > self.max_partial {
            self.max_partial = mag;
        }
    }

    pub fn add_real(&mut self, x: f64) {
        self.add(Complex64::new(x, 0.0));
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }

    pub fn finish(&self) -> UnitRootSum {
        let v = self.value();
        UnitRootSum {
            real: v.re,
            imag: v.im,
            term_count: self.terms,
            max_abs_error: (self.terms.max(1)) as f64 * f64::EPSILON * self.max_partial.max(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitRootSum {
    pub real: f64,
    pub imag: f64,
    pub term_count: u64,
    pub max_abs_error: f64,
}

impl UnitRootSum {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.real, self.imag)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.real * self.real + self.imag * self.imag
    }

    /// Rounds the real part when it is within 1e-6 of an integer and the
    /// imaginary part is negligible.
    pub fn to_integer(&self) -> Result<i64> {
        let r = self.real.round();
        if (self.real - r).abs() <= 1e-6 && self.imag.abs() <= 1e-6 {
            Ok(r as i64)
        } else {
            Err(Error::NotIntegral { value: self.real })
        }
    }
}

/// g_q(m) = sum over b mod q of e_q(m b^2).
pub fn gauss_sum(q: u64, m: i64) -> UnitRootSum {
    assert!(q >= 1, "gauss_sum needs q >= 1");
    let mut acc = CompensatedSum::new();
    let mq = (m as i128).rem_euclid(q as i128);
    for b in 0..q as i128 {
        acc.add(unit_root(mq * b * b, q));
    }
    acc.finish()
}

/// Sum over a mod p^l of chi_p(a) e_{p^l}(a x).
pub fn twisted_gauss_sum(p: u64, l: u32, x: i64) -> UnitRootSum {
    let q = p.pow(l);
    let mut acc = CompensatedSum::new();
    for a in 1..q as i128 {
        let chi = legendre(a as i64, p);
        if chi != 0 {
            acc.add(unit_root(a * x as i128, q) * chi as f64);
        }
    }
    acc.finish()
}

/// Legendre symbol (a | p) for an odd prime p.
pub fn legendre(a: i64, p: u64) -> i8 {
    let a = (a as i128).rem_euclid(p as i128) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Eps {
    One,
    I,
}

impl Eps {
    pub fn complex(self) -> Complex64 {
        match self {
            Eps::One => Complex64::new(1.0, 0.0),
            Eps::I => Complex64::new(0.0, 1.0),
        }
    }

    pub fn of(p: u64) -> Eps {
        if p % 4 == 1 {
            Eps::One
        } else {
            Eps::I
        }
    }
}

/// (chi_p(a), eps(p)); eps(p) = 1 for p = 1 mod 4 and i for p = 3 mod 4.
pub fn quadratic_symbols(p: u64, a: i64) -> Result<(i8, Eps)> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p as i64));
    }
    Ok((legendre(a, p), Eps::of(p)))
}

/// Floor square root of a nonnegative i128.
pub fn isqrt(n: i128) -> i128 {
    if n < 0 {
        return -1;
    }
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> Option<i128> {
    let r = isqrt(n);
    if r >= 0 && r * r == n {
        Some(r)
    } else {
        None
    }
}

/// Inverse of a modulo m when gcd(a, m) = 1.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a as i128).rem_euclid(m as i128), m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_ramanujan(q: u64, m: i64) -> f64 {
        (0..q)
            .filter(|&a| gcd(a, q) == 1)
            .map(|a| unit_root(a as i128 * m as i128, q).re)
            .sum()
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).factors.is_empty());
        assert_eq!(factorize(12).factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(97).factors, vec![(97, 1)]);
        let big = 1_000_003u64 * 999_983;
        assert_eq!(factorize(big).factors, vec![(999_983, 1), (1_000_003, 1)]);
    }

    #[test]
    fn factorize_roundtrip() {
        for q in (1..1_000_000u64).step_by(997) {
            assert_eq!(factorize(q).product(), q);
        }
        for q in 1..5000u64 {
            assert_eq!(factorize(q).product(), q);
        }
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(1, 17), 1);
        assert_eq!(ramanujan_sum(7, 0), 6);
        assert_eq!(ramanujan_sum(4, 2), -2);
    }

    #[test]
    fn ramanujan_matches_unit_sum() {
        for q in 1..=200u64 {
            let table = ramanujan_table(q);
            for m in -200..=200i64 {
                let c = ramanujan_sum(q, m);
                assert!((c as f64 - direct_ramanujan(q, m)).abs() < 1e-7, "q={q} m={m}");
                assert_eq!(c, table[m.rem_euclid(q as i64) as usize]);
            }
        }
    }

    #[test]
    fn gauss_examples() {
        let g = gauss_sum(7, 0);
        assert!((g.real - 7.0).abs() < 1e-12 && g.imag.abs() < 1e-12);
        let g = gauss_sum(3, 1);
        assert!(g.real.abs() < 1e-12 && (g.imag - 3f64.sqrt()).abs() < 1e-12);
        assert!((gauss_sum(5, 2).norm_sqr().sqrt() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gauss_norms_odd_moduli() {
        // |g_q(m)|^2 = q for odd q and gcd(m, q) = 1.
        for q in (1..=99u64).step_by(2) {
            for m in 1..q as i64 {
                if gcd(m as u64, q) != 1 {
                    continue;
                }
                let g = gauss_sum(q, m);
                assert!((g.norm_sqr() - q as f64).abs() < 1e-9 * q as f64, "q={q} m={m}");
                assert!(g.max_abs_error < 1e-10);
            }
        }
    }

    #[test]
    fn symbols() {
        assert_eq!(quadratic_symbols(5, 4).unwrap(), (1, Eps::One));
        assert_eq!(quadratic_symbols(7, 3).unwrap(), (-1, Eps::I));
        assert_eq!(quadratic_symbols(5, 10).unwrap(), (0, Eps::One));
        assert!(quadratic_symbols(9, 1).is_err());
        assert!(quadratic_symbols(2, 1).is_err());
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(1), 1);
        assert_eq!(radical(12), 6);
        assert_eq!(radical(49), 7);
    }

    #[test]
    fn integer_rounding() {
        assert_eq!(gauss_sum(5, 0).to_integer().unwrap(), 5);
        assert!(gauss_sum(3, 1).to_integer().is_err());
    }

    #[test]
    fn sqrt_helpers() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(99), 9);
        assert_eq!(is_square(1 << 62), Some(1 << 31));
        assert_eq!(is_square(50), None);
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
    }
}
