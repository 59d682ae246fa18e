#![allow(dead_code)]

use num_complex::Complex64;
use qpairs::forms::validate_pair;
use qpairs::QuadricPair;
use rand::Rng;
use std::f64::consts::TAU;

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn units(q: u64) -> Vec<u64> {
    (0..q).filter(|&a| gcd(a, q) == 1).collect()
}

fn cells(modulus: u64, n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..modulus.pow(n as u32)).map(move |mut t| {
        (0..n)
            .map(|_| {
                let v = (t % modulus) as i64;
                t /= modulus;
                v
            })
            .collect()
    })
}

/// Σ*_{a1 mod q1} Σ*_{a2 mod q2} Σ_{b mod q1q2, q1 | Q2(b)} e((a1 q2 Q1(b) + a2 Q2(b) + b.m)/q1q2).
pub fn literal_c(pair: &QuadricPair, q1: u64, q2: u64, m: &[i64]) -> Complex64 {
    let big = q1 * q2;
    let (u1, u2) = (units(q1), units(q2));
    let mut s = Complex64::new(0.0, 0.0);
    for b in cells(big, pair.n()) {
        let v2 = pair.q2.eval(&b);
        if v2.rem_euclid(q1 as i128) != 0 {
            continue;
        }
        let v1 = pair.q1.eval(&b);
        let dot: i128 = b.iter().zip(m).map(|(x, y)| (*x as i128) * (*y as i128)).sum();
        for &a1 in &u1 {
            for &a2 in &u2 {
                let t = (a1 as i128 * q2 as i128 * v1 + a2 as i128 * v2 + dot).rem_euclid(big as i128);
                s += Complex64::from_polar(1.0, TAU * t as f64 / big as f64);
            }
        }
    }
    s
}

/// Σ*_{a mod q2} Σ_{b mod q1q2, q1 | Q1(b), q1 | Q2(b)} e((a Q2(b) + b.m)/q1q2).
pub fn literal_s(pair: &QuadricPair, q1: u64, q2: u64, m: &[i64]) -> Complex64 {
    let big = q1 * q2;
    let mut s = Complex64::new(0.0, 0.0);
    for b in cells(big, pair.n()) {
        let v1 = pair.q1.eval(&b);
        let v2 = pair.q2.eval(&b);
        if v1.rem_euclid(q1 as i128) != 0 || v2.rem_euclid(q1 as i128) != 0 {
            continue;
        }
        let dot: i128 = b.iter().zip(m).map(|(x, y)| (*x as i128) * (*y as i128)).sum();
        for &a in &units(q2) {
            let t = (a as i128 * v2 + dot).rem_euclid(big as i128);
            s += Complex64::from_polar(1.0, TAU * t as f64 / big as f64);
        }
    }
    s
}

/// #{b mod p^k : Q1(b) ≡ Q2(b) ≡ 0}.
pub fn literal_zero_count(pair: &QuadricPair, p: u64, k: u32) -> u64 {
    let q = p.pow(k);
    cells(q, pair.n())
        .filter(|b| pair.q1.eval(b).rem_euclid(q as i128) == 0 && pair.q2.eval(b).rem_euclid(q as i128) == 0)
        .count() as u64
}

/// Full scan of the integer box.
pub fn scan_count(pair: &QuadricPair, ranges: &[(i64, i64)]) -> u64 {
    let n = ranges.len();
    let mut x: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut c = 0;
    loop {
        if pair.q1.eval(&x) == 0 && pair.q2.eval(&x) == 0 {
            c += 1;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return c;
            }
            k -= 1;
            x[k] += 1;
            if x[k] <= ranges[k].1 {
                break;
            }
            x[k] = ranges[k].0;
        }
    }
}

/// A random symmetric pair with entries in [−3, 3] that passes validation.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> QuadricPair {
    loop {
        let mut sym = || {
            let mut m = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in i..n {
                    let v = rng.gen_range(-3..=3);
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            m
        };
        let (a, b) = (sym(), sym());
        if let Ok(p) = validate_pair(a, b) {
            return p;
        }
    }
}
