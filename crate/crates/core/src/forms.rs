//! Quadric pairs, their exact invariants and the singular locus.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, is_prime, primes_up_to};
use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub n: usize,
    pub matrix: IntMatrix,
}

impl QuadraticForm {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        let n = matrix.len();
        for row in &matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::AsymmetricInput);
                }
            }
        }
        Ok(Self { n, matrix })
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let n = d.len();
        let mut matrix = vec![vec![0; n]; n];
        for i in 0..n {
            matrix[i][i] = d[i];
        }
        Self { n, matrix }
    }

    pub fn eval(&self, x: &[i64]) -> i128 {
        debug_assert_eq!(x.len(), self.n);
        let mut s = 0i128;
        for i in 0..self.n {
            let xi = x[i] as i128;
            if xi == 0 {
                continue;
            }
            let row = &self.matrix[i];
            s += row[i] as i128 * xi * xi;
            for j in i + 1..self.n {
                s += 2 * row[j] as i128 * xi * x[j] as i128;
            }
        }
        s
    }

    pub fn eval_real(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        let mut s = 0.0;
        for i in 0..self.n {
            let row = &self.matrix[i];
            s += row[i] as f64 * x[i] * x[i];
            for j in i + 1..self.n {
                s += 2.0 * row[j] as f64 * x[i] * x[j];
            }
        }
        s
    }

    /// Gradient 2 M x.
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = 2.0 * (0..self.n).map(|j| self.matrix[i][j] as f64 * x[j]).sum::<f64>();
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.matrix[i][j] == 0))
    }

    pub fn diag(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.matrix[i][i]).collect()
    }

    pub fn checked_eval(&self, x: &[i64]) -> Result<i128> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.eval(x))
    }

    pub fn checked_eval_real(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.eval_real(x))
    }
}

/// ᵗx M x, exact for integer vectors.
pub fn evaluate_form(f: &QuadraticForm, x: &[i64]) -> Result<i128> {
    f.checked_eval(x)
}

/// JSON pair schema: `{ "n": int, "M1": [[int]], "M2": [[int]] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub n: usize,
    #[serde(rename = "M1")]
    pub m1: IntMatrix,
    #[serde(rename = "M2")]
    pub m2: IntMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularLocusModel {
    /// (re, im) pairs.
    pub eigenvalues: Vec<(f64, f64)>,
    pub real_eigenlines: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadricPair {
    pub q1: QuadraticForm,
    pub q2: QuadraticForm,
    pub det_m2: i64,
    pub adjoint_m2: IntMatrix,
    /// Coefficients of g(s) = det(M1 + s M2), constant term first.
    pub pencil_poly: Vec<String>,
    #[serde(with = "bigint_string")]
    pub disc_d: BigInt,
    pub bad_primes: Vec<u64>,
    pub bad_prime_b: u64,
    #[serde(with = "bigint_string")]
    pub delta_v: BigInt,
    pub probe_bound: u64,
    pub locus: SingularLocusModel,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub const DEFAULT_PROBE_BOUND: u64 = 1000;

impl QuadricPair {
    pub fn n(&self) -> usize {
        self.q1.n
    }

    pub fn spec(&self) -> PairSpec {
        PairSpec { n: self.n(), m1: self.q1.matrix.clone(), m2: self.q2.matrix.clone() }
    }

    pub fn from_spec(spec: &PairSpec) -> Result<Self> {
        if spec.m1.len() != spec.n {
            return Err(Error::DimensionMismatch { expected: spec.n, got: spec.m1.len() });
        }
        validate_pair(spec.m1.clone(), spec.m2.clone())
    }

    pub fn diagonal(a: &[i64], b: &[i64]) -> Result<Self> {
        validate_pair(
            QuadraticForm::diagonal(a).matrix,
            QuadraticForm::diagonal(b).matrix,
        )
    }

    pub fn is_diagonal(&self) -> bool {
        self.q1.is_diagonal() && self.q2.is_diagonal()
    }

    pub fn adjoint_form(&self) -> QuadraticForm {
        QuadraticForm { n: self.n(), matrix: self.adjoint_m2.clone() }
    }

    /// Q2★(m) via the adjoint matrix.
    pub fn adjoint_value(&self, m: &[i64]) -> i128 {
        self.adjoint_form().eval(m)
    }

    /// A prime is good when it does not divide Δ_V.
    pub fn is_good_prime(&self, p: u64) -> bool {
        !(&self.delta_v % BigInt::from(p)).is_zero()
    }

    /// ℬ and Δ_V.
    pub fn bad_prime_data(&self) -> (u64, BigInt) {
        (self.bad_prime_b, self.delta_v.clone())
    }

    /// Primes dividing Δ_V (probe-bounded part of ℬ included).
    pub fn delta_v_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = small_prime_factors(&self.delta_v, 1 << 20);
        ps.extend(self.bad_primes.iter().copied());
        ps.sort_unstable();
        ps.dedup();
        ps
    }
}

fn to_big(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Fraction-free (Bareiss) determinant.
pub fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

pub fn det_int(m: &IntMatrix) -> BigInt {
    det_bareiss(to_big(m))
}

/// Adjugate (transpose of the cofactor matrix).
pub fn adjugate(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let n = m.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    if n == 1 {
        out[0][0] = BigInt::one();
        return out;
    }
    for i in 0..n {
        for j in 0..n {
            let minor: IntMatrix = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c]).collect())
                .collect();
            let c = det_int(&minor);
            out[j][i] = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    out
}

/// Coefficients of det(M1 + s M2) by exact interpolation at s = 0..n.
pub fn pencil_polynomial(m1: &IntMatrix, m2: &IntMatrix) -> Vec<BigInt> {
    let n = m1.len();
    let xs: Vec<i64> = (0..=n as i64).collect();
    let ys: Vec<BigInt> = xs
        .iter()
        .map(|&s| {
            let m: IntMatrix = (0..n)
                .map(|i| (0..n).map(|j| m1[i][j] + s * m2[i][j]).collect())
                .collect();
            det_int(&m)
        })
        .collect();
    // Newton divided differences over the rationals, then expand.
    let mut coef: Vec<BigRational> = ys.iter().map(|y| BigRational::from_integer(y.clone())).collect();
    for k in 1..=n {
        for i in (k..=n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / BigRational::from_integer(BigInt::from(xs[i] - xs[i - k]));
        }
    }
    let mut poly = vec![BigRational::zero(); n + 1];
    for k in (0..=n).rev() {
        // poly = poly * (s - xs[k]) + coef[k]
        let mut next = vec![BigRational::zero(); n + 1];
        for d in 0..n {
            next[d + 1] += &poly[d];
        }
        for d in 0..=n {
            next[d] -= &poly[d] * BigRational::from_integer(BigInt::from(xs[k]));
        }
        next[0] += &coef[k];
        poly = next;
    }
    poly.into_iter()
        .map(|c| {
            assert!(c.is_integer(), "pencil polynomial must have integer coefficients");
            c.to_integer()
        })
        .collect()
}

fn poly_derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Sylvester resultant of two integer polynomials (constant term first).
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut s = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (k, c) in f.iter().rev().enumerate() {
            s[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in g.iter().rev().enumerate() {
            s[n + i][i + k] = c.clone();
        }
    }
    det_bareiss(s)
}

/// Discriminant of a polynomial of degree d with nonzero leading coefficient.
pub fn discriminant(p: &[BigInt]) -> BigInt {
    let d = p.len() - 1;
    if d < 1 {
        return BigInt::one();
    }
    let lead = p[d].clone();
    let r = resultant(p, &poly_derivative(p));
    let sign = if (d * (d - 1) / 2) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let (q, rem) = (sign * r).div_rem(&lead);
    debug_assert!(rem.is_zero());
    q
}

/// Degree of gcd(p, p') over ℚ.
pub fn squarefree_defect(p: &[BigInt]) -> usize {
    let to_q = |v: &[BigInt]| -> Vec<BigRational> {
        v.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    };
    let mut a = to_q(p);
    let mut b = to_q(&poly_derivative(p));
    let trim = |v: &mut Vec<BigRational>| {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let mut r = a.clone();
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let f = r.last().unwrap() / b.last().unwrap();
            for (i, c) in b.iter().enumerate() {
                r[i + shift] -= &f * c;
            }
            r.pop();
            trim(&mut r);
        }
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

fn small_prime_factors(v: &BigInt, limit: u64) -> Vec<u64> {
    let mut x = v.abs();
    let mut out = Vec::new();
    if x.is_zero() {
        return out;
    }
    let mut p = 2u64;
    while p <= limit && x > BigInt::one() {
        let bp = BigInt::from(p);
        if (&x % &bp).is_zero() {
            out.push(p);
            while (&x % &bp).is_zero() {
                x /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if x > BigInt::one() {
        if let Some(r) = x.to_u64() {
            if is_prime(r) {
                out.push(r);
            }
        }
    }
    out
}

/// Rank of an integer matrix over F_p.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    let n = m.len();
    let cols = if n == 0 { 0 } else { m[0].len() };
    let pi = p as i64;
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x.rem_euclid(pi)).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..n).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], p).unwrap() as i64;
        for j in c..cols {
            a[rank][j] = (a[rank][j] * inv).rem_euclid(pi);
        }
        for r in 0..n {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for j in c..cols {
                    a[r][j] = (a[r][j] - f * a[rank][j]).rem_euclid(pi);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Diagonalises a symmetric matrix over F_p (p odd); returns the nonzero
/// diagonal entries of an equivalent diagonal form.
pub fn diagonalize_mod_p(m: &IntMatrix, p: u64) -> Vec<i64> {
    let n = m.len();
    let pi = p as i64;
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x.rem_euclid(pi)).collect()).collect();
    let mut out = Vec::new();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| a[i][i] != 0);
        let k = match pivot {
            Some(k) => k,
            None => {
                // Find an off-diagonal entry and replace e_i by e_i + e_j.
                let mut found = None;
                'search: for &i in &active {
                    for &j in &active {
                        if i != j && a[i][j] != 0 {
                            found = Some((i, j));
                            break 'search;
                        }
                    }
                }
                let Some((i, j)) = found else { break };
                for r in 0..n {
                    a[r][i] = (a[r][i] + a[r][j]).rem_euclid(pi);
                }
                for c in 0..n {
                    a[i][c] = (a[i][c] + a[j][c]).rem_euclid(pi);
                }
                debug_assert!(a[i][i] != 0);
                i
            }
        };
        let d = a[k][k];
        let inv = inv_mod(d, p).unwrap() as i64;
        out.push(d);
        active.retain(|&i| i != k);
        for &i in &active {
            let f = (a[i][k] * inv).rem_euclid(pi);
            if f == 0 {
                continue;
            }
            for &j in &active {
                a[i][j] = (a[i][j] - f * a[k][j]).rem_euclid(pi);
            }
        }
        for &i in &active {
            a[i][k] = 0;
            a[k][i] = 0;
        }
    }
    out
}

fn rank_condition_fails(m1: &IntMatrix, m2: &IntMatrix, p: u64) -> bool {
    let n = m1.len();
    let combo = |b1: i64, b2: i64| -> IntMatrix {
        (0..n)
            .map(|i| (0..n).map(|j| b1 * m1[i][j] + b2 * m2[i][j]).collect())
            .collect()
    };
    if rank_mod_p(&combo(1, 0), p) + 1 < n {
        return true;
    }
    (0..p as i64).any(|t| rank_mod_p(&combo(t, 1), p) + 1 < n)
}

fn eigen_model(m1: &IntMatrix, m2: &IntMatrix) -> SingularLocusModel {
    let n = m1.len();
    let a = DMatrix::from_fn(n, n, |i, j| m1[i][j] as f64);
    let b = DMatrix::from_fn(n, n, |i, j| m2[i][j] as f64);
    let t = b.clone().try_inverse().expect("M2 invertible") * &a;
    // Eigenvalues of M2⁻¹M1 are the negated roots of det(M1 + s M2).
    let pencil: Vec<f64> = pencil_polynomial(m1, m2).iter().map(|c| c.to_f64().unwrap()).collect();
    let ev = crate::bivariate::poly_roots(&pencil);
    let mut eigenvalues: Vec<(f64, f64)> = ev.iter().map(|z| (-z.re, -z.im)).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let scale = 1.0 + t.amax();
    let mut real_eigenlines = Vec::new();
    for &(re, im) in &eigenvalues {
        if im.abs() > 1e-9 * scale {
            continue;
        }
        let shifted = &a - &b * re;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("v_t requested");
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .unwrap();
        let v: Vec<f64> = v_t.row(imin).iter().copied().collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        real_eigenlines.push(v.iter().map(|x| x / norm).collect());
    }
    SingularLocusModel { eigenvalues, real_eigenlines }
}

pub fn validate_pair(m1: IntMatrix, m2: IntMatrix) -> Result<QuadricPair> {
    validate_pair_with_probe(m1, m2, DEFAULT_PROBE_BOUND)
}

pub fn validate_pair_with_probe(m1: IntMatrix, m2: IntMatrix, probe_bound: u64) -> Result<QuadricPair> {
    let q1 = QuadraticForm::new(m1)?;
    let q2 = QuadraticForm::new(m2)?;
    if q1.n != q2.n {
        return Err(Error::DimensionMismatch { expected: q1.n, got: q2.n });
    }
    if q1.n == 0 {
        return Err(Error::InvalidInput("empty matrices".into()));
    }
    let det = det_int(&q2.matrix);
    if det.is_zero() {
        return Err(Error::SingularM2);
    }
    let det_m2 = det.to_i64().ok_or_else(|| Error::InvalidInput("det M2 overflows i64".into()))?;
    let poly = pencil_polynomial(&q1.matrix, &q2.matrix);
    let disc = discriminant(&poly);
    if disc.is_zero() {
        return Err(Error::RepeatedEigenvalue);
    }
    let adj = adjugate(&q2.matrix);
    let adjoint_m2: IntMatrix = adj
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().expect("adjoint entry fits i64")).collect())
        .collect();

    let mut candidates = primes_up_to(probe_bound);
    candidates.extend(small_prime_factors(&(BigInt::from(2 * det_m2) * &disc), 1 << 20));
    candidates.sort_unstable();
    candidates.dedup();
    let mut bad = Vec::new();
    for &p in &candidates {
        let singular_mod_p = p != 2 && det_m2 % p as i64 != 0 && (&disc % BigInt::from(p)).is_zero();
        if singular_mod_p || rank_condition_fails(&q1.matrix, &q2.matrix, p) {
            bad.push(p);
        }
    }
    let bad_prime_b: u64 = bad.iter().product();
    let delta_v = BigInt::from(2) * BigInt::from(det_m2) * BigInt::from(bad_prime_b) * &disc;
    let locus = eigen_model(&q1.matrix, &q2.matrix);
    Ok(QuadricPair {
        pencil_poly: poly.iter().map(|c| c.to_string()).collect(),
        q1,
        q2,
        det_m2,
        adjoint_m2,
        disc_d: disc,
        bad_primes: bad,
        bad_prime_b,
        delta_v: delta_v.abs(),
        probe_bound,
        locus,
    })
}

pub fn adjoint_form(pair: &QuadricPair) -> QuadraticForm {
    pair.adjoint_form()
}

pub fn bad_prime_data(m1: IntMatrix, m2: IntMatrix, probe_bound: u64) -> Result<(u64, BigInt)> {
    Ok(validate_pair_with_probe(m1, m2, probe_bound)?.bad_prime_data())
}

/// N(m) = |2 Q2★(m) det M2|, or |2 det M2| when Q2★(m) = 0.
pub fn capacity_n(pair: &QuadricPair, m: &[i64]) -> u128 {
    let qs = pair.adjoint_value(m);
    let d = 2 * pair.det_m2 as i128;
    if qs != 0 {
        (qs * d).unsigned_abs()
    } else {
        d.unsigned_abs()
    }
}

/// Axis-aligned box Π [lo_i, hi_i].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl RealBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput("box must have lo < hi in every coordinate".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        Self { lo: vec![lo; n], hi: vec![hi; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn thicken(&self, d: f64) -> Self {
        Self {
            lo: self.lo.iter().map(|a| a - d).collect(),
            hi: self.hi.iter().map(|b| b + d).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            lo: self.lo.iter().zip(&self.hi).map(|(a, b)| (a * s).min(b * s)).collect(),
            hi: self.lo.iter().zip(&self.hi).map(|(a, b)| (a * s).max(b * s)).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            lo: self.hi.iter().map(|b| -b).collect(),
            hi: self.lo.iter().map(|a| -a).collect(),
        }
    }

    pub fn distance_to_point(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (a, b))| {
                let d = (a - v).max(v - b).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// sup of |Q| over the box, by corner and critical-edge sampling on a grid.
    pub fn sup_abs_form(&self, f: &QuadraticForm, grid: usize) -> f64 {
        let n = self.dim();
        let mut best: f64 = 0.0;
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        loop {
            for i in 0..n {
                x[i] = self.lo[i] + (self.hi[i] - self.lo[i]) * idx[i] as f64 / grid as f64;
            }
            best = best.max(f.eval_real(&x).abs());
            let mut k = 0;
            loop {
                if k == n {
                    return best;
                }
                idx[k] += 1;
                if idx[k] <= grid {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// Distance from the box to the real singular locus (union of real
/// eigenlines of M2⁻¹M1, and the origin).
pub fn singular_locus_clearance(pair: &QuadricPair, bx: &RealBox) -> f64 {
    let origin = vec![0.0; bx.dim()];
    let mut best = bx.distance_to_point(&origin);
    let t_max = bx.max_norm() + 1.0;
    for v in &pair.locus.real_eigenlines {
        let f = |t: f64| {
            let x: Vec<f64> = v.iter().map(|c| c * t).collect();
            bx.distance_to_point(&x)
        };
        // The distance along a line is convex in t.
        let (mut a, mut b) = (-t_max, t_max);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..200 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
        }
        best = best.min(fc.min(fd));
    }
    if best < 1e-12 {
        0.0
    } else {
        best
    }
}
