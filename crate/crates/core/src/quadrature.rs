//! Gauss–Legendre rules and composite panels.

use std::f64::consts::PI;

/// Nodes and weights of the k-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1);
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..(k + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 1 { x } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    (nodes, weights)
}

/// Composite rule: `panels` equal panels of a k-point rule on [a, b].
pub fn composite(a: f64, b: f64, panels: usize, k: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(k);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * k);
    let mut weights = Vec::with_capacity(panels * k);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// ∫_a^b f with a composite rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, k: usize) -> f64 {
    let (x, w) = composite(a, b, panels, k);
    x.iter().zip(&w).map(|(xi, wi)| wi * f(*xi)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for k in 1..12 {
            let (x, w) = gauss_legendre(k);
            for deg in 0..2 * k {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "k={k} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_integrates_exp() {
        let v = integrate(f64::exp, 0.0, 1.0, 4, 8);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }
}
