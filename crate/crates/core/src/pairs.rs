//! Example pairs used by the tests, the CLI and the asymptotic report.

use crate::error::Result;
use crate::forms::{validate_pair, QuadricPair, RealBox};
use crate::integrals::{make_weight, WeightFunction, WeightKind};

/// Non-diagonal n = 2 pair with irrational eigenvalue ratios.
pub fn n2() -> QuadricPair {
    validate_pair(vec![vec![1, 1], vec![1, -2]], vec![vec![2, 1], vec![1, -1]]).expect("shipped n=2 pair")
}

/// Q1 = x² − y², Q2 = x² + y² − 2z²; its singular lines are the coordinate axes.
pub fn n3() -> QuadricPair {
    QuadricPair::diagonal(&[1, -1, 0], &[1, 1, -2]).expect("shipped n=3 pair")
}

pub fn n4() -> QuadricPair {
    QuadricPair::diagonal(&[1, 1, -1, -1], &[1, -1, 3, -3]).expect("shipped n=4 pair")
}

pub fn n6() -> QuadricPair {
    QuadricPair::diagonal(&[1, 2, 3, -1, -2, -3], &[1, -1, 1, 2, -3, 1]).expect("shipped n=6 pair")
}

pub fn by_name(name: &str) -> Option<QuadricPair> {
    match name {
        "n2" => Some(n2()),
        "n3" => Some(n3()),
        "n4" => Some(n4()),
        "n6" => Some(n6()),
        _ => None,
    }
}

pub const NAMES: [&str; 4] = ["n2", "n3", "n4", "n6"];

/// Smooth box on [1, 2] × [2, 3] with H = 2; the eigenlines have slopes near 0.30 and −3.3.
pub fn n2_weight() -> Result<WeightFunction> {
    let bx = RealBox::new(vec![1.0, 2.0], vec![2.0, 3.0])?;
    make_weight(&n2(), WeightKind::SmoothBox, bx, 2.0)
}

/// Smooth box on [1.5, 2.5]³ with H = 1, support [0.5, 3.5]³.
pub fn n3_weight() -> Result<WeightFunction> {
    make_weight(&n3(), WeightKind::SmoothBox, RealBox::cube(3, 1.5, 2.5), 1.0)
}

pub fn n4_box() -> RealBox {
    RealBox::cube(4, 1.0, 2.0)
}

pub fn n6_box() -> RealBox {
    RealBox::cube(6, 1.0, 2.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_pairs_validate() {
        for name in NAMES {
            let p = by_name(name).unwrap();
            assert_eq!(p.locus.eigenvalues.len(), p.n());
        }
        n2_weight().unwrap();
        n3_weight().unwrap();
    }
}
