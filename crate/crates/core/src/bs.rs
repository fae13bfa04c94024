//! Beurling-Selberg majorants and minorants of a symmetric interval on R/Z.
//!
//! The polynomial is built from Vaaler's approximation of the sawtooth
//! psi(x) = x - floor(x) - 1/2 together with Fejer-kernel corrections at the two
//! endpoints, which gives Selberg's extremal pair of degree K.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BsError {
    #[error("interval length {0} must lie in (0, 1)")]
    Length(f64),
    #[error("degree K must be at least 1")]
    Degree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// A trigonometric polynomial sum_{|k| <= K} c(k) e(k x).
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    /// c(-K), .., c(K).
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(coeffs: Vec<Complex64>) -> TrigPoly {
        assert!(coeffs.len() % 2 == 1, "coefficients must be indexed by -K..=K");
        TrigPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let kk = self.degree() as i64;
        if k.abs() > kk {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + kk) as usize]
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let kk = self.degree() as i64;
        (-kk..=kk)
            .map(|k| self.coeff(k) * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsPoly {
    pub k: usize,
    pub length: f64,
    pub sign: Sign,
    /// I(0), .., I(K); I(-n) = I(n).
    pub coeffs: Vec<f64>,
}

impl BsPoly {
    pub fn coeff(&self, n: i64) -> f64 {
        let n = n.unsigned_abs() as usize;
        if n > self.k {
            0.0
        } else {
            self.coeffs[n]
        }
    }

    pub fn to_trig(&self) -> TrigPoly {
        let kk = self.k as i64;
        TrigPoly::new((-kk..=kk).map(|n| Complex64::new(self.coeff(n), 0.0)).collect())
    }
}

/// Coefficients of Vaaler's polynomial for the sawtooth at index n, 1 <= n <= K.
fn vaaler(n: usize, k: usize) -> f64 {
    let t = n as f64 / (k as f64 + 1.0);
    (-(1.0 - t) / (PI * t).tan() - 1.0 / PI) / (k as f64 + 1.0)
}

pub fn build_bs(k: usize, length: f64, sign: Sign) -> Result<BsPoly, BsError> {
    if k < 1 {
        return Err(BsError::Degree);
    }
    if !(length > 0.0 && length < 1.0) {
        return Err(BsError::Length(length));
    }
    let s = sign.as_f64();
    let kp1 = k as f64 + 1.0;
    let mut coeffs = vec![length + s / kp1];
    for n in 1..=k {
        let a = PI * n as f64 * length;
        coeffs.push(-vaaler(n, k) * a.sin() + s / kp1 * (1.0 - n as f64 / kp1) * a.cos());
    }
    Ok(BsPoly { k, length, sign, coeffs })
}

/// Real value of the polynomial at x.
pub fn bs_eval(poly: &BsPoly, x: f64) -> f64 {
    poly.coeffs[0]
        + 2.0
            * poly.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * (2.0 * PI * (i + 1) as f64 * x).cos())
                .sum::<f64>()
}

/// Indicator of the closed interval [-length/2, length/2] on R/Z.
pub fn interval_indicator(length: f64, x: f64) -> f64 {
    let y = x - x.round();
    if y.abs() <= length / 2.0 {
        1.0
    } else {
        0.0
    }
}

/// Uniform grid of `n` points on [-1/2, 1/2] plus the endpoints +- 1e-9.
pub fn sandwich_grid(length: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n).map(|i| -0.5 + i as f64 / (n - 1) as f64).collect();
    for e in [length / 2.0, -length / 2.0] {
        g.push(e - 1e-9);
        g.push(e + 1e-9);
    }
    g
}

/// Worst violation of the majorant (sign +) or minorant (sign -) property on a grid.
/// Zero or negative means no violation.
pub fn sandwich_violation(poly: &BsPoly, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&x| {
            let d = bs_eval(poly, x) - interval_indicator(poly.length, x);
            match poly.sign {
                Sign::Plus => -d,
                Sign::Minus => d,
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest (K+1) |I(k) - sin(pi k |I|)/(pi k)| over 1 <= k <= K; at most 1 by property (e).
pub fn coefficient_deviation(poly: &BsPoly) -> f64 {
    (1..=poly.k)
        .map(|n| {
            let target = (PI * n as f64 * poly.length).sin() / (PI * n as f64);
            (poly.coeffs[n] - target).abs() * (poly.k as f64 + 1.0)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSums {
    /// sum_{k>=1} I+(2k).
    pub even_plus: f64,
    /// sum_{k>=1} I+(k)^2 k.
    pub sq_plus: f64,
    /// sum_{k>=1} I-(k)^2 k.
    pub sq_minus: f64,
    /// sum_{k>=1} I+(k) I-(k) k.
    pub cross: f64,
    /// (1/2 pi^2) log(K |I|).
    pub reference: f64,
    /// False when K |I| <= 1, where the asymptotics do not apply.
    pub in_range: bool,
}

pub fn bs_fourier_sums(k: usize, length: f64) -> Result<FourierSums, BsError> {
    let plus = build_bs(k, length, Sign::Plus)?;
    let minus = build_bs(k, length, Sign::Minus)?;
    let even_plus = (1..=k / 2).map(|j| plus.coeffs[2 * j]).sum();
    let weighted = |a: &BsPoly, b: &BsPoly| -> f64 {
        (1..=k).map(|n| a.coeffs[n] * b.coeffs[n] * n as f64).sum()
    };
    Ok(FourierSums {
        even_plus,
        sq_plus: weighted(&plus, &plus),
        sq_minus: weighted(&minus, &minus),
        cross: weighted(&plus, &minus),
        reference: (k as f64 * length).ln() / (2.0 * PI * PI),
        in_range: k as f64 * length > 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zeroth_coefficients() {
        let p = build_bs(9, 0.3, Sign::Plus).unwrap();
        let m = build_bs(9, 0.3, Sign::Minus).unwrap();
        assert!((p.coeffs[0] - 0.4).abs() < 1e-15);
        assert!((m.coeffs[0] - 0.2).abs() < 1e-15);
        assert!(m.coeffs[0] < 0.3 && 0.3 < p.coeffs[0]);
        assert!(build_bs(9, 1.0, Sign::Plus).is_err());
        assert!(build_bs(0, 0.5, Sign::Plus).is_err());
    }

    #[test]
    fn sandwich_on_grid() {
        for k in [5, 20, 100] {
            for len in [0.1, 0.5] {
                let grid = sandwich_grid(len, 10_000);
                for s in [Sign::Plus, Sign::Minus] {
                    let p = build_bs(k, len, s).unwrap();
                    assert!(sandwich_violation(&p, &grid) <= 1e-12, "K={k} |I|={len} {s:?}");
                    assert!(coefficient_deviation(&p) <= 1.0 + 1e-12);
                }
                assert!(bs_eval(&build_bs(k, len, Sign::Plus).unwrap(), 0.0) >= 1.0);
            }
        }
    }

    #[test]
    fn trig_agrees_with_real_eval() {
        let p = build_bs(12, 0.25, Sign::Minus).unwrap();
        let t = p.to_trig();
        for x in [0.0, 0.1, -0.37, 0.49] {
            let v = t.eval(x);
            assert!(v.im.abs() < 1e-12);
            assert!((v.re - bs_eval(&p, x)).abs() < 1e-12);
        }
        let c = TrigPoly::new(vec![Complex64::new(0.7, 0.0)]);
        assert!((c.eval(0.3).re - 0.7).abs() < 1e-15);
    }

    #[test]
    fn fourier_sums_track_log() {
        for k in [100, 1000, 10_000] {
            let s = bs_fourier_sums(k, 0.1).unwrap();
            assert!(s.in_range);
            for v in [s.sq_plus, s.sq_minus, s.cross] {
                assert!((v - s.reference).abs() <= 1.5);
            }
            assert!(s.even_plus.abs() <= 1.5);
        }
        assert!(!bs_fourier_sums(5, 0.1).unwrap().in_range);
    }

    proptest! {
        #[test]
        fn even_and_bounded(k in 1usize..60, len in 0.01f64..0.99, x in -0.5f64..0.5) {
            let p = build_bs(k, len, Sign::Plus).unwrap();
            prop_assert!((bs_eval(&p, x) - bs_eval(&p, -x)).abs() < 1e-12);
            prop_assert_eq!(p.coeff(-3), p.coeff(3));
            prop_assert_eq!(p.coeff(k as i64 + 1), 0.0);
            prop_assert!(coefficient_deviation(&p) <= 1.0 + 1e-12);
        }
    }
}
