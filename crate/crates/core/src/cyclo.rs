//! Exact arithmetic in Z[zeta_p] on the power basis 1, zeta, .., zeta^{p-2}.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cyc {
    p: u32,
    c: Vec<i128>,
}

impl Cyc {
    pub fn zero(p: u32) -> Cyc {
        Cyc { p, c: vec![0; p as usize - 1] }
    }

    pub fn from_int(p: u32, n: i128) -> Cyc {
        let mut z = Cyc::zero(p);
        z.c[0] = n;
        z
    }

    pub fn one(p: u32) -> Cyc {
        Cyc::from_int(p, 1)
    }

    /// zeta^j.
    pub fn zeta_pow(p: u32, j: u64) -> Cyc {
        let mut full = vec![0i128; p as usize];
        full[(j % p as u64) as usize] = 1;
        Cyc::from_full(p, full)
    }

    /// Reduce a vector on 1..zeta^{p-1} using 1 + zeta + .. + zeta^{p-1} = 0.
    pub fn from_full(p: u32, mut full: Vec<i128>) -> Cyc {
        let top = full[p as usize - 1];
        full.truncate(p as usize - 1);
        for x in full.iter_mut() {
            *x -= top;
        }
        Cyc { p, c: full }
    }

    /// sum_t cnt[t] zeta^{h t}.
    pub fn from_counts(p: u32, cnt: &[u64], h: u32) -> Cyc {
        let mut full = vec![0i128; p as usize];
        for (t, &n) in cnt.iter().enumerate() {
            full[(t as u64 * h as u64 % p as u64) as usize] += n as i128;
        }
        Cyc::from_full(p, full)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[i128] {
        &self.c
    }

    pub fn from_coords(p: u32, c: Vec<i128>) -> Cyc {
        assert_eq!(c.len(), p as usize - 1);
        Cyc { p, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Cyc) -> Cyc {
        Cyc { p: self.p, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Cyc) -> Cyc {
        Cyc { p: self.p, c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: i128) -> Cyc {
        Cyc { p: self.p, c: self.c.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, o: &Cyc) -> Cyc {
        let p = self.p as usize;
        let mut full = vec![0i128; p];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                full[(i + j) % p] += a * b;
            }
        }
        Cyc::from_full(self.p, full)
    }

    /// Exact division by a rational integer, None when not divisible.
    pub fn div_exact(&self, k: i128) -> Option<Cyc> {
        if self.c.iter().any(|a| a % k != 0) {
            return None;
        }
        Some(Cyc { p: self.p, c: self.c.iter().map(|a| a / k).collect() })
    }

    /// The rational integer this element equals, if it lies in Z.
    pub fn as_int(&self) -> Option<i128> {
        if self.c[1..].iter().all(|&x| x == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }

    /// Galois action zeta -> zeta^h.
    pub fn galois(&self, h: u32) -> Cyc {
        let p = self.p as usize;
        let mut full = vec![0i128; p];
        for (i, &a) in self.c.iter().enumerate() {
            full[i * h as usize % p] += a;
        }
        Cyc::from_full(self.p, full)
    }

    pub fn conj(&self) -> Cyc {
        self.galois(self.p - 1)
    }

    /// Image under zeta -> exp(2 pi i / p).
    pub fn embed(&self) -> Complex64 {
        self.c
            .iter()
            .enumerate()
            .map(|(i, &a)| Complex64::from_polar(a as f64, 2.0 * PI * i as f64 / self.p as f64))
            .sum()
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            parts.push(match i {
                0 => format!("{a}"),
                1 => format!("{a}z"),
                _ => format!("{a}z^{i}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Polynomial product with coefficients in Z[zeta_p].
pub fn poly_mul(a: &[Cyc], b: &[Cyc]) -> Vec<Cyc> {
    let p = a[0].p();
    let mut out = vec![Cyc::zero(p); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb(p: u32) -> impl Strategy<Value = Cyc> {
        proptest::collection::vec(-20i128..20, p as usize - 1).prop_map(move |c| Cyc::from_coords(p, c))
    }

    #[test]
    fn basics() {
        let z = Cyc::zeta_pow(3, 1);
        let z2 = z.mul(&z);
        assert_eq!(z2, Cyc::from_coords(3, vec![-1, -1]));
        assert_eq!(z.add(&z2).add(&Cyc::one(3)), Cyc::zero(3));
        let s = Cyc::from_counts(3, &[1, 2, 0], 1);
        assert_eq!(s, Cyc::from_coords(3, vec![1, 2]));
        assert!((s.embed() - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        assert_eq!(s.mul(&s.conj()).as_int(), Some(3));
    }

    proptest! {
        #[test]
        fn galois_is_ring_hom(a in arb(5), b in arb(5), h in 1u32..5) {
            prop_assert_eq!(a.mul(&b).galois(h), a.galois(h).mul(&b.galois(h)));
            prop_assert_eq!(a.add(&b).galois(h), a.galois(h).add(&b.galois(h)));
        }

        #[test]
        fn embedding_is_ring_hom(a in arb(7), b in arb(7)) {
            let lhs = a.mul(&b).embed();
            let rhs = a.embed() * b.embed();
            prop_assert!((lhs - rhs).norm() < 1e-6 * (1.0 + rhs.norm()));
        }

        #[test]
        fn norm_is_rational(a in arb(5)) {
            let n = (1..5).fold(Cyc::one(5), |acc, h| acc.mul(&a.galois(h)));
            prop_assert!(n.as_int().is_some());
        }
    }
}
