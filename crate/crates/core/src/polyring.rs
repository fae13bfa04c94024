//! Univariate polynomials over a field level, binary forms, factorization,
//! and closed-point counts.

use crate::gfq::{Fe, FieldTower, Level, P1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

const SPLIT_SEED: u64 = 0x5eed_0f_cafe;

/// Dense polynomial, index = degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Poly(Vec<Fe>);

impl Poly {
    pub fn new(mut c: Vec<Fe>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }
    pub fn one() -> Poly {
        Poly(vec![Fe::ONE])
    }
    pub fn x() -> Poly {
        Poly(vec![Fe::ZERO, Fe::ONE])
    }
    pub fn constant(c: Fe) -> Poly {
        Poly::new(vec![c])
    }
    pub fn monomial(c: Fe, n: usize) -> Poly {
        let mut v = vec![Fe::ZERO; n + 1];
        v[n] = c;
        Poly::new(v)
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }
    pub fn coeff(&self, i: usize) -> Fe {
        self.0.get(i).copied().unwrap_or(Fe::ZERO)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    /// Degree; the zero polynomial has degree -1.
    pub fn deg(&self) -> isize {
        self.0.len() as isize - 1
    }
    pub fn lc(&self) -> Fe {
        self.0.last().copied().unwrap_or(Fe::ZERO)
    }
    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0] == Fe::ONE
    }
}

/// Arithmetic in L[x] for a fixed level L.
#[derive(Clone, Copy)]
pub struct PolyRing<'a> {
    pub lv: &'a Level,
}

impl<'a> PolyRing<'a> {
    pub fn new(lv: &'a Level) -> Self {
        PolyRing { lv }
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        Poly::new((0..n).map(|i| self.lv.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        Poly::new((0..n).map(|i| self.lv.sub(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly::new(a.0.iter().map(|&c| self.lv.neg(c)).collect())
    }

    pub fn scale(&self, a: &Poly, c: Fe) -> Poly {
        Poly::new(a.0.iter().map(|&x| self.lv.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fe::ZERO; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                v[i + j] = self.lv.add(v[i + j], self.lv.mul(x, y));
            }
        }
        Poly::new(v)
    }

    pub fn pow(&self, a: &Poly, e: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }

    pub fn divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        assert!(!b.is_zero(), "division by zero polynomial");
        if a.deg() < b.deg() {
            return (Poly::zero(), a.clone());
        }
        let db = b.deg() as usize;
        let inv = self.lv.inv(b.lc());
        let mut r = a.0.clone();
        let mut quo = vec![Fe::ZERO; r.len() - db];
        for top in (db..r.len()).rev() {
            let c = self.lv.mul(r[top], inv);
            if c.is_zero() {
                continue;
            }
            quo[top - db] = c;
            for i in 0..=db {
                let idx = top - db + i;
                r[idx] = self.lv.sub(r[idx], self.lv.mul(c, b.0[i]));
            }
        }
        r.truncate(db);
        (Poly::new(quo), Poly::new(r))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        self.divrem(a, b).1
    }

    /// Quotient, asserting the division is exact.
    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.divrem(a, b);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        self.scale(a, self.lv.inv(a.lc()))
    }

    /// Monic gcd; gcd(a, 0) = monic(a). Panics if both are zero.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        assert!(!(a.is_zero() && b.is_zero()), "gcd(0, 0)");
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// (g, s, t) with s*a + t*b = g monic.
    pub fn ext_gcd(&self, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.sub(&t0, &self.mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = self.lv.inv(r0.lc());
        (self.scale(&r0, inv), self.scale(&s0, inv), self.scale(&t0, inv))
    }

    /// Inverse of a modulo m (gcd must be 1).
    pub fn inv_mod(&self, a: &Poly, m: &Poly) -> Poly {
        let (g, s, _) = self.ext_gcd(&self.rem(a, m), m);
        assert!(g.is_one(), "not invertible modulo m");
        self.rem(&s, m)
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul(a, b), m)
    }

    pub fn powmod(&self, a: &Poly, mut e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(a, m);
        let mut acc = self.rem(&Poly::one(), m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &base, m);
            }
            base = self.mulmod(&base, &base, m);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        Poly::new(
            a.0.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.lv.mul(c, self.lv.from_int(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, a: &Poly, x: Fe) -> Fe {
        a.0.iter().rev().fold(Fe::ZERO, |acc, &c| self.lv.add(self.lv.mul(acc, x), c))
    }

    /// f(x)^(1/p) for f with f' = 0.
    fn pth_root(&self, f: &Poly) -> Poly {
        let p = self.lv.p() as usize;
        Poly::new(f.0.iter().step_by(p).map(|&c| self.lv.pth_root(c)).collect())
    }

    pub fn is_squarefree(&self, f: &Poly) -> bool {
        if f.deg() <= 0 {
            return true;
        }
        self.gcd(f, &self.derivative(f)).deg() == 0
    }

    /// Squarefree decomposition of a monic polynomial: pairs (s_i, i) with f = prod s_i^i.
    pub fn squarefree_decomposition(&self, f: &Poly) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if f.deg() <= 0 {
            return out;
        }
        let f = self.monic(f);
        let p = self.lv.p();
        let c = self.gcd(&f, &self.derivative(&f));
        let mut w = self.div_exact(&f, &c);
        let mut c = c;
        let mut i = 1;
        while w.deg() > 0 {
            let y = self.gcd(&w, &c);
            let z = self.div_exact(&w, &y);
            if z.deg() > 0 {
                out.push((z, i));
            }
            i += 1;
            c = self.div_exact(&c, &y);
            w = y;
        }
        if c.deg() > 0 {
            let root = self.pth_root(&c);
            for (s, m) in self.squarefree_decomposition(&root) {
                out.push((s, m * p));
            }
        }
        out
    }

    /// Distinct-degree factorization of a squarefree monic polynomial.
    fn ddf(&self, f: &Poly) -> Vec<(Poly, u32)> {
        let q = self.lv.size() as u128;
        let mut out = Vec::new();
        let mut f = f.clone();
        let mut h = Poly::x();
        let mut i = 1u32;
        while f.deg() >= 2 * i as isize {
            h = self.powmod(&h, q, &f);
            let g = self.gcd(&self.sub(&h, &Poly::x()), &f);
            if g.deg() > 0 {
                f = self.div_exact(&f, &g);
                h = self.rem(&h, &f);
                out.push((g, i));
            }
            i += 1;
        }
        if f.deg() > 0 {
            out.push((f.clone(), f.deg() as u32));
        }
        out
    }

    /// Equal-degree splitting (Cantor-Zassenhaus, odd characteristic).
    fn edf(&self, f: &Poly, r: u32, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
        let n = f.deg() as u32;
        if n == r {
            out.push(f.clone());
            return;
        }
        let e = ((self.lv.size() as u128).pow(r) - 1) / 2;
        let size = self.lv.size();
        loop {
            let a = Poly::new(
                (0..n).map(|_| self.lv.from_enc(rng.gen_range(0..size))).collect(),
            );
            if a.deg() < 1 {
                continue;
            }
            let b = self.sub(&self.powmod(&a, e, f), &Poly::one());
            if b.is_zero() {
                continue;
            }
            let d = self.gcd(&b, f);
            if d.deg() > 0 && d.deg() < f.deg() {
                let rest = self.div_exact(f, &d);
                self.edf(&d, r, rng, out);
                self.edf(&rest, r, rng, out);
                return;
            }
        }
    }

    /// Factorization into monic irreducibles: (leading coefficient, [(P, mult)]),
    /// sorted by degree then coefficients.
    pub fn factor(&self, f: &Poly) -> (Fe, Vec<(Poly, u32)>) {
        assert!(!f.is_zero(), "factor of zero polynomial");
        let lc = f.lc();
        let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
        let mut out = Vec::new();
        for (s, m) in self.squarefree_decomposition(f) {
            for (g, r) in self.ddf(&s) {
                let mut parts = Vec::new();
                self.edf(&g, r, &mut rng, &mut parts);
                out.extend(parts.into_iter().map(|p| (p, m)));
            }
        }
        out.sort_by(|a, b| (a.0.deg(), self.key(&a.0)).cmp(&(b.0.deg(), self.key(&b.0))));
        (lc, out)
    }

    pub fn is_irreducible(&self, f: &Poly) -> bool {
        if f.deg() < 1 {
            return false;
        }
        let (_, fs) = self.factor(f);
        fs.len() == 1 && fs[0].1 == 1
    }

    /// Encoding-based sort key (coefficients from the top down).
    pub fn key(&self, f: &Poly) -> Vec<u64> {
        f.0.iter().rev().map(|&c| self.lv.enc(c)).collect()
    }

    /// All monic irreducibles of degree m, in key order.
    pub fn monic_irreducibles(&self, m: usize) -> Vec<Poly> {
        let size = self.lv.size();
        let count = size.pow(m as u32);
        let mut out = Vec::new();
        for idx in 0..count {
            let mut c = Vec::with_capacity(m + 1);
            let mut t = idx;
            for _ in 0..m {
                c.push(self.lv.from_enc(t % size));
                t /= size;
            }
            c.push(Fe::ONE);
            let f = Poly::new(c);
            if self.is_irreducible(&f) {
                out.push(f);
            }
        }
        out.sort_by_key(|f| self.key(f));
        out
    }
}

/// Binary form of degree d: c[i] is the coefficient of X^i Z^(d-i).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Form {
    c: Vec<Fe>,
}

impl Form {
    pub fn new(c: Vec<Fe>) -> Form {
        assert!(!c.is_empty(), "form needs d+1 coefficients");
        Form { c }
    }
    pub fn zero(d: usize) -> Form {
        Form { c: vec![Fe::ZERO; d + 1] }
    }
    /// Homogenize f to degree d (requires deg f <= d).
    pub fn from_poly(f: &Poly, d: usize) -> Form {
        assert!(f.deg() <= d as isize, "polynomial degree exceeds form degree");
        let mut c = f.coeffs().to_vec();
        c.resize(d + 1, Fe::ZERO);
        Form { c }
    }
    /// Z^d.
    pub fn z_power(d: usize) -> Form {
        let mut c = vec![Fe::ZERO; d + 1];
        c[0] = Fe::ONE;
        Form { c }
    }
    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    /// h*(x) = h(x, 1).
    pub fn upper(&self) -> Poly {
        Poly::new(self.c.clone())
    }
    /// h_*(z) = h(1, z).
    pub fn lower(&self) -> Poly {
        Poly::new(self.c.iter().rev().copied().collect())
    }
    /// Value at [1:0].
    pub fn at_infinity(&self) -> Fe {
        self.c[self.degree()]
    }
    /// Exponent of Z dividing the form (d for the zero form).
    pub fn z_order(&self) -> usize {
        let u = self.upper();
        (self.degree() as isize - u.deg()).min(self.degree() as isize + 1) as usize
    }
    /// Lexicographic index with c[0] most significant.
    pub fn index(&self, lv: &Level) -> u64 {
        self.c.iter().fold(0u64, |acc, &x| acc * lv.size() + lv.enc(x))
    }
    pub fn from_index(lv: &Level, d: usize, mut idx: u64) -> Form {
        let mut c = vec![Fe::ZERO; d + 1];
        for i in (0..=d).rev() {
            c[i] = lv.from_enc(idx % lv.size());
            idx /= lv.size();
        }
        Form { c }
    }
}

/// A closed point of P^1 over F_q: infinity (the form Z) or a monic irreducible.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Place {
    Inf,
    Finite(Poly),
}

impl Place {
    pub fn degree(&self) -> u32 {
        match self {
            Place::Inf => 1,
            Place::Finite(p) => p.deg() as u32,
        }
    }
    /// The homogeneous form of the place, of its own degree.
    pub fn form(&self) -> Form {
        match self {
            Place::Inf => Form::z_power(1),
            Place::Finite(p) => Form::from_poly(p, p.deg() as usize),
        }
    }
}

/// Factorization of a nonzero binary form: unit times prod P^m.
pub fn factor_form(r: &PolyRing, h: &Form) -> (Fe, Vec<(Place, u32)>) {
    assert!(!h.is_zero(), "factor of zero form");
    let up = h.upper();
    let (lc, fs) = r.factor(&up);
    let mut out: Vec<(Place, u32)> = fs.into_iter().map(|(p, m)| (Place::Finite(p), m)).collect();
    let a = h.z_order();
    if a > 0 {
        out.insert(0, (Place::Inf, a as u32));
    }
    (lc, out)
}

/// Squarefree test on both charts.
pub fn form_is_squarefree(r: &PolyRing, h: &Form) -> bool {
    assert!(!h.is_zero(), "squarefree test of zero form");
    r.is_squarefree(&h.upper()) && r.is_squarefree(&h.lower())
}

/// Coprimality of two forms of the same degree.
pub fn forms_coprime(r: &PolyRing, g: &Form, h: &Form) -> bool {
    if g.is_zero() || h.is_zero() {
        return g.degree() == 0 && !(g.is_zero() && h.is_zero());
    }
    if g.at_infinity().is_zero() && h.at_infinity().is_zero() {
        return false;
    }
    r.gcd(&g.upper(), &h.upper()).deg() == 0
}

/// Factorization type: (r_i, multiplicities sorted descending), r_i ascending.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct FactorizationType(pub Vec<(u32, Vec<u32>)>);

impl FactorizationType {
    pub fn from_pairs(pairs: &[(u32, u32)]) -> FactorizationType {
        let mut groups: Vec<(u32, Vec<u32>)> = Vec::new();
        for &(r, m) in pairs {
            match groups.iter_mut().find(|g| g.0 == r) {
                Some(g) => g.1.push(m),
                None => groups.push((r, vec![m])),
            }
        }
        for g in groups.iter_mut() {
            g.1.sort_unstable_by(|a, b| b.cmp(a));
        }
        groups.sort();
        FactorizationType(groups)
    }

    /// Parse "2^2" or "1^2,1^1" (parentheses optional).
    pub fn parse(s: &str) -> Result<FactorizationType, String> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut pairs = Vec::new();
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (r, m) = part.split_once('^').unwrap_or((part, "1"));
            let r: u32 = r.trim().parse().map_err(|_| format!("bad degree in '{part}'"))?;
            let m: u32 = m.trim().parse().map_err(|_| format!("bad multiplicity in '{part}'"))?;
            if r == 0 || m == 0 {
                return Err(format!("degrees and multiplicities must be positive in '{part}'"));
            }
            pairs.push((r, m));
        }
        if pairs.is_empty() {
            return Err("empty factorization type".into());
        }
        Ok(FactorizationType::from_pairs(&pairs))
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(r, ms)| r * ms.iter().sum::<u32>()).sum()
    }
    /// Number of geometric poles, sum of l_i r_i.
    pub fn num_poles(&self) -> u32 {
        self.0.iter().map(|(r, ms)| r * ms.len() as u32).sum()
    }
    /// (r_i, l_i).
    pub fn degree_counts(&self) -> Vec<(u32, u32)> {
        self.0.iter().map(|(r, ms)| (*r, ms.len() as u32)).collect()
    }
}

impl fmt::Display for FactorizationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .flat_map(|(r, ms)| ms.iter().map(move |m| format!("{r}^{m}")))
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn factorization_type(r: &PolyRing, h: &Form) -> FactorizationType {
    let (_, fs) = factor_form(r, h);
    let pairs: Vec<(u32, u32)> = fs.iter().map(|(pl, m)| (pl.degree(), *m)).collect();
    FactorizationType::from_pairs(&pairs)
}

fn mobius(n: u32) -> i32 {
    let mut n = n;
    let mut res = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            res = -res;
        }
        d += 1;
    }
    if n > 1 {
        res = -res;
    }
    res
}

fn pi_memo() -> &'static Mutex<HashMap<(u64, u32), u128>> {
    static MEMO: OnceLock<Mutex<HashMap<(u64, u32), u128>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Number of monic irreducibles of degree m in F_q[X].
pub fn count_irreducible(q: u64, m: u32) -> u128 {
    assert!(m >= 1, "degree must be positive");
    if let Some(&v) = pi_memo().lock().unwrap().get(&(q, m)) {
        return v;
    }
    let mut s: i128 = 0;
    for e in 1..=m {
        if m % e == 0 {
            s += mobius(e) as i128 * (q as i128).pow(m / e);
        }
    }
    let v = (s / m as i128) as u128;
    pi_memo().lock().unwrap().insert((q, m), v);
    v
}

/// Number of closed points of degree m on P^1 over F_q.
pub fn count_closed_points(q: u64, m: u32) -> u128 {
    count_irreducible(q, m) + u128::from(m == 1)
}

/// Zero test and chart value of a form at a point of P^1(F_{q^k}).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FormValue {
    pub is_zero: bool,
    pub value: Fe,
}

pub fn homog_eval(t: &FieldTower, h: &Form, k: u32, pt: P1) -> FormValue {
    let lk = t.level(k);
    let value = match pt {
        P1::Inf => t.embed(h.at_infinity(), 1, k),
        P1::Aff(x) => h
            .coeffs()
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| lk.add(lk.mul(acc, x), t.embed(c, 1, k))),
    };
    FormValue { is_zero: value.is_zero(), value }
}

/// Minimal polynomial over F_q of a point of P^1(F_{q^k}).
pub fn minimal_polynomial(t: &FieldTower, k: u32, pt: P1) -> Place {
    let a = match pt {
        P1::Inf => return Place::Inf,
        P1::Aff(a) => a,
    };
    let lk = t.level(k);
    let rk = PolyRing::new(lk);
    let u = lk.degree_of(a);
    let mut m = Poly::one();
    let mut c = a;
    for _ in 0..u {
        m = rk.mul(&m, &Poly::new(vec![lk.neg(c), Fe::ONE]));
        c = lk.frob(c);
    }
    let coeffs = m
        .coeffs()
        .iter()
        .map(|&x| t.restrict(x, k, 1).expect("minimal polynomial not over F_q"))
        .collect();
    Place::Finite(Poly::new(coeffs))
}
