//! Finite fields F_{q^k} = F_p[t]/(m_k) with Zech-logarithm arithmetic.
//!
//! Each level stores its elements as discrete logarithms to a primitive
//! element. Primitive elements of different levels are chosen norm-compatible,
//! so the embedding F_{q^u} -> F_{q^k} multiplies logarithms by
//! (q^k - 1)/(q^u - 1) and embeddings compose.

use thiserror::Error;

/// Largest field for which log/Zech/trace tables are built.
pub const TABLE_CAP: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("extension degrees must be at least 1")]
    ZeroDegree,
    #[error("field of size {p}^{n} exceeds the table cap")]
    TooLarge { p: u32, n: u32 },
    #[error("level {0} is not built")]
    MissingLevel(u32),
    #[error("cross-level arithmetic: level {0} vs level {1}")]
    LevelMismatch(u32, u32),
}

/// Field element: 0 is zero, otherwise `1 + log_gamma(x)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A point of P^1 over some level; the level is carried by context.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum P1 {
    Inf,
    Aff(Fe),
}

/// An element tagged with its level, for checked cross-level use.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Elem {
    pub level: u32,
    pub fe: Fe,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense F_p polynomial helpers used only while constructing levels.
mod fp {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = (r[top] as u64 * inv as u64 % p as u64) as u32;
            if c != 0 {
                for i in 0..=dm {
                    let idx = top - dm + i;
                    r[idx] = (r[idx] + p - (c as u64 * m[i] as u64 % p as u64) as u32) % p;
                }
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] += x as u64 * y as u64;
            }
        }
        let v: Vec<u32> = prod.iter().map(|&c| (c % p as u64) as u32).collect();
        rem(&v, m, p)
    }

    pub fn powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut base = rem(a, m, p);
        let mut acc = vec![1u32];
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Ben-Or: m of degree n is irreducible iff gcd(x^{p^i} - x, m) = 1 for i <= n/2.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let n = m.len() - 1;
        if n == 1 {
            return true;
        }
        let mut h = vec![0, 1];
        for _ in 1..=n / 2 {
            h = powmod(&h, p as u64, m, p);
            let mut t = h.clone();
            t.resize(t.len().max(2), 0);
            t[1] = (t[1] + p - 1) % p;
            trim(&mut t);
            if gcd(&t, m, p).len() > 1 {
                return false;
            }
        }
        true
    }

    pub fn digits(mut enc: u64, p: u32, n: usize) -> Vec<u32> {
        let mut v = vec![0u32; n];
        for d in v.iter_mut() {
            *d = (enc % p as u64) as u32;
            enc /= p as u64;
        }
        v
    }

    pub fn encode(v: &[u32], p: u32) -> u64 {
        v.iter().rev().fold(0u64, |acc, &d| acc * p as u64 + d as u64)
    }
}

/// One concrete field F_{q^k}, realized as a degree e*k extension of F_p.
pub struct Level {
    k: u32,
    n: u32,
    p: u32,
    q: u64,
    size: u64,
    modulus: Vec<u32>,
    gen_minpoly: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    trace: Vec<u8>,
    neg_one: Fe,
}

impl Level {
    fn build(p: u32, e: u32, k: u32, lower: &[Level]) -> Result<Level, FieldError> {
        let n = e * k;
        let size = (p as u64)
            .checked_pow(n)
            .filter(|&s| s <= TABLE_CAP)
            .ok_or(FieldError::TooLarge { p, n })?;
        let q = (p as u64).pow(e);
        let nn = n as usize;

        let mut modulus = Vec::new();
        for idx in 0..size {
            let mut m = fp::digits(idx, p, nn);
            m.push(1);
            if fp::is_irreducible(&m, p) {
                modulus = m;
                break;
            }
        }
        assert!(!modulus.is_empty(), "no irreducible polynomial of degree {n}");

        let ord = size - 1;
        let factors = prime_factors(ord);
        let divisors: Vec<&Level> = lower.iter().filter(|l| k % l.k == 0 && l.k < k).collect();
        let mut gamma = Vec::new();
        'search: for enc in 1..size {
            let cand = fp::digits(enc, p, nn);
            for &f in &factors {
                if fp::powmod(&cand, ord / f, &modulus, p) == [1] {
                    continue 'search;
                }
            }
            for l in &divisors {
                let y = fp::powmod(&cand, ord / (l.size - 1), &modulus, p);
                let mut acc: Vec<u32> = Vec::new();
                for &c in l.gen_minpoly.iter().rev() {
                    acc = fp::mulmod(&acc, &y, &modulus, p);
                    if acc.is_empty() {
                        acc.push(0);
                    }
                    acc[0] = (acc[0] + c) % p;
                    fp::trim(&mut acc);
                }
                if !acc.is_empty() {
                    continue 'search;
                }
            }
            gamma = cand;
            fp::trim(&mut gamma);
            break;
        }
        assert!(!gamma.is_empty(), "no compatible primitive element at level {k}");

        let mut exp = vec![0u32; ord as usize];
        let mut log = vec![0u32; size as usize];
        let mut cur = vec![1u32];
        for i in 0..ord as usize {
            let enc = fp::encode(&cur, p);
            exp[i] = enc as u32;
            log[enc as usize] = i as u32;
            cur = fp::mulmod(&cur, &gamma, &modulus, p);
        }
        debug_assert_eq!(cur, vec![1]);

        let mut zech = vec![0u32; ord as usize];
        for i in 0..ord as usize {
            let enc = exp[i] as u64;
            let c0 = enc % p as u64;
            let bumped = enc - c0 + (c0 + 1) % p as u64;
            zech[i] = if bumped == 0 { 0 } else { log[bumped as usize] + 1 };
        }

        let mut lvl = Level {
            k,
            n,
            p,
            q,
            size,
            modulus,
            gen_minpoly: Vec::new(),
            exp,
            log,
            zech,
            trace: Vec::new(),
            neg_one: Fe(0),
        };
        lvl.neg_one = Fe((ord / 2) as u32 + 1);

        // Traces of the power basis, then extend linearly.
        let mut basis_tr = Vec::with_capacity(nn);
        let mut t_j = 1u64;
        for _ in 0..nn {
            let x = lvl.from_enc(t_j);
            let mut s = Fe::ZERO;
            let mut c = x;
            for _ in 0..nn {
                s = lvl.add(s, c);
                c = lvl.pow(c, p as u64);
            }
            let v = lvl.enc(s);
            assert!(v < p as u64, "trace left the prime field");
            basis_tr.push(v as u32);
            t_j *= p as u64;
        }
        let mut trace = vec![0u8; size as usize];
        for enc in 0..size {
            let d = fp::digits(enc, p, nn);
            let t: u64 = d.iter().zip(&basis_tr).map(|(&a, &b)| a as u64 * b as u64).sum();
            let fe = lvl.from_enc(enc);
            trace[fe.0 as usize] = (t % p as u64) as u8;
        }
        lvl.trace = trace;

        // Minimal polynomial of gamma over F_p, used by higher levels.
        let mut mp = vec![Fe::ONE];
        let mut root = Fe(2);
        for _ in 0..nn {
            let mut next = vec![Fe::ZERO; mp.len() + 1];
            for (i, &c) in mp.iter().enumerate() {
                next[i + 1] = lvl.add(next[i + 1], c);
                next[i] = lvl.sub(next[i], lvl.mul(c, root));
            }
            mp = next;
            root = lvl.pow(root, p as u64);
        }
        lvl.gen_minpoly = mp
            .iter()
            .map(|&c| {
                let v = lvl.enc(c);
                assert!(v < p as u64, "minimal polynomial not over F_p");
                v as u32
            })
            .collect();
        Ok(lvl)
    }

    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    /// Size of the base field F_q.
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Degree over F_p.
    pub fn degree_over_fp(&self) -> u32 {
        self.n
    }
    pub fn size(&self) -> u64 {
        self.size
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    #[inline]
    fn ord(&self) -> u32 {
        (self.size - 1) as u32
    }
    /// The primitive element used for logarithms.
    pub fn gen(&self) -> Fe {
        if self.size == 2 {
            Fe::ONE
        } else {
            Fe(2)
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let s = (a.0 - 1) + (b.0 - 1);
        let o = self.ord();
        Fe(1 + if s >= o { s - o } else { s })
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let o = self.ord();
        let (x, y) = (a.0 - 1, b.0 - 1);
        let d = if y >= x { y - x } else { y + o - x };
        let z = self.zech[d as usize];
        if z == 0 {
            return Fe::ZERO;
        }
        self.mul(a, Fe(z))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.mul(a, self.neg_one)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!a.is_zero(), "inverse of zero");
        let o = self.ord();
        Fe(1 + (o - (a.0 - 1)) % o)
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let o = self.ord() as u64;
        Fe(1 + (((a.0 - 1) as u64 % o) * (e % o) % o) as u32)
    }

    /// x -> x^q.
    pub fn frob(&self, a: Fe) -> Fe {
        self.pow(a, self.q)
    }

    /// Inverse of x -> x^p.
    pub fn pth_root(&self, a: Fe) -> Fe {
        self.pow(a, self.size / self.p as u64)
    }

    /// Absolute trace to F_p.
    #[inline]
    pub fn trace(&self, a: Fe) -> u32 {
        self.trace[a.0 as usize] as u32
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, c: i64) -> Fe {
        self.from_enc(c.rem_euclid(self.p as i64) as u64)
    }

    /// Element with the given base-p polynomial encoding.
    pub fn from_enc(&self, enc: u64) -> Fe {
        assert!(enc < self.size, "encoding out of range");
        if enc == 0 {
            Fe::ZERO
        } else {
            Fe(self.log[enc as usize] + 1)
        }
    }

    /// Base-p polynomial encoding; this is the canonical total order.
    pub fn enc(&self, a: Fe) -> u64 {
        if a.is_zero() {
            0
        } else {
            self.exp[(a.0 - 1) as usize] as u64
        }
    }

    /// Coordinates over F_p in the power basis of t.
    pub fn coords(&self, a: Fe) -> Vec<u32> {
        fp::digits(self.enc(a), self.p, self.n as usize)
    }

    /// If a lies in F_p, its integer value.
    pub fn as_fp(&self, a: Fe) -> Option<u32> {
        let v = self.enc(a);
        (v < self.p as u64).then_some(v as u32)
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.size).map(move |e| self.from_enc(e))
    }

    /// Smallest u | k with a in F_{q^u}.
    pub fn degree_of(&self, a: Fe) -> u32 {
        if a.is_zero() {
            return 1;
        }
        let o = self.ord() as u64;
        let l = (a.0 - 1) as u64;
        let mut qu = 1u64;
        for u in 1..=self.k {
            qu = qu * self.q % o.max(1);
            if self.k % u == 0 && l * qu % o == l % o {
                return u;
            }
        }
        self.k
    }
}

/// F_p ⊂ F_q ⊂ F_{q^k} for k = 1..k_max.
pub struct FieldTower {
    p: u32,
    e: u32,
    levels: Vec<Level>,
}

impl FieldTower {
    pub fn new(p: u32, e: u32, k_max: u32) -> Result<FieldTower, FieldError> {
        if p == 2 || !is_prime(p as u64) {
            return Err(FieldError::NotOddPrime(p));
        }
        if e == 0 || k_max == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let mut levels: Vec<Level> = Vec::new();
        for k in 1..=k_max {
            let l = Level::build(p, e, k, &levels)?;
            levels.push(l);
        }
        Ok(FieldTower { p, e, levels })
    }

    /// Build as many levels as fit under the table cap, up to `k_max`.
    pub fn up_to_cap(p: u32, e: u32, k_max: u32) -> Result<FieldTower, FieldError> {
        let mut k = k_max;
        while k > 1 && (p as u64).checked_pow(e * k).map_or(true, |s| s > TABLE_CAP) {
            k -= 1;
        }
        FieldTower::new(p, e, k)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }
    pub fn k_max(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, k: u32) -> &Level {
        self.try_level(k).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_level(&self, k: u32) -> Result<&Level, FieldError> {
        if k == 0 || k > self.k_max() {
            return Err(FieldError::MissingLevel(k));
        }
        Ok(&self.levels[k as usize - 1])
    }

    /// The base field F_q.
    pub fn base(&self) -> &Level {
        &self.levels[0]
    }

    fn scale(&self, lo: u32, hi: u32) -> u64 {
        assert!(hi % lo == 0, "level {lo} does not divide level {hi}");
        (self.level(hi).size - 1) / (self.level(lo).size - 1)
    }

    /// Embedding F_{q^u} -> F_{q^k} for u | k.
    #[inline]
    pub fn embed(&self, x: Fe, u: u32, k: u32) -> Fe {
        if x.is_zero() || u == k {
            return x;
        }
        let n = self.scale(u, k);
        Fe(1 + ((x.0 - 1) as u64 * n) as u32)
    }

    /// Preimage of x under the embedding F_{q^u} -> F_{q^k}, if x lies there.
    pub fn restrict(&self, x: Fe, k: u32, u: u32) -> Option<Fe> {
        if x.is_zero() || u == k {
            return Some(x);
        }
        let n = self.scale(u, k);
        let l = (x.0 - 1) as u64;
        (l % n == 0).then(|| Fe(1 + (l / n) as u32))
    }

    /// Embed a slice of base-field elements into level k.
    pub fn embed_all(&self, xs: &[Fe], k: u32) -> Vec<Fe> {
        xs.iter().map(|&x| self.embed(x, 1, k)).collect()
    }

    /// P^1(F_{q^k}): infinity first, then affine points in encoding order.
    pub fn enumerate_p1(&self, k: u32) -> Vec<P1> {
        let l = self.level(k);
        std::iter::once(P1::Inf).chain(l.elements().map(P1::Aff)).collect()
    }

    pub fn degree_over_base(&self, k: u32, pt: P1) -> u32 {
        match pt {
            P1::Inf => 1,
            P1::Aff(a) => self.level(k).degree_of(a),
        }
    }

    /// Frobenius over F_q on P^1(F_{q^k}).
    pub fn frob_p1(&self, k: u32, pt: P1) -> P1 {
        match pt {
            P1::Inf => P1::Inf,
            P1::Aff(a) => P1::Aff(self.level(k).frob(a)),
        }
    }

    pub fn elem(&self, k: u32, fe: Fe) -> Elem {
        Elem { level: k, fe }
    }

    pub fn add_elems(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        if a.level != b.level {
            return Err(FieldError::LevelMismatch(a.level, b.level));
        }
        Ok(Elem { level: a.level, fe: self.try_level(a.level)?.add(a.fe, b.fe) })
    }

    pub fn mul_elems(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        if a.level != b.level {
            return Err(FieldError::LevelMismatch(a.level, b.level));
        }
        Ok(Elem { level: a.level, fe: self.try_level(a.level)?.mul(a.fe, b.fe) })
    }

    pub fn embed_elem(&self, a: Elem, k: u32) -> Elem {
        Elem { level: k, fe: self.embed(a.fe, a.level, k) }
    }

    pub fn abs_trace(&self, a: Elem) -> u32 {
        self.level(a.level).trace(a.fe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_towers() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(t.level(1).size(), 3);
        assert_eq!(t.level(2).size(), 9);
        let t = FieldTower::new(3, 1, 6).unwrap();
        assert_eq!(t.level(6).size(), 729);
        assert!(FieldTower::new(4, 1, 1).is_err());
        assert!(FieldTower::new(2, 1, 1).is_err());
    }

    #[test]
    fn moduli_irreducible_and_lex_smallest() {
        let t = FieldTower::new(3, 1, 4).unwrap();
        // x^2 + 1 is the smallest monic irreducible quadratic over F_3.
        assert_eq!(t.level(2).modulus(), &[1, 0, 1]);
        for k in 1..=4 {
            assert!(fp::is_irreducible(t.level(k).modulus(), 3));
        }
    }

    #[test]
    fn trace_basics() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        let l = t.level(2);
        assert_eq!(l.trace(Fe::ZERO), 0);
        assert_eq!(l.trace(Fe::ONE), 2);
        let t5 = FieldTower::new(5, 1, 2).unwrap();
        let mut hist = [0; 5];
        for x in t5.level(2).elements() {
            hist[t5.level(2).trace(x) as usize] += 1;
        }
        assert_eq!(hist, [5; 5]);
    }

    #[test]
    fn trace_fibers_uniform() {
        let t = FieldTower::new(3, 1, 6).unwrap();
        for k in 1..=6 {
            let l = t.level(k);
            let mut hist = [0u64; 3];
            for x in l.elements() {
                hist[l.trace(x) as usize] += 1;
            }
            assert_eq!(hist, [l.size() / 3; 3]);
        }
    }

    #[test]
    fn trace_transitivity() {
        let t = FieldTower::new(3, 1, 8).unwrap();
        for (u, k) in [(1, 2), (1, 4), (2, 4), (2, 6), (3, 6), (4, 8), (2, 8)] {
            let lu = t.level(u);
            let lk = t.level(k);
            for b in lu.elements() {
                let emb = t.embed(b, u, k);
                assert_eq!(lk.trace(emb), (lu.trace(b) * (k / u)) % 3);
            }
        }
    }

    #[test]
    fn embeddings_are_homomorphisms_and_compose() {
        let t = FieldTower::new(3, 1, 12).unwrap();
        for (u, k) in [(1, 2), (2, 4), (2, 6), (3, 6), (4, 12), (6, 12), (3, 12)] {
            let (lu, lk) = (t.level(u), t.level(k));
            for a in lu.elements().step_by(7) {
                for b in lu.elements().step_by(5) {
                    let s = t.embed(lu.add(a, b), u, k);
                    assert_eq!(s, lk.add(t.embed(a, u, k), t.embed(b, u, k)));
                    let m = t.embed(lu.mul(a, b), u, k);
                    assert_eq!(m, lk.mul(t.embed(a, u, k), t.embed(b, u, k)));
                }
            }
        }
        for (v, u, k) in [(1, 2, 4), (2, 4, 12), (3, 6, 12), (1, 3, 12), (2, 6, 12)] {
            for a in t.level(v).elements() {
                assert_eq!(t.embed(t.embed(a, v, u), u, k), t.embed(a, v, k));
            }
        }
    }

    #[test]
    fn base_extension_q9() {
        let t = FieldTower::new(3, 2, 3).unwrap();
        assert_eq!(t.q(), 9);
        assert_eq!(t.level(3).size(), 729);
        let (l1, l3) = (t.level(1), t.level(3));
        for a in l1.elements() {
            for b in l1.elements() {
                assert_eq!(t.embed(l1.mul(a, b), 1, 3), l3.mul(t.embed(a, 1, 3), t.embed(b, 1, 3)));
                assert_eq!(t.embed(l1.add(a, b), 1, 3), l3.add(t.embed(a, 1, 3), t.embed(b, 1, 3)));
            }
        }
    }

    #[test]
    fn prime_field_constants_are_fixed() {
        let t = FieldTower::new(5, 1, 4).unwrap();
        for c in 0..5 {
            assert_eq!(t.embed(t.level(1).from_int(c), 1, 4), t.level(4).from_int(c));
        }
    }

    #[test]
    fn p1_enumeration_and_orbits() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(t.enumerate_p1(1).len(), 4);
        let pts = t.enumerate_p1(2);
        assert_eq!(pts.len(), 10);
        assert_eq!(pts[0], P1::Inf);
        let mut by_deg = [0; 3];
        for &pt in &pts {
            by_deg[t.degree_over_base(2, pt) as usize] += 1;
        }
        // 4 rational points, 6 points in 3 orbits of size 2.
        assert_eq!(by_deg[1], 4);
        assert_eq!(by_deg[2], 6);
        let g = t.level(2).gen();
        assert_eq!(t.level(2).degree_of(g), 2);
        assert_eq!(t.level(2).degree_of(t.embed(t.level(1).from_int(2), 1, 2)), 1);
        for &pt in &pts {
            assert!(pts.contains(&t.frob_p1(2, pt)));
        }
    }

    #[test]
    fn checked_cross_level() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        let a = t.elem(1, Fe::ONE);
        let b = t.elem(2, Fe::ONE);
        assert!(t.add_elems(a, b).is_err());
        let s = t.add_elems(t.embed_elem(a, 2), b).unwrap();
        assert_eq!(t.abs_trace(s), 1);
    }
}
