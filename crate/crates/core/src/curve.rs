//! A single curve y^p - y = g/h: fiber counts, per-level trace histograms and
//! reduction to pole orders prime to p.

use crate::families::PoleData;
use crate::gfq::{Fe, FieldTower, P1};
use crate::polyring::{Form, Place, Poly, PolyRing};

/// Fiber size over a point of P^1(F_{q^k}): 1 at a pole, p when tr f = 0, else 0.
pub fn fiber_count(t: &FieldTower, g: &Form, h: &Form, k: u32, pt: P1) -> u32 {
    let lk = t.level(k);
    let gv = crate::polyring::homog_eval(t, g, k, pt);
    let hv = crate::polyring::homog_eval(t, h, k, pt);
    if hv.is_zero {
        return 1;
    }
    if lk.trace(lk.div(gv.value, hv.value)) == 0 {
        t.p()
    } else {
        0
    }
}

/// Points of P^1(F_{q^k}) sorted by fiber: poles and a histogram of tr f.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCounts {
    pub poles: u64,
    pub by_trace: Vec<u64>,
    /// tr f(infinity), or None when infinity is a pole.
    pub inf_trace: Option<u32>,
}

impl LevelCounts {
    /// #C(F_{q^k}).
    pub fn points(&self, p: u32) -> u64 {
        self.poles + p as u64 * self.by_trace[0]
    }

    /// Trace histogram over affine points only.
    pub fn affine_by_trace(&self) -> Vec<u64> {
        let mut v = self.by_trace.clone();
        if let Some(t) = self.inf_trace {
            v[t as usize] -= 1;
        }
        v
    }
}

/// One pass over P^1(F_{q^k}).
pub fn count_level(t: &FieldTower, g: &Form, h: &Form, k: u32) -> LevelCounts {
    let lk = t.level(k);
    let p = t.p();
    let gk: Vec<Fe> = t.embed_all(g.coeffs(), k);
    let hk: Vec<Fe> = t.embed_all(h.coeffs(), k);
    let mut by_trace = vec![0u64; p as usize];
    let mut poles = 0u64;
    let d = gk.len() - 1;
    let inf_trace = if hk[d].is_zero() {
        poles += 1;
        None
    } else {
        let t = lk.trace(lk.div(gk[d], hk[d]));
        by_trace[t as usize] += 1;
        Some(t)
    };
    let h_const = hk[1..].iter().all(|c| c.is_zero());
    let h0_inv = if h_const && !hk[0].is_zero() { Some(lk.inv(hk[0])) } else { None };
    for raw in 0..lk.size() as u32 {
        let x = Fe(raw);
        let mut gv = Fe::ZERO;
        for &c in gk.iter().rev() {
            gv = lk.add(lk.mul(gv, x), c);
        }
        let f = match h0_inv {
            Some(inv) => lk.mul(gv, inv),
            None => {
                let mut hv = Fe::ZERO;
                for &c in hk.iter().rev() {
                    hv = lk.add(lk.mul(hv, x), c);
                }
                if hv.is_zero() {
                    poles += 1;
                    continue;
                }
                lk.div(gv, hv)
            }
        };
        by_trace[lk.trace(f) as usize] += 1;
    }
    LevelCounts { poles, by_trace, inf_trace }
}

/// #C(F_{q^k}) by a direct pass.
pub fn point_count(t: &FieldTower, g: &Form, h: &Form, k: u32) -> u64 {
    count_level(t, g, h, k).points(t.p())
}

/// Descriptor of a curve with every pole order prime to p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub g: Form,
    pub h: Form,
    pub poles: PoleData,
}

impl Reduced {
    pub fn delta(&self) -> u32 {
        self.poles.delta()
    }
    pub fn genus(&self, p: u32) -> u32 {
        (p - 1) * (self.delta() - 1) / 2
    }
    pub fn p_rank(&self, p: u32) -> u32 {
        (self.poles.num_poles() - 1) * (p - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    Curve(Reduced),
    /// f is congruent to a constant modulo x^p - x: the cover is not geometrically irreducible.
    Constant(Fe),
}

/// Replace f by f + z^p - z so that no pole order is divisible by p.
/// `poles` may carry the already known pole data of h.
pub fn reduce(t: &FieldTower, g: &Form, h: &Form, poles: Option<&PoleData>) -> Reduction {
    let lv = t.base();
    let r = PolyRing::new(lv);
    let p = t.p();
    let pd = match poles {
        Some(pd) => pd.clone(),
        None => PoleData::from_form(&r, h),
    };
    if pd.is_reduced(p) && !pd.places.is_empty() {
        return Reduction::Curve(Reduced { g: g.clone(), h: h.clone(), poles: pd });
    }
    let q = t.q() as u128;
    let num = g.upper();
    let den = h.upper();
    let c = lv.inv(den.lc());
    let num = r.scale(&num, c);
    let den = r.scale(&den, c);
    let (mut quo, rem) = r.divrem(&num, &den);

    // Partial fractions: for each prime power P^e || den, digits B_1..B_e of the principal part.
    let (_, fac) = r.factor(&den);
    let mut parts: Vec<(Poly, Vec<Poly>)> = Vec::new();
    for (pp, e) in &fac {
        let pe = r.pow(pp, *e);
        let cof = r.div_exact(&den, &pe);
        let ri = r.mulmod(&rem, &r.inv_mod(&cof, &pe), &pe);
        // ri = sum_j A_j P^j, and B_o = A_{e-o}.
        let mut a = Vec::new();
        let mut cur = ri;
        for _ in 0..*e {
            let (qq, rr) = r.divrem(&cur, pp);
            a.push(rr);
            cur = qq;
        }
        let mut b = vec![Poly::zero(); *e as usize + 1];
        for o in 1..=*e as usize {
            b[o] = a[*e as usize - o].clone();
        }
        let m = pp.deg() as u32;
        let qm = q.pow(m);
        loop {
            let o = match (1..b.len()).rev().find(|&o| !b[o].is_zero()) {
                Some(o) => o,
                None => break,
            };
            if o % p as usize != 0 {
                break;
            }
            let root = r.powmod(&b[o], qm / p as u128, pp);
            let cp = r.pow(&root, p);
            let mut cur = cp;
            let mut j = 0;
            while !cur.is_zero() {
                let (qq, rr) = r.divrem(&cur, pp);
                b[o - j] = r.sub(&b[o - j], &rr);
                cur = qq;
                j += 1;
            }
            debug_assert!(b[o].is_zero());
            let lo = o / p as usize;
            b[lo] = r.add(&b[lo], &root);
        }
        parts.push((pp.clone(), b));
    }

    // Polynomial part: strip x^{o} with p | o.
    loop {
        let o = quo.deg();
        if o < 1 || o % p as isize != 0 {
            break;
        }
        let a = quo.lc();
        let root = lv.pth_root(a);
        quo = r.sub(&quo, &Poly::monomial(a, o as usize));
        quo = r.add(&quo, &Poly::monomial(root, o as usize / p as usize));
    }

    let mut places = Vec::new();
    let inf_order = quo.deg().max(0) as u32;
    if inf_order > 0 {
        places.push((Place::Inf, inf_order));
    }
    let mut new_den = Poly::one();
    let mut finite = Vec::new();
    for (pp, b) in &parts {
        if let Some(o) = (1..b.len()).rev().find(|&o| !b[o].is_zero()) {
            new_den = r.mul(&new_den, &r.pow(pp, o as u32));
            finite.push((pp.clone(), b, o));
            places.push((Place::Finite(pp.clone()), o as u32));
        }
    }
    if places.is_empty() {
        return Reduction::Constant(quo.coeff(0));
    }
    let mut new_num = r.mul(&quo, &new_den);
    for (pp, b, top) in &finite {
        let pt = r.pow(pp, *top as u32);
        let cof = r.div_exact(&new_den, &pt);
        let mut s = Poly::zero();
        for o in 1..=*top {
            s = r.add(&s, &r.mul(&b[o], &r.pow(pp, (*top - o) as u32)));
        }
        new_num = r.add(&new_num, &r.mul(&s, &cof));
    }
    let d = (new_den.deg().max(0) as usize) + inf_order as usize;
    let g2 = Form::from_poly(&new_num, d);
    let h2 = Form::from_poly(&new_den, d);
    let places = {
        let mut inf: Vec<_> = places.iter().filter(|(p, _)| *p == Place::Inf).cloned().collect();
        inf.extend(places.iter().filter(|(p, _)| *p != Place::Inf).cloned());
        inf
    };
    Reduction::Curve(Reduced { g: g2, h: h2, poles: PoleData { places } })
}
