//! Curve families, their enumeration, local-condition counts and the
//! predicted sizes, ratios and E-factors.

use crate::gfq::{Fe, FieldTower, P1};
use crate::polyring::{
    count_closed_points, count_irreducible, factor_form, form_is_squarefree, forms_coprime,
    homog_eval, FactorizationType, Form, Place, Poly, PolyRing,
};
use crate::Q;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Range;
use thiserror::Error;

/// Default cap on the number of (g, h) pairs a scan may touch.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("scan bound {bound} exceeds budget {budget}")]
    BudgetExceeded { bound: u128, budget: u64 },
    #[error("invalid family: {0}")]
    Invalid(String),
    #[error("unsupported prediction: {0}")]
    Unsupported(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum FamilyKind {
    Ord(u32),
    Full(u32),
    FactType(FactorizationType),
    Rank0(u32),
    Laurent(u32, u32),
    Quad(u32),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub p: u32,
    pub e: u32,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, p: u32, e: u32) -> FamilySpec {
        FamilySpec { kind, p, e }
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }

    /// Degree d of the forms g, h.
    pub fn degree(&self) -> u32 {
        match &self.kind {
            FamilyKind::Ord(d) | FamilyKind::Full(d) | FamilyKind::Rank0(d) => *d,
            FamilyKind::Laurent(a, b) => a + b,
            FamilyKind::Quad(m) => 2 * m,
            FamilyKind::FactType(v) => v.total_degree(),
        }
    }

    /// The factorization type fixed by the family, if any.
    pub fn fact_type(&self) -> Option<FactorizationType> {
        match &self.kind {
            FamilyKind::FactType(v) => Some(v.clone()),
            FamilyKind::Rank0(d) => Some(FactorizationType::from_pairs(&[(1, *d)])),
            FamilyKind::Laurent(a, b) => Some(FactorizationType::from_pairs(&[(1, *a), (1, *b)])),
            FamilyKind::Quad(m) => Some(FactorizationType::from_pairs(&[(2, *m)])),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |s: String| Err(FamilyError::Invalid(s));
        if self.degree() == 0 {
            return bad("degree must be positive".into());
        }
        match &self.kind {
            FamilyKind::Laurent(a, b) if *a == 0 || *b == 0 => {
                bad("Laurent family needs d1, d2 >= 1".into())
            }
            FamilyKind::FactType(_) | FamilyKind::Quad(_) => {
                let v = self.fact_type().unwrap();
                for (_, ms) in &v.0 {
                    if ms.iter().any(|m| m % self.p == 0) {
                        return bad(format!("multiplicity divisible by p in {v}"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Extra condition for the exact point averages: p does not divide any r_i.
    pub fn check_avg_hypotheses(&self) -> Result<(), FamilyError> {
        if let Some(v) = self.fact_type() {
            if v.0.iter().any(|(r, _)| r % self.p == 0) {
                return Err(FamilyError::Invalid(format!("p divides a pole degree in {v}")));
            }
        }
        Ok(())
    }

    /// Short label, e.g. `rank0(4)` or `facttype(1^2,1^1)`.
    pub fn label(&self) -> String {
        match &self.kind {
            FamilyKind::Ord(d) => format!("ord({d})"),
            FamilyKind::Full(d) => format!("full({d})"),
            FamilyKind::Rank0(d) => format!("rank0({d})"),
            FamilyKind::Laurent(a, b) => format!("laurent({a},{b})"),
            FamilyKind::Quad(m) => format!("quad({m})"),
            FamilyKind::FactType(v) => format!("facttype{v}"),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over F_{}", self.label(), self.q())
    }
}

/// Pole divisor of f = g/h: closed points with their orders.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PoleData {
    pub places: Vec<(Place, u32)>,
}

impl PoleData {
    pub fn from_form(r: &PolyRing, h: &Form) -> PoleData {
        PoleData { places: factor_form(r, h).1 }
    }

    /// Geometric pole orders d_1..d_{r+1}.
    pub fn geometric_orders(&self) -> Vec<u32> {
        self.places
            .iter()
            .flat_map(|(pl, o)| std::iter::repeat(*o).take(pl.degree() as usize))
            .collect()
    }

    /// r + 1, the number of geometric poles.
    pub fn num_poles(&self) -> u32 {
        self.places.iter().map(|(pl, _)| pl.degree()).sum()
    }

    pub fn is_reduced(&self, p: u32) -> bool {
        self.places.iter().all(|(_, o)| o % p != 0)
    }

    pub fn delta(&self) -> u32 {
        delta_of(&self.geometric_orders())
    }
}

/// Genus (p-1)/2 (r - 1 + sum d_j).
pub fn genus_of(p: u32, orders: &[u32]) -> Result<u32, FamilyError> {
    if orders.is_empty() {
        return Err(FamilyError::Invalid("no poles".into()));
    }
    if orders.iter().any(|&d| d == 0 || d % p == 0) {
        return Err(FamilyError::Invalid("pole order divisible by p".into()));
    }
    let r = orders.len() as u32 - 1;
    let s: u32 = orders.iter().sum();
    Ok((p - 1) / 2 * (r + s - 1))
}

pub fn p_rank_of(r: u32, p: u32) -> u32 {
    r * (p - 1)
}

/// Delta = r + sum d_j.
pub fn delta_of(orders: &[u32]) -> u32 {
    orders.len() as u32 - 1 + orders.iter().sum::<u32>()
}

#[derive(Clone, Debug)]
pub struct HEntry {
    pub h: Form,
    pub poles: PoleData,
}

/// An enumerable family over a fixed base field.
pub struct Family {
    pub spec: FamilySpec,
    hs: Vec<HEntry>,
    d: usize,
    q: u64,
}

fn form_product(r: &PolyRing, parts: &[(Place, u32)]) -> Form {
    let mut up = Poly::one();
    let mut deg = 0usize;
    for (pl, m) in parts {
        let f = pl.form();
        up = r.mul(&up, &r.pow(&f.upper(), *m));
        deg += f.degree() * *m as usize;
    }
    Form::from_poly(&up, deg)
}

fn places_of_degree(r: &PolyRing, m: u32) -> Vec<Place> {
    let mut out = Vec::new();
    if m == 1 {
        out.push(Place::Inf);
    }
    out.extend(r.monic_irreducibles(m as usize).into_iter().map(Place::Finite));
    out
}

/// Ordered choices of distinct places for the multiplicity slots of one degree group;
/// slots with equal multiplicity are filled in increasing order.
fn group_choices(n_places: usize, mults: &[u32]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, mults: &[u32], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == mults.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..n {
            if cur.contains(&c) {
                continue;
            }
            if i > 0 && mults[i] == mults[i - 1] && c < cur[i - 1] {
                continue;
            }
            cur.push(c);
            rec(n, mults, cur, out);
            cur.pop();
        }
    }
    rec(n_places, mults, &mut cur, &mut out);
    out
}

impl Family {
    pub fn new(t: &FieldTower, spec: &FamilySpec, budget: u64) -> Result<Family, FamilyError> {
        spec.validate()?;
        if spec.p != t.p() || spec.e != t.e() {
            return Err(FamilyError::Invalid("family field differs from the tower".into()));
        }
        let lv = t.base();
        let r = PolyRing::new(lv);
        let d = spec.degree() as usize;
        let q = t.q();
        let n_g = (q as u128).pow(d as u32 + 1);
        let check = |n_h: u128| {
            let bound = n_h * n_g;
            if bound > budget as u128 {
                Err(FamilyError::BudgetExceeded { bound, budget })
            } else {
                Ok(())
            }
        };
        let mut hs = Vec::new();
        match &spec.kind {
            FamilyKind::Ord(_) | FamilyKind::Full(_) => {
                check(n_g)?;
                let ord = matches!(spec.kind, FamilyKind::Ord(_));
                for idx in 1..n_g as u64 {
                    let h = Form::from_index(lv, d, idx);
                    if ord && !form_is_squarefree(&r, &h) {
                        continue;
                    }
                    let poles = PoleData::from_form(&r, &h);
                    hs.push(HEntry { h, poles });
                }
            }
            FamilyKind::Rank0(_) => {
                check(1)?;
                let h = Form::z_power(d);
                hs.push(HEntry { h, poles: PoleData { places: vec![(Place::Inf, d as u32)] } });
            }
            FamilyKind::Laurent(a, b) => {
                check(1)?;
                let x = Place::Finite(Poly::x());
                let parts = vec![(Place::Inf, *b), (x, *a)];
                let h = form_product(&r, &parts);
                hs.push(HEntry { h, poles: PoleData { places: parts } });
            }
            FamilyKind::FactType(_) | FamilyKind::Quad(_) => {
                let v = spec.fact_type().unwrap();
                let groups: Vec<(Vec<Place>, Vec<u32>)> =
                    v.0.iter().map(|(deg, ms)| (places_of_degree(&r, *deg), ms.clone())).collect();
                let choices: Vec<Vec<Vec<usize>>> =
                    groups.iter().map(|(pl, ms)| group_choices(pl.len(), ms)).collect();
                let n_h: u128 = choices.iter().map(|c| c.len() as u128).product();
                check(n_h)?;
                let mut idx = vec![0usize; choices.len()];
                if choices.iter().all(|c| !c.is_empty()) {
                    loop {
                        let mut parts = Vec::new();
                        for (gi, ci) in idx.iter().enumerate() {
                            let (pl, ms) = &groups[gi];
                            for (slot, &pi) in choices[gi][*ci].iter().enumerate() {
                                parts.push((pl[pi].clone(), ms[slot]));
                            }
                        }
                        let h = form_product(&r, &parts);
                        hs.push(HEntry { h, poles: PoleData { places: parts } });
                        let mut j = 0;
                        loop {
                            if j == idx.len() {
                                break;
                            }
                            idx[j] += 1;
                            if idx[j] < choices[j].len() {
                                break;
                            }
                            idx[j] = 0;
                            j += 1;
                        }
                        if j == idx.len() {
                            break;
                        }
                    }
                }
            }
        }
        Ok(Family { spec: spec.clone(), hs, d, q })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn h_entries(&self) -> &[HEntry] {
        &self.hs
    }

    pub fn num_h(&self) -> usize {
        self.hs.len()
    }

    /// Number of (g, h) pairs the scan touches.
    pub fn scan_bound(&self) -> u128 {
        self.hs.len() as u128 * (self.q as u128).pow(self.d as u32 + 1)
    }

    /// The admissible g for h number `hi`, in index order.
    pub fn g_for(&self, t: &FieldTower, hi: usize) -> Vec<Form> {
        let lv = t.base();
        let r = PolyRing::new(lv);
        let h = &self.hs[hi].h;
        let n_g = self.q.pow(self.d as u32 + 1);
        let rank0 = matches!(self.spec.kind, FamilyKind::Rank0(_));
        (0..n_g)
            .map(|i| Form::from_index(lv, self.d, i))
            .filter(|g| {
                if rank0 {
                    !g.at_infinity().is_zero()
                } else {
                    forms_coprime(&r, g, h)
                }
            })
            .collect()
    }

    /// Members with h index in `range`, ordered by (h, g).
    pub fn members(&self, t: &FieldTower, range: Range<usize>) -> Vec<Member> {
        let per_h: Vec<Vec<Member>> = range
            .into_par_iter()
            .map(|hi| self.g_for(t, hi).into_iter().map(|g| Member { hi, g }).collect())
            .collect();
        per_h.into_iter().flatten().collect()
    }

    pub fn all_members(&self, t: &FieldTower) -> Vec<Member> {
        self.members(t, 0..self.hs.len())
    }

    pub fn h(&self, m: &Member) -> &Form {
        &self.hs[m.hi].h
    }

    pub fn poles(&self, m: &Member) -> &PoleData {
        &self.hs[m.hi].poles
    }

    pub fn size(&self, t: &FieldTower) -> u64 {
        (0..self.hs.len()).into_par_iter().map(|hi| self.g_for(t, hi).len() as u64).sum()
    }
}

/// One family member: the h index and the numerator form g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub hi: usize,
    pub g: Form,
}

/// A local condition f(alpha) = beta with alpha, beta in P^1(F_{q^k}).
#[derive(Clone, Copy, Debug)]
pub struct LocalCondition {
    pub k: u32,
    pub alpha: P1,
    pub beta: P1,
}

fn satisfies(t: &FieldTower, g: &Form, h: &Form, c: &LocalCondition) -> bool {
    let hv = homog_eval(t, h, c.k, c.alpha);
    match c.beta {
        P1::Inf => hv.is_zero,
        P1::Aff(b) => {
            let gv = homog_eval(t, g, c.k, c.alpha);
            t.level(c.k).mul(b, hv.value) == gv.value
        }
    }
}

/// Exact number of members satisfying every condition.
pub fn local_subfamily_count(t: &FieldTower, fam: &Family, conds: &[LocalCondition]) -> u64 {
    (0..fam.num_h())
        .into_par_iter()
        .map(|hi| {
            let h = &fam.h_entries()[hi].h;
            fam.g_for(t, hi)
                .iter()
                .filter(|g| conds.iter().all(|c| satisfies(t, g, h, c)))
                .count() as u64
        })
        .sum()
}

fn qpow(q: u64, e: i32) -> Q {
    let b = Q::from_integer(q as i128);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// zeta of P^1 over F_q at integer s.
pub fn zeta_q(q: u64, s: i32) -> Q {
    ((Q::one() - qpow(q, -s)) * (Q::one() - qpow(q, 1 - s))).recip()
}

/// H(1) = prod over closed points P of P^1 of 1 + 1/((|P|+1)(|P|^2-1)), degrees <= 30.
pub fn h1_constant(q: u64) -> f64 {
    let mut log = 0.0f64;
    for m in 1..=30u32 {
        let n = (q as f64).powi(m as i32);
        let term = 1.0 / ((n + 1.0) * (n * n - 1.0));
        log += count_closed_points(q, m) as f64 * term.ln_1p();
    }
    log.exp()
}

/// Main term of the family size (Ord, Full) or its exact size (factorization types).
pub fn predicted_size(spec: &FamilySpec) -> Result<f64, FamilyError> {
    let q = spec.q();
    let d = spec.degree() as i32;
    let top = (q as f64).powi(2 * d + 2);
    let z2 = zeta_q(q, 2);
    let z2f = *z2.numer() as f64 / *z2.denom() as f64;
    match &spec.kind {
        FamilyKind::Ord(_) => Ok(h1_constant(q) * top / (z2f * z2f)),
        FamilyKind::Full(_) => Ok(top / z2f),
        _ => exact_fact_type_size(spec).map(|n| n as f64),
    }
}

/// Number of h with the given factorization type (all places distinct, h monic).
pub fn fact_type_h_count(q: u64, v: &FactorizationType) -> u128 {
    let mut total = 1u128;
    for (r, ms) in &v.0 {
        let n = count_closed_points(q, *r);
        let l = ms.len() as u128;
        if n < l {
            return 0;
        }
        let mut falling = 1u128;
        for i in 0..l {
            falling *= n - i;
        }
        let mut sym = 1u128;
        let mut i = 0;
        while i < ms.len() {
            let j = ms[i..].iter().take_while(|&&m| m == ms[i]).count();
            sym *= (1..=j as u128).product::<u128>();
            i += j;
        }
        total *= falling / sym;
    }
    total
}

/// Exact size q^{d+1} prod (1 - q^{-r_i})^{l_i} times the number of h.
pub fn exact_fact_type_size(spec: &FamilySpec) -> Result<u128, FamilyError> {
    let q = spec.q();
    let d = spec.degree();
    match &spec.kind {
        FamilyKind::Rank0(_) => Ok((q as u128 - 1) * (q as u128).pow(d)),
        FamilyKind::Laurent(..) => Ok((q as u128 - 1).pow(2) * (q as u128).pow(d - 1)),
        _ => {
            let v = spec
                .fact_type()
                .ok_or_else(|| FamilyError::Unsupported("no factorization type".into()))?;
            let mut per_h = Q::from_integer((q as i128).pow(d + 1));
            for (r, ms) in &v.0 {
                let f = Q::one() - qpow(q, -(*r as i32));
                per_h *= num_traits::pow(f, ms.len());
            }
            assert!(per_h.is_integer());
            Ok(per_h.to_integer() as u128 * fact_type_h_count(q, &v))
        }
    }
}

/// Whether beta is the point at infinity or a finite value.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BetaKind {
    Finite,
    Inf,
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Predicted |F(alpha_1.., beta_1..)| / |F| for points of degrees `us`.
pub fn predicted_local_ratio(
    spec: &FamilySpec,
    us: &[u32],
    betas: &[BetaKind],
) -> Result<Q, FamilyError> {
    assert_eq!(us.len(), betas.len());
    let q = spec.q();
    let sum_u: i32 = us.iter().map(|&u| u as i32).sum();
    let any_inf = betas.contains(&BetaKind::Inf);
    match &spec.kind {
        FamilyKind::Ord(_) | FamilyKind::Full(_) => {
            let ord = matches!(spec.kind, FamilyKind::Ord(_));
            let den = |u: u32| {
                let x = qpow(q, -(u as i32));
                if ord {
                    Q::one() + x - x * x
                } else {
                    Q::one() + x
                }
            };
            if any_inf {
                if us.len() != 1 {
                    return Err(FamilyError::Unsupported(
                        "multi-point ratios with beta = infinity".into(),
                    ));
                }
                let x = qpow(q, -(us[0] as i32));
                return Ok(if ord { x * (Q::one() - x) / den(us[0]) } else { x / den(us[0]) });
            }
            Ok(us.iter().fold(qpow(q, -sum_u), |acc, &u| acc / den(u)))
        }
        FamilyKind::FactType(_) | FamilyKind::Quad(_) => {
            let v = spec.fact_type().unwrap();
            if us.len() == 1 {
                let u = us[0];
                let hit = v.degree_counts().into_iter().find(|&(r, _)| r == u);
                let x = qpow(q, -(u as i32));
                return Ok(match (hit, betas[0]) {
                    (None, BetaKind::Finite) => x,
                    (None, BetaKind::Inf) => Q::zero(),
                    (Some((r, l)), BetaKind::Finite) => {
                        let n = count_closed_points(q, r) as i128;
                        x * Q::new(n - l as i128, n)
                    }
                    (Some((r, l)), BetaKind::Inf) => {
                        Q::new(l as i128, count_closed_points(q, r) as i128)
                    }
                });
            }
            if any_inf {
                return Err(FamilyError::Unsupported(
                    "multi-point ratios with beta = infinity".into(),
                ));
            }
            Ok(qpow(q, -sum_u) * fact_type_tau_product(q, &v, us))
        }
        _ => Err(FamilyError::Unsupported(format!("local ratios for {}", spec.label()))),
    }
}

/// prod_i binom(pi(r_i) - s_i, l_i) / binom(pi(r_i), l_i) with s_i = #{j : u_j = r_i}.
fn fact_type_tau_product(q: u64, v: &FactorizationType, us: &[u32]) -> Q {
    let mut acc = Q::one();
    for (r, l) in v.degree_counts() {
        let s = us.iter().filter(|&&u| u == r).count() as u128;
        let n = count_closed_points(q, r);
        let num = binom(n.saturating_sub(s), l as u128);
        acc *= Q::new(num as i128, binom(n, l as u128) as i128);
    }
    acc
}

/// E-factor of the family at degree u.
///
/// For factorization types the pole count uses closed points of P^1. The
/// restricted families (rank 0 with h = Z^d, Laurent with h = X^a Z^b) get the
/// density of affine degree-u points that are not poles.
pub fn e_factor(spec: &FamilySpec, u: u32) -> Q {
    let q = spec.q();
    let x = qpow(q, -(u as i32));
    match &spec.kind {
        FamilyKind::Ord(_) => (Q::one() + x - x * x).recip(),
        FamilyKind::Full(_) => (Q::one() + x).recip(),
        FamilyKind::Rank0(_) => Q::one(),
        FamilyKind::Laurent(..) => {
            if u == 1 {
                Q::new(q as i128 - 1, q as i128)
            } else {
                Q::one()
            }
        }
        FamilyKind::FactType(_) | FamilyKind::Quad(_) => {
            let v = spec.fact_type().unwrap();
            match v.degree_counts().into_iter().find(|&(r, _)| r == u) {
                Some((r, l)) => {
                    let n = count_closed_points(q, r) as i128;
                    Q::new(n - l as i128, n)
                }
                None => Q::one(),
            }
        }
    }
}

/// Multi-argument E-factor.
pub fn e_factor_multi(spec: &FamilySpec, us: &[u32]) -> Q {
    match &spec.kind {
        FamilyKind::FactType(_) | FamilyKind::Quad(_) => {
            fact_type_tau_product(spec.q(), &spec.fact_type().unwrap(), us)
        }
        _ => us.iter().fold(Q::one(), |acc, &u| acc * e_factor(spec, u)),
    }
}

/// Number of affine closed points of degree m (monic irreducibles).
pub fn affine_points(q: u64, m: u32) -> u128 {
    count_irreducible(q, m)
}

/// Value of a base-field element as a form evaluated at a point (helper for tests).
pub fn fe_of(t: &FieldTower, c: i64) -> Fe {
    t.base().from_int(c)
}
