//! Finite rings as dense operation tables.
//!
//! A ring of order n stores its addition and multiplication tables
//! row-major (n*n entries each) plus a negation table. Elements are plain
//! indices; index 0 is always the additive identity. Unital rings record
//! the index of 1. Construction recipes (`RingSpec`) cover modular rings,
//! small Galois fields, matrix and upper-triangular rings, products,
//! quotients, corners, unitizations, and raw tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QbrError, Result};
use crate::ElemSet;

/// Hard cap on constructed ring order. Dense tables get quadratic in
/// memory; 4096 keeps a single ring under 135 MB.
pub const ORDER_CAP: usize = 4096;

/// An element of a `FiniteRing`, by index.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl std::fmt::Display for Elem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Construction recipe, serializable as JSON with a `kind` discriminator,
/// e.g. `{"kind":"matrix","size":2,"base":{"kind":"zn","n":2}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RingSpec {
    Zn { n: u32 },
    Gf { q: u32 },
    Matrix { size: u32, base: Box<RingSpec> },
    UpperTriangular { size: u32, base: Box<RingSpec> },
    Product { factors: Vec<RingSpec> },
    Quotient { base: Box<RingSpec>, ideal_generators: Vec<u32> },
    Corner { base: Box<RingSpec>, idempotent: u32 },
    Unitization { base: Box<RingSpec> },
    Table { add: Vec<u32>, mul: Vec<u32>, #[serde(skip_serializing_if = "Option::is_none")] one: Option<u32> },
}

/// A finite ring. All arithmetic is table lookup; `fingerprint` is a hash
/// of the tables used to detect cross-ring argument mixups cheaply.
#[derive(Clone)]
pub struct FiniteRing {
    label: String,
    n: usize,
    one: Option<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    fp: u64,
}

impl std::fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteRing({}, order {})", self.label, self.n)
    }
}

#[inline]
fn mix(h: u64, v: u64) -> u64 {
    // splitmix64 step; cheap and stable across runs
    let mut z = h ^ v.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl FiniteRing {
    /// Assembles a ring from complete tables, checking only shape and the
    /// zero/negation laws. `validate_full` does the cubic law scan.
    fn assemble(label: String, n: usize, add: Vec<u32>, mul: Vec<u32>, one: Option<u32>) -> Result<Self> {
        if n == 0 || add.len() != n * n || mul.len() != n * n {
            return Err(QbrError::MalformedSpec(format!(
                "table shape mismatch: order {n}, add {} entries, mul {} entries",
                add.len(),
                mul.len()
            )));
        }
        if n > ORDER_CAP {
            return Err(QbrError::OrderCapExceeded(n, ORDER_CAP));
        }
        for (&v, which) in add.iter().zip(std::iter::repeat("add")).chain(mul.iter().zip(std::iter::repeat("mul"))) {
            if v as usize >= n {
                return Err(QbrError::MalformedSpec(format!("{which} table entry {v} out of range")));
            }
        }
        // index 0 must be the additive identity
        for j in 0..n {
            if add[j] != j as u32 || add[j * n] != j as u32 {
                return Err(QbrError::MalformedSpec("index 0 is not the additive identity".into()));
            }
        }
        let mut neg = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if add[a * n + b] == 0 {
                    neg[a] = b as u32;
                    break;
                }
            }
            if neg[a] == u32::MAX {
                return Err(QbrError::MalformedSpec(format!("element {a} has no additive inverse")));
            }
        }
        if let Some(e) = one {
            if e as usize >= n {
                return Err(QbrError::MalformedSpec(format!("unit index {e} out of range")));
            }
            for a in 0..n {
                if mul[e as usize * n + a] != a as u32 || mul[a * n + e as usize] != a as u32 {
                    return Err(QbrError::MalformedSpec(format!("designated unit {e} is not an identity")));
                }
            }
        }
        let mut fp = mix(0x5eed, n as u64);
        for &v in add.iter().chain(mul.iter()) {
            fp = mix(fp, v as u64);
        }
        fp = mix(fp, one.map_or(u64::MAX, |v| v as u64));
        Ok(FiniteRing { label, n, one, add, mul, neg, fp })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn fingerprint(&self) -> u64 {
        self.fp
    }

    pub fn is_unital(&self) -> bool {
        self.one.is_some()
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    /// The multiplicative identity, if the ring has one.
    pub fn one(&self) -> Option<Elem> {
        self.one.map(Elem)
    }

    /// The identity of a ring declared unital; panics otherwise. Use only
    /// after an explicit unitality check.
    pub fn one_unchecked(&self) -> Elem {
        Elem(self.one.expect("ring is not unital"))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.n as u32).map(Elem)
    }

    pub fn check_elem(&self, e: Elem) -> Result<()> {
        if (e.0 as usize) < self.n {
            Ok(())
        } else {
            Err(QbrError::ForeignElement(e.0, self.n))
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.0 as usize * self.n + b.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.0 as usize * self.n + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// a*b*c, left to right.
    #[inline]
    pub fn mul3(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        self.mul(self.mul(a, b), c)
    }

    /// 1 - a*b. Requires a unital ring.
    #[inline]
    pub fn one_minus_mul(&self, a: Elem, b: Elem) -> Elem {
        self.sub(self.one_unchecked(), self.mul(a, b))
    }

    pub fn is_idempotent(&self, e: Elem) -> bool {
        self.mul(e, e) == e
    }

    /// n-fold sum a + ... + a.
    pub fn smul(&self, mut k: u64, a: Elem) -> Elem {
        let mut acc = self.zero();
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// Additive order of a.
    pub fn additive_order(&self, a: Elem) -> u64 {
        let mut k = 1u64;
        let mut acc = a;
        while acc != self.zero() {
            acc = self.add(acc, a);
            k += 1;
        }
        k
    }

    pub fn empty_set(&self) -> ElemSet {
        ElemSet::empty(self.n, self.fp)
    }

    pub fn full_set(&self) -> ElemSet {
        ElemSet::full(self.n, self.fp)
    }

    pub fn set_of(&self, it: impl IntoIterator<Item = Elem>) -> ElemSet {
        ElemSet::from_iter_of(self.n, self.fp, it)
    }

    pub fn same_ring_as_set(&self, s: &ElemSet) -> Result<()> {
        if s.ring_fingerprint() == self.fp && s.universe_len() == self.n {
            Ok(())
        } else {
            Err(QbrError::DifferentRings)
        }
    }

    /// Two-sided inverse of u, by ascending scan.
    pub fn inverse(&self, u: Elem) -> Option<Elem> {
        let e = self.one()?;
        self.elements().find(|&v| self.mul(u, v) == e && self.mul(v, u) == e)
    }

    /// The set of two-sided units. Empty for non-unital rings.
    pub fn units(&self) -> ElemSet {
        let mut s = self.empty_set();
        if self.one().is_some() {
            for u in self.elements() {
                if self.inverse(u).is_some() {
                    s.insert(u);
                }
            }
        }
        s
    }

    /// Left-invertible elements: u with v*u = 1 for some v.
    pub fn left_invertibles(&self) -> ElemSet {
        let mut s = self.empty_set();
        if let Some(e) = self.one() {
            for u in self.elements() {
                if self.elements().any(|v| self.mul(v, u) == e) {
                    s.insert(u);
                }
            }
        }
        s
    }

    /// Right-invertible elements: u with u*v = 1 for some v.
    pub fn right_invertibles(&self) -> ElemSet {
        let mut s = self.empty_set();
        if let Some(e) = self.one() {
            for u in self.elements() {
                if self.elements().any(|v| self.mul(u, v) == e) {
                    s.insert(u);
                }
            }
        }
        s
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|a| (a + 1..self.n).all(|b| self.mul[a * self.n + b] == self.mul[b * self.n + a]))
    }

    /// Full law scan: commutative group under +, associative *, both
    /// distributive laws. Cubic in the order; use in tests and on
    /// untrusted tables.
    pub fn validate_full(&self) -> Result<()> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                if self.add[a * n + b] != self.add[b * n + a] {
                    return Err(QbrError::MalformedSpec(format!("addition not commutative at ({a},{b})")));
                }
            }
        }
        let fail = (0..n).into_par_iter().find_map_first(|ai| {
            let a = Elem(ai as u32);
            for b in self.elements() {
                let ab = self.add(a, b);
                let axb = self.mul(a, b);
                for c in self.elements() {
                    if self.add(ab, c) != self.add(a, self.add(b, c)) {
                        return Some(format!("addition not associative at ({a},{b},{c})"));
                    }
                    if self.mul(axb, c) != self.mul(a, self.mul(b, c)) {
                        return Some(format!("multiplication not associative at ({a},{b},{c})"));
                    }
                    if self.mul(a, self.add(b, c)) != self.add(axb, self.mul(a, c)) {
                        return Some(format!("left distributivity fails at ({a},{b},{c})"));
                    }
                    if self.mul(self.add(b, c), a) != self.add(self.mul(b, a), self.mul(c, a)) {
                        return Some(format!("right distributivity fails at ({a},{b},{c})"));
                    }
                }
            }
            None
        });
        match fail {
            Some(msg) => Err(QbrError::MalformedSpec(msg)),
            None => Ok(()),
        }
    }

    /// Same ring with reversed multiplication.
    pub fn opposite(&self) -> FiniteRing {
        let n = self.n;
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[a * n + b] = self.mul[b * n + a];
            }
        }
        FiniteRing::assemble(format!("op({})", self.label), n, self.add.clone(), mul, self.one)
            .expect("opposite of a valid ring is valid")
    }
}

// ---------------------------------------------------------------------------
// matrix index packing

/// Packs k*k entries (row-major, each < base_order) into one index,
/// entry (0,0) least significant.
pub fn matrix_encode(base_order: usize, entries: &[u32]) -> u32 {
    let mut idx = 0u64;
    for &e in entries.iter().rev() {
        idx = idx * base_order as u64 + e as u64;
    }
    idx as u32
}

/// Inverse of `matrix_encode` for k*k entries.
pub fn matrix_decode(base_order: usize, k: usize, idx: u32) -> Vec<u32> {
    let mut rest = idx as u64;
    let mut out = Vec::with_capacity(k * k);
    for _ in 0..k * k {
        out.push((rest % base_order as u64) as u32);
        rest /= base_order as u64;
    }
    out
}

// ---------------------------------------------------------------------------
// Galois fields

/// Fixed monic irreducible polynomials over F_p, coefficients listed from
/// the constant term up, including the leading 1. The choice is recorded
/// in the ring label so serialized data stays interpretable.
const GF_POLYS: &[(u32, &[u32])] = &[
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 4, 4, 0, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
    (7, &[3, 4, 5, 0, 1]),
    (11, &[2, 7, 1]),
    (11, &[9, 2, 0, 1]),
    (13, &[2, 12, 1]),
    (13, &[11, 2, 0, 1]),
];

fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut k = 0;
            let mut m = q;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            return if m == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

/// Polynomial arithmetic mod p for the irreducibility guard.
fn poly_mod_mul(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // reduce by the monic modulus
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            prod[d] = 0;
            for (t, &m) in modulus.iter().enumerate().take(k) {
                let pos = d - k + t;
                prod[pos] = (prod[pos] + c * (p - m % p) % p) % p;
            }
        }
    }
    prod.truncate(k.max(1));
    prod
}

fn poly_is_irreducible(poly: &[u32], p: u32) -> bool {
    let k = poly.len() - 1;
    if k == 1 {
        return true;
    }
    // trial division by every monic polynomial of degree 1..=k/2
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for mask in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut m = mask;
            for _ in 0..d {
                div.push((m % p as u64) as u32);
                m /= p as u64;
            }
            div.push(1);
            // long division remainder of poly by div
            let mut rem: Vec<u32> = poly.to_vec();
            while rem.len() >= div.len() {
                let lead = *rem.last().unwrap();
                if lead != 0 {
                    let shift = rem.len() - div.len();
                    // monic divisor: subtract lead * div << shift
                    for (t, &dv) in div.iter().enumerate() {
                        let pos = shift + t;
                        rem[pos] = (rem[pos] + lead * (p - dv % p) % p) % p;
                    }
                }
                rem.pop();
            }
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn build_gf(q: u32) -> Result<FiniteRing> {
    let (p, k) = factor_prime_power(q)
        .ok_or_else(|| QbrError::MalformedSpec(format!("gf order {q} is not a prime power")))?;
    if k > 4 {
        return Err(QbrError::MalformedSpec(format!("gf degree {k} exceeds the supported bound 4")));
    }
    if !is_prime(p) {
        return Err(QbrError::MalformedSpec(format!("gf characteristic {p} is not prime")));
    }
    if k == 1 {
        let mut r = build_zn(p)?;
        r.label = format!("GF({p})");
        r.fp = mix(r.fp, 0x6f);
        return Ok(r);
    }
    let poly = GF_POLYS
        .iter()
        .find(|(pp, c)| *pp == p && c.len() == k as usize + 1)
        .map(|(_, c)| c.to_vec())
        .ok_or_else(|| QbrError::MalformedSpec(format!("no modulus on record for GF({p}^{k})")))?;
    // guard against a bad table entry: a reducible modulus would yield a
    // non-field with silent zero divisors
    if !poly_is_irreducible(&poly, p) {
        return Err(QbrError::MalformedSpec(format!("recorded modulus for GF({p}^{k}) is reducible")));
    }
    let n = q as usize;
    if n > ORDER_CAP {
        return Err(QbrError::OrderCapExceeded(n, ORDER_CAP));
    }
    let digits = |mut v: u32| -> Vec<u32> {
        let mut d = Vec::with_capacity(k as usize);
        for _ in 0..k {
            d.push(v % p);
            v /= p;
        }
        d
    };
    let pack = |d: &[u32]| -> u32 {
        let mut v = 0;
        for &c in d.iter().rev() {
            v = v * p + c;
        }
        v
    };
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for a in 0..n as u32 {
        let da = digits(a);
        for b in 0..n as u32 {
            let db = digits(b);
            let ds: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            add[a as usize * n + b as usize] = pack(&ds);
            let prod = poly_mod_mul(&da, &db, &poly, p);
            mul[a as usize * n + b as usize] = pack(&prod);
        }
    }
    let poly_str: String = poly
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match i {
            0 => format!("{c}"),
            1 if c == 1 => "x".into(),
            1 => format!("{c}x"),
            _ if c == 1 => format!("x^{i}"),
            _ => format!("{c}x^{i}"),
        })
        .collect::<Vec<_>>()
        .join("+");
    FiniteRing::assemble(format!("GF({q})=F{p}[x]/({poly_str})"), n, add, mul, Some(1))
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// recipe builders

fn build_zn(n: u32) -> Result<FiniteRing> {
    if n == 0 {
        return Err(QbrError::MalformedSpec("zn requires n >= 1".into()));
    }
    let n = n as usize;
    if n > ORDER_CAP {
        return Err(QbrError::OrderCapExceeded(n, ORDER_CAP));
    }
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            add[a * n + b] = ((a + b) % n) as u32;
            mul[a * n + b] = ((a * b) % n) as u32;
        }
    }
    let one = if n == 1 { 0 } else { 1 };
    FiniteRing::assemble(format!("Z{n}"), n, add, mul, Some(one))
}

fn capped_product(factors: impl IntoIterator<Item = usize>) -> Result<usize> {
    let mut acc: u128 = 1;
    for f in factors {
        acc *= f as u128;
        if acc > ORDER_CAP as u128 {
            return Err(QbrError::OrderCapExceeded(acc.min(usize::MAX as u128) as usize, ORDER_CAP));
        }
    }
    Ok(acc as usize)
}

fn build_matrix(base: &FiniteRing, k: usize, upper_triangular: bool) -> Result<FiniteRing> {
    if k == 0 {
        return Err(QbrError::MalformedSpec("matrix size must be >= 1".into()));
    }
    let bn = base.order();
    // free positions: all k*k cells, or the upper triangle only
    let positions: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| !upper_triangular || i <= j)
        .collect();
    let n = capped_product(std::iter::repeat(bn).take(positions.len()))?;
    // entry grids are addressed cell-wise; packing follows `positions`
    let decode = |idx: u32| -> Vec<Elem> {
        let mut grid = vec![Elem(0); k * k];
        let mut rest = idx as u64;
        for &(i, j) in &positions {
            grid[i * k + j] = Elem((rest % bn as u64) as u32);
            rest /= bn as u64;
        }
        grid
    };
    let encode = |grid: &[Elem]| -> u32 {
        let mut v = 0u64;
        for &(i, j) in positions.iter().rev() {
            v = v * bn as u64 + grid[i * k + j].0 as u64;
        }
        v as u32
    };
    let grids: Vec<Vec<Elem>> = (0..n as u32).map(decode).collect();
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for a in 0..n {
        let ga = &grids[a];
        for b in 0..n {
            let gb = &grids[b];
            let mut gs = vec![Elem(0); k * k];
            let mut gp = vec![Elem(0); k * k];
            for &(i, j) in &positions {
                gs[i * k + j] = base.add(ga[i * k + j], gb[i * k + j]);
                let mut acc = base.zero();
                for t in 0..k {
                    acc = base.add(acc, base.mul(ga[i * k + t], gb[t * k + j]));
                }
                gp[i * k + j] = acc;
            }
            add[a * n + b] = encode(&gs);
            mul[a * n + b] = encode(&gp);
        }
    }
    let one = base.one().map(|e| {
        let mut grid = vec![Elem(0); k * k];
        for i in 0..k {
            grid[i * k + i] = e;
        }
        encode(&grid)
    });
    let name = if upper_triangular { "T" } else { "M" };
    FiniteRing::assemble(format!("{name}{k}({})", base.label), n, add, mul, one)
}

fn build_product(factors: &[FiniteRing]) -> Result<FiniteRing> {
    if factors.is_empty() {
        return Err(QbrError::MalformedSpec("product requires at least one factor".into()));
    }
    let n = capped_product(factors.iter().map(|f| f.order()))?;
    let decode = |idx: u32| -> Vec<Elem> {
        let mut rest = idx as u64;
        factors
            .iter()
            .map(|f| {
                let c = (rest % f.order() as u64) as u32;
                rest /= f.order() as u64;
                Elem(c)
            })
            .collect()
    };
    let encode = |comps: &[Elem]| -> u32 {
        let mut v = 0u64;
        for (f, c) in factors.iter().zip(comps).rev() {
            v = v * f.order() as u64 + c.0 as u64;
        }
        v as u32
    };
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for a in 0..n as u32 {
        let ca = decode(a);
        for b in 0..n as u32 {
            let cb = decode(b);
            let cs: Vec<Elem> = factors.iter().zip(ca.iter().zip(&cb)).map(|(f, (x, y))| f.add(*x, *y)).collect();
            let cp: Vec<Elem> = factors.iter().zip(ca.iter().zip(&cb)).map(|(f, (x, y))| f.mul(*x, *y)).collect();
            add[a as usize * n + b as usize] = encode(&cs);
            mul[a as usize * n + b as usize] = encode(&cp);
        }
    }
    let one = factors.iter().map(|f| f.one()).collect::<Option<Vec<_>>>().map(|os| encode(&os));
    let label = factors.iter().map(|f| f.label.clone()).collect::<Vec<_>>().join(" x ");
    FiniteRing::assemble(format!("({label})"), n, add, mul, one)
}

/// The k x k matrix ring over an already-built base, packed row-major by
/// `matrix_encode`. Same construction the `matrix` spec kind uses, exposed
/// so derived rings (quotients, corners) can be squared too.
pub fn matrix_ring(base: &FiniteRing, k: usize) -> Result<FiniteRing> {
    build_matrix(base, k, false)
}

/// Quotient by the two-sided ideal generated by `gens`. Cosets are named
/// by their least element index, renumbered in ascending order of that
/// representative, so the zero coset keeps index 0. Returns the quotient
/// and the projection map.
pub fn quotient_ring(r: &FiniteRing, gens: &[Elem]) -> Result<(FiniteRing, Vec<u32>)> {
    for &g in gens {
        r.check_elem(g)?;
    }
    let ideal = crate::ideals::ideal_closure_members(r, gens);
    quotient_by_members(r, &ideal)
}

/// Quotient by an already-computed ideal member set.
pub fn quotient_by_members(r: &FiniteRing, ideal: &ElemSet) -> Result<(FiniteRing, Vec<u32>)> {
    r.same_ring_as_set(ideal)?;
    let n = r.order();
    let ideal_elems = ideal.to_vec();
    // coset representative: least index in a + I
    let mut rep = vec![u32::MAX; n];
    for a in r.elements() {
        if rep[a.0 as usize] != u32::MAX {
            continue;
        }
        let mut least = u32::MAX;
        let mut members = Vec::with_capacity(ideal_elems.len());
        for &i in &ideal_elems {
            let m = r.add(a, i);
            least = least.min(m.0);
            members.push(m.0);
        }
        for m in members {
            rep[m as usize] = least;
        }
    }
    let mut reps: Vec<u32> = rep.to_vec();
    reps.sort_unstable();
    reps.dedup();
    let qn = reps.len();
    let index_of = |e: u32| -> u32 { reps.binary_search(&e).unwrap() as u32 };
    let proj: Vec<u32> = (0..n).map(|a| index_of(rep[a])).collect();
    let mut add = vec![0u32; qn * qn];
    let mut mul = vec![0u32; qn * qn];
    for (ia, &ra) in reps.iter().enumerate() {
        for (ib, &rb) in reps.iter().enumerate() {
            add[ia * qn + ib] = proj[r.add(Elem(ra), Elem(rb)).0 as usize];
            mul[ia * qn + ib] = proj[r.mul(Elem(ra), Elem(rb)).0 as usize];
        }
    }
    let one = r.one().map(|e| proj[e.0 as usize]);
    let q = FiniteRing::assemble(format!("{}/I{}", r.label, ideal.len()), qn, add, mul, one)?;
    Ok((q, proj))
}

/// The corner e*R*e for an idempotent e, as a standalone unital ring
/// (its identity is e). Returns the corner and the embedding of corner
/// indices back into R.
pub fn corner_ring(r: &FiniteRing, e: Elem) -> Result<(FiniteRing, Vec<u32>)> {
    r.check_elem(e)?;
    if !r.is_idempotent(e) {
        return Err(QbrError::NotIdempotent(e.0));
    }
    let mut members = r.empty_set();
    for x in r.elements() {
        members.insert(r.mul3(e, x, e));
    }
    let embed: Vec<u32> = members.iter().map(|m| m.0).collect();
    let cn = embed.len();
    let index_of = |x: Elem| -> u32 { embed.binary_search(&x.0).unwrap() as u32 };
    let mut add = vec![0u32; cn * cn];
    let mut mul = vec![0u32; cn * cn];
    for (ia, &ea) in embed.iter().enumerate() {
        for (ib, &eb) in embed.iter().enumerate() {
            add[ia * cn + ib] = index_of(r.add(Elem(ea), Elem(eb)));
            mul[ia * cn + ib] = index_of(r.mul(Elem(ea), Elem(eb)));
        }
    }
    let one = Some(index_of(e));
    let c = FiniteRing::assemble(format!("corner(e={}, {})", e.0, r.label), cn, add, mul, one)?;
    Ok((c, embed))
}

/// A (typically non-unital) subring on an additively and multiplicatively
/// closed member set, e.g. an ideal viewed as a ring in its own right.
/// Returns the subring and the embedding map into R.
pub fn subring_on_members(r: &FiniteRing, members: &ElemSet, label: String) -> Result<(FiniteRing, Vec<u32>)> {
    r.same_ring_as_set(members)?;
    if !members.contains(r.zero()) {
        return Err(QbrError::MalformedSpec("subring member set misses 0".into()));
    }
    let embed: Vec<u32> = members.iter().map(|m| m.0).collect();
    let sn = embed.len();
    let index_of = |x: Elem| -> Result<u32> {
        embed.binary_search(&x.0).map(|i| i as u32).map_err(|_| QbrError::MalformedSpec("member set not closed".into()))
    };
    let mut add = vec![0u32; sn * sn];
    let mut mul = vec![0u32; sn * sn];
    for (ia, &ea) in embed.iter().enumerate() {
        for (ib, &eb) in embed.iter().enumerate() {
            add[ia * sn + ib] = index_of(r.add(Elem(ea), Elem(eb)))?;
            mul[ia * sn + ib] = index_of(r.mul(Elem(ea), Elem(eb)))?;
        }
    }
    // keep an identity only if the set happens to contain one for itself
    let one = embed
        .iter()
        .position(|&e| {
            embed.iter().all(|&x| {
                r.mul(Elem(e), Elem(x)) == Elem(x) && r.mul(Elem(x), Elem(e)) == Elem(x)
            })
        })
        .map(|i| i as u32);
    let s = FiniteRing::assemble(label, sn, add, mul, one)?;
    Ok((s, embed))
}

/// Minimal unitization R + Z_m with m the additive exponent of R.
/// Pairs (r, i) are packed as r + |R| * i; multiplication is
/// (r, i)(s, j) = (rs + j*r + i*s, ij).
pub fn unitization(r: &FiniteRing) -> Result<(FiniteRing, Vec<u32>)> {
    let n = r.order();
    let mut m: u64 = 1;
    for a in r.elements() {
        m = lcm(m, r.additive_order(a));
    }
    let total = capped_product([n, m as usize])?;
    let decode = |idx: u32| -> (Elem, u64) { (Elem(idx % n as u32), (idx / n as u32) as u64) };
    let encode = |e: Elem, i: u64| -> u32 { e.0 + (n as u64 * (i % m)) as u32 };
    let mut add = vec![0u32; total * total];
    let mut mul = vec![0u32; total * total];
    for a in 0..total as u32 {
        let (ra, ia) = decode(a);
        for b in 0..total as u32 {
            let (rb, ib) = decode(b);
            add[a as usize * total + b as usize] = encode(r.add(ra, rb), (ia + ib) % m);
            let prod = r.add(r.add(r.mul(ra, rb), r.smul(ib, ra)), r.smul(ia, rb));
            mul[a as usize * total + b as usize] = encode(prod, ia * ib % m);
        }
    }
    let one = Some(encode(Elem(0), 1 % m));
    let embed: Vec<u32> = (0..n as u32).collect();
    let u = FiniteRing::assemble(format!("unitization({}; Z{m})", r.label), total, add, mul, one)?;
    Ok((u, embed))
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn build_table(add: &[u32], mul: &[u32], one: Option<u32>) -> Result<FiniteRing> {
    let n2 = add.len();
    let n = (n2 as f64).sqrt().round() as usize;
    if n * n != n2 || mul.len() != n2 {
        return Err(QbrError::MalformedSpec("table length is not a perfect square or tables disagree".into()));
    }
    let r = FiniteRing::assemble(format!("table(n={n})"), n, add.to_vec(), mul.to_vec(), one)?;
    // untrusted input: run the full law scan up front
    r.validate_full()?;
    Ok(r)
}

/// Builds a ring from its recipe.
pub fn build_ring(spec: &RingSpec) -> Result<FiniteRing> {
    match spec {
        RingSpec::Zn { n } => build_zn(*n),
        RingSpec::Gf { q } => build_gf(*q),
        RingSpec::Matrix { size, base } => build_matrix(&build_ring(base)?, *size as usize, false),
        RingSpec::UpperTriangular { size, base } => build_matrix(&build_ring(base)?, *size as usize, true),
        RingSpec::Product { factors } => {
            let built: Result<Vec<_>> = factors.iter().map(build_ring).collect();
            build_product(&built?)
        }
        RingSpec::Quotient { base, ideal_generators } => {
            let b = build_ring(base)?;
            let gens: Vec<Elem> = ideal_generators.iter().map(|&g| Elem(g)).collect();
            Ok(quotient_ring(&b, &gens)?.0)
        }
        RingSpec::Corner { base, idempotent } => {
            let b = build_ring(base)?;
            Ok(corner_ring(&b, Elem(*idempotent))?.0)
        }
        RingSpec::Unitization { base } => Ok(unitization(&build_ring(base)?)?.0),
        RingSpec::Table { add, mul, one } => build_table(add, mul, *one),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zn(n: u32) -> FiniteRing {
        build_ring(&RingSpec::Zn { n }).unwrap()
    }

    #[test]
    fn zn_arithmetic() {
        let r = zn(6);
        assert_eq!(r.order(), 6);
        assert_eq!(r.add(Elem(4), Elem(5)), Elem(3));
        assert_eq!(r.mul(Elem(4), Elem(5)), Elem(2));
        assert_eq!(r.neg(Elem(2)), Elem(4));
        assert_eq!(r.one(), Some(Elem(1)));
        r.validate_full().unwrap();
    }

    #[test]
    fn units_of_z6_and_z4() {
        assert_eq!(zn(6).units().to_vec(), vec![Elem(1), Elem(5)]);
        assert_eq!(zn(4).units().to_vec(), vec![Elem(1), Elem(3)]);
    }

    #[test]
    fn gf4_is_a_field_with_recorded_modulus() {
        let f4 = build_ring(&RingSpec::Gf { q: 4 }).unwrap();
        assert_eq!(f4.order(), 4);
        assert!(f4.label().contains("x^2+x+1"));
        f4.validate_full().unwrap();
        // every nonzero element invertible
        assert_eq!(f4.units().len(), 3);
        // x * (x+1) = x^2 + x = 1 under x^2 = x + 1
        assert_eq!(f4.mul(Elem(2), Elem(3)), Elem(1));
    }

    #[test]
    fn gf8_gf9_field_laws() {
        for q in [8u32, 9, 16, 27, 25] {
            let f = build_ring(&RingSpec::Gf { q }).unwrap();
            f.validate_full().unwrap();
            assert_eq!(f.units().len(), q as usize - 1, "GF({q})");
            assert!(f.is_commutative());
        }
    }

    #[test]
    fn gf_rejects_non_prime_power() {
        assert!(matches!(build_ring(&RingSpec::Gf { q: 6 }), Err(QbrError::MalformedSpec(_))));
        assert!(matches!(build_ring(&RingSpec::Gf { q: 4096 }), Err(QbrError::MalformedSpec(_)))); // 2^12, degree > 4
    }

    #[test]
    fn matrix_ring_m2f2() {
        let m = build_ring(&RingSpec::Matrix { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) }).unwrap();
        assert_eq!(m.order(), 16);
        m.validate_full().unwrap();
        // |GL2(F2)| = 6
        assert_eq!(m.units().len(), 6);
        assert!(!m.is_commutative());
        // e01 * e10 = e00, e10 * e01 = e11
        let e01 = Elem(matrix_encode(2, &[0, 1, 0, 0]));
        let e10 = Elem(matrix_encode(2, &[0, 0, 1, 0]));
        let e00 = Elem(matrix_encode(2, &[1, 0, 0, 0]));
        let e11 = Elem(matrix_encode(2, &[0, 0, 0, 1]));
        assert_eq!(m.mul(e01, e10), e00);
        assert_eq!(m.mul(e10, e01), e11);
        assert_eq!(m.mul(e01, e01), m.zero());
    }

    #[test]
    fn matrix_encode_decode_roundtrip() {
        for idx in 0..81u32 {
            let entries = matrix_decode(3, 2, idx);
            assert_eq!(matrix_encode(3, &entries), idx);
        }
    }

    #[test]
    fn upper_triangular_t2f2() {
        let t = build_ring(&RingSpec::UpperTriangular { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) }).unwrap();
        assert_eq!(t.order(), 8);
        t.validate_full().unwrap();
        assert_eq!(t.units().len(), 2);
    }

    #[test]
    fn product_and_projection_arithmetic() {
        let p = build_ring(&RingSpec::Product {
            factors: vec![RingSpec::Zn { n: 4 }, RingSpec::Zn { n: 2 }],
        })
        .unwrap();
        assert_eq!(p.order(), 8);
        p.validate_full().unwrap();
        assert_eq!(p.units().len(), 2);
        // additive order of (1,1) is 4, so the group is Z4 x Z2, not Z8
        let e = p.one_unchecked();
        assert_eq!(p.additive_order(e), 4);
    }

    #[test]
    fn quotient_z12_by_4_is_z4() {
        let z12 = zn(12);
        let (q, proj) = quotient_ring(&z12, &[Elem(4)]).unwrap();
        assert_eq!(q.order(), 4);
        q.validate_full().unwrap();
        assert_eq!(proj[5], proj[9]);
        assert_ne!(proj[5], proj[6]);
        assert_eq!(proj[0], 0);
        assert_eq!(q.one(), Some(Elem(proj[1])));
    }

    #[test]
    fn corner_of_m2f2_at_e11_is_f2() {
        let m = build_ring(&RingSpec::Matrix { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) }).unwrap();
        let e00 = Elem(matrix_encode(2, &[1, 0, 0, 0]));
        let (c, embed) = corner_ring(&m, e00).unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c.one(), Some(Elem(1)));
        assert_eq!(embed[1], e00.0);
        c.validate_full().unwrap();
    }

    #[test]
    fn corner_rejects_non_idempotent() {
        let r = zn(6);
        assert!(matches!(corner_ring(&r, Elem(2)), Err(QbrError::NotIdempotent(2))));
    }

    #[test]
    fn unitization_of_2z4() {
        // {0, 2} inside Z4: additive exponent 2, unitization has order 4
        let z4 = zn(4);
        let members = z4.set_of([Elem(0), Elem(2)]);
        let (s, _) = subring_on_members(&z4, &members, "2Z4".into()).unwrap();
        assert!(!s.is_unital());
        let (u, _) = unitization(&s).unwrap();
        assert_eq!(u.order(), 4);
        u.validate_full().unwrap();
        assert!(u.is_unital());
        // (x, 0)^2 = 0 for x the image of 2: nilpotent stays nilpotent
        assert_eq!(u.mul(Elem(1), Elem(1)), u.zero());
    }

    #[test]
    fn unitization_of_unital_ring_allowed() {
        let (u, _) = unitization(&zn(3)).unwrap();
        assert_eq!(u.order(), 9);
        u.validate_full().unwrap();
    }

    #[test]
    fn opposite_reverses_products() {
        let t = build_ring(&RingSpec::UpperTriangular { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) }).unwrap();
        let o = t.opposite();
        for a in t.elements() {
            for b in t.elements() {
                assert_eq!(o.mul(a, b), t.mul(b, a));
            }
        }
        o.validate_full().unwrap();
    }

    #[test]
    fn table_spec_roundtrip_and_rejection() {
        let z2 = zn(2);
        let spec = RingSpec::Table { add: z2.add.clone(), mul: z2.mul.clone(), one: Some(1) };
        let r = build_ring(&spec).unwrap();
        assert_eq!(r.order(), 2);
        // corrupt associativity: 1*1 = 1 but flip (1,1) of a product ring
        let p = build_ring(&RingSpec::Product { factors: vec![RingSpec::Zn { n: 2 }, RingSpec::Zn { n: 2 }] }).unwrap();
        let mut bad_mul = p.mul.clone();
        bad_mul[3 * 4 + 3] = 2;
        let bad = RingSpec::Table { add: p.add.clone(), mul: bad_mul, one: None };
        assert!(matches!(build_ring(&bad), Err(QbrError::MalformedSpec(_))));
    }

    #[test]
    fn spec_json_shape() {
        let spec = RingSpec::Matrix { size: 2, base: Box::new(RingSpec::Zn { n: 2 }) };
        let js = serde_json::to_value(&spec).unwrap();
        assert_eq!(js, serde_json::json!({"kind":"matrix","size":2,"base":{"kind":"zn","n":2}}));
        let back: RingSpec = serde_json::from_value(js).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn order_cap_enforced() {
        assert!(matches!(build_ring(&RingSpec::Zn { n: 4097 }), Err(QbrError::OrderCapExceeded(..))));
        let m3z3 = RingSpec::Matrix { size: 3, base: Box::new(RingSpec::Zn { n: 3 }) };
        assert!(matches!(build_ring(&m3z3), Err(QbrError::OrderCapExceeded(..)))); // 3^9
    }

    #[test]
    fn foreign_element_detected() {
        let r = zn(4);
        assert!(matches!(r.check_elem(Elem(4)), Err(QbrError::ForeignElement(4, 4))));
        let s = zn(5);
        assert!(r.same_ring_as_set(&s.full_set()).is_err());
    }
}
