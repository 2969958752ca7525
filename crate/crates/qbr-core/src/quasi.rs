//! Quasi-invertibility: central orthogonality, quasi-inverses and their
//! families, quasi-adverses for non-unital rings, skew corners, and the
//! constructions that extend regular elements to quasi-invertible ones.

use crate::error::{QbrError, Result};
use crate::regular::{extends, first_partial_inverse};
use crate::ring::{Elem, FiniteRing};
use crate::ElemSet;

/// x ⊥ y. For unital rings: xRy = 0 and yRx = 0. Without a unit the
/// check is intrinsic, adding xy = yx = 0, which matches quantifying
/// over the unitization without depending on its characteristic.
pub fn centrally_orthogonal(r: &FiniteRing, x: Elem, y: Elem) -> bool {
    let zero = r.zero();
    if !r.is_unital() && (r.mul(x, y) != zero || r.mul(y, x) != zero) {
        return false;
    }
    r.elements().all(|s| r.mul3(x, s, y) == zero && r.mul3(y, s, x) == zero)
}

/// A quasi-invertibility certificate: uvu = u, vuv = v, and the
/// idempotents 1-uv, 1-vu are centrally orthogonal.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct QIWitness {
    pub u: Elem,
    pub v: Elem,
}

impl QIWitness {
    pub fn verify(&self, r: &FiniteRing) -> bool {
        if !r.is_unital() {
            return false;
        }
        let (u, v) = (self.u, self.v);
        r.mul3(u, v, u) == u
            && r.mul3(v, u, v) == v
            && centrally_orthogonal(r, r.one_minus_mul(u, v), r.one_minus_mul(v, u))
    }
}

/// Decides u ∈ R_q⁻¹ and produces a witness. Fast path: take the first
/// normalized partial inverse v of u; if no partial inverse exists, u is
/// not quasi-invertible (quasi-invertible elements are regular), and if
/// (1-uv) ⊥ (1-vu) fails for this one v it fails for every choice, since
/// every partial inverse of a quasi-invertible element is a quasi-inverse.
pub fn quasi_invertible(r: &FiniteRing, u: Elem) -> Result<Option<QIWitness>> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    r.check_elem(u)?;
    let v = match first_partial_inverse(r, u) {
        Some(v) => v,
        None => return Ok(None),
    };
    if centrally_orthogonal(r, r.one_minus_mul(u, v), r.one_minus_mul(v, u)) {
        Ok(Some(QIWitness { u, v }))
    } else {
        Ok(None)
    }
}

pub fn is_quasi_invertible(r: &FiniteRing, u: Elem) -> bool {
    matches!(quasi_invertible(r, u), Ok(Some(_)))
}

/// Exhaustive oracle for the definition: scans all (a, b) for
/// (1-ua) ⊥ (1-bu) and returns the first hit. Kept as a cross-check for
/// the fast path; quadratically many orthogonality scans, so test-sized
/// rings only.
pub fn quasi_invertible_exhaustive(r: &FiniteRing, u: Elem) -> Result<Option<(Elem, Elem)>> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    r.check_elem(u)?;
    for a in r.elements() {
        let s = r.one_minus_mul(u, a);
        for b in r.elements() {
            if centrally_orthogonal(r, s, r.one_minus_mul(b, u)) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// All quasi-invertible elements, by the fast path.
pub fn quasi_invertible_set(r: &FiniteRing) -> Result<ElemSet> {
    let mut out = r.empty_set();
    for u in r.elements() {
        if quasi_invertible(r, u)?.is_some() {
            out.insert(u);
        }
    }
    Ok(out)
}

/// From a defining pair (1-ua) ⊥ (1-bu), the canonical quasi-inverse
/// v = a + b - aub. Verifies uvu = u, the product identities
/// 1-uv = (1-ua)(1-ub) and 1-vu = (1-au)(1-bu), and (1-uv) ⊥ (1-vu).
pub fn quasi_inverse_canonical(r: &FiniteRing, u: Elem, a: Elem, b: Elem) -> Result<Elem> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    for e in [u, a, b] {
        r.check_elem(e)?;
    }
    if !centrally_orthogonal(r, r.one_minus_mul(u, a), r.one_minus_mul(b, u)) {
        return Err(QbrError::PreconditionViolated("(1-ua) is not orthogonal to (1-bu)".into()));
    }
    let v = r.sub(r.add(a, b), r.mul3(a, u, b));
    let uv = r.one_minus_mul(u, v);
    let vu = r.one_minus_mul(v, u);
    let ok = r.mul3(u, v, u) == u
        && uv == r.mul(r.one_minus_mul(u, a), r.one_minus_mul(u, b))
        && vu == r.mul(r.one_minus_mul(a, u), r.one_minus_mul(b, u))
        && centrally_orthogonal(r, uv, vu);
    if !ok {
        return Err(QbrError::InvalidWitness(format!(
            "canonical quasi-inverse identities failed for u={u}, a={a}, b={b}"
        )));
    }
    Ok(v)
}

/// The verification record accompanying a family member
/// v' = v + a(1-uv) + (1-vu)b. Every field is an exact check; the sweep
/// criteria demand that all of them hold on every input.
#[derive(Copy, Clone, Debug)]
pub struct FamilyRecord {
    pub v_prime: Elem,
    /// (1-uv') ⊥ (1-v'u)
    pub orth_new: bool,
    /// (1-uv') ⊥ (1-vu)
    pub orth_new_old: bool,
    /// (1-uv) ⊥ (1-v'u)
    pub orth_old_new: bool,
    /// 1-uv = (1-uv)(1-uv') and 1-uv' = (1-uv')(1-uv)
    pub absorb_uv: bool,
    /// 1-vu = (1-vu)(1-v'u) and 1-v'u = (1-v'u)(1-vu)
    pub absorb_vu: bool,
    /// 1-uv ~ 1-uv' and 1-vu ~ 1-v'u, with the absorption products as
    /// the equivalence witnesses
    pub mvn_ok: bool,
}

impl FamilyRecord {
    pub fn all_hold(&self) -> bool {
        self.orth_new
            && self.orth_new_old
            && self.orth_old_new
            && self.absorb_uv
            && self.absorb_vu
            && self.mvn_ok
    }
}

/// Absorption makes the Murray-von Neumann witnesses explicit: when
/// s = st and t = ts, the pair (s, t) itself satisfies s·t = s, t·s = t.
fn absorbed_mvn(r: &FiniteRing, s: Elem, t: Elem) -> bool {
    r.mul(s, t) == s && r.mul(t, s) == t && r.is_idempotent(s) && r.is_idempotent(t)
}

/// Thm 2.3 forward direction: v' = v + a(1-uv) + (1-vu)b, with the full
/// relation record.
pub fn quasi_inverse_family(r: &FiniteRing, w: &QIWitness, a: Elem, b: Elem) -> Result<FamilyRecord> {
    r.check_elem(a)?;
    r.check_elem(b)?;
    if !w.verify(r) {
        return Err(QbrError::InvalidWitness(format!("({}, {}) is not a quasi-inverse pair", w.u, w.v)));
    }
    let (u, v) = (w.u, w.v);
    let p_uv = r.one_minus_mul(u, v);
    let p_vu = r.one_minus_mul(v, u);
    let v2 = r.add(r.add(v, r.mul(a, p_uv)), r.mul(p_vu, b));
    let p_uv2 = r.one_minus_mul(u, v2);
    let p_v2u = r.one_minus_mul(v2, u);
    Ok(FamilyRecord {
        v_prime: v2,
        orth_new: centrally_orthogonal(r, p_uv2, p_v2u),
        orth_new_old: centrally_orthogonal(r, p_uv2, p_vu),
        orth_old_new: centrally_orthogonal(r, p_uv, p_v2u),
        absorb_uv: r.mul(p_uv, p_uv2) == p_uv && r.mul(p_uv2, p_uv) == p_uv2,
        absorb_vu: r.mul(p_vu, p_v2u) == p_vu && r.mul(p_v2u, p_vu) == p_v2u,
        mvn_ok: absorbed_mvn(r, p_uv, p_uv2) && absorbed_mvn(r, p_vu, p_v2u),
    })
}

/// Thm 2.3 converse: any partial inverse v' of a quasi-invertible u
/// decomposes as v + (1-vu)v' + v'(1-uv) and is itself a quasi-inverse.
#[derive(Copy, Clone, Debug)]
pub struct ConverseDecomposition {
    /// (1-vu)v'
    pub component_left: Elem,
    /// v'(1-uv)
    pub component_right: Elem,
    /// v' = v + component_left + component_right
    pub identity_holds: bool,
    /// (u, v') as a certificate in its own right
    pub witness: QIWitness,
    pub witness_valid: bool,
}

pub fn converse_partial_inverse(r: &FiniteRing, w: &QIWitness, v2: Elem) -> Result<ConverseDecomposition> {
    r.check_elem(v2)?;
    if !w.verify(r) {
        return Err(QbrError::InvalidWitness(format!("({}, {}) is not a quasi-inverse pair", w.u, w.v)));
    }
    let (u, v) = (w.u, w.v);
    if r.mul3(u, v2, u) != u {
        return Err(QbrError::NotAPartialInverse);
    }
    let left = r.mul(r.one_minus_mul(v, u), v2);
    let right = r.mul(v2, r.one_minus_mul(u, v));
    let witness = QIWitness { u, v: v2 };
    Ok(ConverseDecomposition {
        component_left: left,
        component_right: right,
        identity_holds: r.add(r.add(v, left), right) == v2,
        witness,
        witness_valid: r.mul3(u, v2, u) == u
            && centrally_orthogonal(r, r.one_minus_mul(u, v2), r.one_minus_mul(v2, u)),
    })
}

/// Prop 2.9 (ii) => (i): from a = ava with v quasi-invertible, build u
/// quasi-invertible with a ≤ u. Follows the proof: frame idempotents
/// p = va, q = av, a partial inverse w of v giving e = vw, f = wv, the
/// corrected idempotents e' = (1-p)e and f' = f(1-q), then solve
/// p + e' = vs and q + f' = tv and set u = tvs.
pub fn extend_regular_via_qinv(r: &FiniteRing, a: Elem, v: Elem) -> Result<Elem> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    r.check_elem(a)?;
    r.check_elem(v)?;
    if quasi_invertible(r, v)?.is_none() {
        return Err(QbrError::PreconditionViolated("v is not quasi-invertible".into()));
    }
    if r.mul3(a, v, a) != a {
        return Err(QbrError::PreconditionViolated("ava = a fails".into()));
    }
    let one = r.one_unchecked();
    let p = r.mul(v, a);
    let q = r.mul(a, v);
    let w = first_partial_inverse(r, v).expect("quasi-invertible elements are regular");
    let e = r.mul(v, w);
    let f = r.mul(w, v);
    let e2 = r.mul(r.sub(one, p), e);
    let f2 = r.mul(f, r.sub(one, q));
    if !r.is_idempotent(e2) || !r.is_idempotent(f2) {
        return Err(QbrError::ConstructionFailed("corrected idempotents e', f' are not idempotent".into()));
    }
    let pe = r.add(p, e2);
    let qf = r.add(q, f2);
    let s = r
        .elements()
        .find(|&s| r.mul(v, s) == pe)
        .ok_or_else(|| QbrError::ConstructionFailed("no s with vs = p + e'".into()))?;
    let t = r
        .elements()
        .find(|&t| r.mul(t, v) == qf)
        .ok_or_else(|| QbrError::ConstructionFailed("no t with tv = q + f'".into()))?;
    let u = r.mul3(t, v, s);
    let ok = r.mul(v, u) == pe
        && r.mul(u, v) == qf
        && r.mul3(v, u, v) == v
        && quasi_invertible(r, u)?.is_some()
        && extends(r, a, u).is_some();
    if !ok {
        return Err(QbrError::ConstructionFailed(format!(
            "u = tvs failed verification for a={a}, v={v}"
        )));
    }
    Ok(u)
}

/// A quasi-adversibility certificate: x + y - xy and x + y - yx are
/// centrally orthogonal idempotents (intrinsic orthogonality).
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct QAWitness {
    pub x: Elem,
    pub y: Elem,
}

impl QAWitness {
    pub fn verify(&self, r: &FiniteRing) -> bool {
        let (x, y) = (self.x, self.y);
        let s = r.sub(r.add(x, y), r.mul(x, y));
        let t = r.sub(r.add(x, y), r.mul(y, x));
        r.is_idempotent(s) && r.is_idempotent(t) && intrinsically_orthogonal(r, s, t)
    }
}

/// The unitization-free orthogonality used throughout the non-unital
/// theory: sRt = tRs = 0 together with st = ts = 0.
pub fn intrinsically_orthogonal(r: &FiniteRing, s: Elem, t: Elem) -> bool {
    let zero = r.zero();
    r.mul(s, t) == zero
        && r.mul(t, s) == zero
        && r.elements().all(|m| r.mul3(s, m, t) == zero && r.mul3(t, m, s) == zero)
}

/// Left adversible: a + x = ax for some a.
pub fn left_adversible_set(r: &FiniteRing) -> ElemSet {
    let mut out = r.empty_set();
    for x in r.elements() {
        if r.elements().any(|a| r.add(a, x) == r.mul(a, x)) {
            out.insert(x);
        }
    }
    out
}

/// Right adversible: x + a = xa for some a.
pub fn right_adversible_set(r: &FiniteRing) -> ElemSet {
    let mut out = r.empty_set();
    for x in r.elements() {
        if r.elements().any(|a| r.add(x, a) == r.mul(x, a)) {
            out.insert(x);
        }
    }
    out
}

/// Adversible on both sides; the left and right adverses then coincide.
pub fn adversible_set(r: &FiniteRing) -> ElemSet {
    left_adversible_set(r).intersect(&right_adversible_set(r))
}

/// Decides x ∈ R_q° by the defining exhaustive search over pairs (b, c)
/// with (x + b - xb) ⊥ (x + c - cx), then packages the single
/// quasi-adverse y = bx + xc + bc - x - bxc, which is the image of the
/// canonical quasi-inverse construction in the unitization.
pub fn quasi_adversible(r: &FiniteRing, x: Elem) -> Option<QAWitness> {
    for b in r.elements() {
        let s = r.sub(r.add(x, b), r.mul(x, b));
        for c in r.elements() {
            let t = r.sub(r.add(x, c), r.mul(c, x));
            if !intrinsically_orthogonal(r, s, t) {
                continue;
            }
            let y = r.sub(
                r.add(r.add(r.mul(b, x), r.mul(x, c)), r.mul(b, c)),
                r.add(x, r.mul3(b, x, c)),
            );
            let w = QAWitness { x, y };
            if w.verify(r) {
                return Some(w);
            }
        }
    }
    None
}

pub fn quasi_adversible_set(r: &FiniteRing) -> ElemSet {
    let mut out = r.empty_set();
    for x in r.elements() {
        if quasi_adversible(r, x).is_some() {
            out.insert(x);
        }
    }
    out
}

/// The skew corner pRq as a sorted list.
pub fn skew_corner(r: &FiniteRing, p: Elem, q: Elem) -> ElemSet {
    let mut out = r.empty_set();
    for x in r.elements() {
        out.insert(r.mul3(p, x, q));
    }
    out
}

/// Quasi-invertibility inside a skew corner: x ∈ (pRq)_q⁻¹ iff some
/// a, b in qRp give (p - xa) ⊥ (q - bx). Returns the normalized witness
/// y ∈ qRp with x = xyx, y = yxy, and (p - xy) ⊥ (q - yx).
pub fn skew_corner_qinv(r: &FiniteRing, p: Elem, q: Elem, x: Elem) -> Result<Option<Elem>> {
    for e in [p, q, x] {
        r.check_elem(e)?;
    }
    if !r.is_idempotent(p) {
        return Err(QbrError::NotIdempotent(p.0));
    }
    if !r.is_idempotent(q) {
        return Err(QbrError::NotIdempotent(q.0));
    }
    if r.mul3(p, x, q) != x {
        return Err(QbrError::NotInCorner(x.0));
    }
    let corner = skew_corner(r, p, q);
    if corner.len() == 1 {
        return Err(QbrError::PreconditionViolated("pRq = 0".into()));
    }
    let qrp = skew_corner(r, q, p);
    for a in qrp.iter() {
        let left = r.sub(p, r.mul(x, a));
        for b in qrp.iter() {
            if !centrally_orthogonal(r, left, r.sub(q, r.mul(b, x))) {
                continue;
            }
            let y0 = r.sub(r.add(a, b), r.mul3(a, x, b));
            let y = r.mul3(y0, x, y0);
            let good = r.mul3(q, y, p) == y
                && r.mul3(x, y, x) == x
                && r.mul3(y, x, y) == y
                && centrally_orthogonal(r, r.sub(p, r.mul(x, y)), r.sub(q, r.mul(y, x)));
            if good {
                return Ok(Some(y));
            }
        }
    }
    Ok(None)
}

/// Agreement report for the corner transfer (and the perturbation
/// stability swept on the side).
#[derive(Copy, Clone, Debug)]
pub struct CornerTransferReport {
    pub corner_side: bool,
    pub ambient_side: bool,
    pub agree: bool,
    pub cor54_checked: usize,
    pub cor54_violations: usize,
}

/// Thm 5.5: with 1-p = uv and 1-q = vu (normalized), an element
/// x ∈ pRq is corner-quasi-invertible exactly when u + x ∈ R_q⁻¹.
/// Both sides are computed independently. When the ambient side holds,
/// every perturbation u + x + y with y ∈ (1-p)Rq is additionally
/// checked to stay quasi-invertible.
pub fn corner_transfer(
    r: &FiniteRing,
    u: Elem,
    v: Elem,
    p: Elem,
    q: Elem,
    x: Elem,
) -> Result<CornerTransferReport> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    for e in [u, v, p, q, x] {
        r.check_elem(e)?;
    }
    let one = r.one_unchecked();
    let cp = r.sub(one, p);
    let cq = r.sub(one, q);
    if !r.is_idempotent(p) || !r.is_idempotent(q) {
        return Err(QbrError::BadEquivalenceData("p or q is not idempotent".into()));
    }
    if r.mul(u, v) != cp || r.mul(v, u) != cq {
        return Err(QbrError::BadEquivalenceData("uv = 1-p, vu = 1-q fails".into()));
    }
    if r.mul3(cp, u, cq) != u || r.mul3(cq, v, cp) != v {
        return Err(QbrError::BadEquivalenceData("witnesses not normalized into the corners".into()));
    }
    if r.mul3(p, x, q) != x {
        return Err(QbrError::BadEquivalenceData(format!("x = {x} is not in pRq")));
    }
    if skew_corner(r, p, q).len() == 1 {
        return Err(QbrError::BadEquivalenceData("pRq = 0".into()));
    }
    let corner_side = skew_corner_qinv(r, p, q, x)?.is_some();
    let base = r.add(u, x);
    let ambient_side = quasi_invertible(r, base)?.is_some();
    let mut checked = 0;
    let mut violations = 0;
    if ambient_side {
        for y in skew_corner(r, cp, q).iter() {
            checked += 1;
            if quasi_invertible(r, r.add(base, y))?.is_none() {
                violations += 1;
            }
        }
    }
    Ok(CornerTransferReport {
        corner_side,
        ambient_side,
        agree: corner_side == ambient_side,
        cor54_checked: checked,
        cor54_violations: violations,
    })
}

/// Thm 5.9: a regular element a in cl(R_q⁻¹) sits under a
/// quasi-invertible. With p = 1-ax and q = 1-xa, some y makes
/// a + yq quasi-invertible; u = a + pyq then works and a ≤ u.
pub fn extend_to_quasi_invertible(r: &FiniteRing, a: Elem, x: Elem) -> Result<Elem> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    r.check_elem(a)?;
    r.check_elem(x)?;
    if r.mul3(a, x, a) != a || r.mul3(x, a, x) != x {
        return Err(QbrError::PreconditionViolated("x is not a normalized partial inverse of a".into()));
    }
    let qset = quasi_invertible_set(r)?;
    if !crate::closure::in_cl(r, &qset, a) {
        return Err(QbrError::NoReducer(format!("{a} is not in cl of the quasi-invertibles")));
    }
    let p = r.one_minus_mul(a, x);
    let q = r.one_minus_mul(x, a);
    let y = r
        .elements()
        .find(|&y| qset.contains(r.add(a, r.mul(y, q))))
        .ok_or_else(|| QbrError::NoReducer(format!("no y with a + yq quasi-invertible for a={a}")))?;
    let u = r.add(a, r.mul3(p, y, q));
    if !qset.contains(u) || extends(r, a, u).is_none() {
        return Err(QbrError::ConstructionFailed(format!(
            "u = a + pyq failed verification for a={a}, x={x}"
        )));
    }
    Ok(u)
}
