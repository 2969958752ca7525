//! Von Neumann regularity: partial inverses, idempotents, equivalence of
//! idempotents, and the extension order on regular elements.

use crate::error::{QbrError, Result};
use crate::ring::{Elem, FiniteRing};
use crate::ElemSet;

/// All partial inverses of a, each normalized so that x = xax as well as
/// a = axa, deduplicated and sorted. Empty exactly when a is not regular.
pub fn partial_inverses(r: &FiniteRing, a: Elem) -> Vec<Elem> {
    let mut out = r.empty_set();
    for x in r.elements() {
        if r.mul3(a, x, a) == a {
            out.insert(r.mul3(x, a, x));
        }
    }
    out.to_vec()
}

/// First normalized partial inverse in index order, if any.
pub fn first_partial_inverse(r: &FiniteRing, a: Elem) -> Option<Elem> {
    r.elements().find(|&x| r.mul3(a, x, a) == a).map(|x| r.mul3(x, a, x))
}

pub fn is_regular(r: &FiniteRing, a: Elem) -> bool {
    r.elements().any(|x| r.mul3(a, x, a) == a)
}

pub fn regular_elements(r: &FiniteRing) -> ElemSet {
    let mut out = r.empty_set();
    for a in r.elements() {
        if is_regular(r, a) {
            out.insert(a);
        }
    }
    out
}

pub fn idempotents(r: &FiniteRing) -> ElemSet {
    let mut out = r.empty_set();
    for e in r.elements() {
        if r.is_idempotent(e) {
            out.insert(e);
        }
    }
    out
}

/// {a·x : x in R} as a set.
pub fn right_multiples(r: &FiniteRing, a: Elem) -> ElemSet {
    let mut out = r.empty_set();
    for x in r.elements() {
        out.insert(r.mul(a, x));
    }
    out
}

/// {x·a : x in R} as a set.
pub fn left_multiples(r: &FiniteRing, a: Elem) -> ElemSet {
    let mut out = r.empty_set();
    for x in r.elements() {
        out.insert(r.mul(x, a));
    }
    out
}

/// Searches for (u, v) with p = uv, q = vu. The witnesses can always be
/// normalized into u ∈ pRq, v ∈ qRp (replace u by puq and v by qvp), so
/// the scan stays inside those corners. First hit in index order wins.
pub fn mvn_equivalent(r: &FiniteRing, p: Elem, q: Elem) -> Result<Option<(Elem, Elem)>> {
    r.check_elem(p)?;
    r.check_elem(q)?;
    if !r.is_idempotent(p) {
        return Err(QbrError::NotIdempotent(p.0));
    }
    if !r.is_idempotent(q) {
        return Err(QbrError::NotIdempotent(q.0));
    }
    let mut us = r.empty_set();
    let mut vs = r.empty_set();
    for x in r.elements() {
        us.insert(r.mul3(p, x, q));
        vs.insert(r.mul3(q, x, p));
    }
    for u in us.iter() {
        for v in vs.iter() {
            if r.mul(u, v) == p && r.mul(v, u) == q {
                return Ok(Some((u, v)));
            }
        }
    }
    Ok(None)
}

/// The extension order: b extends a when a = axb = bxa = axa for some x
/// and b is itself regular. Returns the first such x in index order.
/// The three equations alone are not taken as evidence that b is
/// regular; that is checked separately.
pub fn extends(r: &FiniteRing, a: Elem, b: Elem) -> Option<Elem> {
    if !is_regular(r, b) {
        return None;
    }
    r.elements().find(|&x| {
        r.mul3(a, x, b) == a && r.mul3(b, x, a) == a && r.mul3(a, x, a) == a
    })
}

/// (1-p)·m·(1-q) computed subtractively, so it also works where no unit
/// exists: m - pm - mq + pmq.
fn complement_sandwich(r: &FiniteRing, p: Elem, m: Elem, q: Elem) -> Elem {
    let pm = r.mul(p, m);
    let mq = r.mul(m, q);
    let pmq = r.mul(r.mul(p, m), q);
    r.add(r.sub(r.sub(m, pm), mq), pmq)
}

/// Realigns a partial extension witness: given pb = a = bq and a second
/// idempotent q' generating the same left multiples as q, produces
/// b' = a + (1-p)b(1-q') with Rb = Rb', bR = b'R, pb' = a = b'q'.
/// Preconditions and postconditions are all verified.
pub fn realign_partial_inverse(
    r: &FiniteRing,
    a: Elem,
    b: Elem,
    p: Elem,
    q: Elem,
    q2: Elem,
) -> Result<Elem> {
    for e in [a, b, p, q, q2] {
        r.check_elem(e)?;
    }
    for (e, name) in [(p, "p"), (q, "q"), (q2, "q'")] {
        if !r.is_idempotent(e) {
            return Err(QbrError::PreconditionViolated(format!("{name} is not idempotent")));
        }
    }
    if !is_regular(r, b) {
        return Err(QbrError::PreconditionViolated("b is not regular".into()));
    }
    if right_multiples(r, a) != right_multiples(r, p) {
        return Err(QbrError::PreconditionViolated("aR = pR fails".into()));
    }
    if left_multiples(r, a) != left_multiples(r, q) {
        return Err(QbrError::PreconditionViolated("Ra = Rq fails".into()));
    }
    if r.mul(p, b) != a || r.mul(b, q) != a {
        return Err(QbrError::PreconditionViolated("pb = a = bq fails".into()));
    }
    if left_multiples(r, q) != left_multiples(r, q2) {
        return Err(QbrError::PreconditionViolated("Rq = Rq' fails".into()));
    }
    let b2 = r.add(a, complement_sandwich(r, p, b, q2));
    if left_multiples(r, b) != left_multiples(r, b2) {
        return Err(QbrError::PreconditionViolated("post Rb = Rb' fails".into()));
    }
    if right_multiples(r, b) != right_multiples(r, b2) {
        return Err(QbrError::PreconditionViolated("post bR = b'R fails".into()));
    }
    if r.mul(p, b2) != a || r.mul(b2, q2) != a {
        return Err(QbrError::PreconditionViolated("post pb' = a = b'q' fails".into()));
    }
    Ok(b2)
}

/// For a ≤ b, the idempotent frame (p, q) = (ax, xa) with pb = a = bq and
/// b - a landing in the complementary corner (1-p)R(1-q).
pub fn decompose_extension(r: &FiniteRing, a: Elem, b: Elem) -> Result<(Elem, Elem)> {
    let x = extends(r, a, b).ok_or(QbrError::NotAnExtension)?;
    let p = r.mul(a, x);
    let q = r.mul(x, a);
    let d = r.sub(b, a);
    if r.mul(p, b) != a || r.mul(b, q) != a || complement_sandwich(r, p, d, q) != d {
        // the witness from extends always satisfies these; a failure
        // would mean the search itself is broken
        return Err(QbrError::InvalidWitness(format!(
            "decomposition frame failed for a={a}, b={b}, x={x}"
        )));
    }
    Ok((p, q))
}

/// Cap for the quadratic maximality sweep.
pub const MAXIMALITY_SWEEP_CAP: usize = 512;

/// Regular elements maximal in the extension order: no distinct regular b
/// with a ≤ b. Quadratic over the regular elements, so capped.
pub fn maximal_regular_elements(r: &FiniteRing) -> Result<ElemSet> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    if r.order() > MAXIMALITY_SWEEP_CAP {
        return Err(QbrError::ScaleCapExceeded(format!(
            "maximality sweep needs order <= {MAXIMALITY_SWEEP_CAP}, got {}",
            r.order()
        )));
    }
    let regs = regular_elements(r);
    let mut out = r.empty_set();
    for a in regs.iter() {
        let dominated = regs.iter().any(|b| b != a && extends(r, a, b).is_some());
        if !dominated {
            out.insert(a);
        }
    }
    Ok(out)
}
