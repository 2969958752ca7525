//! The cl/cr closure operators, the QB/B decision procedures built on them
//! (unital and intrinsic non-unital forms), the witnessed left-right symmetry
//! lemma, and the clause-by-clause closure-law suite.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{QbrError, Result};
use crate::ideals::{enumerate_ideals, ideal_as_subring, jacobson_radical, quotient, Ideal};
use crate::quasi::{
    is_quasi_invertible, quasi_adversible_set, quasi_invertible_set, QIWitness,
};
use crate::regular::left_multiples;
use crate::ring::{Elem, FiniteRing};
use crate::ElemSet;

/// a ∈ cl(A): for every x, with b = 1 - xa, some y brings a + yb into A.
/// Assumes a unital ring; `cl` performs the guard.
pub fn in_cl(r: &FiniteRing, target: &ElemSet, a: Elem) -> bool {
    let one = r.one_unchecked();
    r.elements().all(|x| {
        let b = r.sub(one, r.mul(x, a));
        r.elements().any(|y| target.contains(r.add(a, r.mul(y, b))))
    })
}

/// Right-handed mirror of `in_cl`: b = 1 - ax and the reducer is a + by.
pub fn in_cr(r: &FiniteRing, target: &ElemSet, a: Elem) -> bool {
    let one = r.one_unchecked();
    r.elements().all(|x| {
        let b = r.sub(one, r.mul(a, x));
        r.elements().any(|y| target.contains(r.add(a, r.mul(b, y))))
    })
}

pub fn cl(r: &FiniteRing, a_set: &ElemSet) -> Result<ElemSet> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    r.same_ring_as_set(a_set)?;
    let members: Vec<u32> = (0..r.order() as u32)
        .into_par_iter()
        .filter(|&a| in_cl(r, a_set, Elem(a)))
        .collect();
    Ok(r.set_of(members.into_iter().map(Elem)))
}

pub fn cr(r: &FiniteRing, a_set: &ElemSet) -> Result<ElemSet> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    r.same_ring_as_set(a_set)?;
    let members: Vec<u32> = (0..r.order() as u32)
        .into_par_iter()
        .filter(|&a| in_cr(r, a_set, Elem(a)))
        .collect();
    Ok(r.set_of(members.into_iter().map(Elem)))
}

/// Intrinsic membership a ∈ cl°(A), stated without a unit: for every x the
/// relation xa - x - a + b = 0 pins b = x + a - xa, and some y must bring
/// a - yb into A.
pub fn in_cl_circ(r: &FiniteRing, target: &ElemSet, a: Elem) -> bool {
    r.elements().all(|x| {
        let b = r.sub(r.add(x, a), r.mul(x, a));
        r.elements().any(|y| target.contains(r.sub(a, r.mul(y, b))))
    })
}

/// Mirror of `in_cl_circ`: b = x + a - ax and the reducer is a - by.
pub fn in_cr_circ(r: &FiniteRing, target: &ElemSet, a: Elem) -> bool {
    r.elements().all(|x| {
        let b = r.sub(r.add(x, a), r.mul(a, x));
        r.elements().any(|y| target.contains(r.sub(a, r.mul(b, y))))
    })
}

pub fn cl_circ(r: &FiniteRing, a_set: &ElemSet) -> Result<ElemSet> {
    r.same_ring_as_set(a_set)?;
    let members: Vec<u32> = (0..r.order() as u32)
        .into_par_iter()
        .filter(|&a| in_cl_circ(r, a_set, Elem(a)))
        .collect();
    Ok(r.set_of(members.into_iter().map(Elem)))
}

pub fn cr_circ(r: &FiniteRing, a_set: &ElemSet) -> Result<ElemSet> {
    r.same_ring_as_set(a_set)?;
    let members: Vec<u32> = (0..r.order() as u32)
        .into_par_iter()
        .filter(|&a| in_cr_circ(r, a_set, Elem(a)))
        .collect();
    Ok(r.set_of(members.into_iter().map(Elem)))
}

/// Outcome of a cl(target) = R test. On failure `counterexample` is the
/// smallest stuck pair in scan order: (a, x, b) with b = 1 - xa such that no
/// y brings a + yb into the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub holds: bool,
    pub counterexample: Option<(Elem, Elem, Elem)>,
}

pub fn cl_covers(r: &FiniteRing, target: &ElemSet) -> Result<ClosureVerdict> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    r.same_ring_as_set(target)?;
    let one = r.one_unchecked();
    for a in r.elements() {
        for x in r.elements() {
            let b = r.sub(one, r.mul(x, a));
            let reduced = r
                .elements()
                .any(|y| target.contains(r.add(a, r.mul(y, b))));
            if !reduced {
                return Ok(ClosureVerdict { holds: false, counterexample: Some((a, x, b)) });
            }
        }
    }
    Ok(ClosureVerdict { holds: true, counterexample: None })
}

/// cl(R_q⁻¹) = R.
pub fn is_qb_ring(r: &FiniteRing) -> Result<ClosureVerdict> {
    let q = quasi_invertible_set(r)?;
    cl_covers(r, &q)
}

/// cl(R⁻¹) = R.
pub fn is_b_ring(r: &FiniteRing) -> Result<ClosureVerdict> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    cl_covers(r, &r.units())
}

/// cl°(R_q°) = R, stated entirely inside R; no unitization is consulted.
/// Unital rings are accepted and then agree with `is_qb_ring` under the
/// t ↦ 1 - t translation.
pub fn is_qb_nonunital(r: &FiniteRing) -> bool {
    let qa = quasi_adversible_set(r);
    r.elements().all(|a| in_cl_circ(r, &qa, a))
}

#[derive(Clone, Debug)]
pub struct Lemma35Report {
    pub y: Elem,
    pub d: Elem,
    pub left_identity: bool,
    pub right_identity: bool,
    pub result_quasi_invertible: bool,
}

/// From ax + b = 1 and a quasi-invertible x + cb with quasi-inverse z, form
/// y = z(1 - ca) and d = x + (1 - xa)c and check the two factorizations
/// 1 - (a+by)d = b(1 - z(x+cb))(1 - ac) and
/// 1 - d(a+by) = (1 - xa)(1 - (x+cb)z)(1 - ca),
/// then that a + by is itself quasi-invertible.
pub fn lemma35_witness(
    r: &FiniteRing,
    a: Elem,
    x: Elem,
    b: Elem,
    c: Elem,
    z: Elem,
) -> Result<Lemma35Report> {
    for e in [a, x, b, c, z] {
        r.check_elem(e)?;
    }
    let one = r.one().ok_or(QbrError::NonUnitalRing)?;
    if r.add(r.mul(a, x), b) != one {
        return Err(QbrError::PreconditionViolated("ax + b = 1".into()));
    }
    let w = r.add(x, r.mul(c, b));
    if !(QIWitness { u: w, v: z }).verify(r) {
        return Err(QbrError::PreconditionViolated(
            "z is not a quasi-inverse of x + cb".into(),
        ));
    }
    let y = r.mul(z, r.one_minus_mul(c, a));
    let d = r.add(x, r.mul(r.one_minus_mul(x, a), c));
    let s = r.add(a, r.mul(b, y));
    let left_identity =
        r.one_minus_mul(s, d) == r.mul3(b, r.one_minus_mul(z, w), r.one_minus_mul(a, c));
    let right_identity = r.one_minus_mul(d, s)
        == r.mul3(r.one_minus_mul(x, a), r.one_minus_mul(w, z), r.one_minus_mul(c, a));
    Ok(Lemma35Report {
        y,
        d,
        left_identity,
        right_identity,
        result_quasi_invertible: is_quasi_invertible(r, s),
    })
}

/// cl(R_q⁻¹) and cr(R_q⁻¹) computed independently. The biconditional
/// `qb_left ⇔ qb_right` is a theorem; the setwise equality of the two closures
/// is not asserted anywhere and is carried as observational data only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub qb_left: bool,
    pub qb_right: bool,
    pub biconditional_holds: bool,
    pub setwise_equal: bool,
}

pub fn symmetry_check(r: &FiniteRing) -> Result<SymmetryReport> {
    let q = quasi_invertible_set(r)?;
    let left = cl(r, &q)?;
    let right = cr(r, &q)?;
    let full = r.full_set();
    let qb_left = left == full;
    let qb_right = right == full;
    Ok(SymmetryReport {
        qb_left,
        qb_right,
        biconditional_holds: qb_left == qb_right,
        setwise_equal: left == right,
    })
}

#[derive(Clone, Debug)]
pub struct ClauseOutcome {
    pub clause: &'static str,
    pub pass: bool,
    pub detail: Option<String>,
}

fn set_product(r: &FiniteRing, xs: &ElemSet, ys: &ElemSet) -> ElemSet {
    let mut out = r.empty_set();
    for x in xs.iter() {
        for y in ys.iter() {
            out.insert(r.mul(x, y));
        }
    }
    out
}

fn set_sum(r: &FiniteRing, xs: &ElemSet, ys: &ElemSet) -> ElemSet {
    let mut out = r.empty_set();
    for x in xs.iter() {
        for y in ys.iter() {
            out.insert(r.add(x, y));
        }
    }
    out
}

fn cl_memo(r: &FiniteRing, memo: &mut HashMap<ElemSet, ElemSet>, s: &ElemSet) -> ElemSet {
    if let Some(v) = memo.get(s) {
        return v.clone();
    }
    let v = cl(r, s).expect("caller checked the ring is unital");
    memo.insert(s.clone(), v.clone());
    v
}

fn sample_subsets(r: &FiniteRing, seed: u64) -> Result<Vec<ElemSet>> {
    let mut out = vec![
        r.empty_set(),
        r.set_of([r.zero()]),
        r.units(),
        quasi_invertible_set(r)?,
        r.full_set(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let mut s = r.empty_set();
        for i in 0..r.order() as u32 {
            if rng.next_u32() & 1 == 1 {
                s.insert(Elem(i));
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Clause-by-clause check of the closure-operator laws over the canonical
/// sets (∅, {0}, R⁻¹, R_q⁻¹, R) plus eight seeded random subsets. The
/// quotient clause runs over every proper quotient of R.
pub fn lemma32_suite(r: &FiniteRing, seed: u64) -> Result<Vec<ClauseOutcome>> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    let samples = sample_subsets(r, seed)?;
    let mut memo: HashMap<ElemSet, ElemSet> = HashMap::new();
    let radical = jacobson_radical(r)?.members().clone();
    let empty = r.empty_set();
    let full = r.full_set();
    let zero_only = r.set_of([r.zero()]);
    let linv = r.left_invertibles();
    let units = r.units();
    let mut out: Vec<ClauseOutcome> = Vec::with_capacity(11);
    let mut push = |clause: &'static str, pass: bool, detail: Option<String>| {
        out.push(ClauseOutcome { clause, pass, detail });
    };

    let pass_i =
        cl_memo(r, &mut memo, &empty) == empty && cl_memo(r, &mut memo, &full) == full;
    push("i", pass_i, None);

    let mut fail: Option<String> = None;
    'ii: for a in &samples {
        for b in &samples {
            let mut u = a.clone();
            u.union_with(b);
            if !cl_memo(r, &mut memo, a).is_subset(&cl_memo(r, &mut memo, &u)) {
                fail = Some(format!("A = {:?}, A∪B = {:?}", a, u));
                break 'ii;
            }
        }
    }
    push("ii", fail.is_none(), fail);

    let mut fail: Option<String> = None;
    for a in &samples {
        let c = cl_memo(r, &mut memo, a);
        if !a.is_subset(&c) || cl_memo(r, &mut memo, &c) != c {
            fail = Some(format!("A = {:?}", a));
            break;
        }
    }
    push("iii", fail.is_none(), fail);

    let mut fail: Option<String> = None;
    for a in &samples {
        if !a.is_empty() && !radical.is_subset(&cl_memo(r, &mut memo, a)) {
            fail = Some(format!("A = {:?}", a));
            break;
        }
    }
    push("iv", fail.is_none(), fail);

    let pass_v = cl_memo(r, &mut memo, &zero_only) == radical;
    push("v", pass_v, None);

    let mut fail: Option<String> = None;
    for a in &samples {
        let lhs = cl_memo(r, &mut memo, a).intersect(&linv);
        let rhs = a.intersect(&linv);
        if lhs != rhs {
            fail = Some(format!("A = {:?}", a));
            break;
        }
    }
    push("vi", fail.is_none(), fail);

    let mut fail: Option<String> = None;
    'vii: for a in &samples {
        let ca = cl_memo(r, &mut memo, a);
        for b in &samples {
            let lhs = set_product(r, b, &ca);
            let rhs = cl_memo(r, &mut memo, &set_product(r, b, a));
            if !lhs.is_subset(&rhs) {
                fail = Some(format!("A = {:?}, B = {:?}", a, b));
                break 'vii;
            }
        }
    }
    push("vii", fail.is_none(), fail);

    let mut fail: Option<String> = None;
    'viii: for a in &samples {
        let ca = cl_memo(r, &mut memo, a);
        for b in &samples {
            let bu = b.intersect(&units);
            let lhs = set_product(r, &ca, &bu);
            let rhs = cl_memo(r, &mut memo, &set_product(r, a, &bu));
            if !lhs.is_subset(&rhs) {
                fail = Some(format!("A = {:?}, B∩R⁻¹ = {:?}", a, bu));
                break 'viii;
            }
        }
    }
    push("viii", fail.is_none(), fail);

    let mut fail: Option<String> = None;
    'ix: for a in &samples {
        let ca = cl_memo(r, &mut memo, a);
        for b in &samples {
            let lhs = set_sum(r, &ca, b);
            let rb = set_product(r, &full, b);
            let rhs = cl_memo(r, &mut memo, &set_sum(r, a, &rb));
            if !lhs.is_subset(&rhs) {
                fail = Some(format!("A = {:?}, B = {:?}", a, b));
                break 'ix;
            }
        }
    }
    push("ix", fail.is_none(), fail);

    let mut fail: Option<String> = None;
    'x: for a in &samples {
        let ca = cl_memo(r, &mut memo, a);
        for b in &samples {
            let hyp = set_product(r, &full, b).is_subset(b) && set_sum(r, a, b).is_subset(&ca);
            if hyp && !set_sum(r, &ca, b).is_subset(&ca) {
                fail = Some(format!("A = {:?}, B = {:?}", a, b));
                break 'x;
            }
        }
    }
    push("x", fail.is_none(), fail);

    let mut fail: Option<String> = None;
    'xi: for ideal in enumerate_ideals(r)? {
        if ideal.is_zero() {
            continue;
        }
        let (q, proj) = quotient(r, &ideal)?;
        let project =
            |s: &ElemSet| q.set_of(s.iter().map(|e| Elem(proj[e.0 as usize])));
        let mut qmemo: HashMap<ElemSet, ElemSet> = HashMap::new();
        for a in &samples {
            let lhs = project(&cl_memo(r, &mut memo, a));
            let rhs = cl_memo(&q, &mut qmemo, &project(a));
            if !lhs.is_subset(&rhs) {
                fail = Some(format!("ideal = {:?}, A = {:?}", ideal.members(), a));
                break 'xi;
            }
        }
    }
    push("xi", fail.is_none(), fail);

    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Lemma46Report {
    pub cond: [bool; 4],
    pub equivalent: bool,
    /// (x, y) realizing condition (iv), smallest in scan order.
    pub witness_iv: Option<(Elem, Elem)>,
}

/// The four equivalent conditions tying a ∈ I and b ∈ R:
/// (i) 1 ∈ R(1-a) + Rb, (ii) I = I(1-a) + Ib,
/// (iii) 1 - I ⊆ (1-I)(1-a) + Ib, (iv) xa - x - a + yb = 0 with x, y ∈ I.
pub fn lemma46_check(r: &FiniteRing, i: &Ideal, a: Elem, b: Elem) -> Result<Lemma46Report> {
    r.check_elem(a)?;
    r.check_elem(b)?;
    let one = r.one().ok_or(QbrError::NonUnitalRing)?;
    if !i.contains(a) {
        return Err(QbrError::NotInIdeal(a.0));
    }
    let zero = r.zero();
    let one_minus_a = r.sub(one, a);
    let members = i.members();

    let ra = left_multiples(r, one_minus_a);
    let rb = left_multiples(r, b);
    let cond_i = ra.iter().any(|u| rb.contains(r.sub(one, u)));

    let ia = r.set_of(members.iter().map(|t| r.mul(t, one_minus_a)));
    let ib = r.set_of(members.iter().map(|t| r.mul(t, b)));
    let cond_ii = set_sum(r, &ia, &ib) == *members;

    let mut rhs = r.empty_set();
    for s in members.iter() {
        let left = r.mul(r.sub(one, s), one_minus_a);
        for u in members.iter() {
            rhs.insert(r.add(left, r.mul(u, b)));
        }
    }
    let cond_iii = members.iter().all(|t| rhs.contains(r.sub(one, t)));

    let mut witness_iv = None;
    'iv: for x in members.iter() {
        let lhs = r.sub(r.sub(r.mul(x, a), x), a);
        for y in members.iter() {
            if r.add(lhs, r.mul(y, b)) == zero {
                witness_iv = Some((x, y));
                break 'iv;
            }
        }
    }
    let cond_iv = witness_iv.is_some();

    let cond = [cond_i, cond_ii, cond_iii, cond_iv];
    Ok(Lemma46Report { cond, equivalent: cond.iter().all(|&c| c == cond[0]), witness_iv })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prop47Report {
    /// t ∈ I_q°, computed inside I with no reference to R.
    pub adverse_in_ideal: bool,
    /// 1 - t ∈ R_q⁻¹.
    pub complement_quasi_invertible: bool,
    pub adverse_pair_agrees: bool,
    /// t ∈ cl°(I_q°), again intrinsic to I.
    pub closure_adverse: bool,
    /// 1 - t ∈ cl(R_q⁻¹).
    pub closure_complement: bool,
    pub closure_pair_agrees: bool,
}

/// The two transfer equivalences between an ideal and its ambient ring:
/// t ∈ I_q° ⇔ 1 - t ∈ R_q⁻¹, and t ∈ cl°(I_q°) ⇔ 1 - t ∈ cl(R_q⁻¹). Both
/// sides of each pair are computed independently.
pub fn prop47_transfer(r: &FiniteRing, i: &Ideal, t: Elem) -> Result<Prop47Report> {
    r.check_elem(t)?;
    let one = r.one().ok_or(QbrError::NonUnitalRing)?;
    if !i.contains(t) {
        return Err(QbrError::NotInIdeal(t.0));
    }
    let (sub, emb) = ideal_as_subring(r, i)?;
    let t_sub = sub
        .elements()
        .find(|&e| emb.image(e) == t)
        .expect("t is a member of the ideal carrying the subring");
    let qa = quasi_adversible_set(&sub);
    let adverse_in_ideal = qa.contains(t_sub);
    let closure_adverse = in_cl_circ(&sub, &qa, t_sub);

    let qset = quasi_invertible_set(r)?;
    let comp = r.sub(one, t);
    let complement_quasi_invertible = qset.contains(comp);
    let closure_complement = in_cl(r, &qset, comp);

    Ok(Prop47Report {
        adverse_in_ideal,
        complement_quasi_invertible,
        adverse_pair_agrees: adverse_in_ideal == complement_quasi_invertible,
        closure_adverse,
        closure_complement,
        closure_pair_agrees: closure_adverse == closure_complement,
    })
}
