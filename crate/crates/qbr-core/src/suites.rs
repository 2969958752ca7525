//! The named verification suites behind `verify --suite`: each maps one
//! theorem-numbered name onto exhaustive checks over a single ring.
//! Every sweep is exact within its cap; rings above a cap produce
//! Skipped records, never silent truncation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::closure::{
    is_qb_nonunital, is_qb_ring, lemma32_suite, lemma35_witness, lemma46_check, prop47_transfer,
    symmetry_check,
};
use crate::error::{QbrError, Result};
use crate::exchange::{
    b_ideal_perturbation, compute_iqb, is_b_ideal, is_exchange, is_exchange_ring,
    is_qb_ideal, lift_quasi_invertible, prop82_check, thm72_conditions, thm84_equivalence,
    ExtensionRoute,
};
use crate::ideals::{enumerate_ideals, ideal_as_subring, quotient};
use crate::matrix_qb::{
    brute_force_reducer, lemma61_admissible, lemma61_corner, reduce_row_m2, row_transform,
    UnimodularRow,
};
use crate::monoid::{refinement_check, thm87_condition, vr_monoid, FragmentOutcome};
use crate::quasi::{
    converse_partial_inverse, corner_transfer, extend_to_quasi_invertible, is_quasi_invertible,
    quasi_adversible, quasi_inverse_family, quasi_invertible, quasi_invertible_exhaustive,
    quasi_invertible_set, skew_corner, QIWitness,
};
use crate::regular::{
    decompose_extension, extends, first_partial_inverse, idempotents, left_multiples,
    maximal_regular_elements, mvn_equivalent, partial_inverses, realign_partial_inverse,
    regular_elements, right_multiples,
};
use crate::report::{Outcome, Report, ReportBuilder};
use crate::ring::{matrix_ring, unitization, Elem, FiniteRing};

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Suite {
    Thm23,
    Prop25,
    Lemma32,
    Lemma35,
    Thm36,
    Sec4,
    Sec5,
    Thm64,
    Sec7,
    Sec8,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Thm23,
        Suite::Prop25,
        Suite::Lemma32,
        Suite::Lemma35,
        Suite::Thm36,
        Suite::Sec4,
        Suite::Sec5,
        Suite::Thm64,
        Suite::Sec7,
        Suite::Sec8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Thm23 => "thm2.3",
            Suite::Prop25 => "prop2.5",
            Suite::Lemma32 => "lemma3.2",
            Suite::Lemma35 => "lemma3.5",
            Suite::Thm36 => "thm3.6",
            Suite::Sec4 => "sec4",
            Suite::Sec5 => "sec5",
            Suite::Thm64 => "thm6.4",
            Suite::Sec7 => "sec7",
            Suite::Sec8 => "sec8",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Suite::Thm23 => {
                "quasi-inverse families v' = v + a(1-uv) + (1-vu)b with all six relations, \
                 the converse decomposition of every partial inverse, and the finite law \
                 R_q^-1 = R^-1"
            }
            Suite::Prop25 => {
                "the extension relation as a partial order on regular elements, frame \
                 idempotents, witness realignment, corner decomposition, and MvN equivalence \
                 structure"
            }
            Suite::Lemma32 => {
                "closure-operator laws for cl over canonical and seeded subsets, including \
                 projection along every proper quotient"
            }
            Suite::Lemma35 => {
                "both displayed factorizations of the reducer construction a + by, swept over \
                 all valid (a, x, b, c, z) tuples"
            }
            Suite::Thm36 => {
                "cl(R_q^-1) = R iff cr(R_q^-1) = R, and invariance of the QB property under \
                 passing to the opposite ring"
            }
            Suite::Sec4 => {
                "quasi-adverses against the unitization oracle, the four-condition ideal \
                 equivalence, transfer t in I_q iff 1-t in R_q^-1, and ideals of QB-rings \
                 staying QB"
            }
            Suite::Sec5 => {
                "corner transfer of quasi-invertibility through MvN-equivalent complements \
                 with perturbation stability, and extension of every regular element below a \
                 quasi-invertible one"
            }
            Suite::Thm64 => {
                "staged unimodular row reduction over M2 with brute-force cross-checks, \
                 transform invariance, and the corner dichotomy"
            }
            Suite::Sec7 => {
                "lifting quasi-invertibles modulo every ideal, the three extension conditions \
                 along all routes, perturbation by B- and QB-ideals, and the largest QB ideal"
            }
            Suite::Sec8 => {
                "exchange witnesses per the idempotent definition, maximal regulars in \
                 semiprimitive rings, the three QB equivalences, and the V(R) monoid fragment \
                 with its separation and refinement conditions"
            }
        }
    }
}

/// Suite token from the command line: a suite name or `all`.
pub fn parse_selection(token: &str) -> Option<Vec<Suite>> {
    if token == "all" {
        return Some(Suite::ALL.to_vec());
    }
    Suite::ALL.iter().copied().find(|s| s.name() == token).map(|s| vec![s])
}

/// (name, description) pairs for `--list-suites`.
pub fn suite_catalog() -> Vec<(&'static str, &'static str)> {
    let mut out: Vec<(&'static str, &'static str)> =
        Suite::ALL.iter().map(|s| (s.name(), s.describe())).collect();
    out.push(("all", "every suite above, in order"));
    out
}

/// Sweep caps. Each matches the documented bound of the underlying
/// exhaustive check; rings above a cap yield Skipped.
const CAP_FAMILY: usize = 64;
const CAP_FAST_SLOW: usize = 128;
const CAP_ORDER_PROPS: usize = 64;
const CAP_REALIGN: usize = 32;
const CAP_LEMMA32: usize = 128;
const CAP_LEMMA35: usize = 16;
const CAP_SYMMETRY: usize = 512;
const CAP_SEC4: usize = 64;
const CAP_THM55: usize = 81;
const CAP_THM59: usize = 128;
const CAP_M2_BASE: usize = 6;
const CAP_LEMMA61: usize = 16;
const CAP_SEC7: usize = 64;
const CAP_SEC8: usize = 256;

fn capped(r: &FiniteRing, cap: usize) -> Result<()> {
    if r.order() > cap {
        return Err(QbrError::ScaleCapExceeded(format!(
            "order {} exceeds the suite cap {cap}",
            r.order()
        )));
    }
    Ok(())
}

/// Runs the selected suites against one ring. Deterministic for a fixed
/// (ring, suites, seed) triple up to wall-clock fields.
pub fn run_suites(r: &FiniteRing, suites: &[Suite], seed: u64) -> Report {
    run_suites_with_base(r, None, suites, seed)
}

/// Like `run_suites`, but with the subject's 2x2 matrix decomposition
/// when one is known (subject = M2(m2_base)): the row-reduction suite
/// then works on the subject directly instead of building M2(subject).
pub fn run_suites_with_base(
    r: &FiniteRing,
    m2_base: Option<&FiniteRing>,
    suites: &[Suite],
    seed: u64,
) -> Report {
    let mut b = ReportBuilder::new(r.label()).seed(seed);
    for &s in suites {
        match s {
            Suite::Thm23 => suite_thm23(&mut b, r),
            Suite::Prop25 => suite_prop25(&mut b, r),
            Suite::Lemma32 => suite_lemma32(&mut b, r, seed),
            Suite::Lemma35 => suite_lemma35(&mut b, r),
            Suite::Thm36 => suite_thm36(&mut b, r),
            Suite::Sec4 => suite_sec4(&mut b, r),
            Suite::Sec5 => suite_sec5(&mut b, r),
            Suite::Thm64 => suite_thm64(&mut b, r, m2_base, seed),
            Suite::Sec7 => suite_sec7(&mut b, r),
            Suite::Sec8 => suite_sec8(&mut b, r),
        }
    }
    b.finish()
}

// ---------------------------------------------------------------------------
// thm2.3

fn suite_thm23(b: &mut ReportBuilder, r: &FiniteRing) {
    b.run("thm2.3/family-relations", || {
        capped(r, CAP_FAMILY)?;
        let mut tuples = 0usize;
        for u in r.elements() {
            let Some(w) = quasi_invertible(r, u)? else { continue };
            for a in r.elements() {
                for bb in r.elements() {
                    let rec = quasi_inverse_family(r, &w, a, bb)?;
                    tuples += 1;
                    let ok = rec.orth_new
                        && rec.orth_new_old
                        && rec.orth_old_new
                        && rec.absorb_uv
                        && rec.absorb_vu
                        && rec.mvn_ok;
                    if !ok {
                        return Ok(Outcome::Fail(json!({
                            "u": w.u, "v": w.v, "a": a, "b": bb, "v_prime": rec.v_prime,
                        })));
                    }
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "tuples": tuples })))
    });

    b.run("thm2.3/converse-partial-inverses", || {
        capped(r, CAP_FAMILY)?;
        let mut tuples = 0usize;
        for u in r.elements() {
            let Some(w) = quasi_invertible(r, u)? else { continue };
            for v2 in partial_inverses(r, u) {
                let dec = converse_partial_inverse(r, &w, v2)?;
                tuples += 1;
                if !dec.identity_holds || !dec.witness_valid {
                    return Ok(Outcome::Fail(json!({ "u": u, "v": w.v, "v_prime": v2 })));
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "tuples": tuples })))
    });

    b.run("thm2.3/fast-vs-exhaustive", || {
        capped(r, CAP_FAST_SLOW)?;
        for u in r.elements() {
            let fast = quasi_invertible(r, u)?.is_some();
            let slow = quasi_invertible_exhaustive(r, u)?.is_some();
            if fast != slow {
                return Ok(Outcome::Fail(json!({ "u": u, "fast": fast, "exhaustive": slow })));
            }
        }
        Ok(Outcome::Pass)
    });

    b.run("thm2.3/finite-consistency", || {
        capped(r, CAP_SYMMETRY)?;
        let qset = quasi_invertible_set(r)?;
        Ok(Outcome::require(qset == r.units(), || {
            let extra: Vec<Elem> = qset.iter().filter(|&u| !r.units().contains(u)).collect();
            json!({ "quasi_invertible_not_invertible": extra })
        }))
    });
}

// ---------------------------------------------------------------------------
// prop2.5

fn suite_prop25(b: &mut ReportBuilder, r: &FiniteRing) {
    b.run("prop2.5/extension-partial-order", || {
        capped(r, CAP_ORDER_PROPS)?;
        let regs: Vec<Elem> = regular_elements(r).to_vec();
        let k = regs.len();
        let mut le = vec![false; k * k];
        for (i, &a) in regs.iter().enumerate() {
            for (j, &bb) in regs.iter().enumerate() {
                le[i * k + j] = extends(r, a, bb).is_some();
            }
        }
        for i in 0..k {
            if !le[i * k + i] {
                return Ok(Outcome::Fail(json!({ "law": "reflexivity", "a": regs[i] })));
            }
        }
        for i in 0..k {
            for j in 0..k {
                if le[i * k + j] && le[j * k + i] && regs[i] != regs[j] {
                    return Ok(Outcome::Fail(json!({
                        "law": "antisymmetry", "a": regs[i], "b": regs[j],
                    })));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                if !le[i * k + j] {
                    continue;
                }
                for l in 0..k {
                    if le[j * k + l] && !le[i * k + l] {
                        return Ok(Outcome::Fail(json!({
                            "law": "transitivity", "a": regs[i], "b": regs[j], "c": regs[l],
                        })));
                    }
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "regular_elements": k })))
    });

    b.run("prop2.5/extension-with-equal-range", || {
        capped(r, CAP_ORDER_PROPS)?;
        for a in regular_elements(r).iter() {
            for bb in regular_elements(r).iter() {
                if extends(r, a, bb).is_some()
                    && right_multiples(r, a) == right_multiples(r, bb)
                    && a != bb
                {
                    return Ok(Outcome::Fail(json!({ "a": a, "b": bb })));
                }
            }
        }
        Ok(Outcome::Pass)
    });

    b.run("prop2.5/frame-idempotents", || {
        capped(r, CAP_ORDER_PROPS)?;
        for a in regular_elements(r).iter() {
            for x in partial_inverses(r, a) {
                let p = r.mul(a, x);
                let q = r.mul(x, a);
                let ok = r.is_idempotent(p)
                    && r.is_idempotent(q)
                    && right_multiples(r, p) == right_multiples(r, a)
                    && left_multiples(r, q) == left_multiples(r, a);
                if !ok {
                    return Ok(Outcome::Fail(json!({ "a": a, "x": x, "p": p, "q": q })));
                }
            }
        }
        Ok(Outcome::Pass)
    });

    b.run("prop2.5/mvn-equivalence-relation", || {
        capped(r, CAP_ORDER_PROPS)?;
        let idem: Vec<Elem> = idempotents(r).to_vec();
        let k = idem.len();
        let mut wit: Vec<Option<(Elem, Elem)>> = Vec::with_capacity(k * k);
        for &p in &idem {
            for &q in &idem {
                wit.push(mvn_equivalent(r, p, q)?);
            }
        }
        for i in 0..k {
            if wit[i * k + i].is_none() {
                return Ok(Outcome::Fail(json!({ "law": "reflexivity", "p": idem[i] })));
            }
        }
        for i in 0..k {
            for j in 0..k {
                if wit[i * k + j].is_some() != wit[j * k + i].is_some() {
                    return Ok(Outcome::Fail(json!({
                        "law": "symmetry", "p": idem[i], "q": idem[j],
                    })));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                let Some((u1, v1)) = wit[i * k + j] else { continue };
                for l in 0..k {
                    let Some((u2, v2)) = wit[j * k + l] else { continue };
                    // composed witness: p = (u1u2)(v2v1), s = (v2v1)(u1u2)
                    let u = r.mul(u1, u2);
                    let v = r.mul(v2, v1);
                    let composed = r.mul(u, v) == idem[i] && r.mul(v, u) == idem[l];
                    if !composed || wit[i * k + l].is_none() {
                        return Ok(Outcome::Fail(json!({
                            "law": "transitivity", "p": idem[i], "q": idem[j], "s": idem[l],
                        })));
                    }
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "idempotents": k })))
    });

    b.run("prop2.5/realign-partial-inverse", || {
        capped(r, CAP_REALIGN)?;
        let idem: Vec<Elem> = idempotents(r).to_vec();
        let regs = regular_elements(r);
        let mut tuples = 0usize;
        for a in regs.iter() {
            for x in partial_inverses(r, a) {
                let p = r.mul(a, x);
                let q = r.mul(x, a);
                let rq = left_multiples(r, q);
                for bb in regs.iter() {
                    if r.mul(p, bb) != a || r.mul(bb, q) != a {
                        continue;
                    }
                    for &q2 in &idem {
                        if left_multiples(r, q2) != rq {
                            continue;
                        }
                        realign_partial_inverse(r, a, bb, p, q, q2)?;
                        tuples += 1;
                    }
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "tuples": tuples })))
    });

    b.run("prop2.5/decompose-extension", || {
        capped(r, CAP_ORDER_PROPS)?;
        let mut tuples = 0usize;
        for a in regular_elements(r).iter() {
            for bb in regular_elements(r).iter() {
                if extends(r, a, bb).is_none() {
                    continue;
                }
                decompose_extension(r, a, bb)?;
                tuples += 1;
            }
        }
        Ok(Outcome::PassWith(json!({ "pairs": tuples })))
    });

    b.run("prop2.5/quasi-invertibles-are-maximal", || {
        let maximal = maximal_regular_elements(r)?;
        let qset = quasi_invertible_set(r)?;
        let stray: Vec<Elem> = qset.iter().filter(|&u| !maximal.contains(u)).collect();
        Ok(Outcome::require(stray.is_empty(), || json!({ "non_maximal": stray })))
    });
}

// ---------------------------------------------------------------------------
// lemma3.2 / lemma3.5 / thm3.6

fn suite_lemma32(b: &mut ReportBuilder, r: &FiniteRing, seed: u64) {
    b.run("lemma3.2/closure-laws", || {
        capped(r, CAP_LEMMA32)?;
        let outcomes = lemma32_suite(r, seed)?;
        let failing: Vec<_> = outcomes
            .iter()
            .filter(|o| !o.pass)
            .map(|o| json!({ "clause": o.clause, "detail": o.detail }))
            .collect();
        if failing.is_empty() {
            Ok(Outcome::PassWith(json!({ "clauses": outcomes.len() })))
        } else {
            Ok(Outcome::Fail(json!(failing)))
        }
    });
}

fn suite_lemma35(b: &mut ReportBuilder, r: &FiniteRing) {
    b.run("lemma3.5/factorizations", || {
        capped(r, CAP_LEMMA35)?;
        let one = r.one().ok_or(QbrError::NonUnitalRing)?;
        // z ranges over the normalized partial inverses of w = x + cb that
        // are quasi-inverses; memoized per w
        let mut quasi_inverses: HashMap<Elem, Vec<Elem>> = HashMap::new();
        let mut tuples = 0usize;
        for a in r.elements() {
            for x in r.elements() {
                let bb = r.sub(one, r.mul(a, x));
                for c in r.elements() {
                    let w = r.add(x, r.mul(c, bb));
                    let zs = quasi_inverses.entry(w).or_insert_with(|| {
                        partial_inverses(r, w)
                            .into_iter()
                            .filter(|&z| (QIWitness { u: w, v: z }).verify(r))
                            .collect()
                    });
                    for &z in zs.iter() {
                        let rep = lemma35_witness(r, a, x, bb, c, z)?;
                        tuples += 1;
                        let ok = rep.left_identity
                            && rep.right_identity
                            && rep.result_quasi_invertible;
                        if !ok {
                            return Ok(Outcome::Fail(json!({
                                "a": a, "x": x, "b": bb, "c": c, "z": z,
                            })));
                        }
                    }
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "tuples": tuples })))
    });
}

fn suite_thm36(b: &mut ReportBuilder, r: &FiniteRing) {
    b.run("thm3.6/left-right-symmetry", || {
        capped(r, CAP_SYMMETRY)?;
        let rep = symmetry_check(r)?;
        if rep.biconditional_holds {
            // setwise equality is measured, never asserted
            Ok(Outcome::PassWith(json!({
                "qb": rep.qb_left, "setwise_equal": rep.setwise_equal,
            })))
        } else {
            Ok(Outcome::Fail(json!({ "cl_side": rep.qb_left, "cr_side": rep.qb_right })))
        }
    });

    b.run("thm3.6/opposite-ring", || {
        capped(r, CAP_SYMMETRY)?;
        let here = is_qb_ring(r)?.holds;
        let there = is_qb_ring(&r.opposite())?.holds;
        Ok(Outcome::require(here == there, || json!({ "qb": here, "qb_opposite": there })))
    });
}

// ---------------------------------------------------------------------------
// sec4

fn suite_sec4(b: &mut ReportBuilder, r: &FiniteRing) {
    b.run("sec4/adverse-vs-unitization", || {
        capped(r, CAP_SEC4)?;
        // on a unital subject the oracle runs over every proper ideal
        // subring; a non-unital subject is tested directly
        let mut targets: Vec<(String, FiniteRing)> = Vec::new();
        if r.is_unital() {
            for (k, i) in enumerate_ideals(r)?.iter().enumerate() {
                if i.is_zero() || i.len() == r.order() {
                    continue;
                }
                let (s, _) = ideal_as_subring(r, i)?;
                targets.push((format!("I{k}"), s));
            }
        } else {
            targets.push(("self".into(), r.clone()));
        }
        let mut points = 0usize;
        for (name, s) in &targets {
            let (tilde, embed) = unitization(s)?;
            let one = tilde.one_unchecked();
            for x in s.elements() {
                let adverse = quasi_adversible(s, x).is_some();
                let lifted = tilde.sub(one, Elem(embed[x.0 as usize]));
                let upstairs = is_quasi_invertible(&tilde, lifted);
                points += 1;
                if adverse != upstairs {
                    return Ok(Outcome::Fail(json!({
                        "subring": name, "x": x, "adverse": adverse, "unitization": upstairs,
                    })));
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "points": points })))
    });

    b.run("sec4/lemma4.6-equivalence", || {
        capped(r, CAP_SEC4)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let mut tuples = 0usize;
        for i in enumerate_ideals(r)? {
            for a in i.iter() {
                for bb in r.elements() {
                    let rep = lemma46_check(r, &i, a, bb)?;
                    tuples += 1;
                    if !rep.equivalent {
                        return Ok(Outcome::Fail(json!({
                            "ideal": i.to_vec(), "a": a, "b": bb, "conditions": rep.cond,
                        })));
                    }
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "tuples": tuples })))
    });

    b.run("sec4/prop4.7-transfer", || {
        capped(r, CAP_SEC4)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let mut tuples = 0usize;
        for i in enumerate_ideals(r)? {
            for t in i.iter() {
                let rep = prop47_transfer(r, &i, t)?;
                tuples += 1;
                if !rep.adverse_pair_agrees || !rep.closure_pair_agrees {
                    return Ok(Outcome::Fail(json!({
                        "ideal": i.to_vec(), "t": t,
                        "adverse_in_ideal": rep.adverse_in_ideal,
                        "complement_quasi_invertible": rep.complement_quasi_invertible,
                        "closure_adverse": rep.closure_adverse,
                        "closure_complement": rep.closure_complement,
                    })));
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "tuples": tuples })))
    });

    b.run("sec4/cor4.10-ideals-stay-qb", || {
        capped(r, CAP_SEC4)?;
        if !r.is_unital() || !is_qb_ring(r)?.holds {
            return Err(QbrError::HypothesisFailed("subject is not a unital QB-ring".into()));
        }
        let mut checked = 0usize;
        for (k, i) in enumerate_ideals(r)?.iter().enumerate() {
            let (s, _) = ideal_as_subring(r, i)?;
            checked += 1;
            if !is_qb_nonunital(&s) {
                return Ok(Outcome::Fail(json!({ "ideal_index": k, "ideal": i.to_vec() })));
            }
        }
        Ok(Outcome::PassWith(json!({ "ideals": checked })))
    });
}

// ---------------------------------------------------------------------------
// sec5

fn suite_sec5(b: &mut ReportBuilder, r: &FiniteRing) {
    b.run("sec5/thm5.5-corner-transfer", || {
        capped(r, CAP_THM55)?;
        let one = r.one().ok_or(QbrError::NonUnitalRing)?;
        let idem: Vec<Elem> = idempotents(r).to_vec();
        let mut tuples = 0usize;
        for &p in &idem {
            for &q in &idem {
                let corner = skew_corner(r, p, q);
                if corner.len() == 1 {
                    continue;
                }
                let cp = r.sub(one, p);
                let cq = r.sub(one, q);
                let us = skew_corner(r, cp, cq);
                let vs = skew_corner(r, cq, cp);
                for u in us.iter() {
                    for v in vs.iter() {
                        if r.mul(u, v) != cp || r.mul(v, u) != cq {
                            continue;
                        }
                        for x in corner.iter() {
                            let rep = corner_transfer(r, u, v, p, q, x)?;
                            tuples += 1;
                            if !rep.agree || rep.cor54_violations != 0 {
                                return Ok(Outcome::Fail(json!({
                                    "p": p, "q": q, "u": u, "v": v, "x": x,
                                    "corner_side": rep.corner_side,
                                    "ambient_side": rep.ambient_side,
                                    "cor54_violations": rep.cor54_violations,
                                })));
                            }
                        }
                    }
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "tuples": tuples })))
    });

    b.run("sec5/thm5.9-extend-regular", || {
        capped(r, CAP_THM59)?;
        let mut count = 0usize;
        for a in regular_elements(r).iter() {
            let x = first_partial_inverse(r, a).expect("regular elements have partial inverses");
            let u = extend_to_quasi_invertible(r, a, x)?;
            count += 1;
            if !is_quasi_invertible(r, u) || extends(r, a, u).is_none() {
                return Ok(Outcome::Fail(json!({ "a": a, "x": x, "u": u })));
            }
        }
        Ok(Outcome::PassWith(json!({ "regular_elements": count })))
    });
}

// ---------------------------------------------------------------------------
// thm6.4

/// Deterministic walk over the unimodular variety: alternating seeded
/// elementary transforms and coordinate swaps, starting from (1, 1).
pub fn seeded_rows(s: &FiniteRing, seed: u64, count: usize) -> Result<Vec<UnimodularRow>> {
    let one = s.one().ok_or(QbrError::NonUnitalRing)?;
    let units: Vec<Elem> = s.units().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut row = UnimodularRow::new(s, one, one, one, s.zero())?;
        for _ in 0..6 {
            if rng.random_range(0..4u8) == 0 {
                row = UnimodularRow::new(s, row.b(), row.a(), row.y(), row.x())?;
            } else {
                let u = units[rng.random_range(0..units.len())];
                let v = units[rng.random_range(0..units.len())];
                let c = Elem(rng.random_range(0..s.order() as u32));
                row = row_transform(s, &row, u, v, c)?;
            }
        }
        out.push(row);
    }
    Ok(out)
}

fn suite_thm64(b: &mut ReportBuilder, r: &FiniteRing, m2_base: Option<&FiniteRing>, seed: u64) {
    // With an explicit base the subject is already the matrix ring;
    // otherwise the subject is the base and M2 gets built here. Shared
    // by the four row checks below, so the tables are built once.
    let pair: Result<(FiniteRing, FiniteRing)> = (|| {
        let base = m2_base.unwrap_or(r);
        capped(base, CAP_M2_BASE)?;
        let s = match m2_base {
            Some(_) => r.clone(),
            None => matrix_ring(r, 2)?,
        };
        Ok((base.clone(), s))
    })();
    let get_pair = || -> Result<&(FiniteRing, FiniteRing)> { pair.as_ref().map_err(|e| e.clone()) };

    b.run("thm6.4/m2-brute-force-qb", || {
        let (_, s) = get_pair()?;
        let verdict = is_qb_ring(s)?;
        Ok(Outcome::require(verdict.holds, || json!({ "counterexample": verdict.counterexample })))
    });

    b.run("thm6.4/staged-reduction", || {
        let (base, s) = get_pair()?;
        let rows = seeded_rows(s, seed, 25)?;
        for row in &rows {
            let red = reduce_row_m2(base, s, row)?;
            let expected = s.add(row.a(), s.mul(row.b(), red.reducer));
            let ok = expected == red.result && red.witness.u == red.result && red.witness.verify(s);
            if !ok {
                return Ok(Outcome::Fail(json!({
                    "a": row.a(), "b": row.b(), "reducer": red.reducer, "result": red.result,
                })));
            }
        }
        Ok(Outcome::PassWith(json!({ "rows": rows.len() })))
    });

    b.run("thm6.4/brute-agreement", || {
        let (base, s) = get_pair()?;
        for row in &seeded_rows(s, seed, 25)? {
            let staged = reduce_row_m2(base, s, row).is_ok();
            let brute = brute_force_reducer(s, row)?.is_some();
            // existence must agree; the reducers themselves may differ
            if staged != brute {
                return Ok(Outcome::Fail(json!({
                    "a": row.a(), "b": row.b(), "staged": staged, "brute": brute,
                })));
            }
        }
        Ok(Outcome::Pass)
    });

    b.run("thm6.4/transform-invariance", || {
        let (_, s) = get_pair()?;
        let units: Vec<Elem> = s.units().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c656d6d6136_u64);
        for row in &seeded_rows(s, seed, 10)? {
            let u = units[rng.random_range(0..units.len())];
            let v = units[rng.random_range(0..units.len())];
            let c = Elem(rng.random_range(0..s.order() as u32));
            let moved = row_transform(s, row, u, v, c)?;
            // round trip through the inverse transform
            let ui = s.inverse(u).expect("u is a unit");
            let vi = s.inverse(v).expect("v is a unit");
            let back = row_transform(s, &moved, ui, vi, s.neg(s.mul(c, ui)))?;
            if back != *row {
                return Ok(Outcome::Fail(json!({ "a": row.a(), "b": row.b(), "u": u, "v": v, "c": c })));
            }
            let before = brute_force_reducer(s, row)?.is_some();
            let after = brute_force_reducer(s, &moved)?.is_some();
            if before != after {
                return Ok(Outcome::Fail(json!({
                    "a": row.a(), "b": row.b(), "reducible_before": before, "reducible_after": after,
                })));
            }
        }
        Ok(Outcome::Pass)
    });

    b.run("thm6.4/lemma6.1-dichotomy", || {
        capped(r, CAP_LEMMA61)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let mut quads = 0usize;
        for (u, x, v, y) in lemma61_admissible(r)? {
            let rep = lemma61_corner(r, u, x, v, y)?;
            quads += 1;
            if !rep.conclusion_holds() {
                return Ok(Outcome::Fail(json!({ "u": u, "x": x, "v": v, "y": y })));
            }
        }
        Ok(Outcome::PassWith(json!({ "quadruples": quads })))
    });
}

// ---------------------------------------------------------------------------
// sec7

fn suite_sec7(b: &mut ReportBuilder, r: &FiniteRing) {
    b.run("sec7/lift-quasi-invertibles", || {
        capped(r, CAP_SEC7)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let mut lifts = 0usize;
        for i in enumerate_ideals(r)? {
            let (down, proj) = quotient(r, &i)?;
            let downstairs = quasi_invertible_set(&down)?;
            for a in r.elements() {
                if !downstairs.contains(Elem(proj[a.0 as usize])) {
                    continue;
                }
                lift_quasi_invertible(r, &i, a)?;
                lifts += 1;
            }
        }
        Ok(Outcome::PassWith(json!({ "lifts": lifts })))
    });

    b.run("sec7/thm7.2-direct", || {
        capped(r, CAP_SEC7)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let mut checked = 0usize;
        for i in enumerate_ideals(r)? {
            let rep = thm72_conditions(r, &i, ExtensionRoute::Direct)?;
            checked += 1;
            if !rep.consistent {
                return Ok(Outcome::Fail(json!({
                    "ideal": i.to_vec(),
                    "c1": rep.c1, "c2": rep.c2, "c3": rep.c3, "qb": rep.qb,
                })));
            }
        }
        Ok(Outcome::PassWith(json!({ "ideals": checked })))
    });

    b.run("sec7/thm7.2-b-ideal-route", || {
        capped(r, CAP_SEC7)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let mut checked = 0usize;
        for i in enumerate_ideals(r)? {
            match thm72_conditions(r, &i, ExtensionRoute::BIdeal) {
                Ok(rep) => {
                    checked += 1;
                    if !rep.consistent {
                        return Ok(Outcome::Fail(json!({
                            "ideal": i.to_vec(),
                            "c1": rep.c1, "c2": rep.c2, "c3": rep.c3, "qb": rep.qb,
                        })));
                    }
                }
                Err(QbrError::NotABIdeal(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(Outcome::PassWith(json!({ "b_ideals": checked })))
    });

    b.run("sec7/thm7.2-qb-ideal-b-quotient-route", || {
        capped(r, CAP_SEC7)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let mut checked = 0usize;
        for i in enumerate_ideals(r)? {
            match thm72_conditions(r, &i, ExtensionRoute::QbIdealBQuotient) {
                Ok(rep) => {
                    checked += 1;
                    if !rep.consistent {
                        return Ok(Outcome::Fail(json!({ "ideal": i.to_vec(), "qb": rep.qb })));
                    }
                }
                Err(QbrError::NotABIdeal(_)) | Err(QbrError::HypothesisFailed(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(Outcome::PassWith(json!({ "applicable_ideals": checked })))
    });

    b.run("sec7/perturbation-stability", || {
        capped(r, CAP_SEC7)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let mut pairs = 0usize;
        for i in enumerate_ideals(r)? {
            // B-ideals pair with quasi-invertibles, QB-ideals with units
            let perturbers = if is_b_ideal(r, &i)? {
                quasi_invertible_set(r)?
            } else if is_qb_ideal(r, &i)? {
                r.units()
            } else {
                continue;
            };
            for u in perturbers.iter() {
                pairs += 1;
                if !b_ideal_perturbation(r, &i, u)? {
                    return Ok(Outcome::Fail(json!({ "ideal": i.to_vec(), "u": u })));
                }
            }
        }
        Ok(Outcome::PassWith(json!({ "pairs": pairs })))
    });

    b.run("sec7/largest-qb-ideal", || {
        capped(r, CAP_SEC7)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        let iqb = compute_iqb(r)?;
        let qb = is_qb_ring(r)?.holds;
        if qb && iqb.len() != r.order() {
            return Ok(Outcome::Fail(json!({
                "qb": qb, "iqb_size": iqb.len(), "order": r.order(),
            })));
        }
        Ok(Outcome::PassWith(json!({ "iqb_size": iqb.len() })))
    });
}

// ---------------------------------------------------------------------------
// sec8

fn outcome_from_fragment(verified: usize, inconclusive: usize, failed: usize, detail: serde_json::Value) -> Outcome {
    if failed > 0 {
        Outcome::Fail(detail)
    } else if inconclusive > 0 {
        Outcome::Inconclusive(detail)
    } else {
        Outcome::PassWith(json!({ "verified": verified }))
    }
}

fn suite_sec8(b: &mut ReportBuilder, r: &FiniteRing) {
    b.run("sec8/exchange-ring", || {
        capped(r, CAP_SYMMETRY)?;
        r.one().ok_or(QbrError::NonUnitalRing)?;
        Ok(Outcome::require(is_exchange_ring(r), || json!({ "exchange": false })))
    });

    b.run("sec8/def8.1-witnesses", || {
        capped(r, CAP_SEC8)?;
        let one = r.one().ok_or(QbrError::NonUnitalRing)?;
        for a in r.elements() {
            let Some(p) = is_exchange(r, a)? else {
                return Ok(Outcome::Fail(json!({ "a": a, "witness": "none" })));
            };
            let ok = r.is_idempotent(p)
                && right_multiples(r, a).contains(p)
                && right_multiples(r, r.sub(one, a)).contains(r.sub(one, p));
            if !ok {
                return Ok(Outcome::Fail(json!({ "a": a, "p": p })));
            }
        }
        Ok(Outcome::Pass)
    });

    b.run("sec8/prop8.2-maximal-regulars", || {
        let agrees = prop82_check(r)?;
        Ok(Outcome::require(agrees, || {
            json!({ "maximal_regulars_equal_quasi_invertibles": false })
        }))
    });

    b.run("sec8/thm8.4-equivalences", || {
        capped(r, CAP_SYMMETRY)?;
        let rep = thm84_equivalence(r)?;
        if !rep.consistent {
            return Ok(Outcome::Fail(json!({
                "qb": rep.qb,
                "regulars_extend": rep.regulars_extend,
                "regulars_pass_through": rep.regulars_pass_through,
            })));
        }
        Ok(Outcome::PassWith(json!({ "qb": rep.qb })))
    });

    b.run("sec8/thm8.7-monoid-condition", || {
        let rep = thm87_condition(r)?;
        let detail = json!({
            "instances": rep.instances.len(),
            "verified": rep.verified,
            "inconclusive": rep.inconclusive,
            "failed": rep.failed,
            "qb": rep.qb,
        });
        if !rep.consistent {
            return Ok(Outcome::Fail(detail));
        }
        Ok(outcome_from_fragment(rep.verified, rep.inconclusive, rep.failed, detail))
    });

    b.run("sec8/monoid-refinement", || {
        let monoid = vr_monoid(r, 2)?;
        let instances = refinement_check(&monoid);
        let failed = instances.iter().filter(|i| i.outcome == FragmentOutcome::Failed).count();
        let inconclusive =
            instances.iter().filter(|i| i.outcome == FragmentOutcome::Inconclusive).count();
        let verified = instances.len() - failed - inconclusive;
        let detail = json!({
            "instances": instances.len(),
            "verified": verified,
            "inconclusive": inconclusive,
            "failed": failed,
        });
        Ok(outcome_from_fragment(verified, inconclusive, failed, detail))
    });
}
