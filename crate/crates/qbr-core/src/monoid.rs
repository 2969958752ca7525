//! The monoid V(R) of Murray-von Neumann classes of idempotents,
//! computed at matrix levels 1 and 2 without ever materializing M2(R):
//! 2x2 matrices over the base ring are handled entrywise, and the
//! corner sets pMq needed for equivalence testing are built as additive
//! spans of the generators p(gE_ij)q. Addition of classes is
//! block-diagonal and is recorded only where both summands live at
//! level 1, plus the identity law of the zero class; every downstream
//! statement is asserted inside that computed fragment, and the report
//! labels the boundary so a missing sum reads as "out of range", not
//! "false".

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::closure::is_qb_ring;
use crate::error::{QbrError, Result};
use crate::ideals::{enumerate_ideals, orthogonal_ideals, Ideal};
use crate::regular::mvn_equivalent;
use crate::ring::{matrix_encode, Elem, FiniteRing};

/// Base-order cap for level-2 work: M2(R) has |R|^4 elements.
pub const MONOID_BASE_CAP: usize = 64;

/// Row-major 2x2 matrix over the base ring: [[m0, m1], [m2, m3]].
type Mat = [Elem; 4];

fn mat_zero() -> Mat {
    [Elem(0); 4]
}

fn mat_diag(a: Elem, b: Elem) -> Mat {
    [a, Elem(0), Elem(0), b]
}

fn mat_add(r: &FiniteRing, x: Mat, y: Mat) -> Mat {
    [r.add(x[0], y[0]), r.add(x[1], y[1]), r.add(x[2], y[2]), r.add(x[3], y[3])]
}

fn mat_mul(r: &FiniteRing, x: Mat, y: Mat) -> Mat {
    [
        r.add(r.mul(x[0], y[0]), r.mul(x[1], y[2])),
        r.add(r.mul(x[0], y[1]), r.mul(x[1], y[3])),
        r.add(r.mul(x[2], y[0]), r.mul(x[3], y[2])),
        r.add(r.mul(x[2], y[1]), r.mul(x[3], y[3])),
    ]
}

fn mat_code(r: &FiniteRing, m: Mat) -> u32 {
    matrix_encode(r.order(), &[m[0].0, m[1].0, m[2].0, m[3].0])
}

fn mat_from_code(r: &FiniteRing, code: u64) -> Mat {
    let n = r.order() as u64;
    let mut rest = code;
    let mut m = mat_zero();
    for slot in &mut m {
        *slot = Elem((rest % n) as u32);
        rest /= n;
    }
    m
}

/// The zero matrix and the identity matrix sit in singleton classes:
/// xy = 0 forces yx-idempotent = 0, and xy = 1 forces yx = 1 because a
/// finite ring is directly finite. Both are dispatched before any span
/// is built, which also keeps the full corner 1M1 = M out of memory.
fn mat_is_special(r: &FiniteRing, m: Mat) -> bool {
    if m == mat_zero() {
        return true;
    }
    matches!(r.one(), Some(one) if m == mat_diag(one, one))
}

/// Additive span of { p (g E_pos) q : g in R, pos in 0..4 }, which is
/// all of pM2(R)q since the map m -> pmq is additive and the gE_pos
/// generate M2(R) additively.
fn corner_span(r: &FiniteRing, p: Mat, q: Mat) -> Vec<Mat> {
    let mut gens: Vec<Mat> = Vec::new();
    let mut gen_codes = HashSet::new();
    for g in r.elements() {
        for pos in 0..4 {
            let mut e = mat_zero();
            e[pos] = g;
            let gen = mat_mul(r, mat_mul(r, p, e), q);
            if gen != mat_zero() && gen_codes.insert(mat_code(r, gen)) {
                gens.push(gen);
            }
        }
    }
    let mut seen = HashSet::from([0u32]);
    let mut members = vec![mat_zero()];
    let mut frontier = vec![mat_zero()];
    while let Some(x) = frontier.pop() {
        for &g in &gens {
            let s = mat_add(r, x, g);
            if seen.insert(mat_code(r, s)) {
                members.push(s);
                frontier.push(s);
            }
        }
    }
    members
}

/// Exhaustive witness search over the normalized corners: p ~ q iff
/// some x in pMq, y in qMp satisfy xy = p and yx = q.
fn span_witness(r: &FiniteRing, p: Mat, q: Mat) -> bool {
    let pq = corner_span(r, p, q);
    let qp = corner_span(r, q, p);
    pq.par_iter()
        .any(|&x| qp.iter().any(|&y| mat_mul(r, x, y) == p && mat_mul(r, y, x) == q))
}

struct ClassData {
    level: u8,
    rep_code: u32,
    /// Level-2 embedding of the representative, diag(e, 0) for level 1.
    mat: Mat,
    rep1: Option<Elem>,
    /// |pMp| for the representative, cached on first use. Left unset
    /// for the special classes that never reach the span path.
    corner: Option<usize>,
}

/// Index of the class `p` belongs to, or None if it starts a new one.
/// `p_corner` caches |pMp| across the comparisons of one candidate.
fn find_class(
    r: &FiniteRing,
    p: Mat,
    classes: &mut [ClassData],
    p_corner: &mut Option<usize>,
) -> Option<usize> {
    for idx in 0..classes.len() {
        let q = classes[idx].mat;
        if p == q {
            return Some(idx);
        }
        if mat_is_special(r, p) || mat_is_special(r, q) {
            continue;
        }
        // equivalent idempotents have isomorphic corner rings
        let pc = *p_corner.get_or_insert_with(|| corner_span(r, p, p).len());
        if classes[idx].corner.is_none() {
            classes[idx].corner = Some(corner_span(r, q, q).len());
        }
        if pc != classes[idx].corner.unwrap() {
            continue;
        }
        if span_witness(r, p, q) {
            return Some(idx);
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct MonoidClass {
    pub id: usize,
    /// Matrix level of the representative, 1 or 2.
    pub level: u8,
    /// Element index at level 1; `matrix_encode` of the entries at
    /// level 2. Always the least such code in the class.
    pub representative: u32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AdditionTriple {
    pub a: usize,
    pub b: usize,
    pub sum: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealTrace {
    /// Member element indices of the ideal.
    pub ideal: Vec<u32>,
    /// Class ids whose representatives have all entries in the ideal.
    /// Membership is class-invariant: if p ~ q and q has entries in I,
    /// then x = pxq lands in M(I) and so does p = xy.
    pub classes: Vec<usize>,
    /// Order-ideal verification inside the fragment: recorded sums
    /// restrict and co-restrict to the trace.
    pub order_ideal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VrMonoid {
    pub ring: String,
    pub base_order: usize,
    pub kmax: u8,
    pub classes: Vec<MonoidClass>,
    pub additions: Vec<AdditionTriple>,
    pub traces: Vec<IdealTrace>,
    /// Human-readable boundary of the computed fragment.
    pub fragment: String,
}

impl VrMonoid {
    pub fn sum_of(&self, a: usize, b: usize) -> Option<usize> {
        self.additions.iter().find(|t| t.a == a && t.b == b).map(|t| t.sum)
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    fn sum_table(&self) -> BTreeMap<(usize, usize), usize> {
        self.additions.iter().map(|t| ((t.a, t.b), t.sum)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report types serialize")
    }
}

/// Murray-von Neumann classes of idempotents at matrix levels 1..kmax,
/// the block-diagonal addition fragment, and the trace V(I) of every
/// enumerated ideal. Level-1 idempotents are scanned ascending (so the
/// zero class always has id 0), then level-2 matrices ascending by
/// encoded index; a new candidate joins the first equivalent class.
pub fn vr_monoid(r: &FiniteRing, kmax: u8) -> Result<VrMonoid> {
    if !(1..=2).contains(&kmax) {
        return Err(QbrError::PreconditionViolated(format!("kmax must be 1 or 2, got {kmax}")));
    }
    if kmax == 2 && r.order() > MONOID_BASE_CAP {
        return Err(QbrError::ScaleCapExceeded(format!(
            "level-2 classes need |R| <= {MONOID_BASE_CAP}, got {}",
            r.order()
        )));
    }
    let mut classes: Vec<ClassData> = Vec::new();
    for e in r.elements().filter(|&e| r.is_idempotent(e)) {
        let known = classes.iter().any(|c| {
            mvn_equivalent(r, e, c.rep1.expect("level-1 classes come first"))
                .expect("scanned elements are idempotent")
                .is_some()
        });
        if !known {
            classes.push(ClassData {
                level: 1,
                rep_code: e.0,
                mat: mat_diag(e, Elem(0)),
                rep1: Some(e),
                corner: None,
            });
        }
    }
    if kmax == 2 {
        let n = r.order() as u64;
        let idems: Vec<Mat> = (0..n * n * n * n)
            .into_par_iter()
            .filter_map(|code| {
                let m = mat_from_code(r, code);
                (mat_mul(r, m, m) == m).then_some(m)
            })
            .collect();
        for m in idems {
            let mut m_corner = None;
            if find_class(r, m, &mut classes, &mut m_corner).is_none() {
                classes.push(ClassData {
                    level: 2,
                    rep_code: mat_code(r, m),
                    mat: m,
                    rep1: None,
                    corner: m_corner,
                });
            }
        }
    }
    debug_assert!(classes[0].level == 1 && classes[0].rep_code == 0);

    let mut sums: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let record = |sums: &mut BTreeMap<(usize, usize), usize>, a: usize, b: usize, s: usize| {
        if let Some(&old) = sums.get(&(a, b)) {
            assert_eq!(old, s, "block-diagonal sum disagrees with a recorded one");
        } else {
            sums.insert((a, b), s);
        }
    };
    for c in 0..classes.len() {
        record(&mut sums, 0, c, c);
        record(&mut sums, c, 0, c);
    }
    if kmax == 2 {
        let lvl1: Vec<(usize, Elem)> = classes
            .iter()
            .enumerate()
            .filter_map(|(id, c)| c.rep1.map(|e| (id, e)))
            .collect();
        for &(a, ea) in &lvl1 {
            for &(b, eb) in &lvl1 {
                let mut corner = None;
                let s = find_class(r, mat_diag(ea, eb), &mut classes, &mut corner)
                    .expect("level-2 idempotents were exhaustively classified");
                record(&mut sums, a, b, s);
            }
        }
    }

    let traces = enumerate_ideals(r)?
        .iter()
        .map(|i| {
            let ids: BTreeSet<usize> = classes
                .iter()
                .enumerate()
                .filter(|(_, c)| c.mat.iter().all(|&e| i.contains(e)))
                .map(|(id, _)| id)
                .collect();
            let order_ideal = sums.iter().all(|(&(a, b), &s)| {
                let down = !ids.contains(&s) || (ids.contains(&a) && ids.contains(&b));
                let up = !(ids.contains(&a) && ids.contains(&b)) || ids.contains(&s);
                down && up
            });
            IdealTrace {
                ideal: i.iter().map(|e| e.0).collect(),
                classes: ids.into_iter().collect(),
                order_ideal,
            }
        })
        .collect();

    Ok(VrMonoid {
        ring: r.label().to_string(),
        base_order: r.order(),
        kmax,
        classes: classes
            .iter()
            .enumerate()
            .map(|(id, c)| MonoidClass { id, level: c.level, representative: c.rep_code })
            .collect(),
        additions: sums.iter().map(|(&(a, b), &s)| AdditionTriple { a, b, sum: s }).collect(),
        traces,
        fragment: format!(
            "matrix levels 1..={kmax}; sums recorded for level-1 summand pairs and the zero-class identity law"
        ),
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FragmentOutcome {
    Verified,
    /// The search ran into sums outside the computed fragment before
    /// finding a witness; not a refutation.
    Inconclusive,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm87Instance {
    pub a: usize,
    pub b1: usize,
    pub b2: usize,
    pub outcome: FragmentOutcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm87Report {
    pub instances: Vec<Thm87Instance>,
    pub verified: usize,
    pub inconclusive: usize,
    pub failed: usize,
    pub qb: bool,
    /// A QB-ring must leave no failed instance.
    pub consistent: bool,
}

/// For every recorded equation a + b1 = a + b2, searches for orthogonal
/// ideals I1, I2 and classes c1 in V(I1), c2 in V(I2) with
/// b1 + c1 = b2 + c2, all within the computed fragment.
pub fn thm87_condition(r: &FiniteRing) -> Result<Thm87Report> {
    let monoid = vr_monoid(r, 2)?;
    thm87_with(r, &monoid)
}

/// `thm87_condition` against an already computed (or synthetic) monoid
/// fragment; the trace list doubles as the ideal universe.
pub fn thm87_with(r: &FiniteRing, monoid: &VrMonoid) -> Result<Thm87Report> {
    let sums = monoid.sum_table();
    let mut instances: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    for (&(a1, b1), &s1) in &sums {
        for (&(a2, b2), &s2) in &sums {
            if a1 == a2 && s1 == s2 && b1 <= b2 {
                instances.insert((a1, b1, b2));
            }
        }
    }
    let ideals: Vec<(Ideal, &IdealTrace)> = monoid
        .traces
        .iter()
        .map(|t| {
            let members = r.set_of(t.ideal.iter().map(|&x| Elem(x)));
            Ok((Ideal::checked(r, members)?, t))
        })
        .collect::<Result<_>>()?;
    let mut pairs: Vec<(&IdealTrace, &IdealTrace)> = Vec::new();
    for (i1, t1) in &ideals {
        for (i2, t2) in &ideals {
            if orthogonal_ideals(r, i1, i2)? {
                pairs.push((t1, t2));
            }
        }
    }
    let mut report: Vec<Thm87Instance> = Vec::new();
    for (a, b1, b2) in instances {
        let mut outcome = FragmentOutcome::Failed;
        let mut gap = false;
        'search: for (t1, t2) in &pairs {
            for &c1 in &t1.classes {
                for &c2 in &t2.classes {
                    match (sums.get(&(b1, c1)), sums.get(&(b2, c2))) {
                        (Some(s1), Some(s2)) if s1 == s2 => {
                            outcome = FragmentOutcome::Verified;
                            break 'search;
                        }
                        (None, _) | (_, None) => gap = true,
                        _ => {}
                    }
                }
            }
        }
        if outcome == FragmentOutcome::Failed && gap {
            outcome = FragmentOutcome::Inconclusive;
        }
        report.push(Thm87Instance { a, b1, b2, outcome });
    }
    let verified = report.iter().filter(|i| i.outcome == FragmentOutcome::Verified).count();
    let inconclusive =
        report.iter().filter(|i| i.outcome == FragmentOutcome::Inconclusive).count();
    let failed = report.iter().filter(|i| i.outcome == FragmentOutcome::Failed).count();
    let qb = is_qb_ring(r)?.holds;
    Ok(Thm87Report {
        instances: report,
        verified,
        inconclusive,
        failed,
        qb,
        consistent: !qb || failed == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementInstance {
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
    pub outcome: FragmentOutcome,
}

/// Refinement property inside the fragment: for every recorded equation
/// x1 + x2 = y1 + y2, searches a 2x2 matrix of classes whose rows sum
/// to the x's and whose columns sum to the y's.
pub fn refinement_check(monoid: &VrMonoid) -> Vec<RefinementInstance> {
    let sums = monoid.sum_table();
    let k = monoid.classes.len();
    let mut instances: BTreeSet<(usize, usize, usize, usize)> = BTreeSet::new();
    for (&(x1, x2), &s1) in &sums {
        for (&(y1, y2), &s2) in &sums {
            if s1 == s2 && (x1, x2) <= (y1, y2) {
                instances.insert((x1, x2, y1, y2));
            }
        }
    }
    instances
        .into_iter()
        .map(|(x1, x2, y1, y2)| {
            let mut outcome = FragmentOutcome::Failed;
            let mut gap = false;
            'search: for z11 in 0..k {
                for z12 in 0..k {
                    for z21 in 0..k {
                        for z22 in 0..k {
                            let needed = [
                                (sums.get(&(z11, z12)), x1),
                                (sums.get(&(z21, z22)), x2),
                                (sums.get(&(z11, z21)), y1),
                                (sums.get(&(z12, z22)), y2),
                            ];
                            if needed.iter().any(|(got, _)| got.is_none()) {
                                gap = true;
                                continue;
                            }
                            if needed.iter().all(|(got, want)| *got == Some(want)) {
                                outcome = FragmentOutcome::Verified;
                                break 'search;
                            }
                        }
                    }
                }
            }
            if outcome == FragmentOutcome::Failed && gap {
                outcome = FragmentOutcome::Inconclusive;
            }
            RefinementInstance { x1, x2, y1, y2, outcome }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, RingSpec};

    fn zn(n: u32) -> FiniteRing {
        build_ring(&RingSpec::Zn { n }).unwrap()
    }

    fn m2f2() -> FiniteRing {
        build_ring(&RingSpec::Matrix { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) }).unwrap()
    }

    fn t2f2() -> FiniteRing {
        build_ring(&RingSpec::UpperTriangular { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) })
            .unwrap()
    }

    fn f2xf3() -> FiniteRing {
        build_ring(&RingSpec::Product { factors: vec![RingSpec::Gf { q: 2 }, RingSpec::Gf { q: 3 }] })
            .unwrap()
    }

    fn class_of_level1(m: &VrMonoid, rep: u32) -> usize {
        m.classes.iter().find(|c| c.level == 1 && c.representative == rep).unwrap().id
    }

    #[test]
    fn m2f2_classes_are_the_five_ranks() {
        let r = m2f2();
        let m = vr_monoid(&r, 2).unwrap();
        assert_eq!(m.class_count(), 5);
        assert_eq!(m.classes.iter().filter(|c| c.level == 1).count(), 3);
        let one = class_of_level1(&m, r.one_unchecked().0);
        let rank1 = m
            .classes
            .iter()
            .find(|c| c.level == 1 && c.id != 0 && c.id != one)
            .unwrap()
            .id;
        // rank arithmetic: 1+1 = 2, 1+2 = 3, 2+2 = 4
        assert_eq!(m.sum_of(rank1, rank1), Some(one));
        let rank3 = m.sum_of(rank1, one).unwrap();
        let rank4 = m.sum_of(one, one).unwrap();
        assert_ne!(rank3, rank4);
        assert_eq!(m.classes[rank3].level, 2);
        assert_eq!(m.classes[rank4].level, 2);
    }

    #[test]
    fn f2_doubles_its_unit_class_at_level_2() {
        let r = zn(2);
        let m = vr_monoid(&r, 2).unwrap();
        assert_eq!(m.class_count(), 3);
        assert_eq!(m.classes.iter().filter(|c| c.level == 1).count(), 2);
        let two = m.sum_of(1, 1).unwrap();
        assert_eq!(m.classes[two].level, 2);
    }

    #[test]
    fn z6_block_construction() {
        let r = zn(6);
        let m = vr_monoid(&r, 2).unwrap();
        // idempotents 0, 1, 3, 4 are pairwise inequivalent
        assert_eq!(m.classes.iter().filter(|c| c.level == 1).count(), 4);
        assert_eq!(m.class_count(), 9);
        let c1 = class_of_level1(&m, 1);
        let c3 = class_of_level1(&m, 3);
        let c4 = class_of_level1(&m, 4);
        // [3] + [4] = [1] + [0]: diag(3,4) is a full idempotent
        assert_eq!(m.sum_of(c3, c4), Some(c1));
        assert_eq!(m.sum_of(c1, 0), Some(c1));
    }

    #[test]
    fn addition_commutes_and_zero_is_neutral() {
        for r in [zn(6), m2f2(), t2f2()] {
            let m = vr_monoid(&r, 2).unwrap();
            for t in &m.additions {
                assert_eq!(m.sum_of(t.b, t.a), Some(t.sum), "in {}", r.label());
            }
            for c in &m.classes {
                assert_eq!(m.sum_of(0, c.id), Some(c.id));
                assert_eq!(m.sum_of(c.id, 0), Some(c.id));
            }
        }
    }

    #[test]
    fn level1_representatives_are_pairwise_inequivalent() {
        for r in [zn(6), m2f2(), t2f2()] {
            let m = vr_monoid(&r, 2).unwrap();
            let reps: Vec<Elem> = m
                .classes
                .iter()
                .filter(|c| c.level == 1)
                .map(|c| Elem(c.representative))
                .collect();
            for (i, &p) in reps.iter().enumerate() {
                for &q in &reps[i + 1..] {
                    assert!(mvn_equivalent(&r, p, q).unwrap().is_none(), "in {}", r.label());
                }
            }
        }
    }

    #[test]
    fn ideal_traces_are_order_ideals() {
        for r in [zn(6), t2f2(), m2f2()] {
            let m = vr_monoid(&r, 2).unwrap();
            assert!(m.traces.iter().all(|t| t.order_ideal), "in {}", r.label());
            // zero ideal carries only the zero class, the full ideal all
            let zero = m.traces.iter().find(|t| t.ideal.len() == 1).unwrap();
            assert_eq!(zero.classes, vec![0]);
            let full = m.traces.iter().find(|t| t.ideal.len() == r.order()).unwrap();
            assert_eq!(full.classes.len(), m.class_count());
        }
    }

    #[test]
    fn z6_trace_of_3z6() {
        let r = zn(6);
        let m = vr_monoid(&r, 2).unwrap();
        let t = m.traces.iter().find(|t| t.ideal == vec![0, 3]).unwrap();
        // [0], [3], and the doubled [3] at level 2
        assert_eq!(t.classes.len(), 3);
        assert!(t.classes.contains(&class_of_level1(&m, 3)));
        assert!(t.order_ideal);
    }

    #[test]
    fn scale_and_kmax_guards() {
        let big = build_ring(&RingSpec::Matrix { size: 2, base: Box::new(RingSpec::Zn { n: 4 }) })
            .unwrap();
        assert!(matches!(vr_monoid(&big, 2), Err(QbrError::ScaleCapExceeded(_))));
        assert!(vr_monoid(&big, 1).is_ok());
        assert!(matches!(vr_monoid(&zn(6), 0), Err(QbrError::PreconditionViolated(_))));
        assert!(matches!(vr_monoid(&zn(6), 3), Err(QbrError::PreconditionViolated(_))));
    }

    #[test]
    fn thm87_passes_on_small_qb_rings() {
        for r in [zn(6), m2f2(), f2xf3()] {
            let rep = thm87_condition(&r).unwrap();
            assert!(rep.qb && rep.consistent, "in {}", r.label());
            assert_eq!(rep.failed, 0);
            assert!(!rep.instances.is_empty());
            // finite rings cancel, so c1 = c2 = [0] always lands
            assert_eq!(rep.verified, rep.instances.len(), "in {}", r.label());
        }
    }

    fn synthetic_monoid(drop_identity_row_for: Option<usize>) -> VrMonoid {
        // four level-1 classes over Z6 with a fabricated non-cancelling
        // equation 3 = 2 + [1] = 2 + [3]
        let mut additions = Vec::new();
        for c in 0..4 {
            if drop_identity_row_for != Some(c) {
                additions.push(AdditionTriple { a: 0, b: c, sum: c });
                additions.push(AdditionTriple { a: c, b: 0, sum: c });
            }
        }
        additions.push(AdditionTriple { a: 2, b: 1, sum: 3 });
        additions.push(AdditionTriple { a: 2, b: 3, sum: 3 });
        VrMonoid {
            ring: "synthetic".into(),
            base_order: 6,
            kmax: 1,
            classes: [0u32, 1, 3, 4]
                .iter()
                .enumerate()
                .map(|(id, &rep)| MonoidClass { id, level: 1, representative: rep })
                .collect(),
            additions,
            traces: vec![IdealTrace { ideal: vec![0], classes: vec![0], order_ideal: true }],
            fragment: "synthetic".into(),
        }
    }

    #[test]
    fn thm87_flags_a_genuine_counterexample_as_failed() {
        let r = zn(6);
        let rep = thm87_with(&r, &synthetic_monoid(None)).unwrap();
        assert!(rep.failed >= 1);
        // Z6 is a QB-ring, so a failed instance is an inconsistency
        assert!(!rep.consistent);
    }

    #[test]
    fn thm87_reports_fragment_gaps_as_inconclusive() {
        let r = zn(6);
        let rep = thm87_with(&r, &synthetic_monoid(Some(3))).unwrap();
        assert!(rep.inconclusive >= 1);
        assert_eq!(rep.failed, 0);
        assert!(rep.consistent);
    }

    #[test]
    fn refinement_holds_at_desk_scale() {
        for r in [zn(6), m2f2(), f2xf3()] {
            let m = vr_monoid(&r, 2).unwrap();
            let instances = refinement_check(&m);
            assert!(!instances.is_empty());
            assert!(
                instances.iter().all(|i| i.outcome == FragmentOutcome::Verified),
                "in {}: {:?}",
                r.label(),
                instances.iter().find(|i| i.outcome != FragmentOutcome::Verified)
            );
        }
    }

    #[test]
    fn monoid_report_serializes() {
        let m = vr_monoid(&zn(6), 2).unwrap();
        let json = m.to_json();
        for key in ["classes", "additions", "traces", "fragment", "order_ideal"] {
            assert!(json.contains(key), "missing {key}");
        }
    }
}
