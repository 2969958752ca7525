//! Two-sided ideals: generation, quotients, the Jacobson radical,
//! primeness, orthogonality, and subring embeddings.

use std::collections::HashSet;

use crate::error::{QbrError, Result};
use crate::ring::{quotient_by_members, Elem, FiniteRing};
use crate::ElemSet;

/// A verified two-sided ideal: the member set is closed under addition,
/// negation, and multiplication by every ring element on both sides.
/// Values of this type only come out of the checked constructors here.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ideal {
    members: ElemSet,
}

impl Ideal {
    /// Wraps a member set after scanning the closure invariants.
    pub fn checked(r: &FiniteRing, members: ElemSet) -> Result<Ideal> {
        r.same_ring_as_set(&members)?;
        if !members.contains(r.zero()) {
            return Err(QbrError::MalformedSpec("ideal misses 0".into()));
        }
        for a in members.iter() {
            if !members.contains(r.neg(a)) {
                return Err(QbrError::MalformedSpec(format!("ideal not closed under negation at {a}")));
            }
            for b in members.iter() {
                if !members.contains(r.add(a, b)) {
                    return Err(QbrError::MalformedSpec(format!("ideal not closed under addition at {a}+{b}")));
                }
            }
            for x in r.elements() {
                if !members.contains(r.mul(x, a)) || !members.contains(r.mul(a, x)) {
                    return Err(QbrError::MalformedSpec(format!("ideal not closed under multiplication at {a}")));
                }
            }
        }
        Ok(Ideal { members })
    }

    pub fn zero(r: &FiniteRing) -> Ideal {
        Ideal { members: r.set_of([r.zero()]) }
    }

    pub fn full(r: &FiniteRing) -> Ideal {
        Ideal { members: r.full_set() }
    }

    pub fn members(&self) -> &ElemSet {
        &self.members
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.members.contains(e)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds 0
    }

    pub fn is_zero(&self) -> bool {
        self.members.len() == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.iter()
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.members.to_vec()
    }
}

/// Closure of `gens` under {+, -, left-mul, right-mul by all of R},
/// as a raw member set. Worklist: each newly discovered element is
/// combined with everything known so far, so the fixpoint is reached
/// after each element is processed once.
pub(crate) fn ideal_closure_members(r: &FiniteRing, gens: &[Elem]) -> ElemSet {
    let mut members = r.set_of([r.zero()]);
    let mut queue: Vec<Elem> = Vec::new();
    for &g in gens {
        if members.insert(g) {
            queue.push(g);
        }
    }
    while let Some(x) = queue.pop() {
        let push = |e: Elem, members: &mut ElemSet, queue: &mut Vec<Elem>| {
            if members.insert(e) {
                queue.push(e);
            }
        };
        push(r.neg(x), &mut members, &mut queue);
        for y in members.to_vec() {
            push(r.add(x, y), &mut members, &mut queue);
        }
        for s in r.elements() {
            push(r.mul(s, x), &mut members, &mut queue);
            push(r.mul(x, s), &mut members, &mut queue);
        }
    }
    members
}

/// Smallest two-sided ideal containing `gens`.
pub fn ideal_generated_by(r: &FiniteRing, gens: &[Elem]) -> Result<Ideal> {
    for &g in gens {
        r.check_elem(g)?;
    }
    Ok(Ideal { members: ideal_closure_members(r, gens) })
}

/// Quotient ring R/I with the projection map (indexed by R's elements).
pub fn quotient(r: &FiniteRing, i: &Ideal) -> Result<(FiniteRing, Vec<u32>)> {
    quotient_by_members(r, &i.members)
}

/// {x : 1 - rx is a unit for every r}. For unital rings this is the
/// Jacobson radical; the result is scanned to really be an ideal before
/// it is returned.
pub fn jacobson_radical(r: &FiniteRing) -> Result<Ideal> {
    if !r.is_unital() {
        return Err(QbrError::NonUnitalRing);
    }
    let units = r.units();
    let mut members = r.empty_set();
    for x in r.elements() {
        if r.elements().all(|a| units.contains(r.one_minus_mul(a, x))) {
            members.insert(x);
        }
    }
    Ideal::checked(r, members)
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Primeness {
    pub semiprime: bool,
    pub prime: bool,
}

/// Elementwise primeness scan: semiprime means xRx = 0 forces x = 0,
/// prime means xRy = 0 forces x = 0 or y = 0.
pub fn primeness(r: &FiniteRing) -> Primeness {
    let zero = r.zero();
    let semiprime = !r
        .elements()
        .skip(1)
        .any(|x| r.elements().all(|s| r.mul3(x, s, x) == zero));
    let prime = semiprime
        && !r.elements().skip(1).any(|x| {
            r.elements()
                .skip(1)
                .any(|y| r.elements().all(|s| r.mul3(x, s, y) == zero))
        });
    Primeness { semiprime, prime }
}

/// IJ = 0 = JI, elementwise.
pub fn orthogonal_ideals(r: &FiniteRing, i: &Ideal, j: &Ideal) -> Result<bool> {
    r.same_ring_as_set(&i.members)?;
    r.same_ring_as_set(&j.members)?;
    let zero = r.zero();
    Ok(i
        .iter()
        .all(|a| j.iter().all(|b| r.mul(a, b) == zero && r.mul(b, a) == zero)))
}

/// Elementwise sum I + J, itself an ideal.
pub fn sum_ideals(r: &FiniteRing, i: &Ideal, j: &Ideal) -> Ideal {
    let mut members = r.empty_set();
    for a in i.iter() {
        for b in j.iter() {
            members.insert(r.add(a, b));
        }
    }
    Ideal { members }
}

/// Cap on the number of distinct ideals `enumerate_ideals` will produce.
pub const IDEAL_ENUM_CAP: usize = 512;

/// The full two-sided ideal lattice: principal ideals of every element,
/// closed under pairwise sums to a fixpoint. Sorted by size, then by
/// member list, so the zero ideal comes first and R last. Errors with
/// IdealCapExceeded when more than `IDEAL_ENUM_CAP` distinct ideals
/// appear.
pub fn enumerate_ideals(r: &FiniteRing) -> Result<Vec<Ideal>> {
    let mut seen: HashSet<ElemSet> = HashSet::new();
    let mut ideals: Vec<Ideal> = Vec::new();
    let mut add = |set: ElemSet, ideals: &mut Vec<Ideal>| -> Result<bool> {
        if seen.insert(set.clone()) {
            ideals.push(Ideal { members: set });
            if ideals.len() > IDEAL_ENUM_CAP {
                return Err(QbrError::IdealCapExceeded(IDEAL_ENUM_CAP));
            }
            Ok(true)
        } else {
            Ok(false)
        }
    };
    add(r.set_of([r.zero()]), &mut ideals)?;
    for g in r.elements() {
        add(ideal_closure_members(r, &[g]), &mut ideals)?;
    }
    // close the set under pairwise sums; new ideals join the pool and are
    // paired with everything, including later newcomers
    let mut lo = 0;
    while lo < ideals.len() {
        let hi = ideals.len();
        for a in lo..hi {
            for b in 0..=a {
                let s = sum_ideals(r, &ideals[a], &ideals[b]);
                add(s.members, &mut ideals)?;
            }
        }
        lo = hi;
    }
    ideals.sort_by(|a, b| (a.len(), a.to_vec()).cmp(&(b.len(), b.to_vec())));
    Ok(ideals)
}

/// An injective multiplicative and additive map from a subring S into a
/// host ring R, verified at construction.
#[derive(Clone, Debug)]
pub struct SubringEmbedding {
    map: Vec<Elem>,
    sub_fp: u64,
    host_fp: u64,
}

impl SubringEmbedding {
    pub fn image(&self, e: Elem) -> Elem {
        self.map[e.0 as usize]
    }

    pub fn image_set(&self, r: &FiniteRing) -> ElemSet {
        r.set_of(self.map.iter().copied())
    }
}

/// Verifies that `map` (indexed by S's elements) is an injective ring
/// homomorphism S -> R. The identity is not required to map to the
/// identity, so ideals qualify as subrings.
pub fn subring_embedding(s: &FiniteRing, r: &FiniteRing, map: &[Elem]) -> Result<SubringEmbedding> {
    if map.len() != s.order() {
        return Err(QbrError::NotAHomomorphism(format!(
            "map covers {} of {} elements",
            map.len(),
            s.order()
        )));
    }
    for &m in map {
        r.check_elem(m)?;
    }
    let mut hit = r.empty_set();
    for &m in map {
        if !hit.insert(m) {
            return Err(QbrError::NotAHomomorphism(format!("map is not injective at image {m}")));
        }
    }
    for a in s.elements() {
        for b in s.elements() {
            let fa = map[a.0 as usize];
            let fb = map[b.0 as usize];
            if map[s.add(a, b).0 as usize] != r.add(fa, fb) {
                return Err(QbrError::NotAHomomorphism(format!("additivity fails at ({a},{b})")));
            }
            if map[s.mul(a, b).0 as usize] != r.mul(fa, fb) {
                return Err(QbrError::NotAHomomorphism(format!("multiplicativity fails at ({a},{b})")));
            }
        }
    }
    Ok(SubringEmbedding { map: map.to_vec(), sub_fp: s.fingerprint(), host_fp: r.fingerprint() })
}

/// Convenience: the embedding of an ideal of R, viewed as a subring via
/// `subring_on_members`.
pub fn ideal_as_subring(r: &FiniteRing, i: &Ideal) -> Result<(FiniteRing, SubringEmbedding)> {
    let label = format!("ideal({}, {} elems)", r.label(), i.len());
    let (s, embed) = crate::ring::subring_on_members(r, &i.members, label)?;
    let map: Vec<Elem> = embed.iter().map(|&e| Elem(e)).collect();
    let se = subring_embedding(&s, r, &map)?;
    Ok((s, se))
}

/// True iff every pair of idempotents p, q of S with pSq = qSp = 0 also
/// satisfies pRq = qRp = 0 through the embedding.
pub fn is_primely_embedded(s: &FiniteRing, r: &FiniteRing, emb: &SubringEmbedding) -> Result<bool> {
    if emb.sub_fp != s.fingerprint() || emb.host_fp != r.fingerprint() {
        return Err(QbrError::DifferentRings);
    }
    let idems: Vec<Elem> = s.elements().filter(|&e| s.is_idempotent(e)).collect();
    let zero_s = s.zero();
    let zero_r = r.zero();
    for &p in &idems {
        for &q in &idems {
            let orth_in_s = s
                .elements()
                .all(|x| s.mul3(p, x, q) == zero_s && s.mul3(q, x, p) == zero_s);
            if !orth_in_s {
                continue;
            }
            let fp = emb.image(p);
            let fq = emb.image(q);
            let orth_in_r = r
                .elements()
                .all(|x| r.mul3(fp, x, fq) == zero_r && r.mul3(fq, x, fp) == zero_r);
            if !orth_in_r {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, matrix_encode, RingSpec};

    fn zn(n: u32) -> FiniteRing {
        build_ring(&RingSpec::Zn { n }).unwrap()
    }

    fn m2f2() -> FiniteRing {
        build_ring(&RingSpec::Matrix { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) }).unwrap()
    }

    #[test]
    fn generated_ideals_in_z6() {
        let r = zn(6);
        let i2 = ideal_generated_by(&r, &[Elem(2)]).unwrap();
        assert_eq!(i2.to_vec(), vec![Elem(0), Elem(2), Elem(4)]);
        let i0 = ideal_generated_by(&r, &[]).unwrap();
        assert_eq!(i0.to_vec(), vec![Elem(0)]);
    }

    #[test]
    fn matrix_unit_generates_simple_ring() {
        let m = m2f2();
        let e00 = Elem(matrix_encode(2, &[1, 0, 0, 0]));
        let i = ideal_generated_by(&m, &[e00]).unwrap();
        assert_eq!(i.len(), 16);
    }

    #[test]
    fn generation_is_monotone_and_idempotent() {
        let r = zn(12);
        let i = ideal_generated_by(&r, &[Elem(4)]).unwrap();
        let j = ideal_generated_by(&r, &[Elem(4), Elem(6)]).unwrap();
        assert!(i.members().is_subset(j.members()));
        let again = ideal_generated_by(&r, &i.to_vec()).unwrap();
        assert_eq!(again, i);
        Ideal::checked(&r, i.members().clone()).unwrap();
    }

    #[test]
    fn quotient_homomorphism_property() {
        let r = zn(6);
        let i = ideal_generated_by(&r, &[Elem(3)]).unwrap();
        let (q, proj) = quotient(&r, &i).unwrap();
        assert_eq!(q.order(), 3);
        for a in r.elements() {
            for b in r.elements() {
                assert_eq!(proj[r.add(a, b).0 as usize], q.add(Elem(proj[a.0 as usize]), Elem(proj[b.0 as usize])).0);
                assert_eq!(proj[r.mul(a, b).0 as usize], q.mul(Elem(proj[a.0 as usize]), Elem(proj[b.0 as usize])).0);
            }
        }
        // kernel is exactly I
        for a in r.elements() {
            assert_eq!(proj[a.0 as usize] == 0, i.contains(a));
        }
    }

    #[test]
    fn quotient_by_zero_is_identity() {
        let r = zn(6);
        let (q, proj) = quotient(&r, &Ideal::zero(&r)).unwrap();
        assert_eq!(q.order(), 6);
        for a in r.elements() {
            assert_eq!(proj[a.0 as usize], a.0);
        }
    }

    #[test]
    fn radical_of_z4_t2f2_m2f2() {
        assert_eq!(jacobson_radical(&zn(4)).unwrap().to_vec(), vec![Elem(0), Elem(2)]);
        assert_eq!(jacobson_radical(&m2f2()).unwrap().to_vec(), vec![Elem(0)]);
        let t = build_ring(&RingSpec::UpperTriangular { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) }).unwrap();
        // strictly upper single entry packs to index 2
        assert_eq!(jacobson_radical(&t).unwrap().to_vec(), vec![Elem(0), Elem(2)]);
    }

    #[test]
    fn radical_of_quotient_by_radical_vanishes() {
        for spec in [RingSpec::Zn { n: 4 }, RingSpec::Zn { n: 12 }, RingSpec::UpperTriangular { size: 2, base: Box::new(RingSpec::Gf { q: 3 }) }] {
            let r = build_ring(&spec).unwrap();
            let j = jacobson_radical(&r).unwrap();
            let (q, _) = quotient(&r, &j).unwrap();
            assert!(jacobson_radical(&q).unwrap().is_zero(), "{}", r.label());
        }
    }

    #[test]
    fn primeness_examples() {
        assert_eq!(primeness(&zn(6)), Primeness { semiprime: true, prime: false });
        assert_eq!(primeness(&zn(4)), Primeness { semiprime: false, prime: false });
        assert_eq!(primeness(&m2f2()), Primeness { semiprime: true, prime: true });
    }

    #[test]
    fn semiprime_orthogonality_is_symmetric() {
        // xRy = 0 iff yRx = 0 in a semiprime ring
        let r = zn(6);
        assert!(primeness(&r).semiprime);
        for x in r.elements() {
            for y in r.elements() {
                let xy = r.elements().all(|s| r.mul3(x, s, y) == r.zero());
                let yx = r.elements().all(|s| r.mul3(y, s, x) == r.zero());
                assert_eq!(xy, yx);
            }
        }
    }

    #[test]
    fn orthogonality_of_z6_ideals() {
        let r = zn(6);
        let i2 = ideal_generated_by(&r, &[Elem(2)]).unwrap();
        let i3 = ideal_generated_by(&r, &[Elem(3)]).unwrap();
        assert!(orthogonal_ideals(&r, &i2, &i3).unwrap());
        assert!(!orthogonal_ideals(&r, &i2, &i2).unwrap());
        assert!(orthogonal_ideals(&r, &i2, &Ideal::zero(&r)).unwrap());
    }

    #[test]
    fn ideal_lattice_of_z12() {
        let r = zn(12);
        let ideals = enumerate_ideals(&r).unwrap();
        // divisor lattice of 12: sizes 1, 2, 3, 4, 6, 12
        let sizes: Vec<usize> = ideals.iter().map(|i| i.len()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn ideal_lattice_of_m2z4() {
        let m = build_ring(&RingSpec::Matrix { size: 2, base: Box::new(RingSpec::Zn { n: 4 }) }).unwrap();
        let ideals = enumerate_ideals(&m).unwrap();
        // matrix ideals mirror the base: {0}, M2(2Z4), M2(Z4)
        let sizes: Vec<usize> = ideals.iter().map(|i| i.len()).collect();
        assert_eq!(sizes, vec![1, 16, 256]);
    }

    #[test]
    fn embedding_checks_homomorphism() {
        let r = zn(6);
        let i = ideal_generated_by(&r, &[Elem(2)]).unwrap();
        let (s, emb) = ideal_as_subring(&r, &i).unwrap();
        assert_eq!(s.order(), 3);
        assert!(is_primely_embedded(&s, &r, &emb).unwrap());
        // a broken map is rejected
        let bad: Vec<Elem> = vec![Elem(0), Elem(2), Elem(3)];
        assert!(matches!(subring_embedding(&s, &r, &bad), Err(QbrError::NotAHomomorphism(_))));
    }

    #[test]
    fn diagonal_of_m2f2_is_not_primely_embedded() {
        let m = m2f2();
        let d = build_ring(&RingSpec::Product { factors: vec![RingSpec::Gf { q: 2 }, RingSpec::Gf { q: 2 }] }).unwrap();
        // (a, b) -> diag(a, b); product packing is a + 2b
        let map: Vec<Elem> = (0..4u32)
            .map(|idx| Elem(matrix_encode(2, &[idx & 1, 0, 0, idx >> 1])))
            .collect();
        let emb = subring_embedding(&d, &m, &map).unwrap();
        assert!(!is_primely_embedded(&d, &m, &emb).unwrap());
        // identity embedding is primely embedded
        let idmap: Vec<Elem> = m.elements().collect();
        let idemb = subring_embedding(&m, &m, &idmap).unwrap();
        assert!(is_primely_embedded(&m, &m, &idemb).unwrap());
    }
}
