//! The acceptance gate: one test per criterion, each printing a single
//! pass line on success. Every check is exact; there are no tolerances.
//! Budgeted criteria assert their own wall-clock ceilings.

use std::time::Instant;

use qbr_core::closure::{is_b_ring, is_qb_nonunital, is_qb_ring, lemma35_witness};
use qbr_core::exchange::{
    is_exchange_ring, prop82_check, thm72_conditions, thm84_equivalence, ExtensionRoute,
};
use qbr_core::ideals::{enumerate_ideals, ideal_as_subring, jacobson_radical, quotient};
use qbr_core::jacobson::demo_claims;
use qbr_core::matrix_qb::reduce_row_m2;
use qbr_core::monoid::{thm87_condition, vr_monoid};
use qbr_core::quasi::{
    corner_transfer, extend_to_quasi_invertible, is_quasi_invertible, quasi_adversible,
    quasi_inverse_family, quasi_invertible, quasi_invertible_set, skew_corner, QIWitness,
};
use qbr_core::regular::{
    extends, first_partial_inverse, idempotents, partial_inverses, regular_elements,
};
use qbr_core::ring::{matrix_decode, matrix_ring, unitization};
use qbr_core::suites::seeded_rows;
use qbr_core::zoo;
use qbr_core::{build_ring, Elem, FiniteRing, RingSpec};

fn zn(n: u32) -> FiniteRing {
    build_ring(&RingSpec::Zn { n }).unwrap()
}

#[test]
fn criterion_01_finite_consistency_law() {
    let t0 = Instant::now();
    let mut rings = 0usize;
    for entry in zoo::acceptance() {
        rings += 1;
        let r = &entry.ring;
        let qset = quasi_invertible_set(r).unwrap();
        assert_eq!(qset, r.units(), "R_q^-1 != R^-1 in {}", entry.name);
        assert!(is_b_ring(r).unwrap().holds, "{} is not a B-ring", entry.name);
        assert!(is_qb_ring(r).unwrap().holds, "{} is not a QB-ring", entry.name);
        assert!(is_exchange_ring(r), "{} is not an exchange ring", entry.name);
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 300, "corpus sweep took {dt:?}, budget is 5 minutes");
    println!(
        "[PASS] criterion 1: R_q^-1 = R^-1 and B = QB = exchange on all {rings} corpus rings ({dt:?})"
    );
}

#[test]
fn criterion_02_family_sweep() {
    let mut tuples = 0u64;
    let mut rings = 0usize;
    for entry in zoo::capped(64) {
        let r = &entry.ring;
        rings += 1;
        for u in r.elements() {
            let Some(w) = quasi_invertible(r, u).unwrap() else { continue };
            for a in r.elements() {
                for b in r.elements() {
                    let rec = quasi_inverse_family(r, &w, a, b).unwrap();
                    let ok = rec.orth_new
                        && rec.orth_new_old
                        && rec.orth_old_new
                        && rec.absorb_uv
                        && rec.absorb_vu
                        && rec.mvn_ok;
                    assert!(
                        ok,
                        "family relation fails in {} at u={u} a={a} b={b} v'={}",
                        entry.name, rec.v_prime
                    );
                    tuples += 1;
                }
            }
        }
    }
    println!("[PASS] criterion 2: all six family relations on {tuples} tuples over {rings} rings");
}

#[test]
fn criterion_03_factorization_identities() {
    let m2f2 = matrix_ring(&build_ring(&RingSpec::Gf { q: 2 }).unwrap(), 2).unwrap();
    let mut tuples = 0u64;
    for r in [&zn(6), &m2f2] {
        let one = r.one().unwrap();
        for a in r.elements() {
            for x in r.elements() {
                let b = r.sub(one, r.mul(a, x));
                for c in r.elements() {
                    let w = r.add(x, r.mul(c, b));
                    for z in partial_inverses(r, w) {
                        if !(QIWitness { u: w, v: z }).verify(r) {
                            continue;
                        }
                        let rep = lemma35_witness(r, a, x, b, c, z).unwrap();
                        assert!(
                            rep.left_identity && rep.right_identity && rep.result_quasi_invertible,
                            "factorization fails in {} at a={a} x={x} c={c} z={z}",
                            r.label()
                        );
                        tuples += 1;
                    }
                }
            }
        }
    }
    println!("[PASS] criterion 3: both factorizations hold on {tuples} valid 5-tuples");
}

#[test]
fn criterion_04_opposite_ring_symmetry() {
    let mut rings = 0usize;
    for entry in zoo::acceptance() {
        rings += 1;
        let here = is_qb_ring(&entry.ring).unwrap().holds;
        let there = is_qb_ring(&entry.ring.opposite()).unwrap().holds;
        assert_eq!(here, there, "QB differs from the opposite ring for {}", entry.name);
    }
    println!("[PASS] criterion 4: is_qb_ring(R) = is_qb_ring(R^op) on all {rings} corpus rings");
}

#[test]
fn criterion_05_m2_reduction() {
    let t0 = Instant::now();
    // (a) brute force: M2(R) is QB whenever |R| <= 4
    let mut brute = 0usize;
    for entry in zoo::capped(4) {
        let s = matrix_ring(&entry.ring, 2).unwrap();
        let verdict = is_qb_ring(&s).unwrap();
        assert!(verdict.holds, "M2({}) fails QB: {:?}", entry.name, verdict.counterexample);
        brute += 1;
    }
    // (b) 200 seeded reductions over M2(Z6) with verified output
    let r = zn(6);
    let s = matrix_ring(&r, 2).unwrap();
    let rows = seeded_rows(&s, 0x716272, 200).unwrap();
    for row in &rows {
        let red = reduce_row_m2(&r, &s, row).unwrap();
        assert_eq!(
            s.add(row.a(), s.mul(row.b(), red.reducer)),
            red.result,
            "reducer equation fails at a={} b={}",
            row.a(),
            row.b()
        );
        assert_eq!(red.witness.u, red.result);
        assert!(red.witness.verify(&s), "quasi-inverse witness fails at a={}", row.a());
        assert!(!red.trace.is_empty(), "empty stage trace at a={}", row.a());
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 120, "M2 sweep took {dt:?}, budget is 2 minutes");
    println!(
        "[PASS] criterion 5: {brute} brute-force M2 verdicts and {} verified reductions ({dt:?})",
        rows.len()
    );
}

#[test]
fn criterion_06_nonunital_coherence() {
    // quasi-adverses against the unitization oracle
    let mut points = 0u64;
    for entry in zoo::nonunital() {
        let s = &entry.ring;
        assert!(!s.is_unital(), "{} should be non-unital", entry.name);
        let (tilde, embed) = unitization(s).unwrap();
        let one = tilde.one_unchecked();
        for x in s.elements() {
            let adverse = quasi_adversible(s, x).is_some();
            let lifted = tilde.sub(one, Elem(embed[x.0 as usize]));
            assert_eq!(
                adverse,
                is_quasi_invertible(&tilde, lifted),
                "oracle disagreement in {} at x={x}",
                entry.name
            );
            points += 1;
        }
    }
    // the four ideal conditions stay mutually equivalent
    let mut lemma_tuples = 0u64;
    for entry in zoo::capped(64) {
        let r = &entry.ring;
        for i in enumerate_ideals(r).unwrap() {
            for a in i.iter() {
                for b in r.elements() {
                    let rep = qbr_core::closure::lemma46_check(r, &i, a, b).unwrap();
                    assert!(
                        rep.equivalent,
                        "conditions split in {} at a={a} b={b}: {:?}",
                        entry.name, rep.cond
                    );
                    lemma_tuples += 1;
                }
            }
        }
    }
    // ideals of QB corpus rings are QB as non-unital rings
    let mut ideals = 0u64;
    for entry in zoo::acceptance() {
        let r = &entry.ring;
        if !is_qb_ring(r).unwrap().holds {
            continue;
        }
        for i in enumerate_ideals(r).unwrap() {
            let (s, _) = ideal_as_subring(r, &i).unwrap();
            assert!(is_qb_nonunital(&s), "ideal of size {} in {} is not QB", i.len(), entry.name);
            ideals += 1;
        }
    }
    println!(
        "[PASS] criterion 6: {points} oracle points, {lemma_tuples} equivalence tuples, \
         {ideals} inherited ideals"
    );
}

#[test]
fn criterion_07_corner_transfer_and_extension() {
    // Thm 5.5 on every admissible (p, q, u, v, x) in M2(F2) and M2(F3)
    let mut tuples = 0u64;
    for q in [2u32, 3] {
        let r = matrix_ring(&build_ring(&RingSpec::Gf { q }).unwrap(), 2).unwrap();
        let one = r.one().unwrap();
        let idem: Vec<Elem> = idempotents(&r).to_vec();
        for &p in &idem {
            for &qq in &idem {
                let corner = skew_corner(&r, p, qq);
                if corner.len() == 1 {
                    continue;
                }
                let cp = r.sub(one, p);
                let cq = r.sub(one, qq);
                for u in skew_corner(&r, cp, cq).iter() {
                    for v in skew_corner(&r, cq, cp).iter() {
                        if r.mul(u, v) != cp || r.mul(v, u) != cq {
                            continue;
                        }
                        for x in corner.iter() {
                            let rep = corner_transfer(&r, u, v, p, qq, x).unwrap();
                            assert!(
                                rep.agree && rep.cor54_violations == 0,
                                "corner transfer fails in {} at p={p} q={qq} u={u} v={v} x={x}",
                                r.label()
                            );
                            tuples += 1;
                        }
                    }
                }
            }
        }
    }
    // Thm 5.9 extension on every regular element in rings of order <= 128
    let mut extended = 0u64;
    for entry in zoo::capped(128) {
        let r = &entry.ring;
        for a in regular_elements(r).iter() {
            let x = first_partial_inverse(r, a).unwrap();
            let u = extend_to_quasi_invertible(r, a, x).unwrap();
            assert!(
                is_quasi_invertible(r, u) && extends(r, a, u).is_some(),
                "extension fails in {} at a={a}",
                entry.name
            );
            extended += 1;
        }
    }
    println!(
        "[PASS] criterion 7: {tuples} corner-transfer tuples, {extended} regular extensions"
    );
}

#[test]
fn criterion_08_lifting_and_extension_conditions() {
    // every quasi-invertible coset lifts, in rings of order <= 64
    let mut lifts = 0u64;
    for entry in zoo::capped(64) {
        let r = &entry.ring;
        for i in enumerate_ideals(r).unwrap() {
            let (down, proj) = quotient(r, &i).unwrap();
            let downstairs = quasi_invertible_set(&down).unwrap();
            for a in r.elements() {
                if !downstairs.contains(Elem(proj[a.0 as usize])) {
                    continue;
                }
                let u = qbr_core::exchange::lift_quasi_invertible(r, &i, a).unwrap();
                assert!(is_quasi_invertible(r, u));
                assert!(i.contains(r.sub(a, u)), "lift of {a} differs outside the ideal");
                lifts += 1;
            }
        }
    }
    // the three conditions against is_qb_ring on every (R, I)
    let mut pairs = 0u64;
    for entry in zoo::acceptance() {
        let r = &entry.ring;
        for i in enumerate_ideals(r).unwrap() {
            let rep = thm72_conditions(r, &i, ExtensionRoute::Direct).unwrap();
            assert!(
                rep.consistent,
                "conditions split in {} over ideal of size {}: c1={} c2={} c3={} qb={}",
                entry.name,
                i.len(),
                rep.c1,
                rep.c2,
                rep.c3,
                rep.qb
            );
            pairs += 1;
        }
    }
    println!("[PASS] criterion 8: {lifts} lifted cosets, {pairs} (R, I) condition checks");
}

/// Rank over F2 of the matrix behind a monoid-class representative of
/// V(M2(F2)): level-1 representatives decode to 2x2 bit matrices,
/// level-2 to 4x4 in 2x2 blocks.
fn f2_rank(level: u8, representative: u32) -> usize {
    let mut rows: Vec<u8> = Vec::new();
    match level {
        1 => {
            let e = matrix_decode(2, 2, representative);
            rows.push((e[0] as u8) | ((e[1] as u8) << 1));
            rows.push((e[2] as u8) | ((e[3] as u8) << 1));
        }
        2 => {
            let blocks = matrix_decode(16, 2, representative);
            for br in 0..2 {
                for sub in 0..2 {
                    let mut row = 0u8;
                    for bc in 0..2 {
                        let e = matrix_decode(2, 2, blocks[2 * br + bc]);
                        row |= (e[2 * sub] as u8) << (2 * bc);
                        row |= (e[2 * sub + 1] as u8) << (2 * bc + 1);
                    }
                    rows.push(row);
                }
            }
        }
        _ => unreachable!("fragment levels are 1 and 2"),
    }
    let mut rank = 0;
    for bit in 0..4 {
        if let Some(k) = (rank..rows.len()).find(|&k| rows[k] >> bit & 1 == 1) {
            rows.swap(rank, k);
            let pivot = rows[rank];
            for (k, row) in rows.iter_mut().enumerate() {
                if k != rank && *row >> bit & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

#[test]
fn criterion_09_exchange_and_monoid() {
    // Prop 8.2 on every semiprimitive corpus ring
    let mut semiprimitive = 0usize;
    for entry in zoo::acceptance() {
        if !jacobson_radical(&entry.ring).unwrap().is_zero() {
            continue;
        }
        assert!(
            prop82_check(&entry.ring).unwrap(),
            "maximal regulars differ from R_q^-1 in {}",
            entry.name
        );
        semiprimitive += 1;
    }
    // Thm 8.4 on every corpus ring
    for entry in zoo::acceptance() {
        let rep = thm84_equivalence(&entry.ring).unwrap();
        assert!(rep.consistent, "the three conditions split on {}", entry.name);
    }
    // V(M2(F2)) at level <= 2 is the rank fragment {0..4} under addition
    let m2f2 = matrix_ring(&build_ring(&RingSpec::Gf { q: 2 }).unwrap(), 2).unwrap();
    let monoid = vr_monoid(&m2f2, 2).unwrap();
    let ranks: Vec<usize> =
        monoid.classes.iter().map(|c| f2_rank(c.level, c.representative)).collect();
    let mut sorted = ranks.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, [0, 1, 2, 3, 4], "unexpected class ranks {ranks:?}");
    assert!(!monoid.additions.is_empty());
    for t in &monoid.additions {
        assert_eq!(
            ranks[t.sum],
            ranks[t.a] + ranks[t.b],
            "addition is not rank-additive at classes {} + {}",
            t.a,
            t.b
        );
    }
    let sweep = thm87_condition(&m2f2).unwrap();
    assert!(sweep.consistent && sweep.failed == 0, "separation sweep fails on M2(F2)");
    println!(
        "[PASS] criterion 9: Prop 8.2 on {semiprimitive} semiprimitive rings, Thm 8.4 on all, \
         rank-additive V(M2(F2)) with {} recorded sums, {} separation instances",
        monoid.additions.len(),
        sweep.instances.len()
    );
}

#[test]
fn criterion_10_infinite_demo() {
    let t0 = Instant::now();
    let rep = demo_claims(2, 6).unwrap();
    assert!(rep.all_hold, "demo claims fail: {rep:?}");
    for required in [
        "x y = 1",
        "y x != 1",
        "matrix-unit law e_ij e_kl = [j=k] e_il for indices <= 6",
        "J_q^-1 != J^-1: x is quasi-invertible but not invertible",
    ] {
        assert!(
            rep.claims.iter().any(|c| c.name == required && c.holds),
            "missing claim {required:?}"
        );
    }
    // the contrast with finite scale: the law of criterion 1 has a
    // genuine counterexample here
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 5, "demo took {dt:?}, budget is 5 seconds");
    println!("[PASS] criterion 10: {} exact claims in J ({dt:?})", rep.claims.len());
}
