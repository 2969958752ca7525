//! The fixed ring corpus the sweeps run over: cyclic rings, small fields,
//! 2x2 matrix and triangular rings, a few products, and every proper
//! quotient of those. Built once per process and shared.

use std::sync::OnceLock;

use crate::ideals::{enumerate_ideals, ideal_as_subring, quotient};
use crate::ring::{build_ring, FiniteRing, RingSpec};

/// Corpus membership cap. Two of the named rings (M2(Z6) and T3(GF(3)))
/// exceed it; they stay in `all` for targeted tests but are excluded
/// from `acceptance`, and their quotient families are not expanded.
pub const ZOO_ORDER_CAP: usize = 512;

pub struct ZooEntry {
    pub name: String,
    pub ring: FiniteRing,
}

fn zn(n: u32) -> RingSpec {
    RingSpec::Zn { n }
}

fn gf(q: u32) -> RingSpec {
    RingSpec::Gf { q }
}

fn base_specs() -> Vec<RingSpec> {
    let mut specs: Vec<RingSpec> = (2..=12).map(zn).collect();
    specs.extend([4, 8, 9].map(gf));
    for base in [gf(2), gf(3), zn(4), zn(6)] {
        specs.push(RingSpec::Matrix { size: 2, base: Box::new(base) });
    }
    for base in [gf(2), gf(3)] {
        for size in [2, 3] {
            specs.push(RingSpec::UpperTriangular { size, base: Box::new(base.clone()) });
        }
    }
    specs.push(RingSpec::Product { factors: vec![gf(2), gf(3)] });
    specs.push(RingSpec::Product { factors: vec![zn(4), gf(2)] });
    specs.push(RingSpec::Product {
        factors: vec![RingSpec::Matrix { size: 2, base: Box::new(gf(2)) }, gf(3)],
    });
    specs
}

/// Corpus name for a freshly built base ring: the label, minus the
/// modulus suffix GF labels carry ("GF(4)=F2[x]/(x^2+x+1)" -> "GF(4)").
fn base_name(ring: &FiniteRing) -> String {
    ring.label().split('=').next().unwrap().to_string()
}

fn build_corpus() -> Vec<ZooEntry> {
    let mut entries: Vec<ZooEntry> = base_specs()
        .iter()
        .map(|spec| {
            let ring = build_ring(spec).expect("corpus specs are well formed");
            ZooEntry { name: base_name(&ring), ring }
        })
        .collect();
    let mut quotients = Vec::new();
    for entry in &entries {
        if entry.ring.order() > ZOO_ORDER_CAP {
            continue;
        }
        // index k follows the deterministic enumeration order, so names
        // are stable; k = 0 is the zero ideal and the last is R itself
        let ideals = enumerate_ideals(&entry.ring).expect("corpus ideal lattices fit the cap");
        for (k, ideal) in ideals.iter().enumerate() {
            if ideal.is_zero() || ideal.len() == entry.ring.order() {
                continue;
            }
            let (q, _) = quotient(&entry.ring, ideal).expect("quotient of a checked ideal");
            quotients.push(ZooEntry { name: format!("{}/I{k}", entry.name), ring: q });
        }
    }
    entries.extend(quotients);
    entries
}

/// Every corpus ring, including the two oversized ones. Quotient entries
/// are named `{base}/I{k}` with k the ideal's enumeration index.
pub fn all() -> &'static [ZooEntry] {
    static ZOO: OnceLock<Vec<ZooEntry>> = OnceLock::new();
    ZOO.get_or_init(build_corpus)
}

/// Corpus rings of order at most `max_order`.
pub fn capped(max_order: usize) -> impl Iterator<Item = &'static ZooEntry> {
    all().iter().filter(move |e| e.ring.order() <= max_order)
}

/// The acceptance corpus: everything under the order cap.
pub fn acceptance() -> impl Iterator<Item = &'static ZooEntry> {
    capped(ZOO_ORDER_CAP)
}

pub fn find(name: &str) -> Option<&'static ZooEntry> {
    all().iter().find(|e| e.name == name)
}

/// Proper nonzero ideals of the named corpus rings, viewed as rings in
/// their own right and kept only when no identity exists inside. Entry
/// names are `{base}.I{k}`.
pub fn nonunital() -> &'static [ZooEntry] {
    static NONUNITAL: OnceLock<Vec<ZooEntry>> = OnceLock::new();
    NONUNITAL.get_or_init(|| {
        let mut out = Vec::new();
        for spec in base_specs() {
            let ring = build_ring(&spec).expect("corpus specs are well formed");
            if ring.order() > ZOO_ORDER_CAP {
                continue;
            }
            let ideals = enumerate_ideals(&ring).expect("corpus ideal lattices fit the cap");
            for (k, ideal) in ideals.iter().enumerate() {
                if ideal.is_zero() || ideal.len() == ring.order() {
                    continue;
                }
                let (s, _) = ideal_as_subring(&ring, ideal).expect("ideal carries a subring");
                if !s.is_unital() {
                    out.push(ZooEntry { name: format!("{}.I{k}", base_name(&ring)), ring: s });
                }
            }
        }
        out
    })
}
