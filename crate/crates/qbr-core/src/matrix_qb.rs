//! Unimodular rows over M2(R) and the staged reduction that certifies
//! quasi-invertibility of a + b·y for a suitable reducer y.
//!
//! The reduction keeps a row state (A, E, X) over the matrix ring with
//! A·X + E = 1, folding the certificate's second component into E after
//! every transform. Each stage is a single transform
//! (A, E) -> (vAu + vEC, vE) together with the recorded data needed to
//! pull a reducer for the transformed row back to the original one.
//! Stage invariants are asserted exactly; a failed assertion is an error,
//! never a silent skip.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closure::{in_cl, in_cr};
use crate::error::{QbrError, Result};
use crate::quasi::{
    centrally_orthogonal, is_quasi_invertible, quasi_inverse_family, quasi_invertible,
    quasi_invertible_set, skew_corner, skew_corner_qinv, QIWitness,
};
use crate::ring::{matrix_decode, matrix_encode, Elem, FiniteRing};

/// A right unimodular row (a, b) with a certificate a·x + b·y = 1.
/// The certificate equation is checked on construction and all fields are
/// read-only afterwards, so a row in hand is always genuinely unimodular.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct UnimodularRow {
    a: Elem,
    b: Elem,
    x: Elem,
    y: Elem,
    fp: u64,
}

impl UnimodularRow {
    pub fn new(s: &FiniteRing, a: Elem, b: Elem, x: Elem, y: Elem) -> Result<Self> {
        let one = s.one().ok_or(QbrError::NonUnitalRing)?;
        for e in [a, b, x, y] {
            s.check_elem(e)?;
        }
        if s.add(s.mul(a, x), s.mul(b, y)) != one {
            return Err(QbrError::PreconditionViolated(format!(
                "certificate equation a*x + b*y = 1 fails for ({a}, {b}) with ({x}, {y})"
            )));
        }
        Ok(UnimodularRow { a, b, x, y, fp: s.fingerprint() })
    }

    pub fn a(&self) -> Elem {
        self.a
    }

    pub fn b(&self) -> Elem {
        self.b
    }

    pub fn x(&self) -> Elem {
        self.x
    }

    pub fn y(&self) -> Elem {
        self.y
    }

    pub fn same_ring(&self, s: &FiniteRing) -> Result<()> {
        if self.fp != s.fingerprint() {
            return Err(QbrError::DifferentRings);
        }
        Ok(())
    }
}

/// (a, b) -> (vau + vbc, vb) for units u, v, with the certificate carried
/// along: x -> u⁻¹xv⁻¹ and y -> (y - cu⁻¹x)v⁻¹. The inverse transform is
/// (u⁻¹, v⁻¹, -cu⁻¹), so reducibility is preserved in both directions.
pub fn row_transform(
    s: &FiniteRing,
    row: &UnimodularRow,
    u: Elem,
    v: Elem,
    c: Elem,
) -> Result<UnimodularRow> {
    row.same_ring(s)?;
    s.check_elem(c)?;
    let ui = s.inverse(u).ok_or(QbrError::NotAUnit(u.0))?;
    let vi = s.inverse(v).ok_or(QbrError::NotAUnit(v.0))?;
    let a = s.add(s.mul3(v, row.a, u), s.mul3(v, row.b, c));
    let b = s.mul(v, row.b);
    let x = s.mul3(ui, row.x, vi);
    let y = s.mul(s.sub(row.y, s.mul3(c, ui, row.x)), vi);
    UnimodularRow::new(s, a, b, x, y)
}

/// Candidate scan order for the witness searches inside a reduction:
/// ascending element index for canonical, reproducible traces, or a seeded
/// shuffle to fuzz the proof's robustness to witness choice.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum WitnessOrder {
    Ascending,
    Seeded(u64),
}

fn shuffled(mut v: Vec<Elem>, order: WitnessOrder, salt: u64) -> Vec<Elem> {
    if let WitnessOrder::Seeded(seed) = order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15));
        v.shuffle(&mut rng);
    }
    v
}

/// One entry of the reduction trace: the transform applied, the witness it
/// was built from (if the stage searched for one), and the row after it.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub stage: &'static str,
    pub witness: Option<u32>,
    pub u: u32,
    pub v: u32,
    pub c: u32,
    pub a: u32,
    pub e: u32,
}

/// Everything a successful reduction certifies. `reducer` works on the
/// original row: result = a + b·reducer, verified quasi-invertible by
/// `witness`. `reduced_matrix` is the fully transformed row element with
/// its assembled 2x2 quasi-inverse.
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub reducer: Elem,
    pub result: Elem,
    pub witness: QIWitness,
    pub reduced_matrix: Elem,
    pub reduced_quasi_inverse: Elem,
    pub trace: Vec<StageRecord>,
}

struct StepData {
    c: Elem,
    u_inv: Elem,
    v_inv: Elem,
    x_pre: Elem,
}

struct RowState<'a> {
    r: &'a FiniteRing,
    s: &'a FiniteRing,
    a: Elem,
    e: Elem,
    x: Elem,
    u_acc: Elem,
    v_acc: Elem,
    steps: Vec<StepData>,
    trace: Vec<StageRecord>,
}

fn inv(stage: &'static str, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(QbrError::StageInvariantFailed(stage, what.into()))
    }
}

impl<'a> RowState<'a> {
    fn dec(&self, m: Elem) -> [Elem; 4] {
        let g = matrix_decode(self.r.order(), 2, m.0);
        [Elem(g[0]), Elem(g[1]), Elem(g[2]), Elem(g[3])]
    }

    fn mat(&self, g: [Elem; 4]) -> Elem {
        Elem(matrix_encode(self.r.order(), &[g[0].0, g[1].0, g[2].0, g[3].0]))
    }

    /// Apply one transform (A, E) -> (vAu + vEC, vE), fold the updated
    /// certificate back into E, and record the data for the reducer
    /// pull-back. The folded state keeps A·X + E = 1 exactly.
    fn step(&mut self, stage: &'static str, u: Elem, v: Elem, c: Elem, witness: Option<Elem>) -> Result<()> {
        let s = self.s;
        let one = s.one_unchecked();
        let u_inv = s.inverse(u).ok_or(QbrError::NotAUnit(u.0))?;
        let v_inv = s.inverse(v).ok_or(QbrError::NotAUnit(v.0))?;
        let x_pre = self.x;
        self.a = s.add(s.mul3(v, self.a, u), s.mul3(v, self.e, c));
        let y_hat = s.mul(s.sub(one, s.mul3(c, u_inv, x_pre)), v_inv);
        self.e = s.mul(s.mul(v, self.e), y_hat);
        self.x = s.mul3(u_inv, x_pre, v_inv);
        inv(stage, s.add(s.mul(self.a, self.x), self.e) == one, "the folded certificate equation survives the transform")?;
        self.u_acc = s.mul(self.u_acc, u);
        self.v_acc = s.mul(v, self.v_acc);
        self.steps.push(StepData { c, u_inv, v_inv, x_pre });
        self.trace.push(StageRecord {
            stage,
            witness: witness.map(|w| w.0),
            u: u.0,
            v: v.0,
            c: c.0,
            a: self.a.0,
            e: self.e.0,
        });
        Ok(())
    }

    /// Reducer for the folded starting row (A0, E0): composing the steps in
    /// reverse, W -> Cu⁻¹ + (1 - Cu⁻¹X)v⁻¹Wu⁻¹, starting from W = 0 for the
    /// final row whose first element is quasi-invertible outright.
    fn fold_back(&self) -> Elem {
        let s = self.s;
        let one = s.one_unchecked();
        let mut w = s.zero();
        for st in self.steps.iter().rev() {
            let cu = s.mul(st.c, st.u_inv);
            let carry = s.mul(s.sub(one, s.mul(cu, st.x_pre)), s.mul3(st.v_inv, w, st.u_inv));
            w = s.add(cu, carry);
        }
        w
    }
}

/// First quasi-inverse of `a` along the given scan order. The first
/// normalized partial inverse decides: if it fails the orthogonality test
/// no other choice can pass, and if `a` is quasi-invertible every
/// normalized partial inverse is a quasi-inverse.
fn find_qinv(r: &FiniteRing, a: Elem, order: &[Elem]) -> Option<QIWitness> {
    let cand = order.iter().copied().find(|&x| r.mul3(a, x, a) == a)?;
    let v = r.mul3(cand, a, cand);
    let w = QIWitness { u: a, v };
    w.verify(r).then_some(w)
}

/// One corner-stage search inside pRq: scan `order` for z with
/// target + coeff·z quasi-invertible in the corner. Returns the witness z,
/// the moved target, and its corner quasi-inverse. Preconditions: p, q
/// idempotent with pRq nonzero, target in pRq, coeff in pRp, and the
/// candidates drawn from pRq.
pub fn corner_step(
    r: &FiniteRing,
    p: Elem,
    q: Elem,
    target: Elem,
    coeff: Elem,
    order: &[Elem],
) -> Result<Option<(Elem, Elem, Elem)>> {
    for &z in order {
        let cand = r.add(target, r.mul(coeff, z));
        if let Some(w) = skew_corner_qinv(r, p, q, cand)? {
            return Ok(Some((z, cand, w)));
        }
    }
    Ok(None)
}

fn validate_m2(r: &FiniteRing, s: &FiniteRing) -> Result<()> {
    let one = r.one().ok_or(QbrError::NonUnitalRing)?;
    let n = r.order();
    if (s.order() as u128) != (n as u128).pow(4) {
        return Err(QbrError::PreconditionViolated(format!(
            "{} has order {}, not the fourth power of the base order {}",
            s.label(),
            s.order(),
            n
        )));
    }
    let e = |g: [u32; 4]| Elem(matrix_encode(n, &g));
    let wired = s.one() == Some(e([one.0, 0, 0, one.0]))
        && s.mul(e([0, one.0, 0, 0]), e([0, 0, one.0, 0])) == e([one.0, 0, 0, 0])
        && s.mul(e([0, 0, one.0, 0]), e([0, one.0, 0, 0])) == e([0, 0, 0, one.0]);
    if !wired {
        return Err(QbrError::PreconditionViolated(format!(
            "{} is not the 2x2 matrix ring over {} in matrix_encode layout",
            s.label(), r.label()
        )));
    }
    Ok(())
}

/// Staged reduction of a right unimodular row over s = M2(r): finds a
/// reducer y with a + b·y quasi-invertible, returning the verified witness
/// and the per-stage trace. Witness searches scan ascending.
pub fn reduce_row_m2(r: &FiniteRing, s: &FiniteRing, row: &UnimodularRow) -> Result<RowReduction> {
    reduce_row_m2_ordered(r, s, row, WitnessOrder::Ascending)
}

/// As `reduce_row_m2`, with an explicit witness scan order.
pub fn reduce_row_m2_ordered(
    r: &FiniteRing,
    s: &FiniteRing,
    row: &UnimodularRow,
    order: WitnessOrder,
) -> Result<RowReduction> {
    validate_m2(r, s)?;
    row.same_ring(s)?;
    let one = r.one_unchecked();
    let zr = r.zero();
    let one_s = s.one_unchecked();
    let zero_s = s.zero();
    let scan = |salt: u64| shuffled(r.elements().collect(), order, salt);

    let mut st = RowState {
        r,
        s,
        a: row.a,
        e: s.mul(row.b, row.y),
        x: row.x,
        u_acc: one_s,
        v_acc: one_s,
        steps: Vec::new(),
        trace: Vec::new(),
    };
    // the row certificate, reread as A·X + E = 1 with E = b·y
    inv("normalize-a", s.add(s.mul(st.a, st.x), st.e) == one_s, "the folded starting certificate")?;

    // Stage 1: make the (1,1) entry quasi-invertible. The (1,1) equation
    // aa' + bc' + e = 1 gives a + (bc' + e)z1 quasi-invertible for some z1.
    {
        let [a, b, _, d] = st.dec(st.a);
        let xg = st.dec(st.x);
        let eg = st.dec(st.e);
        inv(
            "normalize-a",
            r.add(r.add(r.mul(a, xg[0]), r.mul(b, xg[2])), eg[0]) == one,
            "the (1,1) certificate equation",
        )?;
        let w = r.add(r.mul(b, xg[2]), eg[0]);
        let z1 = scan(1)
            .into_iter()
            .find(|&z| is_quasi_invertible(r, r.add(a, r.mul(w, z))))
            .ok_or(QbrError::StageWitnessNotFound("z1"))?;
        let u = st.mat([one, zr, r.mul(xg[2], z1), one]);
        let cm = st.mat([z1, zr, zr, zr]);
        st.step("normalize-a", u, one_s, cm, Some(z1))?;
        let [a1, b1, _, d1] = st.dec(st.a);
        inv("normalize-a", a1 == r.add(a, r.mul(w, z1)), "the (1,1) entry moved to a + (bc'+e)z1")?;
        inv("normalize-a", is_quasi_invertible(r, a1), "the moved (1,1) entry is quasi-invertible")?;
        inv("normalize-a", b1 == b && d1 == d, "the second column is untouched")?;
    }

    // Stage 2: conjugate so the quasi-inverse x of a kills the row and
    // column through a: axb = cxa = 0, and with x normalized also
    // cx = xb = 0.
    let x = {
        let [a, b, c, _] = st.dec(st.a);
        let xw = find_qinv(r, a, &scan(2)).ok_or(QbrError::StageWitnessNotFound("x"))?;
        let x = xw.v;
        let u = st.mat([one, r.neg(r.mul(x, b)), zr, one]);
        let v = st.mat([one, zr, r.neg(r.mul(c, x)), one]);
        st.step("conjugate-a", u, v, zero_s, None)?;
        let [a2, b2, c2, _] = st.dec(st.a);
        inv("conjugate-a", a2 == a, "the (1,1) entry survives the conjugation")?;
        inv("conjugate-a", b2 == r.mul(r.sub(one, r.mul(a, x)), b), "b moved to (1-ax)b")?;
        inv("conjugate-a", c2 == r.mul(c, r.sub(one, r.mul(x, a))), "c moved to c(1-xa)")?;
        inv("conjugate-a", r.mul3(a2, x, b2) == zr, "axb = 0")?;
        inv("conjugate-a", r.mul3(c2, x, a2) == zr, "cxa = 0")?;
        inv("conjugate-a", r.mul(c2, x) == zr, "cx = 0")?;
        inv("conjugate-a", r.mul(x, b2) == zr, "xb = 0")?;
        x
    };

    // Stage 3: make the (2,2) entry quasi-invertible via the (2,2)
    // equation cb' + dd' + h = 1. The (1,2) equation ab' + bd' + f = 0
    // keeps xb = 0 through the move.
    {
        let [a, b, c, d] = st.dec(st.a);
        let xg = st.dec(st.x);
        let eg = st.dec(st.e);
        inv(
            "normalize-d",
            r.add(r.add(r.mul(c, xg[1]), r.mul(d, xg[3])), eg[3]) == one,
            "the (2,2) certificate equation",
        )?;
        inv(
            "normalize-d",
            r.add(r.add(r.mul(a, xg[1]), r.mul(b, xg[3])), eg[1]) == zr,
            "the (1,2) certificate equation",
        )?;
        let w = r.add(r.mul(c, xg[1]), eg[3]);
        let z2 = scan(3)
            .into_iter()
            .find(|&z| is_quasi_invertible(r, r.add(d, r.mul(w, z))))
            .ok_or(QbrError::StageWitnessNotFound("z2"))?;
        let u = st.mat([one, r.mul(xg[1], z2), zr, one]);
        let cm = st.mat([zr, zr, zr, z2]);
        st.step("normalize-d", u, one_s, cm, Some(z2))?;
        let [a3, b3, c3, d3] = st.dec(st.a);
        inv("normalize-d", d3 == r.add(d, r.mul(w, z2)), "the (2,2) entry moved to d + (cb'+h)z2")?;
        inv("normalize-d", is_quasi_invertible(r, d3), "the moved (2,2) entry is quasi-invertible")?;
        inv("normalize-d", a3 == a && c3 == c, "the first column is untouched")?;
        inv("normalize-d", r.mul(x, b3) == zr && r.mul3(a3, x, b3) == zr, "xb = 0 and axb = 0 survive the move")?;
    }

    // Stage 4: conjugate for the quasi-inverse y of d. The (1,1) entry is
    // dragged to a - byc, which is still quasi-inverted by x: with cx = 0
    // it is the Thm-2.3 family member of (x, a) for alpha = -byc.
    let y = {
        let [a, b, c, d] = st.dec(st.a);
        let yw = find_qinv(r, d, &scan(4)).ok_or(QbrError::StageWitnessNotFound("y"))?;
        let y = yw.v;
        let u = st.mat([one, zr, r.neg(r.mul(y, c)), one]);
        let v = st.mat([one, r.neg(r.mul(b, y)), zr, one]);
        st.step("conjugate-d", u, v, zero_s, None)?;
        let [a4, b4, c4, d4] = st.dec(st.a);
        inv("conjugate-d", d4 == d, "the (2,2) entry survives the conjugation")?;
        inv("conjugate-d", b4 == r.sub(b, r.mul3(b, y, d)), "b moved to b(1-yd)")?;
        inv("conjugate-d", c4 == r.sub(c, r.mul3(d, y, c)), "c moved to (1-dy)c")?;
        inv("conjugate-d", a4 == r.sub(a, r.mul3(b, y, c)), "the (1,1) entry moved to a - byc")?;
        let fam = quasi_inverse_family(r, &QIWitness { u: x, v: a }, r.neg(r.mul3(b, y, c)), zr)?;
        inv("conjugate-d", fam.v_prime == a4 && fam.all_hold(), "a - byc is a quasi-inverse family member over x")?;
        inv("conjugate-d", QIWitness { u: a4, v: x }.verify(r), "x remains a quasi-inverse of the (1,1) entry")?;
        inv("conjugate-d", r.mul(x, a4) == r.mul(x, a) && r.mul(a4, x) == r.mul(a, x), "xa and ax are unchanged")?;
        inv("conjugate-d", r.mul(b4, y) == zr, "by = 0")?;
        inv("conjugate-d", r.mul(y, c4) == zr, "yc = 0")?;
        inv("conjugate-d", r.mul3(b4, y, d4) == zr, "byd = 0")?;
        inv("conjugate-d", r.mul3(d4, y, c4) == zr, "dyc = 0")?;
        inv("conjugate-d", r.mul3(a4, x, b4) == zr && r.mul3(c4, x, a4) == zr, "axb = 0 and cxa = 0 survive")?;
        inv("conjugate-d", r.mul(c4, x) == zr && r.mul(x, b4) == zr, "cx = 0 and xb = 0 survive")?;
        y
    };

    // Stage 5: move b inside the corner (1-ax)R(1-yd). Zero corner forces
    // b = 0; otherwise the corner is QB (Lemma 6.1 applied to the base),
    // and the (1,1) equation cut to the corner yields z3 with b + pepz3
    // corner-quasi-invertible. The (2,2) entry shifts by gz3 and stays
    // quasi-inverted by y as a family member.
    {
        let [a, b, c, d] = st.dec(st.a);
        let p = r.one_minus_mul(a, x);
        let q = r.one_minus_mul(y, d);
        inv("b-corner", b == r.mul3(p, b, q), "b lies in the (1-ax)R(1-yd) corner")?;
        let corner = skew_corner(r, p, q);
        if corner.len() == 1 {
            inv("b-corner", b == zr, "a zero corner forces b = 0")?;
            st.step("b-corner", one_s, one_s, zero_s, None)?;
        } else {
            let xg = st.dec(st.x);
            let eg = st.dec(st.e);
            let w3 = r.mul3(p, eg[0], p);
            inv("b-corner", r.add(r.mul3(b, xg[2], p), w3) == p, "the (1,1) equation cut to the corner")?;
            let cands = shuffled(corner.to_vec(), order, 5);
            let (z3, b_moved, _) = corner_step(r, p, q, b, w3, &cands)?
                .ok_or(QbrError::StageWitnessNotFound("z3"))?;
            let g = eg[2];
            let u = st.mat([one, r.neg(r.mul3(x, eg[0], z3)), zr, one]);
            let cm = st.mat([zr, z3, zr, zr]);
            st.step("b-corner", u, one_s, cm, Some(z3))?;
            let [a5, b5, c5, d5] = st.dec(st.a);
            inv("b-corner", a5 == a && c5 == c, "the first column is untouched")?;
            inv("b-corner", b5 == b_moved, "b moved to b + pepz3")?;
            inv("b-corner", d5 == r.add(d, r.mul(g, z3)), "the (2,2) entry moved to d + gz3")?;
            let fam = quasi_inverse_family(r, &QIWitness { u: y, v: d }, r.mul(g, z3), zr)?;
            inv("b-corner", fam.v_prime == d5 && fam.all_hold(), "d + gz3 is a quasi-inverse family member over y")?;
            inv("b-corner", QIWitness { u: d5, v: y }.verify(r), "y remains a quasi-inverse of the (2,2) entry")?;
            inv("b-corner", r.mul(d5, y) == r.mul(d, y), "dy is unchanged")?;
            inv("b-corner", r.mul(b5, y) == zr && r.mul(x, b5) == zr, "by = 0 and xb = 0 survive")?;
            inv("b-corner", r.mul3(a5, x, b5) == zr && r.mul3(b5, y, d5) == zr, "axb = 0 and byd = 0 survive")?;
            inv("b-corner", r.mul3(d5, y, c5) == zr && r.mul(c5, x) == zr, "dyc = 0 and cx = 0 survive")?;
        }
    }

    // Stage 6: the mirror image for c inside (1-dy)R(1-xa), via the (2,2)
    // equation. The (1,1) entry shifts by fz4 and keeps x as quasi-inverse
    // (family member again); ax is unchanged since z4x = 0.
    {
        let [a, b, c, d] = st.dec(st.a);
        let p2 = r.one_minus_mul(d, y);
        let q2 = r.one_minus_mul(x, a);
        inv("c-corner", c == r.mul3(p2, c, q2), "c lies in the (1-dy)R(1-xa) corner")?;
        let corner = skew_corner(r, p2, q2);
        if corner.len() == 1 {
            inv("c-corner", c == zr, "a zero corner forces c = 0")?;
            st.step("c-corner", one_s, one_s, zero_s, None)?;
        } else {
            let xg = st.dec(st.x);
            let eg = st.dec(st.e);
            let w4 = r.mul3(p2, eg[3], p2);
            inv("c-corner", r.add(r.mul3(c, xg[1], p2), w4) == p2, "the (2,2) equation cut to the corner")?;
            let cands = shuffled(corner.to_vec(), order, 6);
            let (z4, c_moved, _) = corner_step(r, p2, q2, c, w4, &cands)?
                .ok_or(QbrError::StageWitnessNotFound("z4"))?;
            let f = eg[1];
            let u = st.mat([one, zr, r.neg(r.mul3(y, eg[3], z4)), one]);
            let cm = st.mat([zr, zr, z4, zr]);
            st.step("c-corner", u, one_s, cm, Some(z4))?;
            let [a6, b6, c6, d6] = st.dec(st.a);
            inv("c-corner", b6 == b && d6 == d, "the second column is untouched")?;
            inv("c-corner", c6 == c_moved, "c moved to c + php z4")?;
            inv("c-corner", a6 == r.add(a, r.mul(f, z4)), "the (1,1) entry moved to a + fz4")?;
            let fam = quasi_inverse_family(r, &QIWitness { u: x, v: a }, r.mul(f, z4), zr)?;
            inv("c-corner", fam.v_prime == a6 && fam.all_hold(), "a + fz4 is a quasi-inverse family member over x")?;
            inv("c-corner", QIWitness { u: a6, v: x }.verify(r), "x remains a quasi-inverse of the (1,1) entry")?;
            inv("c-corner", r.mul(a6, x) == r.mul(a, x), "ax is unchanged")?;
            inv("c-corner", r.mul(x, a6) == r.mul(x, a), "xa is unchanged")?;
            inv("c-corner", r.mul(c6, x) == zr && r.mul(y, c6) == zr, "cx = 0 and yc = 0 survive")?;
            inv("c-corner", r.mul(b6, y) == zr && r.mul(x, b6) == zr, "by = 0 and xb = 0 survive")?;
            inv("c-corner", r.mul3(a6, x, b6) == zr && r.mul3(c6, x, a6) == zr, "axb = 0 and cxa = 0 survive")?;
            inv("c-corner", r.mul3(d6, y, c6) == zr && r.mul3(b6, y, d6) == zr, "dyc = 0 and byd = 0 survive")?;
        }
    }

    // Assembly: quasi-inverses s, t of b and c in the final corners give
    // the 2x2 quasi-inverse (x t; s y); then the recorded steps pull the
    // witness back onto the original row.
    let [a, b, c, d] = st.dec(st.a);
    let p = r.one_minus_mul(a, x);
    let q = r.one_minus_mul(y, d);
    let p2 = r.one_minus_mul(d, y);
    let q2 = r.one_minus_mul(x, a);
    let s_w = if b == zr {
        zr
    } else {
        skew_corner_qinv(r, p, q, b)?.ok_or(QbrError::StageWitnessNotFound("s"))?
    };
    let t_w = if c == zr {
        zr
    } else {
        skew_corner_qinv(r, p2, q2, c)?.ok_or(QbrError::StageWitnessNotFound("t"))?
    };
    let z_mat = st.mat([x, t_w, s_w, y]);
    let a_fin = st.a;
    inv("assemble", QIWitness { u: a_fin, v: z_mat }.verify(s), "the assembled 2x2 quasi-inverse verifies")?;

    let w_fold = st.fold_back();
    let reducer = s.mul(row.y, w_fold);
    let result = s.add(row.a, s.mul(row.b, reducer));
    let u_inv = s
        .inverse(st.u_acc)
        .ok_or_else(|| QbrError::StageInvariantFailed("assemble", "the accumulated u-product is not a unit".into()))?;
    let v_inv = s
        .inverse(st.v_acc)
        .ok_or_else(|| QbrError::StageInvariantFailed("assemble", "the accumulated v-product is not a unit".into()))?;
    inv("assemble", result == s.mul3(v_inv, a_fin, u_inv), "the folded reducer matches the accumulated transforms")?;
    let witness = QIWitness { u: result, v: s.mul3(st.u_acc, z_mat, st.v_acc) };
    inv("assemble", witness.verify(s), "the pulled-back witness certifies the original row")?;
    Ok(RowReduction {
        reducer,
        result,
        witness,
        reduced_matrix: a_fin,
        reduced_quasi_inverse: z_mat,
        trace: st.trace,
    })
}

/// Oracle: scan all y ascending for a + b·y quasi-invertible. Existence
/// must agree with `reduce_row_m2` (the witnesses may differ).
pub fn brute_force_reducer(s: &FiniteRing, row: &UnimodularRow) -> Result<Option<(Elem, QIWitness)>> {
    row.same_ring(s)?;
    for y in s.elements() {
        if let Some(w) = quasi_invertible(s, s.add(row.a, s.mul(row.b, y)))? {
            return Ok(Some((y, w)));
        }
    }
    Ok(None)
}

/// Both closure conditions of Definition 5.2 for the skew corner pRq,
/// evaluated by direct quantifier scan. `zero` flags the degenerate
/// corner, which is never counted as a QB-corner.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct QbCornerReport {
    pub corner_size: usize,
    pub zero: bool,
    pub cl_holds: bool,
    pub cr_holds: bool,
}

impl QbCornerReport {
    pub fn is_qb_corner(&self) -> bool {
        !self.zero && self.cl_holds && self.cr_holds
    }
}

/// Decides whether pRq is a QB-corner: both relative closures must reach
/// all of pRq. The two conditions are checked independently; neither is
/// assumed to imply the other.
pub fn qb_corner_check(r: &FiniteRing, p: Elem, q: Elem) -> Result<QbCornerReport> {
    r.one().ok_or(QbrError::NonUnitalRing)?;
    for e in [p, q] {
        r.check_elem(e)?;
        if !r.is_idempotent(e) {
            return Err(QbrError::NotIdempotent(e.0));
        }
    }
    let corner = skew_corner(r, p, q);
    let back = skew_corner(r, q, p);
    let zero = corner.len() == 1;
    let mut qinv = r.empty_set();
    for m in corner.iter() {
        let hit = if zero {
            centrally_orthogonal(r, p, q)
        } else {
            skew_corner_qinv(r, p, q, m)?.is_some()
        };
        if hit {
            qinv.insert(m);
        }
    }
    let reaches = |from_left: bool| -> bool {
        corner.iter().all(|a| {
            back.iter().all(|xc| {
                let bb = if from_left {
                    r.sub(q, r.mul(xc, a))
                } else {
                    r.sub(p, r.mul(a, xc))
                };
                corner.iter().any(|yc| {
                    let moved = if from_left { r.add(a, r.mul(yc, bb)) } else { r.add(a, r.mul(bb, yc)) };
                    qinv.contains(moved)
                })
            })
        })
    };
    Ok(QbCornerReport {
        corner_size: corner.len(),
        zero,
        cl_holds: reaches(true),
        cr_holds: reaches(false),
    })
}

/// The corner dichotomy built from two quasi-invertible elements: either
/// (1-ux)R(1-yv) is zero, or it is a QB-corner.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Lemma61Report {
    pub p: Elem,
    pub q: Elem,
    pub zero: bool,
    pub corner: Option<QbCornerReport>,
}

impl Lemma61Report {
    pub fn conclusion_holds(&self) -> bool {
        self.zero || self.corner.map(|c| c.is_qb_corner()).unwrap_or(false)
    }
}

/// Checks the hypothesis uv + (1-ux)R(1-yv) ⊆ cl(R_q⁻¹) ∩ cr(R_q⁻¹)
/// honestly elementwise, then reports which branch of the dichotomy the
/// corner lands in. x and y must be quasi-inverses of u and v.
pub fn lemma61_corner(r: &FiniteRing, u: Elem, x: Elem, v: Elem, y: Elem) -> Result<Lemma61Report> {
    for e in [u, x, v, y] {
        r.check_elem(e)?;
    }
    if !(QIWitness { u, v: x }).verify(r) {
        return Err(QbrError::PreconditionViolated("x is not a quasi-inverse of u".into()));
    }
    if !(QIWitness { u: v, v: y }).verify(r) {
        return Err(QbrError::PreconditionViolated("y is not a quasi-inverse of v".into()));
    }
    let p = r.one_minus_mul(u, x);
    let q = r.one_minus_mul(y, v);
    let corner = skew_corner(r, p, q);
    let qset = quasi_invertible_set(r)?;
    let uv = r.mul(u, v);
    for w in corner.iter() {
        let e = r.add(uv, w);
        if !in_cl(r, &qset, e) || !in_cr(r, &qset, e) {
            return Err(QbrError::PreconditionViolated(format!(
                "uv + {w} escapes cl(R_q) or cr(R_q)"
            )));
        }
    }
    if corner.len() == 1 {
        return Ok(Lemma61Report { p, q, zero: true, corner: None });
    }
    Ok(Lemma61Report { p, q, zero: false, corner: Some(qb_corner_check(r, p, q)?) })
}

/// All admissible (u, x, v, y) quadruples for `lemma61_corner`: both pairs
/// quasi-inverse, scanning the quasi-invertible elements with their
/// canonical witnesses only.
pub fn lemma61_admissible(r: &FiniteRing) -> Result<Vec<(Elem, Elem, Elem, Elem)>> {
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    for e in r.elements() {
        if let Some(w) = quasi_invertible(r, e)? {
            pairs.push((w.u, w.v));
        }
    }
    for &(u, x) in &pairs {
        for &(v, y) in &pairs {
            out.push((u, x, v, y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::is_qb_ring;
    use crate::ring::{build_ring, matrix_ring, RingSpec};
    use rand::RngCore;

    fn zn(n: u32) -> FiniteRing {
        build_ring(&RingSpec::Zn { n }).unwrap()
    }

    fn f2() -> FiniteRing {
        build_ring(&RingSpec::Gf { q: 2 }).unwrap()
    }

    fn m2f2() -> FiniteRing {
        build_ring(&RingSpec::Matrix { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) }).unwrap()
    }

    fn t2f2() -> FiniteRing {
        build_ring(&RingSpec::UpperTriangular { size: 2, base: Box::new(RingSpec::Gf { q: 2 }) })
            .unwrap()
    }

    fn e(r: &FiniteRing, g: [u32; 4]) -> Elem {
        Elem(matrix_encode(r.order(), &g))
    }

    /// Every right unimodular row over s, each with its first certificate.
    fn all_rows(s: &FiniteRing) -> Vec<UnimodularRow> {
        let mut out = Vec::new();
        for a in s.elements() {
            for b in s.elements() {
                let cert = s.elements().find_map(|x| {
                    s.elements()
                        .find(|&y| s.add(s.mul(a, x), s.mul(b, y)) == s.one_unchecked())
                        .map(|y| (x, y))
                });
                if let Some((x, y)) = cert {
                    out.push(UnimodularRow::new(s, a, b, x, y).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn row_constructor_checks_certificate() {
        let s = m2f2();
        let one = s.one_unchecked();
        assert!(UnimodularRow::new(&s, one, s.zero(), one, s.zero()).is_ok());
        let err = UnimodularRow::new(&s, s.zero(), s.zero(), one, one).unwrap_err();
        assert!(matches!(err, QbrError::PreconditionViolated(_)));
    }

    #[test]
    fn transform_identity_fixes_row() {
        let s = m2f2();
        let one = s.one_unchecked();
        let row = UnimodularRow::new(&s, one, s.zero(), one, s.zero()).unwrap();
        let same = row_transform(&s, &row, one, one, s.zero()).unwrap();
        assert_eq!(same, row);
    }

    #[test]
    fn transform_rejects_non_units() {
        let s = m2f2();
        let one = s.one_unchecked();
        let row = UnimodularRow::new(&s, one, s.zero(), one, s.zero()).unwrap();
        let err = row_transform(&s, &row, s.zero(), one, s.zero()).unwrap_err();
        assert_eq!(err, QbrError::NotAUnit(0));
    }

    #[test]
    fn transform_certificate_stays_exact_over_m2z6() {
        let base = zn(6);
        let s = matrix_ring(&base, 2).unwrap();
        let one = base.one_unchecked();
        let units: Vec<Elem> = s.units().to_vec();
        let row = UnimodularRow::new(
            &s,
            e(&base, [2, 1, 3, 0]),
            e(&base, [one.0, 0, 0, one.0]),
            s.zero(),
            s.one_unchecked(),
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(40);
        for _ in 0..25 {
            let u = units[(rng.next_u32() as usize) % units.len()];
            let v = units[(rng.next_u32() as usize) % units.len()];
            let c = Elem(rng.next_u32() % s.order() as u32);
            // the constructor inside row_transform re-checks a*x + b*y = 1
            let moved = row_transform(&s, &row, u, v, c).unwrap();
            let back = row_transform(
                &s,
                &moved,
                s.inverse(u).unwrap(),
                s.inverse(v).unwrap(),
                s.neg(s.mul(c, s.inverse(u).unwrap())),
            )
            .unwrap();
            assert_eq!(back, row);
        }
    }

    #[test]
    fn transform_preserves_reducibility_both_ways() {
        let base = f2();
        let s = matrix_ring(&base, 2).unwrap();
        let units: Vec<Elem> = s.units().to_vec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for row in all_rows(&s).into_iter().step_by(7) {
            let u = units[(rng.next_u32() as usize) % units.len()];
            let v = units[(rng.next_u32() as usize) % units.len()];
            let c = Elem(rng.next_u32() % s.order() as u32);
            let moved = row_transform(&s, &row, u, v, c).unwrap();
            let before = brute_force_reducer(&s, &row).unwrap().is_some();
            let after = brute_force_reducer(&s, &moved).unwrap().is_some();
            assert_eq!(before, after, "reducibility must be invariant under row transforms");
        }
    }

    #[test]
    fn reduce_trivial_row() {
        let base = f2();
        let s = matrix_ring(&base, 2).unwrap();
        let one = s.one_unchecked();
        let row = UnimodularRow::new(&s, one, s.zero(), one, s.zero()).unwrap();
        let red = reduce_row_m2(&base, &s, &row).unwrap();
        assert_eq!(red.reducer, s.zero());
        assert_eq!(red.result, one);
        assert_eq!(red.witness, QIWitness { u: one, v: one });
        assert_eq!(red.trace.len(), 6);
        assert!(red.trace.iter().all(|t| t.stage.len() > 1));
    }

    #[test]
    fn reduce_e11_complement_row() {
        let base = f2();
        let s = matrix_ring(&base, 2).unwrap();
        let a = e(&base, [1, 0, 0, 0]);
        let b = e(&base, [0, 0, 0, 1]);
        let row = UnimodularRow::new(&s, a, b, a, b).unwrap();
        let red = reduce_row_m2(&base, &s, &row).unwrap();
        assert!(red.witness.verify(&s));
        assert_eq!(red.result, s.add(a, s.mul(b, red.reducer)));
        let brute = brute_force_reducer(&s, &row).unwrap();
        assert!(brute.is_some(), "oracle must also find a reducer");
    }

    #[test]
    fn reduce_all_rows_over_m2f2_agrees_with_oracle() {
        let base = f2();
        let s = matrix_ring(&base, 2).unwrap();
        let rows = all_rows(&s);
        assert!(rows.len() > 100, "M2(F2) has many unimodular rows");
        for row in rows {
            let red = reduce_row_m2(&base, &s, &row).unwrap();
            assert!(red.witness.verify(&s));
            assert_eq!(red.result, s.add(row.a(), s.mul(row.b(), red.reducer)));
            assert!(brute_force_reducer(&s, &row).unwrap().is_some());
        }
    }

    #[test]
    fn reduce_sampled_rows_over_m2z4_agrees_with_oracle() {
        let base = zn(4);
        let s = matrix_ring(&base, 2).unwrap();
        let one = s.one_unchecked();
        let mut i = 0u64;
        for a in s.elements().step_by(37) {
            for x in s.elements().step_by(29) {
                let b = s.sub(one, s.mul(a, x));
                let row = UnimodularRow::new(&s, a, b, x, one).unwrap();
                let order = if i % 2 == 0 { WitnessOrder::Ascending } else { WitnessOrder::Seeded(i) };
                let red = reduce_row_m2_ordered(&base, &s, &row, order).unwrap();
                assert!(red.witness.verify(&s));
                assert!(brute_force_reducer(&s, &row).unwrap().is_some());
                i += 1;
            }
        }
        assert!(i > 50);
    }

    #[test]
    fn reduce_is_robust_to_witness_order() {
        let base = f2();
        let s = matrix_ring(&base, 2).unwrap();
        for (i, row) in all_rows(&s).into_iter().enumerate().step_by(11) {
            let red = reduce_row_m2_ordered(&base, &s, &row, WitnessOrder::Seeded(i as u64)).unwrap();
            assert!(red.witness.verify(&s));
        }
    }

    #[test]
    fn reduce_random_rows_over_m2z6() {
        let base = zn(6);
        let s = matrix_ring(&base, 2).unwrap();
        let one = s.one_unchecked();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for i in 0..25 {
            // rows (a, 1 - a*x) carry the certificate (x, 1)
            let a = Elem(rng.next_u32() % s.order() as u32);
            let x = Elem(rng.next_u32() % s.order() as u32);
            let b = s.sub(one, s.mul(a, x));
            let row = UnimodularRow::new(&s, a, b, x, one).unwrap();
            let order = if i % 2 == 0 { WitnessOrder::Ascending } else { WitnessOrder::Seeded(i) };
            let red = reduce_row_m2_ordered(&base, &s, &row, order).unwrap();
            assert!(red.witness.verify(&s));
            assert_eq!(red.result, s.add(row.a(), s.mul(row.b(), red.reducer)));
        }
    }

    #[test]
    fn reduce_over_noncommutative_base_at_the_cap() {
        let base = t2f2();
        let s = matrix_ring(&base, 2).unwrap();
        assert_eq!(s.order(), 4096);
        let one = s.one_unchecked();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..3 {
            let a = Elem(rng.next_u32() % s.order() as u32);
            let x = Elem(rng.next_u32() % s.order() as u32);
            let b = s.sub(one, s.mul(a, x));
            let row = UnimodularRow::new(&s, a, b, x, one).unwrap();
            let red = reduce_row_m2(&base, &s, &row).unwrap();
            assert!(red.witness.verify(&s));
        }
    }

    #[test]
    fn reduce_rejects_foreign_or_mismatched_rings() {
        let base = f2();
        let s = matrix_ring(&base, 2).unwrap();
        let one = s.one_unchecked();
        let row = UnimodularRow::new(&s, one, s.zero(), one, s.zero()).unwrap();
        let other = zn(16);
        assert!(matches!(
            reduce_row_m2(&base, &other, &row).unwrap_err(),
            QbrError::PreconditionViolated(_)
        ));
        let z4 = zn(4);
        let s4 = matrix_ring(&z4, 2).unwrap();
        assert_eq!(reduce_row_m2(&z4, &s4, &row).unwrap_err(), QbrError::DifferentRings);
    }

    #[test]
    fn matrix_ring_over_qb_base_is_qb() {
        for base in [f2(), zn(3), zn(4)] {
            let s = matrix_ring(&base, 2).unwrap();
            assert!(is_qb_ring(&s).unwrap().holds, "M2({}) must be QB", base.label());
        }
    }

    #[test]
    fn corner_step_moves_into_a_nonzero_skew_corner() {
        let r = m2f2();
        let p = e(&f2(), [1, 0, 0, 0]);
        let q = e(&f2(), [0, 0, 0, 1]);
        let corner = skew_corner(&r, p, q);
        assert_eq!(corner.len(), 2, "pRq = {{0, e01}}");
        let cands = corner.to_vec();
        let coeff = p;
        // target 0 needs a genuine move: z = e01 with 0 + p*z = e01
        let (z, moved, s_w) = corner_step(&r, p, q, r.zero(), coeff, &cands).unwrap().unwrap();
        assert_ne!(moved, r.zero());
        assert_eq!(moved, r.mul(coeff, z));
        assert_eq!(r.mul3(moved, s_w, moved), moved);
        // target e01 is already corner-quasi-invertible, so z = 0 works
        let target = e(&f2(), [0, 1, 0, 0]);
        let (z2, moved2, _) = corner_step(&r, p, q, target, coeff, &cands).unwrap().unwrap();
        assert_eq!(z2, r.zero());
        assert_eq!(moved2, target);
    }

    #[test]
    fn qb_corner_check_on_nonzero_skew_corner() {
        let r = m2f2();
        let p = e(&f2(), [1, 0, 0, 0]);
        let q = e(&f2(), [0, 0, 0, 1]);
        let rep = qb_corner_check(&r, p, q).unwrap();
        assert!(!rep.zero);
        assert!(rep.cl_holds && rep.cr_holds && rep.is_qb_corner());
        // cross-check: 1-p = uv and 1-q = vu for u = e10, v = e01, and
        // u + pRq stays inside both closures, as the corner criterion says
        let u = e(&f2(), [0, 0, 1, 0]);
        let v = e(&f2(), [0, 1, 0, 0]);
        assert_eq!(r.mul(u, v), r.sub(r.one_unchecked(), p));
        assert_eq!(r.mul(v, u), r.sub(r.one_unchecked(), q));
        let qset = quasi_invertible_set(&r).unwrap();
        for w in skew_corner(&r, p, q).iter() {
            let t = r.add(u, w);
            assert!(in_cl(&r, &qset, t) && in_cr(&r, &qset, t));
        }
    }

    #[test]
    fn qb_corner_check_on_unital_corner() {
        let r = m2f2();
        let p = e(&f2(), [1, 0, 0, 0]);
        let rep = qb_corner_check(&r, p, p).unwrap();
        assert!(rep.is_qb_corner());
        // pRp is the field F2 here, and 1-p + pRp sits inside cl(R_q)
        let qset = quasi_invertible_set(&r).unwrap();
        for w in skew_corner(&r, p, p).iter() {
            assert!(in_cl(&r, &qset, r.add(r.sub(r.one_unchecked(), p), w)));
        }
    }

    #[test]
    fn qb_corner_check_detects_a_failing_corner() {
        let r = t2f2();
        // p = e11, q = e22 in the triangular ring: pRq = {0, e12} but
        // qRp = 0, so nothing in the corner is quasi-invertible
        let p = Elem(matrix_encode(2, &[1, 0, 0]));
        let q = Elem(matrix_encode(2, &[0, 0, 1]));
        assert!(r.is_idempotent(p) && r.is_idempotent(q));
        let rep = qb_corner_check(&r, p, q).unwrap();
        assert_eq!(rep.corner_size, 2);
        assert!(!rep.zero);
        assert!(!rep.cl_holds && !rep.cr_holds && !rep.is_qb_corner());
    }

    #[test]
    fn qb_corner_check_rejects_non_idempotents() {
        let r = zn(4);
        let err = qb_corner_check(&r, Elem(3), Elem(1)).unwrap_err();
        assert_eq!(err, QbrError::NotIdempotent(3));
    }

    #[test]
    fn lemma61_trivial_corner_is_zero() {
        let r = zn(6);
        let one = r.one_unchecked();
        let rep = lemma61_corner(&r, one, one, one, one).unwrap();
        assert!(rep.zero && rep.corner.is_none() && rep.conclusion_holds());
    }

    #[test]
    fn lemma61_rejects_non_quasi_inverses() {
        let r = m2f2();
        let one = r.one_unchecked();
        let p = e(&f2(), [1, 0, 0, 0]);
        let err = lemma61_corner(&r, p, p, one, one).unwrap_err();
        assert!(matches!(err, QbrError::PreconditionViolated(_)));
    }

    #[test]
    fn lemma61_sweep_small_rings() {
        // over finite rings every quasi-invertible element is invertible,
        // so both corner factors vanish and the dichotomy lands on zero
        for r in [zn(4), zn(6), t2f2(), m2f2()] {
            for (u, x, v, y) in lemma61_admissible(&r).unwrap() {
                let rep = lemma61_corner(&r, u, x, v, y).unwrap();
                assert!(rep.conclusion_holds(), "dichotomy must hold in {}", r.label());
                assert!(rep.zero, "finite collapse forces zero corners in {}", r.label());
            }
        }
    }

    #[test]
    fn brute_force_oracle_first_hit_on_invertible_row() {
        // a row with b = 0 reduces exactly when a is quasi-invertible;
        // over M2(F2) a unimodular (a, 0) forces a invertible, so the
        // oracle's first hit is y = 0
        let base = f2();
        let s = matrix_ring(&base, 2).unwrap();
        let one = s.one_unchecked();
        let row = UnimodularRow::new(&s, one, s.zero(), one, s.zero()).unwrap();
        let (y, w) = brute_force_reducer(&s, &row).unwrap().unwrap();
        assert_eq!(y, s.zero());
        assert!(w.verify(&s));
    }

    #[test]
    fn stage_trace_is_deterministic_and_complete() {
        let base = zn(4);
        let s = matrix_ring(&base, 2).unwrap();
        let one = s.one_unchecked();
        let a = e(&base, [2, 1, 0, 1]);
        let x = e(&base, [1, 3, 2, 1]);
        let b = s.sub(one, s.mul(a, x));
        let row = UnimodularRow::new(&s, a, b, x, one).unwrap();
        let red1 = reduce_row_m2(&base, &s, &row).unwrap();
        let red2 = reduce_row_m2(&base, &s, &row).unwrap();
        assert_eq!(red1.trace, red2.trace);
        assert_eq!(red1.reducer, red2.reducer);
        let stages: Vec<&str> = red1.trace.iter().map(|t| t.stage).collect();
        assert_eq!(
            stages,
            vec!["normalize-a", "conjugate-a", "normalize-d", "conjugate-d", "b-corner", "c-corner"]
        );
    }
}
