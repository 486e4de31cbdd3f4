//! Structural checkers over concrete groups: the decomposition statements
//! for the order-8p and twice-odd families, the order-8 catalogue, the
//! `C3 x C3^k` statements, and Schur-group verdicts.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{factorize, is_prime};
use crate::constructions::{
    cyclotomic, detect_cyclotomic, detect_generalized_wreath, detect_otimes_complemented,
    detect_tensor, generalized_wreath, group_ring, parse_automorphism, trivial_sring, wreath,
    Decomposition,
};
use crate::constructions::detect::{class_radicals, is_internal_tensor, is_section_wreath};
use crate::enumeration::{canonical_form, enumerate_srings, EnumerationResult};
use crate::error::{Error, Result};
use crate::group::{
    all_subgroups, hall_complement, quotient_group, sylow_subgroup, AbelianGroup, Section,
    Subgroup,
};
use crate::perm::PermGroup;
use crate::schurity::is_schurian;
use crate::sring::{radical_of_set, SRing};

/// Hex SHA-256 of the canonical form's JSON; equal for Cayley-isomorphic rings.
pub fn sring_id(a: &SRing) -> Result<String> {
    let c = canonical_form(a)?;
    let json = serde_json::to_string(&c.to_json())?;
    Ok(hex::encode(Sha256::digest(json.as_bytes())))
}

/// Outcome of one statement on one S-ring.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub statement_id: String,
    pub group: Vec<u32>,
    pub sring_id: String,
    pub holds: bool,
    pub disjunct: Option<String>,
    pub witnesses: Vec<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    fn new(statement: &str, a: &SRing) -> Result<Verdict> {
        Ok(Verdict {
            statement_id: statement.to_string(),
            group: a.group().factors().to_vec(),
            sring_id: sring_id(a)?,
            holds: false,
            disjunct: None,
            witnesses: Vec::new(),
            note: None,
        })
    }

    fn matched(mut self, disjunct: impl Into<String>, witnesses: Vec<Decomposition>) -> Verdict {
        self.holds = true;
        self.disjunct = Some(disjunct.into());
        self.witnesses = witnesses;
        self
    }

    /// Every witness re-validates against `a`.
    pub fn witnesses_revalidate(&self, a: &SRing) -> Result<bool> {
        for w in &self.witnesses {
            if !w.revalidate(a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Prime -> exponents of the primary cyclic factors, descending.
pub fn primary_parts(g: &AbelianGroup) -> BTreeMap<u64, Vec<u32>> {
    let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &f in g.invariants() {
        for (p, e) in factorize(f as u64) {
            parts.entry(p).or_default().push(e);
        }
    }
    for v in parts.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
    }
    parts
}

/// The two group families covered by the decomposition statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `C4 x C2p` (`cyclic_sylow = true`) or `E8 x Cp`, `p` an odd prime.
    EightP { p: u64, cyclic_sylow: bool },
    /// `C6 x C3^k`.
    SixByThreePower { k: u32 },
    /// `E9 x C2q`, `q` a prime.
    NineByTwoPrime { q: u64 },
}

pub fn family_of(g: &AbelianGroup) -> Option<Family> {
    let parts = primary_parts(g);
    let get = |p: u64| parts.get(&p).cloned().unwrap_or_default();
    let odd_others: Vec<u64> = parts.keys().copied().filter(|&p| p != 2 && p != 3).collect();
    // order 8p
    if parts.len() == 2 {
        let two = get(2);
        let p = *parts.keys().find(|&&p| p != 2).unwrap_or(&0);
        if p != 0 && get(p) == [1] && (two == [2, 1] || two == [1, 1, 1]) {
            return Some(Family::EightP {
                p,
                cyclic_sylow: two == [2, 1],
            });
        }
    }
    let (two, three) = (get(2), get(3));
    if odd_others.is_empty() && two == [1] && three.len() == 2 && three[1] == 1 {
        return Some(Family::SixByThreePower { k: three[0] });
    }
    // E9 x C2q: q = 2 gives E9 x C4, q = 3 gives E9 x C6
    if three == [1, 1] && two == [2] && odd_others.is_empty() {
        return Some(Family::NineByTwoPrime { q: 2 });
    }
    if three == [1, 1, 1] && two == [1] && odd_others.is_empty() {
        return Some(Family::NineByTwoPrime { q: 3 });
    }
    if three == [1, 1] && two == [1] && odd_others.len() == 1 && get(odd_others[0]) == [1] {
        return Some(Family::NineByTwoPrime { q: odd_others[0] });
    }
    None
}

fn require_nontrivial(a: &SRing) -> Result<()> {
    if a.is_trivial_ring() {
        Err(Error::TrivialInput)
    } else {
        Ok(())
    }
}

fn elems(h: &Subgroup) -> Vec<usize> {
    h.elements().to_vec()
}

/// First of: cyclotomic, nontrivial tensor, nontrivial generalized wreath.
fn basic_structure(a: &SRing) -> Result<Option<(&'static str, Vec<Decomposition>)>> {
    if let Some(k) = detect_cyclotomic(a)? {
        return Ok(Some(("cyclotomic", vec![Decomposition::cyclotomic(&k)?])));
    }
    if let Some((l, r)) = detect_tensor(a)? {
        return Ok(Some((
            "tensor",
            vec![Decomposition::Tensor {
                left: elems(&l),
                right: elems(&r),
            }],
        )));
    }
    if let Some(s) = detect_generalized_wreath(a)?.first() {
        return Ok(Some(("generalized_wreath", vec![Decomposition::section(s)])));
    }
    Ok(None)
}

/// Every nontrivial ring over the four families is cyclotomic, a nontrivial
/// tensor product, or a nontrivial generalized wreath product.
pub fn check_main15(a: &SRing) -> Result<Verdict> {
    if family_of(a.group()).is_none() {
        return Err(Error::WrongShape(format!("{} is outside the covered families", a.group())));
    }
    require_nontrivial(a)?;
    let v = Verdict::new("main15", a)?;
    Ok(match basic_structure(a)? {
        Some((d, w)) => v.matched(d, w),
        None => v,
    })
}

/// `A_S` for a section `S = U/L`.
pub fn section_sring(a: &SRing, s: &Section) -> Result<SRing> {
    let (au, embed) = a.restrict_with_embedding(&s.upper)?;
    let local: Vec<usize> = s
        .lower
        .elements()
        .iter()
        .map(|x| embed.iter().position(|y| y == x).expect("L <= U"))
        .collect();
    let l = Subgroup::from_elements(au.group(), &local)?;
    au.quotient_sring(&l)
}

/// Statements for `C4 x C2p` and `E8 x Cp`.
pub fn check_theorem_8p(a: &SRing) -> Result<Verdict> {
    let g = a.group();
    let Some(Family::EightP { p, .. }) = family_of(g) else {
        return Err(Error::WrongShape(format!("{g} is not C4 x C2p or E8 x Cp")));
    };
    require_nontrivial(a)?;
    let v = Verdict::new("theorem_8p", a)?;
    if let Some(k) = detect_cyclotomic(a)? {
        return Ok(v.matched("cyclotomic", vec![Decomposition::cyclotomic(&k)?]));
    }
    if let Some((l, r)) = detect_tensor(a)? {
        let w = Decomposition::Tensor {
            left: elems(&l),
            right: elems(&r),
        };
        return Ok(v.matched("tensor", vec![w]));
    }
    let h = sylow_subgroup(g, 2);
    let pp = sylow_subgroup(g, p as u32);
    let dense = a.is_dense(&h, &pp)?;
    for s in detect_generalized_wreath(a)? {
        let sec = Decomposition::section(&s);
        if s.order() <= 2 {
            return Ok(v.matched("small_section", vec![sec]));
        }
        if s.order() == 4 && !section_sring(a, &s)?.is_trivial_ring() {
            return Ok(v.matched("order4_nontrivial_section", vec![sec]));
        }
        if let Some(m) = detect_otimes_complemented(a, &s.lower, &s.upper)? {
            let w = Decomposition::OtimesComplemented {
                factor: elems(&s.lower),
                complement: elems(&m),
                within: elems(&s.upper),
            };
            return Ok(v.matched("lower_otimes_complemented", vec![sec, w]));
        }
        let (aq, q) = a.quotient_with_map(&s.lower)?;
        let sq = q.push_subgroup(&s.upper);
        if let Some(m) = detect_otimes_complemented(&aq, &sq, &Subgroup::whole(aq.group()))? {
            let w = Decomposition::QuotientOtimesComplemented {
                kernel: elems(&s.lower),
                factor: elems(&s.upper),
                complement: elems(&q.pull_subgroup(&m)),
            };
            return Ok(v.matched("section_otimes_complemented", vec![sec, w]));
        }
        let four_p = 4 * p as usize;
        if dense && s.upper.order() == four_p && g.order() / s.lower.order() == four_p {
            return Ok(v.matched("dense_4p", vec![sec]));
        }
    }
    Ok(v)
}

/// `H1`: the largest A-subgroup inside `h` (A-subgroups are closed under products).
fn largest_asubgroup_within(a: &SRing, h: &Subgroup) -> Result<Subgroup> {
    let mut best = Subgroup::trivial(a.group());
    for s in a.a_subgroups()? {
        if s.is_subgroup_of(h) {
            best = best.join(s);
        }
    }
    debug_assert!(a.is_asubgroup(&best));
    Ok(best)
}

/// Statements for `C6 x C3^k` and `E9 x C2q` (q odd); `E9 x C4` has no
/// subgroup of order 2 with odd complement and is checked in the
/// three-way form instead.
pub fn check_theorem_2odd(a: &SRing) -> Result<Verdict> {
    let g = a.group();
    let fam = family_of(g);
    match fam {
        Some(Family::SixByThreePower { .. }) | Some(Family::NineByTwoPrime { .. }) => {}
        _ => return Err(Error::WrongShape(format!("{g} is not C6 x C3^k or E9 x C2q"))),
    }
    require_nontrivial(a)?;
    let mut v = Verdict::new("theorem_2odd", a)?;
    if fam == Some(Family::NineByTwoPrime { q: 2 }) {
        return Ok(match basic_structure(a)? {
            Some((d, w)) => v.matched(format!("fallback_{d}"), w),
            None => v,
        });
    }
    let h = hall_complement(g, 2);
    let p = sylow_subgroup(g, 2);
    let h1 = largest_asubgroup_within(a, &h)?;
    let p1 = a.least_asubgroup_containing(p.elements());
    let u1 = h1.join(&p1);
    let radicals = class_radicals(a);
    v.note = Some(format!("|H1| = {}, |P1| = {}", h1.order(), p1.order()));

    if u1.is_whole() && h1.order() > 1 {
        // the star product is replaced by its tensor-or-generalized-wreath shape
        if let Some((l, r)) = detect_tensor(a)? {
            let w = Decomposition::Tensor {
                left: elems(&l),
                right: elems(&r),
            };
            return Ok(v.matched("star_replaced_tensor", vec![w]));
        }
        if let Some(s) = detect_generalized_wreath(a)?.first() {
            return Ok(v.matched("star_replaced_wreath", vec![Decomposition::section(s)]));
        }
    }
    if h1.order() > 1 {
        let (ah1, _) = a.restrict_with_embedding(&h1)?;
        let q = quotient_group(g, &h1);
        if let Ok(w) = wreath(&ah1, &trivial_sring(q.group()), g, &h1) {
            if w == *a {
                let wit = Decomposition::Wreath { subgroup: elems(&h1) };
                return Ok(v.matched("wreath_over_h1", vec![wit]));
            }
        }
    }
    let upper = Section {
        upper: u1.clone(),
        lower: p1.clone(),
    };
    let upper_wreath = upper.is_nontrivial() && is_section_wreath(a, &upper, &radicals);
    if upper_wreath {
        if let Some(m) = detect_otimes_complemented(a, &p1, &u1)? {
            let w = Decomposition::OtimesComplemented {
                factor: elems(&p1),
                complement: elems(&m),
                within: elems(&u1),
            };
            return Ok(v.matched("h1p1_wreath_otimes", vec![Decomposition::section(&upper), w]));
        }
        let lower = Section {
            upper: h1.clone(),
            lower: h1.intersection(&p1),
        };
        if lower.is_nontrivial() && is_section_wreath(a, &lower, &radicals) {
            return Ok(v.matched(
                "double_wreath",
                vec![Decomposition::section(&upper), Decomposition::section(&lower)],
            ));
        }
    }
    Ok(v)
}

/// Statements for `C3 x C3^k`, `k >= 2`.
pub fn check_lemma_c3c3k(a: &SRing) -> Result<Verdict> {
    let rad = a.sring_radical_p3k()?;
    require_nontrivial(a)?;
    let g = a.group();
    let v = Verdict::new("lemma_c3c3k", a)?;
    let big = g.order() / 3;
    if rad.is_trivial() {
        let subs = a.a_subgroups()?;
        for l in subs.iter().filter(|s| s.order() == 3) {
            for u in subs.iter().filter(|s| s.order() == big) {
                if is_internal_tensor(a, &Subgroup::whole(g), l, u) && a.restrict(u)?.is_trivial_ring() {
                    let w = Decomposition::Tensor {
                        left: elems(l),
                        right: elems(u),
                    };
                    return Ok(v.matched("trivial_radical_tensor", vec![w]));
                }
            }
        }
        if let Some(k) = detect_cyclotomic(a)? {
            return Ok(v.matched("trivial_radical_cyclotomic", vec![Decomposition::cyclotomic(&k)?]));
        }
        return Ok(v);
    }
    for s in detect_generalized_wreath(a)? {
        if a.restrict(&s.upper)?.sring_radical().is_trivial() {
            return Ok(v.matched("radical_wreath", vec![Decomposition::section(&s)]));
        }
    }
    Ok(v)
}

/// Classes avoiding `<X>` keep every noncharacteristic order-3 subgroup of `rad(X)`.
pub fn check_radical_persistence(a: &SRing) -> Result<Verdict> {
    a.sring_radical_p3k()?;
    let g = a.group();
    let mut v = Verdict::new("radical_persistence", a)?;
    let radicals = class_radicals(a);
    let order3: Vec<Subgroup> = all_subgroups(g)?
        .iter()
        .filter(|s| s.order() == 3)
        .cloned()
        .collect();
    let mut qualifying = 0usize;
    for (i, c) in a.classes().iter().enumerate() {
        let span = Subgroup::generated(g, c);
        if span.is_whole() {
            continue;
        }
        for l in order3.iter().filter(|l| l.is_subgroup_of(&radicals[i])) {
            if l.is_characteristic()? {
                continue;
            }
            qualifying += 1;
            for (j, d) in a.classes().iter().enumerate() {
                if !span.contains(d[0]) && !l.is_subgroup_of(&radicals[j]) {
                    v.note = Some(format!("class {j} outside <class {i}> misses {:?}", l.elements()));
                    return Ok(v);
                }
            }
        }
    }
    let d = if qualifying == 0 { "vacuous" } else { "persistent" };
    Ok(v.matched(d, Vec::new()))
}

/// One row of the order-8 automorphism table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableRow {
    pub name: String,
    pub generators: Vec<String>,
    pub order: usize,
    pub structure: String,
    pub structure_ok: bool,
    /// `cyc(K, H)` occurs among the enumerated classes.
    pub present: bool,
    /// `cyc(K, H)` equals the product stated in the table.
    pub identity_ok: bool,
}

/// Bucket assignment of the S-rings over an order-8 group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BucketReport {
    pub group: Vec<u32>,
    pub total_srings: usize,
    pub cayley_classes: usize,
    pub duality_classes: usize,
    /// Number of duality classes meeting each bucket.
    pub bucket_counts: [usize; 4],
    /// Duality classes in exactly one bucket.
    pub unique: usize,
    /// Classes meeting several buckets: (representative id, buckets).
    pub overlaps: Vec<(String, Vec<u8>)>,
    pub uncovered: Vec<String>,
    pub table: Vec<TableRow>,
    /// Every ring is cyclotomic (reported for `E8`).
    pub all_cyclotomic: Option<bool>,
    pub holds: bool,
}

const K1: [&str; 1] = ["(a,b)->(a,a0*b)"];
const K2: [&str; 2] = ["(a,b)->(ab,a0*b)", "(a,b)->(ab,b)"];
const K3: [&str; 2] = ["(a,b,c)->(a,ab,bc)", "(a,b,c)->(a,b,bc)"];

fn table_group(g: &AbelianGroup, gens: &[&str]) -> Result<PermGroup> {
    let perms = gens
        .iter()
        .map(|t| parse_automorphism(g, t))
        .collect::<Result<Vec<_>>>()?;
    PermGroup::new(g.order(), perms)
}

/// `ZU wr_{U/L} Z(G/L)` with `U` cyclic of order 4 and `G/L` elementary of order 4.
fn is_k1_shape(a: &SRing) -> Result<bool> {
    let g = a.group();
    for u in a.a_subgroups()?.iter().filter(|u| u.order() == 4 && u.invariants() == [4]) {
        for l in a.a_subgroups()?.iter().filter(|l| l.order() == 2 && l.is_subgroup_of(u)) {
            let q = quotient_group(g, l);
            if q.group().invariants() != [2, 2] {
                continue;
            }
            let s = Section::new(u.clone(), l.clone())?;
            let (ug, _) = u.abstract_group();
            if generalized_wreath(&group_ring(&ug), &group_ring(q.group()), g, &s).ok().as_ref() == Some(a) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// `(ZC2 wr ZC2) wr ZC2` along a chain `L1 < L2 < G` of indices 2.
fn is_iterated_wreath_shape(a: &SRing) -> Result<bool> {
    let g = a.group();
    let subs = a.a_subgroups()?;
    for l2 in subs.iter().filter(|s| s.order() == 4) {
        let (l2g, embed) = l2.abstract_group();
        for l1 in subs.iter().filter(|s| s.order() == 2 && s.is_subgroup_of(l2)) {
            let local: Vec<usize> = l1
                .elements()
                .iter()
                .map(|x| embed.iter().position(|y| y == x).unwrap())
                .collect();
            let l1_local = Subgroup::from_elements(&l2g, &local)?;
            let c2 = AbelianGroup::cyclic(2)?;
            let inner = wreath(
                &group_ring(&c2),
                &group_ring(quotient_group(&l2g, &l1_local).group()),
                &l2g,
                &l1_local,
            )?;
            let outer = wreath(&inner, &group_ring(quotient_group(g, l2).group()), g, l2);
            if outer.ok().as_ref() == Some(a) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Proper nontrivial `L` with `a` an `L`-wreath product over a trivial
/// quotient ring, restricted to the admissible `L` over order-8 groups:
/// the squares or a cyclic subgroup of order 4 over `C4 x C2`, order 2 over
/// `E8`, and `E4` carrying a group ring over either.
pub fn wreath_bucket_subgroups(a: &SRing) -> Result<Vec<Subgroup>> {
    let g = a.group();
    if g.order() != 8 || g.invariants() == [8] {
        return Err(Error::WrongShape(format!("{g} is neither C4 x C2 nor E8")));
    }
    let elementary = g.invariants() == [2, 2, 2];
    let squares = Subgroup::generated(g, &(0..g.order()).map(|x| g.scale(x, 2)).collect::<Vec<_>>());
    let radicals = class_radicals(a);
    let mut out = Vec::new();
    for l in a.a_subgroups()? {
        if l.is_trivial() || l.is_whole() {
            continue;
        }
        let s = Section {
            upper: l.clone(),
            lower: l.clone(),
        };
        if !is_section_wreath(a, &s, &radicals) || !a.quotient_sring(l)?.is_trivial_ring() {
            continue;
        }
        let allowed = if elementary {
            l.order() == 2
        } else {
            *l == squares || l.invariants() == [4]
        };
        let group_ring_on_four = l.invariants() == [2, 2] && a.restrict(l)?.is_group_ring();
        if allowed || group_ring_on_four {
            out.push(l.clone());
        }
    }
    Ok(out)
}

/// Buckets (1 to 4) containing `a`.
fn buckets_of(a: &SRing, table_forms: &[SRing]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    if a.is_trivial_ring() {
        out.push(1);
    }
    if let Some((l, r)) = detect_tensor(a)? {
        let mut o = [l.order(), r.order()];
        o.sort_unstable();
        if o == [2, 4] {
            out.push(2);
        }
    }
    if !wreath_bucket_subgroups(a)?.is_empty() {
        out.push(3);
    }
    let c = canonical_form(a)?;
    if table_forms.contains(&c) {
        out.push(4);
    }
    Ok(out)
}

/// Sorts the order-8 rings into the four buckets up to Cayley isomorphism and duality.
pub fn check_lemma_c4c2(g: &AbelianGroup) -> Result<BucketReport> {
    let inv = g.invariants();
    let rows: Vec<(&'static str, Vec<&'static str>)> = if inv == [2, 4] {
        vec![("K1", K1.to_vec()), ("K2", K2.to_vec())]
    } else if inv == [2, 2, 2] {
        vec![("K3", K3.to_vec())]
    } else {
        return Err(Error::WrongShape(format!("{g} is neither C4 x C2 nor E8")));
    };
    let result = enumerate_srings(g)?;
    let mut table = Vec::new();
    let mut forms = Vec::new();
    for (name, gens) in rows {
        let k = table_group(g, &gens)?;
        let elements = k.elements()?.to_vec();
        let involutions = elements.iter().filter(|s| !s.is_identity() && s.then(s).is_identity()).count();
        let commutative = elements.iter().all(|x| elements.iter().all(|y| x.then(y) == y.then(x)));
        let (structure, structure_ok) = if name == "K1" {
            ("C2", elements.len() == 2)
        } else {
            ("D8", elements.len() == 8 && !commutative && involutions == 5)
        };
        let ring = cyclotomic(&k, g)?;
        let form = canonical_form(&ring)?;
        let identity_ok = if name == "K1" {
            is_k1_shape(&ring)?
        } else {
            is_iterated_wreath_shape(&ring)?
        };
        table.push(TableRow {
            name: name.to_string(),
            generators: gens.iter().map(|t| t.to_string()).collect(),
            order: elements.len(),
            structure: structure.to_string(),
            structure_ok,
            present: result.class_reps.binary_search(&form).is_ok(),
            identity_ok,
        });
        forms.push(form);
    }
    let per_rep: Vec<Vec<u8>> = result
        .class_reps
        .iter()
        .map(|r| buckets_of(r, &forms))
        .collect::<Result<_>>()?;
    let (mut counts, mut unique, mut overlaps, mut uncovered) = ([0usize; 4], 0usize, Vec::new(), Vec::new());
    let mut seen = vec![false; result.class_reps.len()];
    let mut duality_classes = 0;
    for i in 0..result.class_reps.len() {
        if seen[i] {
            continue;
        }
        let j = result.dual_paired[i];
        seen[i] = true;
        seen[j] = true;
        duality_classes += 1;
        let members: BTreeSet<u8> = per_rep[i].iter().chain(&per_rep[j]).copied().collect();
        for &b in &members {
            counts[b as usize - 1] += 1;
        }
        let id = sring_id(&result.class_reps[i.min(j)])?;
        match members.len() {
            0 => uncovered.push(id),
            1 => unique += 1,
            _ => overlaps.push((id, members.into_iter().collect())),
        }
    }
    let all_cyclotomic = if inv == [2, 2, 2] {
        let mut all = true;
        for a in &result.srings {
            all &= detect_cyclotomic(a)?.is_some();
        }
        Some(all)
    } else {
        None
    };
    let holds = uncovered.is_empty()
        && table.iter().all(|r| r.structure_ok && r.present && r.identity_ok)
        && all_cyclotomic != Some(false);
    Ok(BucketReport {
        group: g.factors().to_vec(),
        total_srings: result.srings.len(),
        cayley_classes: result.class_reps.len(),
        duality_classes,
        bucket_counts: counts,
        unique,
        overlaps,
        uncovered,
        table,
        all_cyclotomic,
        holds,
    })
}

/// Schurity over every S-ring of a group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupVerdict {
    pub group: Vec<u32>,
    pub total_srings: usize,
    pub schurian_count: usize,
    pub is_schur_group: bool,
    pub first_counterexample: Option<String>,
    /// Class index of the first counterexample that splits into several orbits.
    pub witness_class: Option<usize>,
    /// Membership in the list of abelian Schur groups, when unambiguous.
    pub predicted: Option<bool>,
}

impl GroupVerdict {
    /// The observed verdict does not contradict the prediction.
    pub fn consistent(&self) -> bool {
        self.predicted.is_none_or(|p| p == self.is_schur_group)
    }
}

pub fn schur_group_verdict(g: &AbelianGroup) -> Result<GroupVerdict> {
    let result = enumerate_srings(g)?;
    schur_group_verdict_from(&result)
}

pub fn schur_group_verdict_from(result: &EnumerationResult) -> Result<GroupVerdict> {
    let certs = result
        .srings
        .par_iter()
        .map(is_schurian)
        .collect::<Result<Vec<_>>>()?;
    let schurian_count = certs.iter().filter(|c| c.schurian).count();
    let first = certs.iter().position(|c| !c.schurian);
    Ok(GroupVerdict {
        group: result.group.factors().to_vec(),
        total_srings: result.srings.len(),
        schurian_count,
        is_schur_group: schurian_count == result.srings.len(),
        first_counterexample: first.map(|i| sring_id(&result.srings[i])).transpose()?,
        witness_class: first.and_then(|i| certs[i].witness),
        predicted: predicted_schur(&result.group),
    })
}

/// Membership of a cyclic order in the listed shapes `p^k, pq^k, 2pq^k, pqr, 2pqr`,
/// with primes pairwise distinct (and distinct from the literal 2) when `strict`.
fn cyclic_listed(n: u64, strict: bool) -> bool {
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    // a slot with exponent 0 can take a fresh prime
    let mut pool = primes.clone();
    pool.push(0);
    let shapes: [&[u32]; 5] = [&[0], &[1, 0], &[1, 1, 0], &[1, 1, 1], &[1, 1, 1, 1]];
    let doubled = [false, false, true, false, true];
    let max_k = 64 - n.leading_zeros();
    for (shape, &two) in shapes.iter().zip(&doubled) {
        let extra = if two { 2 } else { 1 };
        let slot_sets: Vec<Vec<u64>> = slot_assignments(&pool, shape.len());
        for slots in slot_sets {
            let ks: Vec<u32> = if shape.contains(&0) { (0..=max_k).collect() } else { vec![0] };
            for k in ks {
                let exps: Vec<u32> = shape.iter().map(|&e| if e == 0 { k } else { e }).collect();
                if slots.iter().zip(&exps).any(|(&p, &e)| p == 0 && e > 0) {
                    continue;
                }
                if strict {
                    let mut used: Vec<u64> = slots.iter().copied().filter(|&p| p != 0).collect();
                    if two {
                        used.push(2);
                    }
                    let distinct: BTreeSet<u64> = used.iter().copied().collect();
                    if distinct.len() != used.len() {
                        continue;
                    }
                }
                let mut prod: u128 = extra;
                for (&p, &e) in slots.iter().zip(&exps) {
                    if p != 0 {
                        prod *= (p as u128).pow(e);
                    }
                }
                if prod == n as u128 {
                    return true;
                }
            }
        }
    }
    false
}

fn slot_assignments(pool: &[u64], slots: usize) -> Vec<Vec<u64>> {
    if slots == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in slot_assignments(pool, slots - 1) {
        for &p in pool {
            let mut v = rest.clone();
            v.push(p);
            out.push(v);
        }
    }
    out
}

/// Whether `g` appears in the list of abelian Schur groups. `None` when the
/// answer depends on whether the primes in the cyclic shapes must be distinct.
pub fn predicted_schur(g: &AbelianGroup) -> Option<bool> {
    let inv = g.invariants();
    if inv.len() <= 1 {
        let n = g.order() as u64;
        let (strict, lax) = (cyclic_listed(n, true), cyclic_listed(n, false));
        return (strict == lax).then_some(strict);
    }
    let parts = primary_parts(g);
    let get = |p: u64| parts.get(&p).cloned().unwrap_or_default();
    let others = |skip: &[u64]| -> Vec<(u64, Vec<u32>)> {
        parts
            .iter()
            .filter(|(p, _)| !skip.contains(p))
            .map(|(p, e)| (*p, e.clone()))
            .collect()
    };
    let ones = |v: &[u32], m: usize| v.len() == m && v.iter().all(|&e| e == 1);
    let two = get(2);
    let three = get(3);
    // elementary abelian
    if parts.len() == 1 {
        let (&p, e) = parts.iter().next().unwrap();
        if e.iter().all(|&x| x == 1) {
            let n = g.order();
            return Some(matches!((p, n), (2, 4) | (2, 8) | (2, 16) | (2, 32) | (3, 9) | (3, 27)));
        }
    }
    let rest2 = others(&[2]);
    let is_c2_c2k = parts.len() == 1 && two.len() == 2 && two[1] == 1;
    let c4_c2p = two == [2, 1] && rest2.len() == 1 && rest2[0].1 == [1] && rest2[0].0 != 2;
    let e4_cpk = two == [1, 1] && rest2.len() == 1 && rest2[0].1.len() == 1;
    let e4_cpq = (two == [1, 1] && rest2.len() == 2 && rest2.iter().all(|(_, e)| e == &[1]))
        || (two == [1, 1, 1] && rest2.len() == 1 && rest2[0].1 == [1]);
    let e16_c3 = ones(&two, 4) && rest2.len() == 1 && rest2[0] == (3, vec![1]);
    let rest3 = others(&[3]);
    let c3_c3k = parts.len() == 1 && three.len() == 2 && three[1] == 1;
    let c6_c3k = two == [1] && rest3.len() == 1 && three.len() == 2 && three[1] == 1;
    let rest23 = others(&[2, 3]);
    let e9_cq = (ones(&three, 2) && parts.len() == 2 && rest3.len() == 1 && rest3[0].1 == [1])
        || ones(&three, 3) && parts.len() == 1;
    let e9_c2q = (ones(&three, 2) && two == [1] && rest23.len() == 1 && rest23[0].1 == [1])
        || (ones(&three, 2) && two == [2] && rest23.is_empty())
        || (ones(&three, 3) && two == [1] && rest23.is_empty());
    Some(is_c2_c2k || c4_c2p || e4_cpk || e4_cpq || e16_c3 || c3_c3k || c6_c3k || e9_cq || e9_c2q)
}

/// Report over a batch of verdicts.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub groups: Vec<GroupSummary>,
    pub buckets: Vec<BucketReport>,
    pub schurity: Vec<GroupVerdict>,
    pub violations: Vec<Verdict>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: Vec<u32>,
    pub srings: usize,
    pub cayley_classes: usize,
    pub statements: BTreeMap<String, StatementTally>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StatementTally {
    pub checked: usize,
    pub holds: usize,
    pub disjuncts: BTreeMap<String, usize>,
    /// SHA-256 over the sorted ring ids that were checked.
    pub digest: String,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

impl Report {
    pub fn new() -> Report {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            ..Report::default()
        }
    }

    /// Concatenates another report into this one.
    pub fn merge(&mut self, other: Report) {
        self.groups.extend(other.groups);
        self.buckets.extend(other.buckets);
        self.schurity.extend(other.schurity);
        self.violations.extend(other.violations);
    }

    /// Folds verdicts for one group into the report.
    pub fn add_group(&mut self, group: &AbelianGroup, srings: usize, classes: usize, verdicts: &[Verdict]) {
        let mut statements: BTreeMap<String, (StatementTally, Vec<&str>)> = BTreeMap::new();
        for v in verdicts {
            let (t, ids) = statements.entry(v.statement_id.clone()).or_default();
            t.checked += 1;
            if v.holds {
                t.holds += 1;
            } else {
                self.violations.push(v.clone());
            }
            if let Some(d) = &v.disjunct {
                *t.disjuncts.entry(d.clone()).or_default() += 1;
            }
            ids.push(&v.sring_id);
        }
        let statements = statements
            .into_iter()
            .map(|(k, (mut t, mut ids))| {
                ids.sort_unstable();
                let mut h = Sha256::new();
                for id in ids {
                    h.update(id.as_bytes());
                    h.update(b"\n");
                }
                t.digest = hex::encode(h.finalize());
                (k, t)
            })
            .collect();
        self.groups.push(GroupSummary {
            group: group.factors().to_vec(),
            srings,
            cayley_classes: classes,
            statements,
        });
    }

    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
            && self.buckets.iter().all(|b| b.holds)
            && self.schurity.iter().all(GroupVerdict::consistent)
    }

    /// One CSV row per group: group, #srings, #classes, #schurian, verdict.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,srings,classes,schurian,verdict\n");
        let mut rows: BTreeMap<Vec<u32>, (usize, usize, Option<usize>, &str)> = BTreeMap::new();
        for gsum in &self.groups {
            let ok = gsum.statements.values().all(|t| t.holds == t.checked);
            rows.insert(
                gsum.group.clone(),
                (gsum.srings, gsum.cayley_classes, None, if ok { "holds" } else { "violated" }),
            );
        }
        for s in &self.schurity {
            let e = rows
                .entry(s.group.clone())
                .or_insert((s.total_srings, 0, None, "holds"));
            e.2 = Some(s.schurian_count);
            if !s.consistent() {
                e.3 = "violated";
            } else if !s.is_schur_group && e.3 == "holds" {
                e.3 = "not_schur";
            }
        }
        for b in &self.buckets {
            let e = rows
                .entry(b.group.clone())
                .or_insert((b.total_srings, b.cayley_classes, None, "holds"));
            e.1 = b.cayley_classes;
            if !b.holds {
                e.3 = "violated";
            }
        }
        for (g, (n, c, s, v)) in rows {
            let name: Vec<String> = g.iter().map(|f| f.to_string()).collect();
            let s = s.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{n},{c},{s},{v}\n", name.join("x")));
        }
        out
    }

    /// Plain-text summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for gsum in &self.groups {
            let name: Vec<String> = gsum.group.iter().map(|f| f.to_string()).collect();
            out.push_str(&format!(
                "{}: {} S-rings, {} up to Cayley isomorphism\n",
                name.join("x"),
                gsum.srings,
                gsum.cayley_classes
            ));
            for (k, t) in &gsum.statements {
                out.push_str(&format!("  {k}: {}/{} hold", t.holds, t.checked));
                for (d, n) in &t.disjuncts {
                    out.push_str(&format!(" {d}={n}"));
                }
                out.push('\n');
            }
        }
        for b in &self.buckets {
            out.push_str(&format!(
                "buckets {:?}: {:?}, {} duality classes, {} overlapping, {} uncovered\n",
                b.group,
                b.bucket_counts,
                b.duality_classes,
                b.overlaps.len(),
                b.uncovered.len()
            ));
        }
        for s in &self.schurity {
            out.push_str(&format!(
                "schurity {:?}: {}/{} schurian{}\n",
                s.group,
                s.schurian_count,
                s.total_srings,
                s.first_counterexample
                    .as_ref()
                    .map(|c| format!(", counterexample {c}"))
                    .unwrap_or_default()
            ));
        }
        out
    }
}

/// Builds the report document (JSON value) from verdict batches.
pub fn emit_report(report: &Report) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(report)?)
}

/// Runs `check` on every nontrivial ring of an enumeration.
pub fn check_all<F>(result: &EnumerationResult, check: F) -> Result<Vec<Verdict>>
where
    F: Fn(&SRing) -> Result<Verdict> + Sync + Send,
{
    result
        .srings
        .par_iter()
        .filter(|a| !a.is_trivial_ring())
        .map(check)
        .collect()
}

/// `rad(X)` of class `i`, exposed for suites.
pub fn class_radical(a: &SRing, i: usize) -> Subgroup {
    radical_of_set(a.group(), a.class(i)).expect("classes are nonempty")
}

/// Whether `n` is an odd prime.
pub fn is_odd_prime(n: u64) -> bool {
    n != 2 && is_prime(n)
}
