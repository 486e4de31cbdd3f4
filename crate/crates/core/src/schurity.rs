//! Schurity: automorphisms of the Cayley scheme of an S-ring, found by
//! individualization and refinement, compared against the basic sets.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::perm::{orbits_of, Perm, PermGroup, StabChain};
use crate::sring::{make_sring, SRing};

/// Largest scheme accepted by [`scheme_automorphisms`].
pub const DEFAULT_MAX_SCHEME_POINTS: usize = 96;

/// The coloring `color(x, y) = class of y - x` on `G x G`.
#[derive(Clone, Debug)]
pub struct ColorScheme {
    n: usize,
    /// Row-major `n x n` color table.
    colors: Vec<u32>,
    rank: usize,
}

impl ColorScheme {
    pub fn points(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn color(&self, x: usize, y: usize) -> u32 {
        self.colors[x * self.n + y]
    }

    pub fn is_automorphism(&self, f: &Perm) -> bool {
        f.degree() == self.n
            && (0..self.n).all(|x| (0..self.n).all(|y| self.color(f.apply(x), f.apply(y)) == self.color(x, y)))
    }
}

pub fn scheme_of(a: &SRing) -> ColorScheme {
    let g = a.group();
    let n = g.order();
    let mut colors = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            colors.push(a.class_of(g.sub(y, x)) as u32);
        }
    }
    ColorScheme {
        n,
        colors,
        rank: a.rank(),
    }
}

/// Ordered partition of the points, as cell indices `0..cells`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Cells {
    of: Vec<u32>,
    count: usize,
}

impl Cells {
    fn unit(n: usize) -> Cells {
        Cells {
            of: vec![0; n],
            count: 1,
        }
    }

    fn is_discrete(&self) -> bool {
        self.count == self.of.len()
    }

    /// Splits `x` off its cell; the singleton comes first.
    fn individualize(&self, x: usize) -> Cells {
        let c = self.of[x];
        let of = self
            .of
            .iter()
            .enumerate()
            .map(|(y, &d)| if d > c || (d == c && y != x) { d + 1 } else { d })
            .collect();
        Cells {
            of,
            count: self.count + 1,
        }
    }

    /// Smallest non-singleton cell (lowest index on ties) and its members.
    fn target_cell(&self) -> Option<(u32, Vec<usize>)> {
        let mut sizes = vec![0usize; self.count];
        for &c in &self.of {
            sizes[c as usize] += 1;
        }
        let best = (0..self.count)
            .filter(|&c| sizes[c] > 1)
            .min_by_key(|&c| (sizes[c], c))? as u32;
        Some((best, (0..self.of.len()).filter(|&x| self.of[x] == best).collect()))
    }
}

/// Refines a pair of partitions in lockstep with the same canonical keying;
/// `None` when their traces diverge.
fn refine_pair(s: &ColorScheme, left: &Cells, right: &Cells) -> Option<(Cells, Cells)> {
    let (mut l, mut r) = (left.clone(), right.clone());
    loop {
        let (kl, nl) = round(s, &l);
        let (kr, _) = round(s, &r);
        let mut sl = kl.clone();
        let mut sr = kr.clone();
        sl.sort_unstable();
        sr.sort_unstable();
        if sl != sr {
            return None;
        }
        if nl == l.count {
            return Some((l, r));
        }
        l = assign(&kl, &sl);
        r = assign(&kr, &sr);
    }
}

fn refine_one(s: &ColorScheme, cells: &Cells) -> Cells {
    let mut c = cells.clone();
    loop {
        let (k, m) = round(s, &c);
        if m == c.count {
            return c;
        }
        let mut sorted = k.clone();
        sorted.sort_unstable();
        c = assign(&k, &sorted);
    }
}

/// Per-point keys `(cell, sorted (color, cell) incidences)` and the number of distinct keys.
fn round(s: &ColorScheme, cells: &Cells) -> (Vec<(u32, Vec<u64>)>, usize) {
    let n = s.n;
    let stride = cells.count as u64;
    let keys: Vec<(u32, Vec<u64>)> = (0..n)
        .map(|x| {
            let mut v: Vec<u64> = (0..n)
                .map(|y| s.color(x, y) as u64 * stride + cells.of[y] as u64)
                .collect();
            v.sort_unstable();
            (cells.of[x], v)
        })
        .collect();
    let mut sorted: Vec<&(u32, Vec<u64>)> = keys.iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    let m = sorted.len();
    (keys, m)
}

fn assign(keys: &[(u32, Vec<u64>)], sorted: &[(u32, Vec<u64>)]) -> Cells {
    let mut distinct: Vec<&(u32, Vec<u64>)> = sorted.iter().collect();
    distinct.dedup();
    let of = keys
        .iter()
        .map(|k| distinct.binary_search(&k).unwrap() as u32)
        .collect();
    Cells {
        of,
        count: distinct.len(),
    }
}

/// Searches for an automorphism carrying `left` to `right` (equally shaped, refined).
fn find_isomorphism(s: &ColorScheme, left: &Cells, right: &Cells) -> Option<Perm> {
    let (l, r) = refine_pair(s, left, right)?;
    if l.is_discrete() {
        let mut at = vec![0u32; s.n];
        for y in 0..s.n {
            at[r.of[y] as usize] = y as u32;
        }
        let f = Perm::from_images_unchecked((0..s.n).map(|x| at[l.of[x] as usize]).collect());
        return s.is_automorphism(&f).then_some(f);
    }
    let (cell, members) = l.target_cell().expect("non-discrete");
    let x = members[0];
    let li = l.individualize(x);
    (0..s.n)
        .filter(|&y| r.of[y] == cell)
        .find_map(|y| find_isomorphism(s, &li, &r.individualize(y)))
}

fn orbit_of(n: usize, gens: &[Perm], x: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(y) = stack.pop() {
        for g in gens {
            let z = g.apply(y);
            if !seen[z] {
                seen[z] = true;
                stack.push(z);
            }
        }
    }
    seen
}

/// Level-by-level search along the leftmost path; appends generators of the
/// pointwise stabilizer of the current prefix and returns its order.
fn search_level(s: &ColorScheme, cells: &Cells, gens: &mut Vec<Perm>) -> BigUint {
    let Some((cell, members)) = cells.target_cell() else {
        return BigUint::from(1u32);
    };
    let b = members[0];
    let deeper = refine_one(s, &cells.individualize(b));
    let below = search_level(s, &deeper, gens);
    let mut orbit = orbit_of(s.n, gens, b);
    for &t in members.iter().skip(1) {
        debug_assert_eq!(cells.of[t], cell);
        if orbit[t] {
            continue;
        }
        if let Some(f) = find_isomorphism(s, &cells.individualize(b), &cells.individualize(t)) {
            gens.push(f);
            orbit = orbit_of(s.n, gens, b);
        }
    }
    below * BigUint::from(orbit.iter().filter(|&&o| o).count())
}

/// Automorphisms of the Cayley scheme: the stabilizer of the identity point
/// by search, together with the right translations.
#[derive(Clone, Debug)]
pub struct SchemeAutomorphisms {
    pub group: PermGroup,
    pub stabilizer_generators: Vec<Perm>,
    pub order: BigUint,
}

pub fn scheme_automorphisms(a: &SRing) -> Result<PermGroup> {
    Ok(scheme_automorphisms_bounded(a, DEFAULT_MAX_SCHEME_POINTS)?.group)
}

fn translations(g: &AbelianGroup) -> Vec<Perm> {
    (0..g.factors().len())
        .map(|i| {
            let u = g.unit(i);
            Perm::from_images_unchecked((0..g.order()).map(|x| g.add(x, u) as u32).collect())
        })
        .collect()
}

pub fn scheme_automorphisms_bounded(a: &SRing, max_points: usize) -> Result<SchemeAutomorphisms> {
    let g = a.group();
    let n = g.order();
    if n > max_points {
        return Err(Error::BoundExceeded {
            what: "scheme points",
            actual: n,
            limit: max_points,
        });
    }
    let s = scheme_of(a);
    let shifts = translations(g);
    if !shifts.iter().all(|t| s.is_automorphism(t)) {
        return Err(Error::Internal("right translations do not preserve the scheme".into()));
    }
    let root = refine_one(&s, &Cells::unit(n).individualize(0));
    let mut stab = Vec::new();
    let stab_order = search_level(&s, &root, &mut stab);
    let mut all = shifts;
    all.extend(stab.iter().cloned());
    Ok(SchemeAutomorphisms {
        group: PermGroup::new(n, all)?,
        stabilizer_generators: stab,
        order: stab_order * BigUint::from(n),
    })
}

/// Orbits of the identity-point stabilizer of `f`, as an S-ring over `g`.
pub fn orbit_sring(f: &PermGroup, g: &AbelianGroup) -> Result<SRing> {
    let n = g.order();
    if f.degree() != n {
        return Err(Error::NotAPermutation(n));
    }
    let chain = StabChain::new(n, f.generators(), &[0])?;
    if !translations(g).iter().all(|t| chain.contains(t)) {
        return Err(Error::Precondition("group does not contain the right translations".into()));
    }
    if orbit_of(n, f.generators(), 0).iter().any(|&o| !o) {
        return Err(Error::Precondition("group is not transitive".into()));
    }
    let domain: Vec<usize> = (0..n).collect();
    let orbits = orbits_of(n, &chain.stabilizer_generators(1), &domain);
    make_sring(g, orbits).map_err(|e| Error::ResultFailsAxioms(e.to_string()))
}

#[derive(Clone, Debug)]
pub struct SchurityCertificate {
    pub aut_generators: Vec<Perm>,
    pub stabilizer_orbits: Vec<Vec<usize>>,
    pub schurian: bool,
    /// A class that is a union of at least two stabilizer orbits.
    pub witness: Option<usize>,
    pub aut_order: BigUint,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub schurian: bool,
    pub aut_order: serde_json::Number,
    pub stab_orbit_count: usize,
    pub witness_class: Option<usize>,
}

impl SchurityCertificate {
    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            schurian: self.schurian,
            aut_order: self.aut_order.to_string().parse().expect("decimal integer"),
            stab_orbit_count: self.stabilizer_orbits.len(),
            witness_class: self.witness,
        }
    }
}

pub fn is_schurian(a: &SRing) -> Result<SchurityCertificate> {
    is_schurian_bounded(a, DEFAULT_MAX_SCHEME_POINTS)
}

pub fn is_schurian_bounded(a: &SRing, max_points: usize) -> Result<SchurityCertificate> {
    let auts = scheme_automorphisms_bounded(a, max_points)?;
    let n = a.group().order();
    let domain: Vec<usize> = (0..n).collect();
    let orbits = orbits_of(n, &auts.stabilizer_generators, &domain);
    let schurian = orbits.len() == a.rank();
    let witness = if schurian {
        None
    } else {
        (0..a.rank()).find(|&i| orbits.iter().filter(|o| a.class_of(o[0]) == i).count() >= 2)
    };
    Ok(SchurityCertificate {
        aut_generators: auts.group.generators().to_vec(),
        stabilizer_orbits: orbits,
        schurian,
        witness,
        aut_order: auts.order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aut::automorphism_group;
    use crate::constructions::{cyclotomic, group_ring, trivial_sring};
    use crate::enumeration::enumerate_raw;
    use crate::group::make_group;

    fn all_perms(n: usize) -> Vec<Perm> {
        fn rec(cur: &mut Vec<u32>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
            let n = used.len();
            if cur.len() == n {
                out.push(Perm::from_images(cur.clone()).unwrap());
                return;
            }
            for x in 0..n {
                if !used[x] {
                    used[x] = true;
                    cur.push(x as u32);
                    rec(cur, used, out);
                    cur.pop();
                    used[x] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    #[test]
    fn matches_brute_force_on_tiny_groups() {
        for f in [vec![2], vec![3], vec![4], vec![2, 2], vec![5]] {
            let g = make_group(&f).unwrap();
            let perms = all_perms(g.order());
            for a in enumerate_raw(&g, 72).unwrap() {
                let s = scheme_of(&a);
                let brute = perms.iter().filter(|p| s.is_automorphism(p)).count();
                let got = scheme_automorphisms_bounded(&a, 96).unwrap();
                assert_eq!(got.order, BigUint::from(brute), "{f:?} {:?}", a.classes());
                let chain = StabChain::new(g.order(), got.group.generators(), &[]).unwrap();
                assert_eq!(chain.order(), got.order);
            }
        }
    }

    #[test]
    fn extreme_rings() {
        let g = make_group(&[6]).unwrap();
        let zg = is_schurian(&group_ring(&g)).unwrap();
        assert!(zg.schurian);
        assert_eq!(zg.aut_order, BigUint::from(6u32));
        let t = is_schurian(&trivial_sring(&g)).unwrap();
        assert!(t.schurian);
        assert_eq!(t.aut_order, BigUint::from(720u32));
        let json = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(json, r#"{"schurian":true,"aut_order":720,"stab_orbit_count":2,"witness_class":null}"#);
    }

    #[test]
    fn orbit_sring_examples() {
        let g = make_group(&[4, 2]).unwrap();
        let gr = PermGroup::new(g.order(), translations(&g)).unwrap();
        assert_eq!(orbit_sring(&gr, &g).unwrap(), group_ring(&g));
        let sym = scheme_automorphisms(&trivial_sring(&g)).unwrap();
        assert_eq!(orbit_sring(&sym, &g).unwrap(), trivial_sring(&g));
        let aut = automorphism_group(&g).unwrap();
        let mut gens = translations(&g);
        gens.extend(aut.generators().iter().cloned());
        let f = PermGroup::new(g.order(), gens).unwrap();
        assert_eq!(orbit_sring(&f, &g).unwrap(), cyclotomic(&aut, &g).unwrap());
        assert!(matches!(
            orbit_sring(&PermGroup::trivial(g.order()), &g),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bound_is_enforced() {
        let g = make_group(&[100]).unwrap();
        assert!(matches!(
            scheme_automorphisms(&group_ring(&g)),
            Err(Error::BoundExceeded { .. })
        ));
    }
}
