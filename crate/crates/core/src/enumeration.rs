//! Exhaustive enumeration of S-rings over a small abelian group.
//!
//! The search fixes basic sets one at a time. At each node the partition
//! `Q` is the coarsest S-ring refining everything decided so far, and every
//! S-ring still reachable refines `Q`. The basic set of the least unassigned
//! element `a` lies in the `Q`-cell of `a` and is a union of orbits of its
//! own multiplier stabilizer, one orbit per rational class; candidates are
//! generated from that shape, and each S-ring is reached along exactly one
//! path.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::arith::units_mod;
use crate::aut::{automorphism_group, for_each_isomorphism};
use crate::constructions::dual;
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::sring::{make_sring, SRing};

/// Largest group order accepted by [`enumerate_srings`].
pub const DEFAULT_MAX_ENUMERATION_ORDER: usize = 72;
/// Hard cap for [`naive_enumerate`].
pub const NAIVE_MAX_ORDER: usize = 8;

type Mask = u128;

#[inline]
fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

fn mask_of(set: &[usize]) -> Mask {
    set.iter().fold(0, |m, &x| m | (1u128 << x))
}

#[inline]
fn mix(a: u64) -> u64 {
    let mut z = a.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Precomputed group tables shared by the refinement routines.
pub(crate) struct Tables {
    n: usize,
    /// `diff[z * n + x] = z - x`.
    diff: Vec<u8>,
    neg: Vec<u8>,
}

/// Own color, color of the inverse (or a hash), exact pair multiset.
type CellKey = (u32, u64, Vec<(u32, u32)>);

impl Tables {
    pub(crate) fn new(g: &AbelianGroup) -> Tables {
        let n = g.order();
        assert!(n <= 128);
        let mut diff = vec![0u8; n * n];
        for z in 0..n {
            for x in 0..n {
                diff[z * n + x] = g.sub(z, x) as u8;
            }
        }
        Tables {
            n,
            diff,
            neg: (0..n).map(|x| g.neg(x) as u8).collect(),
        }
    }

    /// One refinement round. Returns the new coloring (renumbered by first
    /// appearance) and its number of colors, or `None` if a protected set
    /// stopped being monochrome.
    fn round(&self, colors: &[u32], protected: &[Mask], exact: bool) -> Option<(Vec<u32>, usize)> {
        let n = self.n;
        let mut keys: Vec<CellKey> = Vec::with_capacity(n);
        for z in 0..n {
            let row = &self.diff[z * n..(z + 1) * n];
            let cz = colors[self.neg[z] as usize];
            if exact {
                let mut pairs: Vec<(u32, u32)> = (0..n)
                    .map(|x| (colors[x], colors[row[x] as usize]))
                    .collect();
                pairs.sort_unstable();
                keys.push((colors[z], cz as u64, pairs));
            } else {
                let mut h = 0u64;
                for x in 0..n {
                    h = h.wrapping_add(mix(
                        ((colors[x] as u64) << 32) | colors[row[x] as usize] as u64,
                    ));
                }
                keys.push((colors[z], mix(h ^ ((cz as u64) << 1)), Vec::new()));
            }
        }
        let mut ids: BTreeMap<&CellKey, u32> = BTreeMap::new();
        let mut fresh = Vec::with_capacity(n);
        for k in &keys {
            let next = ids.len() as u32;
            fresh.push(*ids.entry(k).or_insert(next));
        }
        for &p in protected {
            let mut it = bits(p);
            if let Some(first) = it.next() {
                let c = fresh[first];
                if it.any(|x| fresh[x] != c) {
                    return None;
                }
            }
        }
        let k = ids.len();
        Some((fresh, k))
    }

    /// Refines to the stable coloring.
    pub(crate) fn refine(&self, colors: &[u32], protected: &[Mask], exact: bool) -> Option<Vec<u32>> {
        let mut cur = renumber(colors);
        let mut k = count_colors(&cur);
        loop {
            let (next, k2) = self.round(&cur, protected, exact)?;
            if k2 == k {
                return Some(next);
            }
            cur = next;
            k = k2;
        }
    }
}

fn renumber(colors: &[u32]) -> Vec<u32> {
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    colors
        .iter()
        .map(|&c| {
            let next = map.len() as u32;
            *map.entry(c).or_insert(next)
        })
        .collect()
}

fn count_colors(colors: &[u32]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

fn classes_of_coloring(colors: &[u32]) -> Vec<Vec<usize>> {
    let mut by: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (x, &c) in colors.iter().enumerate() {
        by.entry(c).or_default().push(x);
    }
    let mut v: Vec<Vec<usize>> = by.into_values().collect();
    v.sort();
    v
}

/// The coarsest S-ring whose partition refines `partition` (with `{e}` split off).
pub fn closure(g: &AbelianGroup, partition: &[Vec<usize>]) -> Result<SRing> {
    if g.order() > 128 {
        return Err(Error::BoundExceeded {
            what: "group order for closure",
            actual: g.order(),
            limit: 128,
        });
    }
    let n = g.order();
    let mut colors = vec![u32::MAX; n];
    for (i, c) in partition.iter().enumerate() {
        for &x in c {
            if x >= n || (x != 0 && colors[x] != u32::MAX) {
                return Err(Error::NotAPartition(format!("element {x}")));
            }
            colors[x] = i as u32 + 1;
        }
    }
    colors[0] = 0;
    if colors.contains(&u32::MAX) {
        return Err(Error::NotAPartition("partition does not cover the group".into()));
    }
    let t = Tables::new(g);
    let stable = t.refine(&colors, &[], true).expect("no protected sets");
    make_sring(g, classes_of_coloring(&stable))
}

/// Common refinement of two S-rings, closed to an S-ring.
pub fn meet(a: &SRing, b: &SRing) -> Result<SRing> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch);
    }
    let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for x in 0..a.group().order() {
        cells.entry((a.class_of(x), b.class_of(x))).or_default().push(x);
    }
    let parts: Vec<Vec<usize>> = cells.into_values().collect();
    closure(a.group(), &parts)
}

/// Candidate-generation data: multiplier orbits and their stabilizers.
struct Multipliers {
    /// `orbit[s][x]`: orbit of `x` under the s-th multiplier subgroup.
    orbit: Vec<Vec<Mask>>,
    /// `exact[s][x]`: the full multiplier stabilizer of that orbit is the s-th subgroup.
    exact: Vec<Vec<bool>>,
    /// Rational classes (orbits of all multipliers), as masks.
    rational: Vec<Mask>,
    rational_of: Vec<usize>,
}

impl Multipliers {
    fn new(g: &AbelianGroup) -> Multipliers {
        let n = g.order();
        let e = g.exponent() as u64;
        let units: Vec<i64> = units_mod(e).into_iter().map(|u| u as i64).collect();
        let scale: Vec<Vec<usize>> = units
            .iter()
            .map(|&m| (0..n).map(|x| g.scale(x, m)).collect())
            .collect();
        // subgroups of the unit group, as sorted index lists into `units`
        let ui = |m: i64| units.iter().position(|&u| u == m.rem_euclid(e.max(1) as i64)).unwrap_or(0);
        let mul = |i: usize, j: usize| ui(units[i] * units[j]);
        let mut subs: Vec<Vec<usize>> = vec![vec![ui(1)]];
        let mut seen: HashSet<Vec<usize>> = subs.iter().cloned().collect();
        let mut head = 0;
        while head < subs.len() {
            let cur = subs[head].clone();
            head += 1;
            for g_i in 0..units.len() {
                if cur.contains(&g_i) {
                    continue;
                }
                let mut set: Vec<usize> = cur.clone();
                let mut frontier = vec![g_i];
                while let Some(x) = frontier.pop() {
                    if set.contains(&x) {
                        continue;
                    }
                    set.push(x);
                    for &y in set.clone().iter() {
                        for z in [mul(x, y), mul(y, x)] {
                            if !set.contains(&z) {
                                frontier.push(z);
                            }
                        }
                    }
                }
                set.sort_unstable();
                if seen.insert(set.clone()) {
                    subs.push(set);
                }
            }
        }
        let orbit_under = |sub: &[usize], x: usize| -> Mask {
            sub.iter().fold(0, |m, &i| m | (1u128 << scale[i][x]))
        };
        let all: Vec<usize> = (0..units.len()).collect();
        let mut orbit = Vec::new();
        let mut exact = Vec::new();
        for sub in &subs {
            let o: Vec<Mask> = (0..n).map(|x| orbit_under(sub, x)).collect();
            let ex: Vec<bool> = (0..n)
                .map(|x| {
                    let stab: Vec<usize> = all
                        .iter()
                        .copied()
                        .filter(|&i| {
                            let img = bits(o[x]).fold(0u128, |m, y| m | (1u128 << scale[i][y]));
                            img == o[x]
                        })
                        .collect();
                    stab == *sub
                })
                .collect();
            orbit.push(o);
            exact.push(ex);
        }
        let mut rational = Vec::new();
        let mut rational_of = vec![usize::MAX; n];
        for x in 0..n {
            if rational_of[x] == usize::MAX {
                let r = orbit_under(&all, x);
                for y in bits(r) {
                    rational_of[y] = rational.len();
                }
                rational.push(r);
            }
        }
        Multipliers {
            orbit,
            exact,
            rational,
            rational_of,
        }
    }

    /// Candidate basic sets containing `a`, inside `cell`, with minimum `a`.
    /// Basic-set candidates through `a` inside `cell`, generated lazily.
    fn candidates(&self, a: usize, cell: Mask) -> impl Iterator<Item = Mask> + '_ {
        let below: Mask = (1u128 << a) - 1;
        (0..self.orbit.len()).flat_map(move |s| {
            let oa = self.orbit[s][a];
            if !self.exact[s][a] || oa & !cell != 0 || oa & below != 0 {
                return Product::empty();
            }
            let ra = self.rational_of[a];
            let mut options: Vec<Vec<Mask>> = Vec::new();
            for (r, &rm) in self.rational.iter().enumerate() {
                if r == ra || rm & cell == 0 {
                    continue;
                }
                let mut opts: Vec<Mask> = Vec::new();
                for y in bits(rm & cell) {
                    let o = self.orbit[s][y];
                    if self.exact[s][y] && o & !cell == 0 && o & below == 0 && !opts.contains(&o) {
                        opts.push(o);
                    }
                }
                if !opts.is_empty() {
                    options.push(opts);
                }
            }
            Product::new(oa, options)
        })
    }
}

/// Each rational class contributes nothing or one of its orbits.
struct Product {
    base: Mask,
    options: Vec<Vec<Mask>>,
    /// 0 means "none", `k` means `options[i][k - 1]`; `None` once exhausted.
    digits: Option<Vec<usize>>,
}

impl Product {
    fn empty() -> Product {
        Product {
            base: 0,
            options: Vec::new(),
            digits: None,
        }
    }

    fn new(base: Mask, options: Vec<Vec<Mask>>) -> Product {
        let digits = Some(vec![0; options.len()]);
        Product { base, options, digits }
    }
}

impl Iterator for Product {
    type Item = Mask;

    fn next(&mut self) -> Option<Mask> {
        let digits = self.digits.as_mut()?;
        let mut m = self.base;
        for (d, opts) in digits.iter().zip(&self.options) {
            if *d > 0 {
                m |= opts[*d - 1];
            }
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                self.digits = None;
                break;
            }
            digits[i] += 1;
            if digits[i] <= self.options[i].len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        Some(m)
    }
}

struct Search<'a> {
    g: &'a AbelianGroup,
    tables: Tables,
    mult: Multipliers,
    full: Mask,
}

impl<'a> Search<'a> {
    fn new(g: &'a AbelianGroup) -> Search<'a> {
        let n = g.order();
        Search {
            g,
            tables: Tables::new(g),
            mult: Multipliers::new(g),
            full: if n == 128 { !0 } else { (1u128 << n) - 1 },
        }
    }

    fn cell_of(colors: &[u32], a: usize) -> Mask {
        let c = colors[a];
        colors
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == c)
            .fold(0, |m, (x, _)| m | (1u128 << x))
    }

    /// Children of a node: (coloring, newly fixed set).
    fn expand<'b>(
        &'b self,
        colors: &'b [u32],
        fixed: Vec<Mask>,
        assigned: Mask,
    ) -> impl Iterator<Item = (Vec<u32>, Mask)> + 'b {
        let a = (!assigned & self.full).trailing_zeros() as usize;
        let cell = Self::cell_of(colors, a);
        self.mult.candidates(a, cell).filter_map(move |x| {
            if x == cell {
                return Some((colors.to_vec(), x));
            }
            let mut split = colors.to_vec();
            let fresh = *colors.iter().max().unwrap() + 1;
            for y in bits(x) {
                split[y] = fresh;
            }
            let mut protected = Vec::with_capacity(fixed.len() + 1);
            protected.push(x);
            protected.extend_from_slice(&fixed);
            self.tables.refine(&split, &protected, false).map(|next| (next, x))
        })
    }

    fn dfs(&self, colors: Vec<u32>, fixed: &mut Vec<Mask>, assigned: Mask, out: &mut Vec<SRing>) {
        if assigned == self.full {
            let classes: Vec<Vec<usize>> = fixed.iter().map(|&m| bits(m).collect()).collect();
            // hashed refinement is only a filter; leaves are validated exactly
            if let Ok(r) = make_sring(self.g, classes) {
                out.push(r);
            }
            return;
        }
        for (next, x) in self.expand(&colors, fixed.clone(), assigned) {
            fixed.push(x);
            self.dfs(next, fixed, assigned | x, out);
            fixed.pop();
        }
    }
}

/// All S-rings over `g` (sorted canonically), with representatives up to
/// Cayley isomorphism and their dual pairing.
#[derive(Clone, Debug)]
pub struct EnumerationResult {
    pub group: AbelianGroup,
    pub srings: Vec<SRing>,
    pub class_reps: Vec<SRing>,
    /// `dual_paired[i]`: index of the rep Cayley-isomorphic to the dual of rep `i`.
    pub dual_paired: Vec<usize>,
}

impl EnumerationResult {
    /// Index of the representative of `a`'s Cayley class.
    pub fn rep_index(&self, a: &SRing) -> Result<usize> {
        let c = canonical_form(a)?;
        self.class_reps
            .binary_search(&c)
            .map_err(|_| Error::Internal("S-ring missing from enumeration".into()))
    }
}

/// Every S-ring over `g`, sorted by class list.
pub fn enumerate_raw(g: &AbelianGroup, max_order: usize) -> Result<Vec<SRing>> {
    if g.order() > max_order || g.order() > 128 {
        return Err(Error::BoundExceeded {
            what: "group order for enumeration",
            actual: g.order(),
            limit: max_order.min(128),
        });
    }
    if g.order() == 1 {
        return Ok(vec![make_sring(g, vec![vec![0]])?]);
    }
    let search = Search::new(g);
    let n = g.order();
    let mut colors = vec![1u32; n];
    colors[0] = 0;
    let root = search
        .tables
        .refine(&colors, &[], false)
        .expect("no protected sets");
    let first = vec![1u128];
    let children = search.expand(&root, first, 1);
    let mut all: Vec<SRing> = children
        .par_bridge()
        .flat_map_iter(|(next, x)| {
            let mut fixed = vec![1u128, x];
            let mut out = Vec::new();
            search.dfs(next, &mut fixed, 1 | x, &mut out);
            out
        })
        .collect();
    all.sort();
    all.dedup();
    Ok(all)
}

/// Full enumeration with isomorph classes and dual pairing.
pub fn enumerate_srings(g: &AbelianGroup) -> Result<EnumerationResult> {
    enumerate_srings_bounded(g, DEFAULT_MAX_ENUMERATION_ORDER)
}

pub fn enumerate_srings_bounded(g: &AbelianGroup, max_order: usize) -> Result<EnumerationResult> {
    let srings = enumerate_raw(g, max_order)?;
    let mut reps: Vec<SRing> = srings
        .par_iter()
        .map(canonical_form)
        .collect::<Result<Vec<_>>>()?;
    reps.sort();
    reps.dedup();
    let dual_paired = reps
        .par_iter()
        .map(|r| {
            let d = canonical_form(&dual(r)?)?;
            reps.binary_search(&d)
                .map_err(|_| Error::Internal("dual ring missing from enumeration".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnumerationResult {
        group: g.clone(),
        srings,
        class_reps: reps,
        dual_paired,
    })
}

/// Pairs each Cayley class with the class of its dual.
pub fn classes_up_to_duality(result: &EnumerationResult) -> Vec<(SRing, SRing)> {
    result
        .class_reps
        .iter()
        .zip(&result.dual_paired)
        .map(|(r, &d)| (r.clone(), result.class_reps[d].clone()))
        .collect()
}

/// Restricted-growth string of a class map under relabeling `x -> sigma(x)`,
/// compared against `best`; returns the new string if strictly smaller.
fn relabeled_rgs(class_of: &[u32], inv_sigma: &[u32], best: &[u32], scratch: &mut Vec<u32>) -> bool {
    let n = class_of.len();
    scratch.clear();
    let mut names = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut smaller = best.is_empty();
    for y in 0..n {
        let c = class_of[inv_sigma[y] as usize] as usize;
        if names[c] == u32::MAX {
            names[c] = next;
            next += 1;
        }
        let v = names[c];
        scratch.push(v);
        if !smaller {
            match v.cmp(&best[y]) {
                std::cmp::Ordering::Less => smaller = true,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    smaller
}

/// The image of `a` under `Aut(G)` whose class map, read as a
/// restricted-growth string, is lexicographically least.
pub fn canonical_form(a: &SRing) -> Result<SRing> {
    let g = a.group();
    let aut = automorphism_group(g)?;
    let mut best: Vec<u32> = Vec::new();
    let mut scratch = Vec::with_capacity(g.order());
    for sigma in aut.elements()? {
        let inv = sigma.inverse();
        if relabeled_rgs(a.class_map(), inv.images(), &best, &mut scratch) {
            std::mem::swap(&mut best, &mut scratch);
        }
    }
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (x, &c) in best.iter().enumerate() {
        classes.entry(c).or_default().push(x);
    }
    Ok(SRing::from_valid(g.clone(), classes.into_values().collect()))
}

/// A group isomorphism carrying the classes of `a` onto those of `b`.
pub fn cayley_isomorphic(a: &SRing, b: &SRing) -> Option<Vec<usize>> {
    if a.rank() != b.rank() {
        return None;
    }
    let mut sizes_a: Vec<usize> = a.classes().iter().map(|c| c.len()).collect();
    let mut sizes_b: Vec<usize> = b.classes().iter().map(|c| c.len()).collect();
    sizes_a.sort_unstable();
    sizes_b.sort_unstable();
    if sizes_a != sizes_b {
        return None;
    }
    let mut found = None;
    for_each_isomorphism(a.group(), b.group(), |map| {
        let ok = a.classes().iter().all(|c| {
            let t = b.class_of(map[c[0]]);
            b.class(t).len() == c.len() && c.iter().all(|&x| b.class_of(map[x]) == t)
        });
        if ok {
            found = Some(map.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// Reference axiom check multiplying full indicator vectors in `Z[G]`.
pub fn naive_is_sring(g: &AbelianGroup, classes: &[Vec<usize>]) -> bool {
    let n = g.order();
    let mut owner = vec![usize::MAX; n];
    for (i, c) in classes.iter().enumerate() {
        for &x in c {
            if owner[x] != usize::MAX {
                return false;
            }
            owner[x] = i;
        }
    }
    if owner.contains(&usize::MAX) || !classes.iter().any(|c| c == &[0]) {
        return false;
    }
    let indicator = |c: &[usize]| {
        let mut v = vec![0i64; n];
        for &x in c {
            v[x] = 1;
        }
        v
    };
    for c in classes {
        let inv: Vec<usize> = c.iter().map(|&x| g.neg(x)).collect();
        let iv = indicator(&inv);
        if !classes.iter().any(|d| indicator(d) == iv) {
            return false;
        }
    }
    for x in classes {
        for y in classes {
            let (vx, vy) = (indicator(x), indicator(y));
            let mut prod = vec![0i64; n];
            for u in 0..n {
                for w in 0..n {
                    prod[g.add(u, w)] += vx[u] * vy[w];
                }
            }
            // must be an integer combination of class indicators
            if !classes.iter().all(|c| c.iter().all(|&z| prod[z] == prod[c[0]])) {
                return false;
            }
        }
    }
    true
}

/// Set partitions of `items`, each block sorted.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let (first, rest) = (items[0], &items[1..]);
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p;
        q.insert(0, vec![first]);
        out.push(q);
    }
    out
}

/// Brute force over all partitions of `G^#`; oracle for small groups.
pub fn naive_enumerate(g: &AbelianGroup) -> Result<Vec<SRing>> {
    if g.order() > NAIVE_MAX_ORDER {
        return Err(Error::BoundExceeded {
            what: "group order for naive enumeration",
            actual: g.order(),
            limit: NAIVE_MAX_ORDER,
        });
    }
    let rest: Vec<usize> = (1..g.order()).collect();
    let mut out = Vec::new();
    for mut p in set_partitions(&rest) {
        p.push(vec![0]);
        if naive_is_sring(g, &p) {
            out.push(make_sring(g, p)?);
        }
    }
    out.sort();
    Ok(out)
}

/// All inverse-closed partitions with `{e}` a class (not validated further).
pub fn inverse_closed_partitions(g: &AbelianGroup) -> Result<Vec<Vec<Vec<usize>>>> {
    if g.order() > NAIVE_MAX_ORDER {
        return Err(Error::BoundExceeded {
            what: "group order for naive enumeration",
            actual: g.order(),
            limit: NAIVE_MAX_ORDER,
        });
    }
    let rest: Vec<usize> = (1..g.order()).collect();
    let mut out = Vec::new();
    for mut p in set_partitions(&rest) {
        p.push(vec![0]);
        let masks: HashSet<Mask> = p.iter().map(|c| mask_of(c)).collect();
        let inv_ok = p.iter().all(|c| {
            let inv: Vec<usize> = c.iter().map(|&x| g.neg(x)).collect();
            masks.contains(&mask_of(&inv))
        });
        if inv_ok {
            out.push(p);
        }
    }
    Ok(out)
}
