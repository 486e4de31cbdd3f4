//! Permutations on `0..n` and permutation groups given by generators.

use std::collections::HashSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// A permutation of `0..n` stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Checks that `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::NotAPermutation(n));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self` followed by `other`: `x -> other(self(x))`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Image of a set, sorted.
    pub fn image_of_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&x| self.apply(x)).collect();
        out.sort_unstable();
        out
    }
}

/// Default cap on the number of elements materialized for a permutation group.
pub const DEFAULT_MAX_GROUP_ELEMENTS: usize = 1_000_000;

/// A permutation group on `0..degree` given by generators, with an optional
/// fully enumerated element list.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: OnceLock<Vec<Perm>>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let elements = OnceLock::new();
        if let Some(e) = self.elements.get() {
            let _ = elements.set(e.clone());
        }
        PermGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            elements,
        }
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(Error::NotAPermutation(degree));
        }
        let generators = generators.into_iter().filter(|g| !g.is_identity()).collect();
        Ok(PermGroup {
            degree,
            generators,
            elements: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            elements: OnceLock::new(),
        }
    }

    /// Builds a group from a complete, composition-closed element list.
    /// A small generating set is extracted greedily.
    pub fn from_elements(degree: usize, mut elements: Vec<Perm>) -> Self {
        elements.sort();
        elements.dedup();
        let mut generators: Vec<Perm> = Vec::new();
        let mut span: HashSet<Perm> = HashSet::new();
        span.insert(Perm::identity(degree));
        for e in &elements {
            if span.contains(e) {
                continue;
            }
            generators.push(e.clone());
            span = closure(degree, &generators, usize::MAX)
                .expect("unbounded closure")
                .into_iter()
                .collect();
        }
        let group = PermGroup {
            degree,
            generators,
            elements: OnceLock::new(),
        };
        let _ = group.elements.set(elements);
        group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Enumerates all elements (sorted), failing if more than `cap` exist.
    pub fn enumerate(&self, cap: usize) -> Result<&[Perm]> {
        if let Some(e) = self.elements.get() {
            if e.len() > cap {
                return Err(Error::BoundExceeded {
                    what: "permutation group order",
                    actual: e.len(),
                    limit: cap,
                });
            }
            return Ok(e);
        }
        let mut all = closure(self.degree, &self.generators, cap)?;
        all.sort();
        let _ = self.elements.set(all);
        Ok(self.elements.get().unwrap())
    }

    pub fn elements(&self) -> Result<&[Perm]> {
        self.enumerate(DEFAULT_MAX_GROUP_ELEMENTS)
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn contains(&self, p: &Perm) -> Result<bool> {
        Ok(self.elements()?.binary_search(p).is_ok())
    }

    /// Orbits on `domain`, each sorted, listed by minimum element.
    pub fn orbits(&self, domain: &[usize]) -> Result<Vec<Vec<usize>>> {
        let mut in_domain = vec![false; self.degree];
        for &x in domain {
            in_domain[x] = true;
        }
        for g in &self.generators {
            if domain.iter().any(|&x| !in_domain[g.apply(x)]) {
                return Err(Error::DomainNotInvariant);
            }
        }
        Ok(orbits_of(self.degree, &self.generators, domain))
    }

    /// Orbits on all points.
    pub fn all_orbits(&self) -> Vec<Vec<usize>> {
        let domain: Vec<usize> = (0..self.degree).collect();
        orbits_of(self.degree, &self.generators, &domain)
    }

    /// The subgroup fixing every class of `classes` setwise.
    pub fn partition_stabilizer(&self, classes: &[Vec<usize>]) -> Result<PermGroup> {
        let mut class_of = vec![usize::MAX; self.degree];
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                class_of[x] = i;
            }
        }
        let kept: Vec<Perm> = self
            .elements()?
            .iter()
            .filter(|g| (0..self.degree).all(|x| class_of[g.apply(x)] == class_of[x]))
            .cloned()
            .collect();
        Ok(PermGroup::from_elements(self.degree, kept))
    }
}

/// Orbits of the group generated by `gens`, restricted to `domain`.
pub fn orbits_of(degree: usize, gens: &[Perm], domain: &[usize]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for &x in domain {
            let a = find(&mut parent, x);
            let b = find(&mut parent, g.apply(x));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    let mut buckets: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &x in domain {
        let r = find(&mut parent, x);
        buckets.entry(r).or_default().push(x);
    }
    let mut out: Vec<Vec<usize>> = buckets
        .into_values()
        .map(|mut v| {
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    out.sort_by_key(|o| o[0]);
    out
}

fn closure(degree: usize, gens: &[Perm], cap: usize) -> Result<Vec<Perm>> {
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head].clone();
        head += 1;
        for g in gens {
            let y = x.then(g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::BoundExceeded {
                        what: "permutation group order",
                        actual: seen.len(),
                        limit: cap,
                    });
                }
                queue.push(y);
            }
        }
    }
    Ok(queue)
}

/// Base and strong generating set built by deterministic Schreier-Sims.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<ChainLevel>,
}

#[derive(Clone, Debug)]
struct ChainLevel {
    point: usize,
    gens: Vec<Perm>,
    /// `transversal[x]` maps `point` to `x`, for `x` in the orbit.
    transversal: Vec<Option<Perm>>,
}

impl ChainLevel {
    fn new(degree: usize, point: usize) -> ChainLevel {
        let mut t = vec![None; degree];
        t[point] = Some(Perm::identity(degree));
        ChainLevel {
            point,
            gens: Vec::new(),
            transversal: t,
        }
    }

    fn rebuild_orbit(&mut self) {
        let degree = self.transversal.len();
        self.transversal = vec![None; degree];
        self.transversal[self.point] = Some(Perm::identity(degree));
        let mut queue = vec![self.point];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for g in &self.gens {
                let y = g.apply(x);
                if self.transversal[y].is_none() {
                    let u = self.transversal[x].as_ref().unwrap().then(g);
                    self.transversal[y] = Some(u);
                    queue.push(y);
                }
            }
        }
    }

    fn orbit(&self) -> impl Iterator<Item = usize> + '_ {
        self.transversal
            .iter()
            .enumerate()
            .filter_map(|(x, u)| u.as_ref().map(|_| x))
    }
}

impl StabChain {
    /// The chain for `<gens>` whose base starts with `prefix`.
    pub fn new(degree: usize, gens: &[Perm], prefix: &[usize]) -> Result<StabChain> {
        if gens.iter().any(|g| g.degree() != degree) || prefix.iter().any(|&b| b >= degree) {
            return Err(Error::NotAPermutation(degree));
        }
        let mut chain = StabChain {
            degree,
            levels: prefix.iter().map(|&b| ChainLevel::new(degree, b)).collect(),
        };
        for g in gens.iter().filter(|g| !g.is_identity()) {
            if !chain.levels.iter().any(|l| g.apply(l.point) != l.point) {
                let b = (0..degree).find(|&x| g.apply(x) != x).unwrap();
                chain.levels.push(ChainLevel::new(degree, b));
            }
            // level 0 holds every generator; level i those fixing the first i base points
            for i in 0..chain.levels.len() {
                if i > 0 && g.apply(chain.levels[i - 1].point) != chain.levels[i - 1].point {
                    break;
                }
                chain.levels[i].gens.push(g.clone());
            }
        }
        if chain.levels.is_empty() {
            return Ok(chain);
        }
        for l in &mut chain.levels {
            l.rebuild_orbit();
        }
        let mut i = chain.levels.len() - 1;
        loop {
            match chain.close_level(i) {
                Some(drop) => i = drop,
                None => {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                }
            }
        }
        Ok(chain)
    }

    /// Sifts every Schreier generator of level `i`; on the first that fails,
    /// adds its residue and returns the level to resume from.
    fn close_level(&mut self, i: usize) -> Option<usize> {
        let orbit: Vec<usize> = self.levels[i].orbit().collect();
        let gens = self.levels[i].gens.clone();
        for &x in &orbit {
            for s in &gens {
                let ux = self.levels[i].transversal[x].as_ref().unwrap();
                let y = s.apply(x);
                let uy = self.levels[i].transversal[y].as_ref().unwrap();
                let h = ux.then(s).then(&uy.inverse());
                let (residue, drop) = self.sift_from(h, i + 1);
                if drop == self.levels.len() && residue.is_identity() {
                    continue;
                }
                if drop == self.levels.len() {
                    let b = (0..self.degree).find(|&z| residue.apply(z) != z).unwrap();
                    self.levels.push(ChainLevel::new(self.degree, b));
                }
                for j in i + 1..=drop {
                    self.levels[j].gens.push(residue.clone());
                    self.levels[j].rebuild_orbit();
                }
                return Some(drop);
            }
        }
        None
    }

    fn sift_from(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for j in from..self.levels.len() {
            let l = &self.levels[j];
            let y = g.apply(l.point);
            match &l.transversal[y] {
                Some(u) => g = g.then(&u.inverse()),
                None => return (g, j),
            }
        }
        (g, self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && {
            let (r, d) = self.sift_from(g.clone(), 0);
            d == self.levels.len() && r.is_identity()
        }
    }

    pub fn order(&self) -> num_bigint::BigUint {
        self.levels
            .iter()
            .map(|l| num_bigint::BigUint::from(l.orbit().count()))
            .product()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Generators of the pointwise stabilizer of the first `k` base points.
    pub fn stabilizer_generators(&self, k: usize) -> Vec<Perm> {
        if k < self.levels.len() {
            self.levels[k].gens.clone()
        } else {
            Vec::new()
        }
    }
}
