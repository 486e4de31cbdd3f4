//! Automorphisms and isomorphisms of finite abelian groups.
//!
//! A homomorphism out of `C_{n_1} x ... x C_{n_k}` is fixed by the images of
//! the unit vectors. It is injective iff each image `y_i` has order `n_i` and
//! `<y_i>` meets the span of the earlier images trivially; the search below
//! walks exactly those image tuples.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::perm::{Perm, PermGroup, DEFAULT_MAX_GROUP_ELEMENTS};

/// Largest group order for which `Aut(G)` is enumerated.
pub const DEFAULT_MAX_AUT_DOMAIN: usize = 256;

/// Calls `visit` with every isomorphism `src -> dst` as a permutation-like
/// index map (`map[x]` is the image of `x`), in lexicographic order of the
/// generator images. `visit` may stop the walk early.
pub fn for_each_isomorphism<F>(src: &AbelianGroup, dst: &AbelianGroup, mut visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if !src.is_isomorphic_to(dst) {
        return;
    }
    let mut span = vec![false; dst.order()];
    span[0] = true;
    let mut images = Vec::with_capacity(src.factors().len());
    let _ = walk(src, dst, &mut span, &mut images, &mut visit);
}

fn walk<F>(
    src: &AbelianGroup,
    dst: &AbelianGroup,
    span: &mut Vec<bool>,
    images: &mut Vec<usize>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let k = images.len();
    if k == src.factors().len() {
        let map = extend(src, dst, images);
        return visit(&map);
    }
    let d = src.factors()[k];
    let current: Vec<usize> = (0..dst.order()).filter(|&x| span[x]).collect();
    for y in 0..dst.order() {
        if dst.order_of_index(y) != d || span[y] {
            continue;
        }
        let mut m = y;
        let mut disjoint = true;
        for _ in 1..d {
            if span[m] {
                disjoint = false;
                break;
            }
            m = dst.add(m, y);
        }
        if !disjoint {
            continue;
        }
        let saved = span.clone();
        let mut step = y;
        for _ in 1..d {
            for &s in &current {
                span[dst.add(s, step)] = true;
            }
            step = dst.add(step, y);
        }
        images.push(y);
        let flow = walk(src, dst, span, images, visit);
        images.pop();
        *span = saved;
        flow?;
    }
    ControlFlow::Continue(())
}

/// The homomorphism `src -> dst` sending the unit vectors to `images`.
pub fn extend(src: &AbelianGroup, dst: &AbelianGroup, images: &[usize]) -> Vec<usize> {
    (0..src.order())
        .map(|x| {
            src.coords(x)
                .iter()
                .zip(images)
                .fold(0, |acc, (&k, &y)| dst.add(acc, dst.scale(y, k as i64)))
        })
        .collect()
}

/// Checks that an index map is a group isomorphism.
pub fn is_isomorphism(src: &AbelianGroup, dst: &AbelianGroup, map: &[usize]) -> bool {
    if map.len() != src.order() || src.order() != dst.order() {
        return false;
    }
    let mut seen = vec![false; dst.order()];
    for &y in map {
        if y >= dst.order() || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    (0..src.order()).all(|x| {
        src.units()
            .iter()
            .all(|&u| map[src.add(x, u)] == dst.add(map[x], map[u]))
    })
}

/// Whether a permutation of `G` is an automorphism.
pub fn is_automorphism(g: &AbelianGroup, p: &Perm) -> bool {
    let map: Vec<usize> = (0..g.order()).map(|x| p.apply(x)).collect();
    p.degree() == g.order() && is_isomorphism(g, g, &map)
}

type AutCache = Mutex<HashMap<Vec<u32>, Arc<PermGroup>>>;

fn aut_cache() -> &'static AutCache {
    static CACHE: OnceLock<AutCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Fully enumerated `Aut(G)` as a permutation group on element indices; cached.
pub fn automorphism_group(g: &AbelianGroup) -> Result<Arc<PermGroup>> {
    automorphism_group_bounded(g, DEFAULT_MAX_AUT_DOMAIN, DEFAULT_MAX_GROUP_ELEMENTS)
}

pub fn automorphism_group_bounded(
    g: &AbelianGroup,
    max_domain: usize,
    max_elements: usize,
) -> Result<Arc<PermGroup>> {
    if g.order() > max_domain {
        return Err(Error::BoundExceeded {
            what: "group order for automorphism enumeration",
            actual: g.order(),
            limit: max_domain,
        });
    }
    if let Some(hit) = aut_cache().lock().unwrap().get(g.factors()) {
        let n = hit.elements()?.len();
        if n > max_elements {
            return Err(Error::BoundExceeded {
                what: "automorphism group order",
                actual: n,
                limit: max_elements,
            });
        }
        return Ok(hit.clone());
    }
    let mut elements = Vec::new();
    let mut overflow = false;
    for_each_isomorphism(g, g, |map| {
        if elements.len() >= max_elements {
            overflow = true;
            return ControlFlow::Break(());
        }
        elements.push(Perm::from_images_unchecked(
            map.iter().map(|&x| x as u32).collect(),
        ));
        ControlFlow::Continue(())
    });
    if overflow {
        return Err(Error::BoundExceeded {
            what: "automorphism group order",
            actual: max_elements + 1,
            limit: max_elements,
        });
    }
    let group = Arc::new(PermGroup::from_elements(g.order(), elements));
    aut_cache()
        .lock()
        .unwrap()
        .insert(g.factors().to_vec(), group.clone());
    Ok(group)
}

/// `x -> m x` for `m` coprime to the exponent.
pub fn power_automorphism(g: &AbelianGroup, m: i64) -> Result<Perm> {
    if crate::arith::gcd(m.unsigned_abs(), g.order() as u64) != 1 && g.order() > 1 {
        return Err(Error::InvalidMultiplier(m));
    }
    Ok(Perm::from_images_unchecked(
        (0..g.order()).map(|x| g.scale(x, m) as u32).collect(),
    ))
}
