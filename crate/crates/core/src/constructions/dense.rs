//! Basic sets of dense S-rings over `H x P` with `|P| = p` prime, `p` coprime to `|H|`.

use std::collections::BTreeMap;

use crate::arith::{gcd, is_prime};
use crate::constructions::detect::detect_cyclotomic;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::perm::{orbits_of, PermGroup};
use crate::sring::SRing;

/// `X = union of D x phi(D)` over blocks `D` of a partition of `X_H`.
#[derive(Clone, Debug)]
pub struct BasicSetDecomposition {
    /// Projection of `X` to `H`.
    pub x_h: Vec<usize>,
    /// Projection of `X` to `P`.
    pub x_p: Vec<usize>,
    /// Blocks of `X_H`; `blocks_h[i]` pairs with `blocks_p[i]`.
    pub blocks_h: Vec<Vec<usize>>,
    pub blocks_p: Vec<Vec<usize>>,
    /// Group with `A_P = cyc(K_P, P)`, acting on parent indices (fixing `G \ P`).
    pub k_p: PermGroup,
    /// Subgroup of `K_P` whose orbits on `X_P` are the blocks of `blocks_p`.
    pub k_p0: PermGroup,
}

impl BasicSetDecomposition {
    /// `lambda_X`: the common block size on the `H` side.
    pub fn block_size(&self) -> usize {
        self.blocks_h[0].len()
    }

    pub fn quotient_order(&self) -> Result<usize> {
        Ok(self.k_p.order()? / self.k_p0.order()?)
    }
}

/// Splits class `x` of a dense ring over `H x P` as above.
pub fn decompose_basic_set(
    a: &SRing,
    h: &Subgroup,
    p: &Subgroup,
    x: usize,
) -> Result<BasicSetDecomposition> {
    let g = a.group();
    if !is_prime(p.order() as u64) || gcd(p.order() as u64, h.order() as u64) != 1 {
        return Err(Error::Precondition("|P| must be a prime coprime to |H|".into()));
    }
    if !a.is_dense(h, p)? {
        return Err(Error::Precondition("ring is not dense over H x P".into()));
    }
    let set = a.class(x);
    if set.iter().any(|&z| h.contains(z) || p.contains(z)) {
        return Err(Error::Precondition("basic set meets H or P".into()));
    }
    let n = g.order();
    let mut h_part = vec![0usize; n];
    let mut p_part = vec![0usize; n];
    for &u in h.elements() {
        for &v in p.elements() {
            let z = g.add(u, v);
            h_part[z] = u;
            p_part[z] = v;
        }
    }
    // fiber over each g in X_P
    let mut fibers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &z in set {
        fibers.entry(p_part[z]).or_default().push(h_part[z]);
    }
    let mut by_fiber: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (gp, mut f) in fibers {
        f.sort_unstable();
        by_fiber.entry(f).or_default().push(gp);
    }
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = by_fiber.into_iter().collect();
    blocks.sort();
    let mut x_h: Vec<usize> = blocks.iter().flat_map(|(d, _)| d.iter().copied()).collect();
    let total = x_h.len();
    x_h.sort_unstable();
    x_h.dedup();
    if x_h.len() != total {
        return Err(Error::DecompositionFailure(
            "fibers over X_P neither coincide nor are disjoint".into(),
        ));
    }
    let size = blocks[0].0.len();
    if blocks.iter().any(|(d, l)| d.len() != size || l.len() != blocks[0].1.len()) {
        return Err(Error::DecompositionFailure("blocks are not uniform".into()));
    }
    let mut x_p: Vec<usize> = blocks.iter().flat_map(|(_, l)| l.iter().copied()).collect();
    x_p.sort_unstable();

    // K_P acts on P and fixes the H-coordinate
    let (a_p, embed) = a.restrict_with_embedding(p)?;
    let k_local = detect_cyclotomic(&a_p)?.ok_or_else(|| {
        Error::DecompositionFailure("restriction to P is not cyclotomic".into())
    })?;
    let lift = |perm: &crate::perm::Perm| {
        let images: Vec<u32> = (0..n)
            .map(|z| g.add(h_part[z], embed[perm.apply(local_index(&embed, p_part[z]))]) as u32)
            .collect();
        crate::perm::Perm::from_images_unchecked(images)
    };
    let k_elems: Vec<_> = k_local.elements()?.iter().map(lift).collect();
    let k0_elems: Vec<_> = k_elems
        .iter()
        .filter(|s| {
            blocks
                .iter()
                .all(|(_, l)| s.image_of_set(l) == *l)
        })
        .cloned()
        .collect();
    let orbits = orbits_of(n, &k0_elems, &x_p);
    let mut want: Vec<Vec<usize>> = blocks.iter().map(|(_, l)| l.clone()).collect();
    want.sort();
    if orbits != want {
        return Err(Error::DecompositionFailure(
            "blocks over P are not orbits of a subgroup of K_P".into(),
        ));
    }
    Ok(BasicSetDecomposition {
        x_h,
        x_p,
        blocks_h: blocks.iter().map(|(d, _)| d.clone()).collect(),
        blocks_p: blocks.iter().map(|(_, l)| l.clone()).collect(),
        k_p: PermGroup::from_elements(n, k_elems),
        k_p0: PermGroup::from_elements(n, k0_elems),
    })
}

fn local_index(embed: &[usize], x: usize) -> usize {
    embed.iter().position(|&y| y == x).expect("element of P")
}
