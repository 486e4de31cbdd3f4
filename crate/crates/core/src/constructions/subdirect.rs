//! Subdirect products `K(K1, K1_0, K2, K2_0, psi)` of automorphism groups of
//! the factors of `G1 x G2`.

use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::perm::{Perm, PermGroup};

/// Cosets of `k0` in `k`, each sorted, listed by least element.
pub fn coset_table(k: &PermGroup, k0: &PermGroup) -> Result<Vec<Vec<Perm>>> {
    let elems = k.elements()?;
    let sub = k0.elements()?;
    if sub.iter().any(|s| elems.binary_search(s).is_err()) {
        return Err(Error::Precondition("K_0 is not contained in K".into()));
    }
    let mut seen = vec![false; elems.len()];
    let mut cosets = Vec::new();
    for (i, x) in elems.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let mut c: Vec<Perm> = sub.iter().map(|s| s.then(x)).collect();
        c.sort();
        for y in &c {
            let j = elems.binary_search(y).expect("coset inside K");
            seen[j] = true;
        }
        cosets.push(c);
    }
    // normality: left and right cosets agree
    for c in &cosets {
        let x = &c[0];
        let mut right: Vec<Perm> = sub.iter().map(|s| x.then(s)).collect();
        right.sort();
        if &right != c {
            return Err(Error::Precondition("K_0 is not normal in K".into()));
        }
    }
    Ok(cosets)
}

fn coset_index(cosets: &[Vec<Perm>], p: &Perm) -> usize {
    cosets
        .iter()
        .position(|c| c.binary_search(p).is_ok())
        .expect("element lies in some coset")
}

#[derive(Clone, Debug)]
pub struct SubdirectSpec {
    pub g1: AbelianGroup,
    pub g2: AbelianGroup,
    pub k1: PermGroup,
    pub k1_0: PermGroup,
    pub k2: PermGroup,
    pub k2_0: PermGroup,
    /// `psi[i] = j`: the i-th coset of `K1_0` in `K1` maps to the j-th coset
    /// of `K2_0` in `K2`, cosets indexed as in [`coset_table`].
    pub psi: Vec<usize>,
}

impl SubdirectSpec {
    /// Builds `psi` automatically for quotients of order at most 3, where any
    /// identity-preserving bijection is an isomorphism.
    pub fn with_small_quotient(
        g1: AbelianGroup,
        g2: AbelianGroup,
        k1: PermGroup,
        k1_0: PermGroup,
        k2: PermGroup,
        k2_0: PermGroup,
    ) -> Result<SubdirectSpec> {
        let c1 = coset_table(&k1, &k1_0)?;
        let c2 = coset_table(&k2, &k2_0)?;
        if c1.len() != c2.len() {
            return Err(Error::NotAnIsomorphism("quotient orders differ".into()));
        }
        if c1.len() > 3 {
            return Err(Error::Precondition(
                "automatic pairing needs a quotient of order at most 3".into(),
            ));
        }
        let spec = SubdirectSpec {
            g1,
            g2,
            k1,
            k1_0,
            k2,
            k2_0,
            psi: (0..c1.len()).collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Pairs the coset of `s^i` with the coset of `t^i`, for `s`, `t` whose
    /// cosets generate the (cyclic) quotients.
    #[allow(clippy::too_many_arguments)]
    pub fn with_cyclic_quotient(
        g1: AbelianGroup,
        g2: AbelianGroup,
        k1: PermGroup,
        k1_0: PermGroup,
        k2: PermGroup,
        k2_0: PermGroup,
        s: &Perm,
        t: &Perm,
    ) -> Result<SubdirectSpec> {
        let c1 = coset_table(&k1, &k1_0)?;
        let c2 = coset_table(&k2, &k2_0)?;
        let mut psi = vec![usize::MAX; c1.len()];
        let (mut si, mut ti) = (Perm::identity(g1.order()), Perm::identity(g2.order()));
        for _ in 0..c1.len() {
            let i = coset_index(&c1, &si);
            if psi[i] != usize::MAX {
                return Err(Error::NotAnIsomorphism("s does not generate the quotient".into()));
            }
            psi[i] = coset_index(&c2, &ti);
            si = si.then(s);
            ti = ti.then(t);
        }
        let spec = SubdirectSpec {
            g1,
            g2,
            k1,
            k1_0,
            k2,
            k2_0,
            psi,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks that `psi` is an isomorphism `K1/K1_0 -> K2/K2_0`.
    pub fn validate(&self) -> Result<()> {
        let c1 = coset_table(&self.k1, &self.k1_0)?;
        let c2 = coset_table(&self.k2, &self.k2_0)?;
        if c1.len() != c2.len() || self.psi.len() != c1.len() {
            return Err(Error::NotAnIsomorphism("quotient orders differ".into()));
        }
        let mut hit = vec![false; c2.len()];
        for &j in &self.psi {
            if j >= c2.len() || hit[j] {
                return Err(Error::NotAnIsomorphism("psi is not a bijection".into()));
            }
            hit[j] = true;
        }
        let id1 = coset_index(&c1, &Perm::identity(self.g1.order()));
        let id2 = coset_index(&c2, &Perm::identity(self.g2.order()));
        if self.psi[id1] != id2 {
            return Err(Error::NotAnIsomorphism("identity coset not preserved".into()));
        }
        for a in 0..c1.len() {
            for b in 0..c1.len() {
                let prod = coset_index(&c1, &c1[a][0].then(&c1[b][0]));
                let image = coset_index(&c2, &c2[self.psi[a]][0].then(&c2[self.psi[b]][0]));
                if self.psi[prod] != image {
                    return Err(Error::NotAnIsomorphism(format!(
                        "products of cosets {a} and {b} not respected"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `{(s, t) : psi(s K1_0) = t K2_0}` acting coordinatewise on `G1 x G2`.
pub fn subdirect_k(spec: &SubdirectSpec) -> Result<PermGroup> {
    spec.validate()?;
    let c1 = coset_table(&spec.k1, &spec.k1_0)?;
    let c2 = coset_table(&spec.k2, &spec.k2_0)?;
    let n2 = spec.g2.order();
    let degree = spec.g1.order() * n2;
    let mut elements = Vec::new();
    for (i, coset) in c1.iter().enumerate() {
        for s in coset {
            for t in &c2[spec.psi[i]] {
                let images: Vec<u32> = (0..degree)
                    .map(|x| (s.apply(x / n2) * n2 + t.apply(x % n2)) as u32)
                    .collect();
                elements.push(Perm::from_images_unchecked(images));
            }
        }
    }
    Ok(PermGroup::from_elements(degree, elements))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aut::automorphism_group;
    use crate::group::make_group;

    #[test]
    fn full_product_when_quotients_trivial() {
        let g1 = make_group(&[4, 2]).unwrap();
        let g2 = make_group(&[3]).unwrap();
        let k1 = (*automorphism_group(&g1).unwrap()).clone();
        let k2 = (*automorphism_group(&g2).unwrap()).clone();
        let spec = SubdirectSpec::with_small_quotient(
            g1, g2, k1.clone(), k1.clone(), k2.clone(), k2.clone(),
        )
        .unwrap();
        assert_eq!(subdirect_k(&spec).unwrap().order().unwrap(), 16);
    }

    #[test]
    fn index_two_subgroup() {
        let g1 = make_group(&[4, 2]).unwrap();
        let g2 = make_group(&[3]).unwrap();
        let k1 = (*automorphism_group(&g1).unwrap()).clone();
        let k2 = (*automorphism_group(&g2).unwrap()).clone();
        let spec = SubdirectSpec::with_small_quotient(
            g1,
            g2.clone(),
            k1.clone(),
            k1.clone(),
            k2.clone(),
            PermGroup::trivial(3),
        );
        assert!(matches!(spec, Err(Error::NotAnIsomorphism(_))));
        let g1 = make_group(&[4]).unwrap();
        let k1 = (*automorphism_group(&g1).unwrap()).clone();
        let spec = SubdirectSpec::with_small_quotient(
            g1,
            g2,
            k1,
            PermGroup::trivial(4),
            k2,
            PermGroup::trivial(3),
        )
        .unwrap();
        let k = subdirect_k(&spec).unwrap();
        assert_eq!(k.order().unwrap(), 2);
    }

    #[test]
    fn rejects_non_isomorphism() {
        let g1 = make_group(&[5]).unwrap();
        let g2 = make_group(&[5]).unwrap();
        let k = (*automorphism_group(&g1).unwrap()).clone();
        let t = PermGroup::trivial(5);
        let cos = coset_table(&k, &t).unwrap();
        assert_eq!(cos.len(), 4);
        // swap two non-identity cosets of a cyclic group of order 4
        let id = coset_index(&cos, &Perm::identity(5));
        let mut psi: Vec<usize> = (0..4).collect();
        let others: Vec<usize> = (0..4).filter(|&i| i != id).collect();
        // the order-2 coset must stay fixed; moving it breaks products
        let order_two = others
            .iter()
            .copied()
            .find(|&i| cos[i][0].then(&cos[i][0]).is_identity())
            .unwrap();
        let other = others.iter().copied().find(|&i| i != order_two).unwrap();
        psi.swap(order_two, other);
        let spec = SubdirectSpec {
            g1,
            g2,
            k1: k.clone(),
            k1_0: t.clone(),
            k2: k,
            k2_0: t,
            psi,
        };
        assert!(matches!(subdirect_k(&spec), Err(Error::NotAnIsomorphism(_))));
    }
}
