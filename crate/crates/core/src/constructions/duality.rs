//! The dual S-ring, decided by exact arithmetic in `Z[zeta_m]`.

use std::collections::BTreeMap;

use crate::arith::divisors;
use crate::error::{Error, Result};
use crate::sring::{make_sring, SRing};

/// Integer coefficients of the cyclotomic polynomial `Phi_m`, lowest degree first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    // x^m - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in divisors(m) {
        if d < m {
            num = exact_divide(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dn = den.len() - 1;
    let lead = den[dn];
    let qn = r.len() - 1 - dn;
    let mut q = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = r[i + dn] / lead;
        q[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            r[i + j] -= c * dj;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// Reduces `sum_k c_k x^k` modulo the monic polynomial `modulus`.
pub fn reduce_mod(mut poly: Vec<i64>, modulus: &[i64]) -> Vec<i64> {
    let d = modulus.len() - 1;
    for i in (d..poly.len()).rev() {
        let c = poly[i];
        if c != 0 {
            for (j, &mj) in modulus.iter().enumerate() {
                poly[i - d + j] -= c * mj;
            }
        }
    }
    poly.truncate(d);
    poly
}

/// Canonical form of `sum_{x in X} zeta^{t(chi, x)}`.
pub(crate) fn character_sum(
    g: &crate::group::AbelianGroup,
    chi: usize,
    set: &[usize],
    phi: &[i64],
) -> Vec<i64> {
    let m = g.exponent() as usize;
    let mut poly = vec![0i64; m.max(1)];
    for &x in set {
        poly[g.pairing_exponent(chi, x) as usize] += 1;
    }
    reduce_mod(poly, phi)
}

/// `A^` over the dual group (identified with `G`).
pub fn dual(a: &SRing) -> Result<SRing> {
    let g = a.group();
    let phi = cyclotomic_polynomial(g.exponent() as u64);
    let mut buckets: BTreeMap<Vec<Vec<i64>>, Vec<usize>> = BTreeMap::new();
    for chi in 0..g.order() {
        let key: Vec<Vec<i64>> = a
            .classes()
            .iter()
            .map(|c| character_sum(g, chi, c, &phi))
            .collect();
        buckets.entry(key).or_default().push(chi);
    }
    let classes: Vec<Vec<usize>> = buckets.into_values().collect();
    make_sring(g, classes).map_err(|e| Error::ResultFailsAxioms(format!("dual: {e}")))
}
