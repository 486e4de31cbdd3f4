//! Generator-image notation for automorphisms, e.g. `(a,b)->(ab,a0*b)`.
//!
//! The left tuple names the unit vectors of the group in factor order. Each
//! image is a product of factors written by juxtaposition or `*`; a factor is
//! `1`, a name, a name followed by `0` (its involution power `x^{|x|/2}`), and
//! either may carry `^k` with `k` a possibly negative integer.

use crate::aut::{extend, is_isomorphism};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::perm::Perm;

fn split_tuple(s: &str) -> Result<Vec<String>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected a parenthesized tuple, got {s:?}")))?;
    Ok(inner.split(',').map(|t| t.trim().to_string()).collect())
}

fn parse_product(g: &AbelianGroup, names: &[String], term: &str) -> Result<usize> {
    let chars: Vec<char> = term.chars().filter(|c| !c.is_whitespace()).collect();
    let mut i = 0;
    let mut acc = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c == '*' {
            i += 1;
            continue;
        }
        let base = if c == '1' {
            i += 1;
            0
        } else if c.is_ascii_alphabetic() {
            let pos = names
                .iter()
                .position(|n| n.len() == 1 && n.starts_with(c))
                .ok_or_else(|| Error::Parse(format!("unknown generator {c:?}")))?;
            i += 1;
            let mut x = g.unit(pos);
            if i < chars.len() && chars[i] == '0' {
                let o = g.order_of_index(x) as i64;
                if o % 2 != 0 {
                    return Err(Error::Parse(format!("{c}0 needs an element of even order")));
                }
                x = g.scale(x, o / 2);
                i += 1;
            }
            x
        } else {
            return Err(Error::Parse(format!("unexpected {c:?} in {term:?}")));
        };
        let mut value = base;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            if i < chars.len() && chars[i] == '-' {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let k: i64 = chars[start..i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {term:?}")))?;
            value = g.scale(base, k);
        }
        acc = g.add(acc, value);
    }
    Ok(acc)
}

/// Parses one automorphism of `g`.
pub fn parse_automorphism(g: &AbelianGroup, text: &str) -> Result<Perm> {
    let (lhs, rhs) = text
        .split_once("->")
        .ok_or_else(|| Error::Parse(format!("missing '->' in {text:?}")))?;
    let names = split_tuple(lhs)?;
    let images = split_tuple(rhs)?;
    if names.len() != g.factors().len() || images.len() != names.len() {
        return Err(Error::Parse(format!(
            "expected {} generators in {text:?}",
            g.factors().len()
        )));
    }
    let ys: Vec<usize> = images
        .iter()
        .map(|t| parse_product(g, &names, t))
        .collect::<Result<_>>()?;
    let map = extend(g, g, &ys);
    if !is_isomorphism(g, g, &map) {
        return Err(Error::NotAnAutomorphism);
    }
    Ok(Perm::from_images_unchecked(map.iter().map(|&x| x as u32).collect()))
}
