//! Dense univariate polynomials over the base field, low to high, always
//! trimmed. Internal support for the extension-field modulus.

use crate::gf::{BaseField, Fq};

pub(crate) fn trim(mut a: Vec<Fq>) -> Vec<Fq> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn degree(a: &[Fq]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn sub(f: &BaseField, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(out)
}

pub(crate) fn mul(f: &BaseField, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

/// Returns `(quotient, remainder)`. `m` must be nonzero.
pub(crate) fn divrem(f: &BaseField, a: &[Fq], m: &[Fq]) -> (Vec<Fq>, Vec<Fq>) {
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = f.inv(m[dm]).unwrap();
    let mut r = trim(a.to_vec());
    if r.len() <= dm {
        return (Vec::new(), r);
    }
    let mut quo = vec![0; r.len() - dm];
    for d in (dm..r.len()).rev() {
        let c = r[d];
        if c == 0 {
            continue;
        }
        let factor = f.mul(c, lead_inv);
        quo[d - dm] = factor;
        for k in 0..=dm {
            let idx = d - dm + k;
            r[idx] = f.sub(r[idx], f.mul(factor, m[k]));
        }
    }
    r.truncate(dm);
    (trim(quo), trim(r))
}

pub(crate) fn rem(f: &BaseField, a: &[Fq], m: &[Fq]) -> Vec<Fq> {
    divrem(f, a, m).1
}

pub(crate) fn monic(f: &BaseField, a: &[Fq]) -> Vec<Fq> {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = f.inv(a[d]).unwrap();
            a[..=d].iter().map(|&c| f.mul(c, inv)).collect()
        }
    }
}

pub(crate) fn gcd(f: &BaseField, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

pub(crate) fn mulmod(f: &BaseField, a: &[Fq], b: &[Fq], m: &[Fq]) -> Vec<Fq> {
    rem(f, &mul(f, a, b), m)
}

pub(crate) fn powmod(f: &BaseField, a: &[Fq], mut e: u64, m: &[Fq]) -> Vec<Fq> {
    let mut base = rem(f, a, m);
    let mut acc = rem(f, &[1], m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mulmod(f, &base, &base, m);
        }
    }
    acc
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, or `None`
/// when they are not coprime.
pub(crate) fn invmod(f: &BaseField, a: &[Fq], m: &[Fq]) -> Option<Vec<Fq>> {
    let mut r0 = trim(m.to_vec());
    let mut r1 = rem(f, a, m);
    let mut s0: Vec<Fq> = Vec::new();
    let mut s1: Vec<Fq> = vec![1];
    while !r1.is_empty() {
        let (quo, r2) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &quo, &s1));
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if degree(&r0) != Some(0) {
        return None;
    }
    let c = f.inv(r0[0]).unwrap();
    let inv: Vec<Fq> = s0.iter().map(|&x| f.mul(x, c)).collect();
    Some(rem(f, &inv, m))
}

/// Distinct-degree irreducibility test: `g` of degree `n` is irreducible iff
/// `gcd(X^{q^i} - X, g) = 1` for every `1 <= i <= n/2`.
pub(crate) fn is_irreducible(f: &BaseField, g: &[Fq]) -> bool {
    let n = match degree(g) {
        None | Some(0) => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut h = rem(f, &x, g);
    for _ in 1..=n / 2 {
        h = powmod(f, &h, f.order() as u64, g);
        let d = gcd(f, &sub(f, &h, &x), g);
        if degree(&d) != Some(0) {
            return false;
        }
    }
    true
}

/// Whether `g` has a root in the base field.
pub(crate) fn has_base_root(f: &BaseField, g: &[Fq]) -> bool {
    (0..f.order()).any(|c| {
        let c = c as Fq;
        g.iter().rev().fold(0, |acc, &coef| f.add(f.mul(acc, c), coef)) == 0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_matches_trial_division_small() {
        let f = BaseField::new(2).unwrap();
        // degree-4 polynomials over F_2: exactly 3 are irreducible
        let mut count = 0;
        for code in 0u32..16 {
            let mut g: Vec<Fq> = (0..4).map(|k| ((code >> k) & 1) as Fq).collect();
            g.push(1);
            if is_irreducible(&f, &g) {
                count += 1;
            }
        }
        assert_eq!(count, 3);
    }

    #[test]
    fn invmod_roundtrip() {
        let f = BaseField::new(3).unwrap();
        let m = vec![1, 2, 0, 1]; // x^3 + 2x + 1, irreducible over F_3
        assert!(is_irreducible(&f, &m));
        let a = vec![2, 1, 1];
        let inv = invmod(&f, &a, &m).unwrap();
        assert_eq!(mulmod(&f, &a, &inv, &m), vec![1]);
    }
}
