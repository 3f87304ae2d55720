//! The base field `F_q`, `q = p^r <= 256`, realized with lookup tables.
//!
//! An element is a `u8` holding the integer `sum d_k p^k`, where `d_k` are
//! the coefficients of its polynomial representative over `F_p` modulo the
//! least monic irreducible polynomial of degree `r`. For `r = 1` this is plain
//! residue arithmetic.

use crate::error::{Error, Result};

/// Element of the base field.
pub type Fq = u8;

#[derive(Clone, Debug)]
pub struct BaseField {
    p: u32,
    r: u32,
    q: usize,
    /// Monic irreducible over `F_p`, low to high, length `r + 1`.
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r
    }
}

impl Eq for BaseField {}

/// Splits `q` as `p^r` with `p` prime, or returns `None`.
pub fn prime_power(q: usize) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut r = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p as u32, r))
}

impl BaseField {
    pub fn new(q: usize) -> Result<Self> {
        let (p, r) = prime_power(q).ok_or(Error::InvalidOrder(q))?;
        if q > 256 {
            return Err(Error::InvalidOrder(q));
        }
        let modulus = least_irreducible_fp(p, r);
        let digits = |mut a: usize| -> Vec<u32> {
            (0..r)
                .map(|_| {
                    let d = (a % p as usize) as u32;
                    a /= p as usize;
                    d
                })
                .collect()
        };
        let undigits = |d: &[u32]| -> u8 {
            d.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize) as u8
        };

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        let mut neg = vec![0u8; q];
        for a in 0..q {
            let da = digits(a);
            let dn: Vec<u32> = da.iter().map(|&x| (p - x) % p).collect();
            neg[a] = undigits(&dn);
            for b in 0..q {
                let db = digits(b);
                let ds: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&ds);
                mul[a * q + b] = undigits(&fp_mulmod(&da, &db, &modulus, p));
            }
        }
        let mut inv = vec![0u8; q];
        for a in 1..q {
            inv[a] = (1..q)
                .find(|&b| mul[a * q + b] == 1)
                .expect("nonzero element without inverse; modulus not irreducible") as u8;
        }
        Ok(Self { p, r, q, modulus, add, mul, neg, inv })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Modulus defining `F_q` over `F_p`, low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.inv[a as usize])
        }
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_valid(&self, a: Fq) -> bool {
        (a as usize) < self.q
    }

    /// The element `1 + 1 + ... + 1` (`k` times).
    pub fn from_int(&self, k: u64) -> Fq {
        (k % self.p as u64) as Fq
    }
}

fn fp_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let r = m.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // m is monic
    for d in (r..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        for k in 0..=r {
            let idx = d - r + k;
            prod[idx] = (prod[idx] + p * p - c * m[k] % p) % p;
        }
    }
    prod.truncate(r);
    prod
}

/// Least monic irreducible polynomial of degree `r` over `F_p`, ordering the
/// candidates by the integer whose base-`p` digits are the lower coefficients.
fn least_irreducible_fp(p: u32, r: u32) -> Vec<u32> {
    if r == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(r);
    for code in 0..count {
        let mut poly: Vec<u32> = Vec::with_capacity(r as usize + 1);
        let mut c = code;
        for _ in 0..r {
            poly.push((c % p as u64) as u32);
            c /= p as u64;
        }
        poly.push(1);
        if fp_is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree up to `deg / 2`.
/// Only used for `r <= 8`.
fn fp_is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut div: Vec<u32> = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                div.push((c % p as u64) as u32);
                c /= p as u64;
            }
            div.push(1);
            if fp_rem_is_zero(poly, &div, p) {
                return false;
            }
        }
    }
    true
}

fn fp_rem_is_zero(a: &[u32], m: &[u32], p: u32) -> bool {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    for d in (dm..r.len()).rev() {
        let c = r[d];
        if c == 0 {
            continue;
        }
        for k in 0..=dm {
            let idx = d - dm + k;
            r[idx] = (r[idx] + p * p - c * m[k] % p) % p;
        }
    }
    r[..dm].iter().all(|&x| x == 0)
}
