//! Sparse multivariate polynomials over `F_q`.
//!
//! Exponents are kept symbolically; the reduction `x^q = x` is a separate,
//! explicit [`MultiPoly::normalize`] pass.

use std::collections::BTreeMap;
use std::ops::Range;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gf::{BaseField, Fq};
use crate::linalg::Matrix;

/// A power product, stored as `(variable, exponent)` pairs sorted by
/// variable with every exponent positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(SmallVec<[(u16, u16); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(i: usize) -> Self {
        Self(smallvec::smallvec![(i as u16, 1)])
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Self(
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i as u16, e as u16))
                .collect(),
        )
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        let mut out = vec![0; nvars];
        for &(v, e) in &self.0 {
            out[v as usize] = e as u32;
        }
        out
    }

    /// `(variable, exponent)` pairs with positive exponent.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (v as usize, e as u32))
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0
            .iter()
            .find(|&&(v, _)| v as usize == var)
            .map_or(0, |&(_, e)| e as u32)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    /// Total degree in the variables of `block`.
    pub fn degree_in(&self, block: Range<usize>) -> u32 {
        self.0
            .iter()
            .filter(|&&(v, _)| block.contains(&(v as usize)))
            .map(|&(_, e)| e as u32)
            .sum()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v as usize)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }

    /// Applies `x^q = x` to every exponent.
    pub fn normalized(&self, q: usize) -> Self {
        let q1 = (q - 1) as u16;
        Self(self.0.iter().map(|&(v, e)| (v, (e - 1) % q1 + 1)).collect())
    }

    pub fn eval(&self, f: &BaseField, point: &[Fq]) -> Fq {
        self.0
            .iter()
            .fold(1, |acc, &(v, e)| f.mul(acc, f.pow(point[v as usize], e as u64)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Fq>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Fq) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Monomial::one(), c);
        }
        Self { nvars, terms }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(i), 1);
        Self { nvars, terms }
    }

    /// Builds from `(monomial, coefficient)` pairs, summing duplicates.
    pub fn from_terms(f: &BaseField, nvars: usize, terms: impl IntoIterator<Item = (Monomial, Fq)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(f, m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Fq)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Fq {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, block: Range<usize>) -> Option<u32> {
        self.terms.keys().map(|m| m.degree_in(block.clone())).max()
    }

    pub fn add_term(&mut self, f: &BaseField, m: Monomial, c: Fq) {
        if c == 0 {
            return;
        }
        debug_assert!(m.max_var().is_none_or(|v| v < self.nvars));
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = f.add(*e.get(), c);
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            Err(Error::VariableMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, f: &BaseField, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(f, m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, f: &BaseField, other: &Self) -> Result<Self> {
        self.add(f, &other.scale(f, f.neg(1)))
    }

    pub fn scale(&self, f: &BaseField, c: Fq) -> Self {
        if c == 0 {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, &x)| (m.clone(), f.mul(c, x))).collect(),
        }
    }

    pub fn mul(&self, f: &BaseField, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(f, ma.mul(mb), f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, f: &BaseField, e: u32) -> Self {
        (0..e).fold(Self::constant(self.nvars, 1), |acc, _| acc.mul(f, self).unwrap())
    }

    pub fn eval(&self, f: &BaseField, point: &[Fq]) -> Fq {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong length");
        self.terms()
            .fold(0, |acc, (m, c)| f.add(acc, f.mul(c, m.eval(f, point))))
    }

    /// Applies `x_i^q = x_i` to every variable; the result represents the same
    /// function on `F_q^nvars`.
    pub fn normalize(&self, f: &BaseField) -> Self {
        Self::from_terms(
            f,
            self.nvars,
            self.terms().map(|(m, c)| (m.normalized(f.order()), c)),
        )
    }

    /// Fixes the variables `offset..offset + values.len()` to `values`.
    pub fn partial_eval(&self, f: &BaseField, offset: usize, values: &[Fq]) -> Self {
        let block = offset..offset + values.len();
        let mut out = Self::zero(self.nvars);
        for (m, c) in self.terms() {
            let mut kept: SmallVec<[(u16, u16); 4]> = SmallVec::new();
            let mut coef = c;
            for (v, e) in m.factors() {
                if block.contains(&v) {
                    coef = f.mul(coef, f.pow(values[v - offset], e as u64));
                } else {
                    kept.push((v as u16, e as u16));
                }
            }
            out.add_term(f, Monomial(kept), coef);
        }
        out
    }

    /// Replaces `u_i` (variable `offset + i`) by `sum_j M_ij x_j + c_i`, where
    /// `x_j` reuses the slot `offset + j`, and expands.
    pub fn substitute_affine(&self, f: &BaseField, m: &Matrix, c: &[Fq], offset: usize) -> Result<Self> {
        let dim = m.rows();
        if m.cols() != dim || c.len() != dim || offset + dim > self.nvars {
            return Err(Error::LengthMismatch { expected: dim, found: c.len() });
        }
        if m.rank(f) < dim {
            return Err(Error::SingularMatrix);
        }
        let forms: Vec<MultiPoly> = (0..dim)
            .map(|i| {
                let mut p = Self::constant(self.nvars, c[i]);
                for j in 0..dim {
                    p.add_term(f, Monomial::var(offset + j), m.get(i, j));
                }
                p
            })
            .collect();
        let mut powers: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        let mut out = Self::zero(self.nvars);
        for (mono, coef) in self.terms() {
            let mut rest: SmallVec<[(u16, u16); 4]> = SmallVec::new();
            let mut acc = Self::constant(self.nvars, coef);
            for (v, e) in mono.factors() {
                if (offset..offset + dim).contains(&v) {
                    let p = powers
                        .entry((v, e))
                        .or_insert_with(|| forms[v - offset].pow(f, e))
                        .clone();
                    acc = acc.mul(f, &p)?;
                } else {
                    rest.push((v as u16, e as u16));
                }
            }
            let outer = Monomial(rest);
            for (m2, c2) in acc.terms() {
                out.add_term(f, m2.mul(&outer), c2);
            }
        }
        Ok(out)
    }

    /// Values at every point of `F_q^k` where only the first `k` variables
    /// occur, indexed by the base-`q` integer of the point (variable 0 least
    /// significant). Over `F_2` this is the binary Moebius transform of the
    /// normalized coefficients.
    pub fn value_table(&self, f: &BaseField, k: usize) -> Result<Vec<Fq>> {
        if self.terms.keys().any(|m| m.max_var().is_some_and(|v| v >= k)) {
            return Err(Error::InvalidParams("polynomial uses variables beyond the table".into()));
        }
        let q = f.order();
        let size = (q as u128)
            .checked_pow(k as u32)
            .filter(|&s| s <= 1 << 26)
            .ok_or(Error::TooLarge((q as u128).saturating_pow(k as u32)))? as usize;
        if q == 2 {
            let mut table = vec![0u8; size];
            for (m, c) in self.normalize(f).terms() {
                let idx: usize = m.factors().map(|(v, _)| 1usize << v).sum();
                table[idx] ^= c;
            }
            for bit in 0..k {
                let step = 1usize << bit;
                for idx in 0..size {
                    if idx & step != 0 {
                        table[idx] ^= table[idx ^ step];
                    }
                }
            }
            return Ok(table);
        }
        let mut point = vec![0 as Fq; self.nvars];
        let mut out = Vec::with_capacity(size);
        for idx in 0..size {
            let mut rest = idx;
            for slot in point.iter_mut().take(k) {
                *slot = (rest % q) as Fq;
                rest /= q;
            }
            out.push(self.eval(f, &point));
        }
        Ok(out)
    }
}
