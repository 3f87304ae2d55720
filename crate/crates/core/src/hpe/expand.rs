//! Polynomials in the `x, y` variables with coefficients in `K`.
//!
//! A masked Frobenius power such as `(Ax + c)^(q^k)` is an affine form with
//! coefficients in `K`; products of such forms, projected onto the basis
//! coordinates, give the public equations over `F_q`.

use std::collections::HashMap;

use crate::ext::{ExtensionField, FieldElement};
use crate::gf::Fq;
use crate::linalg::Matrix;
use crate::mvpoly::{Monomial, MultiPoly};

#[derive(Clone, Debug, Default)]
pub(crate) struct KPoly {
    terms: HashMap<Monomial, FieldElement>,
}

impl KPoly {
    pub fn constant(c: FieldElement) -> Self {
        let mut terms = HashMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Self { terms }
    }

    /// `(M z + c)^(q^k)` where `z` occupies variables `offset..offset + n`.
    pub fn frobenius_affine(k: &ExtensionField, m: &Matrix, c: &[Fq], power: usize, offset: usize) -> Self {
        let mut out = Self::constant(k.frobenius(&k.from_coords(c.to_vec()).unwrap(), power));
        for j in 0..m.cols() {
            let col = k.from_coords(m.column(j)).unwrap();
            let coef = k.frobenius(&col, power);
            if !coef.is_zero() {
                out.terms.insert(Monomial::var(offset + j), coef);
            }
        }
        out
    }

    /// Product with exponents reduced by `x^q = x`.
    pub fn mul(&self, k: &ExtensionField, other: &Self) -> Self {
        let q = k.q();
        let mut terms: HashMap<Monomial, FieldElement> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb).normalized(q);
                let c = k.mul(ca, cb);
                match terms.get_mut(&m) {
                    Some(acc) => k.add_assign(acc, &c),
                    None => {
                        terms.insert(m, c);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { terms }
    }

    pub fn add_assign(&mut self, k: &ExtensionField, other: &Self) {
        for (m, c) in &other.terms {
            match self.terms.get_mut(m) {
                Some(acc) => k.add_assign(acc, c),
                None => {
                    self.terms.insert(m.clone(), c.clone());
                }
            }
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    /// Coordinate `i` of every coefficient, for `i = 0..n`.
    pub fn project(&self, k: &ExtensionField, nvars: usize) -> Vec<MultiPoly> {
        let f = k.base();
        let mut eqs = vec![MultiPoly::zero(nvars); k.degree()];
        for (m, c) in &self.terms {
            for (i, &coord) in c.coords().iter().enumerate() {
                if coord != 0 {
                    eqs[i].add_term(f, m.clone(), coord);
                }
            }
        }
        eqs
    }
}

/// Coordinates of `prod_k (Mz + c)^(q^(powers[k]))` as polynomials in
/// `nvars` variables, `z` occupying the first `m.cols()`.
pub(crate) fn expand_frobenius_product(
    k: &ExtensionField,
    m: &Matrix,
    c: &[Fq],
    powers: &[usize],
    nvars: usize,
) -> Vec<MultiPoly> {
    let mut acc = KPoly::constant(k.one());
    for &p in powers {
        acc = acc.mul(k, &KPoly::frobenius_affine(k, m, c, p, 0));
    }
    acc.project(k, nvars)
}
