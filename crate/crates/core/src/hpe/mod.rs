//! The hidden polynomial equations cryptosystem.
//!
//! The private key is a bivariate polynomial `f(X, Y)` over `K` whose mixed
//! monomials have the shape `X^i Y^(q^j)`, with each exponent `i` written as a
//! sum of `q`-powers. Expanding `f(Ax + c, By + d) = 0` over the basis yields
//! `n` public equations over `F_q` that are linear in `y` and nonlinear in
//! `x`. Encryption solves the public system for `y`; decryption finds the
//! roots of the univariate `f(X, By + d)`.

mod cipher;
mod expand;
mod keygen;

use std::ops::Range;

use crate::alphabet::{Alphabet, AlphabetParams};
use crate::error::{Error, Result};
use crate::ext::{ExtensionField, FieldElement};
use crate::gf::{BaseField, Fq};
use crate::linalg::Matrix;
use crate::mvpoly::MultiPoly;
use crate::upoly::UniPolyK;

pub use cipher::{
    decrypt, decrypt_candidates, decrypt_raw, encrypt, encrypt_detailed, encrypt_raw,
    exhaustive_invert, private_relation_check, EncryptConfig, Encrypted, RelationCheck,
};
pub use keygen::{derive_public_equations, keygen, sample_private_polynomial};
pub(crate) use cipher::search_encodings;
pub(crate) use expand::expand_frobenius_product;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyGenParams {
    pub q: usize,
    pub n: usize,
    /// Bound on `n_i + n_j` over the monomials of `f`.
    pub t_max: usize,
    /// Bound on the degree of `f` in `X`, hence on the number of roots found
    /// during decryption.
    pub degx_max: u64,
    /// Mixed monomials `X^i Y^(q^j)`.
    pub mixed_terms: usize,
    /// Monomials `X^i` without a `Y` factor.
    pub pure_terms: usize,
    /// `None` selects [`AlphabetParams::standard`].
    pub alphabet: Option<AlphabetParams>,
}

impl KeyGenParams {
    pub fn new(q: usize, n: usize) -> Self {
        Self { q, n, t_max: 3, degx_max: 9, mixed_terms: 3, pure_terms: 3, alphabet: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDegree(self.n));
        }
        if self.t_max < 2 {
            return Err(Error::InvalidParams(format!("t_max = {} must be at least 2", self.t_max)));
        }
        if !(2..=64).contains(&self.degx_max) {
            return Err(Error::InvalidParams(format!(
                "degree bound in X = {} must lie in 2..=64",
                self.degx_max
            )));
        }
        if self.mixed_terms == 0 {
            return Err(Error::InvalidParams("at least one mixed monomial is required".into()));
        }
        if self.n > u16::MAX as usize / 2 {
            return Err(Error::InvalidParams(format!("n = {} is too large", self.n)));
        }
        Ok(())
    }
}

/// `a X^i Y^(q^j)` with `i = sum_k q^(x_powers[k])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedTerm {
    pub coeff: FieldElement,
    pub x_powers: Vec<usize>,
    pub y_power: usize,
}

/// `b X^i` with `i = sum_k q^(x_powers[k])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureTerm {
    pub coeff: FieldElement,
    pub x_powers: Vec<usize>,
}

pub(crate) fn exponent_from_powers(q: usize, powers: &[usize]) -> u64 {
    powers.iter().map(|&p| (q as u64).pow(p as u32)).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivatePolynomial {
    pub mixed: Vec<MixedTerm>,
    pub pure: Vec<PureTerm>,
    pub constant: FieldElement,
}

impl PrivatePolynomial {
    /// `max(n_i + n_j)` over the monomials, with `n_j = 0` for pure terms.
    pub fn achieved_t(&self) -> usize {
        let mixed = self.mixed.iter().map(|t| t.x_powers.len() + 1);
        let pure = self.pure.iter().map(|t| t.x_powers.len());
        mixed.chain(pure).max().unwrap_or(0)
    }

    pub fn degree_in_x(&self, q: usize) -> u64 {
        let mixed = self.mixed.iter().map(|t| exponent_from_powers(q, &t.x_powers));
        let pure = self.pure.iter().map(|t| exponent_from_powers(q, &t.x_powers));
        mixed.chain(pure).max().unwrap_or(0)
    }

    /// `f(u, v)` computed with integer exponents.
    pub fn eval(&self, k: &ExtensionField, u: &FieldElement, v: &FieldElement) -> FieldElement {
        let q = k.q();
        let mut acc = self.constant.clone();
        for t in &self.mixed {
            let ui = k.pow(u, exponent_from_powers(q, &t.x_powers) as u128);
            let vj = match (q as u128).checked_pow(t.y_power as u32) {
                Some(e) => k.pow(v, e),
                None => k.frobenius(v, t.y_power),
            };
            k.add_assign(&mut acc, &k.mul(&t.coeff, &k.mul(&ui, &vj)));
        }
        for t in &self.pure {
            let ui = k.pow(u, exponent_from_powers(q, &t.x_powers) as u128);
            k.add_assign(&mut acc, &k.mul(&t.coeff, &ui));
        }
        acc
    }

    /// The univariate polynomial `f(X, v)`.
    pub fn specialize(&self, k: &ExtensionField, v: &FieldElement) -> UniPolyK {
        let q = k.q();
        let deg = self.degree_in_x(q) as usize;
        let mut coeffs = vec![k.zero(); deg + 1];
        coeffs[0] = self.constant.clone();
        for t in &self.mixed {
            let i = exponent_from_powers(q, &t.x_powers) as usize;
            let c = k.mul(&t.coeff, &k.frobenius(v, t.y_power));
            k.add_assign(&mut coeffs[i], &c);
        }
        for t in &self.pure {
            let i = exponent_from_powers(q, &t.x_powers) as usize;
            k.add_assign(&mut coeffs[i], &t.coeff);
        }
        UniPolyK::from_coeffs(coeffs)
    }
}

/// `u = A x + c`, `v = B y + d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePair {
    pub a: Matrix,
    pub a_inv: Matrix,
    pub c: Vec<Fq>,
    pub b: Matrix,
    pub b_inv: Matrix,
    pub d: Vec<Fq>,
}

impl AffinePair {
    pub fn identity(n: usize) -> Self {
        Self {
            a: Matrix::identity(n),
            a_inv: Matrix::identity(n),
            c: vec![0; n],
            b: Matrix::identity(n),
            b_inv: Matrix::identity(n),
            d: vec![0; n],
        }
    }

    pub fn random<R: rand::Rng + ?Sized>(f: &BaseField, n: usize, rng: &mut R) -> Self {
        let (a, a_inv) = Matrix::random_invertible(f, n, rng);
        let (b, b_inv) = Matrix::random_invertible(f, n, rng);
        let q = f.order();
        let c = (0..n).map(|_| rng.gen_range(0..q) as Fq).collect();
        let d = (0..n).map(|_| rng.gen_range(0..q) as Fq).collect();
        Self { a, a_inv, c, b, b_inv, d }
    }

    /// Builds the pair from `A, c, B, d`, inverting the matrices.
    pub fn from_parts(f: &BaseField, a: Matrix, c: Vec<Fq>, b: Matrix, d: Vec<Fq>) -> Result<Self> {
        let a_inv = a.inverse(f)?;
        let b_inv = b.inverse(f)?;
        Ok(Self { a, a_inv, c, b, b_inv, d })
    }

    pub fn u_of_x(&self, f: &BaseField, x: &[Fq]) -> Vec<Fq> {
        add_vec(f, &self.a.mul_vec(f, x), &self.c)
    }

    pub fn v_of_y(&self, f: &BaseField, y: &[Fq]) -> Vec<Fq> {
        add_vec(f, &self.b.mul_vec(f, y), &self.d)
    }

    pub fn x_of_u(&self, f: &BaseField, u: &[Fq]) -> Vec<Fq> {
        self.a_inv.mul_vec(f, &sub_vec(f, u, &self.c))
    }

    pub fn y_of_v(&self, f: &BaseField, v: &[Fq]) -> Vec<Fq> {
        self.b_inv.mul_vec(f, &sub_vec(f, v, &self.d))
    }
}

pub(crate) fn add_vec(f: &BaseField, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub(crate) fn sub_vec(f: &BaseField, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeViolation {
    /// A term has degree above one in the `y` block.
    YNonlinear,
    /// No term involves `y`.
    YFree,
    /// No term has degree two or more in `x`.
    XLinear,
    /// Total degree exceeds `t + 1`.
    DegreeTooHigh,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    field: BaseField,
    n: usize,
    t: usize,
    equations: Vec<MultiPoly>,
    alphabet: Alphabet,
}

impl PublicKey {
    pub fn new(field: BaseField, n: usize, t: usize, equations: Vec<MultiPoly>, alphabet: Alphabet) -> Result<Self> {
        if equations.len() != n || equations.iter().any(|e| e.nvars() != 2 * n) {
            return Err(Error::LengthMismatch { expected: n, found: equations.len() });
        }
        if alphabet.q() != field.order() {
            return Err(Error::InvalidParams("alphabet is over a different field".into()));
        }
        alphabet.letters_per_message(n)?;
        Ok(Self { field, n, t, equations, alphabet })
    }

    pub fn field(&self) -> &BaseField {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn x_block(&self) -> Range<usize> {
        0..self.n
    }

    pub fn y_block(&self) -> Range<usize> {
        self.n..2 * self.n
    }

    pub fn term_count(&self) -> usize {
        self.equations.iter().map(MultiPoly::num_terms).sum()
    }

    /// Values of all equations at `(x, y)`.
    pub fn evaluate(&self, x: &[Fq], y: &[Fq]) -> Vec<Fq> {
        let point: Vec<Fq> = x.iter().chain(y).copied().collect();
        self.equations.iter().map(|e| e.eval(&self.field, &point)).collect()
    }

    pub fn is_solution(&self, x: &[Fq], y: &[Fq]) -> bool {
        x.len() == self.n && y.len() == self.n && self.evaluate(x, y).iter().all(|&v| v == 0)
    }

    /// Structural audit of every equation.
    pub fn shape_violations(&self) -> Vec<(usize, ShapeViolation)> {
        let mut out = Vec::new();
        for (i, eq) in self.equations.iter().enumerate() {
            let mut has_y = false;
            let mut x_nonlinear = false;
            for (m, _) in eq.terms() {
                let dy = m.degree_in(self.y_block());
                let dx = m.degree_in(self.x_block());
                if dy > 1 {
                    out.push((i, ShapeViolation::YNonlinear));
                }
                has_y |= dy == 1;
                x_nonlinear |= dx >= 2;
                if m.degree() as usize > self.t + 1 {
                    out.push((i, ShapeViolation::DegreeTooHigh));
                }
            }
            if !has_y {
                out.push((i, ShapeViolation::YFree));
            }
            if !x_nonlinear {
                out.push((i, ShapeViolation::XLinear));
            }
        }
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivateKey {
    field: ExtensionField,
    poly: PrivatePolynomial,
    affine: AffinePair,
    public: PublicKey,
}

impl PrivateKey {
    /// Assembles a private key, checking that the public equations are the
    /// expansion of `poly` under `affine`.
    pub fn new(field: ExtensionField, poly: PrivatePolynomial, affine: AffinePair, public: PublicKey) -> Result<Self> {
        if field.base() != public.field() || field.degree() != public.n() {
            return Err(Error::InvalidParams("private and public fields disagree".into()));
        }
        let derived = derive_public_equations(&field, &poly, &affine);
        if derived != public.equations {
            return Err(Error::InvalidParams(
                "public equations do not match the private polynomial".into(),
            ));
        }
        Ok(Self { field, poly, affine, public })
    }

    pub(crate) fn from_parts_unchecked(
        field: ExtensionField,
        poly: PrivatePolynomial,
        affine: AffinePair,
        public: PublicKey,
    ) -> Self {
        Self { field, poly, affine, public }
    }

    pub fn field(&self) -> &ExtensionField {
        &self.field
    }

    pub fn polynomial(&self) -> &PrivatePolynomial {
        &self.poly
    }

    pub fn affine(&self) -> &AffinePair {
        &self.affine
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.public
    }

    pub fn n(&self) -> usize {
        self.field.degree()
    }

    /// All `u` in `K` with `f(u, v) = 0`.
    pub(crate) fn roots_for_v(&self, v: &FieldElement) -> Result<Vec<FieldElement>> {
        use rand::SeedableRng;
        let g = self.poly.specialize(&self.field, v);
        // Root sets do not depend on the splitting randomness.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0068_7065);
        crate::upoly::roots(&self.field, &g, &mut rng)
    }
}
