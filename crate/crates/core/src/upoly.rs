//! Univariate polynomials over the extension field and complete root finding.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ext::{ExtensionField, FieldElement};

/// Polynomial over `K`, coefficients low to high, leading coefficient nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPolyK {
    coeffs: Vec<FieldElement>,
}

impl UniPolyK {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `X`.
    pub fn x(k: &ExtensionField) -> Self {
        Self { coeffs: vec![k.zero(), k.one()] }
    }

    /// Product of `(X - r)` over the given roots.
    pub fn from_roots(k: &ExtensionField, roots: &[FieldElement]) -> Self {
        roots.iter().fold(Self::constant(k.one()), |acc, r| {
            acc.mul(k, &Self::from_coeffs(vec![k.neg(r), k.one()]))
        })
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, k: &ExtensionField, a: &FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(k.zero(), |acc, c| k.add(&k.mul(&acc, a), c))
    }

    pub fn add(&self, k: &ExtensionField, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = k.zero();
        Self::from_coeffs(
            (0..len)
                .map(|i| {
                    k.add(
                        self.coeffs.get(i).unwrap_or(&zero),
                        other.coeffs.get(i).unwrap_or(&zero),
                    )
                })
                .collect(),
        )
    }

    pub fn sub(&self, k: &ExtensionField, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = k.zero();
        Self::from_coeffs(
            (0..len)
                .map(|i| {
                    k.sub(
                        self.coeffs.get(i).unwrap_or(&zero),
                        other.coeffs.get(i).unwrap_or(&zero),
                    )
                })
                .collect(),
        )
    }

    pub fn mul(&self, k: &ExtensionField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![k.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    k.add_assign(&mut out[i + j], &k.mul(a, b));
                }
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, k: &ExtensionField, c: &FieldElement) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| k.mul(c, x)).collect())
    }

    pub fn monic(&self, k: &ExtensionField) -> Self {
        match self.coeffs.last() {
            None => Self::zero(),
            Some(lead) => self.scale(k, &k.inv(lead).expect("leading coefficient is nonzero")),
        }
    }

    /// Euclidean division: `self = quotient * d + remainder`, `deg remainder < deg d`.
    pub fn divmod(&self, k: &ExtensionField, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = k.inv(&d.coeffs[dd])?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quo = vec![k.zero(); r.len() - dd];
        for deg in (dd..r.len()).rev() {
            if r[deg].is_zero() {
                continue;
            }
            let factor = k.mul(&r[deg], &lead_inv);
            for (i, c) in d.coeffs.iter().enumerate() {
                let idx = deg - dd + i;
                r[idx] = k.sub(&r[idx], &k.mul(&factor, c));
            }
            quo[deg - dd] = factor;
        }
        r.truncate(dd);
        Ok((Self::from_coeffs(quo), Self::from_coeffs(r)))
    }

    pub fn rem(&self, k: &ExtensionField, d: &Self) -> Result<Self> {
        Ok(self.divmod(k, d)?.1)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(k: &ExtensionField, a: &Self, b: &Self) -> Self {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = x.rem(k, &y).expect("divisor is nonzero");
            x = y;
            y = r;
        }
        x.monic(k)
    }

    pub fn mulmod(&self, k: &ExtensionField, other: &Self, m: &Self) -> Result<Self> {
        self.mul(k, other).rem(k, m)
    }

    pub fn powmod(&self, k: &ExtensionField, mut e: u128, m: &Self) -> Result<Self> {
        let mut base = self.rem(k, m)?;
        let mut acc = Self::constant(k.one()).rem(k, m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(k, &base, m)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mulmod(k, &base, m)?;
            }
        }
        Ok(acc)
    }

    /// Formal derivative.
    pub fn derivative(&self, k: &ExtensionField) -> Self {
        let f = k.base();
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| k.scale(f.from_int(i as u64), c))
                .collect(),
        )
    }
}

/// All roots of `g` in `K`, without multiplicity, sorted.
///
/// The distinct roots are isolated as `gcd(g, X^(q^n) - X)` and then separated
/// by equal-degree splitting: trace maps `Tr(cX)` in characteristic 2 and
/// `(X + a)^((q^n - 1)/2) - 1` otherwise.
pub fn roots<R: Rng + ?Sized>(
    k: &ExtensionField,
    g: &UniPolyK,
    rng: &mut R,
) -> Result<Vec<FieldElement>> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g = g.monic(k);
    if g.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let x = UniPolyK::x(k);
    let q = k.q() as u128;
    let mut frob = x.rem(k, &g)?;
    for _ in 0..k.degree() {
        frob = frob.powmod(k, q, &g)?;
    }
    let split = UniPolyK::gcd(k, &g, &frob.sub(k, &x));
    let mut out = Vec::new();
    split_linear(k, split, rng, &mut out)?;
    out.sort();
    Ok(out)
}

/// `g` is monic, squarefree and a product of linear factors.
fn split_linear<R: Rng + ?Sized>(
    k: &ExtensionField,
    g: UniPolyK,
    rng: &mut R,
    out: &mut Vec<FieldElement>,
) -> Result<()> {
    match g.degree() {
        None | Some(0) => return Ok(()),
        Some(1) => {
            out.push(k.neg(&g.coeffs[0]));
            return Ok(());
        }
        _ => {}
    }
    let deg = g.degree().unwrap();
    loop {
        let probe = if k.base().characteristic() == 2 {
            trace_probe(k, &g, rng)?
        } else {
            quadratic_character_probe(k, &g, rng)?
        };
        let d = UniPolyK::gcd(k, &g, &probe);
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && dd < deg {
            let (rest, _) = g.divmod(k, &d)?;
            split_linear(k, d, rng, out)?;
            split_linear(k, rest.monic(k), rng, out)?;
            return Ok(());
        }
    }
}

/// `sum_{i < r n} (cX)^(2^i) mod g` for random `c`, `q = 2^r`.
fn trace_probe<R: Rng + ?Sized>(k: &ExtensionField, g: &UniPolyK, rng: &mut R) -> Result<UniPolyK> {
    let c = k.random_nonzero(rng);
    let bits = k.base().degree() as usize * k.degree();
    let mut w = UniPolyK::from_coeffs(vec![k.zero(), c]).rem(k, g)?;
    let mut acc = w.clone();
    for _ in 1..bits {
        w = w.mulmod(k, &w, g)?;
        acc = acc.add(k, &w);
    }
    Ok(acc)
}

/// `(X + a)^((q^n - 1)/2) - 1 mod g`, using
/// `(q^n - 1)/2 = ((q - 1)/2) * (1 + q + ... + q^(n-1))`.
fn quadratic_character_probe<R: Rng + ?Sized>(
    k: &ExtensionField,
    g: &UniPolyK,
    rng: &mut R,
) -> Result<UniPolyK> {
    let q = k.q() as u128;
    let a = k.random(rng);
    let w = UniPolyK::from_coeffs(vec![a, k.one()]).rem(k, g)?;
    let mut term = w.clone();
    let mut norm = w;
    for _ in 1..k.degree() {
        term = term.powmod(k, q, g)?;
        norm = norm.mulmod(k, &term, g)?;
    }
    let s = norm.powmod(k, (q - 1) / 2, g)?;
    Ok(s.sub(k, &UniPolyK::constant(k.one())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exhaustive_roots(k: &ExtensionField, g: &UniPolyK) -> Vec<FieldElement> {
        let mut v: Vec<FieldElement> = (0..k.order().unwrap())
            .map(|i| k.element_from_index(i))
            .filter(|a| g.eval(k, a).is_zero())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn x_squared_plus_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in [2, 5, 16] {
            let k = ExtensionField::build(2, n, None).unwrap();
            let g = UniPolyK::from_coeffs(vec![k.zero(), k.one(), k.one()]);
            assert_eq!(roots(&k, &g, &mut rng).unwrap(), vec![k.zero(), k.one()]);
        }
    }

    #[test]
    fn gf4_x2_x_1_roots_are_outside_f2() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let k = ExtensionField::build(2, 2, Some(vec![1, 1, 1])).unwrap();
        let g = UniPolyK::from_coeffs(vec![k.one(), k.one(), k.one()]);
        let r = roots(&k, &g, &mut rng).unwrap();
        let z = k.generator();
        let z1 = k.add(&z, &k.one());
        assert_eq!(r, vec![z, z1]);
        assert_eq!(r, exhaustive_roots(&k, &g));
    }

    #[test]
    fn zero_polynomial_rejected() {
        let k = ExtensionField::build(2, 4, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(roots(&k, &UniPolyK::zero(), &mut rng), Err(Error::ZeroPolynomial));
        let c = UniPolyK::constant(k.generator());
        assert!(roots(&k, &c, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn euclidean_properties() {
        let k = ExtensionField::build(2, 8, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // (X^2 + 1) / (X + 1) = X + 1
        let x2p1 = UniPolyK::from_coeffs(vec![k.one(), k.zero(), k.one()]);
        let xp1 = UniPolyK::from_coeffs(vec![k.one(), k.one()]);
        let (quo, r) = x2p1.divmod(&k, &xp1).unwrap();
        assert_eq!(quo, xp1);
        assert!(r.is_zero());
        assert_eq!(x2p1.divmod(&k, &UniPolyK::zero()), Err(Error::DivisionByZero));
        assert_eq!(UniPolyK::gcd(&k, &x2p1.scale(&k, &k.generator()), &UniPolyK::zero()), x2p1);
        for _ in 0..100 {
            let a = UniPolyK::from_coeffs((0..rng.gen_range(1..12)).map(|_| k.random(&mut rng)).collect());
            let d = UniPolyK::from_coeffs((0..rng.gen_range(1..6)).map(|_| k.random(&mut rng)).collect());
            if d.is_zero() {
                continue;
            }
            let (quo, r) = a.divmod(&k, &d).unwrap();
            assert_eq!(quo.mul(&k, &d).add(&k, &r), a);
            assert!(r.degree().is_none_or(|rd| rd < d.degree().unwrap()));
            let g = UniPolyK::gcd(&k, &a, &d);
            if !g.is_zero() {
                assert!(a.rem(&k, &g).unwrap().is_zero());
                assert!(d.rem(&k, &g).unwrap().is_zero());
                assert!(g.coeffs().last().unwrap() == &k.one());
            }
        }
    }

    #[test]
    fn random_degree_six_over_gf2_12_matches_exhaustive() {
        let k = ExtensionField::build(2, 12, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..10 {
            let g = if trial % 2 == 0 {
                UniPolyK::from_coeffs((0..7).map(|_| k.random(&mut rng)).collect())
            } else {
                let planted: Vec<_> = (0..3).map(|_| k.random(&mut rng)).collect();
                UniPolyK::from_roots(&k, &planted)
                    .mul(&k, &UniPolyK::from_coeffs((0..4).map(|_| k.random(&mut rng)).collect()))
            };
            if g.is_zero() {
                continue;
            }
            let found = roots(&k, &g, &mut rng).unwrap();
            assert_eq!(found, exhaustive_roots(&k, &g));
            for r in &found {
                assert!(g.eval(&k, r).is_zero());
            }
        }
    }

    #[test]
    fn odd_characteristic_and_repeated_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (q, n) in [(3, 5), (5, 3), (9, 2), (7, 3)] {
            let k = ExtensionField::build(q, n, None).unwrap();
            for _ in 0..10 {
                let r1 = k.random(&mut rng);
                let r2 = k.random(&mut rng);
                let g = UniPolyK::from_roots(&k, &[r1.clone(), r1.clone(), r2.clone()])
                    .mul(&k, &UniPolyK::from_coeffs((0..3).map(|_| k.random_nonzero(&mut rng)).collect()));
                let found = roots(&k, &g, &mut rng).unwrap();
                assert_eq!(found, exhaustive_roots(&k, &g));
                assert!(found.contains(&r1) && found.contains(&r2));
            }
        }
    }

    #[test]
    fn derivative_of_square_vanishes_in_char_two() {
        let k = ExtensionField::build(2, 6, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = UniPolyK::from_coeffs((0..4).map(|_| k.random(&mut rng)).collect());
        assert!(a.mul(&k, &a).derivative(&k).is_zero());
    }
}
