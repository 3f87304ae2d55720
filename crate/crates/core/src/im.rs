//! The Imai-Matsumoto scheme `v = u^(q^θ + 1)` with affine masks, published
//! as `n` explicit quadratic forms `y_i(x)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ext::ExtensionField;
use crate::gf::{BaseField, Fq};
use crate::hpe::AffinePair;
use crate::mvpoly::{Monomial, MultiPoly};

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m`, assuming `gcd(a, m) = 1`.
fn inverse_mod(a: u128, m: u128) -> u128 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let quo = r0 / r1;
        (r0, r1) = (r1, r0 - quo * r1);
        (t0, t1) = (t1, t0 - quo * t1);
    }
    t0.rem_euclid(m as i128) as u128
}

fn group_order(q: usize, n: usize) -> Result<u128> {
    match (q as u128).checked_pow(n as u32) {
        Some(order) if order < 1 << 63 => Ok(order - 1),
        other => Err(Error::TooLarge(other.unwrap_or(u128::MAX))),
    }
}

/// Checks that `u -> u^(q^θ + 1)` is a bijection of `K`, returning
/// `(h, h^-1 mod q^n - 1)`.
pub fn check_theta(q: usize, n: usize, theta: usize) -> Result<(u128, u128)> {
    let order = group_order(q, n)?;
    if theta == 0 || theta >= n {
        return Err(Error::InvalidParams(format!("θ = {theta} must lie in 1..{n}")));
    }
    let h = (q as u128).pow(theta as u32) + 1;
    let g = gcd(h, order);
    if g != 1 {
        return Err(Error::BadTheta { h, order, gcd: g });
    }
    Ok((h, inverse_mod(h, order)))
}

/// Least `θ >= 1` for which the map is a bijection.
pub fn default_theta(q: usize, n: usize) -> Result<usize> {
    (1..n)
        .find(|&t| check_theta(q, n, t).is_ok())
        .ok_or_else(|| Error::InvalidParams(format!("no valid θ for q = {q}, n = {n}")))
}

/// The public quadratic map `x -> y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImPublicKey {
    field: BaseField,
    equations: Vec<MultiPoly>,
}

impl ImPublicKey {
    /// Any explicit map `y_i = equations[i](x)`.
    pub fn new(field: BaseField, equations: Vec<MultiPoly>) -> Result<Self> {
        let n = equations.len();
        if n == 0 || equations.iter().any(|e| e.nvars() != n) {
            return Err(Error::LengthMismatch { expected: n, found: equations.first().map_or(0, |e| e.nvars()) });
        }
        Ok(Self { field, equations })
    }

    /// A uniformly random quadratic map, for control experiments.
    pub fn random_quadratic<R: Rng + ?Sized>(field: BaseField, n: usize, rng: &mut R) -> Self {
        let q = field.order();
        let mut monos = vec![Monomial::one()];
        for i in 0..n {
            monos.push(Monomial::var(i));
            for j in i..n {
                let m = Monomial::var(i).mul(&Monomial::var(j)).normalized(q);
                if !monos.contains(&m) {
                    monos.push(m);
                }
            }
        }
        let equations = (0..n)
            .map(|_| {
                MultiPoly::from_terms(&field, n, monos.iter().map(|m| (m.clone(), rng.gen_range(0..q) as Fq)))
            })
            .collect();
        Self { field, equations }
    }

    pub fn field(&self) -> &BaseField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    pub fn encrypt(&self, x: &[Fq]) -> Vec<Fq> {
        self.equations.iter().map(|e| e.eval(&self.field, x)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImKeyPair {
    field: ExtensionField,
    theta: usize,
    h: u128,
    h_inv: u128,
    affine: AffinePair,
    public: ImPublicKey,
}

impl ImKeyPair {
    pub fn generate<R: Rng + ?Sized>(q: usize, n: usize, theta: usize, rng: &mut R) -> Result<Self> {
        let (h, h_inv) = check_theta(q, n, theta)?;
        let field = ExtensionField::build(q, n, None)?;
        let affine = AffinePair::random(field.base(), n, rng);
        let public = ImPublicKey { field: field.base().clone(), equations: public_map(&field, theta, &affine) };
        Ok(Self { field, theta, h, h_inv, affine, public })
    }

    pub fn field(&self) -> &ExtensionField {
        &self.field
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn h(&self) -> u128 {
        self.h
    }

    pub fn h_inv(&self) -> u128 {
        self.h_inv
    }

    pub fn affine(&self) -> &AffinePair {
        &self.affine
    }

    pub fn public_key(&self) -> &ImPublicKey {
        &self.public
    }

    /// `B^-1((A x + c)^h - d)` computed in `K`.
    pub fn encrypt_private(&self, x: &[Fq]) -> Vec<Fq> {
        let f = self.field.base();
        let u = self.field.from_coords(self.affine.u_of_x(f, x)).expect("length n");
        let v = self.field.pow(&u, self.h);
        self.affine.y_of_v(f, v.coords())
    }

    pub fn decrypt(&self, y: &[Fq]) -> Result<Vec<Fq>> {
        let n = self.field.degree();
        if y.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: y.len() });
        }
        let f = self.field.base();
        let v = self.field.from_coords(self.affine.v_of_y(f, y))?;
        let u = self.field.pow(&v, self.h_inv);
        Ok(self.affine.x_of_u(f, u.coords()))
    }
}

/// Coordinates of `y = B^-1((Ax + c)^(q^θ) (Ax + c) - d)` as polynomials in `x`.
fn public_map(k: &ExtensionField, theta: usize, affine: &AffinePair) -> Vec<MultiPoly> {
    use crate::hpe::expand_frobenius_product;
    let f = k.base();
    let n = k.degree();
    let v = expand_frobenius_product(k, &affine.a, &affine.c, &[theta, 0], n);
    (0..n)
        .map(|i| {
            let mut y = MultiPoly::zero(n);
            for (j, vj) in v.iter().enumerate() {
                let b = affine.b_inv.get(i, j);
                if b != 0 {
                    let shifted = vj.sub(f, &MultiPoly::constant(n, affine.d[j])).expect("same nvars");
                    y = y.add(f, &shifted.scale(f, b)).expect("same nvars");
                }
            }
            y
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn theta_conditions() {
        assert_eq!(check_theta(2, 9, 1).unwrap().0, 3);
        assert_eq!(
            check_theta(2, 8, 3).unwrap_err(),
            Error::BadTheta { h: 9, order: 255, gcd: 3 }
        );
        let (h, hi) = check_theta(2, 9, 1).unwrap();
        assert_eq!(h * hi % 511, 1);
        assert_eq!(default_theta(2, 9).unwrap(), 1);
        // 2^1 + 1 = 3 divides 255, 2^2 + 1 = 5 divides 255, 2^3 + 1 = 9 shares 3.
        assert!(default_theta(2, 8).is_err());
        assert!(check_theta(2, 64, 1).is_err());
    }

    #[test]
    fn inverse_mod_small() {
        for m in [7u128, 10, 511, 65535] {
            for a in 1..m.min(200) {
                if gcd(a, m) == 1 {
                    assert_eq!(a * inverse_mod(a, m) % m, 1);
                }
            }
        }
    }

    #[test]
    fn exhaustive_roundtrip_n9() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let kp = ImKeyPair::generate(2, 9, 1, &mut rng).unwrap();
        let pk = kp.public_key();
        let mut seen = std::collections::HashSet::new();
        for idx in 0..512u32 {
            let x: Vec<Fq> = (0..9).map(|b| ((idx >> b) & 1) as Fq).collect();
            let y = pk.encrypt(&x);
            assert_eq!(y, kp.encrypt_private(&x));
            assert_eq!(kp.decrypt(&y).unwrap(), x);
            seen.insert(y);
        }
        assert_eq!(seen.len(), 512);
        assert!(pk.equations().iter().all(|e| e.degree().unwrap_or(0) <= 2));
        assert!(pk.equations().iter().any(|e| e.degree() == Some(2)));
    }

    #[test]
    fn gf4_roundtrip() {
        // Odd q never works: q^θ + 1 and q^n - 1 are both even.
        assert!(default_theta(3, 5).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let theta = default_theta(4, 5).unwrap();
        let kp = ImKeyPair::generate(4, 5, theta, &mut rng).unwrap();
        for _ in 0..50 {
            let x: Vec<Fq> = (0..5).map(|_| rng.gen_range(0..4)).collect();
            let y = kp.public_key().encrypt(&x);
            assert_eq!(y, kp.encrypt_private(&x));
            assert_eq!(kp.decrypt(&y).unwrap(), x);
        }
    }

    #[test]
    fn zero_plaintext_gives_constant_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let kp = ImKeyPair::generate(2, 9, 1, &mut rng).unwrap();
        let pk = kp.public_key();
        let consts: Vec<Fq> = pk.equations().iter().map(|e| e.coeff(&Monomial::one())).collect();
        assert_eq!(pk.encrypt(&[0; 9]), consts);
        assert_eq!(kp.decrypt(&consts).unwrap(), vec![0; 9]);
    }

    #[test]
    fn map_is_not_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let kp = ImKeyPair::generate(2, 9, 1, &mut rng).unwrap();
        let pk = kp.public_key();
        let f = pk.field();
        let zero = pk.encrypt(&[0; 9]);
        let broken = (0..50).any(|_| {
            let a: Vec<Fq> = (0..9).map(|_| rng.gen_range(0..2)).collect();
            let b: Vec<Fq> = (0..9).map(|_| rng.gen_range(0..2)).collect();
            let s: Vec<Fq> = a.iter().zip(&b).map(|(&p, &r)| f.add(p, r)).collect();
            let lhs = pk.encrypt(&s);
            let rhs: Vec<Fq> = pk
                .encrypt(&a)
                .iter()
                .zip(pk.encrypt(&b))
                .zip(&zero)
                .map(|((&p, r), &z)| f.add(f.add(p, r), z))
                .collect();
            lhs != rhs
        });
        assert!(broken);
    }
}
