//! Linearization attack: learn every bilinear relation
//! `sum γ_ij x_i y_j + sum δ_i x_i + sum ε_j y_j + ζ = 0` satisfied by
//! plaintext/ciphertext pairs, then solve the relations for `x` at a target
//! ciphertext.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{BaseField, Fq};
use crate::hpe::{encrypt_raw, PublicKey};
use crate::im::ImPublicKey;
use crate::linalg::{nullspace, solve_linear, LinearSystem, Matrix};

/// Bound on the affine solution space enumerated per ciphertext.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearRelation {
    /// `gamma[i][j]` multiplies `x_i y_j`.
    pub gamma: Vec<Vec<Fq>>,
    pub delta: Vec<Fq>,
    pub epsilon: Vec<Fq>,
    pub zeta: Fq,
}

impl BilinearRelation {
    fn from_vector(n: usize, v: &[Fq]) -> Self {
        Self {
            gamma: v[..n * n].chunks(n).map(<[Fq]>::to_vec).collect(),
            delta: v[n * n..n * n + n].to_vec(),
            epsilon: v[n * n + n..n * n + 2 * n].to_vec(),
            zeta: v[n * n + 2 * n],
        }
    }

    pub fn eval(&self, f: &BaseField, x: &[Fq], y: &[Fq]) -> Fq {
        let mut acc = self.zeta;
        for (i, &xi) in x.iter().enumerate() {
            let mut coef = self.delta[i];
            for (j, &yj) in y.iter().enumerate() {
                coef = f.add(coef, f.mul(self.gamma[i][j], yj));
            }
            acc = f.add(acc, f.mul(coef, xi));
        }
        for (j, &yj) in y.iter().enumerate() {
            acc = f.add(acc, f.mul(self.epsilon[j], yj));
        }
        acc
    }

    /// Coefficients of the linear form in `x` obtained by fixing `y`, followed
    /// by its constant term.
    fn linear_in_x(&self, f: &BaseField, y: &[Fq]) -> (Vec<Fq>, Fq) {
        let row = (0..self.delta.len())
            .map(|i| {
                y.iter()
                    .enumerate()
                    .fold(self.delta[i], |acc, (j, &yj)| f.add(acc, f.mul(self.gamma[i][j], yj)))
            })
            .collect();
        let constant = y
            .iter()
            .zip(&self.epsilon)
            .fold(self.zeta, |acc, (&yj, &e)| f.add(acc, f.mul(e, yj)));
        (row, constant)
    }
}

/// Number of monomials `x_i y_j, x_i, y_j, 1`.
pub fn relation_width(n: usize) -> usize {
    n * n + 2 * n + 1
}

/// Default number of pairs: twice the number of unknown coefficients.
pub fn default_sample_count(n: usize) -> usize {
    2 * relation_width(n)
}

/// Basis of the relations vanishing on all `pairs`.
pub fn relations_from_pairs(f: &BaseField, n: usize, pairs: &[(Vec<Fq>, Vec<Fq>)]) -> Vec<BilinearRelation> {
    let width = relation_width(n);
    let mut m = Matrix::zeros(pairs.len(), width);
    for (r, (x, y)) in pairs.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                m.set(r, i * n + j, f.mul(x[i], y[j]));
            }
            m.set(r, n * n + i, x[i]);
            m.set(r, n * n + n + i, y[i]);
        }
        m.set(r, width - 1, 1);
    }
    nullspace(f, &m).iter().map(|v| BilinearRelation::from_vector(n, v)).collect()
}

fn random_vector<R: Rng + ?Sized>(f: &BaseField, n: usize, rng: &mut R) -> Vec<Fq> {
    (0..n).map(|_| rng.gen_range(0..f.order()) as Fq).collect()
}

/// Honest pairs from the public map, then the relation space.
pub fn harvest_relations<R: Rng + ?Sized>(
    pk: &ImPublicKey,
    sample_count: usize,
    rng: &mut R,
) -> Result<Vec<BilinearRelation>> {
    let n = pk.n();
    if sample_count < relation_width(n) {
        return Err(Error::InvalidParams(format!(
            "{sample_count} samples cannot pin down {} coefficients",
            relation_width(n)
        )));
    }
    let pairs: Vec<_> = (0..sample_count)
        .map(|_| {
            let x = random_vector(pk.field(), n, rng);
            let y = pk.encrypt(&x);
            (x, y)
        })
        .collect();
    Ok(relations_from_pairs(pk.field(), n, &pairs))
}

/// The same harvest against an HPE key, with pairs from successful raw
/// encryptions of random plaintexts.
pub fn harvest_hpe_relations<R: Rng + ?Sized>(
    pk: &PublicKey,
    sample_count: usize,
    rng: &mut R,
) -> Result<Vec<BilinearRelation>> {
    let n = pk.n();
    if sample_count < relation_width(n) {
        return Err(Error::InvalidParams(format!(
            "{sample_count} samples cannot pin down {} coefficients",
            relation_width(n)
        )));
    }
    let mut pairs = Vec::with_capacity(sample_count);
    while pairs.len() < sample_count {
        let x = random_vector(pk.field(), n, rng);
        if let Some(y) = encrypt_raw(pk, &x, rng) {
            pairs.push((x, y));
        }
    }
    Ok(relations_from_pairs(pk.field(), n, &pairs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackResult {
    /// Plaintexts that re-encrypt to the target.
    pub candidates: Vec<Vec<Fq>>,
    /// Size of the affine space cut out by the relations.
    pub residual: u128,
}

/// Solves the relations for `x` at `y_target` and keeps the points of the
/// solution space that encrypt to `y_target`.
pub fn patarin_attack(pk: &ImPublicKey, relations: &[BilinearRelation], y_target: &[Fq]) -> Result<AttackResult> {
    let f = pk.field();
    let n = pk.n();
    if relations.is_empty() {
        return Err(Error::InvalidParams("no relations to exploit".into()));
    }
    if y_target.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: y_target.len() });
    }
    let mut matrix = Matrix::zeros(relations.len(), n);
    let mut rhs = Vec::with_capacity(relations.len());
    for (r, rel) in relations.iter().enumerate() {
        let (row, constant) = rel.linear_in_x(f, y_target);
        for (i, c) in row.into_iter().enumerate() {
            matrix.set(r, i, c);
        }
        rhs.push(f.neg(constant));
    }
    let outcome = solve_linear(f, &LinearSystem { matrix, rhs });
    let space = outcome.enumerate(f, ENUMERATION_LIMIT)?;
    let residual = space.len() as u128;
    let candidates = space.into_iter().filter(|x| pk.encrypt(x) == y_target).collect();
    Ok(AttackResult { candidates, residual })
}

/// Plain `key=value` summary of an attack run.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackReport {
    pub target: String,
    pub q: usize,
    pub n: usize,
    pub samples: usize,
    pub relation_dim: usize,
    /// Largest residual enumeration over the attacked ciphertexts.
    pub residual_size: u128,
    pub trials: usize,
    pub recovered: usize,
    pub harvest_seconds: f64,
    pub attack_seconds: f64,
    pub success: bool,
}

impl fmt::Display for AttackReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "target={}", self.target)?;
        writeln!(out, "q={}", self.q)?;
        writeln!(out, "n={}", self.n)?;
        writeln!(out, "samples={}", self.samples)?;
        writeln!(out, "relation_dim={}", self.relation_dim)?;
        writeln!(out, "residual_size={}", self.residual_size)?;
        writeln!(out, "trials={}", self.trials)?;
        writeln!(out, "recovered={}", self.recovered)?;
        writeln!(out, "harvest_seconds={:.6}", self.harvest_seconds)?;
        writeln!(out, "attack_seconds={:.6}", self.attack_seconds)?;
        writeln!(out, "success={}", self.success)
    }
}
