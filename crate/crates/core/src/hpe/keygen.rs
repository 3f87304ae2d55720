use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::expand::KPoly;
use super::{
    exponent_from_powers, AffinePair, KeyGenParams, MixedTerm, PrivateKey, PrivatePolynomial, PublicKey, PureTerm,
};
use crate::alphabet::{Alphabet, AlphabetParams};
use crate::error::{Error, Result};
use crate::ext::ExtensionField;
use crate::mvpoly::MultiPoly;

const REGENERATION_BUDGET: usize = 32;

/// Multisets of Frobenius indices `0 <= θ < n` with `size` elements, each
/// index repeated at most `q - 1` times, and `sum q^θ <= bound`.
///
/// The repetition limit keeps the `q`-ary digit sum of the exponent equal to
/// `size`, so `X^i` really has degree `size` as a map over `F_q`.
fn decompositions(q: usize, n: usize, size: usize, bound: u64) -> Vec<Vec<usize>> {
    fn walk(q: usize, n: usize, size: usize, bound: u64, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        let used = exponent_from_powers(q, cur);
        for theta in start..n {
            let Some(step) = (q as u64).checked_pow(theta as u32) else { break };
            if used + step > bound {
                break;
            }
            if cur.iter().filter(|&&t| t == theta).count() + 1 >= q {
                continue;
            }
            cur.push(theta);
            walk(q, n, size, bound, theta, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(q, n, size, bound, 0, &mut Vec::new(), &mut out);
    out
}

/// Draws a private polynomial under `params`. The mixed terms use pairwise
/// distinct `X` exponents and pairwise distinct `Y` Frobenius indices.
pub fn sample_private_polynomial<R: Rng + ?Sized>(
    k: &ExtensionField,
    params: &KeyGenParams,
    rng: &mut R,
) -> Result<PrivatePolynomial> {
    params.validate()?;
    let (q, n) = (k.q(), k.degree());
    let mixed_shapes: Vec<Vec<usize>> = (2..params.t_max)
        .flat_map(|s| decompositions(q, n, s, params.degx_max))
        .collect();
    let pure_shapes: Vec<Vec<usize>> = (1..=params.t_max)
        .flat_map(|s| decompositions(q, n, s, params.degx_max))
        .collect();
    if mixed_shapes.is_empty() {
        return Err(Error::GenerationFailed(0));
    }
    if params.mixed_terms > n || params.mixed_terms > mixed_shapes.len() {
        return Err(Error::InvalidParams(format!(
            "{} mixed monomials need distinct Y powers below n = {n} and distinct X exponents among {}",
            params.mixed_terms,
            mixed_shapes.len()
        )));
    }
    let mut y_powers: Vec<usize> = (0..n).collect();
    y_powers.shuffle(rng);
    let x_parts: Vec<&Vec<usize>> = mixed_shapes.choose_multiple(rng, params.mixed_terms).collect();
    let mixed = y_powers
        .iter()
        .zip(x_parts)
        .map(|(&y_power, x_powers)| MixedTerm {
            coeff: k.random_nonzero(rng),
            x_powers: x_powers.clone(),
            y_power,
        })
        .collect();
    let pure = (0..params.pure_terms)
        .map(|_| PureTerm {
            coeff: k.random_nonzero(rng),
            x_powers: pure_shapes.choose(rng).unwrap().clone(),
        })
        .collect();
    Ok(PrivatePolynomial { mixed, pure, constant: k.random(rng) })
}

/// Expands `f(Ax + c, By + d)` into `n` equations over `F_q` in the
/// variables `x_1..x_n, y_1..y_n`.
pub fn derive_public_equations(k: &ExtensionField, poly: &PrivatePolynomial, affine: &AffinePair) -> Vec<MultiPoly> {
    let n = k.degree();
    let mut u_forms: HashMap<usize, KPoly> = HashMap::new();
    let mut u_form = |theta: usize| {
        u_forms
            .entry(theta)
            .or_insert_with(|| KPoly::frobenius_affine(k, &affine.a, &affine.c, theta, 0))
            .clone()
    };
    let mut total = KPoly::constant(poly.constant.clone());
    for t in &poly.mixed {
        let mut prod = KPoly::frobenius_affine(k, &affine.b, &affine.d, t.y_power, n)
            .mul(k, &KPoly::constant(t.coeff.clone()));
        for &theta in &t.x_powers {
            prod = prod.mul(k, &u_form(theta));
        }
        total.add_assign(k, &prod);
    }
    for t in &poly.pure {
        let mut prod = KPoly::constant(t.coeff.clone());
        for &theta in &t.x_powers {
            prod = prod.mul(k, &u_form(theta));
        }
        total.add_assign(k, &prod);
    }
    total.project(k, 2 * n)
}

/// Generates a key pair, resampling `f` and the affine maps until the public
/// equations pass the shape audit.
pub fn keygen<R: Rng + ?Sized>(params: &KeyGenParams, rng: &mut R) -> Result<(PublicKey, PrivateKey)> {
    params.validate()?;
    let k = ExtensionField::build(params.q, params.n, None)?;
    let alphabet_params = match &params.alphabet {
        Some(a) => a.clone(),
        None => AlphabetParams::standard(params.q, params.n)?,
    };
    let alphabet = Alphabet::generate(params.q, &alphabet_params, rng)?;
    alphabet.letters_per_message(params.n)?;
    for _ in 0..REGENERATION_BUDGET {
        let poly = match sample_private_polynomial(&k, params, rng) {
            Ok(p) => p,
            Err(Error::GenerationFailed(_)) => break,
            Err(e) => return Err(e),
        };
        let affine = AffinePair::random(k.base(), params.n, rng);
        let equations = derive_public_equations(&k, &poly, &affine);
        let public = PublicKey::new(k.base().clone(), params.n, poly.achieved_t(), equations, alphabet.clone())?;
        if public.shape_violations().is_empty() {
            let private = PrivateKey::from_parts_unchecked(k, poly, affine, public.clone());
            return Ok((public, private));
        }
    }
    Err(Error::GenerationFailed(REGENERATION_BUDGET))
}
