use std::collections::{BTreeSet, HashSet};

use rand::Rng;

use super::{PrivateKey, PublicKey};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::ext::FieldElement;
use crate::gf::Fq;
use crate::linalg::{solve_linear, LinearSystem, Matrix, SolveOutcome};

const EXHAUSTIVE_LIMIT: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncryptConfig {
    /// Number of encodings tried before giving up.
    pub max_trials: usize,
}

impl Default for EncryptConfig {
    fn default() -> Self {
        Self { max_trials: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encrypted {
    pub y: Vec<Fq>,
    /// Plaintext vector that was finally encrypted.
    pub x: Vec<Fq>,
    /// Trials used, counting the successful one.
    pub trials: usize,
}

impl PublicKey {
    /// The public equations with `x` fixed, as a linear system `M y = r`.
    pub fn linear_system_at(&self, x: &[Fq]) -> LinearSystem {
        let f = &self.field;
        let n = self.n;
        let mut matrix = Matrix::zeros(n, n);
        let mut rhs = vec![0; n];
        for (row, eq) in self.equations.iter().enumerate() {
            for (m, c) in eq.terms() {
                let mut val = c;
                let mut y_var = None;
                for (v, e) in m.factors() {
                    if v >= n {
                        y_var = Some(v - n);
                    } else {
                        val = f.mul(val, f.pow(x[v], e as u64));
                        if val == 0 {
                            break;
                        }
                    }
                }
                if val == 0 {
                    continue;
                }
                match y_var {
                    Some(j) => matrix.set(row, j, f.add(matrix.get(row, j), val)),
                    None => rhs[row] = f.sub(rhs[row], val),
                }
            }
        }
        LinearSystem { matrix, rhs }
    }

    /// All `y` solving the public equations at `x`, as an affine space.
    pub fn solve_for_y(&self, x: &[Fq]) -> SolveOutcome {
        solve_linear(&self.field, &self.linear_system_at(x))
    }
}

/// One encryption attempt of a raw plaintext vector: a uniformly random
/// solution `y`, if any.
pub fn encrypt_raw<R: Rng + ?Sized>(pk: &PublicKey, x: &[Fq], rng: &mut R) -> Option<Vec<Fq>> {
    let y = pk.solve_for_y(x).sample(pk.field(), rng)?;
    debug_assert!(pk.is_solution(x, &y));
    Some(y)
}

/// The attempt's output with its encoding and trial count, or the number of
/// trials spent.
pub(crate) type Search<T> = std::result::Result<(T, Vec<Fq>, usize), usize>;

/// Runs `attempt` on encodings of `message` until it succeeds, changing the
/// synonym of one random letter after each failure. Encodings are never
/// repeated.
pub(crate) fn search_encodings<R: Rng + ?Sized, T>(
    alphabet: &Alphabet,
    message: &str,
    n: usize,
    max_trials: usize,
    rng: &mut R,
    mut attempt: impl FnMut(&[Fq], &mut R) -> Option<T>,
) -> Result<Search<T>> {
    if max_trials == 0 {
        return Err(Error::InvalidParams("at least one trial is required".into()));
    }
    let letters = alphabet.parse_message(message, n)?;
    let sizes: Vec<usize> = letters.iter().map(|&l| alphabet.synonyms(l).len()).collect();
    let total: u128 = sizes.iter().map(|&s| s as u128).product();
    let mut choices: Vec<usize> = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
    let mut tried = HashSet::new();
    for trial in 1..=max_trials {
        tried.insert(choices.clone());
        let x = alphabet.encode_with(&letters, &choices);
        if let Some(out) = attempt(&x, rng) {
            return Ok(Ok((out, x, trial)));
        }
        if tried.len() as u128 >= total {
            return Ok(Err(trial));
        }
        choices = next_choices(&choices, &sizes, &tried, rng);
    }
    Ok(Err(max_trials))
}

fn next_choices<R: Rng + ?Sized>(
    current: &[usize],
    sizes: &[usize],
    tried: &HashSet<Vec<usize>>,
    rng: &mut R,
) -> Vec<usize> {
    for _ in 0..64 {
        let mut next = current.to_vec();
        let i = rng.gen_range(0..next.len());
        next[i] = (next[i] + rng.gen_range(1..sizes[i])) % sizes[i];
        if !tried.contains(&next) {
            return next;
        }
    }
    loop {
        let next: Vec<usize> = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
        if !tried.contains(&next) {
            return next;
        }
    }
}

/// Encrypts `message` under the retry policy of [`search_encodings`].
pub fn encrypt_detailed<R: Rng + ?Sized>(
    pk: &PublicKey,
    message: &str,
    cfg: &EncryptConfig,
    rng: &mut R,
) -> Result<Encrypted> {
    match search_encodings(pk.alphabet(), message, pk.n(), cfg.max_trials, rng, |x, rng| {
        encrypt_raw(pk, x, rng)
    })? {
        Ok((y, x, trials)) => Ok(Encrypted { y, x, trials }),
        Err(trials) => Err(Error::EncryptionFailed(trials)),
    }
}

pub fn encrypt<R: Rng + ?Sized>(pk: &PublicKey, message: &str, cfg: &EncryptConfig, rng: &mut R) -> Result<Vec<Fq>> {
    encrypt_detailed(pk, message, cfg, rng).map(|e| e.y)
}

/// Every `x` with `f(Ax + c, By + d) = 0`, before alphabet filtering.
pub fn decrypt_raw(sk: &PrivateKey, y: &[Fq]) -> Result<Vec<Vec<Fq>>> {
    let n = sk.n();
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: y.len() });
    }
    let k = sk.field();
    let f = k.base();
    let affine = sk.affine();
    let v = k.from_coords(affine.v_of_y(f, y))?;
    Ok(sk
        .roots_for_v(&v)?
        .into_iter()
        .map(|u| affine.x_of_u(f, u.coords()))
        .collect())
}

/// Alphabet-valid decryptions, sorted and deduplicated.
pub fn decrypt_candidates(sk: &PrivateKey, y: &[Fq]) -> Result<Vec<String>> {
    let alphabet = sk.public_key().alphabet();
    let set: BTreeSet<String> = decrypt_raw(sk, y)?
        .iter()
        .filter_map(|x| alphabet.decode(x))
        .collect();
    Ok(set.into_iter().collect())
}

/// The unique alphabet-valid decryption.
pub fn decrypt(sk: &PrivateKey, y: &[Fq]) -> Result<String> {
    let mut c = decrypt_candidates(sk, y)?;
    match c.len() {
        0 => Err(Error::NoValidCandidate),
        1 => Ok(c.pop().unwrap()),
        _ => Err(Error::AmbiguousDecryption(c)),
    }
}

/// All `x` with `PK(x, y) = 0`, by enumerating `F_q^n`.
pub fn exhaustive_invert(pk: &PublicKey, y: &[Fq]) -> Result<Vec<Vec<Fq>>> {
    let (q, n) = (pk.q(), pk.n());
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: y.len() });
    }
    let size = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge(size));
    }
    let f = pk.field();
    let mut alive = vec![true; size as usize];
    for eq in pk.equations() {
        let table = eq.partial_eval(f, n, y).value_table(f, n)?;
        for (a, v) in alive.iter_mut().zip(table) {
            *a &= v == 0;
        }
    }
    Ok(alive
        .iter()
        .enumerate()
        .filter(|(_, &a)| a)
        .map(|(idx, _)| {
            let mut rest = idx;
            (0..n)
                .map(|_| {
                    let d = (rest % q) as Fq;
                    rest /= q;
                    d
                })
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    /// `f(u, v)` computed in `K`.
    pub private_value: FieldElement,
    /// Public equations at `(A^-1(u - c), B^-1(v - d))`.
    pub public_values: Vec<Fq>,
}

impl RelationCheck {
    pub fn private_vanishes(&self) -> bool {
        self.private_value.is_zero()
    }

    pub fn public_vanishes(&self) -> bool {
        self.public_values.iter().all(|&v| v == 0)
    }

    /// The public values are exactly the coordinates of `f(u, v)`.
    pub fn consistent(&self) -> bool {
        self.private_value.coords() == self.public_values.as_slice()
    }
}

pub fn private_relation_check(sk: &PrivateKey, u: &FieldElement, v: &FieldElement) -> RelationCheck {
    let k = sk.field();
    let f = k.base();
    let affine = sk.affine();
    let x = affine.x_of_u(f, u.coords());
    let y = affine.y_of_v(f, v.coords());
    RelationCheck {
        private_value: sk.polynomial().eval(k, u, v),
        public_values: sk.public_key().evaluate(&x, &y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::AlphabetParams;
    use crate::hpe::{keygen, KeyGenParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn key(q: usize, n: usize, seed: u64) -> (PublicKey, PrivateKey) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        keygen(&KeyGenParams::new(q, n), &mut rng).unwrap()
    }

    fn random_message<R: Rng>(pk: &PublicKey, rng: &mut R) -> String {
        let a = pk.alphabet();
        let m = a.letters_per_message(pk.n()).unwrap();
        (0..m).map(|_| a.letters()[rng.gen_range(0..a.letters().len())]).collect()
    }

    #[test]
    fn relation_check_exhaustive_gf16() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut params = KeyGenParams::new(2, 4);
        params.alphabet = Some(AlphabetParams { letters: vec!['a', 'b'], synonyms: 2, block_len: 2 });
        let (_, sk) = keygen(&params, &mut rng).unwrap();
        let k = sk.field();
        for iu in 0..16 {
            for iv in 0..16 {
                let c = private_relation_check(&sk, &k.element_from_index(iu), &k.element_from_index(iv));
                assert!(c.consistent());
                assert_eq!(c.private_vanishes(), c.public_vanishes());
            }
        }
    }

    #[test]
    fn encrypt_decrypt_roundtrip_n16() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (pk, sk) = key(2, 16, 4);
        for _ in 0..20 {
            let msg = random_message(&pk, &mut rng);
            let enc = encrypt_detailed(&pk, &msg, &EncryptConfig::default(), &mut rng).unwrap();
            assert!(pk.is_solution(&enc.x, &enc.y));
            assert!(decrypt_candidates(&sk, &enc.y).unwrap().contains(&msg));
            assert!(decrypt_raw(&sk, &enc.y).unwrap().contains(&enc.x));
        }
    }

    #[test]
    fn encrypt_with_odd_characteristic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut params = KeyGenParams::new(3, 6);
        params.alphabet = Some(AlphabetParams { letters: vec!['a', 'b', 'c'], synonyms: 4, block_len: 3 });
        let (pk, sk) = keygen(&params, &mut rng).unwrap();
        let mut ok = 0;
        for _ in 0..10 {
            if let Ok(enc) = encrypt_detailed(&pk, "ab", &EncryptConfig::default(), &mut rng) {
                assert!(decrypt_raw(&sk, &enc.y).unwrap().contains(&enc.x));
                ok += 1;
            }
        }
        assert!(ok > 0);
    }

    #[test]
    fn exhaustive_matches_raw_decryption_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (pk, sk) = key(2, 8, 6);
        for _ in 0..10 {
            let x: Vec<Fq> = (0..8).map(|_| rng.gen_range(0..2)).collect();
            let Some(y) = encrypt_raw(&pk, &x, &mut rng) else { continue };
            let mut raw = decrypt_raw(&sk, &y).unwrap();
            raw.sort();
            let mut brute = exhaustive_invert(&pk, &y).unwrap();
            brute.sort();
            assert_eq!(raw, brute);
        }
    }

    #[test]
    fn tampered_ciphertext_never_silently_accepts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (pk, sk) = key(2, 16, 9);
        for _ in 0..20 {
            let msg = random_message(&pk, &mut rng);
            let mut y = encrypt(&pk, &msg, &EncryptConfig::default(), &mut rng).unwrap();
            let i = rng.gen_range(0..16);
            y[i] ^= 1;
            match decrypt(&sk, &y) {
                Ok(m) => assert_ne!(m, msg),
                Err(Error::NoValidCandidate) | Err(Error::AmbiguousDecryption(_)) => {}
                Err(e) => panic!("unexpected {e}"),
            }
        }
    }

    #[test]
    fn retries_exhaust_small_encoding_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut params = KeyGenParams::new(2, 8);
        params.alphabet = Some(AlphabetParams { letters: vec!['a', 'b'], synonyms: 2, block_len: 8 });
        let (pk, _) = keygen(&params, &mut rng).unwrap();
        let cfg = EncryptConfig { max_trials: 100 };
        for _ in 0..20 {
            match encrypt_detailed(&pk, "a", &cfg, &mut rng) {
                Ok(e) => assert!(e.trials <= 2),
                Err(Error::EncryptionFailed(t)) => assert_eq!(t, 2),
                Err(e) => panic!("unexpected {e}"),
            }
        }
    }

    #[test]
    fn wrong_length_inputs() {
        let (pk, sk) = key(2, 8, 12);
        assert!(matches!(decrypt_raw(&sk, &[0; 7]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(exhaustive_invert(&pk, &[0; 9]), Err(Error::LengthMismatch { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(encrypt(&pk, "A", &EncryptConfig { max_trials: 0 }, &mut rng).is_err());
    }
}
