//! Signatures and signcryption built on HPE keys.
//!
//! A signature on `M` is any `x` with `PK(x, H(M || salt)) = 0`; the signer
//! finds one by solving the private polynomial for `u`. Signcryption signs an
//! encoded message with the sender's key and encrypts the signature under the
//! receiver's key.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::Fq;
use crate::hpe::{decrypt_raw, encrypt_raw, EncryptConfig, PrivateKey, PublicKey};

/// Enumeration bound on the `y` solutions examined per candidate during
/// unsigncryption.
const UNSIGNCRYPT_LIMIT: u128 = 1 << 16;

/// SHA-256 in counter mode, cut into `n` digits of `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HashParams {
    pub q: usize,
    pub n: usize,
}

impl HashParams {
    pub fn for_key(pk: &PublicKey) -> Self {
        Self { q: pk.q(), n: pk.n() }
    }
}

/// `SHA256(M || counter)` blocks for `counter = 0, 1, ...` give a byte
/// stream. For `q = 2^b` consecutive `b`-bit chunks (most significant bit
/// first) become digits; otherwise each byte is reduced mod `q`.
pub fn hash_to_y(params: &HashParams, message: &[u8]) -> Vec<Fq> {
    let bits = if params.q.is_power_of_two() { params.q.trailing_zeros() as usize } else { 0 };
    let needed = if bits > 0 { (params.n * bits).div_ceil(8) } else { params.n };
    let mut stream = Vec::with_capacity(needed + 32);
    let mut counter: u32 = 0;
    while stream.len() < needed {
        let mut h = Sha256::new();
        h.update(message);
        h.update(counter.to_be_bytes());
        stream.extend_from_slice(&h.finalize());
        counter += 1;
    }
    if bits == 0 {
        return stream[..params.n].iter().map(|&b| (b as usize % params.q) as Fq).collect();
    }
    (0..params.n)
        .map(|i| {
            (0..bits).fold(0u8, |acc, j| {
                let pos = i * bits + j;
                (acc << 1) | ((stream[pos / 8] >> (7 - pos % 8)) & 1)
            })
        })
        .collect()
}

fn salted(message: &[u8], salt: u64) -> Vec<u8> {
    let mut m = message.to_vec();
    m.extend_from_slice(&salt.to_be_bytes());
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub salt: u64,
    pub x: Vec<Fq>,
}

/// Signs `message`, trying salts `0, 1, ...` until `f(X, v)` has a root.
pub fn sign<R: Rng + ?Sized>(sk: &PrivateKey, message: &[u8], rng: &mut R, max_trials: usize) -> Result<Signature> {
    let params = HashParams::for_key(sk.public_key());
    let k = sk.field();
    let affine = sk.affine();
    for salt in 0..max_trials as u64 {
        let y = hash_to_y(&params, &salted(message, salt));
        let v = k.from_coords(affine.v_of_y(k.base(), &y))?;
        let roots = sk.roots_for_v(&v)?;
        if let Some(u) = roots.choose(rng) {
            let x = affine.x_of_u(k.base(), u.coords());
            debug_assert!(sk.public_key().is_solution(&x, &y));
            return Ok(Signature { salt, x });
        }
    }
    Err(Error::SigningFailed(max_trials))
}

pub fn verify(pk: &PublicKey, message: &[u8], sig: &Signature) -> bool {
    if sig.x.len() != pk.n() || sig.x.iter().any(|&d| d as usize >= pk.q()) {
        return false;
    }
    let y = hash_to_y(&HashParams::for_key(pk), &salted(message, sig.salt));
    pk.is_solution(&sig.x, &y)
}

fn check_compatible(a: &PublicKey, b: &PublicKey) -> Result<()> {
    if a.q() != b.q() || a.n() != b.n() {
        return Err(Error::InvalidParams(format!(
            "sender (q = {}, n = {}) and receiver (q = {}, n = {}) differ",
            a.q(),
            a.n(),
            b.q(),
            b.n()
        )));
    }
    Ok(())
}

/// Encodes `message` with the sender's alphabet as the sender's `y` block,
/// signs it with the sender's private polynomial and encrypts the resulting
/// `x` under the receiver's key. A failure at either step moves to another
/// encoding.
pub fn signcrypt<R: Rng + ?Sized>(
    sk_sender: &PrivateKey,
    pk_receiver: &PublicKey,
    message: &str,
    cfg: &EncryptConfig,
    rng: &mut R,
) -> Result<Vec<Fq>> {
    let pk_sender = sk_sender.public_key();
    check_compatible(pk_sender, pk_receiver)?;
    let k = sk_sender.field();
    let affine = sk_sender.affine();
    let found = crate::hpe::search_encodings(pk_sender.alphabet(), message, pk_sender.n(), cfg.max_trials, rng, |y, rng| {
        let v = k.from_coords(affine.v_of_y(k.base(), y)).ok()?;
        let roots = sk_sender.roots_for_v(&v).ok()?;
        let u = roots.choose(rng)?;
        let x = affine.x_of_u(k.base(), u.coords());
        encrypt_raw(pk_receiver, &x, rng)
    })?;
    match found {
        Ok((c, _, _)) => Ok(c),
        Err(trials) => Err(Error::SigncryptionFailed(trials)),
    }
}

/// Decrypts with the receiver's key, solves the sender's public equations
/// for each candidate and keeps the alphabet-valid messages.
pub fn unsigncrypt(sk_receiver: &PrivateKey, pk_sender: &PublicKey, ciphertext: &[Fq]) -> Result<Vec<String>> {
    check_compatible(pk_sender, sk_receiver.public_key())?;
    let f = pk_sender.field();
    let mut out = BTreeSet::new();
    for x in decrypt_raw(sk_receiver, ciphertext)? {
        for y in pk_sender.solve_for_y(&x).enumerate(f, UNSIGNCRYPT_LIMIT)? {
            if let Some(m) = pk_sender.alphabet().decode(&y) {
                out.insert(m);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoValidCandidate);
    }
    Ok(out.into_iter().collect())
}
