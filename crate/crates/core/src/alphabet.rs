//! Public message encoding: every letter owns several synonym strings of
//! `block_len` base-field digits. Synonyms let a sender re-encode the same
//! text when encryption fails, and the sparse set of valid strings lets the
//! receiver discard spurious decryptions.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::Fq;

/// `A-Z`, `a-z`, `0-9`, space and period.
pub fn default_letters() -> Vec<char> {
    ('A'..='Z')
        .chain('a'..='z')
        .chain('0'..='9')
        .chain([' ', '.'])
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetParams {
    pub letters: Vec<char>,
    pub synonyms: usize,
    pub block_len: usize,
}

impl AlphabetParams {
    /// Default layout for messages of `n` digits over `F_q` using the 64
    /// default letters.
    ///
    /// The block length is the least divisor `e` of `n` with `q^e >= 2^12`
    /// (or `n` itself), which keeps the valid strings sparse. The synonym count
    /// is the least `s >= 2` giving at least 16 encodings per message, capped
    /// by the room available in `q^e`.
    pub fn standard(q: usize, n: usize) -> Result<Self> {
        Self::with_letters(q, n, default_letters())
    }

    pub fn with_letters(q: usize, n: usize, letters: Vec<char>) -> Result<Self> {
        let space = |e: usize| (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
        let block_len = (1..=n)
            .filter(|e| n.is_multiple_of(*e))
            .find(|&e| space(e) >= 1 << 12)
            .unwrap_or(n);
        let m = (n / block_len) as u32;
        let cap = (space(block_len) / letters.len() as u128).min(1 << 16) as usize;
        let mut synonyms = 2;
        while (synonyms as u128).pow(m) < 16 && synonyms < cap {
            synonyms += 1;
        }
        if synonyms > cap {
            return Err(Error::InvalidParams(format!(
                "{} letters with {synonyms} synonyms do not fit in {q}^{block_len} strings",
                letters.len()
            )));
        }
        Ok(Self { letters, synonyms, block_len })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    q: usize,
    block_len: usize,
    letters: Vec<char>,
    /// `synonyms[letter][k]` is a string of `block_len` digits.
    synonyms: Vec<Vec<Vec<Fq>>>,
    reverse: HashMap<Vec<Fq>, usize>,
}

impl Alphabet {
    /// Draws `letters * synonyms` distinct random strings.
    pub fn generate<R: Rng + ?Sized>(q: usize, params: &AlphabetParams, rng: &mut R) -> Result<Self> {
        let total = params.letters.len() * params.synonyms;
        let space = (q as u128).checked_pow(params.block_len as u32).unwrap_or(u128::MAX);
        if params.synonyms < 2 || total as u128 > space {
            return Err(Error::InvalidParams(format!(
                "cannot place {total} synonyms (at least 2 per letter) among {q}^{} strings",
                params.block_len
            )));
        }
        let mut seen = HashSet::with_capacity(total);
        let mut synonyms = Vec::with_capacity(params.letters.len());
        for _ in &params.letters {
            let mut set = Vec::with_capacity(params.synonyms);
            while set.len() < params.synonyms {
                let s: Vec<Fq> = (0..params.block_len).map(|_| rng.gen_range(0..q) as Fq).collect();
                if seen.insert(s.clone()) {
                    set.push(s);
                }
            }
            synonyms.push(set);
        }
        Self::from_parts(q, params.block_len, params.letters.clone(), synonyms)
    }

    pub fn from_parts(q: usize, block_len: usize, letters: Vec<char>, synonyms: Vec<Vec<Vec<Fq>>>) -> Result<Self> {
        if letters.is_empty() || letters.len() != synonyms.len() || block_len == 0 {
            return Err(Error::InvalidParams("alphabet letters and synonym sets disagree".into()));
        }
        if letters.iter().collect::<HashSet<_>>().len() != letters.len() {
            return Err(Error::InvalidParams("duplicate letter in alphabet".into()));
        }
        let mut reverse = HashMap::new();
        for (idx, set) in synonyms.iter().enumerate() {
            if set.len() < 2 {
                return Err(Error::InvalidParams("each letter needs at least two synonyms".into()));
            }
            for s in set {
                if s.len() != block_len || s.iter().any(|&d| d as usize >= q) {
                    return Err(Error::InvalidParams("malformed synonym string".into()));
                }
                if reverse.insert(s.clone(), idx).is_some() {
                    return Err(Error::InvalidParams("synonym sets overlap".into()));
                }
            }
        }
        Ok(Self { q, block_len, letters, synonyms, reverse })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn synonyms(&self, letter: usize) -> &[Vec<Fq>] {
        &self.synonyms[letter]
    }

    /// Number of letters carried by a plaintext of `n` digits.
    pub fn letters_per_message(&self, n: usize) -> Result<usize> {
        if !n.is_multiple_of(self.block_len) {
            return Err(Error::InvalidParams(format!(
                "block length {} does not divide {n}",
                self.block_len
            )));
        }
        Ok(n / self.block_len)
    }

    /// Fraction of all digit strings that decode, per letter block.
    pub fn density(&self) -> f64 {
        let total: usize = self.synonyms.iter().map(Vec::len).sum();
        total as f64 / (self.q as f64).powi(self.block_len as i32)
    }

    /// Letter indices of `message`, which must hold exactly `n / block_len`
    /// symbols.
    pub fn parse_message(&self, message: &str, n: usize) -> Result<Vec<usize>> {
        let m = self.letters_per_message(n)?;
        let idx: Vec<usize> = message
            .chars()
            .map(|ch| {
                self.letters
                    .iter()
                    .position(|&l| l == ch)
                    .ok_or(Error::SymbolOutOfAlphabet(ch))
            })
            .collect::<Result<_>>()?;
        if idx.len() != m {
            return Err(Error::LengthMismatch { expected: m, found: idx.len() });
        }
        Ok(idx)
    }

    /// Concatenates synonym `choices[i]` of each letter `letters[i]`.
    pub fn encode_with(&self, letters: &[usize], choices: &[usize]) -> Vec<Fq> {
        letters
            .iter()
            .zip(choices)
            .flat_map(|(&l, &c)| self.synonyms[l][c].iter().copied())
            .collect()
    }

    /// Encodes with uniformly random synonyms; returns the plaintext vector and
    /// the synonym choices.
    pub fn encode<R: Rng + ?Sized>(&self, message: &str, n: usize, rng: &mut R) -> Result<(Vec<Fq>, Vec<usize>)> {
        let letters = self.parse_message(message, n)?;
        let choices: Vec<usize> = letters
            .iter()
            .map(|&l| rng.gen_range(0..self.synonyms[l].len()))
            .collect();
        Ok((self.encode_with(&letters, &choices), choices))
    }

    /// `None` unless every block is a known synonym.
    pub fn decode(&self, x: &[Fq]) -> Option<String> {
        if !x.len().is_multiple_of(self.block_len) {
            return None;
        }
        x.chunks(self.block_len)
            .map(|block| self.reverse.get(block).map(|&l| self.letters[l]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_letter_set() {
        let l = default_letters();
        assert_eq!(l.len(), 64);
        assert!(l.contains(&' ') && l.contains(&'.') && l.contains(&'7'));
    }

    #[test]
    fn standard_layouts() {
        let p = AlphabetParams::standard(2, 16).unwrap();
        assert_eq!((p.block_len, p.synonyms), (16, 16));
        let p = AlphabetParams::standard(2, 32).unwrap();
        assert_eq!((p.block_len, p.synonyms), (16, 4));
        let p = AlphabetParams::standard(2, 64).unwrap();
        assert_eq!((p.block_len, p.synonyms), (16, 2));
        let p = AlphabetParams::standard(2, 8).unwrap();
        assert_eq!((p.block_len, p.synonyms), (8, 4));
        let p = AlphabetParams::standard(16, 6).unwrap();
        assert_eq!(p.block_len, 3);
        assert!(AlphabetParams::standard(2, 6).is_err());
    }

    #[test]
    fn out_of_alphabet_and_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Alphabet::generate(2, &AlphabetParams::standard(2, 32).unwrap(), &mut rng).unwrap();
        assert_eq!(a.encode("@x", 32, &mut rng).unwrap_err(), Error::SymbolOutOfAlphabet('@'));
        assert_eq!(
            a.encode("abc", 32, &mut rng).unwrap_err(),
            Error::LengthMismatch { expected: 2, found: 3 }
        );
    }

    #[test]
    fn single_letter_two_synonyms_gives_two_encodings() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = AlphabetParams { letters: vec!['a', 'b'], synonyms: 2, block_len: 4 };
        let a = Alphabet::generate(2, &params, &mut rng).unwrap();
        let seen: HashSet<Vec<Fq>> = (0..100).map(|_| a.encode("a", 4, &mut rng).unwrap().0).collect();
        assert_eq!(seen.len(), 2);
        for x in &seen {
            assert_eq!(a.decode(x).as_deref(), Some("a"));
        }
    }

    #[test]
    fn roundtrip_random_messages() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Alphabet::generate(2, &AlphabetParams::standard(2, 64).unwrap(), &mut rng).unwrap();
        let letters = a.letters().to_vec();
        for _ in 0..1000 {
            let msg: String = (0..4).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
            let (x, _) = a.encode(&msg, 64, &mut rng).unwrap();
            assert_eq!(x.len(), 64);
            assert_eq!(a.decode(&x), Some(msg));
        }
    }

    #[test]
    fn overlapping_synonyms_rejected() {
        let syn = vec![vec![vec![0, 1], vec![1, 1]], vec![vec![1, 1], vec![0, 0]]];
        assert!(Alphabet::from_parts(2, 2, vec!['a', 'b'], syn).is_err());
    }
}
