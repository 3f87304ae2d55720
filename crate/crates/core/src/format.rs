//! Versioned text formats for keys, ciphertexts and signatures.
//!
//! ```text
//! HPE1 <q> <n> <t>
//! PRIVATE                      (private key only)
//! F <p> <r> <n> <modulus coefficients>
//! CONST <digits>
//! MIXED <coeff digits> <y power> <x powers...>
//! PURE <coeff digits> <x powers...>
//! AFFINE
//! A <row digits>               (n rows, likewise B)
//! C <digits>
//! D <digits>
//! PUBLIC
//! ALPHABET <letters> <block length>
//! LETTER <codepoint> <synonym digits...>
//! EQUATIONS <n>
//! VARS x1 .. xn y1 .. yn
//! EQ <index> <terms>
//! <coeff> : <e1> .. <e2n>
//! END
//! ```
//!
//! Digit strings use one hexadecimal character per element when `q <= 16`
//! and two otherwise.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::ext::{ExtensionField, FieldElement};
use crate::gf::{BaseField, Fq};
use crate::hpe::{AffinePair, MixedTerm, PrivateKey, PrivatePolynomial, PublicKey, PureTerm};
use crate::linalg::Matrix;
use crate::mvpoly::{Monomial, MultiPoly};
use crate::sig::Signature;

const MAGIC: &str = "HPE1";
const SIG_MAGIC: &str = "SIG1";

fn digit_width(q: usize) -> usize {
    if q <= 16 {
        1
    } else {
        2
    }
}

pub fn digits_to_string(q: usize, digits: &[Fq]) -> String {
    let w = digit_width(q);
    digits.iter().map(|&d| format!("{d:0w$x}")).collect()
}

/// Parses a digit string of exactly `len` elements of `F_q`.
pub fn parse_digits(q: usize, s: &str, len: usize) -> Result<Vec<Fq>> {
    let w = digit_width(q);
    if !s.is_ascii() || s.len() != w * len {
        return Err(Error::LengthMismatch { expected: w * len, found: s.chars().count() });
    }
    (0..len)
        .map(|i| {
            let d = u8::from_str_radix(&s[i * w..(i + 1) * w], 16)
                .map_err(|_| Error::InvalidParams(format!("bad digit {:?}", &s[i * w..(i + 1) * w])))?;
            if d as usize >= q {
                return Err(Error::InvalidParams(format!("digit {d} outside F_{q}")));
            }
            Ok(d)
        })
        .collect()
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { lines: text.lines().collect(), pos: 0 }
    }

    fn line_no(&self) -> usize {
        self.pos
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line_no(), msg)
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Result<&'a str> {
        let l = self.lines.get(self.pos).copied().ok_or_else(|| Error::parse(self.pos + 1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(l)
    }

    /// Next line split into words, checking the leading keyword.
    fn expect(&mut self, keyword: &str) -> Result<Vec<&'a str>> {
        let line = self.next()?;
        let mut words = line.split_whitespace();
        match words.next() {
            Some(w) if w == keyword => Ok(words.collect()),
            _ => Err(self.err(format!("expected {keyword}"))),
        }
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad number {s:?}")))
    }

    fn digits(&self, q: usize, s: &str, len: usize) -> Result<Vec<Fq>> {
        parse_digits(q, s, len).map_err(|e| self.err(e.to_string()))
    }

    fn wrap<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Parse { .. } => e,
            other => self.err(other.to_string()),
        })
    }
}

fn write_header(out: &mut String, q: usize, n: usize, t: usize) {
    out.push_str(&format!("{MAGIC} {q} {n} {t}\n"));
}

fn read_header(lines: &mut Lines) -> Result<(usize, usize, usize)> {
    let words = lines.expect(MAGIC)?;
    if words.len() != 3 {
        return Err(lines.err("header needs q, n and t"));
    }
    Ok((lines.num(words[0])?, lines.num(words[1])?, lines.num(words[2])?))
}

fn write_public_body(out: &mut String, pk: &PublicKey) {
    let q = pk.q();
    let n = pk.n();
    let a = pk.alphabet();
    out.push_str("PUBLIC\n");
    out.push_str(&format!("ALPHABET {} {}\n", a.letters().len(), a.block_len()));
    for (i, &l) in a.letters().iter().enumerate() {
        out.push_str(&format!("LETTER {}", l as u32));
        for s in a.synonyms(i) {
            out.push(' ');
            out.push_str(&digits_to_string(q, s));
        }
        out.push('\n');
    }
    out.push_str(&format!("EQUATIONS {n}\nVARS"));
    for prefix in ["x", "y"] {
        for i in 1..=n {
            out.push_str(&format!(" {prefix}{i}"));
        }
    }
    out.push('\n');
    for (i, eq) in pk.equations().iter().enumerate() {
        out.push_str(&format!("EQ {} {}\n", i + 1, eq.num_terms()));
        for (m, c) in eq.terms() {
            out.push_str(&format!("{c} :"));
            for e in m.exponents(2 * n) {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
    }
    out.push_str("END\n");
}

fn read_public_body(lines: &mut Lines, f: &BaseField, n: usize, t: usize) -> Result<PublicKey> {
    let q = f.order();
    lines.expect("PUBLIC")?;
    let words = lines.expect("ALPHABET")?;
    if words.len() != 2 {
        return Err(lines.err("ALPHABET needs letter count and block length"));
    }
    let (count, block_len): (usize, usize) = (lines.num(words[0])?, lines.num(words[1])?);
    let mut letters = Vec::with_capacity(count);
    let mut synonyms = Vec::with_capacity(count);
    for _ in 0..count {
        let words = lines.expect("LETTER")?;
        let code: u32 = lines.num(words.first().ok_or_else(|| lines.err("missing letter"))?)?;
        letters.push(char::from_u32(code).ok_or_else(|| lines.err(format!("invalid code point {code}")))?);
        synonyms.push(
            words[1..]
                .iter()
                .map(|w| lines.digits(q, w, block_len))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let alphabet = lines.wrap(Alphabet::from_parts(q, block_len, letters, synonyms))?;
    let words = lines.expect("EQUATIONS")?;
    if words.len() != 1 || lines.num::<usize>(words[0])? != n {
        return Err(lines.err(format!("expected EQUATIONS {n}")));
    }
    let vars = lines.expect("VARS")?;
    let expected: Vec<String> = ["x", "y"]
        .iter()
        .flat_map(|p| (1..=n).map(move |i| format!("{p}{i}")))
        .collect();
    if vars != expected {
        return Err(lines.err("variable header does not match x1..xn y1..yn"));
    }
    let mut equations = Vec::with_capacity(n);
    for i in 0..n {
        let words = lines.expect("EQ")?;
        if words.len() != 2 || lines.num::<usize>(words[0])? != i + 1 {
            return Err(lines.err(format!("expected EQ {}", i + 1)));
        }
        let terms: usize = lines.num(words[1])?;
        let mut eq = MultiPoly::zero(2 * n);
        for _ in 0..terms {
            let line = lines.next()?;
            let (coef, exps) = line.split_once(':').ok_or_else(|| lines.err("term needs ':'"))?;
            let c: Fq = lines.num(coef.trim())?;
            if !f.is_valid(c) {
                return Err(lines.err(format!("coefficient {c} outside F_{q}")));
            }
            let exps: Vec<u32> = exps.split_whitespace().map(|e| lines.num(e)).collect::<Result<_>>()?;
            if exps.len() != 2 * n {
                return Err(lines.err(format!("term needs {} exponents", 2 * n)));
            }
            eq.add_term(f, Monomial::from_exponents(&exps), c);
        }
        equations.push(eq);
    }
    lines.expect("END")?;
    lines.wrap(PublicKey::new(f.clone(), n, t, equations, alphabet))
}

pub fn write_public_key(pk: &PublicKey) -> String {
    let mut out = String::new();
    write_header(&mut out, pk.q(), pk.n(), pk.t());
    write_public_body(&mut out, pk);
    out
}

pub fn parse_public_key(text: &str) -> Result<PublicKey> {
    let mut lines = Lines::new(text);
    let (q, n, t) = read_header(&mut lines)?;
    let f = lines.wrap(BaseField::new(q))?;
    let pk = read_public_body(&mut lines, &f, n, t)?;
    expect_eof(&mut lines)?;
    Ok(pk)
}

fn expect_eof(lines: &mut Lines) -> Result<()> {
    while let Some(l) = lines.peek() {
        if !l.trim().is_empty() {
            lines.pos += 1;
            return Err(lines.err("trailing content"));
        }
        lines.pos += 1;
    }
    Ok(())
}

fn powers_to_string(p: &[usize]) -> String {
    p.iter().map(|x| format!(" {x}")).collect()
}

pub fn write_private_key(sk: &PrivateKey) -> String {
    let pk = sk.public_key();
    let (q, n) = (pk.q(), pk.n());
    let k = sk.field();
    let poly = sk.polynomial();
    let a = sk.affine();
    let mut out = String::new();
    write_header(&mut out, q, n, pk.t());
    out.push_str("PRIVATE\n");
    out.push_str(&k.descriptor());
    out.push('\n');
    out.push_str(&format!("CONST {}\n", digits_to_string(q, poly.constant.coords())));
    for t in &poly.mixed {
        out.push_str(&format!(
            "MIXED {} {}{}\n",
            digits_to_string(q, t.coeff.coords()),
            t.y_power,
            powers_to_string(&t.x_powers)
        ));
    }
    for t in &poly.pure {
        out.push_str(&format!("PURE {}{}\n", digits_to_string(q, t.coeff.coords()), powers_to_string(&t.x_powers)));
    }
    out.push_str("AFFINE\n");
    for (name, m) in [("A", &a.a), ("B", &a.b)] {
        for i in 0..n {
            out.push_str(&format!("{name} {}\n", digits_to_string(q, m.row(i))));
        }
    }
    out.push_str(&format!("C {}\n", digits_to_string(q, &a.c)));
    out.push_str(&format!("D {}\n", digits_to_string(q, &a.d)));
    write_public_body(&mut out, pk);
    out
}

/// Parses a private key and checks that its public part is the expansion of
/// its private polynomial.
pub fn parse_private_key(text: &str) -> Result<PrivateKey> {
    let mut lines = Lines::new(text);
    let (q, n, t) = read_header(&mut lines)?;
    lines.expect("PRIVATE")?;
    let words = lines.expect("F")?;
    let nums: Vec<usize> = words.iter().map(|w| lines.num(w)).collect::<Result<_>>()?;
    if nums.len() != n + 4 || nums[2] != n {
        return Err(lines.err("field descriptor does not match the header"));
    }
    let (p, r) = (nums[0], nums[1]);
    if p.checked_pow(r as u32) != Some(q) {
        return Err(lines.err(format!("{p}^{r} is not {q}")));
    }
    let modulus: Vec<Fq> = nums[3..].iter().map(|&c| c as Fq).collect();
    if nums[3..].iter().any(|&c| c >= q) {
        return Err(lines.err("modulus coefficient outside the base field"));
    }
    let k = lines.wrap(ExtensionField::build(q, n, Some(modulus)))?;
    let element = |lines: &Lines, s: &str| -> Result<FieldElement> {
        let d = lines.digits(q, s, n)?;
        lines.wrap(k.from_coords(d))
    };
    let words = lines.expect("CONST")?;
    let constant = element(&lines, words.first().ok_or_else(|| lines.err("missing constant"))?)?;
    let mut mixed = Vec::new();
    let mut pure = Vec::new();
    loop {
        let line = lines.next()?;
        let words: Vec<&str> = line.split_whitespace().collect();
        let powers = |lines: &Lines, ws: &[&str]| -> Result<Vec<usize>> {
            let p: Vec<usize> = ws.iter().map(|w| lines.num(w)).collect::<Result<_>>()?;
            if p.is_empty() || p.iter().any(|&x| x >= n) {
                return Err(lines.err("Frobenius indices must lie in 0..n"));
            }
            Ok(p)
        };
        match words.first() {
            Some(&"MIXED") if words.len() >= 4 => {
                let coeff = element(&lines, words[1])?;
                let y_power: usize = lines.num(words[2])?;
                if y_power >= n {
                    return Err(lines.err("Frobenius indices must lie in 0..n"));
                }
                mixed.push(MixedTerm { coeff, y_power, x_powers: powers(&lines, &words[3..])? });
            }
            Some(&"PURE") if words.len() >= 3 => {
                let coeff = element(&lines, words[1])?;
                pure.push(PureTerm { coeff, x_powers: powers(&lines, &words[2..])? });
            }
            Some(&"AFFINE") if words.len() == 1 => break,
            _ => return Err(lines.err("expected MIXED, PURE or AFFINE")),
        }
    }
    let mut read_matrix = |name: &str| -> Result<Matrix> {
        let rows = (0..n)
            .map(|_| {
                let w = lines.expect(name)?;
                lines.digits(q, w.first().copied().unwrap_or(""), n)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_rows(rows))
    };
    let a = read_matrix("A")?;
    let b = read_matrix("B")?;
    let w = lines.expect("C")?;
    let c = lines.digits(q, w.first().copied().unwrap_or(""), n)?;
    let w = lines.expect("D")?;
    let d = lines.digits(q, w.first().copied().unwrap_or(""), n)?;
    let affine = lines.wrap(AffinePair::from_parts(k.base(), a, c, b, d))?;
    let public = read_public_body(&mut lines, k.base(), n, t)?;
    expect_eof(&mut lines)?;
    let poly = PrivatePolynomial { mixed, pure, constant };
    lines.wrap(PrivateKey::new(k, poly, affine, public))
}

pub fn write_signature(q: usize, sig: &Signature) -> String {
    format!("{SIG_MAGIC} {} {}\n", sig.salt, digits_to_string(q, &sig.x))
}

pub fn parse_signature(q: usize, n: usize, text: &str) -> Result<Signature> {
    let mut lines = Lines::new(text);
    let words = lines.expect(SIG_MAGIC)?;
    if words.len() != 2 {
        return Err(lines.err("signature needs salt and digits"));
    }
    let salt = lines.num(words[0])?;
    let x = lines.digits(q, words[1], n)?;
    expect_eof(&mut lines)?;
    Ok(Signature { salt, x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpe::{keygen, KeyGenParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn digit_strings() {
        assert_eq!(digits_to_string(2, &[1, 0, 1]), "101");
        assert_eq!(digits_to_string(16, &[15, 0]), "f0");
        assert_eq!(digits_to_string(256, &[255, 1]), "ff01");
        assert_eq!(parse_digits(256, "ff01", 2).unwrap(), vec![255, 1]);
        assert!(parse_digits(2, "102", 3).is_err());
        assert!(parse_digits(2, "10", 3).is_err());
        assert!(parse_digits(16, "g", 1).is_err());
    }

    #[test]
    fn key_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (pk, sk) = keygen(&KeyGenParams::new(2, 8), &mut rng).unwrap();
        let text = write_public_key(&pk);
        assert!(text.starts_with("HPE1 2 8 "));
        assert_eq!(parse_public_key(&text).unwrap(), pk);
        let text = write_private_key(&sk);
        let back = parse_private_key(&text).unwrap();
        assert_eq!(back, sk);
        assert_eq!(write_private_key(&back), text);
    }

    #[test]
    fn key_roundtrip_gf16() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut params = KeyGenParams::new(16, 3);
        params.degx_max = 64;
        let (pk, sk) = keygen(&params, &mut rng).unwrap();
        assert_eq!(parse_public_key(&write_public_key(&pk)).unwrap(), pk);
        assert_eq!(parse_private_key(&write_private_key(&sk)).unwrap(), sk);
    }

    #[test]
    fn tampered_private_key_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (_, sk) = keygen(&KeyGenParams::new(2, 8), &mut rng).unwrap();
        let text = write_private_key(&sk);
        let line = text.lines().find(|l| l.starts_with("CONST ")).unwrap();
        let mut digits: Vec<u8> = line[6..].bytes().collect();
        digits[0] = if digits[0] == b'0' { b'1' } else { b'0' };
        let tampered = text.replacen(line, &format!("CONST {}", String::from_utf8(digits).unwrap()), 1);
        assert!(matches!(parse_private_key(&tampered), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(parse_public_key(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_public_key("HPE2 2 8 3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_public_key("HPE1 2 8 3\nPRIVATE\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_public_key("HPE1 6 8 3\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn signature_roundtrip() {
        let sig = Signature { salt: 42, x: vec![1, 0, 1, 1] };
        let text = write_signature(2, &sig);
        assert_eq!(text, "SIG1 42 1011\n");
        assert_eq!(parse_signature(2, 4, &text).unwrap(), sig);
        assert!(parse_signature(2, 5, &text).is_err());
        assert!(parse_signature(2, 4, "SIG1 x 1011").is_err());
    }
}
