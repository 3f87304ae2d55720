use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hpe::attack::{
    default_sample_count, harvest_hpe_relations, harvest_relations, patarin_attack, AttackReport,
};
use hpe::format::{
    digits_to_string, parse_digits, parse_private_key, parse_public_key, parse_signature, write_private_key,
    write_public_key, write_signature,
};
use hpe::hpe::{decrypt_candidates, decrypt_raw, encrypt_detailed, keygen, EncryptConfig, KeyGenParams, PublicKey};
use hpe::im::{default_theta, ImKeyPair};
use hpe::sig::{sign, signcrypt, unsigncrypt, verify};
use hpe::Error;

const EXIT_REJECT: u8 = 1;
const EXIT_ATTACK_INFEASIBLE: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

/// Hidden polynomial equations: keys, encryption, signatures, signcryption
/// and the linearization attack experiment.
#[derive(Parser)]
#[command(name = "hpe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct KeyArgs {
    #[arg(long, default_value_t = 2)]
    q: usize,
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Degree bound t on the private polynomial.
    #[arg(long, default_value_t = 3)]
    t: usize,
    /// Maximum degree of the private polynomial in X.
    #[arg(long, default_value_t = 9)]
    degx: u64,
}

impl KeyArgs {
    fn params(&self) -> KeyGenParams {
        let mut p = KeyGenParams::new(self.q, self.n);
        p.t_max = self.t;
        p.degx_max = self.degx;
        p
    }
}

#[derive(Args, Clone)]
struct IoArgs {
    /// Input file (standard input when absent).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Im,
    Hpe,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair and print public-key statistics.
    Keygen {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "priv")]
        private: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt text; one ciphertext line per block of letters.
    Encrypt {
        #[arg(long = "pub")]
        public: PathBuf,
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Decrypt ciphertext lines.
    Decrypt {
        #[arg(long = "priv")]
        private: PathBuf,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Sign a message.
    Sign {
        #[arg(long = "priv")]
        private: PathBuf,
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
    /// Verify a signature; exit 0 on accept, 1 on reject.
    Verify {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Sign with the sender's private key and encrypt to the receiver.
    Signcrypt {
        /// Sender's private key.
        #[arg(long = "priv")]
        private: PathBuf,
        /// Receiver's public key.
        #[arg(long = "pub")]
        public: PathBuf,
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 32)]
        trials: usize,
    },
    /// Decrypt with the receiver's private key and check the sender.
    Unsigncrypt {
        /// Receiver's private key.
        #[arg(long = "priv")]
        private: PathBuf,
        /// Sender's public key.
        #[arg(long = "pub")]
        public: PathBuf,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run the bilinear-relation attack against a fresh key.
    Attack {
        #[arg(long, value_enum, default_value = "im")]
        target: Target,
        #[arg(long, default_value_t = 2)]
        q: usize,
        /// Extension degree (default 9 for im, 16 for hpe).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 3)]
        t: usize,
        #[arg(long, default_value_t = 9)]
        degx: u64,
        /// Attack an existing HPE public key instead of a fresh one.
        #[arg(long = "pub")]
        public: Option<PathBuf>,
        /// Ciphertexts to attack.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measure key size, encryption success rate and timings.
    Bench {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Self { code, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } | Error::SymbolOutOfAlphabet(_) | Error::LengthMismatch { .. } => EXIT_DATA,
            Error::InvalidOrder(_)
            | Error::InvalidDegree(_)
            | Error::InvalidParams(_)
            | Error::NotIrreducible
            | Error::BadTheta { .. }
            | Error::TooLarge(_) => EXIT_USAGE,
            Error::AmbiguousDecryption(_) => EXIT_AMBIGUOUS,
            Error::SolutionSpaceTooLarge(_) => EXIT_ATTACK_INFEASIBLE,
            _ => EXIT_REJECT,
        };
        Self::new(code, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn rng_from(seed: Option<u64>) -> ChaCha8Rng {
    match seed {
        Some(s) => ChaCha8Rng::seed_from_u64(s),
        None => ChaCha8Rng::from_entropy(),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn read_input(io: &IoArgs) -> Result<String, Failure> {
    match &io.input {
        Some(p) => read_file(p),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::new(EXIT_DATA, format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

/// Input text without its final line break.
fn read_message(io: &IoArgs) -> Result<String, Failure> {
    let mut s = read_input(io)?;
    if s.ends_with('\n') {
        s.pop();
        if s.ends_with('\r') {
            s.pop();
        }
    }
    Ok(s)
}

fn write_output(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_DATA, format!("stdout: {e}"))),
    }
}

fn load_public(path: &Path) -> Result<PublicKey, Failure> {
    parse_public_key(&read_file(path)?).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn load_private(path: &Path) -> Result<hpe::hpe::PrivateKey, Failure> {
    parse_private_key(&read_file(path)?).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

/// Splits text into blocks of `m` letters, padding the last with spaces.
fn blocks(text: &str, m: usize) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return vec![" ".repeat(m)];
    }
    chars
        .chunks(m)
        .map(|c| {
            let mut s: String = c.iter().collect();
            s.extend(std::iter::repeat_n(' ', m - c.len()));
            s
        })
        .collect()
}

fn parse_ciphertexts(text: &str, q: usize, n: usize) -> Result<Vec<Vec<u8>>, Failure> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    if lines.is_empty() {
        return Err(Failure::new(EXIT_DATA, "no ciphertext lines"));
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| parse_digits(q, l, n).map_err(|e| Failure::new(EXIT_DATA, format!("line {}: {e}", i + 1))))
        .collect()
}

/// Joins one decoded block per ciphertext line, or lists the candidates of
/// the ambiguous blocks.
fn assemble(per_block: Vec<Vec<String>>) -> Result<String, Failure> {
    if let Some(i) = per_block.iter().position(Vec::is_empty) {
        return Err(Failure::new(EXIT_REJECT, format!("block {}: {}", i + 1, Error::NoValidCandidate)));
    }
    if per_block.iter().any(|c| c.len() > 1) {
        let mut listing = String::new();
        for (i, c) in per_block.iter().enumerate().filter(|(_, c)| c.len() > 1) {
            listing.push_str(&format!("block {}:", i + 1));
            for cand in c {
                listing.push_str(&format!(" {cand:?}"));
            }
            listing.push('\n');
        }
        print!("{listing}");
        return Err(Failure::new(EXIT_AMBIGUOUS, "ambiguous decryption"));
    }
    let text: String = per_block.into_iter().map(|mut c| c.pop().unwrap()).collect();
    Ok(format!("{}\n", text.trim_end_matches(' ')))
}

fn cmd_keygen(key: &KeyArgs, public: &Path, private: &Path, seed: Option<u64>) -> CmdResult {
    let mut rng = rng_from(seed);
    let (pk, sk) = keygen(&key.params(), &mut rng)?;
    write_output(Some(public), &write_public_key(&pk))?;
    write_output(Some(private), &write_private_key(&sk))?;
    println!("equations={}", pk.equations().len());
    println!("variables={}", 2 * pk.n());
    println!("terms={}", pk.term_count());
    println!("t={}", pk.t());
    println!("block_len={}", pk.alphabet().block_len());
    println!("letters_per_block={}", pk.alphabet().letters_per_message(pk.n())?);
    Ok(())
}

fn cmd_encrypt(public: &Path, io: &IoArgs, trials: usize) -> CmdResult {
    let pk = load_public(public)?;
    let text = read_message(io)?;
    let mut rng = rng_from(io.seed);
    let m = pk.alphabet().letters_per_message(pk.n())?;
    let cfg = EncryptConfig { max_trials: trials };
    let mut out = String::new();
    for block in blocks(&text, m) {
        let enc = encrypt_detailed(&pk, &block, &cfg, &mut rng)?;
        out.push_str(&digits_to_string(pk.q(), &enc.y));
        out.push('\n');
    }
    write_output(io.out.as_deref(), &out)
}

fn cmd_decrypt(private: &Path, io: &IoArgs) -> CmdResult {
    let sk = load_private(private)?;
    let pk = sk.public_key();
    let cts = parse_ciphertexts(&read_input(io)?, pk.q(), pk.n())?;
    let per_block = cts
        .iter()
        .map(|y| decrypt_candidates(&sk, y))
        .collect::<Result<Vec<_>, _>>()?;
    let text = assemble(per_block)?;
    write_output(io.out.as_deref(), &text)
}

fn cmd_sign(private: &Path, io: &IoArgs, trials: usize) -> CmdResult {
    let sk = load_private(private)?;
    let msg = read_input(io)?;
    let mut rng = rng_from(io.seed);
    let sig = sign(&sk, msg.as_bytes(), &mut rng, trials)?;
    write_output(io.out.as_deref(), &write_signature(sk.public_key().q(), &sig))
}

fn cmd_verify(public: &Path, sig: &Path, io: &IoArgs) -> CmdResult {
    let pk = load_public(public)?;
    let msg = read_input(io)?;
    let sig = parse_signature(pk.q(), pk.n(), &read_file(sig)?)
        .map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", sig.display())))?;
    if verify(&pk, msg.as_bytes(), &sig) {
        println!("accept");
        Ok(())
    } else {
        println!("reject");
        Err(Failure::new(EXIT_REJECT, "signature rejected"))
    }
}

fn cmd_signcrypt(private: &Path, public: &Path, io: &IoArgs, trials: usize) -> CmdResult {
    let sk = load_private(private)?;
    let pk = load_public(public)?;
    let text = read_message(io)?;
    let mut rng = rng_from(io.seed);
    let m = sk.public_key().alphabet().letters_per_message(pk.n())?;
    let cfg = EncryptConfig { max_trials: trials };
    let mut out = String::new();
    for block in blocks(&text, m) {
        let c = signcrypt(&sk, &pk, &block, &cfg, &mut rng)?;
        out.push_str(&digits_to_string(pk.q(), &c));
        out.push('\n');
    }
    write_output(io.out.as_deref(), &out)
}

fn cmd_unsigncrypt(private: &Path, public: &Path, io: &IoArgs) -> CmdResult {
    let sk = load_private(private)?;
    let pk = load_public(public)?;
    let cts = parse_ciphertexts(&read_input(io)?, pk.q(), pk.n())?;
    let per_block = cts
        .iter()
        .map(|c| match unsigncrypt(&sk, &pk, c) {
            Err(Error::NoValidCandidate) => Ok(Vec::new()),
            other => other,
        })
        .collect::<Result<Vec<_>, _>>()?;
    let text = assemble(per_block)?;
    write_output(io.out.as_deref(), &text)
}

fn random_vector<R: Rng>(q: usize, n: usize, rng: &mut R) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..q) as u8).collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_attack(
    target: Target,
    q: usize,
    n: Option<usize>,
    t: usize,
    degx: u64,
    public: Option<&Path>,
    trials: usize,
    seed: Option<u64>,
) -> CmdResult {
    let mut rng = rng_from(seed);
    let report = match target {
        Target::Im => {
            let n = n.unwrap_or(9);
            let theta = default_theta(q, n)?;
            let kp = ImKeyPair::generate(q, n, theta, &mut rng)?;
            let pk = kp.public_key();
            let samples = default_sample_count(n);
            let start = Instant::now();
            let rels = harvest_relations(pk, samples, &mut rng)?;
            let harvest_seconds = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let (mut recovered, mut residual, mut feasible) = (0, 0u128, !rels.is_empty());
            if feasible {
                for _ in 0..trials {
                    let x = random_vector(q, n, &mut rng);
                    let y = pk.encrypt(&x);
                    match patarin_attack(pk, &rels, &y) {
                        Ok(res) => {
                            residual = residual.max(res.residual);
                            if res.candidates.contains(&x) {
                                recovered += 1;
                            }
                        }
                        Err(Error::SolutionSpaceTooLarge(_)) => feasible = false,
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            AttackReport {
                target: "im".into(),
                q,
                n,
                samples,
                relation_dim: rels.len(),
                residual_size: residual,
                trials,
                recovered,
                harvest_seconds,
                attack_seconds: start.elapsed().as_secs_f64(),
                success: feasible && recovered == trials,
            }
        }
        Target::Hpe => {
            let pk = match public {
                Some(p) => load_public(p)?,
                None => keygen(&KeyArgs { q, n: n.unwrap_or(16), t, degx }.params(), &mut rng)?.0,
            };
            let samples = default_sample_count(pk.n());
            let start = Instant::now();
            let rels = harvest_hpe_relations(&pk, samples, &mut rng)?;
            AttackReport {
                target: "hpe".into(),
                q: pk.q(),
                n: pk.n(),
                samples,
                relation_dim: rels.len(),
                residual_size: 0,
                trials: 0,
                recovered: 0,
                harvest_seconds: start.elapsed().as_secs_f64(),
                attack_seconds: 0.0,
                success: !rels.is_empty(),
            }
        }
    };
    print!("{report}");
    if report.success {
        Ok(())
    } else {
        Err(Failure::new(EXIT_ATTACK_INFEASIBLE, "attack did not succeed"))
    }
}

fn cmd_bench(key: &KeyArgs, trials: usize, seed: Option<u64>) -> CmdResult {
    let mut rng = rng_from(seed);
    let start = Instant::now();
    let (pk, sk) = keygen(&key.params(), &mut rng)?;
    let keygen_seconds = start.elapsed().as_secs_f64();
    let (mut ok, mut max_roots) = (0usize, 0usize);
    let (mut enc_time, mut dec_time) = (0.0, 0.0);
    for _ in 0..trials {
        let x = random_vector(pk.q(), pk.n(), &mut rng);
        let start = Instant::now();
        let y = hpe::hpe::encrypt_raw(&pk, &x, &mut rng);
        enc_time += start.elapsed().as_secs_f64();
        if let Some(y) = y {
            ok += 1;
            let start = Instant::now();
            max_roots = max_roots.max(decrypt_raw(&sk, &y)?.len());
            dec_time += start.elapsed().as_secs_f64();
        }
    }
    println!("q={}", pk.q());
    println!("n={}", pk.n());
    println!("t={}", pk.t());
    println!("terms={}", pk.term_count());
    println!("keygen_seconds={keygen_seconds:.6}");
    println!("trials={trials}");
    println!("single_trial_success_rate={:.4}", ok as f64 / trials.max(1) as f64);
    println!("encrypt_seconds_avg={:.6}", enc_time / trials.max(1) as f64);
    println!("decrypt_seconds_avg={:.6}", dec_time / ok.max(1) as f64);
    println!("max_raw_candidates={max_roots}");
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Keygen { key, public, private, seed } => cmd_keygen(key, public, private, *seed),
        Command::Encrypt { public, io, trials } => cmd_encrypt(public, io, *trials),
        Command::Decrypt { private, io } => cmd_decrypt(private, io),
        Command::Sign { private, io, trials } => cmd_sign(private, io, *trials),
        Command::Verify { public, sig, io } => cmd_verify(public, sig, io),
        Command::Signcrypt { private, public, io, trials } => cmd_signcrypt(private, public, io, *trials),
        Command::Unsigncrypt { private, public, io } => cmd_unsigncrypt(private, public, io),
        Command::Attack { target, q, n, t, degx, public, trials, seed } => {
            cmd_attack(*target, *q, *n, *t, *degx, public.as_deref(), *trials, *seed)
        }
        Command::Bench { key, trials, seed } => cmd_bench(key, *trials, *seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
