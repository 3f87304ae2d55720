use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpe")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Keys {
    public: PathBuf,
    private: PathBuf,
}

fn keygen(dir: &Path, name: &str, extra: &[&str]) -> (Keys, Output) {
    let public = dir.join(format!("{name}.pub"));
    let private = dir.join(format!("{name}.priv"));
    let mut args = vec!["keygen", "--pub", public.to_str().unwrap(), "--priv", private.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = hpe(&args);
    (Keys { public, private }, out)
}

fn stat(out: &Output, key: &str) -> usize {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

#[test]
fn keygen_is_reproducible_with_seed() {
    let dir = TempDir::new().unwrap();
    let (a, oa) = keygen(dir.path(), "a", &["--q", "2", "--n", "16", "--t", "3", "--seed", "7"]);
    let (b, ob) = keygen(dir.path(), "b", &["--q", "2", "--n", "16", "--t", "3", "--seed", "7"]);
    assert_eq!(code(&oa), 0);
    assert_eq!(stdout(&oa), stdout(&ob));
    assert_eq!(fs::read(&a.public).unwrap(), fs::read(&b.public).unwrap());
    assert_eq!(fs::read(&a.private).unwrap(), fs::read(&b.private).unwrap());
    assert_eq!(stat(&oa, "equations"), 16);
}

#[test]
fn term_count_grows_with_n() {
    let dir = TempDir::new().unwrap();
    let counts: Vec<usize> = [8, 16, 32]
        .iter()
        .map(|n| {
            let (_, out) = keygen(dir.path(), &format!("k{n}"), &["--n", &n.to_string(), "--seed", "1"]);
            assert_eq!(code(&out), 0);
            stat(&out, "terms")
        })
        .collect();
    assert!(counts[0] < counts[1] && counts[1] < counts[2], "{counts:?}");
}

#[test]
fn bad_parameters_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let (_, out) = keygen(dir.path(), "x", &["--n", "1"]);
    assert_eq!(code(&out), 64);
    let (_, out) = keygen(dir.path(), "x", &["--q", "6"]);
    assert_eq!(code(&out), 64);
    assert_eq!(code(&hpe(&["frobnicate"])), 64);
    assert_eq!(code(&hpe(&["--help"])), 0);
}

#[test]
fn encrypt_decrypt_pipeline() {
    let dir = TempDir::new().unwrap();
    let (k, _) = keygen(dir.path(), "k", &["--seed", "3"]);
    let msg = dir.path().join("m.txt");
    let ct = dir.path().join("c.txt");
    fs::write(&msg, "Attack at dawn.\n").unwrap();
    let out = hpe(&[
        "encrypt", "--pub", k.public.to_str().unwrap(), "--in", msg.to_str().unwrap(), "--out",
        ct.to_str().unwrap(), "--seed", "5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let lines = fs::read_to_string(&ct).unwrap();
    assert_eq!(lines.lines().count(), 15);
    assert!(lines.lines().all(|l| l.len() == 16));
    let out = hpe(&["decrypt", "--priv", k.private.to_str().unwrap(), "--in", ct.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "Attack at dawn.\n");
}

#[test]
fn encryption_is_reproducible_with_seed() {
    let dir = TempDir::new().unwrap();
    let (k, _) = keygen(dir.path(), "k", &["--seed", "3"]);
    let msg = dir.path().join("m.txt");
    fs::write(&msg, "abc").unwrap();
    let run = || {
        stdout(&hpe(&["encrypt", "--pub", k.public.to_str().unwrap(), "--in", msg.to_str().unwrap(), "--seed", "9"]))
    };
    assert_eq!(run(), run());
}

#[test]
fn symbol_outside_alphabet_is_data_error() {
    let dir = TempDir::new().unwrap();
    let (k, _) = keygen(dir.path(), "k", &["--seed", "3"]);
    let msg = dir.path().join("m.txt");
    fs::write(&msg, "a@b").unwrap();
    let out = hpe(&["encrypt", "--pub", k.public.to_str().unwrap(), "--in", msg.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(code(&out), 65);
}

#[test]
fn wrong_private_key_finds_no_candidate() {
    let dir = TempDir::new().unwrap();
    let (a, _) = keygen(dir.path(), "a", &["--seed", "11"]);
    let (b, _) = keygen(dir.path(), "b", &["--seed", "12"]);
    let msg = dir.path().join("m.txt");
    let ct = dir.path().join("c.txt");
    fs::write(&msg, "Q").unwrap();
    let mut rejected = 0;
    for seed in 0..10 {
        let out = hpe(&[
            "encrypt", "--pub", a.public.to_str().unwrap(), "--in", msg.to_str().unwrap(), "--out",
            ct.to_str().unwrap(), "--seed", &seed.to_string(),
        ]);
        assert_eq!(code(&out), 0);
        let out = hpe(&["decrypt", "--priv", b.private.to_str().unwrap(), "--in", ct.to_str().unwrap()]);
        if code(&out) == 1 {
            rejected += 1;
        }
    }
    assert!(rejected >= 9, "{rejected}/10");
}

#[test]
fn sign_and_verify() {
    let dir = TempDir::new().unwrap();
    let (k, _) = keygen(dir.path(), "k", &["--seed", "4"]);
    let msg = dir.path().join("m.txt");
    let sig = dir.path().join("s.sig");
    fs::write(&msg, "pay 10 coins").unwrap();
    let out = hpe(&[
        "sign", "--priv", k.private.to_str().unwrap(), "--in", msg.to_str().unwrap(), "--out",
        sig.to_str().unwrap(), "--seed", "1",
    ]);
    assert_eq!(code(&out), 0);
    let verify = |sig: &Path, msg: &Path| {
        code(&hpe(&["verify", "--pub", k.public.to_str().unwrap(), "--sig", sig.to_str().unwrap(), "--in", msg.to_str().unwrap()]))
    };
    assert_eq!(verify(&sig, &msg), 0);
    let text = fs::read_to_string(&sig).unwrap();
    assert!(text.starts_with("SIG1 "));
    let last = text.trim_end().chars().last().unwrap();
    let flipped = format!("{}{}\n", &text.trim_end()[..text.trim_end().len() - 1], if last == '0' { '1' } else { '0' });
    let bad = dir.path().join("bad.sig");
    fs::write(&bad, flipped).unwrap();
    assert_eq!(verify(&bad, &msg), 1);
    let other = dir.path().join("o.txt");
    fs::write(&other, "pay 99 coins").unwrap();
    assert_eq!(verify(&sig, &other), 1);
    fs::write(&bad, "SIG1 zero 0101").unwrap();
    assert_eq!(verify(&bad, &msg), 65);
}

#[test]
fn signcrypt_roundtrip() {
    let dir = TempDir::new().unwrap();
    let (alice, _) = keygen(dir.path(), "alice", &["--n", "32", "--seed", "21"]);
    let (bob, _) = keygen(dir.path(), "bob", &["--n", "32", "--seed", "22"]);
    let msg = dir.path().join("m.txt");
    let ct = dir.path().join("c.txt");
    fs::write(&msg, "Hi Alice").unwrap();
    let out = hpe(&[
        "signcrypt", "--priv", bob.private.to_str().unwrap(), "--pub", alice.public.to_str().unwrap(), "--in",
        msg.to_str().unwrap(), "--out", ct.to_str().unwrap(), "--seed", "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = hpe(&[
        "unsigncrypt", "--priv", alice.private.to_str().unwrap(), "--pub", bob.public.to_str().unwrap(), "--in",
        ct.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "Hi Alice\n");
}

#[test]
fn attack_reports() {
    let out = hpe(&["attack", "--target", "im", "--q", "2", "--n", "9", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let report = stdout(&out);
    assert!(report.contains("success=true\n"));
    assert!(report.contains("recovered=100\n"));
    let out = hpe(&["attack", "--target", "hpe", "--n", "16", "--t", "3", "--seed", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("relation_dim=0\n"));
    assert!(stdout(&out).contains("success=false\n"));
    let out = hpe(&["attack", "--target", "im", "--n", "8"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn missing_key_file_is_data_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("none.priv");
    let ct = dir.path().join("c.txt");
    fs::write(&ct, "0101").unwrap();
    let out = hpe(&["decrypt", "--priv", missing.to_str().unwrap(), "--in", ct.to_str().unwrap()]);
    assert_eq!(code(&out), 65);
    let out = hpe(&["attack", "--target", "hpe", "--pub", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 65);
}

#[test]
fn bench_prints_statistics() {
    let out = hpe(&["bench", "--n", "12", "--trials", "50", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let s = stdout(&out);
    for key in ["terms=", "single_trial_success_rate=", "keygen_seconds=", "max_raw_candidates="] {
        assert!(s.contains(key), "{key}");
    }
}
