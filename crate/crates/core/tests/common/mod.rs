//! Seeded random interface automata for the property suites.
#![allow(dead_code)]

use std::path::PathBuf;

use ia_core::{format::parse, validate, InterfaceAutomaton, RawAutomaton};
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const INPUTS: [&str; 2] = ["a", "b"];
pub const OUTPUTS: [&str; 2] = ["x", "y"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus(name: &str) -> InterfaceAutomaton {
    let path = corpus_dir().join(format!("{name}.ia"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_states: usize,
    /// Only edges to strictly later states.
    pub acyclic: bool,
    /// Every input enabled in every state.
    pub input_enabled: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_states: 5,
            acyclic: false,
            input_enabled: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Labels {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// One to two inputs and one to two outputs, or occasionally none of one kind.
pub fn labels(rng: &mut ChaCha8Rng) -> Labels {
    let ni = rng.gen_range(0..=2);
    let no = rng.gen_range(if ni == 0 { 1 } else { 0 }..=2);
    Labels {
        inputs: INPUTS[..ni].iter().map(|s| s.to_string()).collect(),
        outputs: OUTPUTS[..no].iter().map(|s| s.to_string()).collect(),
    }
}

/// Density is the chance that a state enables a given label; an enabled
/// label gets a second successor a quarter of the time.
pub fn automaton(rng: &mut ChaCha8Rng, labels: &Labels, shape: Shape) -> InterfaceAutomaton {
    let n = rng.gen_range(1..=shape.max_states);
    let density: f64 = rng.gen_range(0.3..=0.8);
    let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut transitions = Vec::new();
    let all: Vec<(&String, bool)> = labels
        .inputs
        .iter()
        .map(|l| (l, true))
        .chain(labels.outputs.iter().map(|l| (l, false)))
        .collect();
    for p in 0..n {
        let targets: Vec<usize> = if shape.acyclic { (p + 1..n).collect() } else { (0..n).collect() };
        if targets.is_empty() {
            continue;
        }
        for &(l, is_input) in &all {
            let forced = is_input && shape.input_enabled;
            if !forced && !rng.gen_bool(density) {
                continue;
            }
            let fanout = if targets.len() > 1 && rng.gen_bool(0.25) { 2 } else { 1 };
            for &q in targets.choose_multiple(rng, fanout) {
                transitions.push((names[p].clone(), l.clone(), names[q].clone()));
            }
        }
    }
    let raw = RawAutomaton {
        states: names.clone(),
        inputs: labels.inputs.clone(),
        outputs: labels.outputs.clone(),
        transitions,
        initial: names[0].clone(),
    };
    validate(&raw).expect("generated automata are well formed")
}

pub fn pair(rng: &mut ChaCha8Rng, left: Shape, right: Shape) -> (InterfaceAutomaton, InterfaceAutomaton) {
    let l = labels(rng);
    (automaton(rng, &l, left), automaton(rng, &l, right))
}

/// Drops each transition with probability `p`.
pub fn mutate(rng: &mut ChaCha8Rng, s: &InterfaceAutomaton, p: f64) -> InterfaceAutomaton {
    let mut raw = s.to_raw();
    raw.transitions.retain(|_| !rng.gen_bool(p));
    validate(&raw).expect("deleting transitions keeps automata well formed")
}

/// Implementation/specification pairs from the corpus that get golden files.
pub const PAIRS: [(&str, &str); 8] = [
    ("s_B", "s_A"),
    ("s_C", "s_A"),
    ("s_D", "s_A"),
    ("s_E", "s_F"),
    ("s_G", "s_H"),
    ("s_I", "s_J"),
    ("s_M", "s_N"),
    ("s_P", "s_Q"),
];

pub const CHECKED: [&str; 9] = ["if", "iuoe", "equiv-if", "uioco", "ioco", "as", "atc", "tb", "all"];

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the `ia` binary inside the corpus directory.
pub fn ia(args: &[&str]) -> Run {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_ia"))
        .args(args)
        .current_dir(corpus_dir())
        .output()
        .expect("ia runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// Command lines covered by one golden file, keyed by file stem.
pub fn golden_cases() -> Vec<(String, Vec<Vec<String>>)> {
    let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut cases = Vec::new();
    for (i, s) in PAIRS {
        let (fi, fs) = (format!("{i}.ia"), format!("{s}.ia"));
        let mut runs = Vec::new();
        for rel in CHECKED {
            runs.push(owned(&["check", rel, &fi, &fs, "--depth", "4"]));
            runs.push(owned(&["check", rel, &fi, &fs, "--depth", "4", "--json"]));
        }
        cases.push((format!("check_{i}_{s}"), runs));
    }
    let misc = vec![
        owned(&["transform", "det", "s_A.ia"]),
        owned(&["transform", "detiu", "s_A.ia"]),
        owned(&["transform", "detiu", "s_A.ia", "--dot"]),
        owned(&["transform", "delta", "s_E.ia"]),
        owned(&["transform", "delta", "s_E.ia", "--dot"]),
        owned(&["transform", "delta", "s_E.ia", "--delta-label", "y"]),
        owned(&["traces", "s_A.ia", "--depth", "2"]),
        owned(&["traces", "s_D.ia", "--depth", "3", "--failures"]),
        owned(&["traces", "s_D.ia", "--depth", "3", "--failures", "--json"]),
        owned(&["traces", "s_D.ia", "--depth", "0"]),
        owned(&["oracle", "if", "s_B.ia", "s_A.ia", "--depth", "4"]),
        owned(&["oracle", "iuoe", "s_C.ia", "s_A.ia", "--depth", "4"]),
        owned(&["oracle", "uioco", "s_E.ia", "s_F.ia", "--depth", "48"]),
        owned(&["oracle", "ioco", "s_E.ia", "s_F.ia", "--depth", "3", "--json"]),
        owned(&["info", "s_F.ia"]),
        owned(&["info", "s_C.ia", "--json"]),
        owned(&["check", "if", "s_A.ia", "missing.ia"]),
        owned(&["check", "if", "s_A.ia", "s_E.ia"]),
        owned(&["check", "bogus", "s_A.ia", "s_A.ia"]),
    ];
    cases.push(("misc".to_string(), misc));
    cases
}

/// The transcript of a list of command lines as stored in a golden file.
pub fn transcript(runs: &[Vec<String>]) -> String {
    let mut out = String::new();
    for args in runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = ia(&refs);
        out.push_str(&format!("$ ia {}\nexit: {}\n", args.join(" "), r.code));
        out.push_str(&r.stdout);
        for line in r.stderr.lines() {
            out.push_str(&format!("stderr: {line}\n"));
        }
        out.push('\n');
    }
    out
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}
