//! The `ia` command line.
//!
//! Exit codes: 0 holds, 1 fails, 2 usage or input error (also a failed
//! `--verify` cross-check or an inconsistent `check all`), 3 inconclusive.
//!
//! Strategy narratives for `atc` and `tb` are printed as indented play
//! trees. Each node reads `state | {spec states}: choice`, and each edge
//! `--label-->` leads to the node one level deeper. The `{spec states}` part
//! only appears when the right-hand side is tracked as a set.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::automaton::InterfaceAutomaton;
use crate::error::Error;
use crate::format::{export_dot_with, parse, serialize};
use crate::game::{refute_atc_enumerative, AtcStatus, DEFAULT_BUDGET};
use crate::lattice::{check_all, check_relation, AllOptions};
use crate::oracle::{oracle_if, oracle_iuoe, oracle_ioco, oracle_uioco};
use crate::semantics::{enumerate_ftraces, enumerate_traces};
use crate::transform::{delta_closure, determinize, determinize_iu, QuiescenceConfig};
use crate::verdict::{Relation, Status, Verdict};

#[derive(Parser, Debug)]
#[command(name = "ia", version, about = "Refinement and conformance checks for interface automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Exploration depth for bounded games, the oracle and trace listings.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Name of the quiescence output added by the delta closure.
    #[arg(long = "delta-label", value_name = "NAME", default_value = "delta")]
    delta_label: String,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a relation between an implementation and a specification.
    Check {
        #[arg(value_parser = parse_check_rel)]
        relation: CheckRel,
        implementation: PathBuf,
        specification: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Cross-check against the trace oracle at --depth.
        #[arg(long)]
        verify: bool,
        /// Work limit for the bounded game searches.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Apply a transformation and print the result.
    Transform {
        kind: TransformKind,
        input: PathBuf,
        output: Option<PathBuf>,
        #[arg(long = "delta-label", value_name = "NAME", default_value = "delta")]
        delta_label: String,
        /// Emit Graphviz DOT instead of the text format.
        #[arg(long)]
        dot: bool,
    },
    /// List traces, or input-failure traces, up to --depth labels.
    Traces {
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        failures: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the brute-force trace oracle alone.
    Oracle {
        relation: OracleRel,
        implementation: PathBuf,
        specification: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Summarize an automaton.
    Info {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CheckRel {
    One(Relation),
    All,
}

fn parse_check_rel(s: &str) -> std::result::Result<CheckRel, String> {
    if s == "all" {
        return Ok(CheckRel::All);
    }
    Relation::from_name(s).map(CheckRel::One).ok_or_else(|| {
        let names: Vec<&str> = Relation::ALL.iter().map(|r| r.name()).collect();
        format!("unknown relation `{s}`; expected one of {}, all", names.join(", "))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TransformKind {
    Delta,
    Det,
    Detiu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleRel {
    If,
    Iuoe,
    Uioco,
    Ioco,
}

/// Result of one subcommand: text for stdout and an exit code.
struct Report {
    text: String,
    code: i32,
}

/// Runs the command line `args` (program name first), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(shown.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(shown.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(r) => {
            if out.write_all(r.text.as_bytes()).is_err() {
                return 2;
            }
            r.code
        }
        Err(e) => {
            let _ = writeln!(err, "{}", describe(&e));
            2
        }
    }
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Load(PathBuf, Error),
    Core(Error),
    Verify(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn describe(e: &CliError) -> String {
    match e {
        CliError::Io(p, e) => format!("error[Io]: {}: {e}", p.display()),
        CliError::Load(p, e) => format!("error[{}]: {}: {e}", e.kind(), p.display()),
        CliError::Core(e) => format!("error[{}]: {e}", e.kind()),
        CliError::Verify(m) => format!("error[Verify]: cross-check failed: {m}"),
    }
}

fn load(path: &Path) -> std::result::Result<InterfaceAutomaton, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    parse(&text).map_err(|e| CliError::Load(path.to_path_buf(), e))
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Holds => 0,
        Status::Fails => 1,
        Status::Inconclusive => 3,
    }
}

fn dispatch(cmd: Command) -> std::result::Result<Report, CliError> {
    match cmd {
        Command::Check {
            relation,
            implementation,
            specification,
            common,
            verify,
            budget,
        } => {
            let s1 = load(&implementation)?;
            let s2 = load(&specification)?;
            let cfg = QuiescenceConfig::new(common.delta_label.clone());
            match relation {
                CheckRel::All => {
                    let opts = AllOptions {
                        depth: common.depth,
                        budget,
                    };
                    let report = check_all(&s1, &s2, &cfg, opts)?;
                    if verify {
                        for v in report.results.iter().filter_map(|e| e.verdict()) {
                            cross_check(&s1, &s2, &cfg, v, common.depth, budget)?;
                        }
                    }
                    let text = if common.json {
                        report.to_json() + "\n"
                    } else {
                        report.to_text()
                    };
                    let code = if report.consistent { 0 } else { 2 };
                    Ok(Report { text, code })
                }
                CheckRel::One(rel) => {
                    let v = check_relation(&s1, &s2, &cfg, rel, common.depth, budget)?;
                    if verify {
                        cross_check(&s1, &s2, &cfg, &v, common.depth, budget)?;
                    }
                    Ok(verdict_report(&v, common.json))
                }
            }
        }
        Command::Transform {
            kind,
            input,
            output,
            delta_label,
            dot,
        } => {
            let s = load(&input)?;
            let t = match kind {
                TransformKind::Delta => delta_closure(&s, &QuiescenceConfig::new(delta_label.clone()))?,
                TransformKind::Det => determinize(&s),
                TransformKind::Detiu => determinize_iu(&s),
            };
            let text = if dot {
                export_dot_with(&t, &delta_label)
            } else {
                serialize(&t)
            };
            match output {
                Some(p) => {
                    fs::write(&p, text).map_err(|e| CliError::Io(p.clone(), e))?;
                    Ok(Report {
                        text: String::new(),
                        code: 0,
                    })
                }
                None => Ok(Report { text, code: 0 }),
            }
        }
        Command::Traces {
            input,
            depth,
            failures,
            json,
        } => {
            let s = load(&input)?;
            Ok(Report {
                text: traces_text(&s, depth, failures, json),
                code: 0,
            })
        }
        Command::Oracle {
            relation,
            implementation,
            specification,
            common,
        } => {
            let s1 = load(&implementation)?;
            let s2 = load(&specification)?;
            let cfg = QuiescenceConfig::new(common.delta_label.clone());
            let k = common.depth;
            let v = match relation {
                OracleRel::If => oracle_if(&s1, &s2, k)?,
                OracleRel::Iuoe => oracle_iuoe(&s1, &s2, k)?,
                OracleRel::Uioco => oracle_uioco(&s1, &s2, &cfg, k)?,
                OracleRel::Ioco => oracle_ioco(&s1, &s2, &cfg, k)?,
            };
            Ok(verdict_report(&v, common.json))
        }
        Command::Info { input, json } => {
            let s = load(&input)?;
            Ok(Report {
                text: info_text(&s, json),
                code: 0,
            })
        }
    }
}

fn verdict_report(v: &Verdict, json: bool) -> Report {
    let text = if json { v.to_json() + "\n" } else { v.to_text() };
    Report {
        text,
        code: status_code(v.status),
    }
}

/// Compares `v` with an independent procedure and errors on disagreement.
fn cross_check(
    s1: &InterfaceAutomaton,
    s2: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
    v: &Verdict,
    k: usize,
    budget: u64,
) -> std::result::Result<(), CliError> {
    let oracle = match v.relation {
        Relation::If => oracle_if(s1, s2, k)?,
        Relation::Iuoe | Relation::Tb => oracle_iuoe(s1, s2, k)?,
        Relation::EquivIf => {
            let there = oracle_if(s1, s2, k)?;
            let back = oracle_if(s2, s1, k)?;
            let status = match (there.status, back.status) {
                (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
                (Status::Holds, Status::Holds) => Status::Holds,
                _ => Status::Inconclusive,
            };
            // Only the status is compared: the witness may come from either direction.
            return agree(v, &Verdict::new(Relation::EquivIf, status, "oracle"), k, false);
        }
        Relation::Uioco => oracle_uioco(s1, s2, cfg, k)?,
        Relation::Ioco => oracle_ioco(s1, s2, cfg, k)?,
        Relation::Atc => {
            let other = refute_atc_enumerative(s1, s2, k, budget)?;
            let main = v.status == Status::Fails;
            return match other {
                AtcStatus::Inconclusive => Ok(()),
                _ if v.status == Status::Inconclusive && !v.notes.is_empty() => Ok(()),
                AtcStatus::Refuted if main => Ok(()),
                AtcStatus::HoldsExact if v.status == Status::Holds => Ok(()),
                other => Err(CliError::Verify(format!(
                    "atc game says {}, strategy enumeration says {other:?}",
                    v.status
                ))),
            };
        }
        Relation::As => return Ok(()),
    };
    agree(v, &oracle, k, true)
}

fn agree(v: &Verdict, oracle: &Verdict, k: usize, witnesses: bool) -> std::result::Result<(), CliError> {
    let wlen = |v: &Verdict| v.witness.as_ref().map(|w| w.trace.len());
    let ok = match (v.status, oracle.status) {
        (Status::Fails, Status::Fails) => !witnesses || wlen(v) == wlen(oracle),
        (Status::Holds, Status::Holds) => true,
        (_, Status::Inconclusive) => {
            // The oracle covers every witness whose trace is shorter than k.
            !(v.status == Status::Fails && (!witnesses || wlen(v).is_some_and(|n| n < k)))
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Verify(format!(
            "{} is {} by {} but {} by the oracle at depth {k}",
            v.relation, v.status, v.method, oracle.status
        )))
    }
}

fn traces_text(s: &InterfaceAutomaton, depth: usize, failures: bool, json: bool) -> String {
    let alphabet = s.alphabet();
    let mut out = String::new();
    if failures {
        let all = enumerate_ftraces(s, depth);
        if json {
            let rows: Vec<serde_json::Value> = all
                .iter()
                .map(|f| {
                    let mut row: Vec<serde_json::Value> =
                        f.body.names(alphabet).into_iter().map(serde_json::Value::from).collect();
                    if let Some(a) = f.refusal {
                        row.push(serde_json::json!({ "refuse": alphabet.name(a) }));
                    }
                    serde_json::Value::from(row)
                })
                .collect();
            out = serde_json::Value::from(rows).to_string() + "\n";
        } else {
            for f in &all {
                out.push_str(&format!("{}\n", f.display(alphabet)));
            }
        }
    } else {
        let all = enumerate_traces(s, depth);
        if json {
            let rows: Vec<Vec<String>> = all.iter().map(|t| t.names(alphabet)).collect();
            out = serde_json::to_string(&rows).expect("names serialize") + "\n";
        } else {
            for t in &all {
                out.push_str(&format!("{}\n", t.display(alphabet)));
            }
        }
    }
    out
}

fn info_text(s: &InterfaceAutomaton, json: bool) -> String {
    let refused = s
        .refused_input()
        .map(|(q, a)| format!("{} refuses {}", s.state_name(q), s.alphabet().name(a)));
    let longest = s.longest_path();
    if json {
        let v = serde_json::json!({
            "states": s.num_states(),
            "reachable_states": s.reachable_states().len(),
            "transitions": s.num_transitions(),
            "inputs": s.alphabet().input_names(),
            "outputs": s.alphabet().output_names(),
            "deterministic": s.is_deterministic(),
            "input_enabled": s.is_input_enabled(),
            "input_enabled_all_states": s.is_input_enabled_all_states(),
            "acyclic": longest.is_some(),
            "longest_path": longest,
        });
        return v.to_string() + "\n";
    }
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut out = String::new();
    out.push_str(&format!(
        "states: {} ({} reachable)\n",
        s.num_states(),
        s.reachable_states().len()
    ));
    out.push_str(&format!("transitions: {}\n", s.num_transitions()));
    out.push_str(&format!("inputs: {}\n", s.alphabet().input_names().join(" ")));
    out.push_str(&format!("outputs: {}\n", s.alphabet().output_names().join(" ")));
    out.push_str(&format!("deterministic: {}\n", yes(s.is_deterministic())));
    match refused {
        Some(r) => out.push_str(&format!("input-enabled (reachable): no, {r}\n")),
        None => out.push_str("input-enabled (reachable): yes\n"),
    }
    out.push_str(&format!(
        "input-enabled (all states): {}\n",
        yes(s.is_input_enabled_all_states())
    ));
    match longest {
        Some(n) => out.push_str(&format!("acyclic: yes, longest path {n}\n")),
        None => out.push_str("acyclic: no\n"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("ia").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn relation_names() {
        assert_eq!(parse_check_rel("all"), Ok(CheckRel::All));
        assert_eq!(parse_check_rel("equiv-if"), Ok(CheckRel::One(Relation::EquivIf)));
        assert!(parse_check_rel("sim").unwrap_err().contains("expected one of"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(status_code(Status::Holds), 0);
        assert_eq!(status_code(Status::Fails), 1);
        assert_eq!(status_code(Status::Inconclusive), 3);
        assert_eq!(run_args(&["--help"]).0, 0);
        let (code, _, err) = run_args(&["traces", "/nonexistent/x.ia"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error[Io]: /nonexistent/x.ia"));
        assert_eq!(run_args(&["check", "if"]).0, 2);
    }

    #[test]
    fn oracle_disagreement_is_detected() {
        let mut v = Verdict::new(Relation::If, Status::Fails, "test");
        v.witness = Some(crate::verdict::Witness {
            kind: crate::verdict::WitnessKind::OutputExtension,
            trace: vec!["a".into()],
            action: "x".into(),
        });
        let inconclusive = Verdict::new(Relation::If, Status::Inconclusive, "oracle");
        assert!(agree(&v, &inconclusive, 4, true).is_err());
        assert!(agree(&v, &inconclusive, 1, true).is_ok());
        let holds = Verdict::new(Relation::If, Status::Holds, "oracle");
        assert!(agree(&v, &holds, 4, true).is_err());
    }
}
