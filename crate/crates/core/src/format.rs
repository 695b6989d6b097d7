//! The line-oriented `.ia` text format and Graphviz export.
//!
//! ```text
//! # comment
//! inputs a b
//! outputs x
//! initial q0
//! q0 a q1
//! q1 x q0
//! ```
//!
//! Keywords (`inputs`, `outputs`, `initial`, `states`) are recognized in
//! first position before a line is read as a transition. A `states` line
//! declares states that occur in no transition; it is only needed for
//! isolated states and is emitted by [`serialize`] only for them.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::automaton::{is_identifier, validate, InterfaceAutomaton, RawAutomaton};
use crate::error::{Error, Result};

pub fn parse(text: &str) -> Result<InterfaceAutomaton> {
    let mut raw = RawAutomaton::default();
    let mut initial: Option<usize> = None;
    let mut transitions = Vec::new();
    let mut seen_inputs = BTreeSet::new();
    let mut seen_outputs = BTreeSet::new();

    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = tokens.split_first() else {
            continue;
        };
        for t in &tokens {
            if !is_identifier(t) {
                return Err(Error::Syntax {
                    line: line_no,
                    message: format!("`{t}` is not an identifier"),
                });
            }
        }
        match head {
            "inputs" => {
                for &name in rest {
                    if seen_outputs.contains(name) {
                        return Err(Error::AlphabetOverlap {
                            line: line_no,
                            name: name.to_string(),
                        });
                    }
                    if seen_inputs.insert(name) {
                        raw.inputs.push(name.to_string());
                    }
                }
            }
            "outputs" => {
                for &name in rest {
                    if seen_inputs.contains(name) {
                        return Err(Error::AlphabetOverlap {
                            line: line_no,
                            name: name.to_string(),
                        });
                    }
                    if seen_outputs.insert(name) {
                        raw.outputs.push(name.to_string());
                    }
                }
            }
            "initial" => {
                if rest.len() != 1 {
                    return Err(Error::Syntax {
                        line: line_no,
                        message: "`initial` takes exactly one state".to_string(),
                    });
                }
                if initial.is_some() {
                    return Err(Error::DuplicateInitial { line: line_no });
                }
                initial = Some(line_no);
                raw.initial = rest[0].to_string();
                raw.states.push(rest[0].to_string());
            }
            "states" => raw.states.extend(rest.iter().map(|s| s.to_string())),
            _ => {
                if tokens.len() != 3 {
                    return Err(Error::Syntax {
                        line: line_no,
                        message: format!(
                            "expected `<source> <label> <target>`, found {} tokens",
                            tokens.len()
                        ),
                    });
                }
                transitions.push((line_no, tokens[0], tokens[1], tokens[2]));
            }
        }
    }

    if initial.is_none() {
        return Err(Error::MissingInitial);
    }
    for (line, src, label, dst) in transitions {
        if !seen_inputs.contains(label) && !seen_outputs.contains(label) {
            return Err(Error::UndeclaredLabel {
                line,
                label: label.to_string(),
            });
        }
        raw.transitions
            .push((src.to_string(), label.to_string(), dst.to_string()));
    }
    validate(&raw)
}

/// Canonical text: sorted declarations, then sorted transitions.
pub fn serialize(s: &InterfaceAutomaton) -> String {
    let mut out = String::new();
    let inputs = s.alphabet().input_names();
    let outputs = s.alphabet().output_names();
    if !inputs.is_empty() {
        let _ = writeln!(out, "inputs {}", inputs.join(" "));
    }
    if !outputs.is_empty() {
        let _ = writeln!(out, "outputs {}", outputs.join(" "));
    }
    let _ = writeln!(out, "initial {}", s.state_name(s.initial()));
    let transitions = s.transitions();
    let mut mentioned = vec![false; s.num_states()];
    mentioned[s.initial().0] = true;
    for &(p, _, q) in &transitions {
        mentioned[p.0] = true;
        mentioned[q.0] = true;
    }
    let isolated: Vec<&str> = s
        .states()
        .filter(|q| !mentioned[q.0])
        .map(|q| s.state_name(q))
        .collect();
    if !isolated.is_empty() {
        let _ = writeln!(out, "states {}", isolated.join(" "));
    }
    for (p, l, q) in transitions {
        let _ = writeln!(
            out,
            "{} {} {}",
            s.state_name(p),
            s.alphabet().name(l),
            s.state_name(q)
        );
    }
    out
}

/// Graphviz digraph with the default quiescence label drawn dashed.
pub fn export_dot(s: &InterfaceAutomaton) -> String {
    export_dot_with(s, "delta")
}

pub fn export_dot_with(s: &InterfaceAutomaton, delta_name: &str) -> String {
    let mut out = String::from("digraph ia {\n  rankdir=LR;\n  node [shape=circle];\n");
    out.push_str("  __start [shape=point];\n");
    for q in s.states() {
        let _ = writeln!(out, "  \"{}\";", s.state_name(q));
    }
    let _ = writeln!(out, "  __start -> \"{}\";", s.state_name(s.initial()));
    for (p, l, q) in s.transitions() {
        let name = s.alphabet().name(l);
        let mark = if s.alphabet().is_input(l) { '?' } else { '!' };
        let style = if name == delta_name && s.alphabet().is_output(l) {
            ", style=dashed"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}{}\"{}];",
            s.state_name(p),
            s.state_name(q),
            name,
            mark,
            style
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{delta_closure, QuiescenceConfig};

    #[test]
    fn small_document() {
        let s = parse("inputs a\noutputs x\ninitial q0\nq0 a q1\nq1 x q1\n").unwrap();
        assert_eq!(s.num_states(), 2);
        assert_eq!(s.num_transitions(), 2);
    }

    #[test]
    fn declarations_may_follow_use() {
        let s = parse("q0 a q1 # first\ninitial q0\ninputs a\n").unwrap();
        assert_eq!(s.num_transitions(), 1);
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(parse("inputs a\nq0 a q1\n"), Err(Error::MissingInitial));
        assert_eq!(
            parse("initial p\ninitial q\n"),
            Err(Error::DuplicateInitial { line: 2 })
        );
        assert_eq!(
            parse("initial p\n\np b p\n"),
            Err(Error::UndeclaredLabel { line: 3, label: "b".into() })
        );
        assert_eq!(
            parse("inputs a\noutputs a\ninitial p\n"),
            Err(Error::AlphabetOverlap { line: 2, name: "a".into() })
        );
        assert!(matches!(parse("initial p\np a\n"), Err(Error::Syntax { line: 2, .. })));
        assert!(matches!(parse("initial p$\n"), Err(Error::Syntax { line: 1, .. })));
    }

    #[test]
    fn canonical_round_trip() {
        let text = "inputs a b\noutputs x\ninitial q0\nstates lonely\nq0 a q1\nq0 b q0\nq1 x q0\n";
        let s = parse(text).unwrap();
        assert_eq!(serialize(&s), text);
        assert_eq!(parse(&serialize(&s)).unwrap(), s);
    }

    #[test]
    fn empty_behaviour_dot() {
        let s = parse("initial q\n").unwrap();
        let dot = export_dot(&s);
        assert_eq!(dot.matches(" -> ").count(), 1); // only the start arrow
        assert_eq!(serialize(&s), "initial q\n");
    }

    #[test]
    fn dashed_delta_loops() {
        let e = parse("inputs a\noutputs x y\ninitial q0\nq0 a q1\nq1 a q2\nq2 y q2\nq2 a q2\n").unwrap();
        let dot = export_dot(&delta_closure(&e, &QuiescenceConfig::default()).unwrap());
        let dashed: Vec<_> = dot.lines().filter(|l| l.contains("dashed")).collect();
        assert_eq!(dashed.len(), 2);
        assert!(dashed[0].contains("\"q0\" -> \"q0\" [label=\"delta!\""));
        assert!(dot.contains("[label=\"a?\"]"));
    }
}
