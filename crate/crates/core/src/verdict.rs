//! Results of relation checks.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    As,
    Atc,
    Tb,
    Iuoe,
    If,
    EquivIf,
    Uioco,
    Ioco,
}

impl Relation {
    pub const ALL: [Relation; 8] = [
        Relation::As,
        Relation::Atc,
        Relation::Tb,
        Relation::Iuoe,
        Relation::If,
        Relation::EquivIf,
        Relation::Uioco,
        Relation::Ioco,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::As => "as",
            Relation::Atc => "atc",
            Relation::Tb => "tb",
            Relation::Iuoe => "iuoe",
            Relation::If => "if",
            Relation::EquivIf => "equiv-if",
            Relation::Uioco => "uioco",
            Relation::Ioco => "ioco",
        }
    }

    pub fn from_name(name: &str) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `trace·action` is a failure trace of the left side outside the closure of the right.
    OutputExtension,
    /// `trace` followed by the refusal of `action`, same condition.
    InputRefusal,
    /// Output (possibly quiescence) of the implementation not allowed after `trace`.
    IocoOutput,
    /// Input specified after the input-universal `trace` but refused by the implementation.
    UiocoInput,
    /// Simulation game lost on an output of the left state the right state cannot match.
    SimulationOutput,
    /// Simulation game lost on an input of the right state the left state refuses.
    SimulationInput,
}

impl WitnessKind {
    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::OutputExtension => "output-extension",
            WitnessKind::InputRefusal => "input-refusal",
            WitnessKind::IocoOutput => "ioco-output",
            WitnessKind::UiocoInput => "uioco-input",
            WitnessKind::SimulationOutput => "simulation-output",
            WitnessKind::SimulationInput => "simulation-input",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub trace: Vec<String>,
    pub action: String,
}

impl Witness {
    /// Events in the witness, counting the action.
    pub fn len(&self) -> usize {
        self.trace.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Which inclusion of the OE/IU characterization is violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The word is not input-universal for the left automaton.
    Input,
    /// The word is not output-existential for the right automaton.
    Output,
}

/// Pairs of related states, by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SimulationRelation {
    pub pairs: Vec<(String, String)>,
}

/// A node of a printed strategy: the left state, the right states when the
/// game tracks them, what the antagonist does there, and the continuations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayNode {
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<Vec<String>>,
    pub choice: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<PlayEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayEdge {
    pub label: String,
    pub node: PlayNode,
}

impl PlayNode {
    /// Indented rendering, two spaces per level.
    pub fn render(&self, out: &mut String, indent: usize) {
        use std::fmt::Write;
        let pad = " ".repeat(indent);
        let _ = write!(out, "{pad}{}", self.state);
        if let Some(spec) = &self.spec {
            let _ = write!(out, " | {{{}}}", spec.join(","));
        }
        let _ = writeln!(out, ": {}", self.choice);
        for e in &self.children {
            let _ = writeln!(out, "{pad}  --{}-->", e.label);
            e.node.render(out, indent + 4);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub relation: Relation,
    pub status: Status,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<PlayNode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationRelation>,
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn new(relation: Relation, status: Status, method: impl Into<String>) -> Verdict {
        Verdict {
            relation,
            status,
            method: method.into(),
            witness: None,
            depth: None,
            strategy: None,
            side: None,
            simulation: None,
            notes: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }

    pub(crate) fn with_witness(mut self, w: Witness) -> Verdict {
        self.witness = Some(w);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts serialize")
    }

    /// Multi-line human-readable report.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "{}: {} ({})", self.relation, self.status, self.method);
        if let Some(w) = &self.witness {
            let trace = if w.trace.is_empty() {
                "ε".to_string()
            } else {
                w.trace.join(" ")
            };
            let _ = writeln!(out, "witness: {}", w.kind.name());
            let _ = writeln!(out, "  trace: {trace}");
            let _ = writeln!(out, "  action: {}", w.action);
        }
        if let Some(side) = self.side {
            let side = match side {
                Side::Input => "input (word not input-universal on the left)",
                Side::Output => "output (word not output-existential on the right)",
            };
            let _ = writeln!(out, "  side: {side}");
        }
        if let Some(rel) = &self.simulation {
            let pairs: Vec<String> = rel.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
            let _ = writeln!(out, "relation: {{{}}}", pairs.join(", "));
        }
        if let Some(k) = self.depth {
            let _ = writeln!(out, "depth: {k}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(tree) = &self.strategy {
            out.push_str("strategy:\n");
            tree.render(&mut out, 2);
        }
        out
    }
}
