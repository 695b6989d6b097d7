//! Finite interface automata: states, a partitioned alphabet and a transition relation.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result, ValidationError};
use crate::semantics::Trace;

/// Identifiers for states and labels: `[A-Za-z0-9_.'-]+`.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-'))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Input,
    Output,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub name: String,
    pub kind: LabelKind,
}

/// Index of a label in an [`Alphabet`]. Labels are ordered by name, so
/// comparing ids compares names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelId(pub usize);

/// Index of a state in an [`InterfaceAutomaton`]. States are ordered by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl LabelId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Disjoint input and output labels, sorted by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    labels: Vec<Label>,
}

impl Alphabet {
    pub fn new<I, O, S, T>(inputs: I, outputs: O) -> std::result::Result<Self, Vec<ValidationError>>
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut errors = BTreeSet::new();
        let mut map: BTreeMap<String, LabelKind> = BTreeMap::new();
        for name in inputs.into_iter().map(Into::into) {
            if !is_identifier(&name) {
                errors.insert(ValidationError::InvalidIdentifier(name.clone()));
            }
            map.insert(name, LabelKind::Input);
        }
        for name in outputs.into_iter().map(Into::into) {
            if !is_identifier(&name) {
                errors.insert(ValidationError::InvalidIdentifier(name.clone()));
            }
            if map.get(&name) == Some(&LabelKind::Input) {
                errors.insert(ValidationError::AlphabetOverlap(name.clone()));
            }
            map.insert(name, LabelKind::Output);
        }
        if !errors.is_empty() {
            return Err(errors.into_iter().collect());
        }
        Ok(Alphabet {
            labels: map
                .into_iter()
                .map(|(name, kind)| Label { name, kind })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = LabelId> + '_ {
        (0..self.labels.len()).map(LabelId)
    }

    pub fn label(&self, id: LabelId) -> &Label {
        &self.labels[id.0]
    }

    pub fn name(&self, id: LabelId) -> &str {
        &self.labels[id.0].name
    }

    pub fn kind(&self, id: LabelId) -> LabelKind {
        self.labels[id.0].kind
    }

    pub fn is_input(&self, id: LabelId) -> bool {
        self.kind(id) == LabelKind::Input
    }

    pub fn is_output(&self, id: LabelId) -> bool {
        self.kind(id) == LabelKind::Output
    }

    pub fn contains(&self, id: LabelId) -> bool {
        id.0 < self.labels.len()
    }

    pub fn lookup(&self, name: &str) -> Option<LabelId> {
        self.labels
            .binary_search_by(|l| l.name.as_str().cmp(name))
            .ok()
            .map(LabelId)
    }

    pub fn inputs(&self) -> impl Iterator<Item = LabelId> + '_ {
        self.ids().filter(|&l| self.is_input(l))
    }

    pub fn outputs(&self) -> impl Iterator<Item = LabelId> + '_ {
        self.ids().filter(|&l| self.is_output(l))
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.inputs().map(|l| self.name(l)).collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs().map(|l| self.name(l)).collect()
    }

    /// Resolves label names, failing on the first name outside the alphabet.
    pub fn resolve<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<LabelId>> {
        names
            .iter()
            .map(|n| {
                self.lookup(n.as_ref())
                    .ok_or_else(|| Error::ForeignLabel(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Binary checks require both sides to agree on every label and its kind.
    pub fn ensure_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            return Ok(());
        }
        let mine: BTreeSet<_> = self.labels.iter().collect();
        let theirs: BTreeSet<_> = other.labels.iter().collect();
        let describe = |l: &Label| {
            let k = match l.kind {
                LabelKind::Input => "input",
                LabelKind::Output => "output",
            };
            format!("{k} `{}`", l.name)
        };
        let mut parts = Vec::new();
        for l in mine.difference(&theirs) {
            parts.push(format!("{} only on the left", describe(l)));
        }
        for l in theirs.difference(&mine) {
            parts.push(format!("{} only on the right", describe(l)));
        }
        Err(Error::AlphabetMismatch(parts.join(", ")))
    }

    /// Labels render without separators when every name is a single character.
    pub fn compact(&self) -> bool {
        self.labels.iter().all(|l| l.name.chars().count() == 1)
    }
}

/// An unvalidated 5-tuple, as read from a file or assembled by hand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawAutomaton {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
    pub initial: String,
}

/// A validated interface automaton. States are stored sorted by name and
/// the transition relation is a set, so structural equality is equality of
/// the 5-tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterfaceAutomaton {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    succ: Vec<Vec<Vec<StateId>>>,
}

/// Checks a candidate 5-tuple. States that occur only in transitions are
/// declared implicitly; the initial state must be declared somewhere.
pub fn validate(raw: &RawAutomaton) -> Result<InterfaceAutomaton> {
    let mut errors = BTreeSet::new();
    let alphabet = match Alphabet::new(raw.inputs.iter().cloned(), raw.outputs.iter().cloned()) {
        Ok(a) => Some(a),
        Err(es) => {
            errors.extend(es);
            None
        }
    };
    let mut names: BTreeSet<&str> = raw.states.iter().map(String::as_str).collect();
    for (src, label, dst) in &raw.transitions {
        names.insert(src);
        names.insert(dst);
        let declared = raw.inputs.iter().chain(&raw.outputs).any(|n| n == label);
        if !declared {
            errors.insert(ValidationError::UndeclaredLabel(label.clone()));
        }
    }
    for n in &names {
        if !is_identifier(n) {
            errors.insert(ValidationError::InvalidIdentifier(n.to_string()));
        }
    }
    if !names.contains(raw.initial.as_str()) {
        errors.insert(ValidationError::DanglingState(raw.initial.clone()));
    }
    let alphabet = match alphabet {
        Some(a) if errors.is_empty() => a,
        _ => return Err(Error::Invalid(errors.into_iter().collect())),
    };
    let names: Vec<String> = names.into_iter().map(str::to_string).collect();
    let index = |n: &str| names.binary_search_by(|m| m.as_str().cmp(n)).unwrap();
    let initial = index(&raw.initial);
    let edges: Vec<_> = raw
        .transitions
        .iter()
        .map(|(s, l, d)| (index(s), alphabet.lookup(l).unwrap(), index(d)))
        .collect();
    Ok(InterfaceAutomaton::assemble(alphabet, names, initial, edges))
}

impl InterfaceAutomaton {
    /// Builds an automaton from already-valid parts. State names must be
    /// unique identifiers; they are re-sorted and the edges remapped.
    pub(crate) fn assemble(
        alphabet: Alphabet,
        names: Vec<String>,
        initial: usize,
        edges: impl IntoIterator<Item = (usize, LabelId, usize)>,
    ) -> Self {
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut remap = vec![0; names.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let mut sorted = Vec::with_capacity(names.len());
        for &old in &order {
            sorted.push(names[old].clone());
        }
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]), "duplicate state names");
        let mut succ = vec![vec![Vec::new(); alphabet.len()]; names.len()];
        for (s, l, d) in edges {
            succ[remap[s]][l.0].push(StateId(remap[d]));
        }
        for row in &mut succ {
            for targets in row {
                targets.sort();
                targets.dedup();
            }
        }
        InterfaceAutomaton {
            alphabet,
            states: sorted,
            initial: StateId(remap[initial]),
            succ,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .binary_search_by(|m| m.as_str().cmp(name))
            .ok()
            .map(StateId)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn successors(&self, q: StateId, l: LabelId) -> &[StateId] {
        &self.succ[q.0][l.0]
    }

    pub fn enables(&self, q: StateId, l: LabelId) -> bool {
        !self.succ[q.0][l.0].is_empty()
    }

    /// Enabled labels of `q`, in name order.
    pub fn enabled(&self, q: StateId) -> impl Iterator<Item = LabelId> + '_ {
        self.alphabet.ids().filter(move |&l| self.enables(q, l))
    }

    pub fn enabled_outputs(&self, q: StateId) -> impl Iterator<Item = LabelId> + '_ {
        self.alphabet.outputs().filter(move |&l| self.enables(q, l))
    }

    pub fn enabled_inputs(&self, q: StateId) -> impl Iterator<Item = LabelId> + '_ {
        self.alphabet.inputs().filter(move |&l| self.enables(q, l))
    }

    /// All transitions, sorted by source, label and target name.
    pub fn transitions(&self) -> Vec<(StateId, LabelId, StateId)> {
        let mut out = Vec::new();
        for q in self.states() {
            for l in self.alphabet.ids() {
                for &d in self.successors(q, l) {
                    out.push((q, l, d));
                }
            }
        }
        out
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().flatten().map(Vec::len).sum()
    }

    pub fn to_raw(&self) -> RawAutomaton {
        RawAutomaton {
            states: self.states.clone(),
            inputs: self.alphabet.input_names().into_iter().map(String::from).collect(),
            outputs: self.alphabet.output_names().into_iter().map(String::from).collect(),
            transitions: self
                .transitions()
                .into_iter()
                .map(|(s, l, d)| {
                    (
                        self.state_name(s).to_string(),
                        self.alphabet.name(l).to_string(),
                        self.state_name(d).to_string(),
                    )
                })
                .collect(),
            initial: self.state_name(self.initial).to_string(),
        }
    }

    /// Reachability flags, indexed by state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial];
        seen[self.initial.0] = true;
        while let Some(q) = stack.pop() {
            for row in &self.succ[q.0] {
                for &d in row {
                    if !seen[d.0] {
                        seen[d.0] = true;
                        stack.push(d);
                    }
                }
            }
        }
        seen
    }

    pub fn reachable_states(&self) -> Vec<StateId> {
        let seen = self.reachable();
        self.states().filter(|q| seen[q.0]).collect()
    }

    /// Restriction to the states reachable from the initial state.
    pub fn reachable_part(&self) -> InterfaceAutomaton {
        let seen = self.reachable();
        let keep: Vec<StateId> = self.states().filter(|q| seen[q.0]).collect();
        if keep.len() == self.num_states() {
            return self.clone();
        }
        let mut index = vec![usize::MAX; self.num_states()];
        for (i, q) in keep.iter().enumerate() {
            index[q.0] = i;
        }
        let names = keep.iter().map(|&q| self.state_name(q).to_string()).collect();
        let edges = self
            .transitions()
            .into_iter()
            .filter(|(s, _, _)| seen[s.0])
            .map(|(s, l, d)| (index[s.0], l, index[d.0]));
        InterfaceAutomaton::assemble(self.alphabet.clone(), names, index[self.initial.0], edges)
    }

    /// At most one successor per label in every reachable state.
    pub fn is_deterministic(&self) -> bool {
        self.reachable_states()
            .into_iter()
            .all(|q| self.succ[q.0].iter().all(|t| t.len() <= 1))
    }

    /// Some reachable state together with an input it refuses.
    pub fn refused_input(&self) -> Option<(StateId, LabelId)> {
        self.reachable_states().into_iter().find_map(|q| {
            self.alphabet
                .inputs()
                .find(|&a| !self.enables(q, a))
                .map(|a| (q, a))
        })
    }

    /// Every reachable state enables every input.
    pub fn is_input_enabled(&self) -> bool {
        self.refused_input().is_none()
    }

    /// Every state, reachable or not, enables every input.
    pub fn is_input_enabled_all_states(&self) -> bool {
        self.states()
            .all(|q| self.alphabet.inputs().all(|a| self.enables(q, a)))
    }

    /// Finitely many successors per state and label. Always true for a
    /// finite transition set; kept so callers can state the assumption.
    pub fn is_image_finite(&self) -> bool {
        true
    }

    /// Number of labels on the longest path from the initial state, or
    /// `None` when a cycle is reachable.
    pub fn longest_path(&self) -> Option<usize> {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn visit(s: &InterfaceAutomaton, q: StateId, mark: &mut [u8], best: &mut [usize]) -> bool {
            mark[q.0] = 1;
            let mut longest = 0;
            for row in &s.succ[q.0] {
                for &d in row {
                    let ok = match mark[d.0] {
                        1 => false,
                        0 => visit(s, d, mark, best),
                        _ => true,
                    };
                    if !ok {
                        return false;
                    }
                    longest = longest.max(best[d.0] + 1);
                }
            }
            best[q.0] = longest;
            mark[q.0] = 2;
            true
        }
        let mut mark = vec![0u8; self.num_states()];
        let mut best = vec![0usize; self.num_states()];
        visit(self, self.initial, &mut mark, &mut best).then(|| best[self.initial.0])
    }

    pub fn is_acyclic(&self) -> bool {
        self.longest_path().is_some()
    }
}

/// A finite path `q0 l1 q1 ... ln qn` starting in the initial state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    states: Vec<StateId>,
    labels: Vec<LabelId>,
}

impl Path {
    pub fn initial(s: &InterfaceAutomaton) -> Path {
        Path {
            states: vec![s.initial()],
            labels: Vec::new(),
        }
    }

    /// Builds a path, checking that every step is a transition of `s`.
    pub fn new(s: &InterfaceAutomaton, states: Vec<StateId>, labels: Vec<LabelId>) -> Option<Path> {
        let p = Path { states, labels };
        p.is_valid_in(s).then_some(p)
    }

    pub fn is_valid_in(&self, s: &InterfaceAutomaton) -> bool {
        self.states.len() == self.labels.len() + 1
            && self.states[0] == s.initial()
            && self.states.iter().all(|q| q.0 < s.num_states())
            && self.labels.iter().all(|&l| s.alphabet().contains(l))
            && self
                .labels
                .iter()
                .enumerate()
                .all(|(j, &l)| s.successors(self.states[j], l).contains(&self.states[j + 1]))
    }

    pub fn last(&self) -> StateId {
        *self.states.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn labels(&self) -> &[LabelId] {
        &self.labels
    }

    pub fn trace(&self) -> Trace {
        Trace::new(self.labels.clone())
    }

    pub fn extended(&self, l: LabelId, q: StateId) -> Path {
        let mut p = self.clone();
        p.labels.push(l);
        p.states.push(q);
        p
    }

    pub fn render(&self, s: &InterfaceAutomaton) -> String {
        let mut out = s.state_name(self.states[0]).to_string();
        for (l, q) in self.labels.iter().zip(&self.states[1..]) {
            out.push(' ');
            out.push_str(s.alphabet().name(*l));
            out.push(' ');
            out.push_str(s.state_name(*q));
        }
        out
    }
}
