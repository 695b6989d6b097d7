//! Derived operators: after-sets, enabled labels of state sets, traces,
//! input-failure traces and their closure, and the OE/IU word classes.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::automaton::{Alphabet, InterfaceAutomaton, LabelId, StateId};
use crate::error::{Error, Result};

/// A finite word over the alphabet. Ordered shortest first, then
/// lexicographically by label name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Trace(Vec<LabelId>);

impl Trace {
    pub fn new(labels: Vec<LabelId>) -> Trace {
        Trace(labels)
    }

    pub fn empty() -> Trace {
        Trace(Vec::new())
    }

    pub fn from_names<S: AsRef<str>>(alphabet: &Alphabet, names: &[S]) -> Result<Trace> {
        alphabet.resolve(names).map(Trace)
    }

    pub fn labels(&self) -> &[LabelId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: LabelId) {
        self.0.push(l);
    }

    pub fn extended(&self, l: LabelId) -> Trace {
        let mut t = self.clone();
        t.0.push(l);
        t
    }

    pub fn names(&self, alphabet: &Alphabet) -> Vec<String> {
        self.0.iter().map(|&l| alphabet.name(l).to_string()).collect()
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> TraceDisplay<'a> {
        TraceDisplay {
            trace: self,
            refusal: None,
            alphabet,
        }
    }
}

impl PartialOrd for Trace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Trace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// A trace optionally followed by the refusal of an input.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FailureTrace {
    pub body: Trace,
    pub refusal: Option<LabelId>,
}

impl FailureTrace {
    pub fn plain(body: Trace) -> FailureTrace {
        FailureTrace { body, refusal: None }
    }

    pub fn refusing(body: Trace, input: LabelId) -> FailureTrace {
        FailureTrace {
            body,
            refusal: Some(input),
        }
    }

    /// Number of events, counting a refusal as one.
    pub fn events(&self) -> usize {
        self.body.len() + usize::from(self.refusal.is_some())
    }

    fn key(&self) -> Vec<(LabelId, bool)> {
        let mut k: Vec<_> = self.body.0.iter().map(|&l| (l, false)).collect();
        if let Some(a) = self.refusal {
            k.push((a, true));
        }
        k
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> TraceDisplay<'a> {
        TraceDisplay {
            trace: &self.body,
            refusal: self.refusal,
            alphabet,
        }
    }
}

impl PartialOrd for FailureTrace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Fewest events first; at equal positions a label sorts before its refusal.
impl Ord for FailureTrace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.events()
            .cmp(&other.events())
            .then_with(|| self.key().cmp(&other.key()))
    }
}

pub struct TraceDisplay<'a> {
    trace: &'a Trace,
    refusal: Option<LabelId>,
    alphabet: &'a Alphabet,
}

impl fmt::Display for TraceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trace.is_empty() && self.refusal.is_none() {
            return f.write_str("ε");
        }
        let sep = if self.alphabet.compact() { "" } else { " " };
        let mut first = true;
        for &l in self.trace.labels() {
            if !first {
                f.write_str(sep)?;
            }
            first = false;
            f.write_str(self.alphabet.name(l))?;
        }
        if let Some(a) = self.refusal {
            if !first {
                f.write_str(sep)?;
            }
            write!(f, "!{}", self.alphabet.name(a))?;
        }
        Ok(())
    }
}

/// A set of states of one automaton, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    pub fn empty() -> StateSet {
        StateSet(Vec::new())
    }

    pub fn singleton(q: StateId) -> StateSet {
        StateSet(vec![q])
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.iter().all(|&q| other.contains(q))
    }

    pub fn names(&self, s: &InterfaceAutomaton) -> Vec<String> {
        self.0.iter().map(|&q| s.state_name(q).to_string()).collect()
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<T: IntoIterator<Item = StateId>>(iter: T) -> Self {
        let mut v: Vec<StateId> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        StateSet(v)
    }
}

pub fn initial_set(s: &InterfaceAutomaton) -> StateSet {
    StateSet::singleton(s.initial())
}

/// One-label successor set.
pub fn post(s: &InterfaceAutomaton, from: &StateSet, l: LabelId) -> StateSet {
    from.iter()
        .flat_map(|q| s.successors(q, l).iter().copied())
        .collect()
}

/// States reachable from `from` along `sigma`.
pub fn after(s: &InterfaceAutomaton, from: &StateSet, sigma: &Trace) -> Result<StateSet> {
    if let Some(&l) = sigma.labels().iter().find(|&&l| !s.alphabet().contains(l)) {
        return Err(Error::ForeignLabel(format!("#{}", l.0)));
    }
    Ok(after_unchecked(s, from, sigma))
}

pub(crate) fn after_unchecked(s: &InterfaceAutomaton, from: &StateSet, sigma: &Trace) -> StateSet {
    let mut cur = from.clone();
    for &l in sigma.labels() {
        if cur.is_empty() {
            break;
        }
        cur = post(s, &cur, l);
    }
    cur
}

/// `s after sigma` from the initial state.
pub fn after_initial(s: &InterfaceAutomaton, sigma: &Trace) -> StateSet {
    after_unchecked(s, &initial_set(s), sigma)
}

/// Outputs enabled in some state of `q`.
pub fn out_set(s: &InterfaceAutomaton, q: &StateSet) -> BTreeSet<LabelId> {
    s.alphabet()
        .outputs()
        .filter(|&x| q.iter().any(|p| s.enables(p, x)))
        .collect()
}

/// Inputs enabled in every state of `q`; all inputs when `q` is empty.
pub fn in_universal(s: &InterfaceAutomaton, q: &StateSet) -> BTreeSet<LabelId> {
    s.alphabet()
        .inputs()
        .filter(|&a| q.iter().all(|p| s.enables(p, a)))
        .collect()
}

pub(crate) fn has_output(s: &InterfaceAutomaton, q: &StateSet, x: LabelId) -> bool {
    q.iter().any(|p| s.enables(p, x))
}

pub(crate) fn universally_enabled(s: &InterfaceAutomaton, q: &StateSet, a: LabelId) -> bool {
    q.iter().all(|p| s.enables(p, a))
}

pub fn is_trace(s: &InterfaceAutomaton, sigma: &Trace) -> bool {
    !after_initial(s, sigma).is_empty()
}

/// All traces of length at most `k`.
pub fn enumerate_traces(s: &InterfaceAutomaton, k: usize) -> BTreeSet<Trace> {
    let mut out = BTreeSet::new();
    let mut queue = VecDeque::from([(Trace::empty(), initial_set(s))]);
    while let Some((t, set)) = queue.pop_front() {
        if t.len() < k {
            for l in s.alphabet().ids() {
                let next = post(s, &set, l);
                if !next.is_empty() {
                    queue.push_back((t.extended(l), next));
                }
            }
        }
        out.insert(t);
    }
    out
}

pub fn is_ftrace(s: &InterfaceAutomaton, rho: &FailureTrace) -> bool {
    let set = after_initial(s, &rho.body);
    if set.is_empty() {
        return false;
    }
    match rho.refusal {
        None => true,
        Some(a) => s.alphabet().is_input(a) && !universally_enabled(s, &set, a),
    }
}

/// All failure traces whose body has length at most `k`.
pub fn enumerate_ftraces(s: &InterfaceAutomaton, k: usize) -> BTreeSet<FailureTrace> {
    let mut out = BTreeSet::new();
    for t in enumerate_traces(s, k) {
        let set = after_initial(s, &t);
        for a in s.alphabet().inputs() {
            if !universally_enabled(s, &set, a) {
                out.insert(FailureTrace::refusing(t.clone(), a));
            }
        }
        out.insert(FailureTrace::plain(t));
    }
    out
}

/// Membership in the input-failure closure of the failure traces of `s`,
/// decided by walking the prefixes of `rho`.
pub fn fcl_member(s: &InterfaceAutomaton, rho: &FailureTrace) -> bool {
    let mut cur = initial_set(s);
    for &l in rho.body.labels() {
        if s.alphabet().is_input(l) && !universally_enabled(s, &cur, l) {
            return true;
        }
        cur = post(s, &cur, l);
        if cur.is_empty() {
            return false;
        }
    }
    match rho.refusal {
        None => true,
        Some(a) => s.alphabet().is_input(a) && !universally_enabled(s, &cur, a),
    }
}

/// Every output of `sigma` is enabled in some state reached by the prefix before it.
pub fn oe_member(s: &InterfaceAutomaton, sigma: &Trace) -> bool {
    let mut cur = initial_set(s);
    for &l in sigma.labels() {
        if s.alphabet().is_output(l) && !has_output(s, &cur, l) {
            return false;
        }
        cur = post(s, &cur, l);
    }
    true
}

/// Every input of `sigma` is enabled in all states reached by the prefix before it.
pub fn iu_member(s: &InterfaceAutomaton, sigma: &Trace) -> bool {
    let mut cur = initial_set(s);
    for &l in sigma.labels() {
        if s.alphabet().is_input(l) && !universally_enabled(s, &cur, l) {
            return false;
        }
        cur = post(s, &cur, l);
    }
    true
}

/// Input-universal traces of length at most `k`.
pub fn utraces(s: &InterfaceAutomaton, k: usize) -> BTreeSet<Trace> {
    enumerate_traces(s, k)
        .into_iter()
        .filter(|t| iu_member(s, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse;

    const S_A: &str = "inputs a\noutputs x\ninitial q0\nq0 x q0\nq0 a q1\nq0 a q2\nq1 x q1\nq1 a q2\n";
    const S_D: &str = "inputs a\noutputs x\ninitial q0\nq0 a q1\nq1 a q2\nq2 x q2\n";

    fn tr(s: &InterfaceAutomaton, w: &str) -> Trace {
        let names: Vec<String> = w.chars().map(|c| c.to_string()).collect();
        Trace::from_names(s.alphabet(), &names).unwrap()
    }

    fn refusing(s: &InterfaceAutomaton, w: &str, a: &str) -> FailureTrace {
        FailureTrace::refusing(tr(s, w), s.alphabet().lookup(a).unwrap())
    }

    fn names(s: &InterfaceAutomaton, set: &StateSet) -> Vec<String> {
        set.names(s)
    }

    #[test]
    fn after_sets_of_s_a() {
        let s = parse(S_A).unwrap();
        assert_eq!(names(&s, &after_initial(&s, &tr(&s, "a"))), ["q1", "q2"]);
        assert_eq!(names(&s, &after_initial(&s, &tr(&s, ""))), ["q0"]);
        assert_eq!(names(&s, &after_initial(&s, &tr(&s, "xax"))), ["q1"]);
        assert!(after(&s, &initial_set(&s), &Trace::new(vec![LabelId(9)])).is_err());
    }

    #[test]
    fn enabled_label_sets() {
        let s = parse(S_A).unwrap();
        let a = s.alphabet().lookup("a").unwrap();
        let q12 = after_initial(&s, &tr(&s, "a"));
        assert!(!in_universal(&s, &q12).contains(&a));
        assert!(out_set(&s, &StateSet::empty()).is_empty());
        assert_eq!(in_universal(&s, &StateSet::empty()), BTreeSet::from([a]));
    }

    #[test]
    fn traces_and_ftraces() {
        let a = parse(S_A).unwrap();
        let b = parse("inputs a\noutputs x\ninitial q0\nq0 x q0\nq0 a q0\n").unwrap();
        assert!(is_trace(&b, &tr(&b, "axax")));
        assert!(!is_trace(&a, &tr(&a, "axax")));
        assert!(is_ftrace(&a, &refusing(&a, "a", "a")));
        assert!(!is_ftrace(&a, &refusing(&a, "ax", "a")));
        assert!(!is_ftrace(&a, &refusing(&a, "", "a")));

        let d = parse(S_D).unwrap();
        let got: Vec<String> = enumerate_traces(&d, 3)
            .iter()
            .map(|t| t.display(d.alphabet()).to_string())
            .collect();
        assert_eq!(got, ["ε", "a", "aa", "aax"]);
        let got: Vec<String> = enumerate_ftraces(&d, 2)
            .iter()
            .map(|t| t.display(d.alphabet()).to_string())
            .collect();
        assert_eq!(got, ["ε", "a", "aa", "aa!a"]);
    }

    #[test]
    fn closure_membership() {
        let a = parse(S_A).unwrap();
        assert!(fcl_member(&a, &FailureTrace::plain(tr(&a, "aax"))));
        assert!(!fcl_member(&a, &refusing(&a, "ax", "a")));
        assert!(fcl_member(&a, &FailureTrace::plain(Trace::empty())));
    }

    #[test]
    fn oe_and_iu() {
        let a = parse(S_A).unwrap();
        let c = parse("inputs a\noutputs x\ninitial q0\nq0 x q0\nq1 x q1\nq0 a q1\n").unwrap();
        let d = parse(S_D).unwrap();
        assert!(oe_member(&c, &tr(&c, "axa")));
        assert!(iu_member(&a, &tr(&a, "axa")));
        assert!(!iu_member(&c, &tr(&c, "axa")));
        let both: Vec<String> = (0..=4)
            .flat_map(|n| words(&d, n))
            .filter(|w| oe_member(&d, w) && iu_member(&a, w))
            .map(|w| w.display(d.alphabet()).to_string())
            .collect();
        assert_eq!(both, ["ε", "a"]);
    }

    fn words(s: &InterfaceAutomaton, n: usize) -> Vec<Trace> {
        let mut out = vec![Trace::empty()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t| s.alphabet().ids().map(move |l| t.extended(l)))
                .collect();
        }
        out
    }

    #[test]
    fn utraces_of_s_f() {
        let f = parse("inputs a\noutputs x y\ninitial q0\nq0 a q1\nq0 a q3\nq1 a q2\nq2 x q2\n").unwrap();
        let got: Vec<String> = utraces(&f, 1)
            .iter()
            .map(|t| t.display(f.alphabet()).to_string())
            .collect();
        assert_eq!(got, ["ε", "a"]);
    }

    #[test]
    fn orderings() {
        let t1 = Trace::new(vec![LabelId(1)]);
        let t2 = Trace::new(vec![LabelId(0), LabelId(0)]);
        assert!(t1 < t2);
        let plain = FailureTrace::plain(Trace::new(vec![LabelId(0)]));
        let refuse = FailureTrace::refusing(Trace::empty(), LabelId(0));
        assert!(plain < refuse);
    }
}
