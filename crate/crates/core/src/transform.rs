//! Quiescence closure and the two subset constructions.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::automaton::{is_identifier, Alphabet, InterfaceAutomaton};
use crate::error::{Error, Result, ValidationError};
use crate::semantics::{initial_set, post, universally_enabled, StateSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiescenceConfig {
    pub delta_name: String,
}

impl Default for QuiescenceConfig {
    fn default() -> Self {
        QuiescenceConfig {
            delta_name: "delta".to_string(),
        }
    }
}

impl QuiescenceConfig {
    pub fn new(delta_name: impl Into<String>) -> Self {
        QuiescenceConfig {
            delta_name: delta_name.into(),
        }
    }
}

/// Adds the quiescence output and a self-loop on it at every state that
/// enables no output.
pub fn delta_closure(s: &InterfaceAutomaton, cfg: &QuiescenceConfig) -> Result<InterfaceAutomaton> {
    let delta = &cfg.delta_name;
    if !is_identifier(delta) {
        return Err(Error::Invalid(vec![ValidationError::InvalidIdentifier(delta.clone())]));
    }
    let old = s.alphabet();
    if old.lookup(delta).is_some() {
        return Err(Error::DeltaNameClash(delta.clone()));
    }
    let mut outputs: Vec<&str> = old.output_names();
    outputs.push(delta);
    let alphabet = Alphabet::new(old.input_names(), outputs).map_err(Error::Invalid)?;
    let d = alphabet.lookup(delta).unwrap();
    let remap: Vec<_> = old
        .ids()
        .map(|l| alphabet.lookup(old.name(l)).unwrap())
        .collect();
    let mut edges: Vec<_> = s
        .transitions()
        .into_iter()
        .map(|(p, l, q)| (p.0, remap[l.0], q.0))
        .collect();
    for q in s.states() {
        if s.enabled_outputs(q).next().is_none() {
            edges.push((q.0, d, q.0));
        }
    }
    let names = s.states().map(|q| s.state_name(q).to_string()).collect();
    Ok(InterfaceAutomaton::assemble(alphabet, names, s.initial().0, edges))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Every label with a nonempty successor set.
    Standard,
    /// Inputs only when enabled in every member; outputs when enabled in some.
    InputUniversal,
}

/// Result of a subset construction: the deterministic automaton together
/// with the source states each of its states stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetAutomaton {
    pub automaton: InterfaceAutomaton,
    members: Vec<StateSet>,
}

impl SubsetAutomaton {
    /// Source states of subset state `q`.
    pub fn members(&self, q: crate::automaton::StateId) -> &StateSet {
        &self.members[q.0]
    }
}

pub fn subset_construction(s: &InterfaceAutomaton, how: Construction) -> SubsetAutomaton {
    let start = initial_set(s);
    let mut index: HashMap<StateSet, usize> = HashMap::from([(start.clone(), 0)]);
    let mut sets = vec![start];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let set = sets[i].clone();
        for l in s.alphabet().ids() {
            if how == Construction::InputUniversal
                && s.alphabet().is_input(l)
                && !universally_enabled(s, &set, l)
            {
                continue;
            }
            let next = post(s, &set, l);
            if next.is_empty() {
                continue;
            }
            let j = *index.entry(next.clone()).or_insert_with(|| {
                sets.push(next);
                queue.push_back(sets.len() - 1);
                sets.len() - 1
            });
            edges.push((i, l, j));
        }
    }
    let names = subset_names(s, &sets);
    let automaton = InterfaceAutomaton::assemble(s.alphabet().clone(), names.clone(), 0, edges);
    let mut members = vec![StateSet::empty(); sets.len()];
    for (set, name) in sets.into_iter().zip(&names) {
        members[automaton.state_id(name).unwrap().0] = set;
    }
    SubsetAutomaton { automaton, members }
}

/// Member names joined by `_`; a clash gets primes appended.
fn subset_names(s: &InterfaceAutomaton, sets: &[StateSet]) -> Vec<String> {
    let mut taken = BTreeSet::new();
    sets.iter()
        .map(|set| {
            let mut name = set.names(s).join("_");
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            name
        })
        .collect()
}

pub fn determinize(s: &InterfaceAutomaton) -> InterfaceAutomaton {
    subset_construction(s, Construction::Standard).automaton
}

pub fn determinize_iu(s: &InterfaceAutomaton) -> InterfaceAutomaton {
    subset_construction(s, Construction::InputUniversal).automaton
}
