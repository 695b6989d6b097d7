//! Brute-force bounded checks by enumeration of the trace sets the
//! relations quantify over. Slow on purpose; used to cross-check the exact
//! procedures.
//!
//! Enumeration is shortest first, then lexicographic. Words reaching the
//! same pair of after-sets behave identically from then on, so only the
//! first of them is extended.

use std::collections::HashSet;

use crate::automaton::{InterfaceAutomaton, LabelId};
use crate::error::{Error, Result};
use crate::semantics::{
    after_initial, fcl_member, has_output, initial_set, is_ftrace, iu_member, oe_member, post,
    universally_enabled, FailureTrace, StateSet, Trace,
};
use crate::transform::{delta_closure, QuiescenceConfig};
use crate::verdict::{Relation, Status, Verdict, Witness, WitnessKind};

/// An enumeration depth and whether it is large enough for the bounded
/// verdict to be the unbounded one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthBound {
    pub k: usize,
    pub exhaustive: bool,
}

impl DepthBound {
    pub fn new(k: usize, left_states: usize, right_states: usize) -> DepthBound {
        DepthBound {
            k,
            exhaustive: k >= exhaustive_depth(left_states, right_states),
        }
    }
}

/// `|Q1| · 2^|Q2|`: a shortest counterexample visits each pair of a left
/// state and a right subset state at most once.
pub fn exhaustive_depth(left_states: usize, right_states: usize) -> usize {
    let pow = 1usize.checked_shl(right_states as u32).unwrap_or(usize::MAX);
    left_states.saturating_mul(pow)
}

fn finish(relation: Relation, method: &str, bound: DepthBound, found: Option<Witness>) -> Verdict {
    let status = match (&found, bound.exhaustive) {
        (Some(_), _) => Status::Fails,
        (None, true) => Status::Holds,
        (None, false) => Status::Inconclusive,
    };
    let mut v = Verdict::new(relation, status, method);
    v.witness = found;
    v.depth = Some(bound.k);
    v
}

struct Word {
    trace: Trace,
    left: StateSet,
    right: StateSet,
}

/// Failure traces of `s1` with bodies up to length `k`, each tested for
/// membership in the closure of the failure traces of `s2`.
pub fn oracle_if(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton, k: usize) -> Result<Verdict> {
    s1.alphabet().ensure_same(s2.alphabet())?;
    let bound = DepthBound::new(k, s1.num_states(), s2.num_states());
    let mut seen = HashSet::from([(initial_set(s1), initial_set(s2))]);
    let mut prev: Vec<Word> = Vec::new();
    let mut level = vec![Word {
        trace: Trace::empty(),
        left: initial_set(s1),
        right: initial_set(s2),
    }];
    for events in 0..=k + 1 {
        let mut bad: Vec<FailureTrace> = Vec::new();
        for w in &level {
            let rho = FailureTrace::plain(w.trace.clone());
            if !fcl_member(s2, &rho) {
                bad.push(rho);
            }
        }
        for w in &prev {
            for a in s1.alphabet().inputs() {
                let rho = FailureTrace::refusing(w.trace.clone(), a);
                if is_ftrace(s1, &rho) && !fcl_member(s2, &rho) {
                    bad.push(rho);
                }
            }
        }
        if let Some(rho) = bad.into_iter().min() {
            let w = if let Some(a) = rho.refusal {
                Witness {
                    kind: WitnessKind::InputRefusal,
                    trace: rho.body.names(s1.alphabet()),
                    action: s1.alphabet().name(a).to_string(),
                }
            } else {
                let mut names = rho.body.names(s1.alphabet());
                let action = names.pop().expect("the empty trace is always in the closure");
                Witness {
                    kind: WitnessKind::OutputExtension,
                    trace: names,
                    action,
                }
            };
            return Ok(finish(Relation::If, "oracle-ftraces", bound, Some(w)));
        }
        let mut next = Vec::new();
        if events < k {
            for w in &level {
                for l in s1.alphabet().ids() {
                    let left = post(s1, &w.left, l);
                    if left.is_empty() {
                        continue;
                    }
                    // Past a refused input everything is in the closure.
                    if s1.alphabet().is_input(l) && !universally_enabled(s2, &w.right, l) {
                        continue;
                    }
                    let right = post(s2, &w.right, l);
                    if seen.insert((left.clone(), right.clone())) {
                        next.push(Word {
                            trace: w.trace.extended(l),
                            left,
                            right,
                        });
                    }
                }
            }
        }
        prev = std::mem::replace(&mut level, next);
        if prev.is_empty() {
            break;
        }
    }
    Ok(finish(Relation::If, "oracle-ftraces", bound, None))
}

/// Words up to length `k` in OE(s1) ∩ IU(s2), each tested for membership
/// in IU(s1) ∩ OE(s2).
pub fn oracle_iuoe(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton, k: usize) -> Result<Verdict> {
    s1.alphabet().ensure_same(s2.alphabet())?;
    let bound = DepthBound::new(k, s1.num_states(), s2.num_states());
    let mut seen = HashSet::from([(initial_set(s1), initial_set(s2))]);
    let mut level = vec![Word {
        trace: Trace::empty(),
        left: initial_set(s1),
        right: initial_set(s2),
    }];
    for _ in 0..k {
        let mut next = Vec::new();
        let mut bad: Option<(Trace, LabelId, WitnessKind)> = None;
        for w in &level {
            for l in s1.alphabet().ids() {
                let word = w.trace.extended(l);
                if !(oe_member(s1, &word) && iu_member(s2, &word)) {
                    continue;
                }
                let in_iu1 = iu_member(s1, &word);
                let in_oe2 = oe_member(s2, &word);
                if !(in_iu1 && in_oe2) {
                    let kind = if in_oe2 {
                        WitnessKind::InputRefusal
                    } else {
                        WitnessKind::OutputExtension
                    };
                    if bad.as_ref().is_none_or(|(t, m, _)| (&w.trace, l) < (t, *m)) {
                        bad = Some((w.trace.clone(), l, kind));
                    }
                    continue;
                }
                let left = post(s1, &w.left, l);
                let right = post(s2, &w.right, l);
                if seen.insert((left.clone(), right.clone())) {
                    next.push(Word { trace: word, left, right });
                }
            }
        }
        if let Some((trace, l, kind)) = bad {
            let w = Witness {
                kind,
                trace: trace.names(s1.alphabet()),
                action: s1.alphabet().name(l).to_string(),
            };
            return Ok(finish(Relation::Iuoe, "oracle-oe-iu", bound, Some(w)));
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok(finish(Relation::Iuoe, "oracle-oe-iu", bound, None))
}

fn conformance_oracle(
    i: &InterfaceAutomaton,
    s: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
    k: usize,
    relation: Relation,
) -> Result<Verdict> {
    i.alphabet().ensure_same(s.alphabet())?;
    let di = delta_closure(i, cfg)?;
    let ds = delta_closure(s, cfg)?;
    let universal = relation == Relation::Uioco;
    if !universal {
        if let Some((q, a)) = i.refused_input() {
            return Err(Error::NotInputEnabled {
                state: i.state_name(q).to_string(),
                input: i.alphabet().name(a).to_string(),
            });
        }
    }
    let method = if universal { "oracle-utraces" } else { "oracle-traces" };
    let bound = DepthBound::new(k, di.num_states(), ds.num_states());
    let ab = ds.alphabet();
    let mut seen = HashSet::from([(initial_set(&di), initial_set(&ds))]);
    let mut level = vec![Trace::empty()];
    for depth in 0..=k {
        let mut next = Vec::new();
        for sigma in &level {
            let p = after_initial(&di, sigma);
            let q = after_initial(&ds, sigma);
            let bad = ab.ids().find_map(|l| {
                if ab.is_output(l) && has_output(&di, &p, l) && !has_output(&ds, &q, l) {
                    Some((WitnessKind::IocoOutput, l))
                } else if universal
                    && ab.is_input(l)
                    && universally_enabled(&ds, &q, l)
                    && !universally_enabled(&di, &p, l)
                {
                    Some((WitnessKind::UiocoInput, l))
                } else {
                    None
                }
            });
            if let Some((kind, l)) = bad {
                let w = Witness {
                    kind,
                    trace: sigma.names(ab),
                    action: ab.name(l).to_string(),
                };
                return Ok(finish(relation, method, bound, Some(w)));
            }
            if depth == k {
                continue;
            }
            for l in ab.ids() {
                let word = sigma.extended(l);
                let q2 = post(&ds, &q, l);
                if q2.is_empty() || (universal && !iu_member(&ds, &word)) {
                    continue;
                }
                let p2 = post(&di, &p, l);
                if p2.is_empty() {
                    continue;
                }
                if seen.insert((p2, q2)) {
                    next.push(word);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok(finish(relation, method, bound, None))
}

/// Input-universal traces of the closed specification up to length `k`.
pub fn oracle_uioco(
    i: &InterfaceAutomaton,
    s: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
    k: usize,
) -> Result<Verdict> {
    conformance_oracle(i, s, cfg, k, Relation::Uioco)
}

/// All traces of the closed specification up to length `k`.
pub fn oracle_ioco(
    i: &InterfaceAutomaton,
    s: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
    k: usize,
) -> Result<Verdict> {
    conformance_oracle(i, s, cfg, k, Relation::Ioco)
}
