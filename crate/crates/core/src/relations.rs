//! Decision procedures for the refinement and conformance relations.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{InterfaceAutomaton, LabelId, StateId};
use crate::error::{Error, Result};
use crate::semantics::{
    fcl_member, has_output, initial_set, is_ftrace, iu_member, oe_member, post,
    universally_enabled, FailureTrace, StateSet, Trace,
};
use crate::transform::{
    delta_closure, determinize_iu, subset_construction, Construction, QuiescenceConfig,
};
use crate::verdict::{
    Relation, Side, SimulationRelation, Status, Verdict, Witness, WitnessKind,
};

const IF_METHOD: &str = "detiu+as";

fn names(s: &InterfaceAutomaton, t: &Trace) -> Vec<String> {
    t.names(s.alphabet())
}

/// First label violating the local conditions of the simulation game at
/// `(q1, q2)`: an output of `q1` missing at `q2`, or an input of `q2`
/// missing at `q1`.
fn local_violation(
    s1: &InterfaceAutomaton,
    q1: StateId,
    s2: &InterfaceAutomaton,
    q2: StateId,
) -> Option<(WitnessKind, LabelId)> {
    s1.alphabet().ids().find_map(|l| {
        if s1.alphabet().is_output(l) && s1.enables(q1, l) && !s2.enables(q2, l) {
            Some((WitnessKind::SimulationOutput, l))
        } else if s1.alphabet().is_input(l) && s2.enables(q2, l) && !s1.enables(q1, l) {
            Some((WitnessKind::SimulationInput, l))
        } else {
            None
        }
    })
}

/// Labels the spoiler may play from `(q1, q2)`.
fn moves<'a>(
    s1: &'a InterfaceAutomaton,
    q1: StateId,
    s2: &'a InterfaceAutomaton,
    q2: StateId,
) -> impl Iterator<Item = LabelId> + 'a {
    s1.alphabet().ids().filter(move |&l| {
        if s1.alphabet().is_output(l) {
            s1.enables(q1, l)
        } else {
            s2.enables(q2, l)
        }
    })
}

/// Greatest alternating simulation, computed by rounds. `rank[p]` is the
/// round in which pair `p` was removed (0 for local violations), `None`
/// for pairs in the greatest relation.
struct Fixpoint {
    n2: usize,
    rank: Vec<Option<usize>>,
}

impl Fixpoint {
    fn compute(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton) -> Fixpoint {
        let n2 = s2.num_states();
        let idx = |q1: StateId, q2: StateId| q1.0 * n2 + q2.0;
        let mut rank = vec![None; s1.num_states() * n2];
        for q1 in s1.states() {
            for q2 in s2.states() {
                if local_violation(s1, q1, s2, q2).is_some() {
                    rank[idx(q1, q2)] = Some(0);
                }
            }
        }
        let mut round = 1;
        loop {
            let mut removed = Vec::new();
            for q1 in s1.states() {
                for q2 in s2.states() {
                    if rank[idx(q1, q2)].is_some() {
                        continue;
                    }
                    let transfer = moves(s1, q1, s2, q2).all(|l| {
                        s1.successors(q1, l).iter().all(|&p1| {
                            s2.successors(q2, l)
                                .iter()
                                .any(|&p2| rank[idx(p1, p2)].is_none())
                        })
                    });
                    if !transfer {
                        removed.push(idx(q1, q2));
                    }
                }
            }
            if removed.is_empty() {
                break;
            }
            for p in removed {
                rank[p] = Some(round);
            }
            round += 1;
        }
        Fixpoint { n2, rank }
    }

    fn rank(&self, q1: StateId, q2: StateId) -> Option<usize> {
        self.rank[q1.0 * self.n2 + q2.0]
    }
}

/// Alternating simulation.
pub fn check_as(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton) -> Result<Verdict> {
    s1.alphabet().ensure_same(s2.alphabet())?;
    let fp = Fixpoint::compute(s1, s2);
    let (mut q1, mut q2) = (s1.initial(), s2.initial());
    let Some(mut r) = fp.rank(q1, q2) else {
        let mut v = Verdict::new(Relation::As, Status::Holds, "greatest-fixpoint");
        v.simulation = Some(reachable_relation(s1, s2, &fp));
        return Ok(v);
    };
    // Spoiler strategy: always move to pairs removed in an earlier round.
    let mut trace = Trace::empty();
    let (mut left, mut right) = (vec![q1], vec![q2]);
    while r > 0 {
        let below = |p1: StateId, p2: StateId| fp.rank(p1, p2).is_some_and(|x| x < r);
        let (l, p1) = moves(s1, q1, s2, q2)
            .flat_map(|l| s1.successors(q1, l).iter().map(move |&p1| (l, p1)))
            .find(|&(l, p1)| s2.successors(q2, l).iter().all(|&p2| below(p1, p2)))
            .ok_or_else(|| Error::Internal("simulation rank without spoiler move".into()))?;
        let p2 = *s2
            .successors(q2, l)
            .iter()
            .max_by_key(|&&p2| (fp.rank(p1, p2), std::cmp::Reverse(p2)))
            .unwrap();
        trace.push(l);
        q1 = p1;
        q2 = p2;
        left.push(q1);
        right.push(q2);
        r = fp.rank(q1, q2).unwrap();
    }
    let (kind, action) = local_violation(s1, q1, s2, q2)
        .ok_or_else(|| Error::Internal("rank 0 pair without local violation".into()))?;
    let mut v = Verdict::new(Relation::As, Status::Fails, "greatest-fixpoint").with_witness(Witness {
        kind,
        trace: names(s1, &trace),
        action: s1.alphabet().name(action).to_string(),
    });
    let render = |s: &InterfaceAutomaton, qs: &[StateId]| {
        qs.iter().map(|&q| s.state_name(q)).collect::<Vec<_>>().join(" ")
    };
    v.notes.push(format!("left path: {}", render(s1, &left)));
    v.notes.push(format!("right path: {}", render(s2, &right)));
    Ok(v)
}

/// Pairs of the greatest simulation reachable from the initial pair by
/// simulation moves.
fn reachable_relation(
    s1: &InterfaceAutomaton,
    s2: &InterfaceAutomaton,
    fp: &Fixpoint,
) -> SimulationRelation {
    let start = (s1.initial(), s2.initial());
    let mut seen = std::collections::BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((q1, q2)) = queue.pop_front() {
        for l in moves(s1, q1, s2, q2) {
            for &p1 in s1.successors(q1, l) {
                for &p2 in s2.successors(q2, l) {
                    if fp.rank(p1, p2).is_none() && seen.insert((p1, p2)) {
                        queue.push_back((p1, p2));
                    }
                }
            }
        }
    }
    SimulationRelation {
        pairs: seen
            .into_iter()
            .map(|(a, b)| (s1.state_name(a).to_string(), s2.state_name(b).to_string()))
            .collect(),
    }
}

/// A violated inclusion found by the witness search.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Violation {
    trace: Trace,
    label: LabelId,
    output: bool,
}

/// Shortest, then lexicographically least, violation of input-failure
/// refinement: a breadth-first walk over pairs `(s1 after σ, s2 after σ)`
/// for σ ranging over the traces of `s1` accepted by the input-universal
/// determinization of `s2`.
fn first_if_violation(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton) -> Option<Violation> {
    let start = (initial_set(s1), initial_set(s2));
    let mut seen: HashMap<(StateSet, StateSet), ()> = HashMap::from([(start.clone(), ())]);
    let mut queue = VecDeque::from([(start, Trace::empty())]);
    while let Some(((p, q), trace)) = queue.pop_front() {
        let bad = s1.alphabet().ids().find(|&l| {
            if s1.alphabet().is_output(l) {
                has_output(s1, &p, l) && !has_output(s2, &q, l)
            } else {
                universally_enabled(s2, &q, l) && !universally_enabled(s1, &p, l)
            }
        });
        if let Some(label) = bad {
            return Some(Violation {
                trace,
                label,
                output: s1.alphabet().is_output(label),
            });
        }
        for l in s1.alphabet().ids() {
            let allowed = if s1.alphabet().is_output(l) {
                has_output(s2, &q, l)
            } else {
                universally_enabled(s2, &q, l)
            };
            if !allowed {
                continue;
            }
            let np = post(s1, &p, l);
            if np.is_empty() {
                continue;
            }
            let key = (np, post(s2, &q, l));
            if seen.insert(key.clone(), ()).is_none() {
                queue.push_back((key, trace.extended(l)));
            }
        }
    }
    None
}

/// Replays an input-failure witness against the failure-trace semantics.
pub fn validate_if_witness(
    s1: &InterfaceAutomaton,
    s2: &InterfaceAutomaton,
    w: &Witness,
) -> Result<bool> {
    let trace = Trace::from_names(s1.alphabet(), &w.trace)?;
    let action = s1
        .alphabet()
        .lookup(&w.action)
        .ok_or_else(|| Error::ForeignLabel(w.action.clone()))?;
    let rho = match w.kind {
        WitnessKind::OutputExtension | WitnessKind::IocoOutput => {
            if !s1.alphabet().is_output(action) {
                return Ok(false);
            }
            FailureTrace::plain(trace.extended(action))
        }
        WitnessKind::InputRefusal | WitnessKind::UiocoInput => {
            if !s1.alphabet().is_input(action) {
                return Ok(false);
            }
            FailureTrace::refusing(trace, action)
        }
        _ => return Ok(false),
    };
    Ok(is_ftrace(s1, &rho) && !fcl_member(s2, &rho))
}

fn if_verdict(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton, relation: Relation) -> Result<Verdict> {
    s1.alphabet().ensure_same(s2.alphabet())?;
    let decision = check_as(s1, &determinize_iu(s2))?;
    let violation = first_if_violation(s1, s2);
    if decision.holds() != violation.is_none() {
        return Err(Error::Internal(
            "simulation against the input-universal determinization disagrees with the witness search"
                .into(),
        ));
    }
    let Some(v) = violation else {
        return Ok(Verdict::new(relation, Status::Holds, IF_METHOD));
    };
    let w = Witness {
        kind: if v.output {
            WitnessKind::OutputExtension
        } else {
            WitnessKind::InputRefusal
        },
        trace: names(s1, &v.trace),
        action: s1.alphabet().name(v.label).to_string(),
    };
    if !validate_if_witness(s1, s2, &w)? {
        return Err(Error::Internal(format!("witness {w:?} does not replay")));
    }
    Ok(Verdict::new(relation, Status::Fails, IF_METHOD).with_witness(w))
}

/// Input-failure refinement.
pub fn check_if(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton) -> Result<Verdict> {
    if_verdict(s1, s2, Relation::If)
}

/// The OE/IU characterization; same decision as [`check_if`], with the
/// failing side of the inclusion reported.
pub fn check_iuoe(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton) -> Result<Verdict> {
    let mut v = if_verdict(s1, s2, Relation::Iuoe)?;
    if let Some(w) = &v.witness {
        let word = Trace::from_names(s1.alphabet(), &w.trace)?
            .extended(s1.alphabet().lookup(&w.action).unwrap());
        let lhs = oe_member(s1, &word) && iu_member(s2, &word);
        let side = match w.kind {
            WitnessKind::OutputExtension if lhs && !oe_member(s2, &word) => Side::Output,
            WitnessKind::InputRefusal if lhs && !iu_member(s1, &word) => Side::Input,
            _ => return Err(Error::Internal(format!("word {word:?} does not separate OE/IU"))),
        };
        v.side = Some(side);
    }
    Ok(v)
}

/// Refinement in both directions.
pub fn check_equiv_if(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton) -> Result<Verdict> {
    let forward = if_verdict(s1, s2, Relation::EquivIf)?;
    if forward.fails() {
        let mut v = forward;
        v.notes.push("left is not refined by right".into());
        return Ok(v);
    }
    let mut backward = if_verdict(s2, s1, Relation::EquivIf)?;
    if backward.fails() {
        backward.notes.push("right is not refined by left".into());
    }
    Ok(backward)
}

/// Trace-based alternating containment, which coincides with [`check_iuoe`]
/// on image-finite automata.
pub fn check_tb(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton) -> Result<Verdict> {
    let mut v = check_iuoe(s1, s2)?;
    v.relation = Relation::Tb;
    v.method = "tb-via-iuoe".into();
    v.notes
        .push("right side is finite, hence image-finite: tb coincides with iuoe".into());
    Ok(v)
}

fn closures(
    i: &InterfaceAutomaton,
    s: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
) -> Result<(InterfaceAutomaton, InterfaceAutomaton)> {
    i.alphabet().ensure_same(s.alphabet())?;
    Ok((delta_closure(i, cfg)?, delta_closure(s, cfg)?))
}

/// uioco, decided as input-failure refinement of the quiescence closures.
/// Debug builds also run [`uioco_product`] and require the same verdict.
pub fn check_uioco(
    i: &InterfaceAutomaton,
    s: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
) -> Result<Verdict> {
    let (di, ds) = closures(i, s, cfg)?;
    let mut v = if_verdict(&di, &ds, Relation::Uioco)?;
    v.method = format!("delta+{IF_METHOD}");
    if let Some(w) = &mut v.witness {
        w.kind = match w.kind {
            WitnessKind::OutputExtension => WitnessKind::IocoOutput,
            _ => WitnessKind::UiocoInput,
        };
    }
    if cfg!(debug_assertions) {
        let other = uioco_product(i, s, cfg)?;
        if other.status != v.status || other.witness != v.witness {
            return Err(Error::Internal(format!(
                "uioco routes disagree: {} vs {}",
                v.to_json(),
                other.to_json()
            )));
        }
    }
    Ok(v)
}

/// uioco by a synchronized product of the standard determinization of the
/// closed implementation with the input-universal determinization of the
/// closed specification, checking output inclusion and input containment
/// pairwise.
pub fn uioco_product(
    i: &InterfaceAutomaton,
    s: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
) -> Result<Verdict> {
    let (di, ds) = closures(i, s, cfg)?;
    let left = subset_construction(&di, Construction::Standard);
    let right = subset_construction(&ds, Construction::InputUniversal);
    let (a, b) = (&left.automaton, &right.automaton);
    let start = (a.initial(), b.initial());
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = VecDeque::from([(start, Trace::empty())]);
    while let Some(((p, q), trace)) = queue.pop_front() {
        let bad = a.alphabet().ids().find_map(|l| {
            if a.alphabet().is_output(l) && a.enables(p, l) && !b.enables(q, l) {
                Some((WitnessKind::IocoOutput, l))
            } else if a.alphabet().is_input(l)
                && b.enables(q, l)
                && !universally_enabled(&di, left.members(p), l)
            {
                Some((WitnessKind::UiocoInput, l))
            } else {
                None
            }
        });
        if let Some((kind, l)) = bad {
            let w = Witness {
                kind,
                trace: names(a, &trace),
                action: a.alphabet().name(l).to_string(),
            };
            return Ok(Verdict::new(Relation::Uioco, Status::Fails, "delta+det-product").with_witness(w));
        }
        for l in a.alphabet().ids() {
            if let (Some(&np), Some(&nq)) = (a.successors(p, l).first(), b.successors(q, l).first()) {
                if seen.insert((np, nq)) {
                    queue.push_back(((np, nq), trace.extended(l)));
                }
            }
        }
    }
    Ok(Verdict::new(Relation::Uioco, Status::Holds, "delta+det-product"))
}

/// ioco for input-enabled implementations.
pub fn check_ioco(
    i: &InterfaceAutomaton,
    s: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
) -> Result<Verdict> {
    let (di, ds) = closures(i, s, cfg)?;
    if let Some((q, a)) = i.refused_input() {
        return Err(Error::NotInputEnabled {
            state: i.state_name(q).to_string(),
            input: i.alphabet().name(a).to_string(),
        });
    }
    let a = subset_construction(&di, Construction::Standard).automaton;
    let b = subset_construction(&ds, Construction::Standard).automaton;
    let start = (a.initial(), b.initial());
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = VecDeque::from([(start, Trace::empty())]);
    while let Some(((p, q), trace)) = queue.pop_front() {
        if let Some(x) = a.enabled_outputs(p).find(|&x| !b.enables(q, x)) {
            let w = Witness {
                kind: WitnessKind::IocoOutput,
                trace: names(&a, &trace),
                action: a.alphabet().name(x).to_string(),
            };
            return Ok(Verdict::new(Relation::Ioco, Status::Fails, "delta+det-product").with_witness(w));
        }
        for l in a.alphabet().ids() {
            if let (Some(&np), Some(&nq)) = (a.successors(p, l).first(), b.successors(q, l).first()) {
                if seen.insert((np, nq)) {
                    queue.push_back(((np, nq), trace.extended(l)));
                }
            }
        }
    }
    Ok(Verdict::new(Relation::Ioco, Status::Holds, "delta+det-product"))
}

/// Replays an ioco/uioco witness on the quiescence closures.
pub fn validate_conformance_witness(
    i: &InterfaceAutomaton,
    s: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
    w: &Witness,
) -> Result<bool> {
    let (di, ds) = closures(i, s, cfg)?;
    let trace = Trace::from_names(ds.alphabet(), &w.trace)?;
    let action = ds
        .alphabet()
        .lookup(&w.action)
        .ok_or_else(|| Error::ForeignLabel(w.action.clone()))?;
    let p = crate::semantics::after_initial(&di, &trace);
    let q = crate::semantics::after_initial(&ds, &trace);
    Ok(match w.kind {
        WitnessKind::IocoOutput => {
            !q.is_empty()
                && ds.alphabet().is_output(action)
                && has_output(&di, &p, action)
                && !has_output(&ds, &q, action)
        }
        WitnessKind::UiocoInput => {
            !q.is_empty()
                && iu_member(&ds, &trace)
                && ds.alphabet().is_input(action)
                && universally_enabled(&ds, &q, action)
                && !universally_enabled(&di, &p, action)
        }
        _ => false,
    })
}
