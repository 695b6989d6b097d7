//! Strategies, outcomes and bounded games for alternating-trace containment.
//!
//! The antagonist fixes output, determinization and race strategies for the
//! left automaton; the protagonist answers with the same for the right
//! automaton so that every trace the environment can produce on the right
//! is also producible on the left. Plays are cut at depth `k`; cut plays
//! count as matched, so a refutation at depth `k` refutes the unbounded
//! game as well.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::automaton::{InterfaceAutomaton, LabelId, Path, StateId};
use crate::error::{Error, Result};
use crate::semantics::{has_output, initial_set, post, universally_enabled, StateSet, Trace};
use crate::verdict::{PlayEdge, PlayNode, Relation, Status, Verdict};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Which choice fires when both an input and an output are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Race {
    #[default]
    Input,
    Output,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrategyProfile {
    pub input_choice: BTreeMap<Path, LabelId>,
    pub output_choice: BTreeMap<Path, LabelId>,
    pub det_choice: BTreeMap<(Path, LabelId), StateId>,
    /// Missing entries mean [`Race::Input`].
    pub race_choice: BTreeMap<Path, Race>,
}

impl StrategyProfile {
    pub fn race(&self, pi: &Path) -> Race {
        self.race_choice.get(pi).copied().unwrap_or_default()
    }

    /// Successor chosen for `l` after `pi`; the least successor when the
    /// table has no entry.
    pub fn resolve(&self, s: &InterfaceAutomaton, pi: &Path, l: LabelId) -> Option<StateId> {
        self.det_choice
            .get(&(pi.clone(), l))
            .copied()
            .or_else(|| s.successors(pi.last(), l).first().copied())
    }

    /// The same profile without the environment's input choices.
    pub fn system_part(&self) -> StrategyProfile {
        StrategyProfile {
            input_choice: BTreeMap::new(),
            ..self.clone()
        }
    }

    /// Checks the strategy conditions for paths shorter than `k`: chosen
    /// labels are enabled with the right kind, determinization picks real
    /// successors and is defined for every enabled label.
    pub fn check(&self, s: &InterfaceAutomaton, k: usize) -> std::result::Result<(), String> {
        let ab = s.alphabet();
        for (pi, &a) in &self.input_choice {
            if !pi.is_valid_in(s) || !ab.is_input(a) || !s.enables(pi.last(), a) {
                return Err(format!("input choice {} after {}", ab.name(a), pi.render(s)));
            }
        }
        for (pi, &x) in &self.output_choice {
            if !pi.is_valid_in(s) || !ab.is_output(x) || !s.enables(pi.last(), x) {
                return Err(format!("output choice {} after {}", ab.name(x), pi.render(s)));
            }
        }
        for ((pi, l), q) in &self.det_choice {
            if !pi.is_valid_in(s) || !s.successors(pi.last(), *l).contains(q) {
                return Err(format!("successor choice {} after {}", ab.name(*l), pi.render(s)));
            }
        }
        for pi in self.output_choice.keys().chain(self.input_choice.keys()) {
            if pi.len() >= k {
                continue;
            }
            for l in s.enabled(pi.last()) {
                if !self.det_choice.contains_key(&(pi.clone(), l)) {
                    return Err(format!(
                        "no successor choice for {} after {}",
                        ab.name(l),
                        pi.render(s)
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One move of a play: the environment's input fires if chosen and the
/// race allows it, otherwise a chosen output fires, otherwise nothing.
pub fn step(s: &InterfaceAutomaton, pi: &Path, f: &StrategyProfile) -> Path {
    let input = f.input_choice.get(pi).copied();
    let output = f.output_choice.get(pi).copied();
    let race = f.race(pi);
    let fire = match (input, output) {
        (Some(a), None) => Some(a),
        (Some(a), Some(_)) if race == Race::Input => Some(a),
        (_, Some(x)) => Some(x),
        (None, None) => None,
    };
    match fire.and_then(|l| f.resolve(s, pi, l).map(|q| (l, q))) {
        Some((l, q)) => pi.extended(l, q),
        None => pi.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub path: Path,
    /// False when the play was cut at the depth bound.
    pub finished: bool,
}

/// Iterates [`step`] from the initial path until it stops or reaches `k` labels.
pub fn outcome(s: &InterfaceAutomaton, f: &StrategyProfile, k: usize) -> Outcome {
    let mut pi = Path::initial(s);
    loop {
        let next = step(s, &pi, f);
        if next == pi {
            return Outcome { path: pi, finished: true };
        }
        if pi.len() == k {
            return Outcome { path: pi, finished: false };
        }
        pi = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub state: StateId,
    pub depth: usize,
    /// The environment may end the play here.
    pub stoppable: bool,
    /// Sorted by label.
    pub children: Vec<(LabelId, usize)>,
}

/// All plays of one system-side strategy as the environment varies its
/// inputs, as a trie of traces cut at depth `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeTree {
    nodes: Vec<TreeNode>,
    depth: usize,
}

impl OutcomeTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, n: usize) -> &TreeNode {
        &self.nodes[n]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn child(&self, n: usize, l: LabelId) -> Option<usize> {
        let c = &self.nodes[n].children;
        c.binary_search_by_key(&l, |&(m, _)| m).ok().map(|i| c[i].1)
    }

    /// A play may end here: the environment stops or the bound is hit.
    pub fn accepting(&self, n: usize) -> bool {
        self.nodes[n].stoppable || self.nodes[n].depth == self.depth
    }

    /// The outcome traces the tree denotes.
    pub fn traces(&self) -> BTreeSet<Trace> {
        let mut out = BTreeSet::new();
        let mut stack = vec![(0usize, Trace::empty())];
        while let Some((n, t)) = stack.pop() {
            if self.accepting(n) {
                out.insert(t.clone());
            }
            for &(l, c) in &self.nodes[n].children {
                stack.push((c, t.extended(l)));
            }
        }
        out
    }
}

/// Builds the outcome tree of the system part of `f` (its input choices
/// are ignored).
pub fn outcome_set(s: &InterfaceAutomaton, f: &StrategyProfile, k: usize) -> OutcomeTree {
    let mut tree = OutcomeTree {
        nodes: Vec::new(),
        depth: k,
    };
    grow(s, f, k, Path::initial(s), &mut tree);
    tree
}

fn grow(s: &InterfaceAutomaton, f: &StrategyProfile, k: usize, pi: Path, tree: &mut OutcomeTree) -> usize {
    let q = pi.last();
    let id = tree.nodes.len();
    let output = f
        .output_choice
        .get(&pi)
        .copied()
        .filter(|&x| s.enables(q, x));
    tree.nodes.push(TreeNode {
        state: q,
        depth: pi.len(),
        stoppable: output.is_none(),
        children: Vec::new(),
    });
    if pi.len() == k {
        return id;
    }
    let mut labels: Vec<LabelId> = output.into_iter().collect();
    if output.is_none() || f.race(&pi) == Race::Input {
        labels.extend(s.enabled_inputs(q));
    }
    labels.sort();
    let mut children = Vec::new();
    for l in labels {
        if let Some(next) = f.resolve(s, &pi, l) {
            let c = grow(s, f, k, pi.extended(l, next), tree);
            children.push((l, c));
        }
    }
    tree.nodes[id].children = children;
    id
}

/// Whether the protagonist has a system-side strategy for `s2` all of whose
/// plays stay inside `target`.
pub fn inner_containment(s2: &InterfaceAutomaton, target: &OutcomeTree, k: usize) -> bool {
    let mut memo = HashMap::new();
    protagonist_wins(s2, target, k, s2.initial(), target.root(), &mut memo)
}

fn protagonist_wins(
    s2: &InterfaceAutomaton,
    t: &OutcomeTree,
    k: usize,
    q: StateId,
    n: usize,
    memo: &mut HashMap<(StateId, usize), bool>,
) -> bool {
    if t.node(n).depth >= k.min(t.depth()) {
        return true;
    }
    if let Some(&v) = memo.get(&(q, n)) {
        return v;
    }
    let follow = |l: LabelId, memo: &mut HashMap<(StateId, usize), bool>| {
        t.child(n, l).is_some_and(|c| {
            s2.successors(q, l)
                .iter()
                .any(|&p| protagonist_wins(s2, t, k, p, c, memo))
        })
    };
    // Stay silent: the environment may stop or take any enabled input.
    let mut win = t.node(n).stoppable
        && s2
            .enabled_inputs(q)
            .collect::<Vec<_>>()
            .into_iter()
            .all(|a| follow(a, memo));
    // Or emit an output that wins the race against every input.
    if !win {
        win = s2
            .enabled_outputs(q)
            .collect::<Vec<_>>()
            .into_iter()
            .any(|y| follow(y, memo));
    }
    memo.insert((q, n), win);
    win
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AtcStatus {
    HoldsExact,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtcVerdict {
    pub status: AtcStatus,
    pub depth: usize,
    pub refuting_profile: Option<StrategyProfile>,
    /// Depth at which `refuting_profile` escapes; at most `depth`.
    pub refuted_at: Option<usize>,
    pub diagnostics: Option<String>,
    pub narrative: Option<PlayNode>,
}

impl AtcVerdict {
    pub fn to_verdict(&self, relation: Relation, method: &str) -> Verdict {
        let status = match self.status {
            AtcStatus::HoldsExact => Status::Holds,
            AtcStatus::Refuted => Status::Fails,
            AtcStatus::Inconclusive => Status::Inconclusive,
        };
        let mut v = Verdict::new(relation, status, format!("{method} k={}", self.depth));
        v.depth = Some(self.depth);
        v.strategy = self.narrative.clone();
        v.notes.extend(self.diagnostics.clone());
        v
    }
}

/// Plays are exact at depth `k` when both automata are acyclic and no path
/// is long enough to be cut.
fn exact_at(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton, k: usize) -> bool {
    match (s1.longest_path(), s2.longest_path()) {
        (Some(a), Some(b)) => k > a.max(b),
        _ => false,
    }
}

#[derive(Clone, Debug)]
enum Choice {
    Leaf,
    /// No output: per enabled input, the chosen successor and the entry there.
    Quiet(Vec<(LabelId, StateId, usize)>),
    /// Output with the race set to outputs.
    Emit(LabelId, StateId, usize),
}

#[derive(Clone, Debug)]
struct Entry {
    /// States of the right automaton from which the protagonist can stay
    /// inside the outcome tree the antagonist's choice produces.
    wins: StateSet,
    choice: Choice,
}

fn insert_minimal(entries: &mut Vec<Entry>, e: Entry) {
    if entries.iter().any(|o| o.wins.is_subset(&e.wins)) {
        return;
    }
    entries.retain(|o| !e.wins.is_subset(&o.wins));
    entries.push(e);
}

fn win_set(s2: &InterfaceAutomaton, stoppable: bool, children: &[(LabelId, &StateSet)]) -> StateSet {
    let child = |l: LabelId| children.iter().find(|(m, _)| *m == l).map(|(_, w)| *w);
    let advance = |q: StateId, l: LabelId| {
        child(l).is_some_and(|w| s2.successors(q, l).iter().any(|&p| w.contains(p)))
    };
    s2.states()
        .filter(|&q| {
            (stoppable && s2.enabled_inputs(q).all(|a| advance(q, a)))
                || s2.enabled_outputs(q).any(|y| advance(q, y))
        })
        .collect()
}

/// Bounded refutation of alternating-trace containment.
///
/// For every left state and remaining depth the antagonist's options are
/// summarized by the minimal sets of right states from which the
/// protagonist still wins; a refutation exists iff some minimal set misses
/// the right initial state. Staying silent with inputs open and emitting an
/// output that wins the race are the only choices that matter: letting
/// inputs race an output adds plays, which can only help the protagonist.
/// A refuting profile is rebuilt and replayed through [`outcome_set`] and
/// [`inner_containment`] before it is reported.
pub fn refute_atc(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton, k: usize, budget: u64) -> Result<AtcVerdict> {
    s1.alphabet().ensure_same(s2.alphabet())?;
    let reach = s1.reachable_states();
    let all: StateSet = s2.states().collect();
    let mut table: Vec<HashMap<StateId, Vec<Entry>>> = Vec::with_capacity(k + 1);
    table.push(
        reach
            .iter()
            .map(|&q| (q, vec![Entry { wins: all.clone(), choice: Choice::Leaf }]))
            .collect(),
    );
    let mut spent = 0u64;
    for r in 1..=k {
        let below = &table[r - 1];
        let mut level = HashMap::new();
        for &q1 in &reach {
            let mut entries = Vec::new();
            // Options per label: (successor, entry index, wins).
            let options = |l: LabelId| -> Vec<(StateId, usize, &StateSet)> {
                let mut opts: Vec<(StateId, usize, &StateSet)> = Vec::new();
                for &p in s1.successors(q1, l) {
                    for (i, e) in below[&p].iter().enumerate() {
                        if opts.iter().any(|o| o.2.is_subset(&e.wins)) {
                            continue;
                        }
                        opts.retain(|o| !e.wins.is_subset(o.2));
                        opts.push((p, i, &e.wins));
                    }
                }
                opts
            };
            for x in s1.enabled_outputs(q1) {
                for (p, i, w) in options(x) {
                    spent += 1;
                    let wins = win_set(s2, false, &[(x, w)]);
                    insert_minimal(&mut entries, Entry { wins, choice: Choice::Emit(x, p, i) });
                }
            }
            let inputs: Vec<LabelId> = s1.enabled_inputs(q1).collect();
            let per_input: Vec<_> = inputs.iter().map(|&a| options(a)).collect();
            let mut pick = vec![0usize; inputs.len()];
            loop {
                spent += 1;
                if spent > budget {
                    return Ok(AtcVerdict {
                        status: AtcStatus::Inconclusive,
                        depth: k,
                        refuting_profile: None,
        refuted_at: None,
                        diagnostics: Some(format!("budget of {budget} choices exhausted at depth {r}")),
                        narrative: None,
                    });
                }
                let children: Vec<(LabelId, &StateSet)> = inputs
                    .iter()
                    .zip(&pick)
                    .zip(&per_input)
                    .map(|((&a, &j), opts)| (a, opts[j].2))
                    .collect();
                let wins = win_set(s2, true, &children);
                let choice = Choice::Quiet(
                    inputs
                        .iter()
                        .zip(&pick)
                        .zip(&per_input)
                        .map(|((&a, &j), opts)| (a, opts[j].0, opts[j].1))
                        .collect(),
                );
                insert_minimal(&mut entries, Entry { wins, choice });
                // Advance the mixed-radix counter over the input options.
                let mut d = 0;
                while d < pick.len() {
                    pick[d] += 1;
                    if pick[d] < per_input[d].len() {
                        break;
                    }
                    pick[d] = 0;
                    d += 1;
                }
                if d == pick.len() {
                    break;
                }
            }
            level.insert(q1, entries);
        }
        table.push(level);
    }

    // Report the shallowest refutation; deeper plays only pad it.
    let refuting = (1..=k).find_map(|r| {
        table[r][&s1.initial()]
            .iter()
            .position(|e| !e.wins.contains(s2.initial()))
            .map(|i| (r, i))
    });
    let Some((at, idx)) = refuting else {
        let status = if exact_at(s1, s2, k) {
            AtcStatus::HoldsExact
        } else {
            AtcStatus::Inconclusive
        };
        return Ok(AtcVerdict {
            status,
            depth: k,
            refuting_profile: None,
        refuted_at: None,
            diagnostics: None,
            narrative: None,
        });
    };
    let mut profile = StrategyProfile::default();
    let narrative = rebuild(s1, &table, Path::initial(s1), at, idx, &mut profile);
    let tree = outcome_set(s1, &profile, at);
    if inner_containment(s2, &tree, at) {
        return Err(Error::Internal(
            "refuting strategy is matched when replayed".into(),
        ));
    }
    Ok(AtcVerdict {
        status: AtcStatus::Refuted,
        depth: k,
        refuting_profile: Some(profile),
        refuted_at: Some(at),
        diagnostics: (at < k).then(|| format!("refuted already at depth {at}")),
        narrative: Some(narrative),
    })
}

fn rebuild(
    s1: &InterfaceAutomaton,
    table: &[HashMap<StateId, Vec<Entry>>],
    pi: Path,
    r: usize,
    idx: usize,
    profile: &mut StrategyProfile,
) -> PlayNode {
    let q = pi.last();
    let entry = &table[r][&q][idx];
    let name = |l: LabelId| s1.alphabet().name(l).to_string();
    let mut node = PlayNode {
        state: s1.state_name(q).to_string(),
        spec: None,
        choice: String::new(),
        children: Vec::new(),
    };
    let mut followed = Vec::new();
    match &entry.choice {
        Choice::Leaf => node.choice = "depth bound".into(),
        Choice::Quiet(picks) => {
            node.choice = if picks.is_empty() {
                "no output, no inputs: play ends".into()
            } else {
                "no output; environment may stop or give an input".into()
            };
            for &(a, p, i) in picks {
                profile.det_choice.insert((pi.clone(), a), p);
                followed.push((a, p, i));
            }
        }
        Choice::Emit(x, p, i) => {
            node.choice = format!("output {} (wins the race)", name(*x));
            profile.output_choice.insert(pi.clone(), *x);
            profile.race_choice.insert(pi.clone(), Race::Output);
            profile.det_choice.insert((pi.clone(), *x), *p);
            followed.push((*x, *p, *i));
        }
    }
    if r > 0 {
        for l in s1.enabled(q) {
            profile
                .det_choice
                .entry((pi.clone(), l))
                .or_insert(s1.successors(q, l)[0]);
        }
    }
    for (l, p, i) in followed {
        let child = rebuild(s1, table, pi.extended(l, p), r - 1, i, profile);
        node.children.push(PlayEdge { label: name(l), node: child });
    }
    node
}

/// Literal refuter used to cross-check [`refute_atc`]: enumerates the
/// antagonist's system strategies subtree by subtree, keeps one strategy per
/// distinct set of outcome traces, and runs [`inner_containment`] on each.
pub fn refute_atc_enumerative(
    s1: &InterfaceAutomaton,
    s2: &InterfaceAutomaton,
    k: usize,
    budget: u64,
) -> Result<AtcStatus> {
    s1.alphabet().ensure_same(s2.alphabet())?;
    let mut spent = 0u64;
    let mut memo = HashMap::new();
    let Some(sets) = suffix_sets(s1, s1.initial(), k, &mut memo, &mut spent, budget) else {
        return Ok(AtcStatus::Inconclusive);
    };
    for set in sets.iter() {
        spent += set.len() as u64;
        if spent > budget {
            return Ok(AtcStatus::Inconclusive);
        }
        let tree = trie(set, k);
        if !inner_containment(s2, &tree, k) {
            return Ok(AtcStatus::Refuted);
        }
    }
    Ok(if exact_at(s1, s2, k) {
        AtcStatus::HoldsExact
    } else {
        AtcStatus::Inconclusive
    })
}

type Words = BTreeSet<Vec<LabelId>>;

/// Distinct outcome sets (as suffix words accepted below a node at remaining
/// depth `r`) over all system strategies from `q`.
fn suffix_sets(
    s: &InterfaceAutomaton,
    q: StateId,
    r: usize,
    memo: &mut HashMap<(StateId, usize), std::rc::Rc<Vec<Words>>>,
    spent: &mut u64,
    budget: u64,
) -> Option<std::rc::Rc<Vec<Words>>> {
    if let Some(v) = memo.get(&(q, r)) {
        return Some(v.clone());
    }
    let mut out: HashSet<Words> = HashSet::new();
    if r == 0 {
        out.insert(Words::from([Vec::new()]));
    } else {
        let inputs: Vec<LabelId> = s.enabled_inputs(q).collect();
        let branch = |l: LabelId, memo: &mut HashMap<_, _>, spent: &mut u64| -> Option<Vec<Words>> {
            let mut all = HashSet::new();
            for &p in s.successors(q, l) {
                for w in suffix_sets(s, p, r - 1, memo, spent, budget)?.iter() {
                    all.insert(w.iter().map(|t| prefixed(l, t)).collect::<Words>());
                }
            }
            Some(all.into_iter().collect())
        };
        let mut input_opts = Vec::new();
        for &a in &inputs {
            input_opts.push(branch(a, memo, spent)?);
        }
        // Silent: stoppable plus one subtree per input.
        let silent = product(&input_opts, Words::from([Vec::new()]), spent, budget)?;
        out.extend(silent);
        for x in s.enabled_outputs(q).collect::<Vec<_>>() {
            let xs = branch(x, memo, spent)?;
            for w in &xs {
                // Race to the output: only the output fires.
                out.insert(w.clone());
                // Race to inputs: the output and every input may fire.
                if !inputs.is_empty() {
                    for combo in product(&input_opts, w.clone(), spent, budget)? {
                        out.insert(combo);
                    }
                }
            }
        }
    }
    *spent += out.iter().map(|w| w.len() as u64).sum::<u64>();
    if *spent > budget {
        return None;
    }
    let v = std::rc::Rc::new(out.into_iter().collect::<Vec<_>>());
    memo.insert((q, r), v.clone());
    Some(v)
}

fn prefixed(l: LabelId, t: &[LabelId]) -> Vec<LabelId> {
    let mut v = Vec::with_capacity(t.len() + 1);
    v.push(l);
    v.extend_from_slice(t);
    v
}

fn product(opts: &[Vec<Words>], base: Words, spent: &mut u64, budget: u64) -> Option<Vec<Words>> {
    let mut acc = vec![base];
    for choices in opts {
        let mut next = Vec::new();
        for a in &acc {
            for c in choices {
                *spent += (a.len() + c.len()) as u64;
                if *spent > budget {
                    return None;
                }
                let mut u = a.clone();
                u.extend(c.iter().cloned());
                next.push(u);
            }
        }
        acc = next;
    }
    Some(acc)
}

/// Outcome tree denoting exactly `words` (all of length at most `k`).
fn trie(words: &Words, k: usize) -> OutcomeTree {
    let mut tree = OutcomeTree {
        nodes: vec![TreeNode {
            state: StateId(0),
            depth: 0,
            stoppable: false,
            children: Vec::new(),
        }],
        depth: k,
    };
    for w in words {
        let mut n = 0;
        for &l in w {
            n = match tree.child(n, l) {
                Some(c) => c,
                None => {
                    let c = tree.nodes.len();
                    tree.nodes.push(TreeNode {
                        state: StateId(0),
                        depth: tree.nodes[n].depth + 1,
                        stoppable: false,
                        children: Vec::new(),
                    });
                    let ch = &mut tree.nodes[n].children;
                    let pos = ch.partition_point(|&(m, _)| m < l);
                    ch.insert(pos, (l, c));
                    c
                }
            };
        }
        tree.nodes[n].stoppable = true;
    }
    tree
}

/// Bounded search for an antagonist win in the trace-based game, producing
/// the play it forces. The authoritative verdict for that relation comes
/// from [`crate::relations::check_tb`]; this only explains failures.
pub fn refute_tb(s1: &InterfaceAutomaton, s2: &InterfaceAutomaton, k: usize, budget: u64) -> Result<AtcVerdict> {
    s1.alphabet().ensure_same(s2.alphabet())?;
    let mut search = TbSearch {
        s1,
        s2,
        lost: HashSet::new(),
        spent: 0,
        budget,
    };
    let found = search.run(s1.initial(), initial_set(s1), initial_set(s2), k);
    let status = match (&found, search.spent > budget) {
        (Some(_), _) => AtcStatus::Refuted,
        (None, true) => AtcStatus::Inconclusive,
        (None, false) if exact_at(s1, s2, k) => AtcStatus::HoldsExact,
        _ => AtcStatus::Inconclusive,
    };
    let diagnostics = (status == AtcStatus::Inconclusive && search.spent > budget)
        .then(|| format!("budget of {budget} positions exhausted"));
    Ok(AtcVerdict {
        status,
        depth: k,
        refuting_profile: None,
        refuted_at: None,
        diagnostics,
        narrative: found,
    })
}

struct TbSearch<'a> {
    s1: &'a InterfaceAutomaton,
    s2: &'a InterfaceAutomaton,
    lost: HashSet<(StateId, StateSet, StateSet, usize)>,
    spent: u64,
    budget: u64,
}

impl TbSearch<'_> {
    /// Play from left state `q` with `p = s1 after σ` and `sp = s2 after σ`.
    fn run(&mut self, q: StateId, p: StateSet, sp: StateSet, r: usize) -> Option<PlayNode> {
        if r == 0 || self.spent > self.budget {
            return None;
        }
        let key = (q, p.clone(), sp.clone(), r);
        if self.lost.contains(&key) {
            return None;
        }
        self.spent += 1;
        let (s1, s2) = (self.s1, self.s2);
        let node = |choice: String, children: Vec<PlayEdge>| PlayNode {
            state: s1.state_name(q).to_string(),
            spec: Some(sp.names(s2)),
            choice,
            children,
        };
        for l in s1.alphabet().ids() {
            let name = s1.alphabet().name(l);
            if s1.alphabet().is_output(l) {
                if !s1.enables(q, l) {
                    continue;
                }
                if !has_output(s2, &sp, l) {
                    return Some(node(format!("output {name}; the right side cannot produce it"), vec![]));
                }
                for &next in s1.successors(q, l) {
                    if let Some(child) = self.run(next, post(s1, &p, l), post(s2, &sp, l), r - 1) {
                        let edge = PlayEdge { label: name.to_string(), node: child };
                        return Some(node(format!("output {name}"), vec![edge]));
                    }
                }
            } else {
                if !universally_enabled(s2, &sp, l) {
                    continue;
                }
                if !universally_enabled(s1, &p, l) {
                    return Some(node(
                        format!("no output; right environment gives {name}, which the left side may refuse"),
                        vec![],
                    ));
                }
                for &next in s1.successors(q, l) {
                    if let Some(child) = self.run(next, post(s1, &p, l), post(s2, &sp, l), r - 1) {
                        let edge = PlayEdge { label: name.to_string(), node: child };
                        return Some(node(format!("no output; right environment gives {name}"), vec![edge]));
                    }
                }
            }
        }
        self.lost.insert(key);
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse;

    const S_D: &str = "inputs a\noutputs x\ninitial q0\nq0 a q1\nq1 a q2\nq2 x q2\n";
    const S_I: &str = "inputs a b\noutputs x y\ninitial q0\nq0 x q1\nq0 y q0\nq1 y q1\n";
    const S_J: &str =
        "inputs a b\noutputs x y\ninitial q0\nq0 x q1\nq0 x q1'\nq1 a q2\nq1' b q2'\nq0 y q0\nq1 y q1\nq2 y q2\nq1' y q1'\nq2' y q2'\n";

    fn label(s: &InterfaceAutomaton, n: &str) -> LabelId {
        s.alphabet().lookup(n).unwrap()
    }

    #[test]
    fn step_cases() {
        let a = parse("inputs a\noutputs x\ninitial q0\nq0 x q0\nq0 a q1\nq0 a q2\nq1 x q1\nq1 a q2\n").unwrap();
        let root = Path::initial(&a);
        let (ia, ox) = (label(&a, "a"), label(&a, "x"));
        let mut f = StrategyProfile::default();
        f.output_choice.insert(root.clone(), ox);
        assert_eq!(step(&a, &root, &f).labels(), [ox]);
        f.input_choice.insert(root.clone(), ia);
        assert_eq!(step(&a, &root, &f).labels(), [ia]);
        f.race_choice.insert(root.clone(), Race::Output);
        assert_eq!(step(&a, &root, &f).labels(), [ox]);
        assert_eq!(step(&a, &root, &StrategyProfile::default()), root);
    }

    #[test]
    fn outcomes_follow_choices() {
        let d = parse(S_D).unwrap();
        let ia = label(&d, "a");
        let mut f = StrategyProfile::default();
        let p0 = Path::initial(&d);
        let p1 = p0.extended(ia, d.state_id("q1").unwrap());
        f.input_choice.insert(p0, ia);
        f.input_choice.insert(p1, ia);
        let o = outcome(&d, &f, 5);
        assert!(o.finished);
        assert_eq!(o.path.render(&d), "q0 a q1 a q2");
        let o = outcome(&d, &StrategyProfile::default(), 5);
        assert!(o.finished && o.path.is_empty());
    }

    #[test]
    fn outcome_trees() {
        let i = parse(S_I).unwrap();
        let mut f = StrategyProfile::default();
        f.output_choice.insert(Path::initial(&i), label(&i, "x"));
        let t = outcome_set(&i, &f, 3);
        let got: Vec<String> = t.traces().iter().map(|t| t.display(i.alphabet()).to_string()).collect();
        assert_eq!(got, ["x"]);
        let m = parse("outputs x\ninitial q\n").unwrap();
        let t = outcome_set(&m, &StrategyProfile::default(), 2);
        assert_eq!(t.traces(), BTreeSet::from([Trace::empty()]));
        assert!(inner_containment(&i, &outcome_set(&i, &f, 3), 3));
    }

    #[test]
    fn s_j_escapes_target() {
        let i = parse(S_I).unwrap();
        let j = parse(S_J).unwrap();
        let mut f = StrategyProfile::default();
        f.output_choice.insert(Path::initial(&i), label(&i, "x"));
        assert!(!inner_containment(&j, &outcome_set(&i, &f, 3), 3));
    }

    #[test]
    fn refutations() {
        let i = parse(S_I).unwrap();
        let j = parse(S_J).unwrap();
        let v = refute_atc(&i, &j, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, AtcStatus::Refuted);
        let prof = v.refuting_profile.unwrap();
        prof.check(&i, 3).unwrap();
        assert_eq!(refute_atc_enumerative(&i, &j, 3, DEFAULT_BUDGET).unwrap(), AtcStatus::Refuted);
        let r = refute_atc(&i, &i, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, AtcStatus::Inconclusive);
    }

    #[test]
    fn tb_narrative_follows_axax() {
        let b = parse("inputs a\noutputs x\ninitial q0\nq0 x q0\nq0 a q0\n").unwrap();
        let a = parse("inputs a\noutputs x\ninitial q0\nq0 x q0\nq0 a q1\nq0 a q2\nq1 x q1\nq1 a q2\n").unwrap();
        let v = refute_tb(&b, &a, 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, AtcStatus::Refuted);
        let mut labels = Vec::new();
        let mut n = v.narrative.as_ref().unwrap();
        while let Some(e) = n.children.first() {
            labels.push(e.label.clone());
            n = &e.node;
        }
        assert_eq!(labels.concat(), "axa");
        assert!(n.choice.starts_with("output x"));
        let d = parse(S_D).unwrap();
        assert_eq!(refute_tb(&d, &a, 4, DEFAULT_BUDGET).unwrap().status, AtcStatus::Inconclusive);
    }
}
