//! Every relation on one pair, checked against the implications between them.

use std::fmt::Write;

use serde::Serialize;

use crate::automaton::InterfaceAutomaton;
use crate::error::{Error, Result};
use crate::game::{refute_atc, refute_tb, AtcStatus};
use crate::relations::{check_as, check_equiv_if, check_if, check_ioco, check_iuoe, check_tb, check_uioco};
use crate::transform::QuiescenceConfig;
use crate::verdict::{Relation, Status, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AllOptions {
    pub depth: usize,
    pub budget: u64,
}

impl Default for AllOptions {
    fn default() -> Self {
        AllOptions {
            depth: 6,
            budget: crate::game::DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Entry {
    Checked(Box<Verdict>),
    Skipped {
        relation: Relation,
        status: &'static str,
        reason: String,
    },
}

impl Entry {
    pub fn relation(&self) -> Relation {
        match self {
            Entry::Checked(v) => v.relation,
            Entry::Skipped { relation, .. } => *relation,
        }
    }

    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            Entry::Checked(v) => Some(v),
            Entry::Skipped { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AllReport {
    pub results: Vec<Entry>,
    pub consistent: bool,
    pub violations: Vec<String>,
}

impl AllReport {
    pub fn get(&self, r: Relation) -> Option<&Verdict> {
        self.results
            .iter()
            .find(|e| e.relation() == r)
            .and_then(Entry::verdict)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<9} {:<13} detail", "relation", "status");
        for e in &self.results {
            match e {
                Entry::Checked(v) => {
                    let _ = writeln!(out, "{:<9} {:<13} {}", v.relation.name(), v.status.to_string(), v.method);
                }
                Entry::Skipped { relation, reason, .. } => {
                    let _ = writeln!(out, "{:<9} {:<13} {}", relation.name(), "skipped", reason);
                }
            }
        }
        if self.consistent {
            out.push_str("consistency: ok\n");
        } else {
            for v in &self.violations {
                let _ = writeln!(out, "consistency violated: {v}");
            }
        }
        out
    }
}

/// Decides one relation. `atc` runs the bounded game at `depth`; a failing
/// `tb` verdict carries the antagonist's play when one is found within `depth`.
pub fn check_relation(
    s1: &InterfaceAutomaton,
    s2: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
    rel: Relation,
    depth: usize,
    budget: u64,
) -> Result<Verdict> {
    Ok(match rel {
        Relation::As => check_as(s1, s2)?,
        Relation::If => check_if(s1, s2)?,
        Relation::Iuoe => check_iuoe(s1, s2)?,
        Relation::EquivIf => check_equiv_if(s1, s2)?,
        Relation::Uioco => check_uioco(s1, s2, cfg)?,
        Relation::Ioco => check_ioco(s1, s2, cfg)?,
        Relation::Atc => refute_atc(s1, s2, depth, budget)?.to_verdict(Relation::Atc, "bounded-game"),
        Relation::Tb => {
            let mut v = check_tb(s1, s2)?;
            let play = refute_tb(s1, s2, depth, budget)?;
            match (v.status, play.status) {
                (Status::Holds, AtcStatus::Refuted) => {
                    return Err(Error::Internal(
                        "trace-based game refuted although the relation holds".into(),
                    ))
                }
                (Status::Fails, AtcStatus::Refuted) => v.strategy = play.narrative,
                (Status::Fails, _) => v
                    .notes
                    .push(format!("no antagonist play found within depth {depth}")),
                _ => {}
            }
            v
        }
    })
}

/// Runs every relation and checks the implications
/// as ⟹ atc ⟹ tb ⟺ iuoe ⟺ if and ioco ⟹ uioco.
pub fn check_all(
    s1: &InterfaceAutomaton,
    s2: &InterfaceAutomaton,
    cfg: &QuiescenceConfig,
    opts: AllOptions,
) -> Result<AllReport> {
    s1.alphabet().ensure_same(s2.alphabet())?;
    let mut results = vec![Entry::Checked(Box::new(check_as(s1, s2)?))];
    let atc = refute_atc(s1, s2, opts.depth, opts.budget)?;
    results.push(Entry::Checked(Box::new(atc.to_verdict(Relation::Atc, "bounded-game"))));
    results.push(Entry::Checked(Box::new(check_tb(s1, s2)?)));
    results.push(Entry::Checked(Box::new(check_iuoe(s1, s2)?)));
    results.push(Entry::Checked(Box::new(check_if(s1, s2)?)));
    results.push(Entry::Checked(Box::new(check_uioco(s1, s2, cfg)?)));
    results.push(match check_ioco(s1, s2, cfg) {
        Ok(v) => Entry::Checked(Box::new(v)),
        Err(e @ Error::NotInputEnabled { .. }) => Entry::Skipped {
            relation: Relation::Ioco,
            status: "skipped",
            reason: e.to_string(),
        },
        Err(e) => return Err(e),
    });

    let status = |r: Relation| {
        results
            .iter()
            .find(|e| e.relation() == r)
            .and_then(Entry::verdict)
            .map(|v| v.status)
    };
    let mut violations = Vec::new();
    if status(Relation::As) == Some(Status::Holds) && status(Relation::Atc) == Some(Status::Fails) {
        violations.push("as holds but atc is refuted".to_string());
    }
    if status(Relation::Atc) == Some(Status::Holds) && status(Relation::Tb) != Some(Status::Holds) {
        violations.push("atc holds but tb does not".to_string());
    }
    if status(Relation::Tb) != status(Relation::Iuoe) {
        violations.push("tb and iuoe disagree".to_string());
    }
    if status(Relation::Iuoe) != status(Relation::If) {
        violations.push("iuoe and if disagree".to_string());
    }
    if status(Relation::Ioco) == Some(Status::Holds) && status(Relation::Uioco) != Some(Status::Holds) {
        violations.push("ioco holds but uioco does not".to_string());
    }
    Ok(AllReport {
        results,
        consistent: violations.is_empty(),
        violations,
    })
}
