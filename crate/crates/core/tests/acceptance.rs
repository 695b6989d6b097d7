//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::fs;

use common::{automaton, corpus, labels, mutate, pair, rng, Shape};
use ia_core::game::{refute_atc, refute_atc_enumerative, refute_tb, AtcStatus, DEFAULT_BUDGET};
use ia_core::oracle::{exhaustive_depth, oracle_if, oracle_ioco, oracle_iuoe, oracle_uioco};
use ia_core::relations::{
    check_as, check_equiv_if, check_if, check_ioco, check_iuoe, check_tb, check_uioco, uioco_product,
};
use ia_core::transform::{delta_closure, determinize, determinize_iu, QuiescenceConfig};
use ia_core::Verdict;

#[derive(Default)]
struct Tally {
    cases: usize,
    violations: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

fn witness(v: &Verdict) -> Option<(Vec<String>, String)> {
    v.witness.as_ref().map(|w| (w.trace.clone(), w.action.clone()))
}

fn wit(trace: &[&str], action: &str) -> Option<(Vec<String>, String)> {
    Some((trace.iter().map(|s| s.to_string()).collect(), action.to_string()))
}

fn figure_corpus() -> Tally {
    let mut t = Tally::default();
    let cfg = QuiescenceConfig::default();
    let get = corpus;
    let (a, b, c, d) = (get("s_A"), get("s_B"), get("s_C"), get("s_D"));
    t.check(check_if(&b, &a).unwrap().fails(), || "s_B if s_A".into());
    t.check(check_if(&c, &a).unwrap().fails(), || "s_C if s_A".into());
    t.check(check_if(&d, &a).unwrap().holds(), || "s_D if s_A".into());

    let (e, f) = (get("s_E"), get("s_F"));
    t.check(check_uioco(&e, &f, &cfg).unwrap().holds(), || "s_E uioco s_F".into());
    let v = check_ioco(&e, &f, &cfg).unwrap();
    t.check(v.fails() && witness(&v) == wit(&["a", "a"], "y"), || format!("s_E ioco s_F: {}", v.to_json()));

    let (g, h) = (get("s_G"), get("s_H"));
    t.check(check_ioco(&g, &h, &cfg).unwrap().holds(), || "s_G ioco s_H".into());
    t.check(check_uioco(&g, &h, &cfg).unwrap().holds(), || "s_G uioco s_H".into());
    t.check(check_if(&g, &h).unwrap().holds(), || "s_G if s_H".into());
    t.check(check_iuoe(&g, &h).unwrap().holds(), || "s_G iuoe s_H".into());
    let atc = refute_atc(&g, &h, 4, DEFAULT_BUDGET).unwrap();
    t.check(atc.status == AtcStatus::Refuted, || "s_G atc s_H at depth 4".into());

    let (i, j) = (get("s_I"), get("s_J"));
    t.check(check_if(&i, &j).unwrap().holds(), || "s_I if s_J".into());
    t.check(check_uioco(&i, &j, &cfg).unwrap().holds(), || "s_I uioco s_J".into());
    let atc = refute_atc(&i, &j, 3, DEFAULT_BUDGET).unwrap();
    t.check(atc.status == AtcStatus::Refuted, || "s_I atc s_J".into());

    let (m, n) = (get("s_M"), get("s_N"));
    let atc = refute_atc(&m, &n, 4, DEFAULT_BUDGET).unwrap();
    t.check(atc.status == AtcStatus::HoldsExact, || format!("s_M atc s_N: {:?}", atc.status));
    t.check(check_as(&m, &n).unwrap().fails(), || "s_M as s_N".into());

    let (p, q) = (get("s_P"), get("s_Q"));
    let v = check_as(&delta_closure(&p, &cfg).unwrap(), &delta_closure(&q, &cfg).unwrap()).unwrap();
    let pairs: Vec<(String, String)> = ["q0", "q1", "q2"].iter().map(|s| (s.to_string(), s.to_string())).collect();
    t.check(
        v.holds() && v.simulation.as_ref().map(|r| &r.pairs) == Some(&pairs),
        || format!("delta(s_P) as delta(s_Q): {:?}", v.simulation),
    );
    let v = check_ioco(&p, &q, &cfg).unwrap();
    t.check(v.fails() && witness(&v) == wit(&["a", "b"], "x"), || format!("s_P ioco s_Q: {}", v.to_json()));

    let det = determinize(&a);
    let detiu = determinize_iu(&a);
    let la = a.alphabet().lookup("a").unwrap();
    let from = |s: &ia_core::InterfaceAutomaton| s.state_id("q1_q2").map(|q| s.enables(q, la));
    t.check(from(&det) == Some(true), || "det(s_A) a-edge from q1_q2".into());
    t.check(from(&detiu) == Some(false), || "det_iu(s_A) a-edge from q1_q2".into());
    t.check(check_equiv_if(&a, &detiu).unwrap().holds(), || "s_A equiv det_iu(s_A)".into());
    t.check(check_equiv_if(&a, &det).unwrap().fails(), || "s_A equiv det(s_A)".into());
    t
}

fn theorems() -> Tally {
    let mut t = Tally::default();
    let cfg = QuiescenceConfig::default();
    let mut r = rng(0x1f5);
    for n in 0..600 {
        let enabled = Shape {
            input_enabled: n % 3 == 0,
            ..Shape::default()
        };
        let (s1, s2) = pair(&mut r, enabled, Shape::default());
        let show = || format!("pair {n}:\n{}--\n{}", ia_core::format::serialize(&s1), ia_core::format::serialize(&s2));

        let vif = check_if(&s1, &s2).unwrap();
        let viuoe = check_iuoe(&s1, &s2).unwrap();
        t.check(vif.status == viuoe.status, || format!("if vs iuoe, {}", show()));

        let d1 = delta_closure(&s1, &cfg).unwrap();
        let d2 = delta_closure(&s2, &cfg).unwrap();
        let u = uioco_product(&s1, &s2, &cfg).unwrap();
        let ifd = check_if(&d1, &d2).unwrap();
        t.check(u.status == ifd.status, || format!("uioco product vs if on closures, {}", show()));
        t.check(check_uioco(&s1, &s2, &cfg).unwrap().status == u.status, || format!("uioco routes, {}", show()));

        if s1.is_input_enabled() {
            let io = check_ioco(&s1, &s2, &cfg).unwrap();
            t.check(!io.holds() || u.holds(), || format!("ioco without uioco, {}", show()));
        }

        let vas = check_as(&s1, &s2).unwrap();
        t.check(!vas.holds() || vif.holds(), || format!("as without if, {}", show()));

        let det = determinize(&s2);
        let statuses = [
            check_as(&s1, &det).unwrap().status,
            check_if(&s1, &det).unwrap().status,
            check_iuoe(&s1, &det).unwrap().status,
            check_tb(&s1, &det).unwrap().status,
        ];
        t.check(statuses.iter().all(|s| *s == statuses[0]), || {
            format!("deterministic right side {statuses:?}, {}", show())
        });

        t.check(check_equiv_if(&s1, &determinize_iu(&s1)).unwrap().holds(), || {
            format!("s equiv det_iu(s), {}", show())
        });
    }
    t
}

fn oracle_equivalence() -> Tally {
    let mut t = Tally::default();
    let cfg = QuiescenceConfig::default();
    let mut r = rng(0x0ac1e);
    let mut pairs = 0;
    while pairs < 250 {
        let left = Shape {
            input_enabled: pairs % 2 == 0,
            ..Shape::default()
        };
        let right = Shape::default();
        let (s1, s2) = pair(&mut r, left, right);
        let k = exhaustive_depth(s1.num_states(), s2.num_states());
        if k > 200 {
            continue;
        }
        pairs += 1;
        let show = || format!("\n{}--\n{}", ia_core::format::serialize(&s1), ia_core::format::serialize(&s2));
        let same = |a: &Verdict, b: &Verdict| {
            a.status == b.status
                && a.witness.as_ref().map(|w| w.trace.len()) == b.witness.as_ref().map(|w| w.trace.len())
        };
        let (x, y) = (check_if(&s1, &s2).unwrap(), oracle_if(&s1, &s2, k).unwrap());
        t.check(same(&x, &y), || format!("if: {} vs {}{}", x.to_json(), y.to_json(), show()));
        let (x, y) = (check_iuoe(&s1, &s2).unwrap(), oracle_iuoe(&s1, &s2, k).unwrap());
        t.check(same(&x, &y), || format!("iuoe: {} vs {}{}", x.to_json(), y.to_json(), show()));
        let (x, y) = (check_uioco(&s1, &s2, &cfg).unwrap(), oracle_uioco(&s1, &s2, &cfg, k).unwrap());
        t.check(same(&x, &y), || format!("uioco: {} vs {}{}", x.to_json(), y.to_json(), show()));
        if s1.is_input_enabled() {
            let (x, y) = (check_ioco(&s1, &s2, &cfg).unwrap(), oracle_ioco(&s1, &s2, &cfg, k).unwrap());
            t.check(same(&x, &y), || format!("ioco: {} vs {}{}", x.to_json(), y.to_json(), show()));
        }
    }
    t
}

fn preorder_laws() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(0x9e0);
    for n in 0..500 {
        let l = labels(&mut r);
        let s = automaton(&mut r, &l, Shape::default());
        t.check(check_if(&s, &s).unwrap().holds(), || format!("reflexivity {n}\n{}", ia_core::format::serialize(&s)));
    }
    let mut triples = 0;
    let mut attempts = 0;
    while triples < 200 && attempts < 100_000 {
        attempts += 1;
        let l = labels(&mut r);
        let top = automaton(&mut r, &l, Shape::default());
        let mid = mutate(&mut r, &top, 0.3);
        let low = mutate(&mut r, &mid, 0.3);
        if !(check_if(&low, &mid).unwrap().holds() && check_if(&mid, &top).unwrap().holds()) {
            continue;
        }
        triples += 1;
        t.check(check_if(&low, &top).unwrap().holds(), || {
            format!("transitivity\n{}", ia_core::format::serialize(&top))
        });
    }
    t.check(triples == 200, || format!("only {triples} triples satisfied the premises"));
    t
}

fn game_soundness() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(0x9a3e);
    let acyclic = Shape {
        acyclic: true,
        ..Shape::default()
    };
    for n in 0..300 {
        let (s1, s2) = pair(&mut r, acyclic, acyclic);
        let k = s1.num_states().max(s2.num_states());
        let show = || format!("pair {n}:\n{}--\n{}", ia_core::format::serialize(&s1), ia_core::format::serialize(&s2));
        let atc = refute_atc(&s1, &s2, k, DEFAULT_BUDGET).unwrap();
        let vas = check_as(&s1, &s2).unwrap();
        t.check(atc.status != AtcStatus::Inconclusive, || format!("acyclic pair not exact, {}", show()));
        t.check(atc.status != AtcStatus::Refuted || vas.fails(), || format!("atc refuted but as holds, {}", show()));
        t.check(!vas.holds() || atc.status == AtcStatus::HoldsExact, || format!("as holds but atc not exact, {}", show()));
        if atc.status == AtcStatus::HoldsExact {
            let tb = refute_tb(&s1, &s2, k, DEFAULT_BUDGET).unwrap();
            t.check(tb.status != AtcStatus::Refuted, || format!("atc holds but tb refuted, {}", show()));
            t.check(check_tb(&s1, &s2).unwrap().holds(), || format!("atc holds but tb fails, {}", show()));
        }
        let other = refute_atc_enumerative(&s1, &s2, k, DEFAULT_BUDGET).unwrap();
        t.check(other == atc.status, || {
            format!("atc {:?} vs enumeration {other:?}, {}", atc.status, show())
        });
    }
    t
}

fn cli_golden() -> Tally {
    let mut t = Tally::default();
    for (stem, runs) in common::golden_cases() {
        let path = common::golden_dir().join(format!("{stem}.txt"));
        let want = fs::read_to_string(&path).unwrap_or_default();
        t.check(common::transcript(&runs) == want, || format!("{stem} differs from its golden file"));
        for args in runs.iter().filter(|a| a[0] == "check" && a.iter().any(|x| x == "--json")) {
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let run = common::ia(&refs);
            let expected = if args[1] == "all" {
                let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap_or_default();
                if report["consistent"] == true { 0 } else { 2 }
            } else if run.stdout.is_empty() {
                2
            } else {
                let v: serde_json::Value = serde_json::from_str(&run.stdout).unwrap_or_default();
                match v["status"].as_str() {
                    Some("holds") => 0,
                    Some("fails") => 1,
                    Some("inconclusive") => 3,
                    _ => -1,
                }
            };
            t.check(run.code == expected, || format!("exit {} for {}, expected {expected}", run.code, args.join(" ")));
        }
    }
    t
}

type Criterion = (&'static str, fn() -> Tally);

fn main() {
    let criteria: [Criterion; 6] = [
        ("1 figure corpus", figure_corpus),
        ("2 theorem properties on random pairs", theorems),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 preorder laws", preorder_laws),
        ("5 game soundness on acyclic pairs", game_soundness),
        ("6 CLI golden files and exit codes", cli_golden),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = std::time::Instant::now();
        let tally = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Tally {
                cases: 1,
                violations: vec![format!("aborted: {msg}")],
            }
        });
        let secs = start.elapsed().as_secs_f64();
        if tally.violations.is_empty() {
            println!("PASS criterion {name}: {} checks ({secs:.1}s)", tally.cases);
        } else {
            failed += 1;
            println!(
                "FAIL criterion {name}: {} of {} checks violated ({secs:.1}s)",
                tally.violations.len(),
                tally.cases
            );
            for v in tally.violations.iter().take(3) {
                println!("  {}", v.replace('\n', "\n  "));
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
