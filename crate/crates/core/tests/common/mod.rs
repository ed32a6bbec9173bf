//! Invariant suites over random theories and programs, shared by the
//! acceptance target and the regular integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use apo_core::action::ActionTheory;
use apo_core::fuzz::{random_program, seeded_theories};
use apo_core::nhplp::{least_model, reduct, satisfies_program, Atom, NpProgram, PInterpretation, Strategy};
use apo_core::policy::analyze;
use apo_core::pomdp::{belief_update, initial_belief, successors};
use apo_core::rational::{ratio, Rat};
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::SeedableRng;

pub const TIGER: &str = include_str!("../../../../fixtures/tiger.apo");

pub struct Suite {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

pub fn theories(seed: u64, count: usize) -> Vec<ActionTheory> {
    seeded_theories(seed, count)
}

/// Transition and observation rows of every executable action sum to 1,
/// and every successor state is complete and consistent.
pub fn transition_rows(theories: &[ActionTheory]) -> (Suite, Suite) {
    let mut rows = Suite::new("transition rows sum to 1");
    let mut phi = Suite::new("successor states complete and consistent");
    for t in theories {
        for s in t.all_states() {
            for a in t.actions.iter().filter(|a| a.executable_in(&s)) {
                let succ = successors(&s, a).unwrap();
                let total: Rat = succ.iter().map(|x| x.prob.clone()).sum();
                rows.record(total.is_one(), || format!("{} in {s}: {total}\n{}", a.name, t.to_text()));
                for x in &succ {
                    let ok = x.state.is_complete(&t.fluents) && x.state.len() == t.fluents.len();
                    phi.record(ok, || format!("{} in {s} gives {}", x.outcome, x.state));
                }
            }
        }
    }
    (rows, phi)
}

/// Beliefs stay normalized along every action sequence of length `depth`.
pub fn belief_updates(theories: &[ActionTheory], depth: usize) -> Suite {
    let mut suite = Suite::new("belief updates normalized");
    for t in theories {
        let mut layer = vec![initial_belief(t).unwrap()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for b in &layer {
                for a in &t.actions {
                    if !b.keys().all(|s| a.executable_in(s)) {
                        continue;
                    }
                    let b2 = belief_update(b, a).unwrap();
                    let total: Rat = b2.values().cloned().sum();
                    let ok = total.is_one() && b2.values().all(|p| *p > Rat::zero());
                    suite.record(ok, || format!("{} gives mass {total}", a.name));
                    next.push(b2);
                }
            }
            layer = next;
        }
    }
    suite
}

/// Every answer set of the compiled program names exactly one sub-outcome
/// per step and never holds a literal together with its complement.
pub fn answer_set_shape(theories: &[ActionTheory]) -> (Suite, Suite) {
    let mut occ = Suite::new("one occ per step");
    let mut holds = Suite::new("no complementary holds");
    for (i, t) in theories.iter().enumerate() {
        let n = 1 + i % 2;
        let a = analyze(t, n, Strategy::Max).unwrap();
        for r in &a.reports {
            let ok = (0..n).all(|step| r.occ.iter().filter(|(_, s)| *s == step).count() == 1)
                && r.occ.iter().all(|(_, s)| *s < n);
            occ.record(ok, || format!("occ {:?} at horizon {n}\n{}", r.occ, t.to_text()));
            for (step, lits) in r.holds.iter().enumerate() {
                let ok = lits.iter().all(|l| !lits.contains(&l.complement()));
                holds.record(ok, || format!("step {step}: {lits:?}"));
            }
        }
    }
    (occ, holds)
}

fn atoms_of(p: &NpProgram) -> Vec<Atom> {
    let mut set = BTreeSet::new();
    for r in &p.rules {
        set.insert(r.head.clone());
        set.extend(r.pos.iter().chain(&r.neg).map(|(a, _)| a.clone()));
    }
    set.into_iter().collect()
}

/// Every interpretation over `atoms` with values in quarters.
fn quarter_grid(atoms: &[Atom]) -> Vec<PInterpretation> {
    let mut out = vec![PInterpretation::new()];
    for a in atoms {
        out = out
            .into_iter()
            .flat_map(|h| {
                (0..=4).map(move |k| {
                    let mut h = h.clone();
                    if k > 0 {
                        h.insert(a.clone(), ratio(k, 4));
                    }
                    h
                })
            })
            .collect();
    }
    out
}

/// The reduct leaves negation-free programs unchanged and is idempotent on
/// programs with negation.
pub fn reduct_idempotence(seed: u64, count: usize) -> Suite {
    let mut suite = Suite::new("reduct idempotence");
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..count {
        let p = random_program(&mut rng, 6, i % 2 == 1);
        let atoms = atoms_of(&p);
        let h: PInterpretation = atoms.iter().enumerate().map(|(k, a)| (a.clone(), ratio(k as i64 % 4 + 1, 4))).collect();
        let once = reduct(&p, &h);
        let ok = reduct(&once, &h) == once && (i % 2 == 1 || once == p);
        suite.record(ok, || p.to_text());
    }
    suite
}

/// The least model of a negation-free program is a model and lies below
/// every model on the quarter lattice.
pub fn least_model_minimality(seed: u64, count: usize) -> Suite {
    let mut suite = Suite::new("least model minimality");
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..count {
        let p = random_program(&mut rng, 6, false);
        let lm = least_model(&p).unwrap();
        let mut ok = satisfies_program(&lm, &p).unwrap();
        for h in quarter_grid(&atoms_of(&p)) {
            if ok && satisfies_program(&h, &p).unwrap() {
                ok = lm.iter().all(|(a, v)| h.get(a).is_some_and(|w| v <= w));
            }
        }
        suite.record(ok, || p.to_text());
    }
    suite
}
