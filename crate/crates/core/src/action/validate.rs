use std::collections::BTreeSet;

use num_traits::{One, Signed};
use serde::Serialize;

use super::{ground_theory, ActionDecl, ActionTheory, ConjFormula, Literal, Name, Outcome};
use crate::rational::{close_to, render, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub decl: String,
    pub rule: String,
    pub message: String,
}

impl Violation {
    fn new(decl: impl Into<String>, rule: &str, message: impl Into<String>) -> Self {
        Violation { decl: decl.into(), rule: rule.to_string(), message: message.into() }
    }
}

/// Checks the well-formedness conditions of a theory. Non-ground theories
/// are grounded first; an empty result means the theory is valid.
pub fn validate_theory(theory: &ActionTheory) -> Vec<Violation> {
    let ground;
    let t = match ground_theory(theory) {
        Ok(g) => {
            ground = g;
            &ground
        }
        Err(e) => return vec![Violation::new("theory", "grounding", e.to_string())],
    };
    let mut out = Vec::new();
    check_discount(t, &mut out);
    check_initial(t, &mut out);
    let mut seen = BTreeSet::new();
    for a in &t.actions {
        for o in &a.outcomes {
            if !seen.insert(o.id.clone()) {
                out.push(Violation::new(
                    format!("action {}", a.name),
                    "unique-outcome-id",
                    format!("sub-outcome id {} is not unique", o.id),
                ));
            }
        }
        check_action(a, &mut out);
    }
    out
}

fn check_discount(t: &ActionTheory, out: &mut Vec<Violation>) {
    if t.discount.is_negative() || t.discount >= Rat::one() {
        out.push(Violation::new("discount", "discount-range", "discount out of range [0,1)"));
    }
}

fn check_initial(t: &ActionTheory, out: &mut Vec<Violation>) {
    if t.initial.is_empty() {
        out.push(Violation::new("initially", "initial-present", "no initial belief declared"));
        return;
    }
    let sum: Rat = t.initial.iter().map(|(_, p)| p.clone()).sum();
    if !close_to(&sum, 1.0) {
        out.push(Violation::new(
            "initially",
            "initial-sum",
            format!("initial probabilities sum to {}", render(&sum)),
        ));
    }
    for (i, (fi, _)) in t.initial.iter().enumerate() {
        for (fj, _) in &t.initial[i + 1..] {
            if !fi.conflicts_with(fj) {
                out.push(Violation::new(
                    "initially",
                    "initial-exclusive",
                    format!("initial formulas {fi} and {fj} are not mutually exclusive"),
                ));
            }
        }
        let closed = t.close_initial(fi);
        let missing: Vec<String> = t
            .fluents
            .iter()
            .filter(|f| !closed.is_complete(std::slice::from_ref(f)))
            .map(|f| f.to_string())
            .collect();
        if !missing.is_empty() {
            out.push(Violation::new(
                "initially",
                "initial-complete",
                format!("initial formula {fi} closes to {closed}, which does not determine {}", missing.join(", ")),
            ));
        }
    }
}

/// Outcomes grouped by condition, in first-occurrence order.
fn condition_groups(a: &ActionDecl) -> Vec<(&ConjFormula, Vec<&Outcome>)> {
    let mut groups: Vec<(&ConjFormula, Vec<&Outcome>)> = Vec::new();
    for o in &a.outcomes {
        match groups.iter_mut().find(|(c, _)| *c == &o.condition) {
            Some((_, members)) => members.push(o),
            None => groups.push((&o.condition, vec![o])),
        }
    }
    groups
}

/// All complete assignments over `fluents` that contain `base`.
fn assignments(fluents: &BTreeSet<Name>, base: &ConjFormula) -> Vec<ConjFormula> {
    let mut acc = vec![base.clone()];
    for f in fluents {
        let mut next = Vec::new();
        for s in &acc {
            for lit in [Literal::pos(f.clone()), Literal::neg(f.clone())] {
                let mut t = s.clone();
                if t.insert_consistent(lit) {
                    next.push(t);
                }
            }
        }
        acc = next;
    }
    acc
}

fn check_action(a: &ActionDecl, out: &mut Vec<Violation>) {
    let decl = format!("action {}", a.name);
    let groups = condition_groups(a);
    for (cond, members) in &groups {
        let sum: Rat = members.iter().map(|o| o.prob.clone()).sum();
        if !close_to(&sum, 1.0) {
            out.push(Violation::new(
                decl.clone(),
                "condition-sum",
                format!("probabilities for condition {cond} sum to {}", render(&sum)),
            ));
        }
    }
    let cond_rule = if a.is_sensing() { "sensing-exclusive" } else { "condition-exclusive" };
    for (i, (ci, _)) in groups.iter().enumerate() {
        for (cj, _) in &groups[i + 1..] {
            let mut joint = a.executability.clone();
            let compatible = ci.iter().chain(cj.iter()).all(|l| joint.insert_consistent(l.clone()));
            if compatible {
                out.push(Violation::new(
                    decl.clone(),
                    cond_rule,
                    format!("conditions {ci} and {cj} are not mutually exclusive"),
                ));
            }
        }
    }
    let mentioned: BTreeSet<Name> = groups.iter().flat_map(|(c, _)| c.fluents()).collect();
    for s in assignments(&mentioned, &a.executability) {
        if !groups.iter().any(|(c, _)| c.is_subset(&s)) {
            out.push(Violation::new(
                decl.clone(),
                if a.is_sensing() { "sensing-exhaustive" } else { "condition-exhaustive" },
                format!("no condition holds in states satisfying {s}"),
            ));
            break;
        }
    }
    if a.is_sensing() {
        for (cond, members) in &groups {
            check_observations(&decl, cond, members, out);
        }
    }
}

fn check_observations(decl: &str, cond: &ConjFormula, members: &[&Outcome], out: &mut Vec<Violation>) {
    for (i, oi) in members.iter().enumerate() {
        for oj in &members[i + 1..] {
            if !oi.effect.conflicts_with(&oj.effect) {
                out.push(Violation::new(
                    decl,
                    "observation-exclusive",
                    format!("observations {} and {} under {cond} are not mutually exclusive", oi.effect, oj.effect),
                ));
            }
        }
    }
    let mentioned: BTreeSet<Name> = members.iter().flat_map(|o| o.effect.fluents()).collect();
    for s in assignments(&mentioned, &ConjFormula::empty()) {
        if !members.iter().any(|o| o.effect.is_subset(&s)) {
            out.push(Violation::new(
                decl,
                "observation-exhaustive",
                format!("observations under {cond} do not cover {s}"),
            ));
            break;
        }
    }
}
