//! Action theories: fluents, the initial belief, executability, and the
//! `causes` / `observes` propositions with their probabilistic outcomes.

mod ground;
mod parse;
mod print;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::rational::Rat;

pub use ground::ground_theory;
pub use parse::parse_theory;
pub use validate::{validate_theory, Violation};

/// A fluent, action or sub-outcome name with optional arguments.
/// Arguments starting with an upper-case letter are variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    pub head: String,
    pub args: Vec<String>,
}

impl Name {
    pub fn atom(head: &str) -> Self {
        Name { head: head.to_string(), args: Vec::new() }
    }

    pub fn new(head: &str, args: &[&str]) -> Self {
        Name { head: head.to_string(), args: args.iter().map(|a| a.to_string()).collect() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|a| !is_variable(a))
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().map(String::as_str).filter(|a| is_variable(a))
    }

    pub fn substitute(&self, binding: &BTreeMap<String, String>) -> Name {
        Name {
            head: self.head.clone(),
            args: self
                .args
                .iter()
                .map(|a| binding.get(a).cloned().unwrap_or_else(|| a.clone()))
                .collect(),
        }
    }
}

pub fn is_variable(arg: &str) -> bool {
    arg.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.head)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    Pos,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub fluent: Name,
    pub sign: Sign,
}

impl Literal {
    pub fn pos(fluent: Name) -> Self {
        Literal { fluent, sign: Sign::Pos }
    }

    pub fn neg(fluent: Name) -> Self {
        Literal { fluent, sign: Sign::Neg }
    }

    pub fn complement(&self) -> Literal {
        let sign = match self.sign {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        };
        Literal { fluent: self.fluent.clone(), sign }
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Pos
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Neg {
            f.write_str("-")?;
        }
        write!(f, "{}", self.fluent)
    }
}

impl Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A consistent conjunction of literals; the empty set is `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConjFormula(BTreeSet<Literal>);

impl ConjFormula {
    pub fn empty() -> Self {
        ConjFormula(BTreeSet::new())
    }

    /// Builds a formula, returning the offending literal on a complementary pair.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, Literal> {
        let mut set = BTreeSet::new();
        for lit in literals {
            if set.contains(&lit.complement()) {
                return Err(lit);
            }
            set.insert(lit);
        }
        Ok(ConjFormula(set))
    }

    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.0.contains(lit)
    }

    pub fn is_subset(&self, other: &ConjFormula) -> bool {
        self.0.is_subset(&other.0)
    }

    /// True when the two formulas contain a complementary pair.
    pub fn conflicts_with(&self, other: &ConjFormula) -> bool {
        self.0.iter().any(|l| other.0.contains(&l.complement()))
    }

    pub fn fluents(&self) -> BTreeSet<Name> {
        self.0.iter().map(|l| l.fluent.clone()).collect()
    }

    /// Asserts `effect`, replacing complements; the inertia clause of the
    /// transition function.
    pub fn apply(&self, effect: &ConjFormula) -> ConjFormula {
        let mut set = self.0.clone();
        for lit in effect.iter() {
            set.remove(&lit.complement());
            set.insert(lit.clone());
        }
        ConjFormula(set)
    }

    pub fn insert_consistent(&mut self, lit: Literal) -> bool {
        if self.0.contains(&lit.complement()) {
            return false;
        }
        self.0.insert(lit);
        true
    }

    pub fn is_complete(&self, fluents: &[Name]) -> bool {
        fluents.iter().all(|f| {
            self.0.contains(&Literal::pos(f.clone())) || self.0.contains(&Literal::neg(f.clone()))
        })
    }

    pub fn substitute(&self, binding: &BTreeMap<String, String>) -> ConjFormula {
        ConjFormula(
            self.0
                .iter()
                .map(|l| Literal { fluent: l.fluent.substitute(binding), sign: l.sign })
                .collect(),
        )
    }
}

impl fmt::Display for ConjFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, lit) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{lit}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for ConjFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

/// A complete, consistent literal set.
pub type State = ConjFormula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    NonSensing,
    Sensing,
}

/// One sub-outcome `a_i` of an action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub id: Name,
    pub effect: ConjFormula,
    pub prob: Rat,
    pub reward: Rat,
    pub condition: ConjFormula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: Name,
    pub kind: ActionKind,
    pub outcomes: Vec<Outcome>,
    pub executability: ConjFormula,
}

impl ActionDecl {
    pub fn is_sensing(&self) -> bool {
        self.kind == ActionKind::Sensing
    }

    pub fn executable_in(&self, state: &State) -> bool {
        self.executability.is_subset(state)
    }
}

/// Sub-outcome ids are the action head suffixed with the 1-based index,
/// followed by the action's arguments: `open_1(left)`.
pub fn outcome_id(action: &Name, index: usize) -> Name {
    Name { head: format!("{}_{}", action.head, index), args: action.args.clone() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTheory {
    pub fluents: Vec<Name>,
    pub domains: BTreeMap<String, Vec<String>>,
    pub initial: Vec<(ConjFormula, Rat)>,
    pub actions: Vec<ActionDecl>,
    pub discount: Rat,
    pub goal: Option<ConjFormula>,
}

impl ActionTheory {
    pub fn action(&self, name: &Name) -> Option<&ActionDecl> {
        self.actions.iter().find(|a| &a.name == name)
    }

    /// Looks up a sub-outcome by id, returning its action too.
    pub fn outcome(&self, id: &Name) -> Option<(&ActionDecl, &Outcome)> {
        self.actions
            .iter()
            .flat_map(|a| a.outcomes.iter().map(move |o| (a, o)))
            .find(|(_, o)| &o.id == id)
    }

    pub fn outcome_count(&self) -> usize {
        self.actions.iter().map(|a| a.outcomes.len()).sum()
    }

    /// Fluents occurring in the effect of some `observes` outcome.
    pub fn report_fluents(&self) -> BTreeSet<Name> {
        self.sensing_outcomes().flat_map(|o| o.effect.fluents()).collect()
    }

    /// Fluents occurring in the sensing condition of some `observes` outcome.
    pub fn reading_fluents(&self) -> BTreeSet<Name> {
        self.sensing_outcomes().flat_map(|o| o.condition.fluents()).collect()
    }

    fn sensing_outcomes(&self) -> impl Iterator<Item = &Outcome> {
        self.actions.iter().filter(|a| a.is_sensing()).flat_map(|a| a.outcomes.iter())
    }

    /// Closes an initial formula under sensing correlations: whenever a sensing
    /// condition is contained in the formula, the report of the most probable
    /// outcome sharing that condition is added. Ties go to the first outcome in
    /// declaration order. Fluents the formula already mentions are left alone.
    /// Iterates to a fixpoint.
    pub fn close_initial(&self, formula: &ConjFormula) -> ConjFormula {
        let mut closed = formula.clone();
        loop {
            let mut changed = false;
            for action in self.actions.iter().filter(|a| a.is_sensing()) {
                let mut best: BTreeMap<&ConjFormula, &Outcome> = BTreeMap::new();
                for o in &action.outcomes {
                    match best.get(&o.condition) {
                        Some(b) if b.prob >= o.prob => {}
                        _ => {
                            best.insert(&o.condition, o);
                        }
                    }
                }
                for (cond, o) in best {
                    if !cond.is_subset(&closed) {
                        continue;
                    }
                    for lit in o.effect.iter() {
                        if !closed.contains(lit) && closed.insert_consistent(lit.clone()) {
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return closed;
            }
        }
    }

    /// All complete states over the declared fluents.
    pub fn all_states(&self) -> Vec<State> {
        let mut states = vec![ConjFormula::empty()];
        for f in &self.fluents {
            let mut next = Vec::with_capacity(states.len() * 2);
            for s in &states {
                for lit in [Literal::pos(f.clone()), Literal::neg(f.clone())] {
                    let mut t = s.clone();
                    t.insert_consistent(lit);
                    next.push(t);
                }
            }
            states = next;
        }
        states.sort();
        states
    }

    /// Renders the theory in the concrete syntax accepted by [`parse_theory`].
    pub fn to_text(&self) -> String {
        print::print_theory(self)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    pub const TIGER: &str = include_str!("../../../../fixtures/tiger.apo");
}
