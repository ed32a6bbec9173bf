//! Brute-force POMDP semantics of an action theory: the transition function,
//! trajectories, the trajectory-sum value, the recursive value, beliefs and
//! exhaustive policy search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serialize;

use crate::action::{ActionDecl, ActionTheory, Name, Outcome, State};
use crate::error::{Error, Result};
use crate::rational::{close_to, render, to_f64, Rat};

/// One complete state per initial-belief entry, after sensing closure.
pub fn initial_states(theory: &ActionTheory) -> Result<Vec<(State, Rat)>> {
    let mut out = Vec::new();
    for (formula, p) in &theory.initial {
        let closed = theory.close_initial(formula);
        if !closed.is_complete(&theory.fluents) {
            return Err(Error::IncompleteState(closed.to_string()));
        }
        if closed.len() != theory.fluents.len() {
            return Err(Error::InconsistentState(closed.to_string()));
        }
        out.push((closed, p.clone()));
    }
    Ok(out)
}

pub fn initial_belief(theory: &ActionTheory) -> Result<Belief> {
    let mut b = Belief::new();
    for (s, p) in initial_states(theory)? {
        *b.entry(s).or_insert_with(Rat::zero) += p;
    }
    Ok(b)
}

/// The state reached when sub-outcome `o` happens in `s`.
pub fn transition(o: &Outcome, s: &State) -> Result<State> {
    if !o.condition.is_subset(s) {
        return Err(Error::ConditionFails { outcome: o.id.to_string(), state: s.to_string() });
    }
    Ok(s.apply(&o.effect))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Successor {
    pub outcome: Name,
    pub state: State,
    pub prob: Rat,
    pub reward: Rat,
}

/// One entry per sub-outcome of `action` whose condition holds in `s`.
pub fn successors(s: &State, action: &ActionDecl) -> Result<Vec<Successor>> {
    if !action.executable_in(s) {
        return Err(Error::NotExecutable { action: action.name.to_string(), state: s.to_string() });
    }
    let mut out = Vec::new();
    for o in &action.outcomes {
        if o.condition.is_subset(s) {
            out.push(Successor {
                outcome: o.id.clone(),
                state: transition(o, s)?,
                prob: o.prob.clone(),
                reward: o.reward.clone(),
            });
        }
    }
    Ok(out)
}

/// A finite-horizon policy.
///
/// `Plan` assigns one action per decision step and applies it in every state
/// of that step's belief support. `Stationary` maps each state to an action
/// regardless of time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Policy {
    Plan(Vec<Name>),
    Stationary(BTreeMap<State, Name>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyClass {
    Plan,
    Stationary,
}

impl Policy {
    pub fn action_at(&self, step: usize, state: &State) -> Option<&Name> {
        match self {
            Policy::Plan(steps) => steps.get(step),
            Policy::Stationary(map) => map.get(state),
        }
    }

    pub fn class(&self) -> PolicyClass {
        match self {
            Policy::Plan(_) => PolicyClass::Plan,
            Policy::Stationary(_) => PolicyClass::Stationary,
        }
    }

    /// Applies the same action everywhere, as a plan of length `n`.
    pub fn uniform(action: &str, n: usize) -> Policy {
        Policy::Plan(vec![Name::atom(action); n])
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Plan(steps) => {
                let names: Vec<String> = steps.iter().map(|n| n.to_string()).collect();
                write!(f, "[{}]", names.join(", "))
            }
            Policy::Stationary(map) => {
                let parts: Vec<String> = map.iter().map(|(s, a)| format!("{s}->{a}")).collect();
                write!(f, "{{{}}}", parts.join("; "))
            }
        }
    }
}

impl Serialize for Policy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            state: &'a State,
            action: String,
        }
        let mut m = s.serialize_map(Some(2))?;
        match self {
            Policy::Plan(steps) => {
                m.serialize_entry("class", "plan")?;
                let names: Vec<String> = steps.iter().map(|n| n.to_string()).collect();
                m.serialize_entry("steps", &names)?;
            }
            Policy::Stationary(map) => {
                m.serialize_entry("class", "stationary")?;
                let entries: Vec<Entry> =
                    map.iter().map(|(state, a)| Entry { state, action: a.to_string() }).collect();
                m.serialize_entry("assignment", &entries)?;
            }
        }
        m.end()
    }
}

/// `s_0 a_{j_0} s_1 ... a_{j_{n-1}} s_n` with per-step probabilities and rewards.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub outcomes: Vec<Name>,
    pub probs: Vec<Rat>,
    pub rewards: Vec<Rat>,
}

impl Trajectory {
    pub fn start(s0: State) -> Self {
        Trajectory { states: vec![s0], outcomes: Vec::new(), probs: Vec::new(), rewards: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn last_state(&self) -> &State {
        self.states.last().expect("trajectory has an initial state")
    }

    fn extended(&self, succ: &Successor) -> Trajectory {
        let mut t = self.clone();
        t.states.push(succ.state.clone());
        t.outcomes.push(succ.outcome.clone());
        t.probs.push(succ.prob.clone());
        t.rewards.push(succ.reward.clone());
        t
    }

    /// `Σ_t λ^t (Π_{i≤t} p_i) r_t`, the summand of the trajectory-sum value.
    pub fn discounted_return(&self, discount: &Rat) -> Rat {
        let mut total = Rat::zero();
        let mut prefix = Rat::one();
        let mut factor = Rat::one();
        for (p, r) in self.probs.iter().zip(&self.rewards) {
            prefix *= p;
            total += &factor * &prefix * r;
            factor *= discount;
        }
        total
    }

    /// Checks length consistency, positive probabilities and that every step
    /// is a transition of the theory.
    pub fn check(&self, theory: &ActionTheory) -> std::result::Result<(), String> {
        let n = self.outcomes.len();
        if self.states.len() != n + 1 || self.probs.len() != n || self.rewards.len() != n {
            return Err("length mismatch".into());
        }
        for i in 0..n {
            let (_, o) = theory
                .outcome(&self.outcomes[i])
                .ok_or_else(|| format!("unknown sub-outcome {}", self.outcomes[i]))?;
            if self.probs[i] <= Rat::zero() {
                return Err(format!("non-positive probability at step {i}"));
            }
            let next = transition(o, &self.states[i]).map_err(|e| e.to_string())?;
            if next != self.states[i + 1] {
                return Err(format!("step {i} does not follow the transition function"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.states[0])?;
        for (o, s) in self.outcomes.iter().zip(&self.states[1..]) {
            write!(f, " {o} {s}")?;
        }
        Ok(())
    }
}

impl Serialize for Trajectory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Steps<'a>(&'a Trajectory);
        impl Serialize for Steps<'_> {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let t = self.0;
                let mut seq = s.serialize_seq(Some(t.states.len() + t.outcomes.len()))?;
                seq.serialize_element(&t.states[0])?;
                for (o, st) in t.outcomes.iter().zip(&t.states[1..]) {
                    seq.serialize_element(&o.to_string())?;
                    seq.serialize_element(st)?;
                }
                seq.end()
            }
        }
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("trajectory", &Steps(self))?;
        m.serialize_entry("probs", &self.probs.iter().map(to_f64).collect::<Vec<_>>())?;
        m.serialize_entry("rewards", &self.rewards.iter().map(to_f64).collect::<Vec<_>>())?;
        m.end()
    }
}

fn policy_action<'t>(
    theory: &'t ActionTheory,
    policy: &Policy,
    step: usize,
    s: &State,
) -> Result<&'t ActionDecl> {
    let name = policy.action_at(step, s).ok_or_else(|| Error::PolicyUndefined(s.to_string()))?;
    theory.action(name).ok_or_else(|| Error::PolicyUndefined(format!("{s} (unknown action {name})")))
}

/// All length-`n` trajectories from `s0` that follow `policy`.
pub fn trajectories_from(theory: &ActionTheory, policy: &Policy, n: usize, s0: &State) -> Result<Vec<Trajectory>> {
    let mut frontier = vec![Trajectory::start(s0.clone())];
    for step in 0..n {
        let mut next = Vec::new();
        for t in &frontier {
            let s = t.last_state();
            let action = policy_action(theory, policy, step, s)?;
            for succ in successors(s, action)? {
                if !succ.prob.is_zero() {
                    next.push(t.extended(&succ));
                }
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

/// All length-`n` trajectories from every initial state.
pub fn enumerate_trajectories(theory: &ActionTheory, policy: &Policy, n: usize) -> Result<Vec<Trajectory>> {
    let mut out = Vec::new();
    for (s0, _) in initial_states(theory)? {
        out.extend(trajectories_from(theory, policy, n, &s0)?);
    }
    Ok(out)
}

fn require_initial(theory: &ActionTheory, s0: &State) -> Result<()> {
    if initial_states(theory)?.iter().any(|(s, _)| s == s0) {
        Ok(())
    } else {
        Err(Error::NotInitial(s0.to_string()))
    }
}

/// The trajectory-sum value: each trajectory contributes
/// `Σ_t λ^t (Π_{i≤t} X_i) R_t`, so a shared prefix is counted once per
/// extension.
pub fn trajectory_sum_value(theory: &ActionTheory, policy: &Policy, n: usize, s0: &State) -> Result<Rat> {
    require_initial(theory, s0)?;
    Ok(trajectories_from(theory, policy, n, s0)?
        .iter()
        .map(|t| t.discounted_return(&theory.discount))
        .sum())
}

/// The recursive expectation `V_n(s) = Σ X(s,a,s') [R(s,a,s') + λ V_{n-1}(s')]`.
pub fn recursive_value(theory: &ActionTheory, policy: &Policy, n: usize, s0: &State) -> Result<Rat> {
    require_initial(theory, s0)?;
    recursive_from(theory, policy, 0, n, s0)
}

fn recursive_from(theory: &ActionTheory, policy: &Policy, step: usize, remaining: usize, s: &State) -> Result<Rat> {
    if remaining == 0 {
        return Ok(Rat::zero());
    }
    let action = policy_action(theory, policy, step, s)?;
    let mut v = Rat::zero();
    for succ in successors(s, action)? {
        let rest = recursive_from(theory, policy, step + 1, remaining - 1, &succ.state)?;
        v += &succ.prob * (&succ.reward + &theory.discount * rest);
    }
    Ok(v)
}

pub type Belief = BTreeMap<State, Rat>;

fn check_normalized(b: &Belief) -> Result<()> {
    let total: Rat = b.values().cloned().sum();
    if close_to(&total, 1.0) {
        Ok(())
    } else {
        Err(Error::UnnormalizedBelief(render(&total)))
    }
}

/// `Σ_s b(s) V(s)` with the trajectory-sum value.
pub fn belief_value(theory: &ActionTheory, policy: &Policy, n: usize, b: &Belief) -> Result<Rat> {
    check_normalized(b)?;
    let mut v = Rat::zero();
    for (s, p) in b {
        if p.is_zero() {
            continue;
        }
        let trajectories = trajectories_from(theory, policy, n, s)?;
        let value: Rat = trajectories.iter().map(|t| t.discounted_return(&theory.discount)).sum();
        v += p * value;
    }
    Ok(v)
}

/// Belief-weighted recursive value.
pub fn belief_recursive_value(theory: &ActionTheory, policy: &Policy, n: usize, b: &Belief) -> Result<Rat> {
    check_normalized(b)?;
    let mut v = Rat::zero();
    for (s, p) in b {
        if !p.is_zero() {
            v += p * recursive_from(theory, policy, 0, n, s)?;
        }
    }
    Ok(v)
}

/// `b'(s') ∝ Σ_s X(s,a,s') b(s)`, renormalized.
pub fn belief_update(b: &Belief, action: &ActionDecl) -> Result<Belief> {
    let mut next = Belief::new();
    for (s, p) in b {
        if p.is_zero() {
            continue;
        }
        for succ in successors(s, action)? {
            *next.entry(succ.state).or_insert_with(Rat::zero) += p * &succ.prob;
        }
    }
    next.retain(|_, p| !p.is_zero());
    let total: Rat = next.values().cloned().sum();
    if total.is_zero() {
        return Err(Error::ZeroMass);
    }
    for p in next.values_mut() {
        *p /= &total;
    }
    Ok(next)
}

pub fn serialize_belief(b: &Belief) -> serde_json::Value {
    serde_json::Value::Array(
        b.iter()
            .map(|(s, p)| serde_json::json!({ "state": s, "prob": to_f64(p), "prob_exact": render(p) }))
            .collect(),
    )
}

/// States in which some decision is taken within `n` steps, under any
/// sequence of executable actions.
pub fn decision_states(theory: &ActionTheory, n: usize) -> Result<BTreeSet<State>> {
    let mut seen: BTreeSet<State> = BTreeSet::new();
    let mut layer: BTreeSet<State> = initial_states(theory)?.into_iter().map(|(s, _)| s).collect();
    for step in 0..n {
        seen.extend(layer.iter().cloned());
        if step + 1 == n {
            break;
        }
        let mut next = BTreeSet::new();
        for s in &layer {
            for a in theory.actions.iter().filter(|a| a.executable_in(s)) {
                for succ in successors(s, a)? {
                    next.insert(succ.state);
                }
            }
        }
        layer = next;
    }
    Ok(seen)
}

/// Every policy of the class over horizon `n`, in ascending order.
pub fn enumerate_policies(theory: &ActionTheory, n: usize, class: PolicyClass) -> Result<Vec<Policy>> {
    let mut out = match class {
        PolicyClass::Stationary => {
            let mut maps = vec![BTreeMap::new()];
            for s in decision_states(theory, n)? {
                let choices: Vec<&Name> =
                    theory.actions.iter().filter(|a| a.executable_in(&s)).map(|a| &a.name).collect();
                let mut next = Vec::with_capacity(maps.len() * choices.len());
                for m in &maps {
                    for a in &choices {
                        let mut m: BTreeMap<State, Name> = m.clone();
                        m.insert(s.clone(), (*a).clone());
                        next.push(m);
                    }
                }
                maps = next;
            }
            maps.into_iter().map(Policy::Stationary).collect::<Vec<_>>()
        }
        PolicyClass::Plan => {
            let support: BTreeSet<State> = initial_states(theory)?.into_iter().map(|(s, _)| s).collect();
            let mut plans = Vec::new();
            extend_plans(theory, n, Vec::new(), support, &mut plans)?;
            plans.into_iter().map(Policy::Plan).collect()
        }
    };
    out.sort();
    Ok(out)
}

fn extend_plans(
    theory: &ActionTheory,
    n: usize,
    prefix: Vec<Name>,
    support: BTreeSet<State>,
    out: &mut Vec<Vec<Name>>,
) -> Result<()> {
    if prefix.len() == n {
        out.push(prefix);
        return Ok(());
    }
    for a in &theory.actions {
        if !support.iter().all(|s| a.executable_in(s)) {
            continue;
        }
        let mut next = BTreeSet::new();
        for s in &support {
            for succ in successors(s, a)? {
                if !succ.prob.is_zero() {
                    next.insert(succ.state);
                }
            }
        }
        let mut p = prefix.clone();
        p.push(a.name.clone());
        extend_plans(theory, n, p, next, out)?;
    }
    Ok(())
}

/// The plan maximizing the belief-weighted trajectory-sum value.
pub fn optimal_policy(theory: &ActionTheory, n: usize) -> Result<(Policy, Rat)> {
    optimal_policy_in(theory, n, PolicyClass::Plan)
}

/// Maximizes over a policy class. Ties go to the smallest policy in the
/// derived order.
pub fn optimal_policy_in(theory: &ActionTheory, n: usize, class: PolicyClass) -> Result<(Policy, Rat)> {
    let b = initial_belief(theory)?;
    let mut best: Option<(Policy, Rat)> = None;
    for policy in enumerate_policies(theory, n, class)? {
        let v = belief_value(theory, &policy, n, &b)?;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((policy, v));
        }
    }
    best.ok_or_else(|| Error::InvalidTheory("no executable policy".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fixtures::TIGER;
    use crate::action::{parse_theory, ConjFormula, Literal};
    use crate::rational::{int, ratio};

    fn state(lits: &[&str]) -> State {
        ConjFormula::new(lits.iter().map(|s| match s.strip_prefix('-') {
            Some(f) => Literal::neg(Name::atom(f)),
            None => Literal::pos(Name::atom(s)),
        }))
        .unwrap()
    }

    fn tiger() -> ActionTheory {
        parse_theory(TIGER).unwrap()
    }

    fn outcome<'a>(t: &'a ActionTheory, id: &str) -> &'a Outcome {
        t.outcome(&Name::atom(id)).unwrap().1
    }

    #[test]
    fn tiger_initial_states() {
        let t = tiger();
        assert_eq!(
            initial_states(&t).unwrap(),
            vec![(state(&["tl", "htl"]), ratio(1, 2)), (state(&["-tl", "-htl"]), ratio(1, 2))]
        );
    }

    #[test]
    fn incomplete_initial_state_is_an_error() {
        let t = parse_theory("fluent f.\ninitially {}:1.\naction a causes {f}:1:0 if {}.\ndiscount 0").unwrap();
        assert!(matches!(initial_states(&t), Err(Error::IncompleteState(_))));
    }

    #[test]
    fn reading_is_closed_with_the_likely_report() {
        let text = TIGER.replace("{tl, htl} : 0.5 ; {-tl, -htl} : 0.5", "{htl} : 1");
        let t = parse_theory(&text).unwrap();
        assert_eq!(initial_states(&t).unwrap(), vec![(state(&["tl", "htl"]), int(1))]);
    }

    #[test]
    fn transition_examples() {
        let t = tiger();
        let s = state(&["tl", "htl"]);
        assert_eq!(transition(outcome(&t, "openL_1"), &s).unwrap(), s);
        assert_eq!(transition(outcome(&t, "listen_2"), &s).unwrap(), state(&["-tl", "htl"]));
        assert!(transition(outcome(&t, "listen_3"), &s).is_err());
    }

    #[test]
    fn successor_examples() {
        let t = tiger();
        let s = state(&["tl", "htl"]);
        let listen = t.action(&Name::atom("listen")).unwrap();
        let succ = successors(&s, listen).unwrap();
        assert_eq!(
            succ,
            vec![
                Successor { outcome: Name::atom("listen_1"), state: s.clone(), prob: ratio(17, 20), reward: int(-1) },
                Successor {
                    outcome: Name::atom("listen_2"),
                    state: state(&["-tl", "htl"]),
                    prob: ratio(3, 20),
                    reward: int(-1)
                },
            ]
        );
        let open_l = t.action(&Name::atom("openL")).unwrap();
        let succ = successors(&s, open_l).unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!((succ[0].prob.clone(), succ[0].reward.clone()), (int(1), int(-100)));
    }

    #[test]
    fn trajectory_enumeration_counts() {
        let t = tiger();
        let listen = Policy::uniform("listen", 1);
        assert_eq!(enumerate_trajectories(&t, &listen, 1).unwrap().len(), 4);
        assert_eq!(enumerate_trajectories(&t, &Policy::Plan(vec![]), 0).unwrap().len(), 2);
        let open = enumerate_trajectories(&t, &Policy::uniform("openL", 1), 1).unwrap();
        assert_eq!(open.len(), 2);
        assert!(open.iter().all(|tr| tr.probs == vec![int(1)]));
        for tr in enumerate_trajectories(&t, &Policy::uniform("listen", 3), 3).unwrap() {
            tr.check(&t).unwrap();
        }
    }

    #[test]
    fn trajectory_sum_examples() {
        let t = tiger();
        let s0 = state(&["tl", "htl"]);
        assert_eq!(trajectory_sum_value(&t, &Policy::uniform("openL", 1), 1, &s0).unwrap(), int(-100));
        assert_eq!(trajectory_sum_value(&t, &Policy::uniform("listen", 1), 1, &s0).unwrap(), int(-1));
        assert_eq!(trajectory_sum_value(&t, &Policy::Plan(vec![]), 0, &s0).unwrap(), int(0));
        let not_initial = state(&["-tl", "htl"]);
        assert!(matches!(
            trajectory_sum_value(&t, &Policy::uniform("listen", 1), 1, &not_initial),
            Err(Error::NotInitial(_))
        ));
    }

    #[test]
    fn recursive_examples() {
        let t = tiger();
        assert_eq!(recursive_value(&t, &Policy::uniform("listen", 1), 1, &state(&["tl", "htl"])).unwrap(), int(-1));
        assert_eq!(recursive_value(&t, &Policy::uniform("listen", 0), 0, &state(&["tl", "htl"])).unwrap(), int(0));
        assert_eq!(recursive_value(&t, &Policy::uniform("openL", 1), 1, &state(&["-tl", "-htl"])).unwrap(), int(10));
    }

    #[test]
    fn values_diverge_at_horizon_two() {
        let t = tiger();
        let b = initial_belief(&t).unwrap();
        let p = Policy::uniform("listen", 2);
        assert_eq!(belief_value(&t, &p, 2, &b).unwrap(), ratio(-29, 10));
        assert_eq!(belief_recursive_value(&t, &p, 2, &b).unwrap(), ratio(-19, 10));
    }

    #[test]
    fn belief_value_examples() {
        let t = tiger();
        let b = initial_belief(&t).unwrap();
        assert_eq!(belief_value(&t, &Policy::uniform("openL", 1), 1, &b).unwrap(), int(-45));
        assert_eq!(belief_value(&t, &Policy::uniform("openR", 1), 1, &b).unwrap(), int(-45));
        assert_eq!(belief_value(&t, &Policy::uniform("listen", 1), 1, &b).unwrap(), int(-1));
        let s0 = state(&["tl", "htl"]);
        let point = Belief::from([(s0.clone(), int(1))]);
        let p = Policy::uniform("listen", 2);
        assert_eq!(belief_value(&t, &p, 2, &point).unwrap(), trajectory_sum_value(&t, &p, 2, &s0).unwrap());
        let half = Belief::from([(s0, ratio(1, 2))]);
        assert!(matches!(belief_value(&t, &p, 2, &half), Err(Error::UnnormalizedBelief(_))));
    }

    #[test]
    fn belief_update_examples() {
        let t = tiger();
        let listen = t.action(&Name::atom("listen")).unwrap();
        let b = belief_update(&initial_belief(&t).unwrap(), listen).unwrap();
        let expected = Belief::from([
            (state(&["tl", "htl"]), ratio(17, 40)),
            (state(&["-tl", "htl"]), ratio(3, 40)),
            (state(&["-tl", "-htl"]), ratio(17, 40)),
            (state(&["tl", "-htl"]), ratio(3, 40)),
        ]);
        assert_eq!(b, expected);
        let open_l = t.action(&Name::atom("openL")).unwrap();
        let point = Belief::from([(state(&["tl", "htl"]), int(1))]);
        assert_eq!(belief_update(&point, open_l).unwrap(), point);
    }

    #[test]
    fn policy_counts() {
        let t = tiger();
        assert_eq!(enumerate_policies(&t, 1, PolicyClass::Stationary).unwrap().len(), 9);
        assert_eq!(enumerate_policies(&t, 2, PolicyClass::Stationary).unwrap().len(), 81);
        assert_eq!(decision_states(&t, 2).unwrap().len(), 4);
        assert_eq!(enumerate_policies(&t, 1, PolicyClass::Plan).unwrap().len(), 3);
        assert_eq!(enumerate_policies(&t, 3, PolicyClass::Plan).unwrap().len(), 27);
        let single = parse_theory("fluent f.\ninitially {f}:1.\naction a causes {f}:1:0 if {}.\ndiscount 0").unwrap();
        assert_eq!(enumerate_policies(&single, 2, PolicyClass::Stationary).unwrap().len(), 1);
        assert_eq!(enumerate_policies(&single, 2, PolicyClass::Plan).unwrap().len(), 1);
    }

    #[test]
    fn optimal_policy_examples() {
        let t = tiger();
        assert_eq!(optimal_policy(&t, 1).unwrap(), (Policy::uniform("listen", 1), int(-1)));
        let costly = parse_theory(&TIGER.replace(": -1 sensing", ": -50 sensing")).unwrap();
        assert_eq!(optimal_policy(&costly, 1).unwrap(), (Policy::uniform("openL", 1), int(-45)));
        let single = parse_theory("fluent f.\ninitially {f}:1.\naction a causes {f}:1:0 if {}.\ndiscount 0").unwrap();
        assert_eq!(optimal_policy(&single, 2).unwrap().1, int(0));
        let (_, v) = optimal_policy_in(&t, 1, PolicyClass::Stationary).unwrap();
        assert_eq!(v, int(10));
    }

    #[test]
    fn trajectory_json_shape() {
        let t = tiger();
        let tr = &enumerate_trajectories(&t, &Policy::uniform("openL", 1), 1).unwrap()[0];
        let v = serde_json::to_value(tr).unwrap();
        assert_eq!(v["trajectory"], serde_json::json!([["htl", "tl"], "openL_1", ["htl", "tl"]]));
        assert_eq!(v["probs"], serde_json::json!([1.0]));
        assert_eq!(v["rewards"], serde_json::json!([-100.0]));
    }
}
