//! Answer sets read back as trajectories and values, grouped into policies
//! and checked against the brute-force oracle.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::Serialize;

use crate::action::{ground_theory, ActionTheory, ConjFormula, Literal, Name, State};
use crate::error::{Error, Result};
use crate::nhplp::{enumerate_answer_sets, Atom, NpProgram, PInterpretation, Strategy, Term};
use crate::pomdp::{
    belief_value, enumerate_policies, enumerate_trajectories, initial_belief, trajectory_sum_value, Policy,
    PolicyClass, Trajectory,
};
use crate::rational::{pow, render, to_f64, Rat};
use crate::translator::{all_models, compile, normalize, term_literal, term_name, to_sat};

/// What an answer set says about one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSetReport {
    pub horizon: usize,
    pub occ: Vec<(Name, usize)>,
    pub state_probs: BTreeMap<usize, Rat>,
    pub value: Option<Rat>,
    /// Literals holding at each time point `0..=horizon`.
    pub holds: Vec<BTreeSet<Literal>>,
    pub valid: bool,
}

fn time(t: &Term) -> Option<usize> {
    let q = t.as_num()?;
    if q.is_integer() {
        q.to_integer().to_usize()
    } else {
        None
    }
}

pub fn extract_report(h: &PInterpretation, horizon: usize) -> Result<AnswerSetReport> {
    let mut occ = Vec::new();
    let mut state_probs = BTreeMap::new();
    let mut values = Vec::new();
    let mut holds = vec![BTreeSet::new(); horizon + 1];
    for (atom, p) in h {
        let Atom { pred, args } = atom;
        match (pred.as_str(), args.as_slice()) {
            ("occ", [id, t]) => {
                if let (Some(id), Some(t)) = (term_name(id), time(t)) {
                    occ.push((id, t));
                }
            }
            ("state", [t]) => {
                if let Some(t) = time(t) {
                    state_probs.insert(t, p.clone());
                }
            }
            ("value", [v, t]) if time(t) == Some(horizon) => {
                if let Some(v) = v.as_num() {
                    values.push(v.clone());
                }
            }
            ("holds", [l, t]) => {
                if let (Some(l), Some(t)) = (term_literal(l), time(t)) {
                    if t <= horizon {
                        holds[t].insert(l);
                    }
                }
            }
            _ => {}
        }
    }
    if values.len() > 1 {
        return Err(Error::MultipleValues(values.len()));
    }
    occ.sort_by_key(|(id, t)| (*t, id.clone()));
    let one_per_step = occ.len() == horizon && occ.iter().enumerate().all(|(i, (_, t))| *t == i);
    let chain = (0..=horizon).all(|t| state_probs.get(&t).is_some_and(|p| *p > Rat::zero()));
    let value = values.pop();
    let valid = one_per_step && chain && value.is_some();
    Ok(AnswerSetReport { horizon, occ, state_probs, value, holds, valid })
}

/// The trajectory a valid report encodes, with probabilities and rewards
/// taken from the theory's sub-outcomes.
pub fn reconstruct_trajectory(theory: &ActionTheory, report: &AnswerSetReport) -> Result<Trajectory> {
    if !report.valid {
        return Err(Error::InvalidReport);
    }
    let mut states = Vec::with_capacity(report.holds.len());
    for (t, lits) in report.holds.iter().enumerate() {
        let s = ConjFormula::new(lits.iter().cloned()).map_err(|_| Error::BadState(t))?;
        if !s.is_complete(&theory.fluents) {
            return Err(Error::BadState(t));
        }
        states.push(s);
    }
    let mut traj = Trajectory { states, outcomes: Vec::new(), probs: Vec::new(), rewards: Vec::new() };
    for (id, _) in &report.occ {
        let (_, o) = theory.outcome(id).ok_or(Error::InvalidReport)?;
        traj.outcomes.push(id.clone());
        traj.probs.push(o.prob.clone());
        traj.rewards.push(o.reward.clone());
    }
    Ok(traj)
}

impl Serialize for AnswerSetReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(6))?;
        m.serialize_entry("horizon", &self.horizon)?;
        let occ: Vec<_> =
            self.occ.iter().map(|(id, t)| serde_json::json!({"outcome": id.to_string(), "time": t})).collect();
        m.serialize_entry("occ", &occ)?;
        let probs: BTreeMap<String, f64> = self.state_probs.iter().map(|(t, p)| (t.to_string(), to_f64(p))).collect();
        m.serialize_entry("state_probs", &probs)?;
        m.serialize_entry("value", &self.value.as_ref().map(to_f64))?;
        let holds: Vec<Vec<String>> =
            self.holds.iter().map(|ls| ls.iter().map(|l| l.to_string()).collect()).collect();
        m.serialize_entry("holds", &holds)?;
        m.serialize_entry("valid", &self.valid)?;
        m.end()
    }
}

/// A compiled program together with its answer sets, their reports and the
/// trajectories of the valid ones.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub theory: ActionTheory,
    pub horizon: usize,
    pub program: NpProgram,
    pub answer_sets: Vec<PInterpretation>,
    pub reports: Vec<AnswerSetReport>,
    pub trajectories: Vec<Option<Trajectory>>,
}

impl Analysis {
    pub fn valid(&self) -> impl Iterator<Item = (usize, &AnswerSetReport, &Trajectory)> {
        self.reports
            .iter()
            .zip(&self.trajectories)
            .enumerate()
            .filter_map(|(i, (r, t))| t.as_ref().map(|t| (i, r, t)))
    }

    fn action_of(&self, outcome: &Name) -> Option<&Name> {
        self.theory.outcome(outcome).map(|(a, _)| &a.name)
    }
}

pub fn analyze(theory: &ActionTheory, n: usize, strategy: Strategy) -> Result<Analysis> {
    let mut program = compile(theory, n)?;
    program.default_strategy = strategy;
    analyze_program(theory, n, program)
}

/// Like [`analyze`] but for an already compiled (possibly altered) program.
pub fn analyze_program(theory: &ActionTheory, n: usize, program: NpProgram) -> Result<Analysis> {
    let theory = ground_theory(theory)?;
    let answer_sets = enumerate_answer_sets(&program)?;
    let mut reports = Vec::with_capacity(answer_sets.len());
    let mut trajectories = Vec::with_capacity(answer_sets.len());
    for h in &answer_sets {
        let r = extract_report(h, n)?;
        trajectories.push(if r.valid { Some(reconstruct_trajectory(&theory, &r)?) } else { None });
        reports.push(r);
    }
    Ok(Analysis { theory, horizon: n, program, answer_sets, reports, trajectories })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyValue {
    pub policy: Policy,
    pub value: Rat,
    /// Indices into the analysis' reports.
    pub contributors: Vec<usize>,
    /// False when no valid report follows the policy.
    pub supported: bool,
}

impl Serialize for PolicyValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(5))?;
        m.serialize_entry("policy", &self.policy)?;
        m.serialize_entry("value", &to_f64(&self.value))?;
        m.serialize_entry("value_exact", &render(&self.value))?;
        m.serialize_entry("contributors", &self.contributors)?;
        m.serialize_entry("supported", &self.supported)?;
        m.end()
    }
}

fn follows(a: &Analysis, policy: &Policy, t: &Trajectory) -> bool {
    t.outcomes
        .iter()
        .enumerate()
        .all(|(step, o)| policy.action_at(step, &t.states[step]).is_some_and(|p| Some(p) == a.action_of(o)))
}

/// For each policy, the valid reports whose trajectory it generates and the
/// sum of their horizon values.
pub fn group_policies(a: &Analysis, policies: &[Policy]) -> Vec<PolicyValue> {
    policies
        .iter()
        .map(|p| {
            let mut value = Rat::zero();
            let mut contributors = Vec::new();
            for (i, r, t) in a.valid() {
                if follows(a, p, t) {
                    value += r.value.as_ref().expect("valid reports carry a value");
                    contributors.push(i);
                }
            }
            let supported = !contributors.is_empty();
            PolicyValue { policy: p.clone(), value, contributors, supported }
        })
        .collect()
}

fn argmax(values: Vec<PolicyValue>) -> Result<PolicyValue> {
    let mut best: Option<PolicyValue> = None;
    for v in values {
        if best.as_ref().is_none_or(|b| v.value > b.value) {
            best = Some(v);
        }
    }
    best.ok_or_else(|| Error::InvalidTheory("no executable policy".into()))
}

pub fn best_policy_in(theory: &ActionTheory, n: usize, class: PolicyClass, strategy: Strategy) -> Result<PolicyValue> {
    let a = analyze(theory, n, strategy)?;
    let policies = enumerate_policies(&a.theory, n, class)?;
    argmax(group_policies(&a, &policies))
}

/// The plan with the largest answer-set value; ties go to the smallest plan.
pub fn best_policy(theory: &ActionTheory, n: usize) -> Result<PolicyValue> {
    best_policy_in(theory, n, PolicyClass::Plan, Strategy::Max)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub counterexamples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub horizon: usize,
    pub answer_sets: usize,
    pub valid_answer_sets: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

const MAX_WITNESSES: usize = 5;

fn check(name: &'static str, detail: String, counterexamples: Vec<String>) -> Check {
    let mut counterexamples = counterexamples;
    counterexamples.truncate(MAX_WITNESSES);
    Check { name, passed: counterexamples.is_empty(), detail, counterexamples }
}

fn all_policies(a: &Analysis) -> Result<Vec<Policy>> {
    let mut out = enumerate_policies(&a.theory, a.horizon, PolicyClass::Plan)?;
    out.extend(enumerate_policies(&a.theory, a.horizon, PolicyClass::Stationary)?);
    Ok(out)
}

/// T1: answer-set trajectories equal the oracle's, in union over all
/// plans and per policy of either class.
pub fn trajectory_check(a: &Analysis) -> Result<Check> {
    check_trajectories(a, &all_policies(a)?)
}

/// T2: per-policy sums of horizon values equal the oracle's
/// trajectory-sum values, aggregated and per initial state, and every valid
/// report satisfies the probability and value recurrences.
pub fn value_check(a: &Analysis) -> Result<Check> {
    check_values(a, &all_policies(a)?)
}

/// T5 and T6: occ patterns survive normalization, and SAT models of
/// the completion decode one-to-one onto the normal program's answer sets.
pub fn normal_and_sat_checks(a: &Analysis) -> Result<(Check, Check)> {
    check_normal_and_sat(a)
}

fn check_trajectories(a: &Analysis, policies: &[Policy]) -> Result<Check> {
    let reconstructed: BTreeSet<&Trajectory> = a.valid().map(|(_, _, t)| t).collect();
    let mut oracle = BTreeSet::new();
    let mut witnesses = Vec::new();
    for p in policies {
        let expected: BTreeSet<Trajectory> = enumerate_trajectories(&a.theory, p, a.horizon)?.into_iter().collect();
        let got: BTreeSet<&Trajectory> = a.valid().filter(|(_, _, t)| follows(a, p, t)).map(|(_, _, t)| t).collect();
        if got != expected.iter().collect() {
            witnesses.push(format!("policy {p}: {} answer-set trajectories vs {} oracle trajectories", got.len(), expected.len()));
        }
        if p.class() == PolicyClass::Plan {
            oracle.extend(expected);
        }
    }
    for t in &oracle {
        if !reconstructed.contains(t) {
            witnesses.push(format!("oracle trajectory without answer set: {t}"));
        }
    }
    for t in &reconstructed {
        if !oracle.contains(*t) {
            witnesses.push(format!("answer-set trajectory unknown to the oracle: {t}"));
        }
    }
    let detail = format!(
        "{} reconstructed vs {} oracle trajectories over all plans; per-policy sets over {} policies",
        reconstructed.len(),
        oracle.len(),
        policies.len()
    );
    Ok(check("T1", detail, witnesses))
}

fn check_values(a: &Analysis, policies: &[Policy]) -> Result<Check> {
    let b = initial_belief(&a.theory)?;
    let mut witnesses = Vec::new();
    for (i, r, t) in a.valid() {
        let lambda = &a.theory.discount;
        let mut v = Rat::zero();
        for step in 0..t.len() {
            let before = &r.state_probs[&step];
            let after = &r.state_probs[&(step + 1)];
            if *after != before * &t.probs[step] {
                witnesses.push(format!("answer set {i}: state({}) breaks the probability chain", step + 1));
            }
            v += pow(lambda, step as u32) * after * &t.rewards[step];
        }
        if r.value.as_ref() != Some(&v) {
            witnesses.push(format!("answer set {i}: value breaks the discounted recurrence"));
        }
    }
    for pv in group_policies(a, policies) {
        let expected = belief_value(&a.theory, &pv.policy, a.horizon, &b)?;
        if pv.value != expected {
            witnesses.push(format!("policy {}: answer-set sum {} vs oracle {}", pv.policy, render(&pv.value), render(&expected)));
        }
        let mut per_start: BTreeMap<&State, Rat> = b.keys().map(|s| (s, Rat::zero())).collect();
        for &i in &pv.contributors {
            let t = a.trajectories[i].as_ref().expect("contributors are valid");
            *per_start.entry(&t.states[0]).or_insert_with(Rat::zero) += a.reports[i].value.clone().expect("valid");
        }
        for (s0, sum) in per_start {
            let expected = &b[s0] * trajectory_sum_value(&a.theory, &pv.policy, a.horizon, s0)?;
            if sum != expected {
                witnesses.push(format!("policy {} from {s0}: {} vs {}", pv.policy, render(&sum), render(&expected)));
            }
        }
    }
    let detail = format!("{} policies, aggregate and per-initial-state sums compared exactly", policies.len());
    Ok(check("T2", detail, witnesses))
}

fn occ_projection(sets: &[PInterpretation]) -> BTreeSet<Vec<String>> {
    sets.iter().map(|h| h.keys().filter(|x| x.pred == "occ").map(|x| x.to_string()).collect()).collect()
}

const MAX_SAT_MODELS: usize = 1 << 20;

fn check_normal_and_sat(a: &Analysis) -> Result<(Check, Check)> {
    let normal = normalize(&a.program)?;
    let normal_sets = enumerate_answer_sets(&normal.to_np())?;
    let (full, reduced) = (occ_projection(&a.answer_sets), occ_projection(&normal_sets));
    let mut witnesses = Vec::new();
    for o in full.symmetric_difference(&reduced) {
        witnesses.push(format!("occ pattern {{{}}} in only one program", o.join(", ")));
    }
    let t5 = check("T5", format!("{} occ patterns with probabilities, {} without", full.len(), reduced.len()), witnesses);

    let cnf = to_sat(&normal)?;
    let models = all_models(cnf.variable_count, &cnf.clauses, Some(MAX_SAT_MODELS))?;
    let decoded: BTreeSet<BTreeSet<Atom>> =
        models.iter().map(|m| cnf.decode_model(m)).collect::<Result<_>>()?;
    let expected: BTreeSet<BTreeSet<Atom>> = normal_sets.iter().map(|h| h.keys().cloned().collect()).collect();
    let mut witnesses = Vec::new();
    if decoded.len() != models.len() {
        witnesses.push(format!("{} models decode to only {} atom sets", models.len(), decoded.len()));
    }
    for s in decoded.symmetric_difference(&expected) {
        let names: Vec<String> = s.iter().filter(|x| x.pred == "occ").map(|x| x.to_string()).collect();
        witnesses.push(format!("atom set with occ {{{}}} on one side only", names.join(", ")));
    }
    let t6 = check(
        "T6",
        format!(
            "{} variables, {} clauses, {} models vs {} answer sets",
            cnf.variable_count,
            cnf.clauses.len(),
            models.len(),
            normal_sets.len()
        ),
        witnesses,
    );
    Ok((t5, t6))
}

pub fn cross_check(theory: &ActionTheory, n: usize) -> Result<CheckReport> {
    cross_check_program(theory, n, compile(theory, n)?)
}

/// Runs the four equivalence checks on `program` as the compilation of
/// `theory`; failures are reported, not raised.
pub fn cross_check_program(theory: &ActionTheory, n: usize, program: NpProgram) -> Result<CheckReport> {
    let a = analyze_program(theory, n, program)?;
    let policies = all_policies(&a)?;
    let (t5, t6) = check_normal_and_sat(&a)?;
    let checks = vec![check_trajectories(&a, &policies)?, check_values(&a, &policies)?, t5, t6];
    Ok(CheckReport {
        horizon: n,
        answer_sets: a.answer_sets.len(),
        valid_answer_sets: a.valid().count(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
