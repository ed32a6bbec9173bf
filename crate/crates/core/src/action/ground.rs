use std::collections::BTreeMap;

use super::{outcome_id, ActionDecl, ActionTheory, ConjFormula, Name, Outcome};
use crate::error::{Error, Result};

type Binding = BTreeMap<String, String>;

/// Every binding of `vars` over their declared domains, in declaration order.
fn bindings(vars: &[String], domains: &BTreeMap<String, Vec<String>>) -> Result<Vec<Binding>> {
    let mut acc = vec![Binding::new()];
    for v in vars {
        let consts = domains.get(v).ok_or_else(|| Error::NoDomain(v.clone()))?;
        let mut next = Vec::with_capacity(acc.len() * consts.len());
        for b in &acc {
            for c in consts {
                let mut b = b.clone();
                b.insert(v.clone(), c.clone());
                next.push(b);
            }
        }
        acc = next;
    }
    Ok(acc)
}

fn push_unique(vars: &mut Vec<String>, name: &Name) {
    for v in name.variables() {
        if !vars.iter().any(|x| x == v) {
            vars.push(v.to_string());
        }
    }
}

fn formula_vars(vars: &mut Vec<String>, f: &ConjFormula) {
    for l in f.iter() {
        push_unique(vars, &l.fluent);
    }
}

/// Substitutes every variable by every constant of its domain. Variables of
/// an action name produce one ground action per constant; variables that
/// occur only in an outcome expand that outcome within its action.
pub fn ground_theory(theory: &ActionTheory) -> Result<ActionTheory> {
    let mut fluents = Vec::new();
    for f in &theory.fluents {
        let mut vars = Vec::new();
        push_unique(&mut vars, f);
        for b in bindings(&vars, &theory.domains)? {
            let g = f.substitute(&b);
            if !fluents.contains(&g) {
                fluents.push(g);
            }
        }
    }
    let mut actions = Vec::new();
    for a in &theory.actions {
        let mut action_vars = Vec::new();
        push_unique(&mut action_vars, &a.name);
        let mut exec_vars = Vec::new();
        formula_vars(&mut exec_vars, &a.executability);
        if let Some(v) = exec_vars.iter().find(|v| !action_vars.contains(v)) {
            return Err(Error::InvalidTheory(format!(
                "variable {v} in the executability of {} does not occur in the action name",
                a.name
            )));
        }
        for b in bindings(&action_vars, &theory.domains)? {
            let name = a.name.substitute(&b);
            let mut outcomes = Vec::new();
            for o in &a.outcomes {
                let mut extra = Vec::new();
                formula_vars(&mut extra, &o.effect);
                formula_vars(&mut extra, &o.condition);
                extra.retain(|v| !action_vars.contains(v));
                for inner in bindings(&extra, &theory.domains)? {
                    let mut full = b.clone();
                    full.extend(inner);
                    outcomes.push(Outcome {
                        id: outcome_id(&name, outcomes.len() + 1),
                        effect: o.effect.substitute(&full),
                        prob: o.prob.clone(),
                        reward: o.reward.clone(),
                        condition: o.condition.substitute(&full),
                    });
                }
            }
            actions.push(ActionDecl {
                name,
                kind: a.kind,
                outcomes,
                executability: a.executability.substitute(&b),
            });
        }
    }
    Ok(ActionTheory {
        fluents,
        domains: theory.domains.clone(),
        initial: theory.initial.clone(),
        actions,
        discount: theory.discount.clone(),
        goal: theory.goal.clone(),
    })
}
