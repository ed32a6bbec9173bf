use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::{Annotation, Atom, Binding, NpProgram, NpRule, Term};
use crate::error::{Error, Result};

/// Variables that positive body literals bind at solving time: plain
/// variable arguments of body atoms and annotation variables.
fn matchable_vars(rule: &NpRule) -> BTreeSet<String> {
    fn plain(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Func(_, args) => args.iter().for_each(|a| plain(a, out)),
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    for (a, ann) in &rule.pos {
        a.args.iter().for_each(|t| plain(t, &mut out));
        if let Annotation::Var(v) = ann {
            out.insert(v.clone());
        }
    }
    out
}

fn first_occurrence_vars(rule: &NpRule) -> Vec<String> {
    let mut order = Vec::new();
    let mut push = |set: BTreeSet<String>| {
        for v in set {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    };
    let mut s = BTreeSet::new();
    rule.head.vars(&mut s);
    push(s);
    for (a, _) in rule.pos.iter().chain(&rule.neg) {
        let mut s = BTreeSet::new();
        a.vars(&mut s);
        push(s);
    }
    for g in &rule.guards {
        let mut s = BTreeSet::new();
        g.left.vars(&mut s);
        g.right.vars(&mut s);
        push(s);
    }
    order
}

fn instantiate(rule: &NpRule, b: &Binding) -> Option<NpRule> {
    let mut guards = Vec::new();
    for g in &rule.guards {
        match g.eval(b) {
            Some(true) => {}
            Some(false) => return None,
            None => guards.push(super::Guard {
                op: g.op,
                left: g.left.substitute(b),
                right: g.right.substitute(b),
            }),
        }
    }
    let lits = |v: &[(Atom, Annotation)]| v.iter().map(|(a, ann)| (a.substitute(b), ann.clone())).collect();
    Some(NpRule {
        head: rule.head.substitute(b),
        head_ann: rule.head_ann.clone(),
        pos: lits(&rule.pos),
        neg: lits(&rule.neg),
        guards,
        origin: rule.origin,
    })
}

/// Substitutes every sorted variable by every constant of its sort and
/// folds arithmetic. Variables without a sort must be bound by a positive
/// body literal; they are left for the solver. Instances of non-ground
/// rules whose body needs a false domain atom are dropped, as are instances
/// whose guards fail.
pub fn ground_program(p: &NpProgram, domains: &BTreeMap<String, Vec<Term>>) -> Result<NpProgram> {
    let mut instances: Vec<(NpRule, bool)> = Vec::new();
    for rule in &p.rules {
        let vars = first_occurrence_vars(rule);
        let matchable = matchable_vars(rule);
        let mut ann_vars = BTreeSet::new();
        rule.head_ann.vars(&mut ann_vars);
        for v in vars.iter().chain(ann_vars.iter()) {
            if !domains.contains_key(v) && !matchable.contains(v) {
                return Err(Error::UnboundedSort(v.clone()));
            }
        }
        let sorted: Vec<&String> = vars.iter().filter(|v| domains.contains_key(*v)).collect();
        let mut bindings = vec![Binding::new()];
        for v in &sorted {
            let consts = &domains[*v];
            let mut next = Vec::with_capacity(bindings.len() * consts.len());
            for b in &bindings {
                for c in consts {
                    let mut b = b.clone();
                    b.insert((*v).clone(), c.clone());
                    next.push(b);
                }
            }
            bindings = next;
        }
        let from_template = !sorted.is_empty();
        for b in &bindings {
            if let Some(r) = instantiate(rule, b) {
                instances.push((r, from_template));
            }
        }
    }
    let (domain_preds, model) = domain_model(&instances);
    let rules = instances
        .into_iter()
        .filter(|(r, from_template)| {
            !from_template
                || r.pos.iter().all(|(a, ann)| {
                    let needs_truth = matches!(ann, Annotation::Const(c) if !c.is_zero());
                    !(needs_truth && a.is_ground() && domain_preds.contains(&a.pred) && !model.contains(a))
                })
        })
        .map(|(r, _)| r)
        .collect();
    Ok(NpProgram { rules, strategies: p.strategies.clone(), default_strategy: p.default_strategy })
}

/// Predicates defined only by ground, negation-free rules over other such
/// predicates, and the atoms derivable for them.
fn domain_model(instances: &[(NpRule, bool)]) -> (BTreeSet<String>, BTreeSet<Atom>) {
    let mut preds: BTreeSet<String> = instances.iter().map(|(r, _)| r.head.pred.clone()).collect();
    loop {
        let before = preds.len();
        for (r, _) in instances {
            if !preds.contains(&r.head.pred) {
                continue;
            }
            let ok = r.neg.is_empty()
                && r.guards.is_empty()
                && r.head.is_ground()
                && r.pos.iter().all(|(a, _)| a.is_ground() && preds.contains(&a.pred));
            if !ok {
                preds.remove(&r.head.pred);
            }
        }
        if preds.len() == before {
            break;
        }
    }
    let rules: Vec<&NpRule> = instances.iter().map(|(r, _)| r).filter(|r| preds.contains(&r.head.pred)).collect();
    let mut model = BTreeSet::new();
    loop {
        let mut changed = false;
        for r in &rules {
            if !model.contains(&r.head) && r.pos.iter().all(|(a, _)| model.contains(a)) {
                model.insert(r.head.clone());
                changed = true;
            }
        }
        if !changed {
            return (preds, model);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nhplp::{Guard, GuardOp};

    fn time_domain(n: i64) -> BTreeMap<String, Vec<Term>> {
        BTreeMap::from([("T".to_string(), (0..n).map(Term::int).collect())])
    }

    #[test]
    fn time_variable_gives_one_instance_per_step() {
        let rule = NpRule::fact(Atom::new("tick", vec![Term::var("T")]), Annotation::one());
        let g = ground_program(&NpProgram::new(vec![rule]), &time_domain(2)).unwrap();
        assert_eq!(g.rules.len(), 2);
        assert_eq!(g.rules[1].head.to_string(), "tick(1)");
        assert_eq!(ground_program(&g, &time_domain(2)).unwrap(), g);
    }

    #[test]
    fn unsorted_head_variable_is_rejected() {
        let rule = NpRule::fact(Atom::new("p", vec![Term::var("X")]), Annotation::one());
        assert_eq!(ground_program(&NpProgram::new(vec![rule]), &BTreeMap::new()), Err(Error::UnboundedSort("X".into())));
    }

    #[test]
    fn matched_variables_are_kept() {
        let v = Term::var("V");
        let rule = NpRule {
            pos: vec![(Atom::new("value", vec![v.clone(), Term::var("T")]), Annotation::one())],
            ..NpRule::fact(
                Atom::new("value", vec![Term::sum(v, Term::int(1)), Term::sum(Term::var("T"), Term::int(1))]),
                Annotation::one(),
            )
        };
        let g = ground_program(&NpProgram::new(vec![rule]), &time_domain(2)).unwrap();
        assert_eq!(g.rules[0].head.to_string(), "value(V+1,1)");
        assert_eq!(g.rules[1].head.to_string(), "value(V+1,2)");
    }

    #[test]
    fn guards_and_domain_atoms_filter_instances() {
        let x = Term::var("X");
        let y = Term::var("Y");
        let domains = BTreeMap::from([
            ("X".to_string(), vec![Term::sym("a"), Term::sym("b"), Term::sym("c")]),
            ("Y".to_string(), vec![Term::sym("a"), Term::sym("b"), Term::sym("c")]),
        ]);
        let p = NpProgram::new(vec![
            NpRule::fact(Atom::new("item", vec![Term::sym("a")]), Annotation::one()),
            NpRule::fact(Atom::new("item", vec![Term::sym("b")]), Annotation::one()),
            NpRule {
                pos: vec![
                    (Atom::new("item", vec![x.clone()]), Annotation::one()),
                    (Atom::new("item", vec![y.clone()]), Annotation::one()),
                ],
                guards: vec![Guard { op: GuardOp::Neq, left: x.clone(), right: y.clone() }],
                ..NpRule::fact(Atom::new("pair", vec![x, y]), Annotation::one())
            },
        ]);
        let g = ground_program(&p, &domains).unwrap();
        let pairs: Vec<String> = g.rules.iter().filter(|r| r.head.pred == "pair").map(|r| r.head.to_string()).collect();
        assert_eq!(pairs, ["pair(a,b)", "pair(b,a)"]);
        assert!(g.rules.iter().all(|r| r.guards.is_empty()));
        assert_eq!(ground_program(&g, &domains).unwrap(), g);
    }
}
