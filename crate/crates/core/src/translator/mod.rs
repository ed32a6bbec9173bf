//! Action theory → np-program → normal program → CNF.

mod dpll;
mod normal;
mod sat;

use std::collections::{BTreeMap, BTreeSet};

use crate::action::{ground_theory, validate_theory, ActionDecl, ActionTheory, ConjFormula, Literal, Name, Outcome};
use crate::error::{Error, Result};
use crate::nhplp::{ground_program, Annotation, Atom, Guard, GuardOp, NpProgram, NpRule, Origin, Term};
use crate::pomdp::initial_states;
use crate::rational::Rat;

pub use dpll::all_models;
pub use normal::{normalize, NormalProgram, NormalRule};
pub use sat::{parse_dimacs, to_sat, CnfFormula};

/// Origins of the rules that carry probabilities or values; everything
/// else survives normalization.
pub const PROBABILISTIC_SCHEMAS: [u8; 6] = [15, 18, 21, 22, 23, 24];

pub fn name_term(n: &Name) -> Term {
    if n.args.is_empty() {
        Term::Sym(n.head.clone())
    } else {
        Term::Func(n.head.clone(), n.args.iter().map(|a| Term::Sym(a.clone())).collect())
    }
}

pub fn literal_term(l: &Literal) -> Term {
    let f = name_term(&l.fluent);
    if l.is_positive() {
        f
    } else {
        Term::func("neg", vec![f])
    }
}

/// Inverse of [`name_term`].
pub fn term_name(t: &Term) -> Option<Name> {
    match t {
        Term::Sym(s) => Some(Name::atom(s)),
        Term::Func(h, args) => {
            let args = args
                .iter()
                .map(|a| match a {
                    Term::Sym(s) => Some(s.clone()),
                    _ => None,
                })
                .collect::<Option<Vec<_>>>()?;
            Some(Name { head: h.clone(), args })
        }
        _ => None,
    }
}

/// Inverse of [`literal_term`].
pub fn term_literal(t: &Term) -> Option<Literal> {
    match t {
        Term::Func(h, args) if h == "neg" && args.len() == 1 => term_name(&args[0]).map(Literal::neg),
        _ => term_name(t).map(Literal::pos),
    }
}

fn holds(l: &Literal, t: Term) -> Atom {
    Atom::new("holds", vec![literal_term(l), t])
}

fn holds_all(f: &ConjFormula, t: &Term) -> Vec<Atom> {
    f.iter().map(|l| holds(l, t.clone())).collect()
}

fn observed_all(f: &ConjFormula, t: &Term) -> Vec<Atom> {
    f.iter().map(|l| Atom::new("observed", vec![literal_term(l), t.clone()])).collect()
}

fn now() -> Term {
    Term::var("T")
}

fn next() -> Term {
    Term::sum(Term::var("T"), Term::int(1))
}

fn plain(atoms: Vec<Atom>) -> Vec<(Atom, Annotation)> {
    atoms.into_iter().map(|a| (a, Annotation::one())).collect()
}

fn rule(schema: u8, head: Atom, pos: Vec<Atom>, neg: Vec<Atom>) -> NpRule {
    NpRule { pos: plain(pos), neg: plain(neg), ..NpRule::fact(head, Annotation::one()) }.with_origin(Origin::Schema(schema))
}

fn occ_exec(o: &Outcome) -> Vec<Atom> {
    let id = name_term(&o.id);
    vec![Atom::new("occ", vec![id.clone(), now()]), Atom::new("exec", vec![id, now()])]
}

fn state_rule(schema: u8, o: &Outcome, guard: Vec<Atom>) -> NpRule {
    let u = Annotation::Var("U".into());
    let mut pos = vec![(Atom::new("state", vec![now()]), u.clone())];
    pos.extend(plain(occ_exec(o)));
    pos.extend(plain(guard));
    NpRule {
        pos,
        ..NpRule::fact(Atom::new("state", vec![next()]), Annotation::product(Annotation::Const(o.prob.clone()), u))
    }
    .with_origin(Origin::Schema(schema))
}

fn value_rule(schema: u8, o: &Outcome, discount: &Rat, guard: Vec<Atom>) -> NpRule {
    let lambda = Term::Num(discount.clone());
    let reward = Term::Num(o.reward.clone());
    let v = Term::var("V");
    let gain = Term::product(Term::product(Term::pow(lambda.clone(), now()), Term::var("U")), reward.clone());
    let mut pos = plain(vec![Atom::new("value", vec![v.clone(), now()]), Atom::new("factor", vec![lambda])]);
    pos.push((Atom::new("state", vec![next()]), Annotation::Var("U".into())));
    pos.extend(plain(vec![Atom::new("reward", vec![reward, next()])]));
    pos.extend(plain(occ_exec(o)));
    pos.extend(plain(guard));
    NpRule { pos, ..NpRule::fact(Atom::new("value", vec![Term::sum(v, gain), next()]), Annotation::one()) }
        .with_origin(Origin::Schema(schema))
}

fn action_rules(a: &ActionDecl, discount: &Rat, out: &mut Vec<NpRule>) {
    for o in &a.outcomes {
        let id = name_term(&o.id);
        out.push(rule(16, Atom::new("exec", vec![id, now()]), holds_all(&a.executability, &now()), vec![]));
    }
    for o in &a.outcomes {
        let t1 = next();
        if a.is_sensing() {
            for l in o.condition.iter() {
                let mut body = occ_exec(o);
                body.extend(holds_all(&o.condition, &now()));
                out.push(rule(19, Atom::new("observed", vec![literal_term(l), now()]), body, vec![]));
            }
            for l in o.effect.iter() {
                let mut body = occ_exec(o);
                body.extend(observed_all(&o.condition, &now()));
                out.push(rule(20, holds(l, t1.clone()), body, vec![]));
            }
            let mut guard = observed_all(&o.condition, &now());
            guard.extend(holds_all(&o.effect, &t1));
            out.push(state_rule(21, o, guard));
        } else {
            for l in o.effect.iter() {
                let mut body = occ_exec(o);
                body.extend(holds_all(&o.condition, &now()));
                out.push(rule(17, holds(l, t1.clone()), body, vec![]));
            }
            let mut guard = holds_all(&o.condition, &now());
            guard.extend(holds_all(&o.effect, &t1));
            out.push(state_rule(18, o, guard));
        }
    }
    for o in &a.outcomes {
        out.push(rule(22, Atom::new("reward", vec![Term::Num(o.reward.clone()), next()]), occ_exec(o), vec![]));
    }
    for o in &a.outcomes {
        let mut guard;
        let schema = if a.is_sensing() {
            guard = observed_all(&o.condition, &now());
            24
        } else {
            guard = holds_all(&o.condition, &now());
            23
        };
        let t1 = next();
        guard.extend(holds_all(&o.effect, &t1));
        out.push(value_rule(schema, o, discount, guard));
    }
}

/// Rules (11)–(15): the possible initial states and their probabilities.
fn initial_rules(theory: &ActionTheory, out: &mut Vec<NpRule>) -> Result<()> {
    let states = initial_states(theory)?;
    let zero = || Term::int(0);
    let mut common: BTreeSet<Literal> = states[0].0.literals().clone();
    let mut union = BTreeSet::new();
    for (s, _) in &states {
        common = common.intersection(s.literals()).cloned().collect();
        union.extend(s.literals().iter().cloned());
    }
    let reports = theory.report_fluents();
    let readings = theory.reading_fluents();
    for l in &common {
        out.push(rule(11, holds(l, zero()), vec![], vec![]));
    }
    let open: BTreeSet<&Name> = union
        .iter()
        .filter(|l| !common.contains(*l) && !reports.contains(&l.fluent))
        .map(|l| &l.fluent)
        .collect();
    for f in theory.fluents.iter().filter(|f| open.contains(f)) {
        let (p, n) = (Literal::pos(f.clone()), Literal::neg(f.clone()));
        out.push(rule(12, holds(&p, zero()), vec![], vec![holds(&n, zero())]));
        out.push(rule(13, holds(&n, zero()), vec![], vec![holds(&p, zero())]));
    }
    let mut sense: Vec<(Vec<Literal>, Vec<Literal>)> = Vec::new();
    for (s, _) in &states {
        let delta: Vec<Literal> = s.iter().filter(|l| readings.contains(&l.fluent)).cloned().collect();
        let gamma: Vec<Literal> = s.iter().filter(|l| reports.contains(&l.fluent)).cloned().collect();
        if !gamma.is_empty() && !sense.contains(&(delta.clone(), gamma.clone())) {
            sense.push((delta, gamma));
        }
    }
    for (delta, gamma) in &sense {
        for l in gamma {
            let body = delta.iter().map(|d| holds(d, zero())).collect();
            out.push(rule(14, holds(l, zero()), body, vec![]));
        }
    }
    for (s, p) in &states {
        let pos = plain(s.iter().map(|l| holds(l, zero())).collect());
        out.push(NpRule { pos, ..NpRule::fact(Atom::new("state", vec![zero()]), Annotation::Const(p.clone())) }.with_origin(Origin::Schema(15)));
    }
    Ok(())
}

/// The rule schemas with sorted variables `T` (decision steps), `Tn` (all
/// time points), `F` (fluents), `L`/`L2` (literals) and `ACi`/`ACj`
/// (sub-actions), before grounding.
pub fn schema_program(theory: &ActionTheory, n: usize) -> Result<(NpProgram, BTreeMap<String, Vec<Term>>)> {
    let mut rules = Vec::new();
    let ids: Vec<Term> = theory.actions.iter().flat_map(|a| &a.outcomes).map(|o| name_term(&o.id)).collect();
    for id in &ids {
        rules.push(rule(6, Atom::new("action", vec![id.clone()]), vec![], vec![]));
    }
    for f in &theory.fluents {
        rules.push(NpRule::fact(Atom::new("fluent", vec![name_term(f)]), Annotation::one()).with_origin(Origin::Fluent));
    }
    let f = Term::var("F");
    let neg_f = Term::func("neg", vec![f.clone()]);
    let fluent_f = || vec![Atom::new("fluent", vec![f.clone()])];
    rules.push(rule(7, Atom::new("literal", vec![f.clone()]), fluent_f(), vec![]));
    rules.push(rule(8, Atom::new("literal", vec![neg_f.clone()]), fluent_f(), vec![]));
    rules.push(rule(9, Atom::new("contrary", vec![f.clone(), neg_f.clone()]), fluent_f(), vec![]));
    rules.push(rule(10, Atom::new("contrary", vec![neg_f.clone(), f.clone()]), fluent_f(), vec![]));
    initial_rules(theory, &mut rules)?;
    rules.push(NpRule::fact(Atom::new("factor", vec![Term::Num(theory.discount.clone())]), Annotation::one()).with_origin(Origin::Factor));
    rules.push(NpRule::fact(Atom::new("value", vec![Term::int(0), Term::int(0)]), Annotation::one()).with_origin(Origin::ValueBase));
    for a in &theory.actions {
        action_rules(a, &theory.discount, &mut rules);
    }
    let (l, l2) = (Term::var("L"), Term::var("L2"));
    rules.push(rule(
        25,
        Atom::new("holds", vec![l.clone(), next()]),
        vec![Atom::new("holds", vec![l.clone(), now()]), Atom::new("contrary", vec![l.clone(), l2.clone()])],
        vec![Atom::new("holds", vec![l2.clone(), next()])],
    ));
    let tn = Term::var("Tn");
    let inconsistent = Atom::prop("inconsistent");
    rules.push(rule(
        26,
        inconsistent.clone(),
        vec![Atom::new("holds", vec![f.clone(), tn.clone()]), Atom::new("holds", vec![neg_f, tn.clone()])],
        vec![inconsistent],
    ));
    let (aci, acj) = (Term::var("ACi"), Term::var("ACj"));
    rules.push(rule(
        27,
        Atom::new("occ", vec![aci.clone(), now()]),
        vec![Atom::new("action", vec![aci.clone()])],
        vec![Atom::new("abocc", vec![aci.clone(), now()])],
    ));
    rules.push(NpRule {
        guards: vec![Guard { op: GuardOp::Neq, left: aci.clone(), right: acj.clone() }],
        ..rule(
            28,
            Atom::new("abocc", vec![aci.clone(), now()]),
            vec![
                Atom::new("action", vec![aci.clone()]),
                Atom::new("action", vec![acj.clone()]),
                Atom::new("occ", vec![acj, now()]),
            ],
            vec![],
        )
    });
    if let Some(g) = &theory.goal {
        rules.push(rule(29, Atom::prop("goal"), holds_all(g, &tn), vec![]));
    }

    let literals: Vec<Term> = theory
        .fluents
        .iter()
        .flat_map(|f| [literal_term(&Literal::pos(f.clone())), literal_term(&Literal::neg(f.clone()))])
        .collect();
    let domains = BTreeMap::from([
        ("T".to_string(), (0..n as i64).map(Term::int).collect()),
        ("Tn".to_string(), (0..=n as i64).map(Term::int).collect()),
        ("F".to_string(), theory.fluents.iter().map(name_term).collect()),
        ("L".to_string(), literals.clone()),
        ("L2".to_string(), literals),
        ("ACi".to_string(), ids.clone()),
        ("ACj".to_string(), ids),
    ]);
    Ok((NpProgram::new(rules), domains))
}

/// Compiles a valid theory into the ground np-program for horizon `n`.
pub fn compile(theory: &ActionTheory, n: usize) -> Result<NpProgram> {
    if n < 1 {
        return Err(Error::Horizon { min: 1, got: n });
    }
    let theory = ground_theory(theory)?;
    if let Some(v) = validate_theory(&theory).first() {
        return Err(Error::InvalidTheory(format!("{}: {}", v.decl, v.message)));
    }
    let (templates, domains) = schema_program(&theory, n)?;
    ground_program(&templates, &domains)
}

pub fn schema_counts(p: &NpProgram) -> BTreeMap<u8, usize> {
    let mut counts = BTreeMap::new();
    for r in &p.rules {
        if let Some(Origin::Schema(k)) = r.origin {
            *counts.entry(k).or_insert(0) += 1;
        }
    }
    counts
}
