//! Normal hybrid probabilistic logic programs: annotated rules, disjunctive
//! p-strategies, p-interpretations, the probabilistic reduct, least p-models
//! and probabilistic answer sets.

mod ground;
mod solve;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{pow, render, to_f64, Rat};

pub use ground::ground_program;
pub use solve::{enumerate_answer_sets, enumerate_answer_sets_naive, negated_atoms};
pub use text::parse_program;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Sym(String),
    Num(Rat),
    Func(String, Vec<Term>),
    Var(String),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, Box<Term>),
}

pub type Binding = BTreeMap<String, Term>;

impl Term {
    pub fn sym(s: &str) -> Term {
        Term::Sym(s.to_string())
    }

    pub fn var(s: &str) -> Term {
        Term::Var(s.to_string())
    }

    pub fn int(n: i64) -> Term {
        Term::Num(crate::rational::int(n))
    }

    pub fn func(name: &str, args: Vec<Term>) -> Term {
        Term::Func(name.to_string(), args)
    }

    pub fn sum(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn product(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Term, b: Term) -> Term {
        Term::Pow(Box::new(a), Box::new(b))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Sym(_) | Term::Num(_) => true,
            Term::Var(_) => false,
            Term::Func(_, args) => args.iter().all(Term::is_ground),
            Term::Add(a, b) | Term::Mul(a, b) | Term::Pow(a, b) => a.is_ground() && b.is_ground(),
        }
    }

    pub fn is_arithmetic(&self) -> bool {
        matches!(self, Term::Add(..) | Term::Mul(..) | Term::Pow(..))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Func(_, args) => args.iter().for_each(|a| a.vars(out)),
            Term::Add(a, b) | Term::Mul(a, b) | Term::Pow(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Term::Sym(_) | Term::Num(_) => {}
        }
    }

    /// Replaces bound variables and folds arithmetic over numbers.
    pub fn substitute(&self, b: &Binding) -> Term {
        match self {
            Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Func(f, args) => Term::Func(f.clone(), args.iter().map(|a| a.substitute(b)).collect()),
            Term::Add(x, y) => fold_add(x.substitute(b), y.substitute(b)),
            Term::Mul(x, y) => fold_mul(x.substitute(b), y.substitute(b)),
            Term::Pow(x, y) => fold_pow(x.substitute(b), y.substitute(b)),
            Term::Sym(_) | Term::Num(_) => self.clone(),
        }
    }

    pub fn simplify(&self) -> Term {
        self.substitute(&Binding::new())
    }

    pub fn as_num(&self) -> Option<&Rat> {
        match self {
            Term::Num(r) => Some(r),
            _ => None,
        }
    }
}

fn fold_add(a: Term, b: Term) -> Term {
    match (&a, &b) {
        (Term::Num(x), Term::Num(y)) => Term::Num(x + y),
        (Term::Num(x), _) if x.is_zero() => b,
        (_, Term::Num(y)) if y.is_zero() => a,
        _ => Term::sum(a, b),
    }
}

fn fold_mul(a: Term, b: Term) -> Term {
    match (&a, &b) {
        (Term::Num(x), Term::Num(y)) => Term::Num(x * y),
        (Term::Num(x), _) if x.is_one() => b,
        (_, Term::Num(y)) if y.is_one() => a,
        _ => Term::product(a, b),
    }
}

fn fold_pow(a: Term, b: Term) -> Term {
    if let (Term::Num(x), Term::Num(y)) = (&a, &b) {
        if y.is_integer() {
            if let Some(e) = y.to_integer().to_u32() {
                return Term::Num(pow(x, e));
            }
        }
    }
    Term::pow(a, b)
}

fn needs_quotes(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => true,
    }
}

impl Term {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let own = match self {
            Term::Add(..) => 1,
            Term::Mul(..) => 2,
            Term::Pow(..) => 3,
            _ => 4,
        };
        let wrap = own < prec;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Term::Sym(s) if needs_quotes(s) => write!(f, "\"{s}\"")?,
            Term::Sym(s) => f.write_str(s)?,
            Term::Num(r) => f.write_str(&render(r))?,
            Term::Var(v) => f.write_str(v)?,
            Term::Func(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                f.write_str(")")?;
            }
            Term::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str("+")?;
                b.fmt_prec(f, 2)?;
            }
            Term::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str("*")?;
                b.fmt_prec(f, 3)?;
            }
            Term::Pow(a, b) => {
                a.fmt_prec(f, 4)?;
                f.write_str("^")?;
                b.fmt_prec(f, 4)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Negative numbers in argument position print bare; as operands of
        // `+` they are fine too since there is no binary minus.
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: pred.to_string(), args }
    }

    pub fn prop(pred: &str) -> Atom {
        Atom::new(pred, Vec::new())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        self.args.iter().for_each(|a| a.vars(out));
    }

    pub fn substitute(&self, b: &Binding) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.substitute(b)).collect() }
    }

    /// Matches `self` (which may contain plain variables) against a ground
    /// atom, extending `b`.
    pub fn unify(&self, ground: &Atom, b: &mut Binding) -> bool {
        self.pred == ground.pred
            && self.args.len() == ground.args.len()
            && self.args.iter().zip(&ground.args).all(|(p, g)| unify_term(p, g, b))
    }
}

fn unify_term(pattern: &Term, ground: &Term, b: &mut Binding) -> bool {
    match pattern {
        Term::Var(v) => match b.get(v) {
            Some(t) => t == ground,
            None => {
                b.insert(v.clone(), ground.clone());
                true
            }
        },
        Term::Func(f, args) => match ground {
            Term::Func(g, gargs) => {
                f == g && args.len() == gargs.len() && args.iter().zip(gargs).all(|(p, g)| unify_term(p, g, b))
            }
            _ => false,
        },
        Term::Add(..) | Term::Mul(..) | Term::Pow(..) => pattern.substitute(b) == *ground,
        _ => pattern == ground,
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Annotation {
    Const(Rat),
    Var(String),
    Mul(Box<Annotation>, Box<Annotation>),
}

impl Annotation {
    pub fn one() -> Self {
        Annotation::Const(Rat::one())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Annotation::Const(c) if c.is_one())
    }

    pub fn product(a: Annotation, b: Annotation) -> Self {
        Annotation::Mul(Box::new(a), Box::new(b))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Annotation::Const(_) => {}
            Annotation::Var(v) => {
                out.insert(v.clone());
            }
            Annotation::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// Evaluates under `b`; `None` when a variable is unbound or not a number.
    pub fn eval(&self, b: &Binding) -> Option<Rat> {
        match self {
            Annotation::Const(c) => Some(c.clone()),
            Annotation::Var(v) => b.get(v).and_then(|t| t.as_num().cloned()),
            Annotation::Mul(x, y) => Some(x.eval(b)? * y.eval(b)?),
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::Const(c) => f.write_str(&render(c)),
            Annotation::Var(v) => f.write_str(v),
            Annotation::Mul(a, b) => write!(f, "{a}*{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GuardOp {
    Eq,
    Neq,
    Lt,
    Le,
}

/// A comparison between terms, evaluated once both sides are ground.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    pub op: GuardOp,
    pub left: Term,
    pub right: Term,
}

impl Guard {
    pub fn eval(&self, b: &Binding) -> Option<bool> {
        let l = self.left.substitute(b);
        let r = self.right.substitute(b);
        if !l.is_ground() || !r.is_ground() || l.is_arithmetic() || r.is_arithmetic() {
            return None;
        }
        Some(match self.op {
            GuardOp::Eq => l == r,
            GuardOp::Neq => l != r,
            GuardOp::Lt => match (l.as_num(), r.as_num()) {
                (Some(x), Some(y)) => x < y,
                _ => l < r,
            },
            GuardOp::Le => match (l.as_num(), r.as_num()) {
                (Some(x), Some(y)) => x <= y,
                _ => l <= r,
            },
        })
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            GuardOp::Eq => "=",
            GuardOp::Neq => "!=",
            GuardOp::Lt => "<",
            GuardOp::Le => "<=",
        };
        write!(f, "{} {op} {}", self.left, self.right)
    }
}

/// Where a rule came from, so later stages can select rules by schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Schema(u8),
    Fluent,
    Factor,
    ValueBase,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Schema(n) => write!(f, "{n}"),
            Origin::Fluent => f.write_str("fluent"),
            Origin::Factor => f.write_str("factor"),
            Origin::ValueBase => f.write_str("value0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NpRule {
    pub head: Atom,
    pub head_ann: Annotation,
    pub pos: Vec<(Atom, Annotation)>,
    pub neg: Vec<(Atom, Annotation)>,
    pub guards: Vec<Guard>,
    pub origin: Option<Origin>,
}

impl NpRule {
    pub fn fact(head: Atom, ann: Annotation) -> Self {
        NpRule { head, head_ann: ann, pos: Vec::new(), neg: Vec::new(), guards: Vec::new(), origin: None }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    /// Term and annotation variables of the rule.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.head.vars(&mut out);
        self.head_ann.vars(&mut out);
        for (a, ann) in self.pos.iter().chain(&self.neg) {
            a.vars(&mut out);
            ann.vars(&mut out);
        }
        for g in &self.guards {
            g.left.vars(&mut out);
            g.right.vars(&mut out);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Max,
    #[serde(rename = "indep")]
    Independence,
}

impl Strategy {
    pub fn compose(self, a: &Rat, b: &Rat) -> Rat {
        match self {
            Strategy::Max => a.max(b).clone(),
            Strategy::Independence => a + b - a * b,
        }
    }

    pub fn compose_all<'a>(self, values: impl IntoIterator<Item = &'a Rat>) -> Rat {
        values.into_iter().fold(Rat::zero(), |acc, v| self.compose(&acc, v))
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Max => "max",
            Strategy::Independence => "indep",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "max" => Ok(Strategy::Max),
            "indep" | "independence" => Ok(Strategy::Independence),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpProgram {
    pub rules: Vec<NpRule>,
    pub strategies: BTreeMap<String, Strategy>,
    pub default_strategy: Strategy,
}

impl Default for NpProgram {
    fn default() -> Self {
        NpProgram { rules: Vec::new(), strategies: BTreeMap::new(), default_strategy: Strategy::Max }
    }
}

impl NpProgram {
    pub fn new(rules: Vec<NpRule>) -> Self {
        NpProgram { rules, ..Default::default() }
    }

    pub fn strategy(&self, pred: &str) -> Strategy {
        self.strategies.get(pred).copied().unwrap_or(self.default_strategy)
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(NpRule::is_ground)
    }

    pub fn to_text(&self) -> String {
        text::print_program(self)
    }
}

/// Ground atom to probability; absent atoms have probability 0.
pub type PInterpretation = BTreeMap<Atom, Rat>;

pub fn prob(h: &PInterpretation, a: &Atom) -> Rat {
    h.get(a).cloned().unwrap_or_else(Rat::zero)
}

/// `h ⊨ A : μ` iff `μ ≤ h(A)`.
pub fn satisfies(h: &PInterpretation, a: &Atom, mu: &Rat) -> bool {
    *mu <= prob(h, a)
}

/// `h ⊨ not (B : β)` iff `β ≰ h(B)`.
pub fn satisfies_not(h: &PInterpretation, b: &Atom, beta: &Rat) -> bool {
    !(*beta <= prob(h, b))
}

pub fn interpretation_json(h: &PInterpretation) -> serde_json::Value {
    serde_json::Value::Object(h.iter().map(|(a, p)| (a.to_string(), serde_json::json!(to_f64(p)))).collect())
}

/// Every way the positive body and guards of `rule` are satisfied by `h`.
/// An annotation variable on a body literal is bound to the exact
/// probability of its atom; plain term variables are bound by matching
/// atoms present in `h`.
pub(crate) fn body_bindings(rule: &NpRule, h: &PInterpretation, by_pred: &BTreeMap<&str, Vec<&Atom>>) -> Vec<Binding> {
    let mut out = Vec::new();
    extend_bindings(rule, 0, Binding::new(), h, by_pred, &mut out);
    out
}

fn extend_bindings(
    rule: &NpRule,
    i: usize,
    b: Binding,
    h: &PInterpretation,
    by_pred: &BTreeMap<&str, Vec<&Atom>>,
    out: &mut Vec<Binding>,
) {
    if i == rule.pos.len() {
        if rule.guards.iter().all(|g| g.eval(&b) == Some(true)) {
            out.push(b);
        }
        return;
    }
    let (atom, ann) = &rule.pos[i];
    let atom = atom.substitute(&b);
    if atom.is_ground() {
        if let Some(b) = bind_annotation(ann, &atom, h, b) {
            extend_bindings(rule, i + 1, b, h, by_pred, out);
        }
        return;
    }
    for cand in by_pred.get(atom.pred.as_str()).into_iter().flatten() {
        let mut nb = b.clone();
        if atom.unify(cand, &mut nb) {
            if let Some(nb) = bind_annotation(ann, cand, h, nb) {
                extend_bindings(rule, i + 1, nb, h, by_pred, out);
            }
        }
    }
}

fn bind_annotation(ann: &Annotation, atom: &Atom, h: &PInterpretation, mut b: Binding) -> Option<Binding> {
    let p = prob(h, atom);
    match ann {
        Annotation::Var(v) if !b.contains_key(v) => {
            b.insert(v.clone(), Term::Num(p));
            Some(b)
        }
        _ => {
            let mu = ann.eval(&b)?;
            (mu <= p).then_some(b)
        }
    }
}

pub(crate) fn atoms_by_pred(h: &PInterpretation) -> BTreeMap<&str, Vec<&Atom>> {
    let mut m: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
    for a in h.keys() {
        m.entry(a.pred.as_str()).or_default().push(a);
    }
    m
}

/// Head atoms and annotation values of every rule instance whose body `h`
/// satisfies, negative literals included.
fn firings(p: &NpProgram, h: &PInterpretation) -> Result<Vec<(Atom, Rat)>> {
    let by_pred = atoms_by_pred(h);
    let mut out = Vec::new();
    for rule in &p.rules {
        rule_firings(rule, h, &by_pred, &|a, beta| satisfies_not(h, a, beta), &mut out)?;
    }
    Ok(out)
}

/// Firings of one rule; `neg_ok` decides the negative literals.
pub(crate) fn rule_firings(
    rule: &NpRule,
    h: &PInterpretation,
    by_pred: &BTreeMap<&str, Vec<&Atom>>,
    neg_ok: &dyn Fn(&Atom, &Rat) -> bool,
    out: &mut Vec<(Atom, Rat)>,
) -> Result<()> {
    for b in body_bindings(rule, h, by_pred) {
        let negs = rule.neg.iter().all(|(a, ann)| match ann.eval(&b) {
            Some(beta) => neg_ok(&a.substitute(&b), &beta),
            None => false,
        });
        if !negs {
            continue;
        }
        let head = rule.head.substitute(&b);
        if !head.is_ground() || head.args.iter().any(Term::is_arithmetic) {
            return Err(Error::UnboundedSort(format!("head {head} is not ground after matching")));
        }
        let mu = rule
            .head_ann
            .eval(&b)
            .ok_or_else(|| Error::UnboundedSort(format!("annotation {} of {head}", rule.head_ann)))?;
        out.push((head, mu));
    }
    Ok(())
}

/// The immediate-consequence operator: composes, per atom, the annotations
/// of all rules whose bodies `h` satisfies.
pub fn immediate_consequence(p: &NpProgram, h: &PInterpretation) -> Result<PInterpretation> {
    let mut grouped: BTreeMap<Atom, Vec<Rat>> = BTreeMap::new();
    for (a, mu) in firings(p, h)? {
        grouped.entry(a).or_default().push(mu);
    }
    Ok(grouped
        .into_iter()
        .map(|(a, mus)| {
            let v = p.strategy(&a.pred).compose_all(&mus);
            (a, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect())
}

/// `h` is a p-model of `p`: for every atom, the composition of the
/// annotations of rules whose bodies `h` satisfies is at most `h(A)`.
pub fn satisfies_program(h: &PInterpretation, p: &NpProgram) -> Result<bool> {
    let t = immediate_consequence(p, h)?;
    Ok(t.iter().all(|(a, v)| *v <= prob(h, a)))
}

/// Deletes rules with a negative literal that `h` contradicts and strips the
/// negative bodies of the rest.
pub fn reduct(p: &NpProgram, h: &PInterpretation) -> NpProgram {
    let rules = p
        .rules
        .iter()
        .filter(|r| {
            r.neg.iter().all(|(a, ann)| match ann.eval(&Binding::new()) {
                Some(beta) => satisfies_not(h, a, &beta),
                None => false,
            })
        })
        .map(|r| NpRule { neg: Vec::new(), ..r.clone() })
        .collect();
    NpProgram { rules, strategies: p.strategies.clone(), default_strategy: p.default_strategy }
}

/// Syntactically distinct atoms of the program; non-ground atoms count once.
pub fn atom_count(p: &NpProgram) -> usize {
    let mut set = BTreeSet::new();
    for r in &p.rules {
        set.insert(&r.head);
        for (a, _) in r.pos.iter().chain(&r.neg) {
            set.insert(a);
        }
    }
    set.len()
}

/// Least p-model of a negation-free program, by iterating the immediate
/// consequence operator from the all-zero interpretation.
pub fn least_model(p: &NpProgram) -> Result<PInterpretation> {
    let cap = atom_count(p) + 1;
    let mut h = PInterpretation::new();
    for _ in 0..=cap {
        let next = immediate_consequence(p, &h)?;
        if next == h {
            return Ok(h);
        }
        h = next;
    }
    Err(Error::FixpointCap(cap))
}
