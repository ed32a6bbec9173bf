//! Answer-set enumeration. The fast solver splits the dependency graph into
//! strongly connected components and branches only on the negated atoms
//! that a component defines itself, pruning with lower and upper fixpoints.
//! The naive solver guesses every negated literal at once and checks the
//! reduct.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{least_model, prob, rule_firings, satisfies_not, Annotation, Atom, NpProgram, NpRule, PInterpretation, Term};
use crate::error::{Error, Result};
use crate::rational::Rat;

const MAX_NAIVE_BITS: usize = 22;

/// A negated literal `not B : β`, identified by its atom and bound.
type NegLit = (Atom, Rat);

fn neg_literal(rule: &NpRule, a: &Atom, ann: &Annotation) -> Result<NegLit> {
    match ann {
        Annotation::Const(beta) if a.is_ground() => Ok((a.clone(), beta.clone())),
        _ => Err(Error::NonBooleanNegation(format!("not {a}:{ann} in {rule}"))),
    }
}

/// Distinct negated literals of a ground program, in order.
pub fn negated_atoms(p: &NpProgram) -> Result<Vec<(Atom, Rat)>> {
    let mut set = BTreeSet::new();
    for r in &p.rules {
        for (a, ann) in &r.neg {
            set.insert(neg_literal(r, a, ann)?);
        }
    }
    Ok(set.into_iter().collect())
}

/// Reference solver: every assignment to the negated literals, each checked
/// by computing the least model of the induced reduct.
pub fn enumerate_answer_sets_naive(p: &NpProgram) -> Result<Vec<PInterpretation>> {
    let lits = negated_atoms(p)?;
    if lits.len() > MAX_NAIVE_BITS {
        return Err(Error::TooLarge(format!("{} negated literals", lits.len())));
    }
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << lits.len()) {
        let holds = |l: &NegLit| {
            let i = lits.binary_search(l).expect("collected above");
            mask >> i & 1 == 1
        };
        let rules = p
            .rules
            .iter()
            .filter(|r| r.neg.iter().all(|(a, ann)| !holds(&neg_literal(r, a, ann).unwrap())))
            .map(|r| NpRule { neg: Vec::new(), ..r.clone() })
            .collect();
        let reduct = NpProgram { rules, strategies: p.strategies.clone(), default_strategy: p.default_strategy };
        let h = least_model(&reduct)?;
        if lits.iter().all(|l| holds(l) == !satisfies_not(&h, &l.0, &l.1)) {
            out.insert(h);
        }
    }
    Ok(out.into_iter().collect())
}

fn wildcard() -> Term {
    Term::Var("_".into())
}

/// Ground atoms stand for themselves; non-ground arguments become wildcards.
fn node_key(a: &Atom) -> Atom {
    Atom {
        pred: a.pred.clone(),
        args: a.args.iter().map(|t| if t.is_ground() && !t.is_arithmetic() { t.clone() } else { wildcard() }).collect(),
    }
}

fn keys_unify(x: &Atom, y: &Atom) -> bool {
    x.pred == y.pred
        && x.args.len() == y.args.len()
        && x.args.iter().zip(&y.args).all(|(a, b)| a == b || *a == wildcard() || *b == wildcard())
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

struct Component {
    rules: Vec<usize>,
    /// Negated literals over atoms this component defines.
    guesses: Vec<NegLit>,
    /// Predicates of non-ground positive body atoms, for matching.
    match_preds: BTreeSet<String>,
}

struct Solver<'a> {
    program: &'a NpProgram,
    components: Vec<Component>,
    order: Vec<usize>,
    h: PInterpretation,
}

impl<'a> Solver<'a> {
    fn new(program: &'a NpProgram) -> Result<Self> {
        for r in &program.rules {
            for (a, ann) in &r.neg {
                neg_literal(r, a, ann)?;
            }
        }
        let mut index: BTreeMap<Atom, usize> = BTreeMap::new();
        for r in &program.rules {
            for a in std::iter::once(&r.head).chain(r.pos.iter().map(|x| &x.0)).chain(r.neg.iter().map(|x| &x.0)) {
                let k = node_key(a);
                let n = index.len();
                index.entry(k).or_insert(n);
            }
        }
        let mut parent: Vec<usize> = (0..index.len()).collect();
        let keys: Vec<&Atom> = index.keys().collect();
        let mut by_pred: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
        for k in &keys {
            by_pred.entry(k.pred.as_str()).or_default().push(k);
        }
        for group in by_pred.values() {
            for w in group.iter().filter(|k| k.args.contains(&wildcard())) {
                for k in group {
                    if keys_unify(w, k) {
                        let (x, y) = (find(&mut parent, index[*w]), find(&mut parent, index[*k]));
                        parent[x] = y;
                    }
                }
            }
        }
        let class = |a: &Atom, parent: &mut Vec<usize>| find(parent, index[&node_key(a)]);

        let mut graph = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..parent.len()).map(|_| graph.add_node(())).collect();
        for r in &program.rules {
            let head = class(&r.head, &mut parent);
            for (a, _) in r.pos.iter().chain(&r.neg) {
                let body = class(a, &mut parent);
                graph.update_edge(nodes[body], nodes[head], ());
            }
        }
        let sccs = tarjan_scc(&graph);
        let mut scc_of = vec![0; parent.len()];
        for (i, scc) in sccs.iter().enumerate() {
            for n in scc {
                scc_of[n.index()] = i;
            }
        }
        let mut components: Vec<Component> = (0..sccs.len())
            .map(|_| Component { rules: Vec::new(), guesses: Vec::new(), match_preds: BTreeSet::new() })
            .collect();
        for (ri, r) in program.rules.iter().enumerate() {
            let c = scc_of[class(&r.head, &mut parent)];
            components[c].rules.push(ri);
            for (a, ann) in &r.neg {
                if scc_of[class(a, &mut parent)] == c {
                    let lit = neg_literal(r, a, ann)?;
                    if !components[c].guesses.contains(&lit) {
                        components[c].guesses.push(lit);
                    }
                }
            }
            for (a, _) in &r.pos {
                if !a.is_ground() {
                    components[c].match_preds.insert(a.pred.clone());
                }
            }
        }
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); components.len()];
        let mut indegree = vec![0usize; components.len()];
        for e in graph.raw_edges() {
            let (x, y) = (scc_of[e.source().index()], scc_of[e.target().index()]);
            if x != y && succ[x].insert(y) {
                indegree[y] += 1;
            }
        }
        // Components without guesses go first so that branching repeats as
        // little work as possible.
        let mut plain: VecDeque<usize> = VecDeque::new();
        let mut branching: VecDeque<usize> = VecDeque::new();
        let push = |c: usize, comps: &[Component], plain: &mut VecDeque<usize>, branching: &mut VecDeque<usize>| {
            if comps[c].guesses.is_empty() {
                plain.push_back(c);
            } else {
                branching.push_back(c);
            }
        };
        for c in (0..components.len()).rev() {
            if indegree[c] == 0 {
                push(c, &components, &mut plain, &mut branching);
            }
        }
        let mut order = Vec::with_capacity(components.len());
        while let Some(c) = plain.pop_front().or_else(|| branching.pop_front()) {
            if !components[c].rules.is_empty() {
                order.push(c);
            }
            for &d in &succ[c] {
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    push(d, &components, &mut plain, &mut branching);
                }
            }
        }
        Ok(Solver { program, components, order, h: PInterpretation::new() })
    }

    /// Iterates the component's rules from scratch until its atoms stop
    /// changing. Guess `i` set means its atom reaches the bound, so the
    /// negated literal fails; unassigned guesses take `default`. Leaves the
    /// result in `h` and returns the atoms it added.
    fn fixpoint(&mut self, c: usize, assign: &[Option<bool>], default: bool) -> Result<Vec<Atom>> {
        let comp = &self.components[c];
        let cap = comp.rules.len() + 2;
        let mut current: Vec<(Atom, Rat)> = Vec::new();
        for _ in 0..=cap {
            let h = &self.h;
            let mut by_pred: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
            for pred in &comp.match_preds {
                let from = Atom { pred: pred.clone(), args: Vec::new() };
                by_pred.insert(pred, h.range(from..).map(|(a, _)| a).take_while(|a| a.pred == *pred).collect());
            }
            let neg_ok = |a: &Atom, beta: &Rat| match comp.guesses.iter().position(|(g, b)| g == a && b == beta) {
                Some(i) => !assign[i].unwrap_or(default),
                None => satisfies_not(h, a, beta),
            };
            let mut fired = Vec::new();
            for &ri in &comp.rules {
                rule_firings(&self.program.rules[ri], h, &by_pred, &neg_ok, &mut fired)?;
            }
            let mut grouped: BTreeMap<Atom, Vec<Rat>> = BTreeMap::new();
            for (a, mu) in fired {
                grouped.entry(a).or_default().push(mu);
            }
            let next: Vec<(Atom, Rat)> = grouped
                .into_iter()
                .map(|(a, mus)| {
                    let v = self.program.strategy(&a.pred).compose_all(&mus);
                    (a, v)
                })
                .filter(|(_, v)| !v.is_zero())
                .collect();
            if next == current {
                return Ok(current.into_iter().map(|(a, _)| a).collect());
            }
            for (a, _) in &current {
                self.h.remove(a);
            }
            for (a, v) in &next {
                self.h.insert(a.clone(), v.clone());
            }
            current = next;
        }
        for (a, _) in &current {
            self.h.remove(a);
        }
        Err(Error::FixpointCap(cap))
    }

    /// Whether each guessed atom reaches its bound in the fixpoint under
    /// `assign`; `None` when that fixpoint does not converge.
    fn reached(&mut self, c: usize, assign: &[Option<bool>], default: bool) -> Result<Option<Vec<bool>>> {
        let atoms = match self.fixpoint(c, assign, default) {
            Ok(atoms) => atoms,
            Err(Error::FixpointCap(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let out = self.components[c].guesses.iter().map(|(a, beta)| *beta <= prob(&self.h, a)).collect();
        for a in atoms {
            self.h.remove(&a);
        }
        Ok(Some(out))
    }

    fn search(&mut self, mut pos: usize, out: &mut BTreeSet<PInterpretation>) -> Result<()> {
        let mut added = Vec::new();
        let result = loop {
            if pos == self.order.len() {
                out.insert(self.h.clone());
                break Ok(());
            }
            let c = self.order[pos];
            let k = self.components[c].guesses.len();
            if k == 0 {
                match self.fixpoint(c, &[], false) {
                    Ok(atoms) => added.extend(atoms),
                    Err(e) => break Err(e),
                }
                pos += 1;
                continue;
            }
            break self.branch(c, pos, vec![None; k], out);
        };
        for a in added {
            self.h.remove(&a);
        }
        result
    }

    /// Splits on the component's guesses. Before each split, the fixpoint
    /// with every open guess failing bounds the answer from below and the one
    /// with every open guess succeeding bounds it from above; guesses the
    /// bounds decide are fixed and contradicted ones prune the branch.
    fn branch(&mut self, c: usize, pos: usize, mut assign: Vec<Option<bool>>, out: &mut BTreeSet<PInterpretation>) -> Result<()> {
        loop {
            let lower = self.reached(c, &assign, true)?;
            let upper = self.reached(c, &assign, false)?;
            let mut changed = false;
            for i in 0..assign.len() {
                let surely = lower.as_ref().is_some_and(|l| l[i]);
                let possibly = upper.as_ref().is_none_or(|u| u[i]);
                match assign[i] {
                    Some(true) if !possibly => return Ok(()),
                    Some(false) if surely => return Ok(()),
                    None if surely => assign[i] = Some(true),
                    None if !possibly => assign[i] = Some(false),
                    _ => continue,
                }
                changed |= assign[i].is_some();
            }
            if !changed {
                break;
            }
        }
        if let Some(i) = assign.iter().position(Option::is_none) {
            for v in [false, true] {
                let mut next = assign.clone();
                next[i] = Some(v);
                self.branch(c, pos, next, out)?;
            }
            return Ok(());
        }
        let atoms = self.fixpoint(c, &assign, false)?;
        let consistent = self.components[c]
            .guesses
            .iter()
            .zip(&assign)
            .all(|((a, beta), g)| *g == Some(*beta <= prob(&self.h, a)));
        let result = if consistent { self.search(pos + 1, out) } else { Ok(()) };
        for a in atoms {
            self.h.remove(&a);
        }
        result
    }
}

/// Every probabilistic answer set of a ground program in the boolean
/// negation fragment, sorted.
pub fn enumerate_answer_sets(p: &NpProgram) -> Result<Vec<PInterpretation>> {
    let mut solver = Solver::new(p)?;
    let mut out = BTreeSet::new();
    solver.search(0, &mut out)?;
    Ok(out.into_iter().collect())
}
