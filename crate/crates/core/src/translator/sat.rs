use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde_json::json;

use super::normal::NormalProgram;
use crate::error::{Error, Result};
use crate::nhplp::{parse_program, Atom};

/// CNF over one variable per atom (numbered from 1 in atom order) plus
/// auxiliary variables that name multi-literal rule bodies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub clauses: Vec<Vec<i64>>,
    /// Variable `i + 1` stands for `atoms[i]`.
    pub atoms: Vec<Atom>,
    /// Body literals of each auxiliary variable, numbered after the atoms.
    pub aux: Vec<Vec<i64>>,
    pub variable_count: usize,
}

fn positive_cycle(p: &NormalProgram, var: &BTreeMap<Atom, usize>, atoms: &[Atom]) -> Option<String> {
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = atoms.iter().map(|_| g.add_node(())).collect();
    for r in &p.rules {
        for b in &r.pos {
            g.update_edge(nodes[var[b] - 1], nodes[var[&r.head] - 1], ());
        }
    }
    tarjan_scc(&g).into_iter().find_map(|scc| {
        let cyclic = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        cyclic.then(|| {
            let mut names: Vec<String> = scc.iter().map(|n| atoms[n.index()].to_string()).collect();
            names.sort();
            names.join(", ")
        })
    })
}

/// Clark completion of a tight ground normal program.
pub fn to_sat(p: &NormalProgram) -> Result<CnfFormula> {
    for r in &p.rules {
        if let Some(a) = std::iter::once(&r.head).chain(&r.pos).chain(&r.neg).find(|a| !a.is_ground()) {
            return Err(Error::UnboundedSort(format!("atom {a} is not ground")));
        }
    }
    let atoms: Vec<Atom> = p.atoms().into_iter().collect();
    let var: BTreeMap<Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i + 1)).collect();
    if let Some(cycle) = positive_cycle(p, &var, &atoms) {
        return Err(Error::NotTight(cycle));
    }
    let mut bodies: BTreeMap<usize, Vec<Vec<i64>>> = BTreeMap::new();
    for r in &p.rules {
        let lits: Vec<i64> = r
            .pos
            .iter()
            .map(|a| var[a] as i64)
            .chain(r.neg.iter().map(|a| -(var[a] as i64)))
            .collect();
        bodies.entry(var[&r.head]).or_default().push(lits);
    }
    let mut clauses = Vec::new();
    let mut aux: Vec<Vec<i64>> = Vec::new();
    for v in 1..=atoms.len() {
        let a = v as i64;
        let Some(bs) = bodies.get(&v) else {
            clauses.push(vec![-a]);
            continue;
        };
        if bs.iter().any(|b| b.is_empty()) {
            clauses.push(vec![a]);
            continue;
        }
        for b in bs {
            let mut c: Vec<i64> = b.iter().map(|l| -l).collect();
            c.push(a);
            clauses.push(c);
        }
        if bs.len() == 1 {
            for l in &bs[0] {
                clauses.push(vec![-a, *l]);
            }
            continue;
        }
        let mut support = vec![-a];
        for b in bs {
            if b.len() == 1 {
                support.push(b[0]);
                continue;
            }
            aux.push(b.clone());
            let x = (atoms.len() + aux.len()) as i64;
            for l in b {
                clauses.push(vec![-x, *l]);
            }
            let mut c: Vec<i64> = b.iter().map(|l| -l).collect();
            c.push(x);
            clauses.push(c);
            support.push(x);
        }
        clauses.push(support);
    }
    let variable_count = atoms.len() + aux.len();
    Ok(CnfFormula { clauses, atoms, aux, variable_count })
}

impl CnfFormula {
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.variable_count, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn atom_map_json(&self) -> serde_json::Value {
        json!(self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| json!({"var": i + 1, "atom": a.to_string()}))
            .collect::<Vec<_>>())
    }

    /// Rebuilds a formula from DIMACS text and its atom map. Auxiliary
    /// definitions are not part of either file and are left empty.
    pub fn from_dimacs(dimacs: &str, atom_map: &serde_json::Value) -> Result<Self> {
        let (variable_count, clauses) = parse_dimacs(dimacs)?;
        let entries = atom_map.as_array().ok_or_else(|| Error::Dimacs("atom map is not an array".into()))?;
        let mut atoms = Vec::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            let v = e["var"].as_u64();
            let text = e["atom"].as_str();
            let (Some(v), Some(text)) = (v, text) else {
                return Err(Error::Dimacs(format!("malformed atom map entry {e}")));
            };
            if v as usize != i + 1 {
                return Err(Error::Dimacs(format!("atom map entry {e} out of order")));
            }
            let head = parse_program(&format!("{text}."))?.rules.remove(0).head;
            atoms.push(head);
        }
        if atoms.len() > variable_count {
            return Err(Error::Dimacs("atom map names more variables than the header".into()));
        }
        Ok(CnfFormula { clauses, atoms, aux: Vec::new(), variable_count })
    }

    /// The true atoms of a complete assignment (`model[i]` is variable `i+1`).
    pub fn decode_model(&self, model: &[bool]) -> Result<BTreeSet<Atom>> {
        if model.len() < self.variable_count {
            return Err(Error::IncompleteAssignment(model.len() + 1));
        }
        Ok(self.atoms.iter().zip(model).filter(|(_, v)| **v).map(|(a, _)| a.clone()).collect())
    }

    /// The assignment that makes exactly `true_atoms` true, with auxiliary
    /// variables set to the truth of their bodies.
    pub fn encode(&self, true_atoms: &BTreeSet<Atom>) -> Vec<bool> {
        let mut model: Vec<bool> = self.atoms.iter().map(|a| true_atoms.contains(a)).collect();
        for body in &self.aux {
            let holds = body.iter().all(|l| model[l.unsigned_abs() as usize - 1] == (*l > 0));
            model.push(holds);
        }
        model
    }

    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| model.get(l.unsigned_abs() as usize - 1) == Some(&(*l > 0))))
    }
}

/// Header variable count and clauses of a DIMACS file.
pub fn parse_dimacs(text: &str) -> Result<(usize, Vec<Vec<i64>>)> {
    let mut header = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| Error::Dimacs(format!("line {}: bad variable count", n + 1)))?;
                    let c: usize = c.parse().map_err(|_| Error::Dimacs(format!("line {}: bad clause count", n + 1)))?;
                    header = Some((v, c));
                }
                _ => return Err(Error::Dimacs(format!("line {}: malformed header", n + 1))),
            }
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(Error::Dimacs(format!("line {}: clause before header", n + 1)));
        };
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| Error::Dimacs(format!("line {}: bad literal `{tok}`", n + 1)))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() as usize > vars {
                return Err(Error::Dimacs(format!("line {}: variable {} exceeds header", n + 1, l.abs())));
            } else {
                current.push(l);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| Error::Dimacs("missing header".into()))?;
    if !current.is_empty() {
        return Err(Error::Dimacs("last clause not terminated by 0".into()));
    }
    if clauses.len() != count {
        return Err(Error::Dimacs(format!("header announces {count} clauses, found {}", clauses.len())));
    }
    Ok((vars, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nhplp::{enumerate_answer_sets, parse_program};
    use crate::translator::all_models;

    fn normal(src: &str) -> NormalProgram {
        NormalProgram::from_np(&parse_program(src).unwrap()).unwrap()
    }

    /// Models by truth table over every variable.
    fn truth_table(cnf: &CnfFormula) -> Vec<Vec<bool>> {
        (0u32..1 << cnf.variable_count)
            .map(|m| (0..cnf.variable_count).map(|i| m >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|m| cnf.satisfied_by(m))
            .collect()
    }

    fn decoded(cnf: &CnfFormula, models: &[Vec<bool>]) -> BTreeSet<BTreeSet<String>> {
        models
            .iter()
            .map(|m| cnf.decode_model(m).unwrap().iter().map(|a| a.to_string()).collect())
            .collect()
    }

    #[test]
    fn even_loop_completion() {
        let cnf = to_sat(&normal("a <- not b.\nb <- not a.")).unwrap();
        assert_eq!(cnf.variable_count, 2);
        let models = truth_table(&cnf);
        let expected: BTreeSet<BTreeSet<String>> =
            [["a"], ["b"]].iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect();
        assert_eq!(decoded(&cnf, &models), expected);
    }

    #[test]
    fn undefined_atom_is_forced_false() {
        let cnf = to_sat(&normal("a <- b.")).unwrap();
        assert!(cnf.clauses.contains(&vec![-2]));
        assert_eq!(decoded(&cnf, &truth_table(&cnf)), BTreeSet::from([BTreeSet::new()]));
    }

    #[test]
    fn auxiliary_variables_name_long_bodies() {
        let src = "c.\nd.\na <- c, d.\na <- not b.\nb <- not a.";
        let cnf = to_sat(&normal(src)).unwrap();
        assert_eq!(cnf.aux, vec![vec![3, 4]]);
        let models = truth_table(&cnf);
        assert_eq!(models.len(), 1);
        assert_eq!(all_models(cnf.variable_count, &cnf.clauses, None).unwrap(), models);
        let sets = enumerate_answer_sets(&parse_program(src).unwrap()).unwrap();
        let atoms: BTreeSet<Atom> = sets[0].keys().cloned().collect();
        assert_eq!(cnf.encode(&atoms), models[0]);
    }

    #[test]
    fn positive_loops_are_rejected() {
        let err = to_sat(&normal("a <- b.\nb <- a.\nc <- not a.")).unwrap_err();
        assert_eq!(err, Error::NotTight("a, b".into()));
        assert!(matches!(to_sat(&normal("a <- a.")), Err(Error::NotTight(_))));
    }

    #[test]
    fn dimacs_round_trip() {
        let cnf = to_sat(&normal("a <- not b.\nb <- not a.\nc <- a, b.\nc <- not a, d.")).unwrap();
        let text = cnf.to_dimacs();
        assert!(text.starts_with(&format!("p cnf {} {}\n", cnf.variable_count, cnf.clauses.len())));
        let back = CnfFormula::from_dimacs(&text, &cnf.atom_map_json()).unwrap();
        assert_eq!(back.clauses, cnf.clauses);
        assert_eq!(back.atoms, cnf.atoms);
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert_eq!(parse_dimacs("c hi\np cnf 2 1\n1 -2\n0\n").unwrap(), (2, vec![vec![1, -2]]));
    }

    #[test]
    fn decoding_needs_every_variable() {
        let cnf = to_sat(&normal("a <- not b.\nb <- not a.")).unwrap();
        assert_eq!(cnf.decode_model(&[true]), Err(Error::IncompleteAssignment(2)));
        assert!(cnf.decode_model(&[false, false]).unwrap().is_empty());
    }
}
