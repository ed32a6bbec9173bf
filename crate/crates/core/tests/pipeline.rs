mod common;

use std::collections::BTreeSet;

use apo_core::action::parse_theory;
use apo_core::nhplp::{enumerate_answer_sets, parse_program, Atom};
use apo_core::translator::{all_models, compile, normalize, parse_dimacs, to_sat, CnfFormula};
use common::TIGER;

fn true_atoms(sets: Vec<apo_core::nhplp::PInterpretation>) -> BTreeSet<BTreeSet<Atom>> {
    sets.into_iter().map(|h| h.into_keys().collect()).collect()
}

#[test]
fn tiger_sat_models_match_normal_answer_sets() {
    let t = parse_theory(TIGER).unwrap();
    for (n, expected) in [(1, 16), (2, 128)] {
        let normal = normalize(&compile(&t, n).unwrap()).unwrap();
        let cnf = to_sat(&normal).unwrap();
        let models = all_models(cnf.variable_count, &cnf.clauses, None).unwrap();
        assert_eq!(models.len(), expected);
        let decoded: BTreeSet<_> = models.iter().map(|m| cnf.decode_model(m).unwrap()).collect();
        assert_eq!(decoded, true_atoms(enumerate_answer_sets(&normal.to_np()).unwrap()));
        for atoms in &decoded {
            assert!(cnf.satisfied_by(&cnf.encode(atoms)));
        }
    }
}

#[test]
fn dimacs_files_round_trip() {
    let t = parse_theory(TIGER).unwrap();
    let cnf = to_sat(&normalize(&compile(&t, 1).unwrap()).unwrap()).unwrap();
    let text = cnf.to_dimacs();
    let (vars, clauses) = parse_dimacs(&text).unwrap();
    assert_eq!((vars, &clauses), (cnf.variable_count, &cnf.clauses));
    let back = CnfFormula::from_dimacs(&text, &cnf.atom_map_json()).unwrap();
    assert_eq!(back.atoms, cnf.atoms);
    assert_eq!(all_models(vars, &clauses, None).unwrap().len(), 16);
}

#[test]
fn compiled_programs_survive_printing() {
    let t = parse_theory(TIGER).unwrap();
    let p = compile(&t, 1).unwrap();
    let back = parse_program(&p.to_text()).unwrap();
    assert_eq!(back, p);
    assert_eq!(enumerate_answer_sets(&back).unwrap(), enumerate_answer_sets(&p).unwrap());
}
