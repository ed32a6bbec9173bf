//! Random small theories and programs for invariant testing.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::action::{parse_theory, ActionTheory};
use crate::nhplp::{Annotation, Atom, NpProgram, NpRule, Strategy};
use crate::rational::ratio;

fn literal(rng: &mut impl Rng, fluent: &str) -> String {
    if rng.gen_bool(0.5) {
        fluent.to_string()
    } else {
        format!("-{fluent}")
    }
}

fn effect(rng: &mut impl Rng, fluents: &[String]) -> String {
    let k = rng.gen_range(0..=fluents.len().min(2));
    let chosen: Vec<String> = fluents.choose_multiple(rng, k).map(|f| literal(rng, f)).collect();
    format!("{{{}}}", chosen.join(", "))
}

/// `k` probabilities in quarters that sum to 1.
fn split(rng: &mut impl Rng, k: usize) -> Vec<String> {
    match k {
        1 => vec!["1".into()],
        _ => {
            let a = rng.gen_range(1..=3);
            vec![format!("{}", a as f64 / 4.0), format!("{}", (4 - a) as f64 / 4.0)]
        }
    }
}

fn outcomes(rng: &mut impl Rng, fluents: &[String], condition: &str) -> Vec<String> {
    let k = rng.gen_range(1..=2);
    split(rng, k)
        .into_iter()
        .map(|p| format!("{} : {p} : {} if {condition}", effect(rng, fluents), rng.gen_range(-5..=5)))
        .collect()
}

/// Source text of a valid theory with at most three fluents and three
/// actions. When a sensing action is present it reads fluent `r` and
/// reports fluent `q`.
pub fn random_theory_text(rng: &mut impl Rng) -> String {
    let sensing = rng.gen_bool(0.5);
    let plain_count = if sensing { rng.gen_range(0..=1) } else { rng.gen_range(1..=3) };
    let mut world: Vec<String> = (0..plain_count).map(|i| format!("f{i}")).collect();
    if sensing {
        world.push("r".into());
    }
    let mut fluents = world.clone();
    if sensing {
        fluents.push("q".into());
    }
    let mut out = format!("fluent {}.\n", fluents.join(", "));

    let mut assignments: Vec<Vec<String>> = vec![Vec::new()];
    for f in &world {
        assignments = assignments
            .into_iter()
            .flat_map(|a| {
                [f.clone(), format!("-{f}")].map(|l| {
                    let mut a = a.clone();
                    a.push(l);
                    a
                })
            })
            .collect();
    }
    let starts = rng.gen_range(1..=2.min(assignments.len()));
    let chosen: Vec<&Vec<String>> = assignments.choose_multiple(rng, starts).collect();
    let parts: Vec<String> = chosen
        .iter()
        .zip(split(rng, starts))
        .map(|(a, p)| format!("{{{}}} : {p}", a.join(", ")))
        .collect();
    out.push_str(&format!("initially {}.\n", parts.join(" ; ")));

    let actions = rng.gen_range(1..=3);
    for i in 0..actions {
        if sensing && i == 0 {
            let (p, p2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let (hit, miss) = (p as f64 / 4.0, (4 - p) as f64 / 4.0);
            let (hit2, miss2) = (p2 as f64 / 4.0, (4 - p2) as f64 / 4.0);
            let cost = rng.gen_range(-2..=0);
            out.push_str(&format!(
                "action sense observes {{q}} : {hit} : {cost} sensing {{r}} ; {{-q}} : {miss} : {cost} sensing {{r}} ; \
                 {{-q}} : {hit2} : {cost} sensing {{-r}} ; {{q}} : {miss2} : {cost} sensing {{-r}}.\n"
            ));
            continue;
        }
        let name = format!("a{i}");
        let mut props = Vec::new();
        match world.choose(rng) {
            Some(c) if rng.gen_bool(0.5) => {
                props.extend(outcomes(rng, &world, &format!("{{{c}}}")));
                props.extend(outcomes(rng, &world, &format!("{{-{c}}}")));
            }
            _ => props.extend(outcomes(rng, &world, "{}")),
        }
        out.push_str(&format!("action {name} causes {}.\n", props.join(" ;\n    ")));
    }
    out.push_str(&format!("discount {}.\n", rng.gen_range(0..=9) as f64 / 10.0));
    out
}

pub fn random_theory(rng: &mut impl Rng) -> ActionTheory {
    let text = random_theory_text(rng);
    parse_theory(&text).unwrap_or_else(|e| panic!("generated theory does not parse: {e}\n{text}"))
}

/// `count` theories from a seeded generator; the same seed gives the same
/// theories.
pub fn seeded_theories(seed: u64, count: usize) -> Vec<ActionTheory> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_theory(&mut rng)).collect()
}

/// A ground program over at most `max_atoms` propositional atoms with
/// constant annotations in quarters. Negative literals only when
/// `negation` is set.
pub fn random_program(rng: &mut impl Rng, max_atoms: usize, negation: bool) -> NpProgram {
    let atoms: Vec<Atom> = (0..rng.gen_range(1..=max_atoms)).map(|i| Atom::prop(&format!("a{i}"))).collect();
    let quarter = |rng: &mut dyn rand::RngCore| Annotation::Const(ratio(rng.gen_range(1..=4), 4));
    let rules = (0..rng.gen_range(1..=8))
        .map(|_| {
            let head = atoms.choose(rng).unwrap().clone();
            let pos = (0..rng.gen_range(0..=2)).map(|_| (atoms.choose(rng).unwrap().clone(), quarter(rng))).collect();
            let neg = if negation {
                (0..rng.gen_range(0..=1)).map(|_| (atoms.choose(rng).unwrap().clone(), Annotation::one())).collect()
            } else {
                Vec::new()
            };
            NpRule { pos, neg, ..NpRule::fact(head, quarter(rng)) }
        })
        .collect();
    NpProgram { rules, strategies: Default::default(), default_strategy: Strategy::Max }
}
