use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::nhplp::{Annotation, Atom, NpProgram, NpRule, Origin};

use super::PROBABILISTIC_SCHEMAS;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NormalRule {
    pub head: Atom,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
    pub origin: Option<Origin>,
}

/// A ground normal logic program: every annotation is 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalProgram {
    pub rules: Vec<NormalRule>,
}

impl NormalProgram {
    /// Accepts ground np-programs whose annotations are all 1.
    pub fn from_np(p: &NpProgram) -> Result<Self> {
        let mut rules = Vec::with_capacity(p.rules.len());
        for r in &p.rules {
            let unit = r.head_ann.is_one() && r.pos.iter().chain(&r.neg).all(|(_, a)| a.is_one());
            if !unit {
                return Err(Error::NonUnitAnnotation(r.to_string()));
            }
            if !r.is_ground() || !r.guards.is_empty() {
                return Err(Error::UnboundedSort(format!("rule {r} is not ground")));
            }
            let atoms = |v: &[(Atom, Annotation)]| v.iter().map(|(a, _)| a.clone()).collect();
            rules.push(NormalRule { head: r.head.clone(), pos: atoms(&r.pos), neg: atoms(&r.neg), origin: r.origin });
        }
        Ok(NormalProgram { rules })
    }

    pub fn to_np(&self) -> NpProgram {
        let plain = |v: &[Atom]| v.iter().map(|a| (a.clone(), Annotation::one())).collect();
        NpProgram::new(
            self.rules
                .iter()
                .map(|r| NpRule {
                    pos: plain(&r.pos),
                    neg: plain(&r.neg),
                    origin: r.origin,
                    ..NpRule::fact(r.head.clone(), Annotation::one())
                })
                .collect(),
        )
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.insert(r.head.clone());
            out.extend(r.pos.iter().cloned());
            out.extend(r.neg.iter().cloned());
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.to_np().to_text()
    }
}

/// Deletes the probability and value rules of a compiled program and keeps
/// the rest as a normal program.
pub fn normalize(p: &NpProgram) -> Result<NormalProgram> {
    let mut kept = NpProgram::default();
    for r in &p.rules {
        match r.origin {
            None => return Err(Error::MissingOrigin(r.to_string())),
            Some(Origin::Schema(k)) if PROBABILISTIC_SCHEMAS.contains(&k) => {}
            Some(_) => kept.rules.push(r.clone()),
        }
    }
    NormalProgram::from_np(&kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fixtures::TIGER;
    use crate::action::parse_theory;
    use crate::nhplp::{enumerate_answer_sets, parse_program};
    use crate::translator::compile;

    fn occ_projection(sets: &[crate::nhplp::PInterpretation]) -> BTreeSet<Vec<String>> {
        sets.iter()
            .map(|h| h.keys().filter(|a| a.pred == "occ").map(|a| a.to_string()).collect())
            .collect()
    }

    #[test]
    fn drops_probabilistic_rules_only() {
        let p = compile(&parse_theory(TIGER).unwrap(), 1).unwrap();
        let normal = normalize(&p).unwrap();
        let preds: BTreeSet<&str> = normal.rules.iter().map(|r| r.head.pred.as_str()).collect();
        assert!(!preds.contains("state") && !preds.contains("reward"));
        assert!(normal.rules.iter().all(|r| r.head.pred != "value" || r.pos.is_empty()));
        for p in ["occ", "abocc", "holds", "observed", "exec", "inconsistent"] {
            assert!(preds.contains(p), "{p}");
        }
        assert_eq!(normal.rules.len(), p.rules.len() - 2 - 4 - 4 - 8 - 4 - 4);
    }

    #[test]
    fn program_without_probabilistic_rules_only_loses_annotations() {
        let p = parse_program("[27] a <- not b.\n[fluent] b <- c.").unwrap();
        let n = normalize(&p).unwrap();
        assert_eq!(n.to_np(), p);
        assert!(matches!(normalize(&parse_program("a.").unwrap()), Err(Error::MissingOrigin(_))));
        assert!(matches!(normalize(&parse_program("[6] a:0.5.").unwrap()), Err(Error::NonUnitAnnotation(_))));
    }

    #[test]
    fn occ_projections_survive_normalization() {
        let t = parse_theory(TIGER).unwrap();
        for n in 1..=2 {
            let p = compile(&t, n).unwrap();
            let full = enumerate_answer_sets(&p).unwrap();
            let normal = enumerate_answer_sets(&normalize(&p).unwrap().to_np()).unwrap();
            assert_eq!(full.len(), 2 * 8usize.pow(n as u32));
            assert_eq!(normal.len(), full.len());
            assert_eq!(occ_projection(&full), occ_projection(&normal));
        }
    }
}
