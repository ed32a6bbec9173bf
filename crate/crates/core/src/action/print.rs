use std::fmt::Write;

use super::{ActionKind, ActionTheory};
use crate::rational::render;

pub(super) fn print_theory(t: &ActionTheory) -> String {
    let mut out = String::new();
    if !t.fluents.is_empty() {
        let names: Vec<String> = t.fluents.iter().map(|f| f.to_string()).collect();
        writeln!(out, "fluent {}.", names.join(", ")).unwrap();
    }
    for (var, consts) in &t.domains {
        writeln!(out, "domain {var} = {{{}}}.", consts.join(", ")).unwrap();
    }
    if !t.initial.is_empty() {
        let entries: Vec<String> =
            t.initial.iter().map(|(f, p)| format!("{f} : {}", render(p))).collect();
        writeln!(out, "initially {}.", entries.join(" ; ")).unwrap();
    }
    for a in &t.actions {
        let (verb, cond) = match a.kind {
            ActionKind::NonSensing => ("causes", "if"),
            ActionKind::Sensing => ("observes", "sensing"),
        };
        let clauses: Vec<String> = a
            .outcomes
            .iter()
            .map(|o| {
                format!("{} : {} : {} {cond} {}", o.effect, render(&o.prob), render(&o.reward), o.condition)
            })
            .collect();
        writeln!(out, "action {} {verb} {}.", a.name, clauses.join(" ;\n    ")).unwrap();
        if !a.executability.is_empty() {
            writeln!(out, "executable {} if {}.", a.name, a.executability).unwrap();
        }
    }
    writeln!(out, "discount {}.", render(&t.discount)).unwrap();
    if let Some(g) = &t.goal {
        writeln!(out, "goal {g}.").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use crate::action::fixtures::TIGER;
    use crate::action::parse_theory;

    #[test]
    fn tiger_round_trips() {
        let t = parse_theory(TIGER).unwrap();
        let text = t.to_text();
        assert_eq!(parse_theory(&text).unwrap(), t);
        assert_eq!(parse_theory(&text).unwrap().to_text(), text);
    }

    #[test]
    fn prints_goal_domains_and_executability() {
        let src = "fluent at(D), done.\ndomain D = {a, b}.\ninitially {done} : 1/3 ; {-done} : 2/3.\n\
                   action go(D) causes {at(D)} : 1 : 0 if {}.\nexecutable go(D) if {-done}.\n\
                   discount 0.5.\ngoal {done}.";
        let t = parse_theory(src).unwrap();
        assert_eq!(parse_theory(&t.to_text()).unwrap(), t);
        assert!(t.to_text().contains("executable go(D) if {-done}."));
    }
}
