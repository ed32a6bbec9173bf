use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use apo_core::action::{ground_theory, parse_theory, validate_theory, ActionTheory, Violation};
use apo_core::nhplp::{enumerate_answer_sets, interpretation_json, parse_program, NpProgram, PInterpretation, Strategy};
use apo_core::policy::{best_policy_in, cross_check_program, CheckReport};
use apo_core::pomdp::{belief_recursive_value, initial_belief, optimal_policy_in, serialize_belief, PolicyClass};
use apo_core::rational::{self, in_unit_interval, int, render, to_f64, Rat};
use apo_core::translator::{self, normalize as normalize_program, to_sat};
use apo_core::Error;
use serde_json::{json, Value};

use crate::{Class, Common, Format, Options};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;
pub const EXIT_CHECK: u8 = 4;

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: EXIT_INPUT, error: error.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Horizon { .. } | Error::ProgramSyntax { .. } | Error::Dimacs(_) => EXIT_INPUT,
            Error::InvalidTheory(_) | Error::NoDomain(_) | Error::IncompleteState(_) | Error::InconsistentState(_) => {
                EXIT_INVALID
            }
            _ => EXIT_INTERNAL,
        };
        Failure { code, error: e.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(anyhow!("cannot read {}: {e}", path.display())))
}

fn emit(opts: &Options, text: &str) -> Result<(), Failure> {
    match &opts.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(anyhow!("cannot write {}: {e}", path.display())))
}

fn emit_json(opts: &Options, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure { code: EXIT_INTERNAL, error: e.into() })?;
    text.push('\n');
    emit(opts, &text)
}

fn discount_override(opts: &Options) -> Result<Option<Rat>, Failure> {
    let Some(text) = &opts.discount else { return Ok(None) };
    match rational::parse(text) {
        Some(q) if in_unit_interval(&q) && q != int(1) => Ok(Some(q)),
        _ => Err(Failure::input(anyhow!("discount `{text}` is not a number in [0,1)"))),
    }
}

fn horizon(opts: &Options) -> Result<usize, Failure> {
    if opts.horizon == 0 {
        return Err(Error::Horizon { min: 1, got: 0 }.into());
    }
    Ok(opts.horizon)
}

fn strategy(opts: &Options) -> Strategy {
    opts.strategy.unwrap_or(Strategy::Max)
}

fn violations_text(vs: &[Violation]) -> String {
    vs.iter().map(|v| format!("{}: {}: {}\n", v.decl, v.rule, v.message)).collect()
}

/// Parses, applies the discount override and validates.
fn load_theory(c: &Common) -> Result<ActionTheory, Failure> {
    let text = read(&c.input)?;
    let mut theory = parse_theory(&text).map_err(|e| Failure::input(anyhow!("{}: {e}", c.input.display())))?;
    if let Some(d) = discount_override(&c.options)? {
        theory.discount = d;
    }
    let violations = validate_theory(&theory);
    if !violations.is_empty() {
        return Err(Failure { code: EXIT_INVALID, error: anyhow!("invalid theory:\n{}", violations_text(&violations)) });
    }
    Ok(theory)
}

fn compiled(c: &Common, theory: &ActionTheory) -> Result<NpProgram, Failure> {
    let mut p = translator::compile(theory, horizon(&c.options)?)?;
    p.default_strategy = strategy(&c.options);
    Ok(p)
}

/// Fields every theory-based JSON output carries.
fn context(theory: &ActionTheory, n: Option<usize>) -> Value {
    let mut v = json!({ "discount": to_f64(&theory.discount), "discount_exact": render(&theory.discount) });
    if let Some(n) = n {
        v["horizon"] = json!(n);
    }
    v
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn header(theory: &ActionTheory, n: usize, comment: &str) -> String {
    format!("{comment} horizon {n}, discount {}\n", render(&theory.discount))
}

pub fn validate(c: &Common) -> Outcome {
    let text = read(&c.input)?;
    let (ctx, vs, code) = match parse_theory(&text) {
        Err(e) => {
            let v = Violation { decl: format!("line {}, column {}", e.line, e.column), rule: "syntax".into(), message: e.message };
            (json!({}), vec![v], EXIT_INPUT)
        }
        Ok(mut theory) => {
            if let Some(d) = discount_override(&c.options)? {
                theory.discount = d;
            }
            let vs = validate_theory(&theory);
            let code = if vs.is_empty() { 0 } else { EXIT_INVALID };
            (context(&theory, None), vs, code)
        }
    };
    match c.options.format {
        Format::Json => emit_json(&c.options, &merge(ctx, json!({ "valid": vs.is_empty(), "violations": vs })))?,
        Format::Text => emit(&c.options, &if vs.is_empty() { "valid\n".to_string() } else { violations_text(&vs) })?,
    }
    Ok(code)
}

pub fn ground(c: &Common) -> Outcome {
    let theory = ground_theory(&load_theory(c)?)?;
    let text = theory.to_text();
    match c.options.format {
        Format::Json => emit_json(&c.options, &merge(context(&theory, None), json!({ "theory": text })))?,
        Format::Text => emit(&c.options, &text)?,
    }
    Ok(0)
}

fn program_output(c: &Common, theory: &ActionTheory, rules: usize, text: String) -> Outcome {
    let n = c.options.horizon;
    match c.options.format {
        Format::Json => {
            let extra = json!({ "strategy": strategy(&c.options), "rules": rules, "program": text });
            emit_json(&c.options, &merge(context(theory, Some(n)), extra))?;
        }
        Format::Text => emit(&c.options, &(header(theory, n, "%") + &text))?,
    }
    Ok(0)
}

pub fn compile(c: &Common) -> Outcome {
    let theory = load_theory(c)?;
    let p = compiled(c, &theory)?;
    program_output(c, &theory, p.rules.len(), p.to_text())
}

pub fn normalize(c: &Common) -> Outcome {
    let theory = load_theory(c)?;
    let normal = normalize_program(&compiled(c, &theory)?)?;
    program_output(c, &theory, normal.rules.len(), normal.to_text())
}

fn map_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".map.json");
    PathBuf::from(name)
}

pub fn sat(c: &Common) -> Outcome {
    let theory = load_theory(c)?;
    let cnf = to_sat(&normalize_program(&compiled(c, &theory)?)?)?;
    let dimacs = cnf.to_dimacs();
    let map = cnf.atom_map_json();
    let n = c.options.horizon;
    match c.options.format {
        Format::Json => {
            let extra = json!({
                "variables": cnf.variable_count,
                "clauses": cnf.clauses.len(),
                "dimacs": dimacs,
                "atom_map": map,
            });
            emit_json(&c.options, &merge(context(&theory, Some(n)), extra))?;
        }
        Format::Text => {
            let mut text = header(&theory, n, "c");
            match &c.options.out {
                Some(out) => {
                    let map_text = serde_json::to_string_pretty(&map).expect("atom map serializes") + "\n";
                    write_file(&map_path(out), &map_text)?;
                }
                None => {
                    for (i, a) in cnf.atoms.iter().enumerate() {
                        writeln!(text, "c {} {a}", i + 1).unwrap();
                    }
                }
            }
            emit(&c.options, &(text + &dimacs))?;
        }
    }
    Ok(0)
}

fn is_program_file(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("np" | "lp"))
}

fn interpretation_text(h: &PInterpretation) -> String {
    let parts: Vec<String> =
        h.iter().map(|(a, p)| if *p == int(1) { a.to_string() } else { format!("{a}:{}", render(p)) }).collect();
    format!("{{{}}}\n", parts.join(", "))
}

pub fn solve(c: &Common, normal: bool) -> Outcome {
    let (program, ctx) = if is_program_file(&c.input) {
        let mut p = parse_program(&read(&c.input)?)?;
        if let Some(s) = c.options.strategy {
            p.default_strategy = s;
        }
        (p, json!({}))
    } else {
        let theory = load_theory(c)?;
        (compiled(c, &theory)?, context(&theory, Some(c.options.horizon)))
    };
    let program = if normal { normalize_program(&program).map_err(Failure::input)?.to_np() } else { program };
    let sets = enumerate_answer_sets(&program)?;
    match c.options.format {
        Format::Json => {
            let extra = json!({
                "normal": normal,
                "count": sets.len(),
                "answer_sets": sets.iter().map(interpretation_json).collect::<Vec<_>>(),
            });
            emit_json(&c.options, &merge(ctx, extra))?;
        }
        Format::Text => {
            let text: String = sets.iter().map(interpretation_text).collect();
            emit(&c.options, &format!("{text}% {} answer sets\n", sets.len()))?;
        }
    }
    Ok(0)
}

fn class(c: Class) -> PolicyClass {
    match c {
        Class::Plan => PolicyClass::Plan,
        Class::Stationary => PolicyClass::Stationary,
    }
}

pub fn policy(c: &Common, cls: Class) -> Outcome {
    let theory = load_theory(c)?;
    let n = horizon(&c.options)?;
    let best = best_policy_in(&theory, n, class(cls), strategy(&c.options))?;
    match c.options.format {
        Format::Json => {
            let extra = json!({ "class": class(cls), "strategy": strategy(&c.options), "best": best });
            emit_json(&c.options, &merge(context(&theory, Some(n)), extra))?;
        }
        Format::Text => {
            let text = format!(
                "{}policy {}\nvalue {}\ncontributors {}\n",
                header(&theory, n, "%"),
                best.policy,
                render(&best.value),
                best.contributors.len()
            );
            emit(&c.options, &text)?;
        }
    }
    Ok(0)
}

pub fn oracle(c: &Common, cls: Class) -> Outcome {
    let theory = ground_theory(&load_theory(c)?)?;
    let n = horizon(&c.options)?;
    let (policy, value) = optimal_policy_in(&theory, n, class(cls))?;
    let b0 = initial_belief(&theory)?;
    let recursive = belief_recursive_value(&theory, &policy, n, &b0)?;
    match c.options.format {
        Format::Json => {
            let extra = json!({
                "class": class(cls),
                "policy": policy,
                "value": to_f64(&value),
                "value_exact": render(&value),
                "recursive_value": to_f64(&recursive),
                "recursive_value_exact": render(&recursive),
                "initial_belief": serialize_belief(&b0),
            });
            emit_json(&c.options, &merge(context(&theory, Some(n)), extra))?;
        }
        Format::Text => {
            let text = format!(
                "{}policy {policy}\nvalue {}\nrecursive value {}\n",
                header(&theory, n, "%"),
                render(&value),
                render(&recursive)
            );
            emit(&c.options, &text)?;
        }
    }
    Ok(0)
}

fn report_text(r: &CheckReport) -> String {
    let mut out = format!("horizon {}: {} answer sets, {} valid\n", r.horizon, r.answer_sets, r.valid_answer_sets);
    for check in &r.checks {
        writeln!(out, "{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail).unwrap();
        for w in &check.counterexamples {
            writeln!(out, "    {w}").unwrap();
        }
    }
    out
}

pub fn check(c: &Common) -> Outcome {
    let theory = load_theory(c)?;
    let n = horizon(&c.options)?;
    let report = cross_check_program(&theory, n, compiled(c, &theory)?)?;
    match c.options.format {
        Format::Json => {
            let extra = serde_json::to_value(&report).expect("report serializes");
            emit_json(&c.options, &merge(context(&theory, Some(n)), extra))?;
        }
        Format::Text => emit(&c.options, &(header(&theory, n, "%") + &report_text(&report)))?,
    }
    Ok(if report.passed { 0 } else { EXIT_CHECK })
}

pub fn fuzz(opts: &Options, count: usize) -> Outcome {
    let n = horizon(opts)?;
    let discount = discount_override(opts)?;
    let mut failures = Vec::new();
    for (i, mut theory) in apo_core::fuzz::seeded_theories(opts.seed, count).into_iter().enumerate() {
        if let Some(d) = &discount {
            theory.discount = d.clone();
        }
        let mut program = translator::compile(&theory, n)?;
        program.default_strategy = strategy(opts);
        let report = cross_check_program(&theory, n, program)?;
        if !report.passed {
            failures.push((i, theory.to_text(), report));
        }
    }
    match opts.format {
        Format::Json => {
            let list: Vec<Value> =
                failures.iter().map(|(i, t, r)| json!({ "index": i, "theory": t, "report": r })).collect();
            let value = json!({
                "seed": opts.seed,
                "count": count,
                "horizon": n,
                "passed": failures.is_empty(),
                "failures": list,
            });
            emit_json(opts, &value)?;
        }
        Format::Text => {
            let mut text = format!("seed {}, {count} theories, horizon {n}: {} failures\n", opts.seed, failures.len());
            for (i, t, r) in &failures {
                write!(text, "theory {i}:\n{t}{}", report_text(r)).unwrap();
            }
            emit(opts, &text)?;
        }
    }
    Ok(if failures.is_empty() { 0 } else { EXIT_CHECK })
}
