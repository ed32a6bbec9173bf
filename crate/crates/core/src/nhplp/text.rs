//! Line-oriented text format for np-programs:
//!
//! ```text
//! #default max.
//! #strategy state indep.
//! [18] state(1):0.85*U <- state(0):U, occ(listen_1,0), not blocked(0), X != Y.
//! ```

use std::fmt::Write;

use super::{Annotation, Atom, Guard, GuardOp, NpProgram, NpRule, Origin, Strategy, Term};
use crate::error::{Error, Result};
use crate::rational;

pub(super) fn print_program(p: &NpProgram) -> String {
    let mut out = String::new();
    if p.default_strategy != Strategy::Max {
        writeln!(out, "#default {}.", p.default_strategy.name()).unwrap();
    }
    for (pred, s) in &p.strategies {
        writeln!(out, "#strategy {pred} {}.", s.name()).unwrap();
    }
    for r in &p.rules {
        writeln!(out, "{}", print_rule(r)).unwrap();
    }
    out
}

fn lit(a: &Atom, ann: &Annotation) -> String {
    if ann.is_one() {
        a.to_string()
    } else {
        format!("{a}:{ann}")
    }
}

pub fn print_rule(r: &NpRule) -> String {
    let mut s = String::new();
    if let Some(o) = r.origin {
        write!(s, "[{o}] ").unwrap();
    }
    s.push_str(&lit(&r.head, &r.head_ann));
    let mut body: Vec<String> = r.pos.iter().map(|(a, ann)| lit(a, ann)).collect();
    body.extend(r.neg.iter().map(|(a, ann)| format!("not {}", lit(a, ann))));
    body.extend(r.guards.iter().map(|g| g.to_string()));
    if !body.is_empty() {
        write!(s, " <- {}", body.join(", ")).unwrap();
    }
    s.push('.');
    s
}

impl std::fmt::Display for NpRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_rule(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Str(String),
    Num(String),
    Punct(&'static str),
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(text: &str) -> Result<Lexer> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let digit = |j: usize| chars.get(j).is_some_and(|c| c.is_ascii_digit());
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && digit(i + 1)) {
            let start = i;
            i += 1;
            while digit(i) {
                i += 1;
            }
            if (chars.get(i) == Some(&'.') || chars.get(i) == Some(&'/')) && digit(i + 1) {
                i += 1;
                while digit(i) {
                    i += 1;
                }
            }
            toks.push((Tok::Num(chars[start..i].iter().collect()), line));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let tok = if c.is_ascii_uppercase() { Tok::Var(s) } else { Tok::Ident(s) };
            toks.push((tok, line));
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            if i == chars.len() {
                return Err(Error::ProgramSyntax { line, message: "unterminated string".into() });
            }
            toks.push((Tok::Str(chars[start..i].iter().collect()), line));
            i += 1;
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let punct: &'static str = match two.as_str() {
            "<-" => "<-",
            "!=" => "!=",
            "<=" => "<=",
            _ => match c {
                '(' => "(",
                ')' => ")",
                ',' => ",",
                '.' => ".",
                ':' => ":",
                '[' => "[",
                ']' => "]",
                '#' => "#",
                '+' => "+",
                '*' => "*",
                '^' => "^",
                '=' => "=",
                '<' => "<",
                _ => return Err(Error::ProgramSyntax { line, message: format!("unexpected character `{c}`") }),
            },
        };
        i += punct.len();
        toks.push((Tok::Punct(punct), line));
    }
    toks.push((Tok::Eof, line));
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn line(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::ProgramSyntax { line: self.line(), message: message.into() })
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if self.is(p) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{p}`, found {:?}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            other => self.err(format!("expected an identifier, found {other:?}")),
        }
    }

    fn number(&self, s: &str) -> Result<rational::Rat> {
        rational::parse(s).map_or_else(|| self.err(format!("malformed number `{s}`")), Ok)
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.product()?;
        while self.is("+") {
            self.bump();
            t = Term::sum(t, self.product()?);
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<Term> {
        let mut t = self.power()?;
        while self.is("*") {
            self.bump();
            t = Term::product(t, self.power()?);
        }
        Ok(t)
    }

    fn power(&mut self) -> Result<Term> {
        let base = self.primary()?;
        if self.is("^") {
            self.bump();
            return Ok(Term::pow(base, self.primary()?));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.bump() {
            Tok::Num(s) => Ok(Term::Num(self.number(&s)?)),
            Tok::Var(v) => Ok(Term::Var(v)),
            Tok::Str(s) => Ok(Term::Sym(s)),
            Tok::Ident(name) => {
                if self.is("(") {
                    Ok(Term::Func(name, self.args()?))
                } else {
                    Ok(Term::Sym(name))
                }
            }
            Tok::Punct("(") => {
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            other => self.err(format!("expected a term, found {other:?}")),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>> {
        self.expect("(")?;
        let mut args = vec![self.term()?];
        while self.is(",") {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(")")?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Atom> {
        let pred = self.ident()?;
        let args = if self.is("(") { self.args()? } else { Vec::new() };
        Ok(Atom { pred, args })
    }

    fn annotation(&mut self) -> Result<Annotation> {
        let mut a = self.ann_factor()?;
        while self.is("*") {
            self.bump();
            a = Annotation::product(a, self.ann_factor()?);
        }
        Ok(a)
    }

    fn ann_factor(&mut self) -> Result<Annotation> {
        match self.bump() {
            Tok::Num(s) => {
                let c = self.number(&s)?;
                if !rational::in_unit_interval(&c) {
                    return self.err(format!("annotation {s} outside [0,1]"));
                }
                Ok(Annotation::Const(c))
            }
            Tok::Var(v) => Ok(Annotation::Var(v)),
            Tok::Punct("(") => {
                let a = self.annotation()?;
                self.expect(")")?;
                Ok(a)
            }
            other => self.err(format!("expected an annotation, found {other:?}")),
        }
    }

    fn annotated(&mut self) -> Result<(Atom, Annotation)> {
        let a = self.atom()?;
        if self.is(":") {
            self.bump();
            return Ok((a, self.annotation()?));
        }
        Ok((a, Annotation::one()))
    }

    fn guard_op(&self) -> Option<GuardOp> {
        match self.peek() {
            Tok::Punct("=") => Some(GuardOp::Eq),
            Tok::Punct("!=") => Some(GuardOp::Neq),
            Tok::Punct("<") => Some(GuardOp::Lt),
            Tok::Punct("<=") => Some(GuardOp::Le),
            _ => None,
        }
    }

    fn directive(&mut self, p: &mut NpProgram) -> Result<()> {
        self.expect("#")?;
        match self.ident()?.as_str() {
            "default" => {
                let s = self.ident()?;
                p.default_strategy = s.parse().or_else(|e: String| self.err(e))?;
            }
            "strategy" => {
                let pred = self.ident()?;
                let s = self.ident()?;
                let s: Strategy = s.parse().or_else(|e: String| self.err(e))?;
                p.strategies.insert(pred, s);
            }
            other => return self.err(format!("unknown directive `#{other}`")),
        }
        self.expect(".")
    }

    fn origin(&mut self) -> Result<Option<Origin>> {
        if !self.is("[") {
            return Ok(None);
        }
        self.bump();
        let origin = match self.bump() {
            Tok::Num(n) => match n.parse::<u8>() {
                Ok(k) => Origin::Schema(k),
                Err(_) => return self.err(format!("bad schema tag `{n}`")),
            },
            Tok::Ident(s) if s == "fluent" => Origin::Fluent,
            Tok::Ident(s) if s == "factor" => Origin::Factor,
            Tok::Ident(s) if s == "value0" => Origin::ValueBase,
            other => return self.err(format!("unknown rule tag {other:?}")),
        };
        self.expect("]")?;
        Ok(Some(origin))
    }

    fn rule(&mut self) -> Result<NpRule> {
        let origin = self.origin()?;
        let (head, head_ann) = self.annotated()?;
        let mut rule = NpRule { origin, ..NpRule::fact(head, head_ann) };
        if self.is("<-") {
            self.bump();
            loop {
                self.body_item(&mut rule)?;
                if self.is(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(".")?;
        Ok(rule)
    }

    fn body_item(&mut self, rule: &mut NpRule) -> Result<()> {
        if matches!(self.peek(), Tok::Ident(s) if s == "not")
            && matches!(self.toks.get(self.pos + 1), Some((Tok::Ident(_), _)))
        {
            self.bump();
            rule.neg.push(self.annotated()?);
            return Ok(());
        }
        let start = self.pos;
        let left = self.term()?;
        if let Some(op) = self.guard_op() {
            self.bump();
            let right = self.term()?;
            rule.guards.push(Guard { op, left, right });
            return Ok(());
        }
        self.pos = start;
        rule.pos.push(self.annotated()?);
        Ok(())
    }
}

/// Parses the text format produced by [`NpProgram::to_text`].
pub fn parse_program(text: &str) -> Result<NpProgram> {
    let mut p = Parser { toks: lex(text)?.toks, pos: 0 };
    let mut program = NpProgram::default();
    while *p.peek() != Tok::Eof {
        if p.is("#") {
            p.directive(&mut program)?;
        } else {
            program.rules.push(p.rule()?);
        }
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_every_construct() {
        let src = "#default indep.\n#strategy state max.\n\
                   [18] state(T+1):0.85*U <- state(T):U, occ(listen_1,T), holds(neg(tl),T+1).\n\
                   [6] action(listen_1).\n\
                   [28] abocc(ACi,T) <- action(ACi), occ(ACj,T), ACi != ACj.\n\
                   [26] inconsistent <- holds(F,T), holds(neg(F),T), not inconsistent.\n\
                   [value0] value(0,0).\n\
                   [23] value(V+0.9^T*U*-100,T+1) <- value(V,T), state(T+1):U.\n\
                   a:1/3 <- b:0.25, c, p(\"Upper\").\n";
        let p = parse_program(src).unwrap();
        assert_eq!(p.rules.len(), 7);
        assert_eq!(p.default_strategy, Strategy::Independence);
        assert_eq!(p.strategy("state"), Strategy::Max);
        let printed = p.to_text();
        assert_eq!(parse_program(&printed).unwrap(), p);
        assert!(printed.contains("[23] value(V+0.9^T*U*-100,T+1) <- value(V,T), state(T+1):U."), "{printed}");
        assert!(printed.contains("a:1/3 <- b:0.25, c, p(\"Upper\")."), "{printed}");
    }

    #[test]
    fn reports_line_of_error() {
        let err = parse_program("a.\nb <- c d.").unwrap_err();
        assert!(matches!(err, Error::ProgramSyntax { line: 2, .. }), "{err}");
        assert!(parse_program("a:1.5.").is_err());
    }

    #[test]
    fn arithmetic_precedence_is_preserved() {
        let p = parse_program("v((A+B)*C, A+B*C, 2^(T+1)).").unwrap();
        assert_eq!(p.rules[0].head.to_string(), "v((A+B)*C,A+B*C,2^(T+1))");
    }
}
