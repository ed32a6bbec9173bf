use std::collections::{BTreeMap, BTreeSet};

use super::{
    is_variable, outcome_id, ActionDecl, ActionKind, ActionTheory, ConjFormula, Literal, Name,
    Outcome,
};
use crate::error::ParseError;
use crate::rational::{self, Rat};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Colon,
    Semi,
    Dot,
    Eq,
    Minus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let digit_at = |j: usize| chars.get(j).is_some_and(|c| c.is_ascii_digit());
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: start_line, column: start_col });
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' || c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let starts_number = c.is_ascii_digit()
            || (c == '.' && digit_at(i + 1))
            || (c == '-' && (digit_at(i + 1) || (chars.get(i + 1) == Some(&'.') && digit_at(i + 2))));
        if starts_number {
            let begin = i;
            if c == '-' {
                i += 1;
            }
            while digit_at(i) {
                i += 1;
            }
            if matches!(chars.get(i), Some('.' | '/')) && digit_at(i + 1) {
                i += 1;
                while digit_at(i) {
                    i += 1;
                }
            }
            let s: String = chars[begin..i].iter().collect();
            col += i - begin;
            push(&mut out, Tok::Number(s));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[begin..i].iter().collect();
            col += i - begin;
            push(&mut out, Tok::Ident(s));
            continue;
        }
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            '.' => Tok::Dot,
            '=' => Tok::Eq,
            '-' => Tok::Minus,
            other => {
                return Err(ParseError {
                    line,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        push(&mut out, tok);
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    fluents: Vec<Name>,
    fluent_keys: BTreeSet<(String, usize)>,
    domains: BTreeMap<String, Vec<String>>,
    initial: Option<Vec<(ConjFormula, Rat)>>,
    executability: BTreeMap<Name, (ConjFormula, usize, usize)>,
    actions: Vec<ActionDecl>,
    discount: Option<Rat>,
    goal: Option<ConjFormula>,
}

/// Parses a theory from its concrete syntax.
///
/// ```text
/// fluent tl, htl.
/// initially {tl, htl} : 0.5 ; {-tl, -htl} : 0.5.
/// executable listen if {}.
/// action openL causes {tl} : 1 : -100 if {tl} ; {-tl} : 1 : 10 if {-tl}.
/// action listen observes {tl} : 0.85 : -1 sensing {htl} ; ...
/// discount 0.9.
/// ```
pub fn parse_theory(text: &str) -> Result<ActionTheory, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        fluents: Vec::new(),
        fluent_keys: BTreeSet::new(),
        domains: BTreeMap::new(),
        initial: None,
        executability: BTreeMap::new(),
        actions: Vec::new(),
        discount: None,
        goal: None,
    };
    while p.peek() != &Tok::Eof {
        p.declaration()?;
        if p.peek() == &Tok::Dot {
            p.bump();
        }
    }
    p.finish()
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, (line, column): (usize, usize), message: impl Into<String>) -> ParseError {
        ParseError { line, column, message: message.into() }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error_at(self.here(), format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn declaration(&mut self) -> Result<(), ParseError> {
        let at = self.here();
        let kw = self.ident("a declaration keyword")?;
        match kw.as_str() {
            "fluent" => self.fluent_decl(),
            "domain" => self.domain_decl(at),
            "initially" => self.initially_decl(at),
            "executable" => self.executable_decl(at),
            "action" => self.action_decl(at),
            "discount" => self.discount_decl(at),
            "goal" => self.goal_decl(at),
            other => Err(self.error_at(at, format!("unknown declaration `{other}`"))),
        }
    }

    fn name(&mut self, allow_vars: bool) -> Result<Name, ParseError> {
        let at = self.here();
        let head = self.ident("a name")?;
        if is_variable(&head) {
            return Err(self.error_at(at, format!("expected a name, found variable `{head}`")));
        }
        let mut args = Vec::new();
        if self.peek() == &Tok::LParen {
            self.bump();
            loop {
                let at = self.here();
                let arg = match self.peek().clone() {
                    Tok::Ident(s) => {
                        self.bump();
                        s
                    }
                    Tok::Number(s) if !s.contains(['.', '/', '-']) => {
                        self.bump();
                        s
                    }
                    _ => return Err(self.unexpected("an argument")),
                };
                if is_variable(&arg) && !allow_vars {
                    return Err(self.error_at(at, format!("variable `{arg}` not allowed here")));
                }
                args.push(arg);
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(Name { head, args })
    }

    fn fluent_decl(&mut self) -> Result<(), ParseError> {
        loop {
            let at = self.here();
            let name = self.name(true)?;
            if !self.fluent_keys.insert((name.head.clone(), name.args.len())) {
                return Err(self.error_at(at, format!("duplicate declaration of fluent {name}")));
            }
            self.fluents.push(name);
            if self.peek() == &Tok::Comma {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn domain_decl(&mut self, at: (usize, usize)) -> Result<(), ParseError> {
        let var_at = self.here();
        let var = self.ident("a variable")?;
        if !is_variable(&var) {
            return Err(self.error_at(var_at, format!("domain name `{var}` must start with an upper-case letter")));
        }
        self.expect(Tok::Eq)?;
        self.expect(Tok::LBrace)?;
        let mut consts = Vec::new();
        loop {
            let c_at = self.here();
            let c = match self.peek().clone() {
                Tok::Ident(s) if !is_variable(&s) => {
                    self.bump();
                    s
                }
                Tok::Number(s) if !s.contains(['.', '/', '-']) => {
                    self.bump();
                    s
                }
                _ => return Err(self.unexpected("a constant")),
            };
            if consts.contains(&c) {
                return Err(self.error_at(c_at, format!("duplicate constant `{c}` in domain {var}")));
            }
            consts.push(c);
            if self.peek() == &Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        if self.domains.insert(var.clone(), consts).is_some() {
            return Err(self.error_at(at, format!("duplicate declaration of domain {var}")));
        }
        Ok(())
    }

    fn literal(&mut self, allow_vars: bool) -> Result<Literal, ParseError> {
        let negative = if self.peek() == &Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let at = self.here();
        let fluent = self.name(allow_vars)?;
        if !self.fluent_keys.contains(&(fluent.head.clone(), fluent.args.len())) {
            return Err(self.error_at(at, format!("undeclared fluent {fluent}")));
        }
        Ok(if negative { Literal::neg(fluent) } else { Literal::pos(fluent) })
    }

    /// `{ lit, ... }`; `role` names the formula in the consistency error.
    fn formula(&mut self, allow_vars: bool, role: &str) -> Result<ConjFormula, ParseError> {
        let at = self.here();
        self.expect(Tok::LBrace)?;
        let mut lits = Vec::new();
        if self.peek() != &Tok::RBrace {
            loop {
                lits.push(self.literal(allow_vars)?);
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        let shown: Vec<String> = lits.iter().map(|l| l.to_string()).collect();
        ConjFormula::new(lits).map_err(|_| {
            self.error_at(at, format!("inconsistent {role} formula {{{}}}", shown.join(",")))
        })
    }

    fn number(&mut self, what: &str) -> Result<Rat, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Number(s) => {
                self.bump();
                rational::parse(&s).ok_or_else(|| self.error_at(at, format!("malformed number `{s}`")))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn probability(&mut self) -> Result<Rat, ParseError> {
        let at = self.here();
        let p = self.number("a probability")?;
        if !rational::in_unit_interval(&p) {
            return Err(self.error_at(at, format!("probability {} out of range [0,1]", rational::render(&p))));
        }
        Ok(p)
    }

    fn initially_decl(&mut self, at: (usize, usize)) -> Result<(), ParseError> {
        if self.initial.is_some() {
            return Err(self.error_at(at, "duplicate declaration of initially"));
        }
        let mut entries = Vec::new();
        loop {
            let formula = self.formula(false, "initial")?;
            self.expect(Tok::Colon)?;
            let p = self.probability()?;
            entries.push((formula, p));
            if self.peek() == &Tok::Semi {
                self.bump();
            } else {
                break;
            }
        }
        self.initial = Some(entries);
        Ok(())
    }

    fn executable_decl(&mut self, at: (usize, usize)) -> Result<(), ParseError> {
        let name = self.name(true)?;
        self.keyword("if")?;
        let formula = self.formula(true, "executability")?;
        if self.executability.contains_key(&name) {
            return Err(self.error_at(at, format!("duplicate declaration of executable {name}")));
        }
        self.executability.insert(name, (formula, at.0, at.1));
        Ok(())
    }

    fn action_decl(&mut self, at: (usize, usize)) -> Result<(), ParseError> {
        let name = self.name(true)?;
        if self.actions.iter().any(|a| a.name == name) {
            return Err(self.error_at(at, format!("duplicate declaration of action {name}")));
        }
        let kind_at = self.here();
        let kind = match self.ident("`causes` or `observes`")?.as_str() {
            "causes" => ActionKind::NonSensing,
            "observes" => ActionKind::Sensing,
            other => {
                return Err(self.error_at(kind_at, format!("expected `causes` or `observes`, found `{other}`")))
            }
        };
        let (role, cond_kw) = match kind {
            ActionKind::NonSensing => ("effect", "if"),
            ActionKind::Sensing => ("observation", "sensing"),
        };
        let mut outcomes = Vec::new();
        loop {
            let effect = self.formula(true, role)?;
            self.expect(Tok::Colon)?;
            let prob = self.probability()?;
            self.expect(Tok::Colon)?;
            let reward = self.number("a reward")?;
            self.keyword(cond_kw)?;
            let condition = self.formula(true, "condition")?;
            outcomes.push(Outcome {
                id: outcome_id(&name, outcomes.len() + 1),
                effect,
                prob,
                reward,
                condition,
            });
            if self.peek() == &Tok::Semi {
                self.bump();
            } else {
                break;
            }
        }
        self.actions.push(ActionDecl { name, kind, outcomes, executability: ConjFormula::empty() });
        Ok(())
    }

    fn discount_decl(&mut self, at: (usize, usize)) -> Result<(), ParseError> {
        if self.discount.is_some() {
            return Err(self.error_at(at, "duplicate declaration of discount"));
        }
        self.discount = Some(self.number("a discount factor")?);
        Ok(())
    }

    fn goal_decl(&mut self, at: (usize, usize)) -> Result<(), ParseError> {
        if self.goal.is_some() {
            return Err(self.error_at(at, "duplicate declaration of goal"));
        }
        self.goal = Some(self.formula(false, "goal")?);
        Ok(())
    }

    fn finish(mut self) -> Result<ActionTheory, ParseError> {
        let end = self.here();
        for (name, (formula, line, column)) in std::mem::take(&mut self.executability) {
            match self.actions.iter_mut().find(|a| a.name == name) {
                Some(action) => action.executability = formula,
                None => {
                    return Err(self.error_at((line, column), format!("executable for undeclared action {name}")))
                }
            }
        }
        let discount = self.discount.ok_or_else(|| ParseError {
            line: end.0,
            column: end.1,
            message: "missing discount declaration".into(),
        })?;
        Ok(ActionTheory {
            fluents: self.fluents,
            domains: self.domains,
            initial: self.initial.unwrap_or_default(),
            actions: self.actions,
            discount,
            goal: self.goal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fixtures::TIGER;
    use crate::rational::{int, ratio};

    #[test]
    fn parses_tiger() {
        let t = parse_theory(TIGER).unwrap();
        assert_eq!(t.fluents, vec![Name::atom("tl"), Name::atom("htl")]);
        assert_eq!(t.actions.len(), 3);
        assert_eq!(t.outcome_count(), 8);
        assert_eq!(t.initial.len(), 2);
        assert_eq!(t.discount, ratio(9, 10));
        let listen = t.action(&Name::atom("listen")).unwrap();
        assert!(listen.is_sensing());
        assert_eq!(listen.outcomes[0].prob, ratio(17, 20));
        assert_eq!(listen.outcomes[1].id.to_string(), "listen_2");
        let open_l = t.action(&Name::atom("openL")).unwrap();
        assert_eq!(open_l.outcomes[0].reward, int(-100));
        assert_eq!(open_l.outcomes[1].reward, int(10));
        assert!(open_l.executability.is_empty());
    }

    #[test]
    fn inconsistent_effect_is_rejected() {
        let text = "fluent tl.\naction openL causes { tl, -tl } : 1 : 0 if {}\ndiscount 0.9";
        let err = parse_theory(text).unwrap_err();
        assert_eq!((err.line, err.column), (2, 21));
        assert!(err.message.contains("inconsistent effect formula"), "{err}");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_theory("fluent a.\n  initially {a} 0.5").unwrap_err();
        assert_eq!((err.line, err.column), (2, 17));
        let err = parse_theory("fluent a.\ninitially {b}:1.\ndiscount 0").unwrap_err();
        assert_eq!(err.message, "undeclared fluent b");
        let err = parse_theory("fluent a.\ninitially {a}:1.5.\ndiscount 0").unwrap_err();
        assert!(err.message.contains("out of range"));
        let err = parse_theory("fluent a.\nfluent a.").unwrap_err();
        assert!(err.message.starts_with("duplicate declaration"));
        let err = parse_theory("fluent a.").unwrap_err();
        assert!(err.message.contains("missing discount"));
    }

    #[test]
    fn rejects_duplicate_actions_and_dangling_executability() {
        let base = "fluent a.\ndiscount 0.5.\n";
        let dup = format!("{base}action x causes {{a}}:1:0 if {{}}.\naction x causes {{a}}:1:0 if {{}}.");
        assert!(parse_theory(&dup).unwrap_err().message.contains("duplicate declaration of action x"));
        let dangling = format!("{base}executable y if {{}}.");
        assert!(parse_theory(&dangling).unwrap_err().message.contains("undeclared action y"));
    }

    #[test]
    fn accepts_fractions_and_variables() {
        let text = "fluent open(D).\ndomain D = {left, right}.\n\
                    action push(D) causes {open(D)} : 1/1 : -1/2 if {}.\ndiscount 3/4";
        let t = parse_theory(text).unwrap();
        assert_eq!(t.discount, ratio(3, 4));
        assert_eq!(t.actions[0].outcomes[0].reward, ratio(-1, 2));
        assert_eq!(t.actions[0].outcomes[0].id.to_string(), "push_1(D)");
        assert_eq!(t.domains["D"], vec!["left", "right"]);
    }

    #[test]
    fn empty_executability_is_true() {
        let t = parse_theory("fluent a.\naction x causes {a}:1:0 if {}.\nexecutable x if {}.\ndiscount 0").unwrap();
        assert_eq!(t.actions[0].executability, ConjFormula::empty());
    }
}
