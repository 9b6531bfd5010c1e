//! Parsers for the three input formats: rule programs, graph files, and
//! default theories.
//!
//! All parsers abort on the first error and report a [`SourceSpan`]. Input is
//! ASCII; both `\n` and `\r\n` line endings are accepted; `%` starts a line
//! comment.

mod defaults;
mod graph;

pub use defaults::parse_default_theory;
pub use graph::parse_graph;

use crate::ast::{Atom, Cardinality, CmpOp, Comparison, Literal, Program, Rule, Term};
use thiserror::Error;

/// Position of a token in the input, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    fn new(line: usize, column: usize, length: usize) -> Self {
        SourceSpan { line, column, length: length.max(1) }
    }
}

/// Syntax error with location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at line {}, column {}", span.line, span.column)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    Not,
    Dot,
    If,
    Comma,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Cmp(CmpOp),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Var(s) => format!("variable '{s}'"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Not => "'not'".into(),
            Tok::Dot => "'.'".into(),
            Tok::If => "':-'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Cmp(op) => format!("'{op}'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, column: 1 }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn here(&self, length: usize) -> SourceSpan {
        SourceSpan::new(self.line, self.column, length)
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if !c.is_ascii() {
                return Err(ParseError::new(self.here(1), "non-ASCII input".to_string()));
            }
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'%' => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                b'.' => {
                    out.push(Token { tok: Tok::Dot, span: self.here(1) });
                    self.bump();
                }
                b',' => {
                    out.push(Token { tok: Tok::Comma, span: self.here(1) });
                    self.bump();
                }
                b';' => {
                    out.push(Token { tok: Tok::Semi, span: self.here(1) });
                    self.bump();
                }
                b'{' => {
                    out.push(Token { tok: Tok::LBrace, span: self.here(1) });
                    self.bump();
                }
                b'}' => {
                    out.push(Token { tok: Tok::RBrace, span: self.here(1) });
                    self.bump();
                }
                b'(' => {
                    out.push(Token { tok: Tok::LParen, span: self.here(1) });
                    self.bump();
                }
                b')' => {
                    out.push(Token { tok: Tok::RParen, span: self.here(1) });
                    self.bump();
                }
                b':' => {
                    let span = self.here(2);
                    self.bump();
                    if self.peek() == Some(b'-') {
                        self.bump();
                        out.push(Token { tok: Tok::If, span });
                    } else {
                        return Err(ParseError::new(span, "expected ':-'".to_string()));
                    }
                }
                b'=' => {
                    out.push(Token { tok: Tok::Cmp(CmpOp::Eq), span: self.here(1) });
                    self.bump();
                }
                b'!' => {
                    let span = self.here(2);
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        out.push(Token { tok: Tok::Cmp(CmpOp::Ne), span });
                    } else {
                        return Err(ParseError::new(span, "expected '!='".to_string()));
                    }
                }
                b'<' => {
                    let span = self.here(1);
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        out.push(Token { tok: Tok::Cmp(CmpOp::Le), span });
                    } else {
                        out.push(Token { tok: Tok::Cmp(CmpOp::Lt), span });
                    }
                }
                b'0'..=b'9' => {
                    let span = self.here(1);
                    let start = self.pos;
                    while matches!(self.peek(), Some(b'0'..=b'9')) {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let n: i64 = text.parse().map_err(|_| {
                        ParseError::new(span, format!("integer literal '{text}' out of range"))
                    })?;
                    out.push(Token {
                        tok: Tok::Int(n),
                        span: SourceSpan::new(span.line, span.column, text.len()),
                    });
                }
                b'a'..=b'z' | b'A'..=b'Z' => {
                    let span = self.here(1);
                    let start = self.pos;
                    let upper = c.is_ascii_uppercase();
                    while matches!(self.peek(), Some(b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_'))
                    {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                    let span = SourceSpan::new(span.line, span.column, text.len());
                    let tok = if upper {
                        Tok::Var(text)
                    } else if text == "not" {
                        Tok::Not
                    } else {
                        Tok::Ident(text)
                    };
                    out.push(Token { tok, span });
                }
                _ => {
                    return Err(ParseError::new(
                        self.here(1),
                        format!("unexpected character '{}'", c as char),
                    ));
                }
            }
        }
        Ok(out)
    }
}

struct ProgramParser {
    tokens: Vec<Token>,
    pos: usize,
    eof: SourceSpan,
}

impl ProgramParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        self.tokens.get(self.pos).map(|t| t.span).unwrap_or(self.eof)
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| ParseError::new(self.eof, "unexpected end of input".to_string()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let t = self.next()?;
        if t.tok == want {
            Ok(())
        } else {
            Err(ParseError::new(
                t.span,
                format!("expected {} but found {}", want.describe(), t.tok.describe()),
            ))
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok(Term::Constant(s)),
            Tok::Var(s) => Ok(Term::Variable(s)),
            Tok::Int(n) => Ok(Term::Integer(n)),
            other => Err(ParseError::new(
                t.span,
                format!("expected a term but found {}", other.describe()),
            )),
        }
    }

    /// Atom whose head identifier has already been consumed.
    fn parse_atom_tail(&mut self, name: String) -> Result<Atom, ParseError> {
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.next()?;
            loop {
                args.push(self.parse_term()?);
                match self.next()? {
                    Token { tok: Tok::Comma, .. } => continue,
                    Token { tok: Tok::RParen, .. } => break,
                    t => {
                        return Err(ParseError::new(
                            t.span,
                            format!("expected ',' or ')' but found {}", t.tok.describe()),
                        ))
                    }
                }
            }
        }
        Ok(Atom::new(name, args))
    }

    fn parse_atom(&mut self) -> Result<Atom, ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => self.parse_atom_tail(s),
            other => Err(ParseError::new(
                t.span,
                format!("expected an atom but found {}", other.describe()),
            )),
        }
    }

    /// Brace-delimited atom list: `{ a1; ...; an }`. The '{' is consumed.
    fn parse_brace_atoms(&mut self) -> Result<Vec<Atom>, ParseError> {
        let open = self.next()?;
        debug_assert_eq!(open.tok, Tok::LBrace);
        if self.peek() == Some(&Tok::RBrace) {
            return Err(ParseError::new(open.span, "empty braces: at least one atom required".to_string()));
        }
        let mut atoms = vec![self.parse_brace_element()?];
        loop {
            match self.next()? {
                Token { tok: Tok::Semi, .. } => atoms.push(self.parse_brace_element()?),
                Token { tok: Tok::RBrace, .. } => break,
                Token { tok: Tok::Not, span } => {
                    return Err(ParseError::new(span, "'not' is not allowed inside braces".to_string()))
                }
                t => {
                    return Err(ParseError::new(
                        t.span,
                        format!("expected ';' or '}}' but found {}", t.tok.describe()),
                    ))
                }
            }
        }
        Ok(atoms)
    }

    /// One atom inside braces; gives default negation a pointed rejection.
    fn parse_brace_element(&mut self) -> Result<Atom, ParseError> {
        if self.peek() == Some(&Tok::Not) {
            let t = self.next()?;
            return Err(ParseError::new(
                t.span,
                "'not' is not allowed inside braces".to_string(),
            ));
        }
        self.parse_atom()
    }

    /// Cardinality literal with an optional already-consumed lower bound.
    fn parse_cardinality(&mut self, lower: u32) -> Result<Cardinality, ParseError> {
        let elements = self.parse_brace_atoms()?;
        let upper = if let Some(Tok::Int(_)) = self.peek() {
            let t = self.next()?;
            match t.tok {
                Tok::Int(n) => {
                    let u = u32::try_from(n).map_err(|_| {
                        ParseError::new(t.span, "cardinality bound out of range".to_string())
                    })?;
                    Some(u)
                }
                _ => unreachable!(),
            }
        } else {
            None
        };
        Ok(Cardinality { lower, upper, elements })
    }

    fn parse_body(&mut self, rule: &mut Rule) -> Result<(), ParseError> {
        loop {
            let span = self.span();
            match self.peek() {
                Some(Tok::Not) => {
                    self.next()?;
                    let atom = self.parse_atom()?;
                    rule.body_lits.push(Literal::neg(atom));
                }
                Some(Tok::LBrace) => {
                    let card = self.parse_cardinality(0)?;
                    rule.body_cards.push(card);
                }
                Some(Tok::Int(n)) => {
                    let n = *n;
                    self.next()?;
                    if self.peek() == Some(&Tok::LBrace) {
                        let lower = u32::try_from(n).map_err(|_| {
                            ParseError::new(span, "cardinality bound out of range".to_string())
                        })?;
                        let card = self.parse_cardinality(lower)?;
                        rule.body_cards.push(card);
                    } else if let Some(Tok::Cmp(op)) = self.peek() {
                        let op = *op;
                        self.next()?;
                        let rhs = self.parse_term()?;
                        rule.body_builtins.push(Comparison { lhs: Term::Integer(n), op, rhs });
                    } else {
                        return Err(ParseError::new(
                            span,
                            "integer must start a cardinality literal or a comparison".to_string(),
                        ));
                    }
                }
                Some(Tok::Var(_)) => {
                    let v = match self.next()?.tok {
                        Tok::Var(v) => v,
                        _ => unreachable!(),
                    };
                    if let Some(Tok::Cmp(op)) = self.peek() {
                        let op = *op;
                        self.next()?;
                        let rhs = self.parse_term()?;
                        rule.body_builtins.push(Comparison { lhs: Term::Variable(v), op, rhs });
                    } else {
                        return Err(ParseError::new(
                            span,
                            format!("variable '{v}' cannot stand alone as a body literal"),
                        ));
                    }
                }
                Some(Tok::Ident(_)) => {
                    let name = match self.next()?.tok {
                        Tok::Ident(s) => s,
                        _ => unreachable!(),
                    };
                    if matches!(self.peek(), Some(Tok::Cmp(_))) {
                        let op = match self.next()?.tok {
                            Tok::Cmp(op) => op,
                            _ => unreachable!(),
                        };
                        let rhs = self.parse_term()?;
                        rule.body_builtins.push(Comparison { lhs: Term::Constant(name), op, rhs });
                    } else {
                        let atom = self.parse_atom_tail(name)?;
                        if matches!(self.peek(), Some(Tok::Cmp(_))) {
                            return Err(ParseError::new(
                                self.span(),
                                "comparison operands must be plain terms, not atoms".to_string(),
                            ));
                        }
                        rule.body_lits.push(Literal::pos(atom));
                    }
                }
                _ => {
                    let t = self.next()?;
                    return Err(ParseError::new(
                        t.span,
                        format!("expected a body literal but found {}", t.tok.describe()),
                    ));
                }
            }
            match self.peek() {
                Some(Tok::Comma) => {
                    self.next()?;
                }
                _ => break,
            }
        }
        Ok(())
    }

    fn parse_statement(&mut self, program: &mut Program) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::If) => {
                self.next()?;
                let mut rule = Rule::constraint(vec![]);
                self.parse_body(&mut rule)?;
                self.expect(Tok::Dot)?;
                program.rules.push(rule);
            }
            Some(Tok::LBrace) => {
                let heads = self.parse_brace_atoms()?;
                let mut rule = Rule::choice(heads, vec![]);
                if self.peek() == Some(&Tok::If) {
                    self.next()?;
                    self.parse_body(&mut rule)?;
                }
                self.expect(Tok::Dot)?;
                program.rules.push(rule);
            }
            _ => {
                let head = self.parse_atom()?;
                match self.peek() {
                    Some(Tok::Dot) => {
                        self.next()?;
                        if head.is_ground() {
                            program.facts.push(head);
                        } else {
                            program.rules.push(Rule::normal(head, vec![]));
                        }
                    }
                    Some(Tok::If) => {
                        self.next()?;
                        let mut rule = Rule::normal(head, vec![]);
                        self.parse_body(&mut rule)?;
                        self.expect(Tok::Dot)?;
                        program.rules.push(rule);
                    }
                    _ => {
                        let t = self.next()?;
                        return Err(ParseError::new(
                            t.span,
                            format!("expected '.' or ':-' but found {}", t.tok.describe()),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses program text into a [`Program`]. Ground head-only statements become
/// facts; everything else becomes a rule.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    let eof = tokens
        .last()
        .map(|t| SourceSpan::new(t.span.line, t.span.column + t.span.length, 1))
        .unwrap_or(SourceSpan::new(1, 1, 1));
    let mut parser = ProgramParser { tokens, pos: 0, eof };
    let mut program = Program::default();
    while parser.peek().is_some() {
        parser.parse_statement(&mut program)?;
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{validate, HeadKind};

    #[test]
    fn parses_facts_rules_and_constraints() {
        let p = parse_program("q(a). q(b).\np(X) :- q(X), not r(X).\n:- p(a).\n").unwrap();
        assert_eq!(p.facts.len(), 2);
        assert_eq!(p.rules.len(), 2);
        assert_eq!(p.rules[0].kind, HeadKind::Normal);
        assert_eq!(p.rules[1].kind, HeadKind::Constraint);
        assert_eq!(p.rules[0].to_string(), "p(X) :- q(X), not r(X).");
    }

    #[test]
    fn parses_choice_and_cardinality() {
        let p = parse_program("{ a; b } :- not c.\nok :- 2 { a; b } 3.\nd :- { a; b } 1.\n").unwrap();
        assert_eq!(p.rules[0].kind, HeadKind::Choice);
        assert_eq!(p.rules[0].heads.len(), 2);
        let card = &p.rules[1].body_cards[0];
        assert_eq!(card.lower, 2);
        assert_eq!(card.upper, Some(3));
        let card = &p.rules[2].body_cards[0];
        assert_eq!(card.lower, 0);
        assert_eq!(card.upper, Some(1));
    }

    #[test]
    fn parses_comparisons_and_comments() {
        let p = parse_program("% comment line\nok :- v(X), v(Y), X < Y. % trailing\nq :- v(X), X != a.\n").unwrap();
        assert_eq!(p.rules[0].body_builtins[0].op, CmpOp::Lt);
        assert_eq!(p.rules[1].body_builtins[0].op, CmpOp::Ne);
    }

    #[test]
    fn crlf_and_stdin_style_input() {
        let p = parse_program("a.\r\nb :- a.\r\n").unwrap();
        assert_eq!(p.facts.len(), 1);
        assert_eq!(p.rules.len(), 1);
    }

    #[test]
    fn error_spans_are_one_based() {
        let err = parse_program("a :- not not b.").unwrap_err();
        assert_eq!(err.span.line, 1);
        assert_eq!(err.span.column, 10);

        let err = parse_program("p(X :- q.").unwrap_err();
        assert_eq!(err.span.line, 1);
        assert!(err.message.contains("expected ',' or ')'"));

        let err = parse_program("a\nb ::- c.").unwrap_err();
        assert_eq!(err.span.line, 2);
    }

    #[test]
    fn rejects_not_inside_braces_and_empty_braces() {
        let err = parse_program("{ a; not b }.").unwrap_err();
        assert!(err.message.contains("'not' is not allowed inside braces"));
        let err = parse_program("a :- { }.").unwrap_err();
        assert!(err.message.contains("at least one atom"));
    }

    #[test]
    fn rejects_non_ascii_and_bad_integers() {
        assert!(parse_program("π.").is_err());
        let err = parse_program("a :- 99999999999999999999 { b }.").unwrap_err();
        assert!(err.message.contains("out of range"));
    }

    #[test]
    fn nonground_headonly_statement_is_an_unsafe_rule_not_a_fact() {
        let p = parse_program("p(X).").unwrap();
        assert!(p.facts.is_empty());
        assert_eq!(p.rules.len(), 1);
        assert!(!validate(&p).is_empty());
    }

    #[test]
    fn print_parse_roundtrip_is_identity() {
        let src = "q(a).\nq(b).\nr(b,1).\np(X) :- q(X), not s(X), X != b.\n{ c(X); d(X) } :- q(X), 1 { q(a); q(b) } 2.\n:- p(a), not p(b).\n";
        let p = parse_program(src).unwrap();
        let printed = p.to_string();
        let reparsed = parse_program(&printed).unwrap();
        assert_eq!(p, reparsed);
        assert_eq!(printed, reparsed.to_string());
    }

    #[test]
    fn unsatisfiable_bound_parses_and_warns() {
        let p = parse_program("ok :- 3 { a; b }.\na.\nb.\n").unwrap();
        let diags = validate(&p);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("unsatisfiable"));
    }
}
