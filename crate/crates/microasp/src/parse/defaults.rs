//! Parser for propositional default theories over literal conjunctions.
//!
//! Two statement forms, one per line:
//!
//! ```text
//! fact: l1 & ... & lk.
//! d: pre : j1, ..., jm / cons.
//! ```
//!
//! where every `l`, every conjunct of `pre`, `ji`, `cons` is a literal: an
//! atom such as `a` or `clrd(v1,c2)`, optionally prefixed with `-` for
//! classical negation. The keyword `true` denotes an empty prerequisite; the
//! justification list may be empty. Anything beyond literal conjunctions is
//! outside the supported fragment.

use super::{ParseError, SourceSpan};
use crate::default_logic::{Default, DefaultTheory, Lit};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Minus,
    Amp,
    Colon,
    Slash,
    Comma,
    Dot,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Minus => "'-'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Colon => "':'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        }
    }
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let col = i + 1;
        let span1 = SourceSpan::new(line_no, col, 1);
        if !c.is_ascii() {
            return Err(ParseError::new(span1, "non-ASCII input".to_string()));
        }
        match c {
            b' ' | b'\t' | b'\r' => i += 1,
            b'%' => break,
            b'-' => {
                out.push((Tok::Minus, span1));
                i += 1;
            }
            b'&' => {
                out.push((Tok::Amp, span1));
                i += 1;
            }
            b':' => {
                out.push((Tok::Colon, span1));
                i += 1;
            }
            b'/' => {
                out.push((Tok::Slash, span1));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, span1));
                i += 1;
            }
            b'.' => {
                out.push((Tok::Dot, span1));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, span1));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, span1));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &line[start..i];
                let n: i64 = text.parse().map_err(|_| {
                    ParseError::new(span1, format!("integer literal '{text}' out of range"))
                })?;
                out.push((Tok::Int(n), SourceSpan::new(line_no, col, i - start)));
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((
                    Tok::Ident(line[start..i].to_string()),
                    SourceSpan::new(line_no, col, i - start),
                ));
            }
            _ => {
                return Err(ParseError::new(
                    span1,
                    format!(
                        "unexpected character '{}': outside supported fragment (conjunctions of literals only)",
                        c as char
                    ),
                ));
            }
        }
    }
    Ok(out)
}

struct LineParser {
    tokens: Vec<(Tok, SourceSpan)>,
    pos: usize,
    end: SourceSpan,
}

impl LineParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Result<(Tok, SourceSpan), ParseError> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| ParseError::new(self.end, "unexpected end of statement".to_string()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let (tok, span) = self.next()?;
        if tok == want {
            Ok(())
        } else {
            Err(ParseError::new(
                span,
                format!("expected {} but found {}", want.describe(), tok.describe()),
            ))
        }
    }

    /// One literal: `[-] name [ (arg, ...) ]`, rebuilt as canonical text.
    fn parse_lit(&mut self) -> Result<Lit, ParseError> {
        let mut positive = true;
        if self.peek() == Some(&Tok::Minus) {
            self.next()?;
            positive = false;
        }
        let (tok, span) = self.next()?;
        let name = match tok {
            Tok::Ident(s) => s,
            other => {
                return Err(ParseError::new(
                    span,
                    format!(
                        "expected an atom but found {}: outside supported fragment (conjunctions of literals only)",
                        other.describe()
                    ),
                ))
            }
        };
        let mut atom = name;
        if self.peek() == Some(&Tok::LParen) {
            self.next()?;
            atom.push('(');
            loop {
                let (tok, span) = self.next()?;
                match tok {
                    Tok::Ident(s) => atom.push_str(&s),
                    Tok::Int(n) => atom.push_str(&n.to_string()),
                    other => {
                        return Err(ParseError::new(
                            span,
                            format!("expected a constant argument but found {}", other.describe()),
                        ))
                    }
                }
                match self.next()? {
                    (Tok::Comma, _) => atom.push(','),
                    (Tok::RParen, _) => break,
                    (other, span) => {
                        return Err(ParseError::new(
                            span,
                            format!("expected ',' or ')' but found {}", other.describe()),
                        ))
                    }
                }
            }
            atom.push(')');
        }
        Ok(Lit { atom, positive })
    }

    /// `lit & lit & ...` up to (not consuming) the next top-level delimiter.
    fn parse_conj(&mut self) -> Result<BTreeSet<Lit>, ParseError> {
        let mut lits = BTreeSet::new();
        lits.insert(self.parse_lit()?);
        while self.peek() == Some(&Tok::Amp) {
            self.next()?;
            lits.insert(self.parse_lit()?);
        }
        Ok(lits)
    }
}

/// Parses a default theory file.
pub fn parse_default_theory(text: &str) -> Result<DefaultTheory, ParseError> {
    let mut theory = DefaultTheory::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        let tokens = lex_line(line, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let end = SourceSpan::new(line_no, line.len().max(1), 1);
        let mut p = LineParser { tokens, pos: 0, end };
        let (head, head_span) = p.next()?;
        match head {
            Tok::Ident(ref s) if s == "fact" => {
                p.expect(Tok::Colon)?;
                let lits = p.parse_conj()?;
                p.expect(Tok::Dot)?;
                theory.facts.extend(lits);
            }
            Tok::Ident(ref s) if s == "d" => {
                p.expect(Tok::Colon)?;
                let prerequisite = if matches!(p.peek(), Some(Tok::Ident(s)) if s == "true")
                    && p.tokens.get(p.pos + 1).map(|t| &t.0) == Some(&Tok::Colon)
                {
                    p.next()?;
                    BTreeSet::new()
                } else {
                    p.parse_conj()?
                };
                p.expect(Tok::Colon)?;
                let mut justifications = Vec::new();
                if p.peek() != Some(&Tok::Slash) {
                    justifications.push(p.parse_conj()?);
                    while p.peek() == Some(&Tok::Comma) {
                        p.next()?;
                        justifications.push(p.parse_conj()?);
                    }
                }
                p.expect(Tok::Slash)?;
                let consequent = p.parse_conj()?;
                p.expect(Tok::Dot)?;
                theory.defaults.push(Default { prerequisite, justifications, consequent });
            }
            other => {
                return Err(ParseError::new(
                    head_span,
                    format!("expected 'fact:' or 'd:' but found {}", other.describe()),
                ));
            }
        }
        if let Some(tok) = p.peek() {
            let tok = tok.clone();
            return Err(ParseError::new(
                p.tokens[p.pos].1,
                format!("unexpected {} after statement end", tok.describe()),
            ));
        }
    }
    Ok(theory)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Lit {
        if let Some(rest) = s.strip_prefix('-') {
            Lit { atom: rest.to_string(), positive: false }
        } else {
            Lit { atom: s.to_string(), positive: true }
        }
    }

    #[test]
    fn parses_facts_and_defaults() {
        let t = parse_default_theory(
            "% birds\nfact: bird & -penguin.\nd: bird : flies / flies.\n",
        )
        .unwrap();
        assert_eq!(t.facts, [lit("bird"), lit("-penguin")].into_iter().collect());
        assert_eq!(t.defaults.len(), 1);
        let d = &t.defaults[0];
        assert_eq!(d.prerequisite, [lit("bird")].into_iter().collect());
        assert_eq!(d.justifications, vec![[lit("flies")].into_iter().collect()]);
        assert_eq!(d.consequent, [lit("flies")].into_iter().collect());
    }

    #[test]
    fn true_prerequisite_and_multiple_justifications() {
        let t = parse_default_theory(
            "d: true : -clrd(v1,c2), -clrd(v1,c3) / clrd(v1,c1).\n",
        )
        .unwrap();
        let d = &t.defaults[0];
        assert!(d.prerequisite.is_empty());
        assert_eq!(d.justifications.len(), 2);
        assert_eq!(
            d.justifications[0],
            [lit("-clrd(v1,c2)")].into_iter().collect()
        );
        assert_eq!(d.consequent, [lit("clrd(v1,c1)")].into_iter().collect());
    }

    #[test]
    fn killing_default_with_compound_prerequisite() {
        let t =
            parse_default_theory("d: clrd(x,c) & clrd(y,c) : -f / f.\n").unwrap();
        let d = &t.defaults[0];
        assert_eq!(d.prerequisite.len(), 2);
        assert_eq!(d.justifications, vec![[lit("-f")].into_iter().collect()]);
    }

    #[test]
    fn empty_justification_list() {
        let t = parse_default_theory("d: a : / b.\n").unwrap();
        assert!(t.defaults[0].justifications.is_empty());
    }

    #[test]
    fn non_literal_formulas_are_rejected() {
        let err = parse_default_theory("fact: a | b.\n").unwrap_err();
        assert!(err.message.contains("outside supported fragment"));
        let err = parse_default_theory("d: true : -a / .\n").unwrap_err();
        assert!(err.message.contains("outside supported fragment"));
    }

    #[test]
    fn error_positions_are_reported() {
        let err = parse_default_theory("fact: ok.\nd: a & & b : c / d.\n").unwrap_err();
        assert_eq!(err.span.line, 2);
        assert_eq!(err.span.column, 8);
    }
}
