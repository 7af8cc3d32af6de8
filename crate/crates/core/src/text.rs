//! ASCII concrete syntax for formulas.
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "forall" VAR "." unary | "exists" VAR "." unary | atom
//! atom    := "false" | "(" formula ")" | PRED suffix? "(" term ("," term)* ")"
//! suffix  := "^k" | "^p"
//! ```
//!
//! Quantifier-bound identifiers and the letters `x y z u v w` are variables;
//! every other identifier in term position is a constant.

use std::collections::HashMap;
use std::fmt;

use crate::logic::{Atom, Formula, Predicate, PredicateKind, Term, Var};

/// Identifiers that are variables even when not bound by a quantifier.
pub const FREE_VARIABLE_LETTERS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

const KEYWORDS: [&str; 3] = ["forall", "exists", "false"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Untyped predicates, as used by the document taxonomy.
    Plain,
    /// Every predicate carries a `^k` or `^p` suffix.
    Mis,
}

/// Byte offsets into the input line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("predicate {name} at {span} needs a ^k or ^p suffix")]
    TypeSuffixRequired { span: SourceSpan, name: String },
    #[error("predicate {name} at {span} takes {expected} argument(s), found {found}")]
    ArityMismatch { span: SourceSpan, name: String, expected: usize, found: usize },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::TypeSuffixRequired { span, .. }
            | ParseError::ArityMismatch { span, .. } => *span,
        }
    }

    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SyntaxError",
            ParseError::TypeSuffixRequired { .. } => "TypeSuffixRequired",
            ParseError::ArityMismatch { .. } => "ArityMismatch",
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Arrow,
    DoubleArrow,
    Amp,
    Bar,
    Caret,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Tilde => f.write_str("'~'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::DoubleArrow => f.write_str("'<->'"),
            Tok::Amp => f.write_str("'&'"),
            Tok::Bar => f.write_str("'|'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn syntax(start: usize, end: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { span: SourceSpan::new(start, end), message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |t: Tok| (t, SourceSpan::new(start, start + 1));
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => out.push(single(Tok::LParen)),
            b')' => out.push(single(Tok::RParen)),
            b',' => out.push(single(Tok::Comma)),
            b'.' => out.push(single(Tok::Dot)),
            b'~' => out.push(single(Tok::Tilde)),
            b'&' => out.push(single(Tok::Amp)),
            b'|' => out.push(single(Tok::Bar)),
            b'^' => out.push(single(Tok::Caret)),
            b'#' => {
                return Err(syntax(
                    start,
                    start + 1,
                    "occurrence indexes are assigned by the system and cannot be entered",
                ))
            }
            b'-' => {
                if bytes.get(i + 1) != Some(&b'>') {
                    return Err(syntax(start, start + 1, "expected '->'"));
                }
                out.push((Tok::Arrow, SourceSpan::new(start, start + 2)));
                i += 2;
                continue;
            }
            b'<' => {
                if !text[i..].starts_with("<->") {
                    return Err(syntax(start, start + 1, "expected '<->'"));
                }
                out.push((Tok::DoubleArrow, SourceSpan::new(start, start + 3)));
                i += 3;
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), SourceSpan::new(start, i)));
                continue;
            }
            _ => {
                let len = text[i..].chars().next().map_or(1, char::len_utf8);
                return Err(syntax(start, start + len, format!("unexpected character {:?}", &text[i..i + len])));
            }
        }
        i += 1;
    }
    out.push((Tok::End, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

/// Parses one formula.
pub fn parse(text: &str, mode: Mode) -> Result<Formula, ParseError> {
    if text.trim().is_empty() {
        return Err(syntax(0, text.len(), "empty input"));
    }
    let mut p = Parser { toks: lex(text)?, pos: 0, mode, bound: Vec::new(), arities: HashMap::new() };
    let f = p.formula()?;
    let (tok, span) = p.peek();
    if *tok != Tok::End {
        return Err(ParseError::Syntax { span, message: format!("unexpected {tok}") });
    }
    Ok(f)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    mode: Mode,
    bound: Vec<String>,
    arities: HashMap<(String, PredicateKind), usize>,
}

impl Parser {
    fn peek(&self) -> (&Tok, SourceSpan) {
        let (t, s) = &self.toks[self.pos];
        (t, *s)
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseError> {
        let (tok, span) = self.bump();
        if tok == want {
            Ok(span)
        } else {
            Err(ParseError::Syntax { span, message: format!("expected {want}, found {tok}") })
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.implication()?;
        while *self.peek().0 == Tok::DoubleArrow {
            self.bump();
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if *self.peek().0 == Tok::Arrow {
            self.bump();
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while *self.peek().0 == Tok::Bar {
            self.bump();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek().0 == Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().0.clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let (tok, span) = self.bump();
                let name = match tok {
                    Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => n,
                    other => {
                        return Err(ParseError::Syntax { span, message: format!("expected a variable, found {other}") })
                    }
                };
                self.expect(Tok::Dot)?;
                self.bound.push(name.clone());
                let body = self.unary();
                self.bound.pop();
                let var = Var::new(&name);
                Ok(if kw == "forall" { Formula::forall(var, body?) } else { Formula::exists(var, body?) })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Ident(ref n) if n == "false" => Ok(Formula::Falsum),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => self.predication(name, span),
            other => Err(ParseError::Syntax { span, message: format!("expected a formula, found {other}") }),
        }
    }

    fn predication(&mut self, name: String, name_span: SourceSpan) -> Result<Formula, ParseError> {
        let mut kind = PredicateKind::Plain;
        let mut span = name_span;
        if *self.peek().0 == Tok::Caret {
            let (_, caret) = self.bump();
            let (tok, suffix_span) = self.bump();
            kind = match tok {
                Tok::Ident(ref s) if s == "k" => PredicateKind::Kind,
                Tok::Ident(ref s) if s == "p" => PredicateKind::Property,
                other => {
                    return Err(ParseError::Syntax {
                        span: SourceSpan::new(caret.start, suffix_span.end),
                        message: format!("expected suffix ^k or ^p, found {other}"),
                    })
                }
            };
            if self.mode == Mode::Plain {
                return Err(ParseError::Syntax {
                    span: SourceSpan::new(caret.start, suffix_span.end),
                    message: "type suffixes are only accepted in MIS mode".into(),
                });
            }
            span = SourceSpan::new(name_span.start, suffix_span.end);
        } else if self.mode == Mode::Mis {
            return Err(ParseError::TypeSuffixRequired { span, name });
        }
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while *self.peek().0 == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        let close = self.expect(Tok::RParen)?;
        let full = SourceSpan::new(span.start, close.end);
        let arity = args.len();
        if kind != PredicateKind::Plain && arity != 1 {
            return Err(ParseError::ArityMismatch { span: full, name, expected: 1, found: arity });
        }
        match self.arities.get(&(name.clone(), kind)) {
            Some(&expected) if expected != arity => {
                return Err(ParseError::ArityMismatch { span: full, name, expected, found: arity });
            }
            Some(_) => {}
            None => {
                self.arities.insert((name.clone(), kind), arity);
            }
        }
        let predicate = match kind {
            PredicateKind::Plain => Predicate::plain(&name, arity),
            PredicateKind::Kind => Predicate::kind(&name),
            PredicateKind::Property => Predicate::property(&name),
        };
        let atom = Atom::new(predicate, args).expect("arity checked above");
        Ok(Formula::Atom(atom))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => {
                if self.bound.contains(&n) || FREE_VARIABLE_LETTERS.contains(&n.as_str()) {
                    Ok(Term::var(n))
                } else {
                    Ok(Term::constant(n))
                }
            }
            other => Err(ParseError::Syntax { span, message: format!("expected a term, found {other}") }),
        }
    }
}

// ---------------------------------------------------------------------------
// Renderer

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

/// Renders with the fewest parentheses the grammar allows. Occurrence
/// indexes are shown as `#n` after the property suffix when requested.
pub fn render(f: &Formula, with_occurrences: bool) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, 0, with_occurrences);
    out
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_formula(out: &mut String, f: &Formula, min: u8, occ: bool) {
    if level(f) < min {
        out.push('(');
        write_formula(out, f, 0, occ);
        out.push(')');
        return;
    }
    match f {
        Formula::Falsum => out.push_str("false"),
        Formula::Atom(a) => write_atom(out, a, occ),
        Formula::Not(a) => {
            out.push('~');
            write_formula(out, a, UNARY, occ);
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            out.push_str(if matches!(f, Formula::Forall(..)) { "forall " } else { "exists " });
            out.push_str(v.as_str());
            out.push_str(". ");
            write_formula(out, a, UNARY, occ);
        }
        Formula::Iff(a, b) => binary(out, a, " <-> ", b, IFF, IMP, occ),
        Formula::Implies(a, b) => binary(out, a, " -> ", b, OR, IMP, occ),
        Formula::Or(a, b) => binary(out, a, " | ", b, OR, AND, occ),
        Formula::And(a, b) => binary(out, a, " & ", b, AND, UNARY, occ),
    }
}

fn binary(out: &mut String, a: &Formula, op: &str, b: &Formula, left: u8, right: u8, occ: bool) {
    write_formula(out, a, left, occ);
    out.push_str(op);
    write_formula(out, b, right, occ);
}

fn write_atom(out: &mut String, a: &Atom, occ: bool) {
    out.push_str(&a.predicate().to_string());
    if occ {
        if let Some(n) = a.occurrence() {
            out.push('#');
            out.push_str(&n.to_string());
        }
    }
    out.push('(');
    for (i, t) in a.args().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&t.to_string());
    }
    out.push(')');
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_point_into_input() {
        let text = "forall x. (S(x) -> )";
        let err = parse(text, Mode::Plain).unwrap_err();
        assert!(err.span().end <= text.len());
        assert_eq!(&text[err.span().start..err.span().end], ")");
    }

    #[test]
    fn hash_rejected_on_input() {
        let err = parse("CanFly^p#2(Opus)", Mode::Mis).unwrap_err();
        assert_eq!(err.code(), "SyntaxError");
        assert_eq!(err.span(), SourceSpan::new(8, 9));
    }

    #[test]
    fn suffix_rules_follow_mode() {
        assert_eq!(parse("Bird(Tweety)", Mode::Mis).unwrap_err().code(), "TypeSuffixRequired");
        assert_eq!(parse("Bird^k(Tweety)", Mode::Plain).unwrap_err().code(), "SyntaxError");
        assert_eq!(parse("R(a) & R(a, b)", Mode::Plain).unwrap_err().code(), "ArityMismatch");
        assert_eq!(parse("Loves^k(a, b)", Mode::Mis).unwrap_err().code(), "ArityMismatch");
    }
}
