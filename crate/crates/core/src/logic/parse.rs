//! Hand-rolled lexer and recursive-descent parser for the formula grammar.
//!
//! Tokens: `bot top & /\ \/ -> <- <-> ~ <> exists forall in = . ( )` plus
//! identifiers. Precedence from tightest: `~` and `<>`, then `in`/`=`,
//! then `&`, `/\`, `\/`, `->`/`<-` (right-associative), `<->`, and
//! quantifiers bind weakest (their body extends as far right as possible).
//! `#` starts a comment running to the end of the line.

use thiserror::Error;

use super::{Formula, Term};

#[derive(Debug, Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Bot,
    Top,
    In,
    Exists,
    Forall,
    LParen,
    RParen,
    Dot,
    Tilde,
    Diamond,
    Amp,
    Wedge,
    Vee,
    Arrow,
    BackArrow,
    Iff,
    Equals,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

fn error_at(src: &str, offset: usize, message: String) -> ParseError {
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in src.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    ParseError { message, offset, line, col }
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), pos: 0 }
    }

    fn lex(mut self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b'(' => self.push_one(&mut out, Tok::LParen),
                b')' => self.push_one(&mut out, Tok::RParen),
                b'.' => self.push_one(&mut out, Tok::Dot),
                b'~' => self.push_one(&mut out, Tok::Tilde),
                b'&' => self.push_one(&mut out, Tok::Amp),
                b'=' => self.push_one(&mut out, Tok::Equals),
                b'/' => {
                    if self.peek(1) == Some(b'\\') {
                        out.push((Tok::Wedge, self.pos));
                        self.pos += 2;
                    } else {
                        return Err(self.err("expected `/\\`"));
                    }
                }
                b'\\' => {
                    if self.peek(1) == Some(b'/') {
                        out.push((Tok::Vee, self.pos));
                        self.pos += 2;
                    } else {
                        return Err(self.err("expected `\\/`"));
                    }
                }
                b'-' => {
                    if self.peek(1) == Some(b'>') {
                        out.push((Tok::Arrow, self.pos));
                        self.pos += 2;
                    } else {
                        return Err(self.err("expected `->`"));
                    }
                }
                b'<' => {
                    if self.peek(1) == Some(b'-') && self.peek(2) == Some(b'>') {
                        out.push((Tok::Iff, self.pos));
                        self.pos += 3;
                    } else if self.peek(1) == Some(b'-') {
                        out.push((Tok::BackArrow, self.pos));
                        self.pos += 2;
                    } else if self.peek(1) == Some(b'>') {
                        out.push((Tok::Diamond, self.pos));
                        self.pos += 2;
                    } else {
                        return Err(self.err("expected `<->`, `<-`, or `<>`"));
                    }
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while self.pos < self.bytes.len()
                        && (self.bytes[self.pos].is_ascii_alphanumeric()
                            || self.bytes[self.pos] == b'_'
                            || self.bytes[self.pos] == b'\'')
                    {
                        self.pos += 1;
                    }
                    let word = &self.src[start..self.pos];
                    let tok = match word {
                        "bot" => Tok::Bot,
                        "top" => Tok::Top,
                        "in" => Tok::In,
                        "exists" => Tok::Exists,
                        "forall" => Tok::Forall,
                        _ => Tok::Ident(word.to_string()),
                    };
                    out.push((tok, start));
                }
                _ => {
                    let ch = self.src[self.pos..].chars().next().unwrap_or('?');
                    return Err(self.err(&format!("unexpected character `{ch}`")));
                }
            }
        }
        Ok(out)
    }

    fn push_one(&mut self, out: &mut Vec<(Tok, usize)>, tok: Tok) {
        out.push((tok, self.pos));
        self.pos += 1;
    }

    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn err(&self, message: &str) -> ParseError {
        error_at(self.src, self.pos, message.to_string())
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    scope: Vec<String>,
    domain: Option<&'a [String]>,
}

impl<'a> Parser<'a> {
    fn parse(mut self) -> Result<Formula, ParseError> {
        let f = self.formula()?;
        if self.pos < self.toks.len() {
            return Err(self.err_here("trailing input after formula"));
        }
        Ok(f)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, o)| o).unwrap_or(self.src.len())
    }

    fn err_here(&self, message: &str) -> ParseError {
        error_at(self.src, self.here(), message.to_string())
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_here(&format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.equiv_level()
    }

    fn equiv_level(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.impl_level()?;
        if self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.equiv_level()?;
            Ok(Formula::equiv(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn impl_level(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_level()?;
        match self.peek() {
            Some(Tok::Arrow) => {
                self.pos += 1;
                let rhs = self.impl_level()?;
                Ok(Formula::imp(lhs, rhs))
            }
            Some(Tok::BackArrow) => {
                self.pos += 1;
                let rhs = self.impl_level()?;
                Ok(Formula::rev_imp(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn or_level(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.wand_level()?;
        while self.peek() == Some(&Tok::Vee) {
            self.pos += 1;
            let rhs = self.wand_level()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn wand_level(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.sand_level()?;
        while self.peek() == Some(&Tok::Wedge) {
            self.pos += 1;
            let rhs = self.sand_level()?;
            lhs = Formula::wand(lhs, rhs);
        }
        Ok(lhs)
    }

    fn sand_level(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary_level()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.unary_level()?;
            lhs = Formula::sand(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary_level(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::neg(self.unary_level()?))
            }
            Some(Tok::Diamond) => {
                self.pos += 1;
                Ok(Formula::diamond(self.unary_level()?))
            }
            Some(Tok::Exists) | Some(Tok::Forall) => self.quantified(),
            _ => self.atom_level(),
        }
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let universal = match self.bump() {
            Some(Tok::Forall) => true,
            Some(Tok::Exists) => false,
            _ => unreachable!("caller checked"),
        };
        let at = self.here();
        let var = match self.bump() {
            Some(Tok::Ident(v)) => v,
            _ => return Err(error_at(self.src, at, "expected a variable name".into())),
        };
        if self.scope.contains(&var) {
            return Err(error_at(
                self.src,
                at,
                format!("variable `{var}` is already bound in this scope"),
            ));
        }
        self.expect(Tok::Dot, "`.` after the quantified variable")?;
        self.scope.push(var.clone());
        let body = self.formula()?;
        self.scope.pop();
        Ok(if universal { Formula::forall(var, body) } else { Formula::exists(var, body) })
    }

    fn atom_level(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Bot) => Ok(Formula::Bot),
            Some(Tok::Top) => Ok(Formula::Top),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => match self.peek() {
                Some(Tok::In) => {
                    self.pos += 1;
                    let lhs = self.term(name, at)?;
                    let rhs = self.term_token()?;
                    Ok(Formula::Mem(lhs, rhs))
                }
                Some(Tok::Equals) => {
                    self.pos += 1;
                    let lhs = self.term(name, at)?;
                    let rhs = self.term_token()?;
                    Ok(Formula::Eq(lhs, rhs))
                }
                _ => {
                    if self.scope.contains(&name) {
                        Err(error_at(
                            self.src,
                            at,
                            format!("quantified variable `{name}` used as a propositional letter"),
                        ))
                    } else {
                        Ok(Formula::Letter(name))
                    }
                }
            },
            _ => Err(error_at(self.src, at, "expected a formula".into())),
        }
    }

    fn term_token(&mut self) -> Result<Term, ParseError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Ident(name)) => self.term(name, at),
            _ => Err(error_at(self.src, at, "expected a term".into())),
        }
    }

    fn term(&self, name: String, at: usize) -> Result<Term, ParseError> {
        if self.scope.contains(&name) {
            Ok(Term::Var(name))
        } else if let Some(domain) = self.domain {
            if domain.iter().any(|d| d == &name) {
                Ok(Term::Const(name))
            } else {
                Err(error_at(
                    self.src,
                    at,
                    format!("`{name}` is neither a bound variable nor a declared constant"),
                ))
            }
        } else {
            Ok(Term::Const(name))
        }
    }
}

/// Parses a formula; identifiers in term position become constants unless
/// bound by an enclosing quantifier.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = Lexer::new(text).lex()?;
    Parser { src: text, toks, pos: 0, scope: Vec::new(), domain: None }.parse()
}

/// Like [`parse`], but every constant must come from `domain`; unknown
/// identifiers in term position are rejected with their position.
pub fn parse_with_domain(text: &str, domain: &[String]) -> Result<Formula, ParseError> {
    let toks = Lexer::new(text).lex()?;
    Parser { src: text, toks, pos: 0, scope: Vec::new(), domain: Some(domain) }.parse()
}
