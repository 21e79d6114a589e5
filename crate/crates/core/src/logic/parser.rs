use thiserror::Error;

use super::ast::{Formula, Predicate, Term};

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: `{found}` is not a comparison; the predicates are `<=` and `!=`")]
    UnknownPredicate {
        line: usize,
        column: usize,
        found: String,
    },
    #[error("line {line}, column {column}: conjunction needs at least 2 formulas, found {found}")]
    ConjArity {
        line: usize,
        column: usize,
        found: usize,
    },
}

/// Parses the surface syntax:
///
/// ```text
/// formula := atom | "and(" formula "," formula ")"
///          | "andM(" formula ("," formula)+ ")" | "not(" formula ")"
/// atom    := term ("<=" | "!=") term
/// term    := IDENT | NUMBER
/// ```
///
/// Whitespace is insignificant and `#` starts a comment running to the end
/// of the line. `and`, `andM` and `not` are reserved words.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, at: 0 };
    let formula = parser.formula()?;
    match parser.peek() {
        Tok::Eof => Ok(formula),
        other => Err(parser.syntax(format!("expected end of input, found {}", other.describe()))),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Le,
    Neq,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{name}`"),
            Tok::Number(v) => format!("number `{v}`"),
            Tok::Le => "`<=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut lx = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        // skip whitespace and # comments
        while let Some(&c) = lx.chars.peek() {
            if c.is_whitespace() {
                lx.bump();
            } else if c == '#' {
                while let Some(&c) = lx.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    lx.bump();
                }
            } else {
                break;
            }
        }
        let pos = lx.pos();
        let Some(&c) = lx.chars.peek() else {
            out.push((Tok::Eof, pos));
            return Ok(out);
        };
        let tok = match c {
            '(' => {
                lx.bump();
                Tok::LParen
            }
            ')' => {
                lx.bump();
                Tok::RParen
            }
            ',' => {
                lx.bump();
                Tok::Comma
            }
            '<' => {
                lx.bump();
                if lx.chars.peek() == Some(&'=') {
                    lx.bump();
                    Tok::Le
                } else {
                    return Err(unknown_predicate(pos, "<"));
                }
            }
            '!' => {
                lx.bump();
                if lx.chars.peek() == Some(&'=') {
                    lx.bump();
                    Tok::Neq
                } else {
                    return Err(unknown_predicate(pos, "!"));
                }
            }
            '>' | '=' => {
                lx.bump();
                let mut found = c.to_string();
                if lx.chars.peek() == Some(&'=') {
                    lx.bump();
                    found.push('=');
                }
                return Err(unknown_predicate(pos, &found));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = lx.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        lx.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(name)
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => lex_number(&mut lx, pos)?,
            other => {
                return Err(lx.error(pos, format!("unexpected character `{other}`")));
            }
        };
        out.push((tok, pos));
    }
}

fn lex_number(lx: &mut Lexer<'_>, pos: Pos) -> Result<Tok, ParseError> {
    let mut text = String::new();
    if matches!(lx.chars.peek(), Some('-') | Some('+')) {
        text.push(lx.bump().unwrap());
    }
    let digits = |lx: &mut Lexer<'_>, text: &mut String| {
        let mut any = false;
        while let Some(&c) = lx.chars.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                lx.bump();
                any = true;
            } else {
                break;
            }
        }
        any
    };
    if !digits(lx, &mut text) {
        return Err(lx.error(pos, format!("expected digits after `{text}`")));
    }
    if lx.chars.peek() == Some(&'.') {
        text.push('.');
        lx.bump();
        if !digits(lx, &mut text) {
            return Err(lx.error(pos, "expected digits after the decimal point".to_string()));
        }
    }
    if matches!(lx.chars.peek(), Some('e') | Some('E')) {
        text.push(lx.bump().unwrap());
        if matches!(lx.chars.peek(), Some('-') | Some('+')) {
            text.push(lx.bump().unwrap());
        }
        if !digits(lx, &mut text) {
            return Err(lx.error(pos, "expected digits in the exponent".to_string()));
        }
    }
    let value: f64 = text
        .parse()
        .map_err(|_| lx.error(pos, format!("`{text}` is not a number")))?;
    if !value.is_finite() {
        return Err(lx.error(pos, format!("constant `{text}` overflows")));
    }
    Ok(Tok::Number(value))
}

fn unknown_predicate(pos: Pos, found: &str) -> ParseError {
    ParseError::UnknownPredicate {
        line: pos.line,
        column: pos.column,
        found: found.to_string(),
    }
}

const KEYWORDS: [&str; 3] = ["and", "andM", "not"];

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.at].0.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        tok
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        let pos = self.pos();
        ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Ident(name) = self.peek() {
            if KEYWORDS.contains(&name.as_str()) {
                let name = name.clone();
                let open = self.pos();
                self.bump();
                self.expect(Tok::LParen)?;
                return match name.as_str() {
                    "not" => {
                        let inner = self.formula()?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::not(inner))
                    }
                    "and" => {
                        let first = self.formula()?;
                        if *self.peek() == Tok::RParen {
                            return Err(ParseError::ConjArity {
                                line: open.line,
                                column: open.column,
                                found: 1,
                            });
                        }
                        self.expect(Tok::Comma)?;
                        let second = self.formula()?;
                        if *self.peek() == Tok::Comma {
                            return Err(self.syntax(
                                "`and` takes exactly 2 formulas; use `andM(..)` for more"
                                    .to_string(),
                            ));
                        }
                        self.expect(Tok::RParen)?;
                        Ok(Formula::and(first, second))
                    }
                    "andM" => {
                        let mut children = vec![self.formula()?];
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            children.push(self.formula()?);
                        }
                        self.expect(Tok::RParen)?;
                        if children.len() < 2 {
                            return Err(ParseError::ConjArity {
                                line: open.line,
                                column: open.column,
                                found: children.len(),
                            });
                        }
                        Ok(Formula::Conj(children))
                    }
                    _ => unreachable!(),
                };
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term()?;
        let predicate = match self.peek() {
            Tok::Le => Predicate::Le,
            Tok::Neq => Predicate::Neq,
            other => {
                return Err(self.syntax(format!(
                    "expected `<=` or `!=` after a term, found {}",
                    other.describe()
                )))
            }
        };
        self.bump();
        let rhs = self.term()?;
        Ok(Formula::atom(predicate, lhs, rhs))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => Err(self.syntax(format!(
                "`{name}` is a reserved word and cannot be a variable"
            ))),
            Tok::Ident(name) => {
                let term = Term::Var(name.clone());
                self.bump();
                Ok(term)
            }
            Tok::Number(v) => {
                let term = Term::Const(*v);
                self.bump();
                Ok(term)
            }
            other => Err(self.syntax(format!("expected a term, found {}", other.describe()))),
        }
    }
}
