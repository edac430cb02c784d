use thiserror::Error;

use super::{Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    Ident(String),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let (l, k) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            continue;
        }
        col += 1;
        match c {
            c if c.is_whitespace() => {}
            '\\' | 'λ' => out.push((Tok::Lambda, l, k)),
            '.' => out.push((Tok::Dot, l, k)),
            '(' => out.push((Tok::LParen, l, k)),
            ')' => out.push((Tok::RParen, l, k)),
            c if c.is_alphabetic() || c == '_' => {
                let mut s = c.to_string();
                while let Some(&d) = chars.peek() {
                    if (d.is_alphanumeric() || d == '_' || d == '\'') && d != 'λ' {
                        s.push(d);
                        col += 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), l, k));
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: k,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    out.push((Tok::End, line, col));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (_, line, column) = self.toks[self.pos];
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Lambda {
            return self.lambda();
        }
        let mut acc = self.atom()?;
        loop {
            match self.peek() {
                Tok::Ident(_) | Tok::LParen => {
                    let arg = self.atom()?;
                    acc = Term::app(acc, arg);
                }
                Tok::Lambda => {
                    let arg = self.lambda()?;
                    return Ok(Term::app(acc, arg));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.bump();
        let mut binders: Vec<Name> = Vec::new();
        while let Tok::Ident(x) = self.peek() {
            binders.push(Name::new(x));
            self.bump();
        }
        if binders.is_empty() {
            return Err(self.error("expected a variable after '\\'"));
        }
        if *self.peek() != Tok::Dot {
            return Err(self.error("expected '.' after binders"));
        }
        self.bump();
        let body = self.term()?;
        Ok(Term::abs_many(binders, body))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Term::var(Name::new(&x)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(t)
            }
            Tok::End => Err(self.error("unexpected end of input")),
            other => Err(self.error(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses `term ::= var | "\" var+ "." term | term term | "(" term ")"`.
/// Application is left-associative and abstraction bodies extend as far
/// right as possible. `λ` is accepted in place of `\`.
pub fn parse_lambda(text: &str) -> Result<Term, ParseError> {
    let mut lx = Lexer {
        toks: lex(text)?,
        pos: 0,
    };
    let t = lx.term()?;
    if *lx.peek() != Tok::End {
        return Err(lx.error("trailing input"));
    }
    Ok(t)
}
