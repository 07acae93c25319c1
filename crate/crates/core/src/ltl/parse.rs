//! Recursive-descent parser for the textual LTL syntax.
//!
//! Precedence, loosest first: `->` (right), `|`, `&`, `U`/`R` (right),
//! unary `!`/`X`/`F`/`G`.

use std::fmt;

use thiserror::Error;

use super::{Formula, COMPLEMENT_MARKER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: found {found}, expected one of {}", expected.join(", "))]
    Syntax {
        line: usize,
        column: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown operator '{op}' at {line}:{column}")]
    UnknownOperator {
        line: usize,
        column: usize,
        op: String,
    },
    #[error("unbalanced parentheses at {line}:{column}")]
    Unbalanced { line: usize, column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Next,
    Finally,
    Globally,
    Until,
    Release,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "atom '{s}'"),
            Tok::True => f.write_str("'true'"),
            Tok::False => f.write_str("'false'"),
            Tok::Bang => f.write_str("'!'"),
            Tok::Amp => f.write_str("'&'"),
            Tok::Pipe => f.write_str("'|'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Next => f.write_str("'X'"),
            Tok::Finally => f.write_str("'F'"),
            Tok::Globally => f.write_str("'G'"),
            Tok::Until => f.write_str("'U'"),
            Tok::Release => f.write_str("'R'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub(super) fn is_reserved(word: &str) -> bool {
    matches!(word, "true" | "false" | "X" | "F" | "G" | "U" | "R")
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(input: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok| out.push(Spanned { tok, line: start_line, column: start_col });
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
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let mut word: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == COMPLEMENT_MARKER {
                word.push(COMPLEMENT_MARKER);
                i += 1;
            }
            col += i - start;
            push(match word.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "X" => Tok::Next,
                "F" => Tok::Finally,
                "G" => Tok::Globally,
                "U" => Tok::Until,
                "R" => Tok::Release,
                _ => Tok::Ident(word),
            });
            continue;
        }
        let (tok, width) = match c {
            '!' => (Tok::Bang, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Pipe, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            _ => {
                // Swallow a run of punctuation so "<->" reports as one operator.
                let start = i;
                let mut j = i;
                while j < chars.len()
                    && !chars[j].is_alphanumeric()
                    && !chars[j].is_whitespace()
                    && !matches!(chars[j], '(' | ')' | '_')
                {
                    j += 1;
                }
                return Err(ParseError::UnknownOperator {
                    line,
                    column: col,
                    op: chars[start..j.max(start + 1)].iter().collect(),
                });
            }
        };
        push(tok);
        i += width;
        col += width;
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    // positions of currently open parentheses
    open: Vec<(usize, usize)>,
}

const PRIMARY_START: &[&str] = &["atom", "'true'", "'false'", "'('", "'!'", "'X'", "'F'", "'G'"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        match (&here.tok, self.open.last()) {
            (Tok::RParen, None) => ParseError::Unbalanced {
                line: here.line,
                column: here.column,
            },
            (Tok::Eof, Some(&(line, column))) => ParseError::Unbalanced { line, column },
            _ => ParseError::Syntax {
                line: here.line,
                column: here.column,
                found: here.tok.to_string(),
                expected: expected.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = lhs.and(self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                Ok(lhs.until(self.until()?))
            }
            Tok::Release => {
                self.bump();
                Ok(lhs.release(self.until()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Next => {
                self.bump();
                Ok(self.unary()?.next())
            }
            Tok::Finally => {
                self.bump();
                Ok(self.unary()?.finally())
            }
            Tok::Globally => {
                self.bump();
                Ok(self.unary()?.globally())
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                let open = self.bump();
                self.open.push((open.line, open.column));
                let inner = self.implies()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["'&'", "'|'", "'->'", "'U'", "'R'", "')'"]));
                }
                self.bump();
                self.open.pop();
                Ok(inner)
            }
            _ => Err(self.error(PRIMARY_START)),
        }
    }
}

/// Parses LTL text into a [`Formula`].
pub fn parse(input: &str) -> Result<Formula, ParseError> {
    let toks = lex(input)?;
    let mut parser = Parser { toks, pos: 0, open: Vec::new() };
    let f = parser.implies()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(&["'&'", "'|'", "'->'", "'U'", "'R'", "end of input"]));
    }
    Ok(f)
}
