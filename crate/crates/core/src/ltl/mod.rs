//! LTL formulas: abstract syntax, printing, negation normal form and
//! complement-closure rewriting.

mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use parse::{parse, ParseError};

/// Suffix appended to an atom name to form its complement ("barred") atom.
pub const COMPLEMENT_MARKER: char = '~';

/// An LTL formula over named atomic propositions.
///
/// `NegAtom` is the closed negative literal produced by [`to_nnf`]; it is
/// distinct from `Not(Atom(p))`, which only appears before normalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    NegAtom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("formula is not in negation normal form: {0}")]
    NotNnf(String),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn neg_atom(name: impl Into<String>) -> Self {
        Formula::NegAtom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Self {
        Formula::Next(Box::new(self))
    }

    pub fn finally(self) -> Self {
        Formula::Finally(Box::new(self))
    }

    pub fn globally(self) -> Self {
        Formula::Globally(Box::new(self))
    }

    pub fn until(self, rhs: Formula) -> Self {
        Formula::Until(Box::new(self), Box::new(rhs))
    }

    pub fn release(self, rhs: Formula) -> Self {
        Formula::Release(Box::new(self), Box::new(rhs))
    }

    /// Conjunction of all formulas, left-associated; `True` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(|acc, f| acc.and(f))
            .unwrap_or(Formula::True)
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Atom(_) | NegAtom(_) => vec![],
            Not(a) | Next(a) | Finally(a) | Globally(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }

    /// Atom names occurring in the formula (positively or negatively).
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) | Formula::NegAtom(p) => {
                out.insert(p.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_atoms(out);
                }
            }
        }
    }

    /// Operator nesting depth; literals and constants have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// True when the formula contains no `Not` and no `Implies` node.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Not(_) | Formula::Implies(_, _) => false,
            _ => self.children().iter().all(|c| c.is_nnf()),
        }
    }

    /// All distinct subformulas in pre-order of first occurrence.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if seen.insert(f) {
                out.push(f);
                for c in f.children().into_iter().rev() {
                    stack.push(c);
                }
            }
        }
        out
    }
}

/// Name of the complement atom of `name`. The bar is an involution:
/// `bar(bar(p)) == p`.
pub fn bar(name: &str) -> String {
    match name.strip_suffix(COMPLEMENT_MARKER) {
        Some(base) => base.to_string(),
        None => format!("{name}{COMPLEMENT_MARKER}"),
    }
}

pub fn is_barred(name: &str) -> bool {
    name.ends_with(COMPLEMENT_MARKER)
}

/// Whether `name` is a legal user atom: `[a-zA-Z_][a-zA-Z0-9_]*` and not a
/// reserved word of the grammar.
pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !parse::is_reserved(name)
}

/// Negation of `f`, normalized: `to_nnf(Not(f))`.
pub fn negate(f: &Formula) -> Formula {
    nnf_negated(f)
}

/// Pushes negations down to the literals and eliminates implications.
pub fn to_nnf(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => True,
        False => False,
        Atom(p) => Atom(p.clone()),
        NegAtom(p) => NegAtom(p.clone()),
        Not(a) => nnf_negated(a),
        And(a, b) => to_nnf(a).and(to_nnf(b)),
        Or(a, b) => to_nnf(a).or(to_nnf(b)),
        Implies(a, b) => nnf_negated(a).or(to_nnf(b)),
        Next(a) => to_nnf(a).next(),
        Finally(a) => to_nnf(a).finally(),
        Globally(a) => to_nnf(a).globally(),
        Until(a, b) => to_nnf(a).until(to_nnf(b)),
        Release(a, b) => to_nnf(a).release(to_nnf(b)),
    }
}

fn nnf_negated(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => False,
        False => True,
        Atom(p) => NegAtom(p.clone()),
        NegAtom(p) => Atom(p.clone()),
        Not(a) => to_nnf(a),
        And(a, b) => nnf_negated(a).or(nnf_negated(b)),
        Or(a, b) => nnf_negated(a).and(nnf_negated(b)),
        Implies(a, b) => to_nnf(a).and(nnf_negated(b)),
        Next(a) => nnf_negated(a).next(),
        Finally(a) => nnf_negated(a).globally(),
        Globally(a) => nnf_negated(a).finally(),
        Until(a, b) => nnf_negated(a).release(nnf_negated(b)),
        Release(a, b) => nnf_negated(a).until(nnf_negated(b)),
    }
}

/// Rewrites every negative literal `NegAtom(p)` into the positive barred
/// atom `Atom(bar(p))`. The input must be in NNF.
pub fn complement_close(f: &Formula) -> Result<Formula, LtlError> {
    if !f.is_nnf() {
        return Err(LtlError::NotNnf(f.to_string()));
    }
    Ok(close_rec(f))
}

fn close_rec(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        NegAtom(p) => Atom(bar(p)),
        True | False | Atom(_) => f.clone(),
        And(a, b) => close_rec(a).and(close_rec(b)),
        Or(a, b) => close_rec(a).or(close_rec(b)),
        Next(a) => close_rec(a).next(),
        Finally(a) => close_rec(a).finally(),
        Globally(a) => close_rec(a).globally(),
        Until(a, b) => close_rec(a).until(close_rec(b)),
        Release(a, b) => close_rec(a).release(close_rec(b)),
        Not(_) | Implies(_, _) => unreachable!("checked by is_nnf"),
    }
}

// Binding strength used by the printer; mirrors the parser's levels.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNTIL: u8 = 4;
const PREC_UNARY: u8 = 5;

impl Formula {
    fn precedence(&self) -> u8 {
        use Formula::*;
        match self {
            Implies(..) => PREC_IMPLIES,
            Or(..) => PREC_OR,
            And(..) => PREC_AND,
            Until(..) | Release(..) => PREC_UNTIL,
            _ => PREC_UNARY,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let parens = self.precedence() < min_prec;
        if parens {
            f.write_str("(")?;
        }
        use Formula::*;
        match self {
            True => f.write_str("true")?,
            False => f.write_str("false")?,
            Atom(p) => f.write_str(p)?,
            NegAtom(p) => write!(f, "!{p}")?,
            Not(a) => {
                f.write_str("!")?;
                a.fmt_at(f, PREC_UNARY)?;
            }
            Next(a) | Finally(a) | Globally(a) => {
                let op = match self {
                    Next(_) => "X ",
                    Finally(_) => "F ",
                    _ => "G ",
                };
                f.write_str(op)?;
                a.fmt_at(f, PREC_UNARY)?;
            }
            // right-associative
            Implies(a, b) => {
                a.fmt_at(f, PREC_IMPLIES + 1)?;
                f.write_str(" -> ")?;
                b.fmt_at(f, PREC_IMPLIES)?;
            }
            // left-associative
            Or(a, b) => {
                a.fmt_at(f, PREC_OR)?;
                f.write_str(" | ")?;
                b.fmt_at(f, PREC_OR + 1)?;
            }
            And(a, b) => {
                a.fmt_at(f, PREC_AND)?;
                f.write_str(" & ")?;
                b.fmt_at(f, PREC_AND + 1)?;
            }
            // right-associative
            Until(a, b) | Release(a, b) => {
                a.fmt_at(f, PREC_UNTIL + 1)?;
                f.write_str(if matches!(self, Until(..)) { " U " } else { " R " })?;
                b.fmt_at(f, PREC_UNTIL)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
