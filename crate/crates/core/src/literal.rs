//! Compact multidegree literals such as `3^150,7^89,15`.
//!
//! ```text
//! literal := term ("," term)*
//! term    := int | int "^" int
//! ```
//!
//! `d^m` means `m` copies of the degree `d`, not the number `d` raised to
//! the power `m`. Both integers must be at least 1.

use std::fmt;

use thiserror::Error;

use crate::invariants::Multidegree;

/// Upper bound on the number of degrees a literal may expand to.
pub const MAX_DEGREES: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    ExpectedInteger,
    Overflow,
    Zero,
    UnexpectedChar(char),
    TooManyDegrees(u64),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::ExpectedInteger => f.write_str("expected a positive integer"),
            ParseErrorKind::Overflow => f.write_str("integer does not fit in 64 bits"),
            ParseErrorKind::Zero => f.write_str("degrees and multiplicities must be at least 1"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}, expected ',' or '^'"),
            ParseErrorKind::TooManyDegrees(n) => {
                write!(f, "literal expands to {n} degrees, more than the limit of {MAX_DEGREES}")
            }
        }
    }
}

/// A parse failure at a 0-based byte offset.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid multidegree at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(b @ b'0'..=b'9') = self.peek() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or(ParseError {
                    position: start,
                    kind: ParseErrorKind::Overflow,
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(ParseErrorKind::ExpectedInteger));
        }
        if value == 0 {
            return Err(ParseError {
                position: start,
                kind: ParseErrorKind::Zero,
            });
        }
        Ok(value)
    }

    fn unexpected(&self, text: &str) -> ParseError {
        let c = text[self.pos..].chars().next().expect("not at end");
        self.err(ParseErrorKind::UnexpectedChar(c))
    }
}

/// Parses a literal into `(degree, multiplicity)` runs, in order.
pub fn parse_runs(text: &str) -> Result<Vec<(u64, u64)>, ParseError> {
    let mut cur = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut runs = Vec::new();
    let mut count: u64 = 0;
    loop {
        let degree = cur.int()?;
        let mult_start = cur.pos;
        let mult = if cur.peek() == Some(b'^') {
            cur.pos += 1;
            cur.int()?
        } else {
            1
        };
        count = count.saturating_add(mult);
        if count > MAX_DEGREES {
            return Err(ParseError {
                position: mult_start,
                kind: ParseErrorKind::TooManyDegrees(count),
            });
        }
        runs.push((degree, mult));
        match cur.peek() {
            None => return Ok(runs),
            Some(b',') => cur.pos += 1,
            // digits are ASCII, so this is a character boundary
            Some(_) => return Err(cur.unexpected(text)),
        }
    }
}

pub fn parse_multidegree(text: &str) -> Result<Multidegree, ParseError> {
    let runs = parse_runs(text)?;
    let degrees = runs
        .iter()
        .flat_map(|&(d, m)| std::iter::repeat_n(d, m as usize));
    Ok(Multidegree::new(degrees).expect("nonempty and positive by construction"))
}
