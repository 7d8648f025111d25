//! Structured boolean queries and their text syntax.
//!
//! ```text
//! query   := term | op '(' args ')'
//! op      := 'AND' | 'OR'
//! sor     := 'SOR' '(' 'K' '=' int ';' child (',' child)* ')'
//! child   := query quota?
//! quota   := '{' ('min' '=' int | 'frac' '=' real) '}'
//! ```
//!
//! For example `SOR(K=10; a, b{min=3}, __group:d4{frac=0.2})`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};

/// Minimum share of a Strong-OR result that must match one child.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quota {
    MinCount(usize),
    /// Fraction `p ∈ (0, 1]` of the scan limit `K`.
    MinFraction(f64),
}

impl Quota {
    /// Minimum count `k_d` for a scan limit `K`; fractions round up.
    pub fn resolve(&self, scan_limit: usize) -> usize {
        match *self {
            Quota::MinCount(k) => k,
            Quota::MinFraction(p) => libm::ceil(p * scan_limit as f64) as usize,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Quota::MinCount(0) => Err(config_err("min quota must be at least 1")),
            Quota::MinFraction(p) if !(p > 0.0 && p <= 1.0) => {
                Err(config_err(format!("fraction quota {p} outside (0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongOrChild {
    pub query: SQuery,
    pub quota: Option<Quota>,
}

/// Disjunction whose children may demand a minimum share of the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongOr {
    pub children: Vec<StrongOrChild>,
    /// Early-stop limit `K`: the maximum result size.
    pub scan_limit: usize,
}

impl StrongOr {
    /// Resolved `k_d` per child (`None` for children without a quota).
    pub fn min_counts(&self) -> Vec<Option<usize>> {
        self.children
            .iter()
            .map(|c| c.quota.map(|q| q.resolve(self.scan_limit)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.children.len() < 2 {
            return Err(config_err("SOR needs at least two children"));
        }
        if self.scan_limit == 0 {
            return Err(config_err("SOR scan limit K must be at least 1"));
        }
        for child in &self.children {
            if let Some(q) = child.quota {
                q.validate()?;
            }
            child.query.validate()?;
        }
        let total: usize = self.min_counts().into_iter().flatten().sum();
        if total > self.scan_limit {
            return Err(config_err(format!(
                "SOR quotas need {total} results but K = {}",
                self.scan_limit
            )));
        }
        Ok(())
    }
}

/// Structured boolean query tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SQuery {
    Term(String),
    And(Vec<SQuery>),
    Or(Vec<SQuery>),
    StrongOr(Box<StrongOr>),
}

impl SQuery {
    pub fn term(token: impl Into<String>) -> Self {
        SQuery::Term(token.into())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SQuery::Term(t) if t.is_empty() => Err(config_err("empty term")),
            SQuery::Term(_) => Ok(()),
            SQuery::And(c) | SQuery::Or(c) => {
                if c.is_empty() {
                    return Err(config_err("AND/OR need at least one child"));
                }
                c.iter().try_for_each(SQuery::validate)
            }
            SQuery::StrongOr(s) => s.validate(),
        }
    }

    /// Parses the text syntax; quotas are checked for feasibility.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parser = Parser { text, pos: 0 };
        let query = parser.query()?;
        parser.skip_ws();
        if parser.pos != text.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        query.validate()?;
        Ok(query)
    }
}

impl fmt::Display for SQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, op: &str, children: &[SQuery]) -> fmt::Result {
            write!(f, "{op}(")?;
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        }
        match self {
            SQuery::Term(t) => f.write_str(t),
            SQuery::And(c) => list(f, "AND", c),
            SQuery::Or(c) => list(f, "OR", c),
            SQuery::StrongOr(s) => {
                write!(f, "SOR(K={}; ", s.scan_limit)?;
                for (i, c) in s.children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", c.query)?;
                    match c.quota {
                        Some(Quota::MinCount(k)) => write!(f, "{{min={k}}}")?,
                        Some(Quota::MinFraction(p)) => write!(f, "{{frac={p}}}")?,
                        None => {}
                    }
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

fn is_term_char(c: char) -> bool {
    !(c.is_whitespace() || "(),;{}=".contains(c))
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> Result<&str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !is_term_char(c))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a term"));
        }
        let start = self.pos;
        self.pos += len;
        Ok(&self.text[start..self.pos])
    }

    fn query(&mut self) -> Result<SQuery> {
        self.skip_ws();
        let start = self.pos;
        let word = self.word()?.to_string();
        if self.peek() != Some('(') {
            return Ok(SQuery::Term(word));
        }
        match word.as_str() {
            "AND" | "OR" => {
                self.expect('(')?;
                let mut children = alloc::vec![self.query()?];
                while self.peek() == Some(',') {
                    self.expect(',')?;
                    children.push(self.query()?);
                }
                self.expect(')')?;
                Ok(if word == "AND" {
                    SQuery::And(children)
                } else {
                    SQuery::Or(children)
                })
            }
            "SOR" => self.strong_or().map(|s| SQuery::StrongOr(Box::new(s))),
            _ => {
                self.pos = start;
                Err(self.error(format!("unknown operator `{word}`")))
            }
        }
    }

    fn strong_or(&mut self) -> Result<StrongOr> {
        self.expect('(')?;
        if self.word()? != "K" {
            return Err(self.error("SOR must start with `K=<limit>;`"));
        }
        self.expect('=')?;
        let scan_limit = self.integer()?;
        self.expect(';')?;
        let mut children = alloc::vec![self.child()?];
        while self.peek() == Some(',') {
            self.expect(',')?;
            children.push(self.child()?);
        }
        self.expect(')')?;
        Ok(StrongOr {
            children,
            scan_limit,
        })
    }

    fn child(&mut self) -> Result<StrongOrChild> {
        let query = self.query()?;
        let quota = if self.peek() == Some('{') {
            self.expect('{')?;
            let key_pos = self.pos;
            let key = self.word()?.to_string();
            self.expect('=')?;
            let quota = match key.as_str() {
                "min" => Quota::MinCount(self.integer()?),
                "frac" => {
                    let at = self.pos;
                    let raw = self.word()?;
                    let p: f64 = raw.parse().map_err(|_| Error::Parse {
                        position: at,
                        message: format!("invalid fraction `{raw}`"),
                    })?;
                    Quota::MinFraction(p)
                }
                _ => {
                    return Err(Error::Parse {
                        position: key_pos,
                        message: format!("unknown quota `{key}`, expected `min` or `frac`"),
                    })
                }
            };
            self.expect('}')?;
            Some(quota)
        } else {
            None
        };
        Ok(StrongOrChild { query, quota })
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let at = self.pos;
        let raw = self.word()?;
        raw.parse().map_err(|_| Error::Parse {
            position: at,
            message: format!("invalid integer `{raw}`"),
        })
    }
}
