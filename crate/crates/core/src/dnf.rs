//! Positive DNFs over neighborhood predicates.
//!
//! Text grammar (whitespace-insensitive):
//!
//! ```text
//! dnf    := clause ('|' clause)* | 'false'
//! clause := '(' lit ('&' lit)* ')' | lit
//! lit    := 'q' INT
//! ```
//!
//! `false` (or an empty string) denotes the empty DNF, which never fires.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::family::{PredicateMask, MAX_NEIGHBORHOODS};

/// A non-empty conjunction of predicates, stored as a bit mask
/// (bit `i - 1` stands for `q_i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause(PredicateMask);

impl Clause {
    /// Builds a clause from 1-based predicate indices.
    pub fn new(predicates: &[usize]) -> Result<Self> {
        let mut mask = 0;
        for &p in predicates {
            if p == 0 || p > MAX_NEIGHBORHOODS {
                return Err(Error::InvalidArgument(format!("predicate index q{p} out of range")));
            }
            mask |= 1 << (p - 1);
        }
        Self::from_mask(mask)
    }

    pub fn from_mask(mask: PredicateMask) -> Result<Self> {
        if mask == 0 {
            return Err(Error::InvalidArgument("a clause needs at least one predicate".into()));
        }
        Ok(Clause(mask))
    }

    /// Single-predicate clause `q_i`.
    pub fn single(i: usize) -> Result<Self> {
        Self::new(&[i])
    }

    pub fn mask(self) -> PredicateMask {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// 1-based predicate indices in increasing order.
    pub fn predicates(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..MAX_NEIGHBORHOODS).filter(move |b| mask >> b & 1 == 1).map(|b| b + 1)
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_NEIGHBORHOODS).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    /// Conjunction with one more predicate.
    pub fn with(self, i: usize) -> Self {
        Clause(self.0 | 1 << (i - 1))
    }

    /// `self` is at least as general as `other` (its predicates are a subset).
    pub fn subsumes(self, other: Clause) -> bool {
        self.0 & !other.0 == 0
    }

    /// True when every predicate of the clause holds.
    #[inline]
    pub fn holds(self, satisfied: PredicateMask) -> bool {
        self.0 & !satisfied == 0
    }

    /// Largest predicate index used.
    pub fn max_predicate(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }
}

/// Shorter clauses first, then lexicographic order of predicate lists.
impl Ord for Clause {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.predicates().cmp(other.predicates()))
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let multi = self.len() > 1;
        if multi {
            f.write_str("(")?;
        }
        for (j, p) in self.predicates().enumerate() {
            if j > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "q{p}")?;
        }
        if multi {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A well-formed positive DNF: no duplicate clauses and no clause subsumed
/// by another. Clauses are kept in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Dnf {
    clauses: Vec<Clause>,
}

impl Dnf {
    /// The empty DNF, which never propagates.
    pub fn empty() -> Self {
        Dnf::default()
    }

    /// Builds a DNF from an arbitrary clause list, simplifying it.
    pub fn new<I: IntoIterator<Item = Clause>>(clauses: I) -> Self {
        let raw: Vec<Clause> = clauses.into_iter().collect();
        simplify_dnf(&raw)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// `Q(A, x)` given the mask of predicates satisfied by `(A, x)`.
    #[inline]
    pub fn holds(&self, satisfied: PredicateMask) -> bool {
        self.clauses.iter().any(|c| c.holds(satisfied))
    }

    /// Disjunction with one more clause, simplified.
    pub fn or(&self, clause: Clause) -> Dnf {
        let mut raw = self.clauses.clone();
        raw.push(clause);
        simplify_dnf(&raw)
    }

    /// True when adding `clause` would change nothing (it repeats or is
    /// subsumed by an existing clause).
    pub fn absorbs(&self, clause: Clause) -> bool {
        self.clauses.iter().any(|c| c.subsumes(clause))
    }

    pub fn max_predicate(&self) -> usize {
        self.clauses.iter().map(|c| c.max_predicate()).max().unwrap_or(0)
    }

    /// Checks the well-formedness invariants.
    pub fn is_well_formed(&self) -> bool {
        self.clauses.iter().enumerate().all(|(i, a)| {
            self.clauses
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !a.subsumes(*b))
        })
    }
}

/// Removes duplicate clauses and clauses subsumed by a more general one.
pub fn simplify_dnf(clauses: &[Clause]) -> Dnf {
    let mut sorted: Vec<Clause> = clauses.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut kept: Vec<Clause> = Vec::with_capacity(sorted.len());
    // Shorter clauses come first, so a clause can only be subsumed by one
    // already kept.
    for c in sorted {
        if !kept.iter().any(|k| k.subsumes(c)) {
            kept.push(c);
        }
    }
    Dnf { clauses: kept }
}

impl fmt::Debug for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dnf({self})")
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("false");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Dnf {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser::new(s).parse()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen,
    RParen,
    Or,
    And,
    Lit(usize),
    False,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
            Token::Or => f.write_str("|"),
            Token::And => f.write_str("&"),
            Token::Lit(i) => write!(f, "q{i}"),
            Token::False => f.write_str("false"),
        }
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    lex_error: Option<Error>,
    end_column: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        let mut tokens = Vec::new();
        let mut lex_error = None;
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let col = i + 1;
            let c = chars[i];
            match c {
                c if c.is_whitespace() => i += 1,
                '(' => {
                    tokens.push((Token::LParen, col));
                    i += 1;
                }
                ')' => {
                    tokens.push((Token::RParen, col));
                    i += 1;
                }
                '|' => {
                    tokens.push((Token::Or, col));
                    i += 1;
                }
                '&' => {
                    tokens.push((Token::And, col));
                    i += 1;
                }
                'q' | 'Q' => {
                    let start = i + 1;
                    let mut end = start;
                    while end < chars.len() && chars[end].is_ascii_digit() {
                        end += 1;
                    }
                    let digits: String = chars[start..end].iter().collect();
                    match digits.parse::<usize>() {
                        Ok(p) if (1..=MAX_NEIGHBORHOODS).contains(&p) => {
                            tokens.push((Token::Lit(p), col));
                        }
                        _ => {
                            let word: String = chars[i..end.max(i + 1)].iter().collect();
                            lex_error = Some(Error::parse(
                                1,
                                col,
                                format!("invalid predicate `{word}` (expected q1..q{MAX_NEIGHBORHOODS})"),
                            ));
                            break;
                        }
                    }
                    i = end;
                }
                _ if chars[i..].iter().take(5).collect::<String>() == "false" => {
                    tokens.push((Token::False, col));
                    i += 5;
                }
                other => {
                    lex_error = Some(Error::parse(1, col, format!("unexpected character `{other}`")));
                    break;
                }
            }
        }
        Parser {
            tokens,
            pos: 0,
            lex_error,
            end_column: chars.len() + 1,
        }
    }

    fn parse(mut self) -> Result<Dnf> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        if self.tokens.is_empty() {
            return Ok(Dnf::empty());
        }
        if self.tokens.len() == 1 && self.tokens[0].0 == Token::False {
            return Ok(Dnf::empty());
        }
        let mut clauses = vec![self.clause()?];
        while let Some((tok, col)) = self.next() {
            match tok {
                Token::Or => clauses.push(self.clause()?),
                other => return Err(Error::parse(1, col, format!("unexpected token `{other}`, expected `|`"))),
            }
        }
        Ok(simplify_dnf(&clauses))
    }

    fn next(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_lit(&mut self, after: &str) -> Result<usize> {
        match self.next() {
            Some((Token::Lit(i), _)) => Ok(i),
            Some((tok, col)) => Err(Error::parse(1, col, format!("unexpected token `{tok}`, expected a predicate"))),
            None => Err(Error::parse(
                1,
                self.end_column,
                format!("unexpected end of input after `{after}`, expected a predicate"),
            )),
        }
    }

    fn clause(&mut self) -> Result<Clause> {
        let prev = self.pos.checked_sub(1).and_then(|p| self.tokens.get(p)).map(|t| t.0.to_string());
        match self.next() {
            Some((Token::Lit(i), _)) => Clause::single(i),
            Some((Token::LParen, _)) => {
                let mut preds = vec![self.expect_lit("(")?];
                loop {
                    match self.next() {
                        Some((Token::And, _)) => preds.push(self.expect_lit("&")?),
                        Some((Token::RParen, _)) => break,
                        Some((tok, col)) => {
                            return Err(Error::parse(1, col, format!("unexpected token `{tok}`, expected `&` or `)`")))
                        }
                        None => return Err(Error::parse(1, self.end_column, "unexpected end of input, missing `)`")),
                    }
                }
                Clause::new(&preds)
            }
            Some((tok, col)) => Err(Error::parse(1, col, format!("unexpected token `{tok}`, expected a clause"))),
            None => Err(Error::parse(
                1,
                self.end_column,
                format!(
                    "unexpected end of input after `{}`, expected a clause",
                    prev.unwrap_or_default()
                ),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: &[usize]) -> Clause {
        Clause::new(p).unwrap()
    }

    #[test]
    fn duplicate_clause_collapses() {
        assert_eq!(simplify_dnf(&[c(&[1]), c(&[1])]), Dnf::new([c(&[1])]));
    }

    #[test]
    fn subsumed_clause_removed() {
        let d = simplify_dnf(&[c(&[1, 2]), c(&[1])]);
        assert_eq!(d.clauses(), &[c(&[1])]);
    }

    #[test]
    fn weight_expansion_simplifies() {
        let raw = [c(&[1, 2]), c(&[1, 3]), c(&[2, 3]), c(&[3]), c(&[1, 2, 3])];
        let d = simplify_dnf(&raw);
        assert_eq!(d.to_string(), "q3 | (q1 & q2)");
        assert_eq!(d, "(q1 & q2) | q3".parse().unwrap());
        assert!(d.is_well_formed());
    }

    #[test]
    fn clause_order_and_subsumption() {
        assert!(c(&[3]) < c(&[1, 2]));
        assert!(c(&[1, 2]) < c(&[1, 3]));
        assert!(c(&[1]).subsumes(c(&[1, 4])));
        assert!(!c(&[1, 4]).subsumes(c(&[1])));
        assert_eq!(c(&[2, 5]).max_predicate(), 5);
        assert!(Clause::new(&[]).is_err());
        assert!(Clause::new(&[0]).is_err());
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for text in ["q1", "(q1 & q2) | q3", " ( q4&q6 )|(q5 & q8)| q7 ", "false", ""] {
            let d: Dnf = text.parse().unwrap();
            let again: Dnf = d.to_string().parse().unwrap();
            assert_eq!(d, again, "{text}");
        }
        let d: Dnf = "(q2 & q1 & q2)".parse().unwrap();
        assert_eq!(d.to_string(), "(q1 & q2)");
    }

    #[test]
    fn parse_errors_name_the_token() {
        let err = "q0 |".parse::<Dnf>().unwrap_err();
        assert!(err.to_string().contains("q0"), "{err}");
        let err = "q1 |".parse::<Dnf>().unwrap_err();
        assert!(err.to_string().contains("end of input"), "{err}");
        let err = "(q1 & )".parse::<Dnf>().unwrap_err();
        assert!(matches!(err, Error::Parse { column: 7, .. }), "{err}");
        let err = "q1 q2".parse::<Dnf>().unwrap_err();
        assert!(err.to_string().contains("`q2`"), "{err}");
        assert!("(q1 & q2".parse::<Dnf>().is_err());
        assert!("x1".parse::<Dnf>().is_err());
    }

    #[test]
    fn holds_checks_any_clause() {
        let d: Dnf = "(q1 & q2) | q3".parse().unwrap();
        assert!(d.holds(0b011));
        assert!(d.holds(0b100));
        assert!(!d.holds(0b001));
        assert!(!Dnf::empty().holds(u64::MAX));
        assert!(d.absorbs(c(&[3, 4])));
        assert!(!d.absorbs(c(&[1])));
    }
}
