//! Abstract syntax, parser and printer for the modal language with `K`
//! (knowing), `O` (only-knowing), `A` (abduction) and the preferential
//! conditional `>`.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! formula := implish
//! implish := prefish ( "->" implish )?
//! prefish := orish ( ">" prefish )?
//! orish   := andish ( "|" andish )*
//! andish  := unary ( "&" unary )*
//! unary   := "~" unary | "K" unary | "O" unary | "A" unary
//!          | atom | "true" | "false" | "(" formula ")"
//! atom    := letter ( letter | digit | "_" )*
//! ```
//!
//! `->` and `>` associate to the right, `|` and `&` to the left.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Knows(Box<Formula>),
    Only(Box<Formula>),
    Abd(Box<Formula>),
    PrefCond(Box<Formula>, Box<Formula>),
}

/// Words that can never be atom names.
pub const RESERVED: [&str; 5] = ["K", "O", "A", "true", "false"];

/// Checks the identifier rule for atoms (and rejects the reserved words).
pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&name)
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn knows(f: Formula) -> Self {
        Formula::Knows(Box::new(f))
    }

    pub fn only(f: Formula) -> Self {
        Formula::Only(Box::new(f))
    }

    pub fn abd(f: Formula) -> Self {
        Formula::Abd(Box::new(f))
    }

    pub fn pref(a: Formula, b: Formula) -> Self {
        Formula::PrefCond(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction of the given formulas, `None` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// Left-nested disjunction of the given formulas, `None` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::or)
    }

    /// Height of the syntax tree; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(a) | Formula::Knows(a) | Formula::Only(a) | Formula::Abd(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::PrefCond(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(a) | Formula::Knows(a) | Formula::Only(a) | Formula::Abd(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::PrefCond(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Not(a) | Formula::Knows(a) | Formula::Only(a) | Formula::Abd(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::PrefCond(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// True iff the formula contains no `K`, `O`, `A` or `>`.
    pub fn is_objective(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(a) => a.is_objective(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_objective() && b.is_objective(),
            Formula::Knows(_) | Formula::Only(_) | Formula::Abd(_) | Formula::PrefCond(..) => false,
        }
    }

    /// True iff the formula is `A g` with `g` boolean.
    pub fn is_abductive(&self) -> bool {
        matches!(self, Formula::Abd(g) if g.is_objective())
    }

    pub fn contains_pref(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => false,
            Formula::PrefCond(..) => true,
            Formula::Not(a) | Formula::Knows(a) | Formula::Only(a) | Formula::Abd(a) => a.contains_pref(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.contains_pref() || b.contains_pref(),
        }
    }

    /// Operands of every `O` subformula, in left-to-right order without
    /// duplicates.
    pub fn only_operands(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect_only(&mut out);
        out
    }

    fn collect_only(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Only(a) => {
                if !out.contains(a) {
                    out.push((**a).clone());
                }
                a.collect_only(out);
            }
            Formula::Not(a) | Formula::Knows(a) | Formula::Abd(a) => a.collect_only(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::PrefCond(a, b) => {
                a.collect_only(out);
                b.collect_only(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 0,
            Formula::PrefCond(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn write_at(&self, out: &mut String, min: u8) {
        let paren = self.precedence() < min;
        if paren {
            out.push('(');
        }
        match self {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Atom(p) => out.push_str(p),
            Formula::Not(a) => {
                out.push('~');
                a.write_at(out, 4);
            }
            Formula::Knows(a) => write_prefix(out, "K", a),
            Formula::Only(a) => write_prefix(out, "O", a),
            Formula::Abd(a) => write_prefix(out, "A", a),
            Formula::And(a, b) => write_binary(out, a, " & ", b, 3, 4),
            Formula::Or(a, b) => write_binary(out, a, " | ", b, 2, 3),
            Formula::PrefCond(a, b) => write_binary(out, a, " > ", b, 2, 1),
            Formula::Implies(a, b) => write_binary(out, a, " -> ", b, 1, 0),
        }
        if paren {
            out.push(')');
        }
    }
}

fn write_prefix(out: &mut String, op: &str, operand: &Formula) {
    out.push_str(op);
    if operand.precedence() >= 4 {
        out.push(' ');
    }
    operand.write_at(out, 4);
}

fn write_binary(out: &mut String, a: &Formula, op: &str, b: &Formula, left: u8, right: u8) {
    a.write_at(out, left);
    out.push_str(op);
    b.write_at(out, right);
}

/// Canonical text of a formula. `parse(&print(f)) == Ok(f)` for every formula
/// whose atom names satisfy [`is_valid_atom_name`].
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    f.write_at(&mut out, 0);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&print(self))
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {}: found {found}, expected one of {}", position + 1, expected.join(", "))]
    Unexpected {
        /// Byte offset into the input.
        position: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown operator `{operator}` at column {}", position + 1)]
    UnknownOperator { position: usize, operator: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Unexpected { position, .. } | ParseError::UnknownOperator { position, .. } => *position,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    Gt,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Gt => "`>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'~' => Tok::Tilde,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                // Operators are read as a whole run of symbol characters so
                // that `&&` or `<->` is reported as one unknown operator.
                let mut end = start;
                while end < bytes.len()
                    && !bytes[end].is_ascii_alphanumeric()
                    && !bytes[end].is_ascii_whitespace()
                    && !b"()~".contains(&bytes[end])
                {
                    end += text[end..].chars().next().map_or(1, char::len_utf8);
                }
                let tok = match &text[start..end] {
                    "&" => Tok::Amp,
                    "|" => Tok::Bar,
                    ">" => Tok::Gt,
                    "->" => Tok::Arrow,
                    op => return Err(ParseError::UnknownOperator { position: start, operator: op.to_string() }),
                };
                i = end - 1;
                tok
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const UNARY_START: [&str; 8] = ["`~`", "`K`", "`O`", "`A`", "atom", "`true`", "`false`", "`(`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let (position, tok) = &self.toks[self.pos];
        ParseError::Unexpected { position: *position, found: tok.describe(), expected: expected.to_vec() }
    }

    fn implish(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.prefish()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implish()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn prefish(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.orish()?;
        if *self.peek() == Tok::Gt {
            self.bump();
            let rhs = self.prefish()?;
            return Ok(Formula::pref(lhs, rhs));
        }
        Ok(lhs)
    }

    fn orish(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.andish()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.andish()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn andish(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implish()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`->`", "`>`", "`|`", "`&`", "`)`"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(match name.as_str() {
                    "K" => Formula::knows(self.unary()?),
                    "O" => Formula::only(self.unary()?),
                    "A" => Formula::abd(self.unary()?),
                    "true" => Formula::True,
                    "false" => Formula::False,
                    _ => Formula::Atom(name),
                })
            }
            _ => Err(self.error(&UNARY_START)),
        }
    }
}

/// Parses a formula. Never panics; every rejection carries a byte position.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.implish()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["`->`", "`>`", "`|`", "`&`", "end of input"]));
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn a(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn parses_only_knowing_of_implication() {
        assert_eq!(p("O(cold -> cough)"), Formula::only(Formula::implies(a("cold"), a("cough"))));
    }

    #[test]
    fn parses_atom() {
        assert_eq!(p("p"), a("p"));
        assert_eq!(p("chest_pain"), a("chest_pain"));
    }

    #[test]
    fn prefix_modalities_bind_tighter_than_and() {
        assert_eq!(p("A flu & K fever"), Formula::and(Formula::abd(a("flu")), Formula::knows(a("fever"))));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("a -> b -> c"), Formula::implies(a("a"), Formula::implies(a("b"), a("c"))));
        assert_eq!(p("a > b > c"), Formula::pref(a("a"), Formula::pref(a("b"), a("c"))));
        assert_eq!(p("a | b | c"), Formula::or(Formula::or(a("a"), a("b")), a("c")));
        assert_eq!(
            p("a | b & c -> d > e"),
            Formula::implies(Formula::or(a("a"), Formula::and(a("b"), a("c"))), Formula::pref(a("d"), a("e")))
        );
        assert_eq!(p("~K ~p"), Formula::not(Formula::knows(Formula::not(a("p")))));
        assert_eq!(p("Kp"), a("Kp"));
        assert_eq!(p("true & false"), Formula::and(Formula::True, Formula::False));
    }

    #[test]
    fn prints_canonically() {
        assert_eq!(print(&Formula::only(a("flu"))), "O flu");
        assert_eq!(print(&Formula::and(a("a"), Formula::or(a("b"), a("c")))), "a & (b | c)");
        assert_eq!(print(&Formula::pref(a("fever"), a("flu"))), "fever > flu");
        assert_eq!(print(&p("O(cold -> cough)")), "O(cold -> cough)");
        assert_eq!(print(&p("(a -> b) -> c")), "(a -> b) -> c");
        assert_eq!(print(&p("a | (b | c)")), "a | (b | c)");
        assert_eq!(print(&p("~~p")), "~~p");
        assert_eq!(print(&p("K ~p")), "K ~p");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("a & ").unwrap_err();
        assert!(matches!(e, ParseError::Unexpected { position: 4, .. }), "{e:?}");
        let e = parse("a && b").unwrap_err();
        assert_eq!(e, ParseError::UnknownOperator { position: 2, operator: "&&".into() });
        let e = parse("a <-> b").unwrap_err();
        assert!(matches!(e, ParseError::UnknownOperator { position: 2, .. }));
        let e = parse("(a").unwrap_err();
        assert!(matches!(e, ParseError::Unexpected { position: 2, .. }));
        let e = parse("a b").unwrap_err();
        assert!(matches!(e, ParseError::Unexpected { position: 2, .. }));
        assert!(parse("").is_err());
        assert!(parse("K").is_err());
        assert!(parse("p ∧ q").is_err());
    }

    #[test]
    fn abductive_and_objective_predicates() {
        assert!(Formula::abd(a("flu")).is_abductive());
        assert!(!Formula::abd(Formula::knows(a("p"))).is_abductive());
        assert!(!Formula::knows(a("p")).is_abductive());

        assert!(Formula::implies(a("cold"), a("cough")).is_objective());
        assert!(!Formula::only(a("p")).is_objective());
        assert!(!Formula::and(a("p"), Formula::abd(a("q"))).is_objective());
        assert!(!p("a > b").is_objective());
    }

    #[test]
    fn atoms_collapse_duplicates() {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(p("cold -> cough").atoms(), set(&["cold", "cough"]));
        assert_eq!(p("p").atoms(), set(&["p"]));
        assert_eq!(p("p & ~p").atoms(), set(&["p"]));
    }

    #[test]
    fn depth_size_and_only_operands() {
        let f = p("O(a -> b) & K O a");
        assert_eq!(f.depth(), 3);
        assert_eq!(f.size(), 8);
        assert_eq!(f.only_operands(), vec![p("a -> b"), p("a")]);
    }

    #[test]
    fn atom_names() {
        assert!(is_valid_atom_name("strep_throat"));
        assert!(is_valid_atom_name("w2"));
        assert!(!is_valid_atom_name("2w"));
        assert!(!is_valid_atom_name("K"));
        assert!(!is_valid_atom_name("_x"));
        assert!(!is_valid_atom_name(""));
    }
}
