//! Propositional formulas over the variables `p1..pn`.
//!
//! Formulas are immutable and reference counted, so large formulas built by
//! recursion (de Jongh formulas in particular) share their subterms instead of
//! copying them. Negation is not a node: `~a` is stored as `a -> F`.
//!
//! The concrete syntax is
//!
//! ```text
//! atom ::= "p" digits | "T" | "F" | "(" expr ")" | "~" atom
//! conj ::= atom ("&" atom)*
//! disj ::= conj ("|" conj)*
//! expr ::= disj ("->" expr)?
//! ```
//!
//! `&` and `|` associate to the left, `->` to the right.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone)]
pub struct Formula(Arc<Node>);

struct Node {
    kind: Kind,
    max_var: u32,
    size: u64,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Kind {
    Var(u32),
    Top,
    Bot,
    And(Formula, Formula),
    Or(Formula, Formula),
    Imp(Formula, Formula),
}

impl Formula {
    fn from_kind(kind: Kind) -> Formula {
        let (max_var, size) = match &kind {
            Kind::Var(i) => (*i, 1),
            Kind::Top | Kind::Bot => (0, 1),
            Kind::And(a, b) | Kind::Or(a, b) | Kind::Imp(a, b) => {
                (a.max_var().max(b.max_var()), a.size().saturating_add(b.size()).saturating_add(1))
            }
        };
        Formula(Arc::new(Node { kind, max_var, size }))
    }

    /// The variable `p_index`. Indices start at 1.
    pub fn var(index: u32) -> Formula {
        assert!(index >= 1, "variable indices start at 1");
        Formula::from_kind(Kind::Var(index))
    }

    pub fn top() -> Formula {
        Formula::from_kind(Kind::Top)
    }

    pub fn bot() -> Formula {
        Formula::from_kind(Kind::Bot)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::from_kind(Kind::And(a, b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::from_kind(Kind::Or(a, b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::from_kind(Kind::Imp(a, b))
    }

    pub fn negation(a: Formula) -> Formula {
        Formula::imp(a, Formula::bot())
    }

    /// Left-nested conjunction; the empty conjunction is `T`.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; the empty disjunction is `F`.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bot)
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Largest variable index occurring in the formula, 0 if none.
    pub fn max_var(&self) -> u32 {
        self.0.max_var
    }

    /// Number of nodes of the formula read as a tree (shared subterms are
    /// counted once per occurrence). Saturates at `u64::MAX`.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// Identity of the shared node, used to memoize over formula DAGs.
    pub(crate) fn node_key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.max_var == other.0.max_var && self.0.size == other.0.size && self.0.kind == other.0.kind)
    }
}

impl Eq for Formula {}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({self})")
    }
}

// Binding strength: `->` < `|` < `&` < atoms.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_ATOM: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f.kind() {
        Kind::Imp(..) => PREC_IMP,
        Kind::Or(..) => PREC_OR,
        Kind::And(..) => PREC_AND,
        _ => PREC_ATOM,
    }
}

fn write_at(f: &Formula, min_prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(f) < min_prec {
        out.write_str("(")?;
        write_at(f, 0, out)?;
        return out.write_str(")");
    }
    match f.kind() {
        Kind::Var(i) => write!(out, "p{i}"),
        Kind::Top => out.write_str("T"),
        Kind::Bot => out.write_str("F"),
        Kind::And(a, b) => {
            write_at(a, PREC_AND, out)?;
            out.write_str(" & ")?;
            write_at(b, PREC_ATOM, out)
        }
        Kind::Or(a, b) => {
            write_at(a, PREC_OR, out)?;
            out.write_str(" | ")?;
            write_at(b, PREC_AND, out)
        }
        Kind::Imp(a, b) => {
            write_at(a, PREC_OR, out)?;
            out.write_str(" -> ")?;
            write_at(b, PREC_IMP, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}

/// Which connectives outside the (∧,→)-fragment a formula uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FragmentClass {
    pub uses_or: bool,
    pub uses_bot: bool,
}

impl FragmentClass {
    /// Built from variables, `T`, `&` and `->` only.
    pub fn meet_implication(&self) -> bool {
        !self.uses_or && !self.uses_bot
    }
}

pub fn classify_fragment(f: &Formula) -> FragmentClass {
    let mut class = FragmentClass::default();
    let mut seen = HashSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if !seen.insert(g.node_key()) {
            continue;
        }
        match g.kind() {
            Kind::Var(_) | Kind::Top => {}
            Kind::Bot => class.uses_bot = true,
            Kind::Or(a, b) => {
                class.uses_or = true;
                stack.push(a);
                stack.push(b);
            }
            Kind::And(a, b) | Kind::Imp(a, b) => {
                stack.push(a);
                stack.push(b);
            }
        }
    }
    class
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0 };
    let f = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Formula, ParseError> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { position: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.eat("->") {
            let rhs = self.expr()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        while self.eat("|") {
            acc = Formula::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.atom()?;
        while self.eat("&") {
            acc = Formula::and(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        let Some(&c) = self.src.get(self.pos) else {
            return Err(self.error("unexpected end of input"));
        };
        match c {
            b'T' => {
                self.pos += 1;
                Ok(Formula::top())
            }
            b'F' => {
                self.pos += 1;
                Ok(Formula::bot())
            }
            b'~' => {
                self.pos += 1;
                Ok(Formula::negation(self.atom()?))
            }
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(")") {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            b'p' => {
                let start = self.pos;
                self.pos += 1;
                let digits_start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if digits_start == self.pos {
                    self.pos = start;
                    return Err(self.error("expected digits after 'p'"));
                }
                let digits = std::str::from_utf8(&self.src[digits_start..self.pos]).expect("ascii digits");
                match digits.parse::<u32>() {
                    Ok(0) => {
                        self.pos = start;
                        Err(self.error("variable index 0 is not allowed"))
                    }
                    Ok(i) => Ok(Formula::var(i)),
                    Err(_) => {
                        self.pos = start;
                        Err(self.error("variable index out of range"))
                    }
                }
            }
            _ => Err(self.error("expected a variable, 'T', 'F', '~' or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(i: u32) -> Formula {
        Formula::var(i)
    }

    #[test]
    fn parse_grammar_cases() {
        assert_eq!(parse("p1 & p2 -> p3").unwrap(), Formula::imp(Formula::and(p(1), p(2)), p(3)));
        assert_eq!(parse("~~p1").unwrap(), Formula::negation(Formula::negation(p(1))));
        assert_eq!(parse("p1 -> p2 -> p3").unwrap(), Formula::imp(p(1), Formula::imp(p(2), p(3))));
        assert_eq!(parse("p1 | p2 & p3").unwrap(), Formula::or(p(1), Formula::and(p(2), p(3))));
        assert_eq!(parse(" ( T ) ").unwrap(), Formula::top());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse("p1 & p0").unwrap_err();
        assert_eq!(err.position, 5);
        assert!(err.message.contains("index 0"));
        assert_eq!(parse("p1 &").unwrap_err().position, 4);
        assert_eq!(parse("(p1").unwrap_err().position, 3);
        assert_eq!(parse("p1 p2").unwrap_err().position, 3);
        assert!(parse("q1").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn render_cases() {
        assert_eq!(Formula::imp(p(1), p(2)).render(), "p1 -> p2");
        assert_eq!(Formula::and(p(1), Formula::imp(p(2), Formula::bot())).render(), "p1 & (p2 -> F)");
        assert_eq!(Formula::bot().render(), "F");
        assert_eq!(Formula::conj(Vec::new()).render(), "T");
        assert_eq!(Formula::imp(Formula::imp(p(1), p(2)), p(3)).render(), "(p1 -> p2) -> p3");
        assert_eq!(Formula::and(p(1), Formula::and(p(2), p(3))).render(), "p1 & (p2 & p3)");
        assert_eq!(Formula::conj([p(1), p(2), p(3)]).render(), "p1 & p2 & p3");
    }

    #[test]
    fn fragment_classification() {
        let c = classify_fragment(&parse("p1 -> (p2 & p1)").unwrap());
        assert!(c.meet_implication());
        let c = classify_fragment(&parse("p1 | p2").unwrap());
        assert!(c.uses_or && !c.meet_implication());
        let c = classify_fragment(&parse("~p1").unwrap());
        assert!(c.uses_bot && !c.uses_or);
        assert!(classify_fragment(&parse("T").unwrap()).meet_implication());
    }

    #[test]
    fn max_var_and_size() {
        let f = parse("p3 -> p1 & p7").unwrap();
        assert_eq!(f.max_var(), 7);
        assert_eq!(f.size(), 5);
        assert_eq!(parse("T").unwrap().max_var(), 0);
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![(1u32..5).prop_map(Formula::var), Just(Formula::top()), Just(Formula::bot()),];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(f in arb_formula()) {
            let text = f.render();
            let back = parse(&text).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
