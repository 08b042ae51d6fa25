//! Terms over relation variables built from composition and intersection.
//!
//! Concrete syntax:
//!
//! ```text
//! term   := factor ('&' factor)*
//! factor := atom ('o' atom)*
//! atom   := identifier | '(' term ')'
//! ```
//!
//! `o` binds tighter than `&`; both associate to the left. `∘` and `∩` are
//! accepted for `o` and `&`. Because `o` is an operator, it cannot be used as
//! a variable name (longer identifiers such as `xo` or `orb` are fine).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError};
use crate::relcore::{BinRel, RelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("variable `{0}` is not bound to a tolerance of the algebra")]
    NotTolerance(String),
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelTerm {
    Var(String),
    Compose(Box<RelTerm>, Box<RelTerm>),
    Intersect(Box<RelTerm>, Box<RelTerm>),
}

impl RelTerm {
    pub fn var(name: impl Into<String>) -> Self {
        RelTerm::Var(name.into())
    }

    pub fn compose(left: RelTerm, right: RelTerm) -> Self {
        RelTerm::Compose(Box::new(left), Box::new(right))
    }

    pub fn intersect(left: RelTerm, right: RelTerm) -> Self {
        RelTerm::Intersect(Box::new(left), Box::new(right))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            RelTerm::Var(_) => 1,
            RelTerm::Compose(l, r) | RelTerm::Intersect(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Number of variable occurrences.
    pub fn occurrences(&self) -> usize {
        match self {
            RelTerm::Var(_) => 1,
            RelTerm::Compose(l, r) | RelTerm::Intersect(l, r) => {
                l.occurrences() + r.occurrences()
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            RelTerm::Var(v) => {
                out.insert(v);
            }
            RelTerm::Compose(l, r) | RelTerm::Intersect(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Evaluates the term with `∘` as relational composition and `∩` as
    /// intersection.
    pub fn eval(&self, env: &BTreeMap<String, BinRel>) -> Result<BinRel, TermError> {
        match self {
            RelTerm::Var(v) => env.get(v).cloned().ok_or_else(|| TermError::Unbound(v.clone())),
            RelTerm::Compose(l, r) => Ok(l.eval(env)?.compose(&r.eval(env)?)?),
            RelTerm::Intersect(l, r) => Ok(l.eval(env)?.intersect(&r.eval(env)?)?),
        }
    }

    /// The two-terminal labeled graph: a variable is a single edge, `∘` puts
    /// graphs in series and `∩` in parallel.
    pub fn graph(&self) -> TermGraph {
        let mut g = TermGraph {
            vertices: 2,
            edges: Vec::new(),
            source: 0,
            sink: 1,
        };
        self.build(&mut g, 0, 1);
        g
    }

    fn build(&self, g: &mut TermGraph, from: usize, to: usize) {
        match self {
            RelTerm::Var(v) => g.edges.push((from, to, v.clone())),
            RelTerm::Compose(l, r) => {
                let mid = g.vertices;
                g.vertices += 1;
                l.build(g, from, mid);
                r.build(g, mid, to);
            }
            RelTerm::Intersect(l, r) => {
                l.build(g, from, to);
                r.build(g, from, to);
            }
        }
    }

    /// No vertex of the term graph touches two distinct edges carrying the
    /// same label.
    pub fn is_regular(&self) -> bool {
        self.graph().is_regular()
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        match self {
            RelTerm::Var(v) => f.write_str(v),
            RelTerm::Intersect(l, r) => {
                if level > 0 {
                    f.write_str("(")?;
                }
                l.write_prec(f, 0)?;
                f.write_str(" & ")?;
                r.write_prec(f, 1)?;
                if level > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            RelTerm::Compose(l, r) => {
                if level > 1 {
                    f.write_str("(")?;
                }
                l.write_prec(f, 1)?;
                f.write_str(" o ")?;
                r.write_prec(f, 2)?;
                if level > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Prints in the parseable concrete syntax with minimal parentheses.
impl fmt::Display for RelTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

impl FromStr for RelTerm {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

/// Labeled series-parallel graph with distinguished terminals. Edges are
/// stored as `(tail, head, label)` but adjacency ignores direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, String)>,
    pub source: usize,
    pub sink: usize,
}

impl TermGraph {
    pub fn is_regular(&self) -> bool {
        let mut seen: BTreeSet<(usize, &str)> = BTreeSet::new();
        self.edges.iter().all(|(u, v, label)| {
            seen.insert((*u, label.as_str())) && seen.insert((*v, label.as_str()))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Compose,
    Intersect,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Token)>, TermError> {
    let mut out = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let token = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '&' | '∩' => Token::Intersect,
            '∘' => Token::Compose,
            '(' => Token::Open,
            ')' => Token::Close,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((pos, if ident == "o" { Token::Compose } else { Token::Ident(ident) }));
                continue;
            }
            other => {
                return Err(TermError::Syntax {
                    pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        chars.next();
        out.push((pos, token));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, TermError> {
        Err(TermError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn term(&mut self) -> Result<RelTerm, TermError> {
        let mut left = self.factor()?;
        while self.peek() == Some(&Token::Intersect) {
            self.at += 1;
            left = RelTerm::intersect(left, self.factor()?);
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<RelTerm, TermError> {
        let mut left = self.atom()?;
        while self.peek() == Some(&Token::Compose) {
            self.at += 1;
            left = RelTerm::compose(left, self.atom()?);
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<RelTerm, TermError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.at += 1;
                Ok(RelTerm::Var(name))
            }
            Some(Token::Open) => {
                self.at += 1;
                let inner = self.term()?;
                if self.peek() != Some(&Token::Close) {
                    return self.error("expected `)`");
                }
                self.at += 1;
                Ok(inner)
            }
            Some(_) => self.error("expected a variable or `(`"),
            None => self.error("unexpected end of input"),
        }
    }
}

pub fn parse_term(text: &str) -> Result<RelTerm, TermError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        at: 0,
        end: text.len(),
    };
    let t = p.term()?;
    if p.at != p.tokens.len() {
        return p.error("unexpected trailing input");
    }
    Ok(t)
}

/// Replaces each bound relation `Θ` by `Θ ∘ Θ`.
pub fn square_env(env: &BTreeMap<String, BinRel>) -> Result<BTreeMap<String, BinRel>, TermError> {
    env.iter()
        .map(|(k, v)| Ok((k.clone(), v.compose(v)?)))
        .collect()
}

/// For tolerances `Θᵢ` of `algebra`, checks
/// `p(Θ₁∘Θ₁, ..) ⊆ q(Θ₁∘Θ₁, ..)` for this one assignment.
pub fn check_identity_iv(
    algebra: &Algebra,
    p: &RelTerm,
    q: &RelTerm,
    env: &BTreeMap<String, BinRel>,
) -> Result<bool, TermError> {
    for (name, rel) in env {
        if !algebra.is_tolerance(rel)? {
            return Err(TermError::NotTolerance(name.clone()));
        }
    }
    let squared = square_env(env)?;
    Ok(p.eval(&squared)?.is_subset(&q.eval(&squared)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str) -> RelTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let (x, y, z) = (RelTerm::var("x"), RelTerm::var("y"), RelTerm::var("z"));
        assert_eq!(t("x o y"), RelTerm::compose(x.clone(), y.clone()));
        assert_eq!(
            t("x o y & z"),
            RelTerm::intersect(RelTerm::compose(x.clone(), y.clone()), z.clone())
        );
        assert_eq!(
            t("x o (y & z)"),
            RelTerm::compose(x.clone(), RelTerm::intersect(y.clone(), z.clone()))
        );
        assert_eq!(t("x∘y ∩ z"), t("x o y & z"));
        assert_eq!(
            t("x o y o z"),
            RelTerm::compose(RelTerm::compose(x.clone(), y.clone()), z.clone())
        );
        assert_eq!(t("xo"), RelTerm::var("xo"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases = [("", 0), ("x o", 3), ("x & & y", 4), ("(x", 2), ("x y", 2), ("x + y", 2), ("o", 0)];
        for (src, at) in cases {
            match parse_term(src) {
                Err(TermError::Syntax { pos, .. }) => assert_eq!(pos, at, "{src:?}"),
                other => panic!("{src:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn graph_shapes() {
        let g = t("x").graph();
        assert_eq!((g.vertices, g.edges.len()), (2, 1));
        let g = t("x o x").graph();
        assert_eq!(g.vertices, 3);
        assert_eq!(g.edges, vec![(0, 2, "x".into()), (2, 1, "x".into())]);
        let g = t("x & y").graph();
        assert_eq!(g.vertices, 2);
        assert_eq!(g.edges, vec![(0, 1, "x".into()), (0, 1, "y".into())]);
        assert_ne!(g.source, g.sink);
    }

    #[test]
    fn regularity_examples() {
        assert!(t("x & y").is_regular());
        assert!(t("x o y").is_regular());
        assert!(!t("x o x").is_regular());
        assert!(!t("x & x").is_regular());
        assert!(t("x o y o x").is_regular());
        assert!(!t("(x o y) & (x o z)").is_regular());
        assert!(t("(x o y) & (y o x)").is_regular());
    }

    #[test]
    fn eval_examples() {
        let r = BinRel::reflexive_from_pairs(3, [(0, 1)]).unwrap();
        let s = BinRel::reflexive_from_pairs(3, [(1, 2)]).unwrap();
        let env = BTreeMap::from([("x".to_string(), r.clone()), ("y".to_string(), s.clone())]);
        assert_eq!(t("x").eval(&env).unwrap(), r);
        assert_eq!(t("x o y").eval(&env).unwrap(), r.compose(&s).unwrap());
        assert_eq!(t("z").eval(&env), Err(TermError::Unbound("z".into())));
        let mut bad = env.clone();
        bad.insert("y".into(), BinRel::diagonal(2).unwrap());
        assert!(matches!(t("x o y").eval(&bad), Err(TermError::Rel(_))));
    }

    #[test]
    fn identity_iv_examples() {
        let a = Algebra::new(3).unwrap();
        let alpha = BinRel::symmetric_from_pairs(3, [(0, 1)]).unwrap();
        let beta = BinRel::symmetric_from_pairs(3, [(1, 2)]).unwrap();
        let env = BTreeMap::from([("x".to_string(), alpha.clone()), ("y".to_string(), beta.clone())]);
        assert!(check_identity_iv(&a, &t("x o y"), &t("x o y"), &env).unwrap());
        assert!(check_identity_iv(&a, &t("x & y"), &t("x"), &env).unwrap());
        // Congruences square to themselves, so this is alpha o beta ⊆ beta o alpha.
        let expected = alpha
            .compose(&beta)
            .unwrap()
            .is_subset(&beta.compose(&alpha).unwrap());
        assert_eq!(check_identity_iv(&a, &t("x o y"), &t("y o x"), &env).unwrap(), expected);
        assert!(!expected);
        let mut bad = env.clone();
        bad.insert("x".into(), BinRel::reflexive_from_pairs(3, [(0, 1)]).unwrap());
        assert_eq!(
            check_identity_iv(&a, &t("x"), &t("x"), &bad),
            Err(TermError::NotTolerance("x".into()))
        );
    }

    fn arb_term() -> impl Strategy<Value = RelTerm> {
        let leaf = prop::sample::select(vec!["x", "y", "z", "w1"]).prop_map(RelTerm::var);
        leaf.prop_recursive(4, 15, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| RelTerm::compose(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| RelTerm::intersect(l, r)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(term in arb_term()) {
            prop_assert_eq!(parse_term(&term.to_string()).unwrap(), term);
        }

        #[test]
        fn graph_has_one_edge_per_occurrence(term in arb_term()) {
            prop_assert_eq!(term.graph().edges.len(), term.occurrences());
        }
    }
}
