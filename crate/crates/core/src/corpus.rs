//! Named algebras and relations used throughout the workbench.
//!
//! Element numbering:
//!
//! | entry            | numbering                                                   |
//! |------------------|-------------------------------------------------------------|
//! | `five_set`       | `a=0, b1=1, b2=2, b3=3, c=4`                                 |
//! | `s7_semilattice` | `a=0, b1..b4=1..4, c=5, top=6`                               |
//! | `l7_majority`    | as `s7_semilattice`; the ambient bottom is dropped           |
//! | `m3`             | `0=bottom, 1..3 atoms, 4=top`                                |
//! | `n5`             | `0=bottom, 1=x, 2=y, 3=z, 4=top` with `x < y`, `z` off-chain |
//! | `chain(k)`       | `0 < 1 < .. < k-1`                                           |
//! | `theta_ab(n,a,b)`| plain indices                                                |
//! | `expand_five`    | as `five_set`                                                |

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, ClosureMode, OperationTable};
use crate::relcore::{BinRel, Elem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}` (expected one of: {NAMES})")]
    Unknown(String),
    #[error("bad parameters for `{name}`: {reason}")]
    BadParams { name: String, reason: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

const NAMES: &str =
    "five_set, s7_semilattice, l7_majority, m3, n5, chain(k), theta_ab(n,a,b), expand_five";

/// What a bundled relation is claimed to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelKind {
    Tolerance,
    /// A partial order compatible with the operations.
    Order,
    /// Reflexive and compatible.
    Admissible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedRelation {
    pub name: String,
    pub rel: BinRel,
    pub kind: RelKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub algebra: Algebra,
    pub relations: Vec<NamedRelation>,
    pub notes: String,
}

impl CorpusEntry {
    pub fn relation(&self, name: &str) -> Option<&BinRel> {
        self.relations.iter().find(|r| r.name == name).map(|r| &r.rel)
    }

    fn with(mut self, name: &str, rel: BinRel, kind: RelKind) -> Self {
        self.relations.push(NamedRelation {
            name: name.to_string(),
            rel,
            kind,
        });
        self
    }
}

/// Parsed corpus entry name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusName {
    FiveSet,
    S7Semilattice,
    L7Majority,
    M3,
    N5,
    Chain(usize),
    ThetaAb { n: usize, a: Elem, b: Elem },
    ExpandFive,
}

impl fmt::Display for CorpusName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusName::FiveSet => f.write_str("five_set"),
            CorpusName::S7Semilattice => f.write_str("s7_semilattice"),
            CorpusName::L7Majority => f.write_str("l7_majority"),
            CorpusName::M3 => f.write_str("m3"),
            CorpusName::N5 => f.write_str("n5"),
            CorpusName::Chain(k) => write!(f, "chain({k})"),
            CorpusName::ThetaAb { n, a, b } => write!(f, "theta_ab({n},{a},{b})"),
            CorpusName::ExpandFive => f.write_str("expand_five"),
        }
    }
}

fn parse_args(s: &str, prefix: &str) -> Option<Vec<usize>> {
    let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|p| p.trim().parse().ok()).collect()
}

impl FromStr for CorpusName {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let name = match s {
            "five_set" => CorpusName::FiveSet,
            "s7_semilattice" => CorpusName::S7Semilattice,
            "l7_majority" => CorpusName::L7Majority,
            "m3" => CorpusName::M3,
            "n5" => CorpusName::N5,
            "expand_five" => CorpusName::ExpandFive,
            _ => {
                if let Some(args) = parse_args(s, "chain") {
                    match args[..] {
                        [k] if (1..=64).contains(&k) => CorpusName::Chain(k),
                        _ => {
                            return Err(CorpusError::BadParams {
                                name: s.into(),
                                reason: "expected chain(k) with 1 <= k <= 64".into(),
                            })
                        }
                    }
                } else if let Some(args) = parse_args(s, "theta_ab") {
                    match args[..] {
                        [n, a, b] if n <= 64 && a < n && b < n && a != b => {
                            CorpusName::ThetaAb { n, a, b }
                        }
                        _ => {
                            return Err(CorpusError::BadParams {
                                name: s.into(),
                                reason: "expected theta_ab(n,a,b) with distinct a, b < n <= 64"
                                    .into(),
                            })
                        }
                    }
                } else {
                    return Err(CorpusError::Unknown(s.into()));
                }
            }
        };
        Ok(name)
    }
}

pub fn get(name: &str) -> Result<CorpusEntry, CorpusError> {
    Ok(build(name.parse()?))
}

pub fn build(name: CorpusName) -> CorpusEntry {
    match name {
        CorpusName::FiveSet => five_set(),
        CorpusName::S7Semilattice => s7_semilattice(),
        CorpusName::L7Majority => l7_majority(),
        CorpusName::M3 => m3(),
        CorpusName::N5 => n5(),
        CorpusName::Chain(k) => chain(k),
        CorpusName::ThetaAb { n, a, b } => theta_ab(n, a, b),
        CorpusName::ExpandFive => expand_five(),
    }
}

fn entry(name: impl Into<String>, algebra: Algebra, notes: &str) -> CorpusEntry {
    CorpusEntry {
        name: name.into(),
        algebra,
        relations: Vec::new(),
        notes: notes.to_string(),
    }
}

/// `a` related to each `b_i`, each `b_i` related to `c`.
fn bipartite_pairs(a: Elem, bs: std::ops::RangeInclusive<Elem>, c: Elem) -> Vec<(Elem, Elem)> {
    bs.flat_map(|b| [(a, b), (b, c)]).collect()
}

fn five_theta() -> BinRel {
    BinRel::symmetric_from_pairs(5, bipartite_pairs(0, 1..=3, 4)).expect("static relation")
}

/// The tolerance on six minimal elements plus a top, shared by the
/// semilattice and the majority algebra.
fn seven_theta() -> BinRel {
    let mut pairs = bipartite_pairs(0, 1..=4, 5);
    pairs.extend((0..7).map(|x| (6, x)));
    BinRel::symmetric_from_pairs(7, pairs).expect("static relation")
}

/// Five elements, no operations.
pub fn five_set() -> CorpusEntry {
    entry(
        "five_set",
        Algebra::new(5).expect("static algebra"),
        "Five-element set without operations. theta: a~b_i, b_i~c (i=1..3); a tolerance \
         that is not representable but is weakly representable.",
    )
    .with("theta", five_theta(), RelKind::Tolerance)
}

fn s7_join(x: Elem, y: Elem) -> Elem {
    if x == y {
        x
    } else {
        6
    }
}

/// Six minimal elements below a top, as a join semilattice.
pub fn s7_semilattice() -> CorpusEntry {
    let join = OperationTable::from_fn("join", 2, 7, |args| s7_join(args[0], args[1]))
        .expect("static table");
    entry(
        "s7_semilattice",
        Algebra::new(7).expect("static algebra").with_op(join).expect("static algebra"),
        "Join semilattice with minimal elements a,b1..b4,c and top 1. theta: top related to \
         everything, a~b_i, b_i~c (i=1..4); a non-representable tolerance.",
    )
    .with("theta", seven_theta(), RelKind::Tolerance)
}

/// The majority term `(x+y)(x+z)(y+z)` of the lattice with six atoms, a top
/// and a bottom, restricted to the nonzero elements.
pub fn l7_majority() -> CorpusEntry {
    // Ambient lattice: atoms 0..=5, top 6, bottom 7.
    const TOP: Elem = 6;
    const BOTTOM: Elem = 7;
    let join = |x: Elem, y: Elem| match (x, y) {
        _ if x == y => x,
        (BOTTOM, o) | (o, BOTTOM) => o,
        _ => TOP,
    };
    let meet = |x: Elem, y: Elem| match (x, y) {
        _ if x == y => x,
        (TOP, o) | (o, TOP) => o,
        _ => BOTTOM,
    };
    let f = OperationTable::from_fn("f", 3, 7, |args| {
        let (x, y, z) = (args[0], args[1], args[2]);
        let v = meet(meet(join(x, y), join(x, z)), join(y, z));
        assert_ne!(v, BOTTOM, "nonzero elements are closed under the majority term");
        v
    })
    .expect("static table");
    entry(
        "l7_majority",
        Algebra::new(7).expect("static algebra").with_op(f).expect("static algebra"),
        "Nonzero elements of the lattice with atoms a,b1..b4,c, top 1 and bottom 0, under \
         the majority operation f(x,y,z)=(x+y)(x+z)(y+z). theta as in s7_semilattice; not \
         representable.",
    )
    .with("theta", seven_theta(), RelKind::Tolerance)
}

/// Builds join/meet tables from a partial order that is a lattice order.
fn lattice_from_order(name: &str, leq: BinRel, notes: &str) -> CorpusEntry {
    let n = leq.n();
    let bound = |x: Elem, y: Elem, upper: bool| -> Elem {
        let candidates: Vec<Elem> = (0..n)
            .filter(|&z| {
                if upper {
                    leq.contains(x, z) && leq.contains(y, z)
                } else {
                    leq.contains(z, x) && leq.contains(z, y)
                }
            })
            .collect();
        *candidates
            .iter()
            .find(|&&z| {
                candidates.iter().all(|&w| {
                    if upper {
                        leq.contains(z, w)
                    } else {
                        leq.contains(w, z)
                    }
                })
            })
            .expect("lattice order")
    };
    let join = OperationTable::from_fn("join", 2, n, |a| bound(a[0], a[1], true)).expect("table");
    let meet = OperationTable::from_fn("meet", 2, n, |a| bound(a[0], a[1], false)).expect("table");
    let algebra = Algebra::new(n)
        .and_then(|a| a.with_op(join))
        .and_then(|a| a.with_op(meet))
        .expect("static lattice");
    entry(name, algebra, notes).with("leq", leq, RelKind::Order)
}

/// The five-element modular non-distributive lattice.
pub fn m3() -> CorpusEntry {
    let leq = BinRel::reflexive_from_pairs(
        5,
        [(0, 1), (0, 2), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4)],
    )
    .expect("static order");
    lattice_from_order(
        "m3",
        leq,
        "Diamond lattice: bottom 0, atoms 1,2,3, top 4. Every tolerance is representable.",
    )
}

/// The five-element non-modular lattice.
pub fn n5() -> CorpusEntry {
    let leq = BinRel::reflexive_from_pairs(
        5,
        [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (3, 4)],
    )
    .expect("static order");
    lattice_from_order(
        "n5",
        leq,
        "Pentagon lattice: 0 < 1 < 2 < 4 and 0 < 3 < 4. Every tolerance is representable.",
    )
}

/// A `k`-element chain.
pub fn chain(k: usize) -> CorpusEntry {
    let leq = BinRel::from_pairs(k, (0..k).flat_map(|x| (x..k).map(move |y| (x, y))))
        .expect("chain size within limits");
    lattice_from_order(
        &format!("chain({k})"),
        leq,
        "Chain lattice. Every tolerance is representable.",
    )
}

/// Set of size `n` with the tolerance relating everything except `a` and
/// `b`, together with a reflexive `r` such that `r ∘ r⁻` equals it.
pub fn theta_ab(n: usize, a: Elem, b: Elem) -> CorpusEntry {
    let mut theta = BinRel::full(n).expect("valid size");
    theta.remove(a, b);
    theta.remove(b, a);
    // x r y iff x = y = a, or x = y = b, or x is neither a nor b.
    let r = BinRel::from_pairs(
        n,
        (0..n).flat_map(|x| {
            (0..n).filter_map(move |y| (x == y || (x != a && x != b)).then_some((x, y)))
        }),
    )
    .expect("valid size");
    entry(
        format!("theta_ab({n},{a},{b})"),
        Algebra::new(n).expect("valid size"),
        "Set without operations; theta relates every pair except {a,b}; r is a reflexive \
         relation with theta = r o r^-.",
    )
    .with("theta", theta, RelKind::Tolerance)
    .with("r", r, RelKind::Admissible)
}

/// `five_set` expanded by every unary map into a single theta-block.
pub fn expand_five() -> CorpusEntry {
    let theta = five_theta();
    let algebra = Algebra::new(5)
        .expect("static algebra")
        .expand(&theta)
        .expect("theta is a tolerance of a set");
    entry(
        "expand_five",
        algebra,
        "five_set expanded by all unary maps A -> {a,b} for theta-related a,b. Every \
         nontrivial admissible relation contains theta, so theta is not even weakly \
         representable.",
    )
    .with("theta", theta, RelKind::Tolerance)
}

/// Closure helper used by tests and callers that want principal relations on
/// corpus algebras.
pub fn principal_tolerance(entry: &CorpusEntry, a: Elem, b: Elem) -> Result<BinRel, AlgebraError> {
    entry.algebra.closure([(a, b)], ClosureMode::ReflexiveSymmetric)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_entries() -> Vec<CorpusEntry> {
        let mut v: Vec<_> = [
            "five_set",
            "s7_semilattice",
            "l7_majority",
            "m3",
            "n5",
            "chain(4)",
            "chain(1)",
            "theta_ab(5,0,1)",
            "expand_five",
        ]
        .iter()
        .map(|n| get(n).unwrap())
        .collect();
        for n in 2..=6 {
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        v.push(theta_ab(n, a, b));
                    }
                }
            }
        }
        v
    }

    #[test]
    fn every_bundled_relation_has_its_claimed_kind() {
        for e in all_entries() {
            for r in &e.relations {
                let class = e.algebra.classify_relation(&r.rel).unwrap();
                let ok = match r.kind {
                    RelKind::Tolerance => class.tolerance,
                    RelKind::Admissible => class.admissible,
                    RelKind::Order => {
                        let anti = r.rel.intersect(&r.rel.converse()).unwrap().is_diagonal();
                        class.admissible && r.rel.is_transitive() && anti
                    }
                };
                assert!(ok, "{} / {}", e.name, r.name);
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for e in all_entries() {
            let parsed: CorpusName = e.name.parse().unwrap();
            assert_eq!(parsed.to_string(), e.name);
        }
        assert!(matches!(get("nope"), Err(CorpusError::Unknown(_))));
        assert!(matches!(get("chain(0)"), Err(CorpusError::BadParams { .. })));
        assert!(matches!(get("theta_ab(3,1,1)"), Err(CorpusError::BadParams { .. })));
        assert!(matches!(get("theta_ab(3,1)"), Err(CorpusError::BadParams { .. })));
    }

    #[test]
    fn five_theta_shape() {
        let t = five_theta();
        assert_eq!(t.len(), 17);
        assert!(t.contains(0, 1) && t.contains(1, 4));
        assert!(!t.contains(0, 4));
        assert!(!t.is_transitive());
    }

    #[test]
    fn no_three_pairwise_related_minimals() {
        let t = seven_theta();
        for x in 0..6 {
            for y in x + 1..6 {
                for z in y + 1..6 {
                    assert!(!(t.contains(x, y) && t.contains(y, z) && t.contains(x, z)));
                }
            }
        }
    }

    #[test]
    fn majority_identities_hold() {
        let l = l7_majority().algebra;
        for x in 0..7 {
            for y in 0..7 {
                for args in [[x, x, y], [x, y, x], [y, x, x]] {
                    assert_eq!(l.eval_op("f", &args).unwrap(), x);
                }
            }
        }
    }

    #[test]
    fn bundled_theta_ab_witness_verifies() {
        for n in 2..=6 {
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let e = theta_ab(n, a, b);
                    let r = e.relation("r").unwrap();
                    assert!(r.is_reflexive());
                    assert_eq!(&r.compose_converse(), e.relation("theta").unwrap());
                }
            }
        }
    }

    #[test]
    fn lattice_tables() {
        let m = m3().algebra;
        assert_eq!(m.eval_op("join", &[1, 2]).unwrap(), 4);
        assert_eq!(m.eval_op("meet", &[1, 2]).unwrap(), 0);
        let n = n5().algebra;
        assert_eq!(n.eval_op("join", &[1, 3]).unwrap(), 4);
        assert_eq!(n.eval_op("meet", &[2, 3]).unwrap(), 0);
        assert_eq!(n.eval_op("join", &[1, 2]).unwrap(), 2);
        let c = chain(4).algebra;
        assert_eq!(c.eval_op("join", &[1, 3]).unwrap(), 3);
        assert_eq!(c.eval_op("meet", &[1, 3]).unwrap(), 1);
    }

    #[test]
    fn principal_tolerance_on_s7() {
        let s = s7_semilattice();
        let t = principal_tolerance(&s, 0, 1).unwrap();
        assert!(t.contains(6, 1) && t.contains(1, 6));
    }
}
