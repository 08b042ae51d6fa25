//! Decision procedures for (weak) representability of tolerances, plus the
//! enumerations and permutability check they rely on.
//!
//! # Representation search
//!
//! A representation of a tolerance `Θ` is a reflexive compatible `R` with
//! `R ∘ R⁻ = Θ`. Any such `R` lies inside `Θ`, since `R ⊆ R ∘ R⁻`. The search
//! walks compatible reflexive relations, always closed under the operations,
//! and keeps two constraints:
//!
//! * `R ∘ R⁻ ⊆ allowed`. This is monotone in `R`, so a violating node has no
//!   solutions above it.
//! * every pair `{a, b}` of `Θ` must eventually get a common successor `c`.
//!   For an uncovered pair the children are the closures of
//!   `R ∪ {(a, c), (b, c)}` over all `c` that survive the first constraint.
//!   Any solution above `R` contains one of these children, so branching on a
//!   single pair is complete. The pair with fewest children is chosen, ties
//!   broken by ascending index.
//!
//! Weak representability uses the same search once per pair `(a, b) ∉ Θ`,
//! with `allowed` set to everything except `{a, b}`: a family of admissible
//! relations intersects to `Θ` exactly when each excluded pair has some
//! member `R` with `Θ ⊆ R ∘ R⁻` that omits it.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, ClosureMode};
use crate::relcore::{BinRel, Elem, RelError};

/// Resource limits for searches and enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum search nodes per backtracking run.
    pub nodes: u64,
    /// Maximum number of relations held by an enumeration.
    pub relations: usize,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 1_000_000;
    pub const DEFAULT_RELATIONS: usize = 100_000;
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: Self::DEFAULT_NODES,
            relations: Self::DEFAULT_RELATIONS,
        }
    }
}

/// A violated hypothesis of [`represent_via_order`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderViolation {
    Arity { op: String, arity: usize },
    JoinNotIdempotent { x: Elem },
    JoinNotCommutative { x: Elem, y: Elem },
    JoinNotAssociative { x: Elem, y: Elem, z: Elem },
    /// `a ∧ (a ∨ b) ≠ a`
    AbsorptionLeft { a: Elem, b: Elem },
    /// `(a ∨ b) ∧ b ≠ b`
    AbsorptionRight { a: Elem, b: Elem },
    OrderNotCompatible,
}

impl fmt::Display for OrderViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderViolation::Arity { op, arity } => {
                write!(f, "operation `{op}` has arity {arity}, expected 2")
            }
            OrderViolation::JoinNotIdempotent { x } => write!(f, "x v x = x fails at x={x}"),
            OrderViolation::JoinNotCommutative { x, y } => {
                write!(f, "x v y = y v x fails at x={x}, y={y}")
            }
            OrderViolation::JoinNotAssociative { x, y, z } => {
                write!(f, "(x v y) v z = x v (y v z) fails at x={x}, y={y}, z={z}")
            }
            OrderViolation::AbsorptionLeft { a, b } => {
                write!(f, "a ^ (a v b) = a fails at a={a}, b={b}")
            }
            OrderViolation::AbsorptionRight { a, b } => {
                write!(f, "(a v b) ^ b = b fails at a={a}, b={b}")
            }
            OrderViolation::OrderNotCompatible => {
                f.write_str("the order induced by the join is not compatible with the algebra")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("relation is not a tolerance of the algebra")]
    NotTolerance,
    #[error("search exceeded the node budget of {0}")]
    NodeBudget(u64),
    #[error("enumeration exceeded the relation budget of {0}")]
    RelationBudget(usize),
    #[error("order hypothesis violated: {0}")]
    Order(OrderViolation),
    #[error("constructed witness failed verification: {0}")]
    Unverified(WitnessDefect),
}

impl From<RelError> for DecideError {
    fn from(e: RelError) -> Self {
        DecideError::Algebra(e.into())
    }
}

impl DecideError {
    /// True for budget exhaustion, which is not a decision.
    pub fn is_resource(&self) -> bool {
        matches!(self, DecideError::NodeBudget(_) | DecideError::RelationBudget(_))
    }
}

/// Why a claimed witness does not certify what it claims.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessDefect {
    #[error("relation sizes differ")]
    Dimension,
    #[error("relation is not reflexive")]
    NotReflexive,
    #[error("relation is not compatible with the operations")]
    NotCompatible,
    #[error("pair {0:?} of the tolerance is missing from R o R^-")]
    Missing((Elem, Elem)),
    #[error("pair {0:?} of R o R^- lies outside the tolerance")]
    Extra((Elem, Elem)),
    #[error("no separator for excluded pair {0:?}")]
    NoSeparator((Elem, Elem)),
    #[error("separator for {0:?} does not exclude it")]
    NotSeparated((Elem, Elem)),
    #[error("separator key {0:?} is not an excluded pair")]
    StrayKey((Elem, Elem)),
    #[error("separator for {pair:?}: {defect}")]
    Separator {
        pair: (Elem, Elem),
        defect: Box<WitnessDefect>,
    },
}

/// A reflexive compatible `R` with `R ∘ R⁻ = Θ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepWitness {
    pub r: BinRel,
}

impl RepWitness {
    pub fn verify(&self, algebra: &Algebra, theta: &BinRel) -> Result<(), WitnessDefect> {
        verify_representation(algebra, theta, &self.r)
    }
}

fn check_admissible(algebra: &Algebra, r: &BinRel) -> Result<(), WitnessDefect> {
    if r.n() != algebra.n() {
        return Err(WitnessDefect::Dimension);
    }
    if !r.is_reflexive() {
        return Err(WitnessDefect::NotReflexive);
    }
    if !algebra
        .is_compatible(r)
        .map_err(|_| WitnessDefect::Dimension)?
    {
        return Err(WitnessDefect::NotCompatible);
    }
    Ok(())
}

/// Checks `r` is reflexive and compatible and `r ∘ r⁻ = theta`. Uses the
/// tuple-enumerating compatibility test and plain composition, independent of
/// the closure machinery the searches run on.
pub fn verify_representation(
    algebra: &Algebra,
    theta: &BinRel,
    r: &BinRel,
) -> Result<(), WitnessDefect> {
    if theta.n() != algebra.n() {
        return Err(WitnessDefect::Dimension);
    }
    check_admissible(algebra, r)?;
    let product = r.compose(&r.converse()).map_err(|_| WitnessDefect::Dimension)?;
    if let Some(p) = theta.pairs().find(|&(a, b)| !product.contains(a, b)) {
        return Err(WitnessDefect::Missing(p));
    }
    if let Some(p) = product.pairs().find(|&(a, b)| !theta.contains(a, b)) {
        return Err(WitnessDefect::Extra(p));
    }
    Ok(())
}

/// One separating relation per ordered pair `(a, b) ∉ Θ` with `a ≠ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakRepWitness {
    pub separators: BTreeMap<(Elem, Elem), BinRel>,
}

impl WeakRepWitness {
    /// Intersection of `R ∘ R⁻` over the family; the full relation when the
    /// family is empty.
    pub fn intersection(&self, n: usize) -> Result<BinRel, RelError> {
        self.separators
            .values()
            .try_fold(BinRel::full(n)?, |acc, r| {
                acc.intersect(&r.compose(&r.converse())?)
            })
    }

    pub fn verify(&self, algebra: &Algebra, theta: &BinRel) -> Result<(), WitnessDefect> {
        let n = algebra.n();
        if theta.n() != n {
            return Err(WitnessDefect::Dimension);
        }
        for &key in self.separators.keys() {
            if key.0 == key.1 || theta.contains(key.0, key.1) {
                return Err(WitnessDefect::StrayKey(key));
            }
        }
        for (a, b) in theta.complement().off_diagonal() {
            let r = self
                .separators
                .get(&(a, b))
                .ok_or(WitnessDefect::NoSeparator((a, b)))?;
            let wrap = |defect| WitnessDefect::Separator {
                pair: (a, b),
                defect: Box::new(defect),
            };
            check_admissible(algebra, r).map_err(wrap)?;
            let product = r.compose(&r.converse()).map_err(|_| WitnessDefect::Dimension)?;
            if let Some(p) = theta.pairs().find(|&(x, y)| !product.contains(x, y)) {
                return Err(wrap(WitnessDefect::Missing(p)));
            }
            if product.contains(a, b) {
                return Err(WitnessDefect::NotSeparated((a, b)));
            }
        }
        let meet = self.intersection(n).map_err(|_| WitnessDefect::Dimension)?;
        if let Some(p) = meet.pairs().find(|&(x, y)| !theta.contains(x, y)) {
            return Err(WitnessDefect::Extra(p));
        }
        Ok(())
    }
}

/// Two congruences that do not permute, with a pair in `α ∘ β` but not in
/// `β ∘ α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonPermuting {
    pub alpha: BinRel,
    pub beta: BinRel,
    pub pair: (Elem, Elem),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutabilityReport {
    pub permutable: bool,
    pub counterexample: Option<NonPermuting>,
}

/// Result of [`enumerate_admissible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub relations: Vec<BinRel>,
    pub truncated: bool,
}

fn require_tolerance(algebra: &Algebra, theta: &BinRel) -> Result<(), DecideError> {
    if algebra.is_tolerance(theta)? {
        Ok(())
    } else {
        Err(DecideError::NotTolerance)
    }
}

struct CoverSearch<'a> {
    algebra: &'a Algebra,
    /// Unordered pairs `a < b` that need a common successor.
    targets: Vec<(Elem, Elem)>,
    allowed: &'a BinRel,
    nodes: u64,
    limit: u64,
    dead: HashSet<BinRel>,
}

impl<'a> CoverSearch<'a> {
    fn new(algebra: &'a Algebra, cover: &BinRel, allowed: &'a BinRel, limit: u64) -> Self {
        CoverSearch {
            algebra,
            targets: cover.off_diagonal().filter(|(a, b)| a < b).collect(),
            allowed,
            nodes: 0,
            limit,
            dead: HashSet::new(),
        }
    }

    fn run(mut self) -> Result<Option<BinRel>, DecideError> {
        let root = self.algebra.closure([], ClosureMode::Reflexive)?;
        if !root.compose_converse().is_subset(self.allowed) {
            return Ok(None);
        }
        self.visit(root)
    }

    fn children(&self, r: &BinRel, a: Elem, b: Elem) -> Vec<BinRel> {
        let mut out: Vec<BinRel> = Vec::new();
        for c in 0..r.n() {
            if !self.allowed.contains(a, c) || !self.allowed.contains(b, c) {
                continue;
            }
            let child = self
                .algebra
                .extend_closed(r, [(a, c), (b, c)], ClosureMode::Reflexive);
            if child.compose_converse().is_subset(self.allowed) && !out.contains(&child) {
                out.push(child);
            }
        }
        out
    }

    fn visit(&mut self, r: BinRel) -> Result<Option<BinRel>, DecideError> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(DecideError::NodeBudget(self.limit));
        }
        if self.dead.contains(&r) {
            return Ok(None);
        }
        let covered = r.compose_converse();
        let mut best: Option<Vec<BinRel>> = None;
        for &(a, b) in &self.targets {
            if covered.contains(a, b) {
                continue;
            }
            let kids = self.children(&r, a, b);
            if kids.is_empty() {
                self.dead.insert(r);
                return Ok(None);
            }
            if best.as_ref().is_none_or(|k| kids.len() < k.len()) {
                best = Some(kids);
            }
        }
        let Some(kids) = best else {
            return Ok(Some(r));
        };
        for child in kids {
            if let Some(found) = self.visit(child)? {
                return Ok(Some(found));
            }
        }
        self.dead.insert(r);
        Ok(None)
    }
}

/// Decides whether `theta` is representable, returning the canonical witness
/// when it is.
pub fn find_representation(
    algebra: &Algebra,
    theta: &BinRel,
    budget: Budget,
) -> Result<Option<RepWitness>, DecideError> {
    require_tolerance(algebra, theta)?;
    if theta.is_diagonal() {
        return Ok(Some(RepWitness { r: theta.clone() }));
    }
    let found = CoverSearch::new(algebra, theta, theta, budget.nodes).run()?;
    Ok(found.map(|r| RepWitness { r }))
}

/// For a set without operations: the reflexive `R` with `R ∘ R⁻` relating
/// everything except `a` and `b`.
fn set_separator(n: usize, a: Elem, b: Elem) -> Result<BinRel, RelError> {
    BinRel::from_pairs(
        n,
        (0..n).flat_map(|x| {
            (0..n).filter_map(move |y| (x == y || (x != a && x != b)).then_some((x, y)))
        }),
    )
}

/// Decides weak representability of `theta`.
pub fn find_weak_representation(
    algebra: &Algebra,
    theta: &BinRel,
    budget: Budget,
) -> Result<Option<WeakRepWitness>, DecideError> {
    require_tolerance(algebra, theta)?;
    let n = algebra.n();
    let mut separators = BTreeMap::new();
    for (a, b) in theta.complement().off_diagonal() {
        if let Some(r) = separators.get(&(b, a)) {
            let r: &BinRel = r;
            separators.insert((a, b), r.clone());
            continue;
        }
        let r = if algebra.has_operations() {
            let mut allowed = BinRel::full(n)?;
            allowed.remove(a, b);
            allowed.remove(b, a);
            match CoverSearch::new(algebra, theta, &allowed, budget.nodes).run()? {
                Some(r) => r,
                None => return Ok(None),
            }
        } else {
            set_separator(n, a, b)?
        };
        separators.insert((a, b), r);
    }
    Ok(Some(WeakRepWitness { separators }))
}

/// Represents `theta` as `R = Θ ∩ ≤`, where `≤` is the order of a join
/// semilattice operation satisfying the two absorption laws with `meet` and
/// compatible with the algebra. Every hypothesis is checked on all elements
/// and the result is verified before it is returned.
pub fn represent_via_order(
    algebra: &Algebra,
    join: &str,
    meet: &str,
    theta: &BinRel,
) -> Result<RepWitness, DecideError> {
    let n = algebra.n();
    for name in [join, meet] {
        let op = algebra
            .op(name)
            .ok_or_else(|| AlgebraError::UnknownOp(name.to_string()))?;
        if op.arity() != 2 {
            return Err(DecideError::Order(OrderViolation::Arity {
                op: name.to_string(),
                arity: op.arity(),
            }));
        }
    }
    let j = |x: Elem, y: Elem| algebra.eval_op(join, &[x, y]).expect("checked binary op");
    let m = |x: Elem, y: Elem| algebra.eval_op(meet, &[x, y]).expect("checked binary op");
    let fail = |v| Err(DecideError::Order(v));
    for x in 0..n {
        if j(x, x) != x {
            return fail(OrderViolation::JoinNotIdempotent { x });
        }
        for y in 0..n {
            if j(x, y) != j(y, x) {
                return fail(OrderViolation::JoinNotCommutative { x, y });
            }
            if m(x, j(x, y)) != x {
                return fail(OrderViolation::AbsorptionLeft { a: x, b: y });
            }
            if m(j(x, y), y) != y {
                return fail(OrderViolation::AbsorptionRight { a: x, b: y });
            }
            for z in 0..n {
                if j(j(x, y), z) != j(x, j(y, z)) {
                    return fail(OrderViolation::JoinNotAssociative { x, y, z });
                }
            }
        }
    }
    let leq = BinRel::from_pairs(
        n,
        (0..n).flat_map(|x| (0..n).filter_map(move |y| (j(x, y) == y).then_some((x, y)))),
    )?;
    if !algebra.is_compatible(&leq)? {
        return fail(OrderViolation::OrderNotCompatible);
    }
    require_tolerance(algebra, theta)?;
    let witness = RepWitness {
        r: theta.intersect(&leq)?,
    };
    witness
        .verify(algebra, theta)
        .map_err(DecideError::Unverified)?;
    Ok(witness)
}

/// Breadth-first enumeration of the reflexive compatible relations, starting
/// from the least one and adding one pair at a time. Relations are emitted in
/// discovery order; if more than `limit` exist the result holds the first
/// `limit` and is flagged as truncated.
pub fn enumerate_admissible(algebra: &Algebra, limit: usize) -> Enumeration {
    let n = algebra.n();
    let root = algebra
        .closure([], ClosureMode::Reflexive)
        .expect("empty seed is in range");
    let mut seen = HashSet::from([root.clone()]);
    let mut relations = vec![root.clone()];
    if limit == 0 {
        return Enumeration {
            relations: Vec::new(),
            truncated: true,
        };
    }
    let mut queue = VecDeque::from([root]);
    while let Some(r) = queue.pop_front() {
        for x in 0..n {
            for y in 0..n {
                if r.contains(x, y) {
                    continue;
                }
                let child = algebra.extend_closed(&r, [(x, y)], ClosureMode::Reflexive);
                if seen.insert(child.clone()) {
                    if relations.len() == limit {
                        return Enumeration {
                            relations,
                            truncated: true,
                        };
                    }
                    relations.push(child.clone());
                    queue.push_back(child);
                }
            }
        }
    }
    Enumeration {
        relations,
        truncated: false,
    }
}

/// All tolerances, sorted by size and then row bits. Every tolerance is the
/// join of the principal tolerances of its pairs, so saturating the diagonal
/// under joins with principal tolerances reaches all of them.
pub fn enumerate_tolerances(algebra: &Algebra, budget: Budget) -> Result<Vec<BinRel>, DecideError> {
    let n = algebra.n();
    let mut principals: Vec<BinRel> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = algebra.closure([(a, b)], ClosureMode::ReflexiveSymmetric)?;
            if !principals.contains(&p) {
                principals.push(p);
            }
        }
    }
    let root = BinRel::diagonal(n)?;
    let mut seen = HashSet::from([root.clone()]);
    let mut queue = VecDeque::from([root]);
    while let Some(t) = queue.pop_front() {
        for p in &principals {
            if p.is_subset(&t) {
                continue;
            }
            let joined = algebra.extend_closed(&t, p.off_diagonal(), ClosureMode::ReflexiveSymmetric);
            if seen.insert(joined.clone()) {
                if seen.len() > budget.relations {
                    return Err(DecideError::RelationBudget(budget.relations));
                }
                queue.push_back(joined);
            }
        }
    }
    let mut out: Vec<BinRel> = seen.into_iter().collect();
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Ok(out)
}

pub fn enumerate_congruences(algebra: &Algebra, budget: Budget) -> Result<Vec<BinRel>, DecideError> {
    let mut tolerances = enumerate_tolerances(algebra, budget)?;
    tolerances.retain(BinRel::is_transitive);
    Ok(tolerances)
}

/// The smallest tolerance containing both arguments.
pub fn tolerance_join(
    algebra: &Algebra,
    alpha: &BinRel,
    beta: &BinRel,
) -> Result<BinRel, DecideError> {
    require_tolerance(algebra, alpha)?;
    require_tolerance(algebra, beta)?;
    Ok(algebra.extend_closed(alpha, beta.off_diagonal(), ClosureMode::ReflexiveSymmetric))
}

/// Checks `α ∘ β = β ∘ α` for all pairs of congruences. A counterexample is
/// oriented so that its pair is the first (row-major) pair where the two
/// products differ.
pub fn check_permutability(
    algebra: &Algebra,
    budget: Budget,
) -> Result<PermutabilityReport, DecideError> {
    let congruences = enumerate_congruences(algebra, budget)?;
    for (i, x) in congruences.iter().enumerate() {
        for y in &congruences[i + 1..] {
            let xy = x.compose(y)?;
            let yx = y.compose(x)?;
            if xy == yx {
                continue;
            }
            let pair = xy
                .pairs()
                .chain(yx.pairs())
                .filter(|&(a, b)| xy.contains(a, b) != yx.contains(a, b))
                .min()
                .expect("products differ");
            let (alpha, beta) = if xy.contains(pair.0, pair.1) {
                (x.clone(), y.clone())
            } else {
                (y.clone(), x.clone())
            };
            return Ok(PermutabilityReport {
                permutable: false,
                counterexample: Some(NonPermuting { alpha, beta, pair }),
            });
        }
    }
    Ok(PermutabilityReport {
        permutable: true,
        counterexample: None,
    })
}
