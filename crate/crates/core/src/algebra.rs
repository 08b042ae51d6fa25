//! Finite algebras given by operation tables, compatible relations and their
//! closure, and the expansion of an algebra by unary operations with values in
//! a single tolerance block.

use std::collections::HashSet;

use thiserror::Error;

use crate::relcore::{BinRel, Elem, RelError, MAX_UNIVERSE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error("operation `{op}` needs {expected} table entries, found {found}")]
    TableLength {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("operation `{op}` maps table index {index} to {value}, outside the universe of size {n}")]
    EntryOutOfRange {
        op: String,
        index: usize,
        value: Elem,
        n: usize,
    },
    #[error("duplicate operation name `{0}`")]
    DuplicateName(String),
    #[error("invalid operation name `{0}`")]
    BadName(String),
    #[error("operation `{op}` has arity {arity}; table of size n^arity is too large")]
    TableTooLarge { op: String, arity: usize },
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("operation `{op}` takes {expected} arguments, got {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("relation is not a tolerance of the algebra")]
    NotTolerance,
}

/// A named `k`-ary operation stored as a flat row-major table: the entry for
/// `(a1, .., ak)` lives at `a1·n^(k-1) + .. + ak`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationTable {
    name: String,
    arity: usize,
    table: Vec<Elem>,
}

fn table_len(n: usize, arity: usize) -> Option<usize> {
    n.checked_pow(arity as u32).filter(|&len| len <= 1 << 24)
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl OperationTable {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        n: usize,
        table: Vec<Elem>,
    ) -> Result<Self, AlgebraError> {
        let name = name.into();
        if !valid_name(&name) {
            return Err(AlgebraError::BadName(name));
        }
        let expected = table_len(n, arity).ok_or_else(|| AlgebraError::TableTooLarge {
            op: name.clone(),
            arity,
        })?;
        if table.len() != expected {
            return Err(AlgebraError::TableLength {
                op: name,
                expected,
                found: table.len(),
            });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(AlgebraError::EntryOutOfRange {
                op: name,
                index,
                value,
                n,
            });
        }
        Ok(OperationTable { name, arity, table })
    }

    /// Tabulates `f` over all argument tuples.
    pub fn from_fn(
        name: impl Into<String>,
        arity: usize,
        n: usize,
        f: impl Fn(&[Elem]) -> Elem,
    ) -> Result<Self, AlgebraError> {
        let name = name.into();
        let len = table_len(n, arity).ok_or_else(|| AlgebraError::TableTooLarge {
            op: name.clone(),
            arity,
        })?;
        let mut args = vec![0; arity];
        let mut table = Vec::with_capacity(len);
        for mut idx in 0..len {
            for slot in args.iter_mut().rev() {
                *slot = idx % n;
                idx /= n;
            }
            table.push(f(&args));
        }
        Self::new(name, arity, n, table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    fn at(&self, index: usize) -> Elem {
        self.table[index]
    }
}

/// A finite algebra on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    n: usize,
    ops: Vec<OperationTable>,
}

/// Which kind of relation [`Algebra::closure`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureMode {
    Reflexive,
    ReflexiveSymmetric,
}

/// Tolerance / congruence / admissibility flags for a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationClass {
    pub tolerance: bool,
    pub congruence: bool,
    pub admissible: bool,
}

impl Algebra {
    /// An algebra without operations.
    pub fn new(n: usize) -> Result<Self, AlgebraError> {
        if n == 0 {
            return Err(RelError::EmptyUniverse.into());
        }
        if n > MAX_UNIVERSE {
            return Err(RelError::TooLarge(n).into());
        }
        Ok(Algebra { n, ops: Vec::new() })
    }

    pub fn with_op(mut self, op: OperationTable) -> Result<Self, AlgebraError> {
        self.push_op(op)?;
        Ok(self)
    }

    pub fn push_op(&mut self, op: OperationTable) -> Result<(), AlgebraError> {
        if self.ops.iter().any(|o| o.name == op.name) {
            return Err(AlgebraError::DuplicateName(op.name));
        }
        let expected = table_len(self.n, op.arity).unwrap_or(usize::MAX);
        if op.table.len() != expected {
            return Err(AlgebraError::TableLength {
                op: op.name,
                expected,
                found: op.table.len(),
            });
        }
        if let Some((index, &value)) = op.table.iter().enumerate().find(|(_, &v)| v >= self.n) {
            return Err(AlgebraError::EntryOutOfRange {
                op: op.name,
                index,
                value,
                n: self.n,
            });
        }
        self.ops.push(op);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[OperationTable] {
        &self.ops
    }

    pub fn op(&self, name: &str) -> Option<&OperationTable> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn has_operations(&self) -> bool {
        !self.ops.is_empty()
    }

    fn index_of(&self, args: impl IntoIterator<Item = Elem>) -> usize {
        args.into_iter().fold(0, |acc, a| acc * self.n + a)
    }

    pub fn eval_op(&self, op: &str, args: &[Elem]) -> Result<Elem, AlgebraError> {
        let table = self
            .op(op)
            .ok_or_else(|| AlgebraError::UnknownOp(op.to_string()))?;
        if args.len() != table.arity {
            return Err(AlgebraError::Arity {
                op: op.to_string(),
                expected: table.arity,
                found: args.len(),
            });
        }
        if let Some(&elem) = args.iter().find(|&&a| a >= self.n) {
            return Err(RelError::OutOfRange { elem, n: self.n }.into());
        }
        Ok(table.at(self.index_of(args.iter().copied())))
    }

    fn check_dim(&self, r: &BinRel) -> Result<(), AlgebraError> {
        if r.n() == self.n {
            Ok(())
        } else {
            Err(RelError::Dimension {
                left: self.n,
                right: r.n(),
            }
            .into())
        }
    }

    /// Whether every operation maps `R`-related argument tuples to `R`-related
    /// results. Enumerates all `|R|^k` tuples of pairs per `k`-ary operation.
    pub fn is_compatible(&self, r: &BinRel) -> Result<bool, AlgebraError> {
        self.check_dim(r)?;
        let pairs: Vec<(Elem, Elem)> = r.pairs().collect();
        for op in &self.ops {
            if op.arity == 0 {
                let c = op.at(0);
                if !r.contains(c, c) {
                    return Ok(false);
                }
                continue;
            }
            if pairs.is_empty() {
                continue;
            }
            // Cost grows as |R|^arity; fine for arity <= 3 at the sizes used here.
            let mut cursor = vec![0usize; op.arity];
            loop {
                let ia = self.index_of(cursor.iter().map(|&i| pairs[i].0));
                let ib = self.index_of(cursor.iter().map(|&i| pairs[i].1));
                if !r.contains(op.at(ia), op.at(ib)) {
                    return Ok(false);
                }
                if !advance(&mut cursor, pairs.len()) {
                    break;
                }
            }
        }
        Ok(true)
    }

    /// The smallest relation of the requested kind that contains `seed` and
    /// the diagonal and is preserved by every operation.
    pub fn closure<I>(&self, seed: I, mode: ClosureMode) -> Result<BinRel, AlgebraError>
    where
        I: IntoIterator<Item = (Elem, Elem)>,
    {
        let mut rel = BinRel::diagonal(self.n)?;
        for (a, b) in seed {
            rel.try_insert(a, b)?;
            if mode == ClosureMode::ReflexiveSymmetric {
                rel.insert(b, a);
            }
        }
        let queue = rel.pairs().collect();
        self.saturate(&mut rel, Vec::new(), queue, mode);
        Ok(rel)
    }

    /// Closure of `closed ∪ extra` where `closed` is already closed under the
    /// operations. Only tuples involving new pairs are re-examined.
    pub fn extend_closed<I>(&self, closed: &BinRel, extra: I, mode: ClosureMode) -> BinRel
    where
        I: IntoIterator<Item = (Elem, Elem)>,
    {
        let mut rel = closed.clone();
        let mut queue = Vec::new();
        for (a, b) in extra {
            if rel.insert(a, b) {
                queue.push((a, b));
            }
            if mode == ClosureMode::ReflexiveSymmetric && rel.insert(b, a) {
                queue.push((b, a));
            }
        }
        if queue.is_empty() {
            return rel;
        }
        let processed = closed.pairs().collect();
        self.saturate(&mut rel, processed, queue, mode);
        rel
    }

    /// Semi-naive fixpoint: each pair taken off the queue is combined with
    /// every already-processed pair in every argument position.
    fn saturate(
        &self,
        rel: &mut BinRel,
        mut processed: Vec<(Elem, Elem)>,
        mut queue: Vec<(Elem, Elem)>,
        mode: ClosureMode,
    ) {
        let symmetric = mode == ClosureMode::ReflexiveSymmetric;
        let push = |rel: &mut BinRel, queue: &mut Vec<(Elem, Elem)>, a: Elem, b: Elem| {
            if rel.insert(a, b) {
                queue.push((a, b));
            }
            if symmetric && rel.insert(b, a) {
                queue.push((b, a));
            }
        };
        while let Some(p) = queue.pop() {
            processed.push(p);
            for op in &self.ops {
                match op.arity {
                    0 => {}
                    1 => push(rel, &mut queue, op.at(p.0), op.at(p.1)),
                    2 => {
                        for &q in &processed {
                            let (x, y) = (
                                op.at(p.0 * self.n + q.0),
                                op.at(p.1 * self.n + q.1),
                            );
                            push(rel, &mut queue, x, y);
                            let (x, y) = (
                                op.at(q.0 * self.n + p.0),
                                op.at(q.1 * self.n + p.1),
                            );
                            push(rel, &mut queue, x, y);
                        }
                    }
                    k => {
                        let others = processed.len();
                        let mut cursor = vec![0usize; k - 1];
                        for slot in 0..k {
                            cursor.iter_mut().for_each(|c| *c = 0);
                            loop {
                                let pick = |side: fn(&(Elem, Elem)) -> Elem| {
                                    (0..k).fold(0, |acc, pos| {
                                        let e = match pos.cmp(&slot) {
                                            std::cmp::Ordering::Equal => side(&p),
                                            std::cmp::Ordering::Less => {
                                                side(&processed[cursor[pos]])
                                            }
                                            std::cmp::Ordering::Greater => {
                                                side(&processed[cursor[pos - 1]])
                                            }
                                        };
                                        acc * self.n + e
                                    })
                                };
                                let ia = pick(|q| q.0);
                                let ib = pick(|q| q.1);
                                push(rel, &mut queue, op.at(ia), op.at(ib));
                                if !advance(&mut cursor, others) {
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn classify_relation(&self, r: &BinRel) -> Result<RelationClass, AlgebraError> {
        let compatible = self.is_compatible(r)?;
        let admissible = compatible && r.is_reflexive();
        let tolerance = admissible && r.is_symmetric();
        let congruence = tolerance && r.is_transitive();
        Ok(RelationClass {
            tolerance,
            congruence,
            admissible,
        })
    }

    pub fn is_tolerance(&self, r: &BinRel) -> Result<bool, AlgebraError> {
        Ok(self.classify_relation(r)?.tolerance)
    }

    /// Adds, for every `Θ`-related `a, b` and every map `A → {a, b}`, a unary
    /// operation realizing that map. Identical tables are added once, in order
    /// of first appearance; new operations are named `u0, u1, ..` (skipping
    /// names already taken).
    pub fn expand(&self, theta: &BinRel) -> Result<Algebra, AlgebraError> {
        if !self.is_tolerance(theta)? {
            return Err(AlgebraError::NotTolerance);
        }
        let n = self.n;
        if n > 20 {
            return Err(AlgebraError::TableTooLarge {
                op: "expansion".into(),
                arity: 1,
            });
        }
        let mut seen: HashSet<Vec<Elem>> = self
            .ops
            .iter()
            .filter(|o| o.arity == 1)
            .map(|o| o.table.clone())
            .collect();
        let mut out = self.clone();
        let mut counter = 0usize;
        for (a, b) in theta.pairs().filter(|(a, b)| a <= b) {
            for mask in 0u32..(1 << n) {
                let table: Vec<Elem> = (0..n)
                    .map(|x| if mask >> x & 1 == 0 { a } else { b })
                    .collect();
                if !seen.insert(table.clone()) {
                    continue;
                }
                let name = loop {
                    let name = format!("u{counter}");
                    counter += 1;
                    if out.op(&name).is_none() {
                        break name;
                    }
                };
                out.ops.push(OperationTable {
                    name,
                    arity: 1,
                    table,
                });
            }
        }
        Ok(out)
    }
}

/// Odometer step over `cursor` with digits in `0..base`; false after the last
/// combination.
fn advance(cursor: &mut [usize], base: usize) -> bool {
    for digit in cursor.iter_mut().rev() {
        *digit += 1;
        if *digit < base {
            return true;
        }
        *digit = 0;
    }
    false
}
