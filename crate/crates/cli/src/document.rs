//! The `.alg` text format.
//!
//! ```text
//! # comment
//! algebra NAME
//! size N
//! op NAME ARITY
//! <N^ARITY integers, row-major, first argument most significant>
//! rel NAME
//! a b
//! ...
//! ```
//!
//! Table entries may be spread over any number of lines. Relation pairs are
//! one per line until the next keyword. The diagonal is always added to
//! relations, so it never needs to be listed.

use std::fmt::Write as _;

use thiserror::Error;
use tolrep::{Algebra, AlgebraError, BinRel, CorpusEntry, OperationTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DocError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub algebra: Algebra,
    pub relations: Vec<(String, BinRel)>,
}

impl Document {
    pub fn relation(&self, name: &str) -> Option<&BinRel> {
        self.relations.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }

    pub fn relation_names(&self) -> Vec<&str> {
        self.relations.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Adds the diagonal to every relation, matching what the parser stores.
    pub fn from_entry(entry: &CorpusEntry) -> Self {
        let diag = BinRel::diagonal(entry.algebra.n()).expect("algebra size is valid");
        Document {
            name: entry.name.clone(),
            algebra: entry.algebra.clone(),
            relations: entry
                .relations
                .iter()
                .map(|r| (r.name.clone(), r.rel.union(&diag).expect("same size")))
                .collect(),
        }
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || "_-(),".contains(c))
}

enum Section {
    Header,
    Table {
        name: String,
        arity: usize,
        expected: usize,
        entries: Vec<usize>,
        start: usize,
    },
    Rel {
        name: String,
        rel: BinRel,
    },
}

struct Builder {
    name: Option<String>,
    algebra: Option<Algebra>,
    relations: Vec<(String, BinRel)>,
}

impl Builder {
    fn n(&self) -> Option<usize> {
        self.algebra.as_ref().map(Algebra::n)
    }

    fn finish(&mut self, section: Section, line: usize) -> Result<(), DocError> {
        match section {
            Section::Header => Ok(()),
            Section::Table {
                name,
                arity,
                expected,
                entries,
                start,
            } => {
                if entries.len() != expected {
                    return Err(DocError {
                        line: start,
                        message: format!(
                            "operation `{name}` of arity {arity} needs {expected} table entries, found {}",
                            entries.len()
                        ),
                    });
                }
                let algebra = self.algebra.as_mut().expect("size precedes op");
                let n = algebra.n();
                let table = OperationTable::new(name, arity, n, entries)
                    .map_err(|e| DocError { line: start, message: e.to_string() })?;
                algebra.push_op(table).map_err(|e| DocError {
                    line: start,
                    message: e.to_string(),
                })
            }
            Section::Rel { name, rel } => {
                if self.relations.iter().any(|(n, _)| *n == name) {
                    return Err(DocError {
                        line,
                        message: format!("duplicate relation name `{name}`"),
                    });
                }
                self.relations.push((name, rel));
                Ok(())
            }
        }
    }
}

fn parse_int(tok: &str, line: usize) -> Result<usize, DocError> {
    tok.parse().map_err(|_| DocError {
        line,
        message: format!("expected a non-negative integer, found `{tok}`"),
    })
}

pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let mut b = Builder {
        name: None,
        algebra: None,
        relations: Vec::new(),
    };
    let mut section = Section::Header;
    let err = |line: usize, message: String| Err(DocError { line, message });
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let keyword = toks[0];
        if keyword.starts_with(|c: char| c.is_ascii_alphabetic()) {
            let prev = std::mem::replace(&mut section, Section::Header);
            b.finish(prev, line)?;
            match (keyword, &toks[1..]) {
                ("algebra", [name]) => {
                    if b.name.is_some() {
                        return err(line, "duplicate `algebra` line".into());
                    }
                    if !is_name(name) {
                        return err(line, format!("invalid algebra name `{name}`"));
                    }
                    b.name = Some(name.to_string());
                }
                ("size", [n]) => {
                    if b.algebra.is_some() {
                        return err(line, "duplicate `size` line".into());
                    }
                    let n = parse_int(n, line)?;
                    b.algebra = Some(
                        Algebra::new(n).map_err(|e| DocError { line, message: e.to_string() })?,
                    );
                }
                ("op", [name, arity]) => {
                    let Some(n) = b.n() else {
                        return err(line, "`op` before `size`".into());
                    };
                    let arity = parse_int(arity, line)?;
                    let expected = u32::try_from(arity)
                        .ok()
                        .and_then(|a| n.checked_pow(a))
                        .filter(|&e| e <= 1 << 24)
                        .ok_or_else(|| DocError {
                            line,
                            message: format!("operation `{name}`: table for arity {arity} is too large"),
                        })?;
                    section = Section::Table {
                        name: name.to_string(),
                        arity,
                        expected,
                        entries: Vec::with_capacity(expected),
                        start: line,
                    };
                }
                ("rel", [name]) => {
                    let Some(n) = b.n() else {
                        return err(line, "`rel` before `size`".into());
                    };
                    if !is_name(name) {
                        return err(line, format!("invalid relation name `{name}`"));
                    }
                    if b.relations.iter().any(|(r, _)| r == name) {
                        return err(line, format!("duplicate relation name `{name}`"));
                    }
                    section = Section::Rel {
                        name: name.to_string(),
                        rel: BinRel::diagonal(n).expect("valid size"),
                    };
                }
                ("algebra" | "size" | "op" | "rel", _) => {
                    return err(line, format!("wrong number of arguments for `{keyword}`"));
                }
                _ => return err(line, format!("unknown keyword `{keyword}`")),
            }
            continue;
        }
        match &mut section {
            Section::Table {
                name,
                expected,
                entries,
                ..
            } => {
                for tok in toks {
                    if entries.len() == *expected {
                        return err(
                            line,
                            format!("operation `{name}` has more than {expected} table entries"),
                        );
                    }
                    let v = parse_int(tok, line)?;
                    let n = b.n().expect("size precedes op");
                    if v >= n {
                        return err(line, format!("element {v} out of range for size {n}"));
                    }
                    entries.push(v);
                }
            }
            Section::Rel { rel, .. } => {
                let [x, y] = toks[..] else {
                    return err(line, "expected a pair `a b`".into());
                };
                let (x, y) = (parse_int(x, line)?, parse_int(y, line)?);
                rel.try_insert(x, y)
                    .map_err(|e| DocError { line, message: e.to_string() })?;
            }
            Section::Header => return err(line, format!("unexpected data `{content}`")),
        }
    }
    let last = text.lines().count();
    b.finish(section, last)?;
    let name = b.name.ok_or(DocError {
        line: 1,
        message: "missing `algebra NAME` line".into(),
    })?;
    let algebra = b.algebra.ok_or(DocError {
        line: 1,
        message: "missing `size N` line".into(),
    })?;
    Ok(Document {
        name,
        algebra,
        relations: b.relations,
    })
}

/// Writes the off-diagonal pairs of `rel` as a `rel` block.
pub fn write_relation(out: &mut String, name: &str, rel: &BinRel) {
    writeln!(out, "rel {name}").unwrap();
    for (a, b) in rel.off_diagonal() {
        writeln!(out, "{a} {b}").unwrap();
    }
}

pub fn print_document(doc: &Document) -> String {
    let mut out = String::new();
    let n = doc.algebra.n();
    writeln!(out, "algebra {}", doc.name).unwrap();
    writeln!(out, "size {n}").unwrap();
    for op in doc.algebra.ops() {
        writeln!(out, "op {} {}", op.name(), op.arity()).unwrap();
        let width = if op.arity() == 0 { 1 } else { n };
        for chunk in op.table().chunks(width) {
            let row: Vec<String> = chunk.iter().map(usize::to_string).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    for (name, rel) in &doc.relations {
        write_relation(&mut out, name, rel);
    }
    out
}

impl From<AlgebraError> for DocError {
    fn from(e: AlgebraError) -> Self {
        DocError {
            line: 0,
            message: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tolrep::corpus;

    #[test]
    fn minimal_document() {
        let d = parse_document("algebra t\nsize 2").unwrap();
        assert_eq!(d.name, "t");
        assert_eq!(d.algebra.n(), 2);
        assert!(!d.algebra.has_operations());
        assert!(d.relations.is_empty());
    }

    #[test]
    fn relations_get_the_diagonal() {
        let d = parse_document("algebra t\nsize 3\nrel r\n0 1 # c\n\nrel s\n").unwrap();
        assert_eq!(
            d.relation("r").unwrap(),
            &BinRel::reflexive_from_pairs(3, [(0, 1)]).unwrap()
        );
        assert!(d.relation("s").unwrap().is_diagonal());
    }

    #[test]
    fn short_table_names_op_and_length() {
        let e = parse_document("algebra t\nsize 2\nop f 2\n0 1 1\nrel r\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("`f`") && e.message.contains("needs 4"), "{e}");
        let e = parse_document("algebra t\nsize 2\nop f 2\n0 1 1").unwrap_err();
        assert!(e.message.contains("needs 4"), "{e}");
    }

    #[test]
    fn diagnostics() {
        let cases = [
            ("algebra t\nsize 2\nbogus 1\n", 3, "unknown keyword"),
            ("algebra t\nsize 2\nop f 1\n0 2\n", 4, "out of range"),
            ("algebra t\nsize 2\nrel r\n0 5\n", 4, "out of range"),
            ("algebra t\nsize 2\nrel r\nrel r\n", 4, "duplicate relation"),
            ("algebra t\nsize 2\nop f 1\n0 0\nop f 1\n1 1\n", 5, "duplicate operation"),
            ("algebra t\nop f 1\n", 2, "before `size`"),
            ("algebra t\nsize 2\nop f 1\n0 0 0\n", 4, "more than 2"),
            ("algebra t\nsize 2\n0 1\n", 3, "unexpected data"),
            ("algebra t\nsize 0\n", 2, "positive"),
            ("algebra t\nsize x\n", 2, "integer"),
            ("algebra t\nsize 2\nrel r\n0 1 1\n", 4, "pair"),
            ("size 2\n", 1, "missing `algebra"),
            ("algebra t\nsize 2 3\n", 2, "wrong number"),
        ];
        for (src, line, needle) in cases {
            let e = parse_document(src).unwrap_err();
            assert_eq!(e.line, line, "{src:?}: {e}");
            assert!(e.message.contains(needle), "{src:?}: {e}");
        }
    }

    #[test]
    fn corpus_entries_round_trip() {
        for name in ["five_set", "s7_semilattice", "l7_majority", "m3", "n5", "chain(4)", "theta_ab(4,1,3)"] {
            let doc = Document::from_entry(&corpus::get(name).unwrap());
            assert_eq!(parse_document(&print_document(&doc)).unwrap(), doc, "{name}");
        }
    }
}
