//! Command-line front end: `.alg` documents in, reports out.
//!
//! Exit codes: 0 when the property holds (or the command simply succeeded),
//! 1 when it fails, 2 for usage and format errors, 3 when a budget runs out.

pub mod document;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tolrep::decide::{self, verify_representation, DecideError};
use tolrep::relterms::{self, parse_term};
use tolrep::{corpus, Algebra, BinRel, Budget};

pub use document::{parse_document, print_document, DocError, Document};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tolrep", version, about = "Representability of tolerances in finite algebras")]
pub struct Cli {
    /// Node budget for backtracking searches.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_NODES)]
    pub node_budget: u64,
    /// Relation budget for enumerations.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_RELATIONS)]
    pub rel_budget: usize,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Tolerances,
    Congruences,
    Admissible,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a relation; with --represents, check it as a witness.
    Check {
        file: PathBuf,
        #[arg(long)]
        rel: String,
        /// Verify that REL is admissible and REL o REL^- equals this tolerance.
        #[arg(long)]
        represents: Option<String>,
    },
    /// Decide whether a tolerance equals R o R^- for an admissible R.
    Represent {
        file: PathBuf,
        #[arg(long)]
        rel: String,
        #[arg(long)]
        witness: bool,
        /// Use R = theta meet order, for the order of this join operation.
        #[arg(long, requires = "meet")]
        join: Option<String>,
        #[arg(long, requires = "join")]
        meet: Option<String>,
    },
    /// Decide whether a tolerance is an intersection of relations R o R^-.
    WeakRepresent {
        file: PathBuf,
        #[arg(long)]
        rel: String,
        #[arg(long)]
        witness: bool,
    },
    /// Add every unary map into a single block of the tolerance.
    Expand {
        file: PathBuf,
        #[arg(long)]
        rel: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List tolerances, congruences, or admissible relations.
    Enumerate {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Maximum number of relations reported.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Check whether all congruences permute.
    Permutable { file: PathBuf },
    /// Evaluate a relation term.
    TermEval {
        file: PathBuf,
        #[arg(long)]
        term: String,
        /// VAR=REL; may be repeated.
        #[arg(long = "bind", value_name = "VAR=REL")]
        binds: Vec<String>,
        /// Replace every bound relation T by T o T first.
        #[arg(long)]
        square: bool,
        /// Also evaluate this term and test inclusion in it.
        #[arg(long)]
        subset_of: Option<String>,
    },
    /// Build the term graph and test regularity.
    TermRegular {
        #[arg(long)]
        term: String,
    },
    /// Print or write a built-in algebra.
    Corpus {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every built-in reconstruction and cross-check.
    VerifyPaper,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub code: i32,
    pub text: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        Failure {
            code: if e.is_resource() { EXIT_BUDGET } else { EXIT_USAGE },
            message: e.to_string(),
        }
    }
}

macro_rules! from_usage {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::usage(e.to_string())
            }
        }
    )*};
}

from_usage!(
    DocError,
    tolrep::AlgebraError,
    tolrep::RelError,
    tolrep::TermError,
    tolrep::CorpusError
);

/// Text and JSON renderings of one outcome.
struct Output {
    code: i32,
    text: String,
    json: Value,
}

fn pairs_json(r: &BinRel) -> Value {
    Value::Array(r.off_diagonal().map(|(a, b)| json!([a, b])).collect())
}

fn rel_block(name: &str, r: &BinRel) -> String {
    let mut s = String::new();
    document::write_relation(&mut s, name, r);
    s
}

fn load(path: &Path) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn lookup<'a>(doc: &'a Document, name: &str) -> Result<&'a BinRel, Failure> {
    doc.relation(name).ok_or_else(|| {
        Failure::usage(format!(
            "no relation `{name}` (available: {})",
            doc.relation_names().join(", ")
        ))
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn run<I, S>(argv: I) -> Report
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS };
            return Report {
                code,
                text: e.render().to_string(),
            };
        }
    };
    let json_mode = cli.json;
    match execute(&cli) {
        Ok(out) => Report {
            code: out.code,
            text: if json_mode {
                serde_json::to_string_pretty(&out.json).expect("json value") + "\n"
            } else {
                out.text
            },
        },
        Err(f) => Report {
            code: f.code,
            text: if json_mode {
                serde_json::to_string_pretty(&json!({"error": f.message, "exit": f.code}))
                    .expect("json value")
                    + "\n"
            } else {
                format!("error: {}\n", f.message)
            },
        },
    }
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let budget = Budget {
        nodes: cli.node_budget,
        relations: cli.rel_budget,
    };
    match &cli.command {
        Command::Check {
            file,
            rel,
            represents,
        } => check(&load(file)?, rel, represents.as_deref()),
        Command::Represent {
            file,
            rel,
            witness,
            join,
            meet,
        } => {
            let doc = load(file)?;
            let theta = lookup(&doc, rel)?;
            let order = join.as_deref().zip(meet.as_deref());
            represent(&doc.algebra, rel, theta, *witness, order, budget)
        }
        Command::WeakRepresent { file, rel, witness } => {
            let doc = load(file)?;
            weak_represent(&doc.algebra, rel, lookup(&doc, rel)?, *witness, budget)
        }
        Command::Expand { file, rel, output } => expand(&load(file)?, rel, output),
        Command::Enumerate { file, kind, limit } => {
            enumerate(&load(file)?.algebra, *kind, limit.unwrap_or(budget.relations), budget)
        }
        Command::Permutable { file } => permutable(&load(file)?.algebra, budget),
        Command::TermEval {
            file,
            term,
            binds,
            square,
            subset_of,
        } => term_eval(&load(file)?, term, binds, *square, subset_of.as_deref()),
        Command::TermRegular { term } => term_regular(term),
        Command::Corpus { name, output } => corpus_cmd(name, output.as_deref()),
        Command::VerifyPaper => Ok(verify_paper(budget)),
    }
}

fn check(doc: &Document, name: &str, represents: Option<&str>) -> Result<Output, Failure> {
    let r = lookup(doc, name)?;
    let shape = r.classify_shape();
    let class = doc.algebra.classify_relation(r)?;
    let mut text = format!(
        "relation {name}: {} pairs\nreflexive: {}\nsymmetric: {}\ntransitive: {}\ncompatible: {}\nadmissible: {}\ntolerance: {}\ncongruence: {}\n",
        r.len(),
        shape.reflexive,
        shape.symmetric,
        shape.transitive,
        doc.algebra.is_compatible(r)?,
        class.admissible,
        class.tolerance,
        class.congruence,
    );
    let mut json = json!({
        "relation": name,
        "size": r.len(),
        "reflexive": shape.reflexive,
        "symmetric": shape.symmetric,
        "transitive": shape.transitive,
        "admissible": class.admissible,
        "tolerance": class.tolerance,
        "congruence": class.congruence,
    });
    let mut code = EXIT_HOLDS;
    if let Some(theta_name) = represents {
        let theta = lookup(doc, theta_name)?;
        match verify_representation(&doc.algebra, theta, r) {
            Ok(()) => {
                writeln!(text, "witness: {name} o {name}^- = {theta_name} verified").unwrap();
                json["witness_verified"] = json!(true);
            }
            Err(defect) => {
                writeln!(text, "witness: rejected ({defect})").unwrap();
                json["witness_verified"] = json!(false);
                json["defect"] = json!(defect.to_string());
                code = EXIT_FAILS;
            }
        }
    }
    Ok(Output { code, text, json })
}

fn represent(
    algebra: &Algebra,
    name: &str,
    theta: &BinRel,
    witness: bool,
    order: Option<(&str, &str)>,
    budget: Budget,
) -> Result<Output, Failure> {
    let found = match order {
        Some((join, meet)) => Some(decide::represent_via_order(algebra, join, meet, theta)?),
        None => decide::find_representation(algebra, theta, budget)?,
    };
    Ok(match found {
        Some(w) => {
            let mut text = format!("{name}: representable\n");
            if witness {
                text += &rel_block("witness", &w.r);
            }
            Output {
                code: EXIT_HOLDS,
                text,
                json: json!({"relation": name, "representable": true, "witness": pairs_json(&w.r)}),
            }
        }
        None => Output {
            code: EXIT_FAILS,
            text: format!("{name}: not representable\n"),
            json: json!({"relation": name, "representable": false}),
        },
    })
}

fn weak_represent(
    algebra: &Algebra,
    name: &str,
    theta: &BinRel,
    witness: bool,
    budget: Budget,
) -> Result<Output, Failure> {
    Ok(match decide::find_weak_representation(algebra, theta, budget)? {
        Some(w) => {
            let mut text = format!(
                "{name}: weakly representable ({} separators)\n",
                w.separators.len()
            );
            let mut seps = Vec::new();
            for (&(a, b), r) in &w.separators {
                if witness {
                    text += &rel_block(&format!("sep_{a}_{b}"), r);
                }
                seps.push(json!({"pair": [a, b], "relation": pairs_json(r)}));
            }
            Output {
                code: EXIT_HOLDS,
                text,
                json: json!({"relation": name, "weakly_representable": true, "separators": seps}),
            }
        }
        None => Output {
            code: EXIT_FAILS,
            text: format!("{name}: not weakly representable\n"),
            json: json!({"relation": name, "weakly_representable": false}),
        },
    })
}

fn expand(doc: &Document, name: &str, output: &Path) -> Result<Output, Failure> {
    let theta = lookup(doc, name)?;
    let plus = doc.algebra.expand(theta)?;
    let added = plus.ops().len() - doc.algebra.ops().len();
    let out = Document {
        name: format!("{}_plus", doc.name),
        algebra: plus,
        relations: doc.relations.clone(),
    };
    write_file(output, &print_document(&out))?;
    Ok(Output {
        code: EXIT_HOLDS,
        text: format!("added {added} unary operations; wrote {}\n", output.display()),
        json: json!({"added": added, "output": output.display().to_string()}),
    })
}

fn enumerate(algebra: &Algebra, kind: Kind, limit: usize, budget: Budget) -> Result<Output, Failure> {
    let (label, prefix, mut rels, mut truncated) = match kind {
        Kind::Admissible => {
            let e = decide::enumerate_admissible(algebra, limit);
            ("admissible relations", "r", e.relations, e.truncated)
        }
        Kind::Tolerances => ("tolerances", "t", decide::enumerate_tolerances(algebra, budget)?, false),
        Kind::Congruences => ("congruences", "c", decide::enumerate_congruences(algebra, budget)?, false),
    };
    if rels.len() > limit {
        rels.truncate(limit);
        truncated = true;
    }
    let mut text = format!(
        "{} {label}{}\n",
        rels.len(),
        if truncated { " (truncated)" } else { "" }
    );
    for (i, r) in rels.iter().enumerate() {
        text += &rel_block(&format!("{prefix}{i}"), r);
    }
    Ok(Output {
        code: EXIT_HOLDS,
        text,
        json: json!({
            "kind": label,
            "count": rels.len(),
            "truncated": truncated,
            "relations": rels.iter().map(pairs_json).collect::<Vec<_>>(),
        }),
    })
}

fn permutable(algebra: &Algebra, budget: Budget) -> Result<Output, Failure> {
    let report = decide::check_permutability(algebra, budget)?;
    Ok(match report.counterexample {
        None => Output {
            code: EXIT_HOLDS,
            text: "congruences permute\n".into(),
            json: json!({"permutable": true}),
        },
        Some(ce) => {
            let (a, b) = ce.pair;
            let text = format!(
                "congruences do not permute: ({a},{b}) in alpha o beta but not in beta o alpha\n{}{}",
                rel_block("alpha", &ce.alpha),
                rel_block("beta", &ce.beta)
            );
            Output {
                code: EXIT_FAILS,
                text,
                json: json!({
                    "permutable": false,
                    "alpha": pairs_json(&ce.alpha),
                    "beta": pairs_json(&ce.beta),
                    "pair": [a, b],
                }),
            }
        }
    })
}

fn term_eval(
    doc: &Document,
    term: &str,
    binds: &[String],
    square: bool,
    subset_of: Option<&str>,
) -> Result<Output, Failure> {
    let p = parse_term(term)?;
    let mut env = BTreeMap::new();
    for bind in binds {
        let (var, rel) = bind
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("bad binding `{bind}`, expected VAR=REL")))?;
        env.insert(var.trim().to_string(), lookup(doc, rel.trim())?.clone());
    }
    let q = subset_of.map(parse_term).transpose()?;
    // --square with --subset-of: the identity check on squared tolerances.
    let holds = match (&q, square) {
        (Some(q), true) => Some(relterms::check_identity_iv(&doc.algebra, &p, q, &env)?),
        _ => None,
    };
    let env = if square { relterms::square_env(&env)? } else { env };
    let value = p.eval(&env)?;
    let mut text = format!("{p}: {} pairs\n", value.len());
    text += &rel_block("value", &value);
    let mut json = json!({"term": p.to_string(), "squared": square, "value": pairs_json(&value)});
    let mut code = EXIT_HOLDS;
    if let Some(q) = q {
        let holds = match holds {
            Some(h) => h,
            None => value.is_subset(&q.eval(&env)?),
        };
        writeln!(
            text,
            "{p} {} {q}",
            if holds { "is contained in" } else { "is not contained in" }
        )
        .unwrap();
        json["subset_of"] = json!(q.to_string());
        json["holds"] = json!(holds);
        if !holds {
            code = EXIT_FAILS;
        }
    }
    Ok(Output { code, text, json })
}

fn term_regular(term: &str) -> Result<Output, Failure> {
    let t = parse_term(term)?;
    let g = t.graph();
    let regular = g.is_regular();
    let mut text = format!(
        "{t}: {} vertices, {} edges, source {}, sink {}\n",
        g.vertices,
        g.edges.len(),
        g.source,
        g.sink
    );
    for (u, v, label) in &g.edges {
        writeln!(text, "  {u} -- {v} [{label}]").unwrap();
    }
    writeln!(text, "{}", if regular { "regular" } else { "not regular" }).unwrap();
    Ok(Output {
        code: if regular { EXIT_HOLDS } else { EXIT_FAILS },
        text,
        json: json!({
            "term": t.to_string(),
            "vertices": g.vertices,
            "edges": g.edges.iter().map(|(u, v, l)| json!([u, v, l])).collect::<Vec<_>>(),
            "regular": regular,
        }),
    })
}

fn corpus_cmd(name: &str, output: Option<&Path>) -> Result<Output, Failure> {
    let entry = corpus::get(name)?;
    let doc = Document::from_entry(&entry);
    let mut body = String::new();
    for line in entry.notes.lines() {
        writeln!(body, "# {line}").unwrap();
    }
    body += &print_document(&doc);
    let json = json!({"name": entry.name, "size": doc.algebra.n(), "document": body});
    match output {
        Some(path) => {
            write_file(path, &body)?;
            Ok(Output {
                code: EXIT_HOLDS,
                text: format!("wrote {}\n", path.display()),
                json,
            })
        }
        None => Ok(Output {
            code: EXIT_HOLDS,
            text: body,
            json,
        }),
    }
}

fn verify_paper(budget: Budget) -> Output {
    let outcomes = verify::run_all(budget);
    let mut text = String::new();
    let mut rows = Vec::new();
    for o in &outcomes {
        writeln!(
            text,
            "[{}] {:>2}. {} ({:.2?}): {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.elapsed,
            o.detail
        )
        .unwrap();
        rows.push(json!({
            "id": o.id,
            "title": o.title,
            "passed": o.passed,
            "detail": o.detail,
            "seconds": o.elapsed.as_secs_f64(),
        }));
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(text, "{} of {} checks passed", outcomes.len() - failed, outcomes.len()).unwrap();
    Output {
        code: if failed == 0 { EXIT_HOLDS } else { EXIT_FAILS },
        text,
        json: json!({"checks": rows, "failed": failed}),
    }
}
