use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use tolrep::{corpus, Algebra, BinRel, OperationTable};
use tolrep_cli::{
    parse_document, print_document, run, Document, Report, EXIT_BUDGET, EXIT_FAILS, EXIT_HOLDS,
    EXIT_USAGE,
};

fn data(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect()
}

fn tolrep(args: &[&str]) -> Report {
    run(std::iter::once("tolrep").chain(args.iter().copied()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn shipped_data_matches_corpus() {
    for name in ["five_set", "s7_semilattice", "l7_majority", "m3", "n5", "expand_five"] {
        let text = fs::read_to_string(data(&format!("{name}.alg"))).unwrap();
        let parsed = parse_document(&text).unwrap();
        let expected = Document::from_entry(&corpus::get(name).unwrap());
        assert_eq!(parsed, expected, "{name}");
    }
}

#[test]
fn corpus_command_writes_parseable_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.alg");
    let r = tolrep(&["corpus", "chain(4)", "-o", path_str(&out)]);
    assert_eq!(r.code, EXIT_HOLDS, "{}", r.text);
    let doc = parse_document(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc, Document::from_entry(&corpus::get("chain(4)").unwrap()));

    let r = tolrep(&["corpus", "no_such_thing"]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn decisions_on_shipped_files() {
    let five = data("five_set.alg");
    let r = tolrep(&["represent", path_str(&five), "--rel", "theta"]);
    assert_eq!(r.code, EXIT_FAILS, "{}", r.text);
    assert!(r.text.contains("not representable"));

    let r = tolrep(&["weak-represent", path_str(&five), "--rel", "theta", "--witness"]);
    assert_eq!(r.code, EXIT_HOLDS, "{}", r.text);
    assert_eq!(r.text.matches("rel sep_").count(), 8);

    let plus = data("expand_five.alg");
    let r = tolrep(&["weak-represent", path_str(&plus), "--rel", "theta"]);
    assert_eq!(r.code, EXIT_FAILS, "{}", r.text);
}

#[test]
fn weak_witness_blocks_parse_back() {
    let five = data("five_set.alg");
    let r = tolrep(&["weak-represent", path_str(&five), "--rel", "theta", "--witness"]);
    let base = fs::read_to_string(&five).unwrap();
    let blocks = r.text.find("rel ").map(|i| &r.text[i..]).unwrap();
    let doc = parse_document(&format!("{base}{blocks}")).unwrap();
    let theta = doc.relation("theta").unwrap();
    let mut meet = BinRel::full(5).unwrap();
    for name in doc.relation_names().into_iter().filter(|n| n.starts_with("sep_")) {
        let s = doc.relation(name).unwrap();
        assert!(theta.is_subset(&s.compose(&s.converse()).unwrap()), "{name}");
        meet = meet.intersect(&s.compose(&s.converse()).unwrap()).unwrap();
    }
    assert_eq!(&meet, theta);
}

#[test]
fn printed_witnesses_reverify_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("n5.alg");
    let mut text = fs::read_to_string(data("n5.alg")).unwrap();
    let r = tolrep(&["enumerate", path_str(&data("n5.alg")), "--kind", "tolerances"]);
    assert_eq!(r.code, EXIT_HOLDS);
    assert!(r.text.starts_with("5 tolerances"));
    text.push_str(r.text.split_once('\n').unwrap().1);
    fs::write(&file, &text).unwrap();

    for i in 0..5 {
        let t = format!("t{i}");
        let r = tolrep(&["represent", path_str(&file), "--rel", &t, "--witness"]);
        assert_eq!(r.code, EXIT_HOLDS, "{}", r.text);
        let block = &r.text[r.text.find("rel witness").unwrap()..];
        text.push_str(&block.replacen("rel witness", &format!("rel w{i}"), 1));
    }
    fs::write(&file, &text).unwrap();
    for i in 0..5 {
        let (w, t) = (format!("w{i}"), format!("t{i}"));
        let r = tolrep(&["check", path_str(&file), "--rel", &w, "--represents", &t]);
        assert_eq!(r.code, EXIT_HOLDS, "{w}: {}", r.text);
        let r = tolrep(&["represent", path_str(&file), "--rel", &t, "--join", "join", "--meet", "meet"]);
        assert_eq!(r.code, EXIT_HOLDS, "{t}: {}", r.text);
    }
    let r = tolrep(&["check", path_str(&file), "--rel", "w4", "--represents", "t0"]);
    assert_eq!(r.code, EXIT_FAILS, "{}", r.text);
}

#[test]
fn expand_writes_an_algebra_with_unary_operations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plus.alg");
    let r = tolrep(&["expand", path_str(&data("five_set.alg")), "--rel", "theta", "-o", path_str(&out)]);
    assert_eq!(r.code, EXIT_HOLDS, "{}", r.text);
    let doc = parse_document(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.algebra.ops().len(), 185);
    assert!(doc.algebra.ops().iter().all(|op| op.arity() == 1));
    let r = tolrep(&["weak-represent", path_str(&out), "--rel", "theta"]);
    assert_eq!(r.code, EXIT_FAILS, "{}", r.text);
}

#[test]
fn exit_codes() {
    let s7 = data("s7_semilattice.alg");
    let r = tolrep(&["--node-budget", "1", "represent", path_str(&s7), "--rel", "theta"]);
    assert_eq!(r.code, EXIT_BUDGET, "{}", r.text);

    let r = tolrep(&["--rel-budget", "1", "enumerate", path_str(&data("n5.alg")), "--kind", "tolerances"]);
    assert_eq!(r.code, EXIT_BUDGET, "{}", r.text);

    let r = tolrep(&["represent", path_str(&s7), "--rel", "missing"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.text.contains("theta"), "{}", r.text);

    let r = tolrep(&["represent", "/nonexistent/file.alg", "--rel", "theta"]);
    assert_eq!(r.code, EXIT_USAGE);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.alg");
    fs::write(&bad, "algebra bad\nsize 2\nop f 2\n0 1 1\n").unwrap();
    let r = tolrep(&["check", path_str(&bad), "--rel", "r"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.text.contains("line 3") && r.text.contains("`f`"), "{}", r.text);

    assert_eq!(tolrep(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(tolrep(&["--help"]).code, EXIT_HOLDS);

    let r = tolrep(&["represent", path_str(&data("m3.alg")), "--rel", "leq"]);
    assert_eq!(r.code, EXIT_USAGE, "non-tolerance input: {}", r.text);
}

#[test]
fn terms() {
    assert_eq!(tolrep(&["term-regular", "--term", "x o y"]).code, EXIT_HOLDS);
    assert_eq!(tolrep(&["term-regular", "--term", "x o x"]).code, EXIT_FAILS);
    assert_eq!(tolrep(&["term-regular", "--term", "x o (y"]).code, EXIT_USAGE);

    let s7 = data("s7_semilattice.alg");
    let r = tolrep(&["term-eval", path_str(&s7), "--term", "x o x", "--bind", "x=theta", "--subset-of", "x"]);
    assert_eq!(r.code, EXIT_FAILS, "theta is not transitive: {}", r.text);
    let r = tolrep(&["term-eval", path_str(&s7), "--term", "x & x", "--bind", "x=theta", "--subset-of", "x"]);
    assert_eq!(r.code, EXIT_HOLDS, "{}", r.text);
    let r = tolrep(&["term-eval", path_str(&s7), "--term", "x o y", "--bind", "x=theta"]);
    assert_eq!(r.code, EXIT_USAGE, "unbound variable: {}", r.text);
}

#[test]
fn json_reports_parse() {
    let five = data("five_set.alg");
    let m3 = data("m3.alg");
    let runs: [&[&str]; 5] = [
        &["--json", "represent", path_str(&five), "--rel", "theta"],
        &["--json", "weak-represent", path_str(&five), "--rel", "theta", "--witness"],
        &["--json", "check", path_str(&five), "--rel", "theta"],
        &["--json", "enumerate", path_str(&m3), "--kind", "tolerances"],
        &["--json", "permutable", path_str(&m3)],
    ];
    for args in runs {
        let r = tolrep(args);
        let v: serde_json::Value = serde_json::from_str(&r.text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", r.text));
        assert!(v.is_object(), "{args:?}");
    }
    let r = tolrep(&["--json", "represent", "/nonexistent.alg", "--rel", "theta"]);
    let v: serde_json::Value = serde_json::from_str(&r.text).unwrap();
    assert_eq!(v["exit"], EXIT_USAGE);
    let r = tolrep(&["--json", "enumerate", path_str(&data("m3.alg")), "--kind", "tolerances"]);
    let v: serde_json::Value = serde_json::from_str(&r.text).unwrap();
    assert_eq!(v["count"], 2);
}

#[test]
fn binary_routes_output_and_status() {
    let exe = env!("CARGO_BIN_EXE_tolrep");
    let out = Command::new(exe).arg("verify-paper").output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 12, "{stdout}");
    assert!(stdout.contains("12 of 12 checks passed"));

    let out = Command::new(exe).args(["check", "/nonexistent.alg", "--rel", "r"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

fn arb_document() -> impl Strategy<Value = Document> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let ops = prop::collection::vec(
                (0usize..=2).prop_flat_map(move |k| {
                    prop::collection::vec(0..n, n.pow(k as u32)).prop_map(move |t| (k, t))
                }),
                0..3,
            );
            let rels = prop::collection::vec(prop::collection::vec((0..n, 0..n), 0..6), 0..3);
            (Just(n), ops, rels)
        })
        .prop_map(|(n, ops, rels)| {
            let mut algebra = Algebra::new(n).unwrap();
            for (i, (k, t)) in ops.into_iter().enumerate() {
                algebra.push_op(OperationTable::new(format!("f{i}"), k, n, t).unwrap()).unwrap();
            }
            let relations = rels
                .into_iter()
                .enumerate()
                .map(|(i, ps)| (format!("r{i}"), BinRel::reflexive_from_pairs(n, ps).unwrap()))
                .collect();
            Document { name: "arb".into(), algebra, relations }
        })
}

proptest! {
    #[test]
    fn print_parse_round_trip(doc in arb_document()) {
        let text = print_document(&doc);
        prop_assert_eq!(parse_document(&text).unwrap(), doc);
    }
}
