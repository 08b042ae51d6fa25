//! The `verify-paper` suite: every worked example reconstructed and checked,
//! with brute-force cross-checks that share no code with the searches.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tolrep::decide::{
    check_permutability, enumerate_congruences, enumerate_tolerances, find_representation,
    find_weak_representation, represent_via_order, tolerance_join, verify_representation,
};
use tolrep::relterms::parse_term;
use tolrep::{corpus, Algebra, BinRel, Budget, ClosureMode, Elem, OperationTable, RelTerm};

/// Seed for the random algebras of criteria 8 to 10.
pub const ALGEBRA_SEED: u64 = 0x746f_6c72_6570_0008;
/// Seed for the random congruence pairs of criterion 9.
pub const PAIR_SEED: u64 = 0x746f_6c72_6570_0009;
/// Seed for the random terms of criterion 11.
pub const TERM_SEED: u64 = 0x746f_6c72_6570_0011;

pub const RANDOM_ALGEBRAS: usize = 200;
pub const RANDOM_PAIRS: usize = 100;
pub const RANDOM_TERMS: usize = 500;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type Check = fn(Budget) -> Result<String, String>;

pub fn criteria() -> Vec<(u8, &'static str, Check)> {
    vec![
        (1, "five_set: theta not representable, exhaustive oracle agrees", c01_five_set),
        (2, "five_set: theta weakly representable by 8 separators", c02_five_set_weak),
        (3, "s7_semilattice: theta is a tolerance and not representable", c03_s7),
        (4, "l7_majority: majority laws, closure, theta not representable", c04_l7),
        (5, "lattices: every tolerance represented by theta meet order", c05_lattices),
        (6, "expand_five: every nontrivial closure contains theta", c06_expansion),
        (7, "expand_five: theta not weakly representable", c07_expanded_weak),
        (8, "random algebras: tolerances all congruences implies permutable", c08_permutability),
        (9, "random congruences: tolerance join inside beta o alpha", c09_join_containment),
        (10, "congruences are representable by themselves", c10_congruences),
        (11, "relation terms: regularity, evaluation, round trip", c11_terms),
        (12, "sets up to 4 elements: search agrees with subset oracle", c12_sets),
    ]
}

pub fn run_one(id: u8, title: &'static str, check: Check, budget: Budget) -> Outcome {
    let start = Instant::now();
    let result = check(budget);
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed,
    }
}

pub fn run_all(budget: Budget) -> Vec<Outcome> {
    criteria()
        .into_iter()
        .map(|(id, title, check)| run_one(id, title, check, budget))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn entry_theta(name: &str) -> (Algebra, BinRel) {
    let e = corpus::get(name).expect("corpus entry");
    let theta = e.relation("theta").expect("theta").clone();
    (e.algebra, theta)
}

// ---------------------------------------------------------------------------
// Oracles. These use only table lookups and nested loops.

fn oracle_compose(r: &BinRel, s: &BinRel) -> BinRel {
    let n = r.n();
    let mut out = BinRel::empty(n).expect("n > 0");
    for a in 0..n {
        for b in 0..n {
            if (0..n).any(|c| r.contains(a, c) && s.contains(c, b)) {
                out.insert(a, b);
            }
        }
    }
    out
}

fn oracle_converse(r: &BinRel) -> BinRel {
    BinRel::from_pairs(r.n(), r.pairs().map(|(a, b)| (b, a))).expect("same size")
}

fn oracle_intersect(r: &BinRel, s: &BinRel) -> BinRel {
    BinRel::from_pairs(r.n(), r.pairs().filter(|&(a, b)| s.contains(a, b))).expect("same size")
}

fn oracle_compatible(algebra: &Algebra, r: &BinRel) -> bool {
    let pairs: Vec<(Elem, Elem)> = r.pairs().collect();
    algebra.ops().iter().all(|op| {
        let k = op.arity();
        let total = pairs.len().pow(k as u32);
        (0..total).all(|mut code| {
            let mut xs = vec![0; k];
            let mut ys = vec![0; k];
            for i in (0..k).rev() {
                let (x, y) = pairs[code % pairs.len()];
                xs[i] = x;
                ys[i] = y;
                code /= pairs.len();
            }
            let fx = algebra.eval_op(op.name(), &xs).expect("valid tuple");
            let fy = algebra.eval_op(op.name(), &ys).expect("valid tuple");
            r.contains(fx, fy)
        })
    })
}

/// Exhaustive representability: all reflexive subsets of `theta`.
fn oracle_representable(algebra: &Algebra, theta: &BinRel) -> bool {
    let n = theta.n();
    let off: Vec<(Elem, Elem)> = theta.pairs().filter(|(a, b)| a != b).collect();
    (0u64..1 << off.len()).any(|mask| {
        let mut r = BinRel::diagonal(n).expect("n > 0");
        for (i, &(a, b)) in off.iter().enumerate() {
            if mask >> i & 1 == 1 {
                r.insert(a, b);
            }
        }
        oracle_compose(&r, &oracle_converse(&r)) == *theta && oracle_compatible(algebra, &r)
    })
}

/// All reflexive symmetric relations that the operations preserve.
fn oracle_tolerances(algebra: &Algebra) -> BTreeSet<BinRel> {
    let n = algebra.n();
    let slots: Vec<(Elem, Elem)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..1 << slots.len())
        .map(|mask| {
            let mut r = BinRel::diagonal(n).expect("n > 0");
            for (i, &(a, b)) in slots.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    r.insert(a, b);
                    r.insert(b, a);
                }
            }
            r
        })
        .filter(|r| oracle_compatible(algebra, r))
        .collect()
}

fn oracle_eval(t: &RelTerm, env: &BTreeMap<String, BinRel>) -> BinRel {
    match t {
        RelTerm::Var(v) => env[v].clone(),
        RelTerm::Compose(l, r) => oracle_compose(&oracle_eval(l, env), &oracle_eval(r, env)),
        RelTerm::Intersect(l, r) => oracle_intersect(&oracle_eval(l, env), &oracle_eval(r, env)),
    }
}

// ---------------------------------------------------------------------------
// Random instances.

/// `n` in `1..=4` with one uniformly random binary operation.
pub fn random_algebra(rng: &mut ChaCha8Rng) -> Algebra {
    let n = rng.gen_range(1..=4);
    let table = (0..n * n).map(|_| rng.gen_range(0..n)).collect();
    Algebra::new(n)
        .and_then(|a| a.with_op(OperationTable::new("f", 2, n, table)?))
        .expect("random table is valid")
}

fn random_term(rng: &mut ChaCha8Rng, nodes: usize) -> RelTerm {
    if nodes < 3 {
        return RelTerm::var(["x", "y", "z"][rng.gen_range(0..3)]);
    }
    let left = 2 * rng.gen_range(0..=(nodes - 3) / 2) + 1;
    let right = nodes - 1 - left;
    let (l, r) = (random_term(rng, left), random_term(rng, right));
    if rng.gen_bool(0.5) {
        RelTerm::compose(l, r)
    } else {
        RelTerm::intersect(l, r)
    }
}

fn random_rel(rng: &mut ChaCha8Rng, n: usize) -> BinRel {
    BinRel::from_rows((0..n).map(|_| rng.gen::<u64>() & ((1 << n) - 1)).collect())
        .expect("masked rows")
}

// ---------------------------------------------------------------------------
// Criteria.

fn c01_five_set(budget: Budget) -> Result<String, String> {
    let (a, theta) = entry_theta("five_set");
    let start = Instant::now();
    let decision = find_representation(&a, &theta, budget).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(decision.is_none(), || "a representation was reported".into())?;
    ensure(theta.off_diagonal().count() == 12, || "theta should have 12 off-diagonal pairs".into())?;
    ensure(!oracle_representable(&a, &theta), || "oracle found a representation".into())?;
    ensure(took < Duration::from_secs(1), || format!("search took {took:?}"))?;
    Ok(format!("not representable; 4096 subsets agree; search {took:?}"))
}

fn c02_five_set_weak(budget: Budget) -> Result<String, String> {
    let (a, theta) = entry_theta("five_set");
    let w = find_weak_representation(&a, &theta, budget)
        .map_err(|e| e.to_string())?
        .ok_or("reported not weakly representable")?;
    ensure(w.separators.len() == 8, || format!("{} separators", w.separators.len()))?;
    w.verify(&a, &theta).map_err(|e| e.to_string())?;
    let meet = w
        .separators
        .values()
        .fold(BinRel::full(5).expect("n > 0"), |acc, r| {
            oracle_intersect(&acc, &oracle_compose(r, &oracle_converse(r)))
        });
    ensure(meet == theta, || "intersection differs from theta".into())?;
    Ok("8 separators; intersection equals theta".into())
}

fn c03_s7(budget: Budget) -> Result<String, String> {
    let (a, theta) = entry_theta("s7_semilattice");
    ensure(theta.is_reflexive() && theta == oracle_converse(&theta), || "not reflexive symmetric".into())?;
    ensure(oracle_compatible(&a, &theta), || "theta not compatible".into())?;
    let start = Instant::now();
    let decision = find_representation(&a, &theta, budget).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(decision.is_none(), || "a representation was reported".into())?;
    ensure(took < Duration::from_secs(30), || format!("search took {took:?}"))?;
    Ok(format!("tolerance; not representable; search {took:?}"))
}

fn c04_l7(budget: Budget) -> Result<String, String> {
    let (a, theta) = entry_theta("l7_majority");
    for x in 0..7 {
        for y in 0..7 {
            for args in [[x, x, y], [x, y, x], [y, x, x]] {
                let v = a.eval_op("f", &args).map_err(|e| e.to_string())?;
                ensure(v == x, || format!("f{args:?} = {v}, expected {x}"))?;
            }
        }
    }
    let table = a.op("f").ok_or("missing f")?.table();
    ensure(table.len() == 343 && table.iter().all(|&v| v < 7), || "carrier not closed".into())?;
    ensure(oracle_compatible(&a, &theta), || "theta not compatible".into())?;
    let decision = find_representation(&a, &theta, budget).map_err(|e| e.to_string())?;
    ensure(decision.is_none(), || "a representation was reported".into())?;
    Ok("49 argument pairs x 3 laws; 343 entries in carrier; not representable".into())
}

fn lattice_congruences(budget: Budget) -> Result<Vec<(Algebra, BinRel)>, String> {
    let mut out = Vec::new();
    for name in ["m3", "n5", "chain(4)"] {
        let a = corpus::get(name).map_err(|e| e.to_string())?.algebra;
        for c in enumerate_congruences(&a, budget).map_err(|e| e.to_string())? {
            out.push((a.clone(), c));
        }
    }
    Ok(out)
}

fn c05_lattices(budget: Budget) -> Result<String, String> {
    let mut summary = Vec::new();
    for name in ["m3", "n5", "chain(4)"] {
        let e = corpus::get(name).map_err(|e| e.to_string())?;
        let a = &e.algebra;
        let tolerances = enumerate_tolerances(a, budget).map_err(|e| e.to_string())?;
        let brute = oracle_tolerances(a);
        let found: BTreeSet<BinRel> = tolerances.iter().cloned().collect();
        ensure(found == brute && found.len() == tolerances.len(), || {
            format!("{name}: {} tolerances enumerated, {} by brute force", tolerances.len(), brute.len())
        })?;
        let leq = e.relation("leq").ok_or("missing order")?;
        for theta in &tolerances {
            let w = represent_via_order(a, "join", "meet", theta).map_err(|e| format!("{name}: {e}"))?;
            ensure(w.r == oracle_intersect(theta, leq), || format!("{name}: witness is not theta meet order"))?;
            ensure(oracle_compose(&w.r, &oracle_converse(&w.r)) == *theta, || {
                format!("{name}: R o R^- differs from theta {theta:?}")
            })?;
            let found = find_representation(a, theta, budget).map_err(|e| e.to_string())?;
            let r = found.ok_or_else(|| format!("{name}: search found no representation of {theta:?}"))?;
            verify_representation(a, theta, &r.r).map_err(|e| format!("{name}: {e}"))?;
        }
        summary.push(format!("{name}: {}", tolerances.len()));
    }
    Ok(format!("tolerance counts {}", summary.join(", ")))
}

fn c06_expansion(_budget: Budget) -> Result<String, String> {
    let (a, theta) = entry_theta("expand_five");
    let mut checked = 0;
    for c in 0..5 {
        for d in 0..5 {
            if c == d {
                continue;
            }
            let cl = a.closure([(c, d)], ClosureMode::Reflexive).map_err(|e| e.to_string())?;
            ensure(theta.is_subset(&cl), || format!("closure of ({c},{d}) misses part of theta"))?;
            checked += 1;
        }
    }
    ensure(checked == 20, || format!("{checked} closures"))?;
    ensure(
        theta == oracle_converse(&theta) && oracle_compatible(&a, &theta),
        || "theta is no longer a tolerance".into(),
    )?;
    Ok(format!("{checked} closures contain theta; {} operations", a.ops().len()))
}

fn c07_expanded_weak(budget: Budget) -> Result<String, String> {
    let (a, theta) = entry_theta("expand_five");
    let w = find_weak_representation(&a, &theta, budget).map_err(|e| e.to_string())?;
    ensure(w.is_none(), || "a weak representation was reported".into())?;
    Ok("not weakly representable".into())
}

fn c08_permutability(budget: Budget) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(ALGEBRA_SEED);
    let mut applicable = 0;
    for i in 0..RANDOM_ALGEBRAS {
        let a = random_algebra(&mut rng);
        let tol = enumerate_tolerances(&a, budget).map_err(|e| e.to_string())?;
        let cong = enumerate_congruences(&a, budget).map_err(|e| e.to_string())?;
        if tol != cong {
            continue;
        }
        applicable += 1;
        let report = check_permutability(&a, budget).map_err(|e| e.to_string())?;
        ensure(report.permutable, || format!("algebra #{i} {a:?}: not permutable"))?;
    }
    Ok(format!("{RANDOM_ALGEBRAS} algebras, {applicable} with only congruence tolerances, 0 violations"))
}

fn c09_join_containment(budget: Budget) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    let mut checked = 0;
    while checked < RANDOM_PAIRS {
        let a = random_algebra(&mut rng);
        let cong = enumerate_congruences(&a, budget).map_err(|e| e.to_string())?;
        let alpha = &cong[rng.gen_range(0..cong.len())];
        let beta = &cong[rng.gen_range(0..cong.len())];
        let join = tolerance_join(&a, alpha, beta).map_err(|e| e.to_string())?;
        ensure(join.is_subset(&oracle_compose(beta, alpha)), || {
            format!("join of {alpha:?} and {beta:?} escapes beta o alpha")
        })?;
        checked += 1;
    }
    Ok(format!("{checked} pairs, 0 violations"))
}

fn c10_congruences(budget: Budget) -> Result<String, String> {
    let mut all = lattice_congruences(budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ALGEBRA_SEED);
    for _ in 0..RANDOM_ALGEBRAS {
        let a = random_algebra(&mut rng);
        for c in enumerate_congruences(&a, budget).map_err(|e| e.to_string())? {
            all.push((a.clone(), c));
        }
    }
    for (a, alpha) in &all {
        let w = find_representation(a, alpha, budget)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("no representation for congruence {alpha:?}"))?;
        verify_representation(a, alpha, &w.r).map_err(|e| e.to_string())?;
        verify_representation(a, alpha, alpha).map_err(|e| format!("{alpha:?} as its own witness: {e}"))?;
    }
    Ok(format!("{} congruences", all.len()))
}

fn c11_terms(_budget: Budget) -> Result<String, String> {
    let regular = |s: &str| parse_term(s).map(|t| t.is_regular()).map_err(|e| e.to_string());
    ensure(!regular("x o x")?, || "x o x reported regular".into())?;
    ensure(regular("x & y")?, || "x & y reported non-regular".into())?;
    ensure(regular("x o y")?, || "x o y reported non-regular".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(TERM_SEED);
    for i in 0..RANDOM_TERMS {
        let nodes = [1, 3, 5, 7][rng.gen_range(0..4)];
        let t = random_term(&mut rng, nodes);
        let n = rng.gen_range(1..=5);
        let env: BTreeMap<String, BinRel> = ["x", "y", "z"]
            .iter()
            .map(|v| (v.to_string(), random_rel(&mut rng, n)))
            .collect();
        let got = t.eval(&env).map_err(|e| e.to_string())?;
        ensure(got == oracle_eval(&t, &env), || format!("instance {i}: eval of `{t}` differs"))?;
        let back = parse_term(&t.to_string()).map_err(|e| e.to_string())?;
        ensure(back == t, || format!("instance {i}: `{t}` does not round-trip"))?;
    }
    Ok(format!("{RANDOM_TERMS} instances agree and round-trip"))
}

fn c12_sets(budget: Budget) -> Result<String, String> {
    let mut total = 0;
    let mut representable = 0;
    for n in 1..=4 {
        let a = Algebra::new(n).map_err(|e| e.to_string())?;
        for theta in oracle_tolerances(&a) {
            let got = find_representation(&a, &theta, budget).map_err(|e| e.to_string())?;
            let want = oracle_representable(&a, &theta);
            ensure(got.is_some() == want, || {
                format!("n={n} {theta:?}: search says {}, oracle says {want}", got.is_some())
            })?;
            if let Some(w) = got {
                verify_representation(&a, &theta, &w.r).map_err(|e| e.to_string())?;
                ensure(w.r.is_subset(&theta), || "witness leaves theta".into())?;
                representable += 1;
            }
            total += 1;
        }
    }
    Ok(format!("{total} tolerances, {representable} representable, all decisions agree"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_terms_have_requested_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for nodes in [1, 3, 5, 7] {
            for _ in 0..20 {
                assert_eq!(random_term(&mut rng, nodes).size(), nodes);
            }
        }
    }

    #[test]
    fn oracles_agree_on_small_cases() {
        let a = Algebra::new(3).unwrap();
        assert_eq!(oracle_tolerances(&a).len(), 8);
        let five = corpus::five_set();
        assert!(!oracle_representable(&five.algebra, five.relation("theta").unwrap()));
        let c3 = corpus::chain(3);
        assert!(oracle_representable(&c3.algebra, &BinRel::full(3).unwrap()));
    }
}
