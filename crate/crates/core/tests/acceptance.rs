//! Acceptance criteria A1 to A8. Runs without the libtest harness so that every
//! criterion prints exactly one `PASS`/`FAIL` line; the process exits nonzero
//! if any criterion fails.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use learnspace::analytics::{conditional_probability, Condition, ProbabilityModel};
use learnspace::base::{atoms_from_rows, base_from_rows, color_base, dowling_generate, is_learning_space, BaseFamily};
use learnspace::bench::{parse_suite, run_suite, to_csv, validate_csv};
use learnspace::engine::{compress_closure, compress_space};
use learnspace::explore::run_exploration;
use learnspace::format::{read_dimplications, read_sets};
use learnspace::generate::{gen_learning_space, LayeredParams};
use learnspace::lattice::JiPoset;
use learnspace::prime::{berge_mintr, check_rooted_axioms, prime_dimps, reduce_dimp_base, rooted_circuits};
use learnspace::{Dimplication, Domain, ItemSet};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const K2: &str = include_str!("../../../data/k2.dimp");
const B2: &str = include_str!("../../../data/b2.base");
const K3: &str = include_str!("../../../data/k3.dimp");

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn b2() -> BaseFamily {
    let (dom, sets) = read_sets(B2).unwrap();
    BaseFamily::new(dom, sets).unwrap()
}

fn a1() -> Check {
    let (dom, theta) = read_dimplications(K2).map_err(|e| e.to_string())?;
    let f = compress_space(&dom, &theta).map_err(|e| e.to_string())?;
    ensure!(f.count() == BigUint::from(13u32), "count {}", f.count());
    let base = base_from_rows(&f).map_err(|e| e.to_string())?;
    let want = sorted(b2().sets().to_vec());
    ensure!(base.sets() == want.as_slice(), "base {:?}", base.sets());
    let generated = dowling_generate(&base).map_err(|e| e.to_string())?;
    ensure!(generated == members(&f), "generated states differ from rows");
    Ok(format!("13 states in {} rows, base of {} sets", f.len(), base.len()))
}

fn a2() -> Check {
    let b = b2();
    let dom = b.domain().clone();
    let got: HashSet<Dimplication> = prime_dimps(&b).into_iter().collect();
    let want: HashSet<Dimplication> = [
        ("e", "a"),
        ("a", "b"),
        ("e", "b"),
        ("b d", "c"),
        ("a d", "c"),
        ("d e", "c"),
    ]
    .iter()
    .map(|(a, q)| Dimplication::new(dom.parse_set(a).unwrap(), dom.parse_set(q).unwrap()).unwrap())
    .collect();
    ensure!(got == want, "prime dimplications {:?}", got);
    let rc = rooted_circuits(&got.into_iter().collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let verdict = check_rooted_axioms(&rc);
    ensure!(verdict.holds(), "rooted axioms: {verdict:?}");
    Ok("6 prime dimplications, rooted axioms hold".into())
}

fn k3_rows() -> learnspace::RowFamily {
    let (dom, theta) = read_dimplications(K3).unwrap();
    compress_space(&dom, &theta).unwrap()
}

fn a3() -> Check {
    let f = k3_rows();
    let dom = f.domain().clone();
    ensure!(f.count() == BigUint::from(377u32), "count {}", f.count());
    let given = Condition::new(dom.parse_set("3 4").unwrap(), dom.empty_set());
    let event = Condition::new(dom.empty_set(), dom.parse_set("9 10").unwrap());
    let p = conditional_probability(&f, &event, &given, ProbabilityModel::Uniform).map_err(|e| e.to_string())?;
    ensure!(
        p == BigRational::new(BigInt::from(8), BigInt::from(77)),
        "probability {p}"
    );
    let seven = dom.index_of("7").unwrap();
    let atoms = atoms_from_rows(&f, seven).map_err(|e| e.to_string())?;
    let want = sorted(
        ["1 2 7 9", "1 6 7", "3 7 10"]
            .iter()
            .map(|s| dom.parse_set(s).unwrap())
            .collect(),
    );
    ensure!(atoms == want, "Atoms(7) = {atoms:?}");
    let base = base_from_rows(&f).map_err(|e| e.to_string())?;
    ensure!(base.len() == 13, "base size {}", base.len());
    let cb = color_base(&base).map_err(|e| e.to_string())?;
    let counts: BTreeMap<String, usize> = cb
        .color_counts()
        .into_iter()
        .map(|(c, n)| (dom.label(c).to_string(), n))
        .collect();
    let others_once = counts.iter().all(|(c, &n)| c == "7" || c == "4" || n == 1);
    ensure!(
        counts.get("7") == Some(&3) && counts.get("4") == Some(&2) && others_once,
        "colors {counts:?}"
    );
    Ok(format!("377 states in {} rows, p = 8/77, 13 base sets", f.len()))
}

fn a4() -> Check {
    let f = k3_rows();
    let base = base_from_rows(&f).map_err(|e| e.to_string())?;
    let cb = color_base(&base).map_err(|e| e.to_string())?;
    let p = JiPoset::build(&cb);
    let jn = p.sigma_jn().len();
    ensure!(jn == 8, "clique part has {jn} implications");
    let sigma = p.sigma();
    let closed = compress_closure(p.labels(), &sigma).map_err(|e| e.to_string())?;
    ensure!(
        closed.count() == BigUint::from(377u32),
        "closure count {}",
        closed.count()
    );
    let expanded: HashSet<ItemSet> = closed.members().map(|x| p.expand(&x).unwrap()).collect();
    let states: HashSet<ItemSet> = f.members().collect();
    ensure!(
        expanded.len() == 377 && expanded == states,
        "expansion is not a bijection onto the states"
    );
    Ok(format!(
        "{} implications, 377 closed sets in {} rows",
        sigma.len(),
        closed.len()
    ))
}

/// Runs `check` on 200 deterministic cases of `strategy`.
fn cases<S: Strategy>(name: &str, strategy: S, check: impl Fn(S::Value) -> Result<(), String>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    for i in 0..200 {
        let value = strategy
            .new_tree(&mut runner)
            .map_err(|e| format!("{name}: {e}"))?
            .current();
        let shown = format!("{value:?}");
        check(value).map_err(|e| format!("{name} case {i}: {e}; input {shown:.300}"))?;
    }
    Ok(())
}

fn a5() -> Check {
    cases("space vs scan", theta_strategy(14, 12), |(w, theta)| {
        let f = compress_space(&Domain::numbered(w).unwrap(), &theta).map_err(|e| e.to_string())?;
        ensure!(members(&f) == space_by_scan(w, &theta), "families differ");
        Ok(())
    })?;
    cases("closure system vs scan", sigma_strategy(14, 12), |(w, sigma)| {
        let f = compress_closure(&Domain::numbered(w).unwrap(), &sigma).map_err(|e| e.to_string())?;
        ensure!(members(&f) == closed_by_scan(w, &sigma), "families differ");
        Ok(())
    })?;
    cases("complement duality", theta_strategy(12, 10), |(w, theta)| {
        let dom = Domain::numbered(w).unwrap();
        let e = compress_space(&dom, &theta).map_err(|e| e.to_string())?;
        let sigma: Vec<_> = theta.iter().map(Dimplication::to_implication).collect();
        let n = compress_closure(&dom, &sigma).map_err(|e| e.to_string())?;
        ensure!(
            members(&e.complement()) == members(&n),
            "complemented space differs from closure system"
        );
        Ok(())
    })?;
    cases("dowling vs fixpoint", base_strategy(12, 10), |b| {
        let w = b.domain().width();
        ensure!(
            dowling_generate(&b).unwrap() == union_closure(w, b.sets()),
            "state lists differ"
        );
        Ok(())
    })?;
    cases("prime dimplications define the space", base_strategy(12, 8), |b| {
        let w = b.domain().width();
        let f = compress_space(b.domain(), &prime_dimps(&b)).map_err(|e| e.to_string())?;
        ensure!(members(&f) == union_closure(w, b.sets()), "families differ");
        Ok(())
    })?;
    cases("reduction preserves the space", theta_strategy(12, 12), |(w, theta)| {
        let dom = Domain::numbered(w).unwrap();
        let reduced = reduce_dimp_base(&theta, 1);
        let a = compress_space(&dom, &theta).map_err(|e| e.to_string())?;
        let b = compress_space(&dom, &reduced).map_err(|e| e.to_string())?;
        ensure!(members(&a) == members(&b), "families differ");
        Ok(())
    })?;
    cases("berge vs scan", hypergraph_strategy(12, 8), |(w, family)| {
        let got = berge_mintr(w, &family).map_err(|e| e.to_string())?.into_sets();
        ensure!(got == mintr_by_scan(w, &family), "transversals differ");
        Ok(())
    })?;
    Ok("7 suites x 200 cases".into())
}

/// Parameters for the `i`-th generated learning space.
fn layered(i: u64, max_items: usize) -> LayeredParams {
    let mu = 3 + (i % 3) as usize;
    let lambda = 2 + (i % 2) as usize;
    let kappa = 1 + (i % 2) as usize;
    let colors = (mu * (lambda - 1)).min(max_items - mu).max(1) - (i % 2) as usize;
    LayeredParams::with_color_count(mu, lambda, kappa, colors)
}

fn a6() -> Check {
    let mut widths = Vec::new();
    for seed in 0..50u64 {
        let params = layered(seed, 12);
        let b = gen_learning_space(&params, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        let q = b.domain().width();
        ensure!(is_learning_space(&b).holds(), "seed {seed}: not a learning space");
        ensure!(b.len() >= q, "seed {seed}: base {} smaller than domain {q}", b.len());
        let rc = rooted_circuits(&prime_dimps(&b)).map_err(|e| e.to_string())?;
        ensure!(check_rooted_axioms(&rc).holds(), "seed {seed}: rooted axioms fail");
        let reduced = reduce_dimp_base(&prime_dimps(&b), 1);
        let e = compress_space(b.domain(), &reduced).map_err(|e| e.to_string())?;
        let cb = color_base(&b).map_err(|e| e.to_string())?;
        let p = JiPoset::build(&cb);
        let n = compress_closure(p.labels(), &p.sigma()).map_err(|e| e.to_string())?;
        ensure!(
            e.count() == n.count(),
            "seed {seed}: e-route {} vs n-route {}",
            e.count(),
            n.count()
        );
        widths.push(q);
    }
    Ok(format!(
        "50 instances, {}..={} items",
        widths.iter().min().unwrap(),
        widths.iter().max().unwrap()
    ))
}

fn explore_check(name: &str, hidden: &BaseFamily, a_max: usize) -> Result<(), String> {
    let out = run_exploration(hidden, Some(a_max), None).map_err(|e| format!("{name}: {e}"))?;
    ensure!(out.aborted.is_none(), "{name}: aborted");
    ensure!(out.counts.windows(2).all(|c| c[1] <= c[0]), "{name}: counts increased");
    let want = dowling_generate(hidden).map_err(|e| e.to_string())?;
    ensure!(members(&out.rows) == want, "{name}: recovered family differs");
    Ok(())
}

fn a7() -> Check {
    explore_check("small space", &b2(), 4)?;
    for seed in 0..20u64 {
        let b = gen_learning_space(&layered(seed, 10), 1000 + seed).map_err(|e| format!("seed {seed}: {e}"))?;
        let w = b.domain().width();
        ensure!(w <= 10, "seed {seed}: {w} items");
        explore_check(&format!("seed {seed}"), &b, w - 1)?;
    }
    Ok("small space and 20 hidden learning spaces recovered".into())
}

fn a8() -> Check {
    let suite = parse_suite(
        "[defaults]\ntimeout_secs = 300\n\n[[instance]]\nname = \"theta-30-50-2-8\"\nkind = \"theta\"\n\
         w = 30\nh = 50\na = 2\nb = 8\nseed = 1\nrepeat = 5\nroutes = [\"e\"]\n",
    )
    .map_err(|e| e.to_string())?;
    let records = run_suite(&suite, std::path::Path::new("."));
    let csv = to_csv(&records).map_err(|e| e.to_string())?;
    let parsed = validate_csv(&csv).map_err(|e| e.to_string())?;
    ensure!(parsed.len() == 5, "{} records", parsed.len());
    let mut ratios = Vec::new();
    for r in &parsed {
        ensure!(r.status == "ok", "seed {}: {}", r.seed, r.status);
        let states = r.states_value().ok_or("missing states")?;
        let rows = r.rows.ok_or("missing rows")?;
        ensure!(
            BigUint::from(rows) <= states,
            "seed {}: {rows} rows > {states} states",
            r.seed
        );
        ratios.push(
            r.ratio
                .as_deref()
                .ok_or("missing ratio")?
                .parse::<f64>()
                .map_err(|e| e.to_string())?,
        );
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios[ratios.len() / 2];
    ensure!(median > 10.0, "median ratio {median}");
    Ok(format!("median states per row {median:.1}"))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Check, Duration); 8] = [
        ("A1", "small space pipeline", a1, Duration::from_secs(1)),
        ("A2", "prime dimplications", a2, Duration::from_secs(1)),
        ("A3", "ten-item space numbers", a3, Duration::from_secs(5)),
        ("A4", "join-irreducible route", a4, Duration::from_secs(5)),
        ("A5", "oracle equivalence", a5, Duration::from_secs(300)),
        ("A6", "learning-space generator", a6, Duration::from_secs(300)),
        ("A7", "exploration convergence", a7, Duration::from_secs(300)),
        ("A8", "compression benchmark", a8, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (id, title, check, limit) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > limit => Err(format!("{detail}, but took longer than {limit:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {id} {title}: {detail} [{:.2} s]", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {title}: {why} [{:.2} s]", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
