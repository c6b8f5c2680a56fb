mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{brute_exact, brute_words, random_313, tuning_oracle};
use lamlab::lamination::{LaminationApprox, LaminationSpec, Polygon};
use lamlab::mating::{self, FindingCode, MatingSpec, Side};
use lamlab::symdyn::{self, Formulas, TransitionMatrix};
use lamlab::{qml, Angle, Leaf};
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Period bound for the worked examples.
const EXAMPLE_BOUND: u32 = 15;
/// Largest `m` in the component count.
const COUNT_MAX_M: u32 = 12;
const RANDOM_MATRICES: usize = 50;
const MATRIX_MAX_SIZE: usize = 4;
const WORD_MAX_LEN: u32 = 6;
const BUILD_MAX_DEPTH: u32 = 8;
const ADDRESS_TRIALS: usize = 1000;

/// Wall-clock budgets, one per criterion.
const BUDGETS: [Duration; 10] = [
    Duration::from_secs(1),
    Duration::from_secs(1),
    Duration::from_secs(30),
    Duration::from_secs(60),
    Duration::from_secs(60),
    Duration::from_secs(60),
    Duration::from_secs(1),
    Duration::from_secs(60),
    Duration::from_secs(5),
    Duration::from_secs(5),
];

#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn check(&mut self, ok: bool, what: &str) {
        if !ok {
            self.0.push(what.to_string());
        }
    }
}

fn a(n: u64, d: u64) -> Angle {
    Angle::frac(n, d)
}

fn minor(n: u64, d: u64) -> Leaf {
    qml::minor_of(&a(n, d)).unwrap().leaf
}

fn lamination(n: u64, d: u64) -> LaminationSpec {
    LaminationSpec::new(&a(n, d)).unwrap()
}

fn mate(p: (u64, u64), q: (u64, u64)) -> MatingSpec {
    MatingSpec::new(&a(p.0, p.1), &a(q.0, q.1)).unwrap()
}

fn companions(c: &mut Checks) {
    for (x, y) in [((7, 15), (8, 15)), ((5, 31), (6, 31)), ((3, 31), (4, 31))] {
        c.check(qml::companion(&a(x.0, x.1)).unwrap() == a(y.0, y.1), &format!("companion of {}/{}", x.0, x.1));
        c.check(minor(x.0, x.1) == Leaf::frac(x, y), &format!("minor through {}/{}", x.0, x.1));
        c.check(minor(y.0, y.1) == minor(x.0, x.1), &format!("minor through {}/{}", y.0, y.1));
    }
}

fn order(c: &mut Checks) {
    for (lo, hi) in [((1, 3), (3, 7)), ((1, 15), (3, 31)), ((1, 7), (5, 31)), ((14, 31), (7, 15))] {
        let ok = qml::separates_from_zero(&minor(lo.0, lo.1), &minor(hi.0, hi.1)).unwrap();
        c.check(ok, &format!("minor of {}/{} below minor of {}/{}", lo.0, lo.1, hi.0, hi.1));
    }
}

fn counting(c: &mut Checks) {
    for m in 1..=COUNT_MAX_M {
        let minors: usize = (2..=m)
            .filter(|k| m % k == 0)
            .map(|k| qml::exact_period_angles(k).unwrap().len() / 2)
            .sum();
        let want = BigUint::from(1u64) << (m - 1);
        c.check(BigUint::from(1 + minors) == want, &format!("minor count for m = {m}"));
        c.check(symdyn::mandelbrot_component_count(m).unwrap() == want, &format!("component count for m = {m}"));
    }
    let mut rng = StdRng::seed_from_u64(25);
    for _ in 0..RANDOM_MATRICES {
        let k = rng.gen_range(1..=MATRIX_MAX_SIZE);
        let rows: Vec<Vec<u64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(0..=1)).collect()).collect();
        let m = TransitionMatrix::try_from(rows.clone()).unwrap();
        for n in 1..=WORD_MAX_LEN {
            c.check(symdyn::count_fixed(&m, n).unwrap() == brute_words(&rows, n), &format!("trace count {rows:?} n = {n}"));
            c.check(
                symdyn::count_exact_period(&m, n).unwrap() == brute_exact(&rows, n),
                &format!("exact count {rows:?} n = {n}"),
            );
        }
    }
}

fn endpoints(spec: &LaminationSpec, conj: bool) -> BTreeSet<Angle> {
    let mut out = BTreeSet::new();
    for n in 1..=EXAMPLE_BOUND {
        for orbit in spec.periodic_leaves(n).unwrap() {
            for l in orbit {
                for x in [l.lo(), l.hi()] {
                    out.insert(if conj { x.conjugate() } else { x.clone() });
                }
            }
        }
    }
    out
}

fn example_one(c: &mut Checks) {
    let (p, q) = (lamination(3, 7), lamination(3, 31));
    c.check(qml::is_mateable(p.p(), q.p()).unwrap(), "3/7 and 3/31 are mateable");
    let shared = endpoints(&p, false).intersection(&endpoints(&q, true)).count();
    c.check(shared == 0, &format!("{shared} shared endpoints"));
    c.check(p.polygons(EXAMPLE_BOUND).unwrap().is_empty(), "L_3/7 has no polygons");
    let square = Polygon::new(vec![a(1, 15), a(2, 15), a(4, 15), a(8, 15)]);
    c.check(q.polygons(EXAMPLE_BOUND).unwrap().contains(&square), "L_3/31 has the square");
    let inverse: BTreeSet<Angle> = square.vertices.iter().map(Angle::conjugate).collect();
    let spec = mate((3, 7), (3, 31));
    for class in mating::all_periodic_classes(&spec, EXAMPLE_BOUND).unwrap() {
        if class.is_trivial() {
            continue;
        }
        let (np, nq) = class.leaf_count();
        let ok = np + nq == 1 || class.support.is_subset(&inverse);
        c.check(ok, &format!("class {:?}", class.support));
    }
    let r = mating::check_theorem_3_5(&spec, EXAMPLE_BOUND).unwrap();
    c.check(r.thm35_ok, "check passes");
}

fn example_two(c: &mut Checks) {
    let spec = mate((7, 15), (5, 31));
    let p = lamination(7, 15);
    let q = lamination(5, 31);
    c.check(p.leaf_in(&Leaf::frac((6, 31), (25, 31))).unwrap(), "{6/31, 25/31} in L_7/15");

    let inv = minor(5, 31).conjugate();
    let class = mating::class_of(&spec, inv, EXAMPLE_BOUND).unwrap();
    let members: BTreeSet<Leaf> = class.p_leaves.iter().chain(&class.q_leaves).cloned().collect();
    let want: BTreeSet<Leaf> = [Leaf::frac((6, 31), (25, 31)), Leaf::frac((25, 31), (26, 31))].into();
    c.check(members == want, &format!("class of the inverted minor of 5/31 is {members:?}"));

    c.check(q.periodic_leaves(4).unwrap().is_empty(), "L_5/31 has no leaves of period 4");
    let five: BTreeSet<Leaf> = q.periodic_leaves(5).unwrap().into_iter().flatten().collect();
    let orbit: BTreeSet<Leaf> = q.minor_orbit().iter().cloned().collect();
    c.check(five == orbit, "period-5 leaves of L_5/31 are the minor orbit");

    let tri = mating::class_of(&spec, Leaf::frac((3, 7), (4, 7)), EXAMPLE_BOUND).unwrap();
    c.check(tri.leaf_count() == (3, 3), &format!("class of {{3/7, 4/7}} has {:?} leaves", tri.leaf_count()));

    let mu_p = minor(7, 15);
    let mu_25 = minor(2, 5);
    let joined = mating::all_periodic_classes(&spec, EXAMPLE_BOUND).unwrap().into_iter().any(|k| {
        let all: BTreeSet<&Leaf> = k.p_leaves.iter().chain(&k.q_leaves).collect();
        all.contains(&mu_p) && all.contains(&mu_25) && k.q_leaves.len() == 1
    });
    c.check(joined, "a class joins the minors of 7/15 and 2/5 through one q-leaf");

    let r = mating::check_theorem_3_5(&spec, EXAMPLE_BOUND).unwrap();
    c.check(!r.thm35_ok && r.has(FindingCode::OversizedClass), "check fails with an oversized class");
}

fn example_three(c: &mut Checks) {
    let spec = mate((15, 31), (1, 9));
    c.check(lamination(15, 31).leaf_in(&Leaf::frac((4, 9), (5, 9))).unwrap(), "{4/9, 5/9} in L_15/31");
    let linked = mating::detect_linked_gaps(&spec, EXAMPLE_BOUND).unwrap();
    let found = linked.iter().any(|l| {
        l.side == Side::Q && l.gap_period == 6 && l.cluster_size == 2 && l.tuned_period == 3 && l.critical_periods == [5, 3]
    });
    c.check(found, "linked period-6 gaps on the q side");
    let r = mating::check_theorem_3_5(&spec, EXAMPLE_BOUND).unwrap();
    c.check(!r.thm35_ok, "check fails");
    let noted = r
        .findings
        .iter()
        .any(|f| f.code == FindingCode::LinkedGaps && f.message.contains("period 2 tuning") && f.message.contains("5 and 3"));
    c.check(noted, "linked gaps note");
}

fn tuning(c: &mut Checks) {
    let t = qml::is_tuning(&a(2, 5)).unwrap();
    c.check(
        t.as_ref().map(|t| (t.root.leaf.clone(), t.inner_period)) == Some((minor(1, 3), 2)),
        "2/5 tunes the minor of 1/3 with inner period 2",
    );
    for (n, d) in [(2, 5), (3, 7), (7, 15), (3, 31), (5, 31), (15, 31)] {
        let got = qml::is_tuning(&a(n, d)).unwrap().map(|t| (t.root.leaf, t.inner_period));
        c.check(got == tuning_oracle(&a(n, d)), &format!("{n}/{d} agrees with block substitution"));
        if (n, d) != (2, 5) {
            c.check(got.is_none(), &format!("{n}/{d} is not tuned"));
        }
    }
}

fn oracle_equivalence(c: &mut Checks) {
    for (n, d) in [(3, 7), (7, 15), (3, 31), (5, 31), (15, 31), (1, 9)] {
        let spec = lamination(n, d);
        let approx = LaminationApprox::build(&spec, BUILD_MAX_DEPTH).unwrap();
        let leaves: Vec<&Leaf> = approx.leaves.iter().collect();
        let outside = leaves.iter().filter(|l| !spec.leaf_in(l).unwrap()).count();
        c.check(outside == 0, &format!("{outside} leaves of {n}/{d} fail membership"));
        let crossing = leaves
            .iter()
            .enumerate()
            .any(|(i, x)| leaves[i + 1..].iter().any(|y| x.crosses(y)));
        c.check(!crossing, &format!("leaves of {n}/{d} cross"));
    }
}

fn nested_addresses(c: &mut Checks) {
    let mut rng = StdRng::seed_from_u64(314);
    for t in 0..ADDRESS_TRIALS {
        let x = random_313(&mut rng, t % 3);
        c.check(symdyn::meets_generation_constraints(&x), &format!("{x:?} meets the input constraints"));
        let v = symdyn::validate_lemma314(&x).unwrap();
        c.check(v.valid, &format!("{x:?}: {:?}", v.violations));
        let d = x.derive(Formulas::Derivation).unwrap();
        c.check(d.n.windows(2).all(|w| w[0] < w[1]), &format!("{x:?}: n increasing"));
        c.check(x.m_seq.windows(2).all(|w| w[0] < w[1]), &format!("{x:?}: m increasing"));
    }
}

fn run(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_lamlab"))
        .args(args)
        .env_remove("LAMLAB_MAX_PERIOD")
        .output()
        .unwrap();
    (o.status.code(), o.stdout)
}

fn cli_contract(c: &mut Checks) {
    let dir = std::env::temp_dir().join(format!("lamlab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (p, q, code) in [("3/7", "3/31", 0), ("7/15", "5/31", 3), ("15/31", "1/9", 3)] {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let svg = dir.join(format!("{k}.svg"));
            let (got, json) = run(&["mate", p, q, "--check-3-5", "--svg", svg.to_str().unwrap()]);
            c.check(got == Some(code), &format!("mate {p} {q} exits {got:?}"));
            outputs.push((json, std::fs::read(&svg).unwrap_or_default()));
        }
        c.check(outputs[0] == outputs[1], &format!("mate {p} {q} is deterministic"));
        c.check(!outputs[0].1.is_empty(), &format!("mate {p} {q} writes an svg"));
    }
    let _ = std::fs::remove_dir_all(&dir);
}

type Criterion = (&'static str, fn(&mut Checks));

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("companions", companions),
        ("order relations", order),
        ("counting", counting),
        ("first example", example_one),
        ("second example", example_two),
        ("third example", example_three),
        ("tuning", tuning),
        ("oracle equivalence", oracle_equivalence),
        ("nested addresses", nested_addresses),
        ("cli contract", cli_contract),
    ];
    let mut failed = Vec::new();
    let mut log = std::io::stderr();
    let _ = writeln!(log);
    for (i, ((name, f), budget)) in criteria.iter().zip(BUDGETS).enumerate() {
        let start = Instant::now();
        let mut checks = Checks::default();
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| f(&mut checks)));
        let took = start.elapsed();
        if let Err(e) = outcome {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            checks.0.push(format!("panicked: {msg}"));
        }
        if took > budget {
            checks.0.push(format!("took {took:.2?}, budget {budget:?}"));
        }
        let status = if checks.0.is_empty() { "PASS" } else { "FAIL" };
        let _ = writeln!(log, "{status} {:>2} {name} ({took:.2?})", i + 1);
        for m in &checks.0 {
            let _ = writeln!(log, "       {m}");
        }
        if !checks.0.is_empty() {
            failed.push(format!("{} {name}", i + 1));
        }
    }
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
