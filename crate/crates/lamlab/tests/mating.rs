use std::collections::BTreeSet;

use lamlab::lamination::Polygon;
use lamlab::mating::{self, FindingCode, MatingSpec, Side};
use lamlab::{qml, Angle, EquivClass, Error, Leaf};
use proptest::prelude::*;

fn a(n: u64, d: u64) -> Angle {
    Angle::frac(n, d)
}

fn mate(p: (u64, u64), q: (u64, u64)) -> MatingSpec {
    MatingSpec::new(&a(p.0, p.1), &a(q.0, q.1)).unwrap()
}

type Chord = ((u64, u64), (u64, u64));

fn leaves(pairs: &[Chord]) -> BTreeSet<Leaf> {
    pairs.iter().map(|&(x, y)| Leaf::frac(x, y)).collect()
}

fn all_leaves(c: &EquivClass) -> Vec<&Leaf> {
    c.p_leaves.iter().chain(&c.q_leaves).collect()
}

const EXAMPLES: [Chord; 3] = [((3, 7), (3, 31)), ((7, 15), (5, 31)), ((15, 31), (1, 9))];

#[test]
fn side_classes_are_conjugated_on_q() {
    let m = mate((7, 15), (5, 31));
    assert_eq!(m.side_class(Side::Q, &a(26, 31), 5).unwrap(), vec![a(25, 31), a(26, 31)]);
    assert!(m.side_leaf_in(Side::Q, &Leaf::frac((25, 31), (26, 31))).unwrap());
    assert!(m.side_leaf_in(Side::P, &Leaf::frac((6, 31), (25, 31))).unwrap());
    assert!(matches!(MatingSpec::new(&a(1, 6), &a(1, 3)), Err(Error::Domain(_))));
}

#[test]
fn example_one_classes() {
    let m = mate((3, 7), (3, 31));
    let c = mating::class_of(&m, Leaf::frac((27, 31), (28, 31)), 10).unwrap();
    assert!(c.p_leaves.is_empty());
    assert_eq!(c.q_leaves, leaves(&[((27, 31), (28, 31))]));
    for c in mating::periodic_classes(&m, 5, 10).unwrap() {
        assert!(!c.mixes_sides(), "{:?}", c);
    }
    assert!(mating::detect_linked_gaps(&m, 12).unwrap().is_empty());
}

#[test]
fn example_two_triangle_cluster() {
    let m = mate((7, 15), (5, 31));
    let c = mating::class_of(&m, Leaf::frac((3, 7), (4, 7)), 10).unwrap();
    assert_eq!(c.p_leaves, leaves(&[((3, 7), (4, 7)), ((1, 7), (6, 7)), ((2, 7), (5, 7))]));
    assert_eq!(c.q_leaves.len(), 3);
    let triangle = Polygon::new(vec![a(3, 7), a(5, 7), a(6, 7)]);
    assert_eq!(c.q_polygons, [triangle].into());
    assert_eq!(c.period, Some(1));
    assert!(!c.is_simple());
}

#[test]
fn example_two_fixed_classes() {
    let m = mate((7, 15), (5, 31));
    let fixed = mating::periodic_classes(&m, 1, 10).unwrap();
    assert_eq!(fixed.len(), 2);
    assert_eq!(fixed[0].p_leaves, leaves(&[((1, 3), (2, 3))]));
    assert!(fixed[0].q_leaves.is_empty());
    assert!(fixed[1].support.contains(&a(6, 7)) && fixed[1].support.contains(&a(3, 7)));
    assert!(mating::detect_linked_gaps(&m, 12).unwrap().is_empty());
}

/// The class of the inverted minor of 5/31 also takes in the symmetric leaf
/// {5/31, 26/31} of L_{7/15}: a path of three leaves.
#[test]
fn example_two_minor_class_is_a_path() {
    let m = mate((7, 15), (5, 31));
    let c = mating::class_of(&m, Leaf::frac((25, 31), (26, 31)), 10).unwrap();
    assert_eq!(c.p_leaves, leaves(&[((6, 31), (25, 31)), ((5, 31), (26, 31))]));
    assert_eq!(c.q_leaves, leaves(&[((25, 31), (26, 31))]));
    assert_eq!(c.support, [a(5, 31), a(6, 31), a(25, 31), a(26, 31)].into());
}

/// μ_{2/5} has period 4 endpoints; L_{5/31} has no period-4 leaves, so no
/// q-leaf reaches it.
#[test]
fn example_two_period_four_classes_are_single_leaves() {
    let m = mate((7, 15), (5, 31));
    assert_eq!(qml::minor_of(&a(2, 5)).unwrap().leaf, Leaf::frac((2, 5), (3, 5)));
    let c = mating::class_of(&m, Leaf::frac((7, 15), (8, 15)), 10).unwrap();
    assert!(c.q_leaves.is_empty());
    assert!(!c.support.contains(&a(2, 5)));
    for c in mating::periodic_classes(&m, 4, 8).unwrap() {
        let four = c.support.iter().all(|x| x.period() == 4);
        if four {
            assert!(c.q_leaves.is_empty());
        }
    }
}

#[test]
fn example_three_linked_gaps() {
    let m = mate((15, 31), (1, 9));
    let c = mating::class_of(&m, Leaf::frac((4, 9), (5, 9)), 10).unwrap();
    assert_eq!(c.p_leaves, leaves(&[((4, 9), (5, 9))]));
    assert_eq!(c.q_leaves.len(), 2);
    let linked = mating::detect_linked_gaps(&m, 10).unwrap();
    assert_eq!(linked.len(), 1);
    let l = &linked[0];
    assert_eq!(l.side, Side::Q);
    assert_eq!(l.gap_period, 6);
    assert_eq!(l.cluster_size, 2);
    assert_eq!(l.tuned_period, 3);
    assert_eq!(l.critical_periods, [5, 3]);
    assert_eq!(Leaf::frac((4, 9), (5, 9)).double(), Some(Leaf::frac((1, 9), (8, 9))));
    assert!(l.witnesses.iter().any(|w| w.p_leaves.contains(&Leaf::frac((1, 9), (8, 9)))));
}

#[test]
fn disjoint_closure_checks() {
    let r = mating::check_theorem_3_5(&mate((3, 7), (3, 31)), 15).unwrap();
    assert!(r.mateable && r.thm35_ok && r.findings.is_empty());
    let r = mating::check_theorem_3_5(&mate((7, 15), (5, 31)), 12).unwrap();
    assert!(r.mateable && !r.thm35_ok);
    assert!(r.has(FindingCode::OversizedClass));
    assert!(!r.has(FindingCode::LinkedGaps));
    let r = mating::check_theorem_3_5(&mate((15, 31), (1, 9)), 12).unwrap();
    assert!(!r.thm35_ok);
    assert!(r.has(FindingCode::LinkedGaps));
    let note = r.findings.iter().find(|f| f.code == FindingCode::LinkedGaps).unwrap();
    assert!(note.message.contains("period 2 tuning"), "{}", note.message);
    let r = mating::check_theorem_3_5(&mate((3, 7), (3, 7)), 6).unwrap();
    assert!(r.has(FindingCode::NotMateable) && !r.thm35_ok);
    let r = mating::check_theorem_3_5(&mate((2, 5), (3, 7)), 6).unwrap();
    assert!(r.has(FindingCode::TuningP));
}

#[test]
fn report_json_has_codes() {
    let r = mating::check_theorem_3_5(&mate((7, 15), (5, 31)), 8).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let keys = ["\"p\"", "\"q\"", "\"period_bound\"", "\"mateable\"", "\"thm35_ok\"", "\"findings\"", "\"class_histogram\""];
    let at: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "{text}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["findings"][0]["code"], "OVERSIZED_CLASS");
    let hist = v["class_histogram"].as_array().unwrap();
    assert!(hist.iter().all(|e| e["count"].as_u64().unwrap() > 0));
}

#[test]
fn class_cap_is_reported() {
    let m = mate((7, 15), (5, 31));
    let err = mating::class_of_capped(&m, Leaf::frac((3, 7), (4, 7)), 10, 4).unwrap_err();
    assert!(matches!(err, Error::ClassOverflow { cap: 4, .. }));
}

#[test]
fn classes_are_well_defined() {
    for (p, q) in EXAMPLES {
        let m = mate(p, q);
        for c in mating::all_periodic_classes(&m, 8).unwrap() {
            for x in &c.support {
                let again = mating::class_of(&m, x.clone(), 8).unwrap();
                assert_eq!(again, c, "class of {x}");
            }
        }
    }
}

#[test]
fn images_of_classes_are_classes() {
    for (p, q) in EXAMPLES {
        let m = mate(p, q);
        for c in mating::all_periodic_classes(&m, 8).unwrap() {
            let img = c.doubled_support();
            let seed = img.iter().next().unwrap().clone();
            let target = mating::class_of(&m, seed, 8).unwrap();
            assert!(img.is_subset(&target.support));
        }
    }
}

#[test]
fn swapping_sides_conjugates_classes() {
    for (p, q) in EXAMPLES {
        let m = mate(p, q);
        let s = m.swapped();
        for c in mating::all_periodic_classes(&m, 7).unwrap() {
            let x = c.support.iter().next().unwrap();
            let d = mating::class_of(&s, x.conjugate(), 7).unwrap();
            let conj = |set: &BTreeSet<Leaf>| -> BTreeSet<Leaf> { set.iter().map(Leaf::conjugate).collect() };
            assert_eq!(d.p_leaves, conj(&c.q_leaves));
            assert_eq!(d.q_leaves, conj(&c.p_leaves));
            let supp: BTreeSet<Angle> = c.support.iter().map(Angle::conjugate).collect();
            assert_eq!(d.support, supp);
        }
    }
}

#[test]
fn same_side_members_do_not_cross() {
    for (p, q) in EXAMPLES {
        let m = mate(p, q);
        for c in mating::all_periodic_classes(&m, 10).unwrap() {
            for side in [&c.p_leaves, &c.q_leaves] {
                let ls: Vec<&Leaf> = side.iter().collect();
                for (i, x) in ls.iter().enumerate() {
                    for y in &ls[i + 1..] {
                        assert!(!x.crosses(y), "{x} crosses {y}");
                    }
                }
            }
        }
    }
}

/// p-leaves and q-leaves sit on opposite sides of the circle; in the
/// triangle cluster of the second example they cross as chords.
#[test]
fn opposite_side_members_may_cross() {
    let m = mate((7, 15), (5, 31));
    let c = mating::class_of(&m, Leaf::frac((3, 7), (4, 7)), 10).unwrap();
    let crossing = all_leaves(&c)
        .iter()
        .any(|x| c.q_leaves.iter().any(|y| c.p_leaves.contains(x) && x.crosses(y)));
    assert!(crossing);
}

#[test]
fn periodic_class_counts_are_stable() {
    for (p, q) in EXAMPLES {
        let m = mate(p, q);
        for n in 1..=8 {
            let small = mating::periodic_classes(&m, n, 16).unwrap().len();
            let large = mating::periodic_classes(&m, n, 18).unwrap().len();
            assert_eq!(small, large, "{p:?} {q:?} n = {n}");
        }
    }
}

fn periodic_angle() -> impl Strategy<Value = Angle> {
    (2u32..=6).prop_flat_map(|n| {
        let all = qml::exact_period_angles(n).unwrap();
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ok_implies_mateable_without_findings(p in periodic_angle(), q in periodic_angle()) {
        let m = MatingSpec::new(&p, &q).unwrap();
        let r = mating::check_theorem_3_5(&m, 7).unwrap();
        prop_assert_eq!(r.mateable, qml::is_mateable(&p, &q).unwrap());
        if r.thm35_ok {
            prop_assert!(r.mateable && r.findings.is_empty());
        }
        prop_assert_eq!(r.thm35_ok, r.mateable && r.findings.is_empty());
    }
}
