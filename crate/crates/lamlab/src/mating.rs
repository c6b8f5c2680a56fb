//! The mating relation on `L_p` together with the conjugated `L_q`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::circle::{Angle, Leaf};
use crate::error::{Error, Result};
use crate::lamination::{LaminationSpec, Polygon};
use crate::limits;
use crate::qml::{self, Periodic, Tuning};

/// Which lamination a leaf or polygon comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    P,
    Q,
}

/// Two laminations to be mated; the `q` side is read through `x -> 1 - x`.
#[derive(Clone, Debug)]
pub struct MatingSpec {
    p: Angle,
    q: Angle,
    p_lam: Option<LaminationSpec>,
    q_lam: Option<LaminationSpec>,
}

impl MatingSpec {
    pub fn new(p: &Angle, q: &Angle) -> Result<Self> {
        let side = |x: &Angle| -> Result<Option<LaminationSpec>> {
            if !x.has_odd_denominator() {
                return Err(Error::domain(format!("{x} has even denominator")));
            }
            if x.is_zero() {
                Ok(None)
            } else {
                LaminationSpec::new(x).map(Some)
            }
        };
        Ok(MatingSpec {
            p: p.clone(),
            q: q.clone(),
            p_lam: side(p)?,
            q_lam: side(q)?,
        })
    }

    pub fn p(&self) -> &Angle {
        &self.p
    }

    pub fn q(&self) -> &Angle {
        &self.q
    }

    pub fn lamination(&self, side: Side) -> Option<&LaminationSpec> {
        match side {
            Side::P => self.p_lam.as_ref(),
            Side::Q => self.q_lam.as_ref(),
        }
    }

    /// The mating with the roles of `p` and `q` exchanged.
    pub fn swapped(&self) -> MatingSpec {
        MatingSpec {
            p: self.q.clone(),
            q: self.p.clone(),
            p_lam: self.q_lam.clone(),
            q_lam: self.p_lam.clone(),
        }
    }

    /// Itinerary class of `x` on one side, in mating coordinates.
    pub fn side_class(&self, side: Side, x: &Angle, period_bound: u32) -> Result<Vec<Angle>> {
        match (side, self.lamination(side)) {
            (_, None) => Ok(vec![x.clone()]),
            (Side::P, Some(l)) => l.class_angles(x, period_bound),
            (Side::Q, Some(l)) => {
                let mut v: Vec<Angle> = l
                    .class_angles(&x.conjugate(), period_bound)?
                    .into_iter()
                    .map(|y| y.conjugate())
                    .collect();
                v.sort();
                Ok(v)
            }
        }
    }

    /// Boundary leaves of every side class in mating coordinates.
    pub fn side_leaf_in(&self, side: Side, l: &Leaf) -> Result<bool> {
        match (side, self.lamination(side)) {
            (_, None) => Ok(false),
            (Side::P, Some(s)) => s.leaf_in(l),
            (Side::Q, Some(s)) => s.leaf_in(&l.conjugate()),
        }
    }
}

/// Where to start a class computation.
#[derive(Clone, Debug)]
pub enum Seed {
    Angle(Angle),
    Leaf(Leaf),
}

impl From<Angle> for Seed {
    fn from(a: Angle) -> Self {
        Seed::Angle(a)
    }
}

impl From<Leaf> for Seed {
    fn from(l: Leaf) -> Self {
        Seed::Leaf(l)
    }
}

/// One class of the mating relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EquivClass {
    pub p_leaves: BTreeSet<Leaf>,
    pub q_leaves: BTreeSet<Leaf>,
    pub p_polygons: BTreeSet<Polygon>,
    pub q_polygons: BTreeSet<Polygon>,
    pub support: BTreeSet<Angle>,
    pub period: Option<u32>,
}

impl EquivClass {
    fn from_side_classes(groups: &BTreeSet<(Side, Vec<Angle>)>, support: BTreeSet<Angle>) -> Self {
        let mut c = EquivClass {
            p_leaves: BTreeSet::new(),
            q_leaves: BTreeSet::new(),
            p_polygons: BTreeSet::new(),
            q_polygons: BTreeSet::new(),
            period: crate::lamination::set_period(&support.iter().cloned().collect::<Vec<_>>()),
            support,
        };
        for (side, pts) in groups {
            let (leaves, polys) = match side {
                Side::P => (&mut c.p_leaves, &mut c.p_polygons),
                Side::Q => (&mut c.q_leaves, &mut c.q_polygons),
            };
            if pts.len() == 2 {
                leaves.insert(Leaf::new(pts[0].clone(), pts[1].clone()).expect("distinct"));
            } else if pts.len() >= 3 {
                let poly = Polygon::new(pts.clone());
                leaves.extend(poly.sides());
                polys.insert(poly);
            }
        }
        c
    }

    pub fn leaf_count(&self) -> (usize, usize) {
        (self.p_leaves.len(), self.q_leaves.len())
    }

    pub fn polygon_count(&self) -> usize {
        self.p_polygons.len() + self.q_polygons.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.support.len() <= 1
    }

    /// A single leaf, or a single polygon with nothing else attached.
    pub fn is_simple(&self) -> bool {
        let (lp, lq) = self.leaf_count();
        match self.polygon_count() {
            0 => lp + lq <= 1,
            1 => {
                let poly = self.p_polygons.iter().chain(&self.q_polygons).next().expect("one");
                let sides: BTreeSet<Leaf> = poly.sides().into_iter().collect();
                let leaves = if self.p_polygons.is_empty() { &self.q_leaves } else { &self.p_leaves };
                lp.min(lq) == 0 && leaves == &sides
            }
            _ => false,
        }
    }

    pub fn mixes_sides(&self) -> bool {
        let (lp, lq) = self.leaf_count();
        lp > 0 && lq > 0
    }

    /// Image of the class under doubling, as a set of angles.
    pub fn doubled_support(&self) -> BTreeSet<Angle> {
        self.support.iter().map(|x| x.double()).collect()
    }
}

/// Saturates `seed` under both laminations, capped at the default class size.
pub fn class_of(spec: &MatingSpec, seed: impl Into<Seed>, period_bound: u32) -> Result<EquivClass> {
    class_of_capped(spec, seed, period_bound, limits::DEFAULT_CLASS_CAP)
}

pub fn class_of_capped(
    spec: &MatingSpec,
    seed: impl Into<Seed>,
    period_bound: u32,
    cap: usize,
) -> Result<EquivClass> {
    let start: Vec<Angle> = match seed.into() {
        Seed::Angle(a) => vec![a],
        Seed::Leaf(l) => vec![l.lo().clone(), l.hi().clone()],
    };
    let mut support: BTreeSet<Angle> = BTreeSet::new();
    let mut queue: VecDeque<Angle> = VecDeque::new();
    for a in start {
        if support.insert(a.clone()) {
            queue.push_back(a);
        }
    }
    let mut groups: BTreeSet<(Side, Vec<Angle>)> = BTreeSet::new();
    while let Some(a) = queue.pop_front() {
        for side in [Side::P, Side::Q] {
            let cls = spec.side_class(side, &a, period_bound)?;
            if cls.len() < 2 {
                continue;
            }
            for m in &cls {
                if support.insert(m.clone()) {
                    if support.len() > cap {
                        return Err(Error::ClassOverflow {
                            size: support.len(),
                            cap,
                        });
                    }
                    queue.push_back(m.clone());
                }
            }
            groups.insert((side, cls));
        }
    }
    Ok(EquivClass::from_side_classes(&groups, support))
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Every nontrivial class whose members have exact period `d`, one per orbit
/// of classes, paired with the class period.
fn classes_of_exact_period(spec: &MatingSpec, d: u32) -> Result<Vec<(EquivClass, u32)>> {
    let den = (1u64 << d) - 1;
    let size = den.max(1) as usize;
    let mut uf = UnionFind::new(size);
    let mut groups: Vec<(Side, Vec<u32>)> = Vec::new();
    if let Some(l) = spec.lamination(Side::P) {
        let idx = l.index(d)?;
        for c in idx.nontrivial_classes() {
            for w in c.windows(2) {
                uf.union(w[0], w[1]);
            }
            groups.push((Side::P, c.to_vec()));
        }
    }
    if let Some(l) = spec.lamination(Side::Q) {
        let idx = l.index(d)?;
        for c in idx.nontrivial_classes() {
            let mut conj: Vec<u32> = c
                .iter()
                .map(|&j| if j == 0 { 0 } else { (den - j as u64) as u32 })
                .collect();
            conj.sort_unstable();
            for w in conj.windows(2) {
                uf.union(w[0], w[1]);
            }
            groups.push((Side::Q, conj));
        }
    }
    let mut comps: BTreeMap<u32, Vec<(Side, Vec<u32>)>> = BTreeMap::new();
    for (side, g) in groups {
        let r = uf.find(g[0]);
        comps.entry(r).or_default().push((side, g));
    }
    let rot = |j: u32| -> u32 {
        if d == 1 {
            0
        } else {
            (((j as u64) << 1 | (j as u64) >> (d - 1)) & den) as u32
        }
    };
    let mut out = Vec::new();
    for (root, gs) in &comps {
        // `root` is the least member: union always keeps the smaller root.
        let members: BTreeSet<u32> = gs.iter().flat_map(|(_, g)| g.iter().copied()).collect();
        let mut period = None;
        let mut img: BTreeSet<u32> = members.clone();
        let mut is_rep = true;
        for t in 1..=d {
            img = img.iter().map(|&j| rot(j)).collect();
            if img == members {
                period = Some(t);
                break;
            }
            if img.iter().next().is_some_and(|m| m < root) {
                is_rep = false;
            }
        }
        let Some(t) = period else {
            return Err(Error::consistency(format!(
                "class of {root}/{den} is not periodic under doubling"
            )));
        };
        if !is_rep {
            continue;
        }
        let to_angle = |j: u32| Periodic { num: j as u64, period: d }.to_angle();
        let side_groups: BTreeSet<(Side, Vec<Angle>)> = gs
            .iter()
            .map(|(s, g)| (*s, g.iter().map(|&j| to_angle(j)).collect()))
            .collect();
        let support: BTreeSet<Angle> = members.iter().map(|&j| to_angle(j)).collect();
        out.push((EquivClass::from_side_classes(&side_groups, support), t));
    }
    Ok(out)
}

/// Nontrivial periodic classes with members of period at most `period_bound`,
/// one representative per orbit of classes.
pub fn all_periodic_classes(spec: &MatingSpec, period_bound: u32) -> Result<Vec<EquivClass>> {
    limits::check_period("period", period_bound as u64)?;
    let mut out = Vec::new();
    for d in 1..=period_bound {
        out.extend(classes_of_exact_period(spec, d)?.into_iter().map(|(c, _)| c));
    }
    Ok(out)
}

/// Periodic classes mapped to themselves by `n` doublings, one per orbit.
pub fn periodic_classes(spec: &MatingSpec, n: u32, period_bound: u32) -> Result<Vec<EquivClass>> {
    if n == 0 {
        return Err(Error::domain("period must be at least 1"));
    }
    limits::check_period("period", period_bound as u64)?;
    let mut out = Vec::new();
    for d in 1..=period_bound {
        for (c, t) in classes_of_exact_period(spec, d)? {
            if n.is_multiple_of(t) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Gaps of one side joined through classes of the mating.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkedGaps {
    pub side: Side,
    /// Period of the cycle of Fatou gaps on this side.
    pub gap_period: u32,
    /// Number of gaps joined together in each cluster.
    pub cluster_size: u32,
    /// Period of the cycle of clusters.
    pub tuned_period: u32,
    /// Critical periods after collapsing clusters, `p` side first.
    pub critical_periods: [u32; 2],
    /// Classes doing the linking, one per orbit.
    pub witnesses: Vec<EquivClass>,
}

fn count_of(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

/// Finds classes that join distinct periodic Fatou gaps of one side through
/// leaves of the other side.
pub fn detect_linked_gaps(spec: &MatingSpec, period_bound: u32) -> Result<Vec<LinkedGaps>> {
    let classes = all_periodic_classes(spec, period_bound)?;
    let mut per_side: Vec<(Side, u32, u32, Vec<EquivClass>)> = Vec::new();
    for side in [Side::P, Side::Q] {
        let Some(lam) = spec.lamination(side) else {
            continue;
        };
        let k = lam.period() as usize;
        let mut uf = UnionFind::new(k);
        let mut witnesses = Vec::new();
        for c in &classes {
            let linked = linked_gaps_in_class(side, lam, c)?;
            if linked.len() >= 2 {
                for shift in 0..k {
                    for w in linked.windows(2) {
                        uf.union(((w[0] + shift) % k) as u32, ((w[1] + shift) % k) as u32);
                    }
                }
                witnesses.push(c.clone());
            }
        }
        if witnesses.is_empty() {
            continue;
        }
        let root = uf.find(0);
        let cluster = (0..k as u32).filter(|&g| uf.find(g) == root).count() as u32;
        per_side.push((side, k as u32, cluster, witnesses));
    }
    let cluster_of = |s: Side| {
        per_side
            .iter()
            .find(|(x, ..)| *x == s)
            .map(|(_, _, c, _)| *c)
            .unwrap_or(1)
    };
    let period_of = |s: Side| spec.lamination(s).map(|l| l.period()).unwrap_or(1);
    let critical = [
        period_of(Side::P) / cluster_of(Side::P),
        period_of(Side::Q) / cluster_of(Side::Q),
    ];
    Ok(per_side
        .into_iter()
        .map(|(side, k, cluster, witnesses)| LinkedGaps {
            side,
            gap_period: k,
            cluster_size: cluster,
            tuned_period: k / cluster,
            critical_periods: critical,
            witnesses,
        })
        .collect())
}

/// Gap indices of `side` joined by `class` through the other side; empty
/// unless two separate pieces of `side` touch distinct gaps.
fn linked_gaps_in_class(
    side: Side,
    lam: &LaminationSpec,
    class: &EquivClass,
) -> Result<Vec<usize>> {
    let pts: Vec<&Angle> = class.support.iter().collect();
    let pos = |x: &Angle| pts.binary_search(&x).expect("member");
    let mut uf = UnionFind::new(pts.len());
    let (leaves, polys) = match side {
        Side::P => (&class.p_leaves, &class.p_polygons),
        Side::Q => (&class.q_leaves, &class.q_polygons),
    };
    for l in leaves {
        uf.union(pos(l.lo()) as u32, pos(l.hi()) as u32);
    }
    for poly in polys {
        for w in poly.vertices.windows(2) {
            uf.union(pos(&w[0]) as u32, pos(&w[1]) as u32);
        }
    }
    let mut touched: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
    for (i, x) in pts.iter().enumerate() {
        let local = match side {
            Side::P => (*x).clone(),
            Side::Q => x.conjugate(),
        };
        let gaps = lam.fatou_gaps_touching(&local)?;
        if !gaps.is_empty() {
            touched
                .entry(uf.find(i as u32))
                .or_default()
                .extend(gaps);
        }
    }
    let all: BTreeSet<usize> = touched.values().flatten().copied().collect();
    if touched.len() >= 2 && all.len() >= 2 {
        Ok(all.into_iter().collect())
    } else {
        Ok(Vec::new())
    }
}

/// Machine-readable finding codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FindingCode {
    NotMateable,
    SharedOrbit,
    OversizedClass,
    TuningP,
    TuningQ,
    LinkedGaps,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub code: FindingCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<EquivClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuning: Option<Tuning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linked: Option<LinkedGaps>,
}

impl Finding {
    fn new(code: FindingCode, message: String) -> Self {
        Finding {
            code,
            message,
            class: None,
            tuning: None,
            linked: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HistogramEntry {
    pub p_leaves: usize,
    pub q_leaves: usize,
    pub polygons: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatingReport {
    pub p: Angle,
    pub q: Angle,
    pub period_bound: u32,
    pub mateable: bool,
    pub thm35_ok: bool,
    pub findings: Vec<Finding>,
    pub class_histogram: Vec<HistogramEntry>,
}

impl MatingReport {
    pub fn has(&self, code: FindingCode) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }
}

/// Forward orbits of the endpoints of `mu_p` and of the conjugated `mu_q`.
fn endpoint_orbit(lam: Option<&LaminationSpec>, conj: bool) -> BTreeSet<Angle> {
    let mut out = BTreeSet::new();
    if let Some(l) = lam {
        for leaf in l.minor_orbit() {
            for x in leaf.endpoints() {
                out.insert(if conj { x.conjugate() } else { x.clone() });
            }
        }
    }
    out
}

/// Checks the hypotheses of the disjoint-closure criterion up to `period_bound`.
pub fn check_theorem_3_5(spec: &MatingSpec, period_bound: u32) -> Result<MatingReport> {
    let mateable = qml::is_mateable(&spec.p, &spec.q)?;
    let mut findings = Vec::new();
    if !mateable {
        findings.push(Finding::new(
            FindingCode::NotMateable,
            format!("{} and {} lie in conjugate limbs", spec.p, spec.q),
        ));
    }

    let po = endpoint_orbit(spec.lamination(Side::P), false);
    let qo = endpoint_orbit(spec.lamination(Side::Q), true);
    let shared: Vec<String> = po.intersection(&qo).map(|x| x.to_string()).collect();
    if !shared.is_empty() {
        findings.push(Finding::new(
            FindingCode::SharedOrbit,
            format!("minor endpoint orbits share {}", shared.join(", ")),
        ));
    }

    let classes = all_periodic_classes(spec, period_bound)?;
    let mut histogram: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for c in &classes {
        let (lp, lq) = c.leaf_count();
        *histogram.entry((lp, lq, c.polygon_count())).or_default() += 1;
        if !c.is_simple() {
            let size = c.support.len();
            let mut f = Finding::new(
                FindingCode::OversizedClass,
                format!(
                    "class with {lp} p-leaves, {lq} q-leaves and {} on {size} points",
                    count_of(c.polygon_count(), "polygon")
                ),
            );
            f.class = Some(c.clone());
            findings.push(f);
        }
    }

    for (side, code) in [(Side::P, FindingCode::TuningP), (Side::Q, FindingCode::TuningQ)] {
        let x = if side == Side::P { &spec.p } else { &spec.q };
        if x.is_zero() {
            continue;
        }
        if let Some(t) = qml::is_tuning(x)? {
            let mut f = Finding::new(
                code,
                format!("{x} is a tuning of {} by period {}", t.root.leaf, t.inner_period),
            );
            f.tuning = Some(t);
            findings.push(f);
        }
    }

    for lg in detect_linked_gaps(spec, period_bound)? {
        let other = if lg.side == Side::P { "q" } else { "p" };
        let mut f = Finding::new(
            FindingCode::LinkedGaps,
            format!(
                "{other}-side leaves link the period-{} gap orbit of the {}-side in clusters of {}: period {} tuning, critical periods {} and {}",
                lg.gap_period,
                if lg.side == Side::P { "p" } else { "q" },
                lg.cluster_size,
                lg.cluster_size,
                lg.critical_periods[0],
                lg.critical_periods[1]
            ),
        );
        f.linked = Some(lg);
        findings.push(f);
    }

    let thm35_ok = mateable && findings.is_empty();
    Ok(MatingReport {
        p: spec.p.clone(),
        q: spec.q.clone(),
        period_bound,
        mateable,
        thm35_ok,
        findings,
        class_histogram: histogram
            .into_iter()
            .map(|((p_leaves, q_leaves, polygons), count)| HistogramEntry {
                p_leaves,
                q_leaves,
                polygons,
                count,
            })
            .collect(),
    })
}
