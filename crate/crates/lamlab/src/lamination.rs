//! Invariant laminations `L_p` of periodic angles.
//!
//! Membership is decided by itineraries. The two majors `M` and `M' = M + 1/2`
//! cut the circle into four pieces: the closed arc behind `M` and the one
//! behind `M'` (corners included), and the two open critical arcs between
//! them. Two angles lie on the boundary of a common leaf or polygon exactly
//! when their itineraries through these pieces agree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc as Shared, OnceLock};

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{lcm, Angle, Arc, Leaf};
use crate::error::{Error, Result};
use crate::limits;
use crate::qml::{self, Periodic};

/// One of the four pieces of the circle cut out by the two majors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Piece {
    /// Closed arc behind the major on the minor's side.
    A,
    /// Closed arc behind the other major.
    B,
    /// Open critical arc following `A` counterclockwise.
    C0,
    /// Open critical arc following `B` counterclockwise.
    C1,
}

impl Piece {
    fn code(self) -> u8 {
        match self {
            Piece::A => 0,
            Piece::B => 1,
            Piece::C0 => 2,
            Piece::C1 => 3,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Piece::A => 'A',
            Piece::B => 'B',
            Piece::C0 => '0',
            Piece::C1 => '1',
        }
    }

    pub fn is_critical(self) -> bool {
        matches!(self, Piece::C0 | Piece::C1)
    }
}

/// An eventually periodic word of pieces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ItineraryWord {
    pub symbols: Vec<Piece>,
    pub preperiod: usize,
    pub period: usize,
}

impl ItineraryWord {
    /// Symbol at position `i` of the infinite word. Needs `symbols` to cover
    /// at least one full preperiod and period.
    pub fn at(&self, i: usize) -> Piece {
        if i < self.symbols.len() {
            return self.symbols[i];
        }
        let j = self.preperiod + (i - self.preperiod) % self.period;
        self.symbols[j]
    }
}

impl fmt::Display for ItineraryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i == self.preperiod && self.preperiod > 0 {
                f.write_str("|")?;
            }
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Partition {
    cuts: [Angle; 4],
    cut_parts: Option<[(u64, u64); 4]>,
    arcs: [Piece; 4],
    corners: [Piece; 4],
}

impl Partition {
    fn new(major: &Leaf, co_major: &Leaf, minor: &Leaf) -> Result<Self> {
        let mut pts: Vec<(Angle, bool)> = vec![
            (major.lo().clone(), true),
            (major.hi().clone(), true),
            (co_major.lo().clone(), false),
            (co_major.hi().clone(), false),
        ];
        pts.sort();
        let side_of = |is_major: bool| -> Option<usize> {
            (0..4).find(|&i| pts[i].1 == is_major && pts[(i + 1) % 4].1 == is_major)
        };
        let major_arc = side_of(true).ok_or_else(|| Error::consistency("majors interleave"))?;
        let co_arc = side_of(false).ok_or_else(|| Error::consistency("majors interleave"))?;

        let in_closed = |arc: usize, x: &Angle| {
            Arc::closed(pts[arc].0.clone(), pts[(arc + 1) % 4].0.clone())
                .map(|a| a.contains(x))
                .unwrap_or(false)
        };
        let minor_on = |arc: usize| in_closed(arc, minor.lo()) && in_closed(arc, minor.hi());
        let (a_arc, b_arc) = if minor_on(major_arc) {
            (major_arc, co_arc)
        } else if minor_on(co_arc) {
            (co_arc, major_arc)
        } else {
            return Err(Error::consistency(format!(
                "minor {minor} lies behind neither major"
            )));
        };

        let mut arcs = [Piece::A; 4];
        arcs[a_arc] = Piece::A;
        arcs[b_arc] = Piece::B;
        arcs[(a_arc + 1) % 4] = Piece::C0;
        arcs[(b_arc + 1) % 4] = Piece::C1;
        let mut corners = [Piece::A; 4];
        for (i, c) in corners.iter_mut().enumerate() {
            let owner = if pts[i].1 { major_arc } else { co_arc };
            *c = arcs[owner];
        }
        let cuts = [
            pts[0].0.clone(),
            pts[1].0.clone(),
            pts[2].0.clone(),
            pts[3].0.clone(),
        ];
        let parts: Option<Vec<(u64, u64)>> = cuts.iter().map(|c| c.to_u64_parts()).collect();
        let cut_parts = parts.map(|v| [v[0], v[1], v[2], v[3]]);
        Ok(Partition {
            cuts,
            cut_parts,
            arcs,
            corners,
        })
    }

    fn piece(&self, x: &Angle) -> Piece {
        if let (Some(cp), Some((n, d))) = (self.cut_parts, x.to_u64_parts()) {
            return self.piece_fast(&cp, n, d);
        }
        for i in 0..4 {
            if x == &self.cuts[i] {
                return self.corners[i];
            }
        }
        let below = self.cuts.iter().filter(|c| *c < x).count();
        self.arc_after(below)
    }

    fn piece_fast(&self, cp: &[(u64, u64); 4], n: u64, d: u64) -> Piece {
        let mut below = 0;
        for (i, &(c, e)) in cp.iter().enumerate() {
            let l = n as u128 * e as u128;
            let r = c as u128 * d as u128;
            if l == r {
                return self.corners[i];
            }
            if l > r {
                below += 1;
            }
        }
        self.arc_after(below)
    }

    fn arc_after(&self, below: usize) -> Piece {
        if below == 0 || below == 4 {
            self.arcs[3]
        } else {
            self.arcs[below - 1]
        }
    }

    fn is_corner(&self, x: &Angle) -> bool {
        self.cuts.contains(x)
    }

    /// Integer keys locating the cuts among `j / den`: `2j` equals a key on a
    /// cut, lies strictly between keys otherwise.
    fn keys_for(&self, den: u64) -> [u64; 4] {
        let mut keys = [0u64; 4];
        for (i, c) in self.cuts.iter().enumerate() {
            let num = c.numer() * BigUint::from(den);
            let q = &num / c.denom();
            let exact = (&q * c.denom()) == num;
            let q = q.to_u64().expect("cut below 1");
            keys[i] = 2 * q + u64::from(!exact);
        }
        keys
    }
}

/// Angles of one exact period grouped by itinerary.
pub(crate) struct PeriodIndex {
    period: u32,
    words: Vec<u64>,
    order: Vec<u32>,
}

impl PeriodIndex {
    fn build(part: &Partition, n: u32) -> Self {
        let den = (1u64 << n) - 1;
        let keys = part.keys_for(den);
        let corners = part.corners;
        let arcs = part.arcs;
        let piece_of = |j: u64| -> u8 {
            let p = 2 * j;
            let mut below = 0;
            for i in 0..4 {
                if p == keys[i] {
                    return corners[i].code();
                }
                if p > keys[i] {
                    below += 1;
                }
            }
            let a = if below == 0 || below == 4 {
                arcs[3]
            } else {
                arcs[below - 1]
            };
            a.code()
        };
        let size = den.max(1) as usize;
        let pieces: Vec<u8> = (0..size as u64).into_par_iter().map(piece_of).collect();
        let rot = |j: u64| -> u64 {
            if n == 1 {
                0
            } else {
                ((j << 1) | (j >> (n - 1))) & den
            }
        };
        let words: Vec<u64> = (0..size as u64)
            .into_par_iter()
            .map(|j| {
                let mut w = 0u64;
                let mut x = j;
                for i in 0..n {
                    w |= (pieces[x as usize] as u64) << (2 * i);
                    x = rot(x);
                }
                w
            })
            .collect();
        let mut order: Vec<u32> = qml::exact_period_nums(n)
            .into_iter()
            .map(|j| j as u32)
            .collect();
        order.par_sort_unstable_by_key(|&j| (words[j as usize], j));
        PeriodIndex {
            period: n,
            words,
            order,
        }
    }

    fn den(&self) -> u64 {
        (1u64 << self.period) - 1
    }

    /// Numerators sharing the itinerary of `j`, ascending.
    pub fn class_of(&self, j: u64) -> &[u32] {
        let w = self.words[j as usize];
        let lo = self
            .order
            .partition_point(|&k| self.words[k as usize] < w);
        let hi = self
            .order
            .partition_point(|&k| self.words[k as usize] <= w);
        &self.order[lo..hi]
    }

    /// All itinerary classes with at least two members.
    pub fn nontrivial_classes(&self) -> Vec<&[u32]> {
        self.order
            .chunk_by(|&a, &b| self.words[a as usize] == self.words[b as usize])
            .filter(|c| c.len() >= 2)
            .collect()
    }

    fn angle(&self, j: u32) -> Angle {
        Angle::frac(j as u64, self.den())
    }
}

struct ClassCache {
    indices: Vec<OnceLock<Shared<PeriodIndex>>>,
}

/// The data determining `L_p`: the minor, its orbit and the majors.
#[derive(Clone)]
pub struct LaminationSpec {
    p: Angle,
    minor: Leaf,
    major: Leaf,
    co_major: Leaf,
    orbit: Vec<Leaf>,
    period: u32,
    part: Partition,
    cache: Shared<ClassCache>,
}

impl fmt::Debug for LaminationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaminationSpec")
            .field("p", &self.p)
            .field("minor", &self.minor)
            .field("major", &self.major)
            .finish()
    }
}

impl LaminationSpec {
    pub fn new(p: &Angle) -> Result<Self> {
        let minor = qml::minor_of(p)?.leaf;
        let period = p.period() as u32;
        let mut orbit = vec![minor.clone()];
        loop {
            let last = orbit.last().expect("nonempty");
            let next = last
                .double()
                .ok_or_else(|| Error::consistency(format!("orbit leaf {last} is a diameter")))?;
            if next == minor {
                break;
            }
            if orbit.len() > period as usize {
                return Err(Error::consistency("minor orbit does not close"));
            }
            orbit.push(next);
        }
        let major = orbit.last().expect("nonempty").clone();
        let expected = major_length(&minor);
        if major.length() != expected {
            return Err(Error::consistency(format!(
                "periodic major {major} has the wrong length"
            )));
        }
        let co_major = major.add_half();
        let part = Partition::new(&major, &co_major, &minor)?;
        let cache = ClassCache {
            indices: (0..=limits::HARD_MAX_PERIOD).map(|_| OnceLock::new()).collect(),
        };
        Ok(LaminationSpec {
            p: p.clone(),
            minor,
            major,
            co_major,
            orbit,
            period,
            part,
            cache: Shared::new(cache),
        })
    }

    pub fn p(&self) -> &Angle {
        &self.p
    }

    pub fn minor(&self) -> &Leaf {
        &self.minor
    }

    /// The major in the minor's forward orbit.
    pub fn major(&self) -> &Leaf {
        &self.major
    }

    /// The major `M + 1/2`.
    pub fn co_major(&self) -> &Leaf {
        &self.co_major
    }

    /// Forward orbit of the minor, starting at the minor.
    pub fn minor_orbit(&self) -> &[Leaf] {
        &self.orbit
    }

    /// Exact period of `p`.
    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn piece(&self, x: &Angle) -> Piece {
        self.part.piece(x)
    }

    pub fn is_corner(&self, x: &Angle) -> bool {
        self.part.is_corner(x)
    }

    pub(crate) fn index(&self, n: u32) -> Result<Shared<PeriodIndex>> {
        if n == 0 {
            return Err(Error::domain("period must be at least 1"));
        }
        limits::check_period("period", n as u64)?;
        Ok(self.cache.indices[n as usize]
            .get_or_init(|| Shared::new(PeriodIndex::build(&self.part, n)))
            .clone())
    }

    /// First `len` symbols of the itinerary of `x`.
    pub fn itinerary(&self, x: &Angle, len: usize) -> ItineraryWord {
        let (preperiod, period) = x.period_under_doubling();
        let mut symbols = Vec::with_capacity(len);
        let mut y = x.clone();
        for _ in 0..len {
            symbols.push(self.piece(&y));
            y = y.double();
        }
        ItineraryWord {
            symbols,
            preperiod,
            period,
        }
    }

    /// Preperiodic part and one period of the itinerary of `x`.
    pub fn full_itinerary(&self, x: &Angle) -> ItineraryWord {
        let (s, n) = x.period_under_doubling();
        self.itinerary(x, s + n)
    }

    /// True iff `x` and `y` have equal infinite itineraries.
    pub fn same_class(&self, x: &Angle, y: &Angle) -> bool {
        if x == y {
            return true;
        }
        let wx = self.full_itinerary(x);
        let wy = self.full_itinerary(y);
        let len = wx.preperiod.max(wy.preperiod) + lcm(wx.period, wy.period);
        (0..len).all(|i| wx.at(i) == wy.at(i))
    }

    /// Every angle sharing the itinerary of `x`, ascending.
    pub fn class_angles(&self, x: &Angle, period_bound: u32) -> Result<Vec<Angle>> {
        let (s, n) = x.period_under_doubling();
        if n as u64 > period_bound as u64 {
            return Err(Error::domain(format!(
                "period bound {period_bound} is below the period {n} of {x}"
            )));
        }
        limits::check_period("period", n as u64)?;
        let base = x.double_n(s as u32);
        let idx = self.index(n as u32)?;
        let j = Periodic::from_angle(&base, n as u32)
            .ok_or_else(|| Error::domain(format!("{x} outside kernel range")))?
            .num;
        let mut class: Vec<Angle> = idx.class_of(j).iter().map(|&k| idx.angle(k)).collect();
        if class.is_empty() {
            class.push(base);
        }
        for t in (0..s).rev() {
            let target = self.piece(&x.double_n(t as u32));
            let mut next = Vec::with_capacity(class.len());
            for z in &class {
                let (u, v) = z.preimages();
                for y in [u, v] {
                    if self.piece(&y) == target {
                        next.push(y);
                    }
                }
            }
            next.sort();
            class = next;
        }
        Ok(class)
    }

    /// Leaf membership: equal itineraries and adjacency within the class.
    pub fn leaf_in(&self, l: &Leaf) -> Result<bool> {
        let (a, b) = (l.lo(), l.hi());
        if !self.same_class(a, b) {
            return Ok(false);
        }
        let n = a.period().max(b.period());
        let class = self.class_angles(a, n as u32)?;
        if class.len() == 2 {
            return Ok(true);
        }
        let ia = class.iter().position(|x| x == a);
        let ib = class.iter().position(|x| x == b);
        match (ia, ib) {
            (Some(i), Some(j)) => {
                let d = i.abs_diff(j);
                Ok(d == 1 || d == class.len() - 1)
            }
            _ => Err(Error::consistency(format!(
                "class of {a} misses a member of {l}"
            ))),
        }
    }

    /// The two pullbacks of `l`: the pairing of the four preimages whose
    /// chords each stay inside one piece.
    pub fn pullback(&self, l: &Leaf) -> Result<[Leaf; 2]> {
        let (a1, a2) = l.lo().preimages();
        let (b1, b2) = l.hi().preimages();
        let pairings = [
            [(a1.clone(), b1.clone()), (a2.clone(), b2.clone())],
            [(a1, b2), (a2, b1)],
        ];
        let mut chosen = Vec::new();
        for pair in pairings {
            let ok = pair
                .iter()
                .all(|(x, y)| self.piece(x) == self.piece(y));
            if ok {
                chosen.push(pair);
            }
        }
        if chosen.len() != 1 {
            return Err(Error::consistency(format!(
                "{} admissible pullback pairings for {l}",
                chosen.len()
            )));
        }
        let [(x1, y1), (x2, y2)] = chosen.pop().expect("one");
        let c1 = Leaf::new(x1, y1)?;
        let c2 = Leaf::new(x2, y2)?;
        for c in [&c1, &c2] {
            if c.crosses(&self.major) || c.crosses(&self.co_major) {
                return Err(Error::consistency(format!("pullback {c} crosses a major")));
            }
        }
        if c1.crosses(&c2) {
            return Err(Error::consistency(format!("pullbacks {c1} and {c2} cross")));
        }
        Ok([c1, c2])
    }

    /// Leaves whose endpoints have period dividing `n`, grouped into orbits.
    pub fn periodic_leaves(&self, n: u32) -> Result<Vec<Vec<Leaf>>> {
        if n == 0 {
            return Err(Error::domain("period must be at least 1"));
        }
        limits::check_period("period", n as u64)?;
        let mut all = BTreeSet::new();
        for d in qml::divisors(n) {
            all.extend(self.leaves_of_exact_period(d)?);
        }
        group_orbits(all)
    }

    fn leaves_of_exact_period(&self, d: u32) -> Result<Vec<Leaf>> {
        let idx = self.index(d)?;
        let mut out = Vec::new();
        for c in idx.nontrivial_classes() {
            let pts: Vec<Angle> = c.iter().map(|&j| idx.angle(j)).collect();
            out.extend(boundary_leaves(&pts));
        }
        Ok(out)
    }

    /// Polygons among itinerary classes of period at most `bound`.
    pub fn polygons(&self, bound: u32) -> Result<BTreeSet<Polygon>> {
        limits::check_period("period", bound as u64)?;
        let mut out = BTreeSet::new();
        for d in 1..=bound {
            let idx = self.index(d)?;
            for c in idx.nontrivial_classes() {
                if c.len() >= 3 {
                    let v: Vec<Angle> = c.iter().map(|&j| idx.angle(j)).collect();
                    out.insert(Polygon::new(v));
                }
            }
        }
        Ok(out)
    }

    /// True iff no periodic leaf of period at most `max_period` has an endpoint in `arc`.
    pub fn arc_clear_of_periodic_leaves(&self, arc: &Arc, max_period: u32) -> Result<bool> {
        limits::check_period("period", max_period as u64)?;
        for d in 1..=max_period {
            let idx = self.index(d)?;
            for c in idx.nontrivial_classes() {
                if c.iter().any(|&j| arc.contains(&idx.angle(j))) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Indices of the periodic Fatou gaps whose boundary contains `x`.
    ///
    /// Gap 1 lies behind the minor, gap `i + 1` is the image of gap `i`, and
    /// gap 0 is the critical gap between the two majors.
    pub fn fatou_gaps_touching(&self, x: &Angle) -> Result<Vec<usize>> {
        let k = self.period as usize;
        let regions = self.gap_regions()?;
        let (s, n) = x.period_under_doubling();
        let steps = s + lcm(n, k);
        let mut orbit = Vec::with_capacity(steps);
        let mut y = x.clone();
        for _ in 0..steps {
            orbit.push((self.piece(&y), self.is_corner(&y)));
            y = y.double();
        }
        Ok((0..k)
            .filter(|&g| {
                orbit.iter().enumerate().all(|(t, &(piece, corner))| {
                    match regions[(g + t) % k] {
                        None => piece.is_critical() || corner,
                        Some(side) => piece == side,
                    }
                })
            })
            .collect())
    }

    /// Piece holding each periodic Fatou gap; `None` for the critical gap.
    fn gap_regions(&self) -> Result<Vec<Option<Piece>>> {
        let k = self.period as usize;
        let mut regions = vec![None; k];
        let mut y = self.p.clone();
        for region in regions.iter_mut().skip(1) {
            let piece = self.piece(&y);
            if piece.is_critical() {
                return Err(Error::consistency(format!(
                    "minor orbit point {y} lies in a critical arc"
                )));
            }
            *region = Some(piece);
            y = y.double();
        }
        Ok(regions)
    }
}

fn major_length(minor: &Leaf) -> Ratio<BigUint> {
    let half = Ratio::new(BigUint::one(), BigUint::from(2u8));
    &half - minor.length() * &half
}

/// Sides of the convex hull of a class: the leaf itself for two points.
fn boundary_leaves(pts: &[Angle]) -> Vec<Leaf> {
    match pts.len() {
        0 | 1 => Vec::new(),
        2 => vec![Leaf::new(pts[0].clone(), pts[1].clone()).expect("distinct")],
        m => (0..m)
            .map(|i| Leaf::new(pts[i].clone(), pts[(i + 1) % m].clone()).expect("distinct"))
            .collect(),
    }
}

fn group_orbits(mut all: BTreeSet<Leaf>) -> Result<Vec<Vec<Leaf>>> {
    let mut out = Vec::new();
    while let Some(first) = all.pop_first() {
        let mut orbit = vec![first.clone()];
        let mut cur = first.clone();
        loop {
            let next = cur
                .double()
                .ok_or_else(|| Error::consistency(format!("periodic leaf {cur} is a diameter")))?;
            if next == first {
                break;
            }
            if !all.remove(&next) {
                return Err(Error::consistency(format!(
                    "image {next} of periodic leaf {cur} is missing"
                )));
            }
            orbit.push(next.clone());
            cur = next;
        }
        out.push(orbit);
    }
    Ok(out)
}

/// The longer preimage leaf of a minor; the one in the minor's forward orbit
/// when there is one, otherwise the smaller of the two.
pub fn major_of(minor: &Leaf) -> Result<Leaf> {
    let half = Ratio::new(BigUint::one(), BigUint::from(2u8));
    if minor.length() == half {
        return Err(Error::domain(format!("{minor} is a diameter")));
    }
    let (a1, a2) = minor.lo().preimages();
    let (b1, b2) = minor.hi().preimages();
    let first = Leaf::new(a1.clone(), b1.clone())?;
    let (m1, m2) = if first.length() * BigUint::from(2u8) > half {
        (first, Leaf::new(a2, b2)?)
    } else {
        (Leaf::new(a1, b2)?, Leaf::new(a2, b1)?)
    };
    if minor.lo().is_periodic() && minor.hi().is_periodic() {
        let n = lcm(minor.lo().period(), minor.hi().period());
        let mut cur = minor.clone();
        for _ in 0..n {
            if cur == m1 || cur == m2 {
                return Ok(cur);
            }
            match cur.double() {
                Some(next) => cur = next,
                None => break,
            }
        }
    }
    Ok(m1.min(m2))
}

/// A finite-sided gap, vertices in counterclockwise order from the smallest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Polygon {
    pub vertices: Vec<Angle>,
    pub period: Option<u32>,
}

impl Polygon {
    pub fn new(mut vertices: Vec<Angle>) -> Self {
        vertices.sort();
        vertices.dedup();
        let period = vertex_period(&vertices);
        Polygon { vertices, period }
    }

    pub fn sides(&self) -> Vec<Leaf> {
        boundary_leaves(&self.vertices)
    }
}

/// Common period of the vertices, when every vertex is periodic.
fn vertex_period(v: &[Angle]) -> Option<u32> {
    if v.is_empty() || !v.iter().all(|x| x.is_periodic()) {
        return None;
    }
    Some(v.iter().map(|x| x.period()).fold(1, lcm) as u32)
}

/// Least `t` with `2^t V = V`, when every vertex is periodic.
pub(crate) fn set_period(v: &[Angle]) -> Option<u32> {
    if v.is_empty() || !v.iter().all(|x| x.is_periodic()) {
        return None;
    }
    let bound = v.iter().map(|x| x.period()).fold(1, lcm);
    let target: BTreeSet<&Angle> = v.iter().collect();
    let mut cur: Vec<Angle> = v.to_vec();
    for t in 1..=bound {
        cur = cur.iter().map(|x| x.double()).collect();
        if cur.len() == target.len() && cur.iter().all(|x| target.contains(x)) {
            let distinct: BTreeSet<&Angle> = cur.iter().collect();
            if distinct.len() == target.len() {
                return Some(t as u32);
            }
        }
    }
    None
}

/// A finite approximation of `L_p`.
#[derive(Clone, Debug)]
pub struct LaminationApprox {
    pub spec: LaminationSpec,
    pub depth: u32,
    pub leaves: BTreeSet<Leaf>,
    pub polygons: BTreeSet<Polygon>,
}

impl LaminationApprox {
    /// Minor orbit and its pullbacks up to `depth` halvings.
    pub fn build(spec: &LaminationSpec, depth: u32) -> Result<Self> {
        Self::from_seeds(spec, depth, spec.minor_orbit().to_vec())
    }

    /// As [`LaminationApprox::build`], also seeding every periodic leaf of
    /// period at most `period_bound`.
    pub fn build_with_periodic(spec: &LaminationSpec, depth: u32, period_bound: u32) -> Result<Self> {
        limits::check_period("period", period_bound as u64)?;
        let mut seeds = spec.minor_orbit().to_vec();
        for d in 1..=period_bound {
            seeds.extend(spec.leaves_of_exact_period(d)?);
        }
        Self::from_seeds(spec, depth, seeds)
    }

    fn from_seeds(spec: &LaminationSpec, depth: u32, seeds: Vec<Leaf>) -> Result<Self> {
        limits::check_depth(depth as u64)?;
        let mut leaves: BTreeSet<Leaf> = BTreeSet::new();
        let mut frontier = Vec::new();
        for s in seeds {
            if leaves.insert(s.clone()) {
                frontier.push(s);
            }
        }
        for _ in 0..depth {
            let children: Vec<Result<[Leaf; 2]>> =
                frontier.par_iter().map(|l| spec.pullback(l)).collect();
            let mut next = Vec::new();
            for pair in children {
                for c in pair? {
                    if leaves.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            frontier = next;
        }
        let polygons = polygons_from_leaves(&leaves);
        Ok(LaminationApprox {
            spec: spec.clone(),
            depth,
            leaves,
            polygons,
        })
    }

    pub fn report(&self) -> LaminationReport {
        LaminationReport {
            p: self.spec.p().clone(),
            minor: self.spec.minor().clone(),
            major: self.spec.major().clone(),
            depth: self.depth,
            leaves: self.leaves.iter().cloned().collect(),
            polygons: self.polygons.iter().cloned().collect(),
        }
    }
}

/// Closed cycles of leaves joined at shared endpoints.
pub fn polygons_from_leaves(leaves: &BTreeSet<Leaf>) -> BTreeSet<Polygon> {
    let mut adj: BTreeMap<&Angle, Vec<&Angle>> = BTreeMap::new();
    for l in leaves {
        adj.entry(l.lo()).or_default().push(l.hi());
        adj.entry(l.hi()).or_default().push(l.lo());
    }
    let mut seen: HashMap<&Angle, ()> = HashMap::new();
    let mut out = BTreeSet::new();
    for &start in adj.keys() {
        if seen.contains_key(start) {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start, ());
        let mut i = 0;
        while i < comp.len() {
            for &nb in &adj[comp[i]] {
                if !seen.contains_key(nb) {
                    seen.insert(nb, ());
                    comp.push(nb);
                }
            }
            i += 1;
        }
        if comp.len() < 3 || !comp.iter().all(|v| adj[v].len() == 2) {
            continue;
        }
        let poly = Polygon::new(comp.into_iter().cloned().collect());
        let sides_present = poly.sides().iter().all(|s| leaves.contains(s));
        if sides_present {
            out.insert(poly);
        }
    }
    out
}

/// JSON form of an approximation.
#[derive(Clone, Debug, Serialize)]
pub struct LaminationReport {
    pub p: Angle,
    pub minor: Leaf,
    pub major: Leaf,
    pub depth: u32,
    pub leaves: Vec<Leaf>,
    pub polygons: Vec<Polygon>,
}

impl LaminationReport {
    /// Adds polygons found from itinerary classes.
    pub fn with_polygons(mut self, extra: impl IntoIterator<Item = Polygon>) -> Self {
        let mut all: BTreeSet<Polygon> = self.polygons.into_iter().collect();
        all.extend(extra);
        self.polygons = all.into_iter().collect();
        self
    }
}
