//! Minor leaves: Lavaurs pairing of periodic angles, the order on minors,
//! combinatorial limbs, mateability and the tuning test.

use std::cmp::Ordering;
use std::sync::{Arc, RwLock};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{Angle, Leaf};
use crate::error::{Error, Result};
use crate::limits;

/// Largest period representable by the `u64` kernels below.
pub(crate) const KERNEL_MAX_PERIOD: u32 = 62;

/// A periodic angle `num / (2^period - 1)`, not necessarily reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Periodic {
    pub num: u64,
    pub period: u32,
}

impl Periodic {
    pub fn den(&self) -> u64 {
        (1u64 << self.period) - 1
    }

    pub fn cmp_value(&self, other: &Periodic) -> Ordering {
        let l = self.num as u128 * other.den() as u128;
        let r = other.num as u128 * self.den() as u128;
        l.cmp(&r)
    }

    pub fn to_angle(self) -> Angle {
        Angle::frac(self.num, self.den())
    }

    /// Rewrites an odd-denominator angle over `2^period - 1`.
    pub fn from_angle(x: &Angle, period: u32) -> Option<Periodic> {
        if period == 0 || period > KERNEL_MAX_PERIOD {
            return None;
        }
        let d = (1u64 << period) - 1;
        let den = x.denom().to_u64()?;
        if !d.is_multiple_of(den) {
            return None;
        }
        let num = x.numer().to_u64()? * (d / den);
        Some(Periodic { num, period })
    }
}

pub(crate) fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// True iff `j / (2^n - 1)` has exact period `n`.
pub(crate) fn has_exact_period(j: u64, n: u32) -> bool {
    if n == 1 {
        return j == 0;
    }
    let big = (1u64 << n) - 1;
    if j == 0 || j >= big {
        return false;
    }
    divisors(n)
        .into_iter()
        .filter(|&d| d < n)
        .all(|d| !j.is_multiple_of(big / ((1u64 << d) - 1)))
}

/// Numerators `j` with `j / (2^n - 1)` of exact period `n`, ascending.
pub(crate) fn exact_period_nums(n: u32) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    let big = (1u64 << n) - 1;
    (1..big)
        .into_par_iter()
        .filter(|&j| has_exact_period(j, n))
        .collect()
}

/// All angles of exact period `n` under doubling, ascending.
pub fn exact_period_angles(n: u32) -> Result<Vec<Angle>> {
    if n == 0 {
        return Err(Error::domain("period must be at least 1"));
    }
    limits::check_period("period", n as u64)?;
    Ok(exact_period_nums(n)
        .into_iter()
        .map(|j| Periodic { num: j, period: n }.to_angle())
        .collect())
}

/// A minor leaf of the quadratic minor lamination.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MinorLeaf {
    pub leaf: Leaf,
    pub period: u32,
    #[serde(rename = "minimal")]
    pub is_minimal: bool,
}

/// The Lavaurs pairing of every periodic angle of period `2..=max_period`.
pub(crate) struct LavaursTable {
    max_period: u32,
    // partner[k][j]: numerator of the companion of j/(2^k - 1), u32::MAX if j is not of exact period k
    partner: Vec<Vec<u32>>,
    // minimal[k][j]: set on the smaller endpoint of a minimal minor
    minimal: Vec<Vec<bool>>,
}

impl LavaursTable {
    fn build(max_period: u32) -> Result<Self> {
        let mut all: Vec<Periodic> = (2..=max_period)
            .flat_map(|k| {
                exact_period_nums(k)
                    .into_iter()
                    .map(move |num| Periodic { num, period: k })
            })
            .collect();
        all.par_sort_unstable_by(|a, b| a.cmp_value(b));

        let mut partner: Vec<Vec<u32>> = (0..=max_period)
            .map(|k| {
                if k < 2 {
                    Vec::new()
                } else {
                    vec![u32::MAX; (1usize << k) - 1]
                }
            })
            .collect();

        for k in 2..=max_period {
            // Chords of lower period act as brackets; each bracket level holds
            // at most one period-k angle waiting for its companion.
            let mut pending: Vec<Option<u64>> = vec![None];
            for e in all.iter().filter(|e| e.period <= k) {
                if e.period < k {
                    let other = Periodic {
                        num: partner[e.period as usize][e.num as usize] as u64,
                        period: e.period,
                    };
                    if e.cmp_value(&other) == Ordering::Less {
                        pending.push(None);
                    } else {
                        let top = pending.pop().expect("balanced brackets");
                        if let Some(j) = top {
                            return Err(Error::consistency(format!(
                                "unpaired angle {j}/{} at period {k}",
                                (1u64 << k) - 1
                            )));
                        }
                    }
                } else {
                    let top = pending.last_mut().expect("outer level");
                    match top.take() {
                        Some(j) => {
                            partner[k as usize][j as usize] = e.num as u32;
                            partner[k as usize][e.num as usize] = j as u32;
                        }
                        None => *top = Some(e.num),
                    }
                }
            }
            if pending.len() != 1 || pending[0].is_some() {
                return Err(Error::consistency(format!(
                    "Lavaurs pairing left an angle unpaired at period {k}"
                )));
            }
        }

        let mut minimal: Vec<Vec<bool>> = partner.iter().map(|v| vec![false; v.len()]).collect();
        let mut depth = 0usize;
        for e in &all {
            let other = Periodic {
                num: partner[e.period as usize][e.num as usize] as u64,
                period: e.period,
            };
            if e.cmp_value(&other) == Ordering::Less {
                if depth == 0 {
                    minimal[e.period as usize][e.num as usize] = true;
                }
                depth += 1;
            } else {
                depth -= 1;
            }
        }

        Ok(LavaursTable {
            max_period,
            partner,
            minimal,
        })
    }

    pub fn companion(&self, x: Periodic) -> Periodic {
        let j = self.partner[x.period as usize][x.num as usize];
        debug_assert!(j != u32::MAX);
        Periodic {
            num: j as u64,
            period: x.period,
        }
    }

    /// Minors of exact period `k` as `(lo, hi)` numerators, ascending.
    pub fn chords(&self, k: u32) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.partner[k as usize]
            .iter()
            .enumerate()
            .filter(|(j, &p)| p != u32::MAX && (*j as u64) < p as u64)
            .map(|(j, &p)| (j as u64, p as u64))
    }

    pub fn is_minimal(&self, k: u32, lo: u64) -> bool {
        self.minimal[k as usize][lo as usize]
    }

    fn minor(&self, k: u32, lo: u64, hi: u64) -> MinorLeaf {
        let den = (1u64 << k) - 1;
        MinorLeaf {
            leaf: Leaf::new(Angle::frac(lo, den), Angle::frac(hi, den)).expect("distinct"),
            period: k,
            is_minimal: self.is_minimal(k, lo),
        }
    }
}

static TABLE: RwLock<Option<Arc<LavaursTable>>> = RwLock::new(None);

/// Shared pairing table covering at least period `n`; built once per size.
pub(crate) fn table(n: u32) -> Result<Arc<LavaursTable>> {
    limits::check_period("period", n as u64)?;
    if let Some(t) = TABLE.read().expect("table lock").as_ref() {
        if t.max_period >= n {
            return Ok(t.clone());
        }
    }
    let mut slot = TABLE.write().expect("table lock");
    if let Some(t) = slot.as_ref() {
        if t.max_period >= n {
            return Ok(t.clone());
        }
    }
    let t = Arc::new(LavaursTable::build(n.clamp(12, limits::HARD_MAX_PERIOD.max(12)).max(n))?);
    *slot = Some(t.clone());
    Ok(t)
}

/// Every minor of period `2..=n`, ordered by period then by smaller endpoint.
pub fn pairing_of_period(n: u32) -> Result<Vec<MinorLeaf>> {
    if n < 2 {
        return Err(Error::domain("pairing needs period at least 2"));
    }
    let t = table(n)?;
    Ok((2..=n)
        .flat_map(|k| {
            t.chords(k)
                .map(|(lo, hi)| t.minor(k, lo, hi))
                .collect::<Vec<_>>()
        })
        .collect())
}

/// Checks that `x` can carry a minor and returns it over its period.
pub(crate) fn periodic_input(x: &Angle) -> Result<Periodic> {
    if x.is_zero() {
        return Err(Error::DegenerateMinor);
    }
    if !x.has_odd_denominator() {
        return Err(Error::domain(format!("{x} has even denominator")));
    }
    if x.denom().bits() > KERNEL_MAX_PERIOD as u64 {
        return Err(Error::ResourceCap {
            what: "period",
            value: x.denom().bits(),
            cap: limits::max_period() as u64,
        });
    }
    let k = x.period();
    limits::check_period("period", k as u64)?;
    Ok(Periodic::from_angle(x, k as u32).expect("odd denominator divides 2^k - 1"))
}

/// The other endpoint of the minor leaf through `x`.
pub fn companion(x: &Angle) -> Result<Angle> {
    let px = periodic_input(x)?;
    Ok(table(px.period)?.companion(px).to_angle())
}

/// The minor leaf `{x, companion(x)}`.
pub fn minor_of(x: &Angle) -> Result<MinorLeaf> {
    let px = periodic_input(x)?;
    let t = table(px.period)?;
    let c = t.companion(px);
    let (lo, hi) = if px.num < c.num { (px.num, c.num) } else { (c.num, px.num) };
    Ok(t.minor(px.period, lo, hi))
}

/// True iff `m1` separates `m2` from angle 0, i.e. `m1 < m2`.
pub fn separates_from_zero(m1: &Leaf, m2: &Leaf) -> Result<bool> {
    if m1 == m2 {
        return Err(Error::domain("order is defined on distinct leaves"));
    }
    if m1.crosses(m2) {
        return Err(Error::domain(format!("{m1} crosses {m2}")));
    }
    Ok(m1.strictly_behind(m2.lo()) && m1.strictly_behind(m2.hi()))
}

/// The root of the combinatorial limb containing the minor through `x`.
pub fn minimal_minor_below(x: &Angle) -> Result<MinorLeaf> {
    let own = minor_of(x)?;
    if own.is_minimal {
        return Ok(own);
    }
    let t = table(own.period)?;
    let k = own.period;
    let lo = Periodic::from_angle(own.leaf.lo(), k).expect("periodic");
    let hi = Periodic::from_angle(own.leaf.hi(), k).expect("periodic");
    let mut found = Vec::new();
    for k2 in 2..=k {
        for (a, b) in t.chords(k2) {
            if !t.is_minimal(k2, a) {
                continue;
            }
            let pa = Periodic { num: a, period: k2 };
            let pb = Periodic { num: b, period: k2 };
            if pa.cmp_value(&lo) == Ordering::Less && hi.cmp_value(&pb) == Ordering::Less {
                found.push(t.minor(k2, a, b));
            }
        }
    }
    match found.len() {
        1 => Ok(found.pop().expect("one")),
        0 => Err(Error::consistency(format!(
            "no minimal minor separates {} from 0",
            own.leaf
        ))),
        _ => Err(Error::consistency(format!(
            "{} minimal minors separate {} from 0",
            found.len(),
            own.leaf
        ))),
    }
}

/// False iff the limbs of `p` and `q` are conjugate. Angle 0 mates with everything.
pub fn is_mateable(p: &Angle, q: &Angle) -> Result<bool> {
    for x in [p, q] {
        if !x.has_odd_denominator() {
            return Err(Error::domain(format!("{x} has even denominator")));
        }
    }
    if p.is_zero() || q.is_zero() {
        return Ok(true);
    }
    let rp = minimal_minor_below(p)?;
    let rq = minimal_minor_below(q)?;
    Ok(rp.leaf != rq.leaf.conjugate())
}

/// A tuning witness: the root minor whose blocks build the angle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tuning {
    pub root: MinorLeaf,
    /// Number of root blocks in one period of the tuned angle.
    pub inner_period: u32,
}

/// Douady block substitution test. Returns the lowest-period root found.
pub fn is_tuning(x: &Angle) -> Result<Option<Tuning>> {
    let px = periodic_input(x)?;
    let k = px.period;
    let t = table(k)?;
    for k2 in divisors(k).into_iter().filter(|&d| d > 1 && d < k) {
        let mask = (1u64 << k2) - 1;
        let chunks: Vec<u64> = (0..k / k2)
            .map(|i| (px.num >> (k - k2 * (i + 1))) & mask)
            .collect();
        for (a, b) in t.chords(k2) {
            if chunks.iter().all(|&c| c == a || c == b) {
                return Ok(Some(Tuning {
                    root: t.minor(k2, a, b),
                    inner_period: k / k2,
                }));
            }
        }
    }
    Ok(None)
}

/// Binary block of a periodic angle, most significant digit first.
pub fn binary_block(x: &Angle) -> Result<String> {
    let px = periodic_input(x)?;
    Ok(format!("{:0width$b}", px.num, width = px.period as usize))
}
