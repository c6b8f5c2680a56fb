//! Subshift counting, refined itineraries and renormalization addresses.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::Angle;
use crate::error::{Error, Result};
use crate::limits;
use crate::qml;

/// Square matrix of transition counts between partition pieces.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>")]
pub struct TransitionMatrix {
    entries: Vec<Vec<BigUint>>,
}

impl TryFrom<Vec<Vec<u64>>> for TransitionMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<u64>>) -> Result<Self> {
        TransitionMatrix::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigUint::from).collect())
                .collect(),
        )
    }
}

impl TransitionMatrix {
    pub fn new(entries: Vec<Vec<BigUint>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::domain("empty transition matrix"));
        }
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::domain("transition matrix is not square"));
        }
        Ok(TransitionMatrix { entries })
    }

    pub fn from_rows(rows: &[&[u64]]) -> Result<Self> {
        TransitionMatrix::try_from(rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<Vec<u64>> = serde_json::from_str(text)
            .map_err(|e| Error::domain(format!("bad matrix JSON: {e}")))?;
        TransitionMatrix::try_from(rows)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i][j]
    }

    fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigUint::one() } else { BigUint::zero() })
                    .collect()
            })
            .collect();
        TransitionMatrix { entries }
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.size();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(BigUint::zero(), |acc, k| {
                            acc + &self.entries[i][k] * &other.entries[k][j]
                        })
                    })
                    .collect()
            })
            .collect();
        TransitionMatrix { entries }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = TransitionMatrix::identity(self.size());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn trace(&self) -> BigUint {
        (0..self.size()).fold(BigUint::zero(), |acc, i| acc + &self.entries[i][i])
    }
}

/// Number of admissible periodic words of length `n`: `trace(M^n)`.
pub fn count_fixed(m: &TransitionMatrix, n: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("word length must be at least 1"));
    }
    Ok(m.pow(n).trace())
}

pub(crate) fn mobius(n: u32) -> i32 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Points of exact period `n`, by Möbius inversion of [`count_fixed`].
pub fn count_exact_period(m: &TransitionMatrix, n: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("period must be at least 1"));
    }
    let mut total = BigInt::zero();
    for d in qml::divisors(n) {
        let mu = mobius(n / d);
        if mu != 0 {
            let t = BigInt::from(count_fixed(m, d)?);
            total += t * mu;
        }
    }
    if total.is_negative() {
        return Err(Error::consistency("negative exact-period count"));
    }
    Ok(total.to_biguint().expect("nonnegative"))
}

/// Orbits of exact period `n`.
pub fn count_orbits(m: &TransitionMatrix, n: u32) -> Result<BigUint> {
    let exact = count_exact_period(m, n)?;
    let (q, r) = exact.div_rem(&BigUint::from(n));
    if !r.is_zero() {
        return Err(Error::consistency("exact-period count not divisible by the period"));
    }
    Ok(q)
}

/// Components corresponding two-to-one to periodic points.
pub fn component_count_from_points(points: &BigUint) -> Result<BigUint> {
    let (q, r) = points.div_rem(&BigUint::from(2u8));
    if !r.is_zero() {
        return Err(Error::domain(format!(
            "{points} points cannot pair two-to-one with components"
        )));
    }
    Ok(q)
}

/// Hyperbolic components of period dividing `m`, main cardioid included.
/// For `m <= 16` the count is checked against the Lavaurs pairing.
pub fn mandelbrot_component_count(m: u32) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::domain("period must be at least 1"));
    }
    limits::check_period("period", m as u64)?;
    let points = BigUint::one() << m as usize;
    let count = component_count_from_points(&points)?;
    if m <= 16 {
        let from_minors = components_from_minors(m)?;
        if from_minors != count {
            return Err(Error::consistency(format!(
                "period {m}: {count} components by counting, {from_minors} from minors"
            )));
        }
    }
    Ok(count)
}

/// `1 + #minors of period dividing m`, from the Lavaurs pairing.
pub fn components_from_minors(m: u32) -> Result<BigUint> {
    if m < 2 {
        return Ok(BigUint::one());
    }
    let minors = qml::pairing_of_period(m)?;
    let n = minors.iter().filter(|x| m.is_multiple_of(x.period)).count();
    Ok(BigUint::from(n as u64 + 1))
}

/// True iff no other angle of the same exact period shares the depth-`n`
/// refined itinerary of `x`, cutting the circle at the `n`-th preimages of `cut_set`.
pub fn refined_itinerary_unique(x: &Angle, cut_set: &BTreeSet<Angle>, n: u32) -> Result<bool> {
    if !x.is_periodic() {
        return Err(Error::domain(format!("{x} is not periodic")));
    }
    if cut_set.is_empty() {
        return Err(Error::domain("empty cut set"));
    }
    if n > 20 {
        return Err(Error::ResourceCap {
            what: "preimage depth",
            value: n as u64,
            cap: 20,
        });
    }
    for c in cut_set {
        if !cut_set.contains(&c.double()) {
            return Err(Error::domain(format!("cut set not forward invariant at {c}")));
        }
    }
    let period = x.period();
    limits::check_period("period", period as u64)?;
    let orbit: Vec<Angle> = (0..period).map(|t| x.double_n(t as u32)).collect();
    if let Some(y) = orbit.iter().find(|y| cut_set.contains(y)) {
        return Err(Error::domain(format!("orbit of {x} meets the cut set at {y}")));
    }

    let mut cuts: BTreeSet<Angle> = cut_set.clone();
    let mut level: Vec<Angle> = cut_set.iter().cloned().collect();
    for _ in 0..n {
        level = level
            .iter()
            .flat_map(|c| {
                let (a, b) = c.preimages();
                [a, b]
            })
            .collect();
        cuts.extend(level.iter().cloned());
    }
    let cuts: Vec<Angle> = cuts.into_iter().collect();
    let arc_of = |y: &Angle| -> Option<usize> {
        match cuts.binary_search(y) {
            Ok(_) => None,
            Err(i) => Some(i % cuts.len()),
        }
    };
    let word = |y: &Angle| -> Option<Vec<usize>> {
        (0..period).map(|t| arc_of(&y.double_n(t as u32))).collect()
    };
    let own = word(x).ok_or_else(|| Error::consistency("orbit meets a cut preimage"))?;
    for y in qml::exact_period_angles(period as u32)? {
        if &y != x && word(&y).as_ref() == Some(&own) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A property check that failed at index `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: String,
    pub i: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    fn from(violations: Vec<Violation>) -> Self {
        Verdict {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn fails(&self, property: &str) -> bool {
        self.violations.iter().any(|v| v.property == property)
    }
}

fn violation(property: &str, i: usize) -> Violation {
    Violation {
        property: property.to_string(),
        i,
    }
}

/// Address of a chain of renormalizations with a possible tuning tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Address24 {
    pub m: u64,
    pub j: Vec<u64>,
    pub m_seq: Vec<u64>,
    pub tuning_tail: bool,
}

impl Address24 {
    fn check_shape(&self) -> Result<()> {
        let n = self.m_seq.len();
        if n < 2 {
            return Err(Error::domain("address needs at least two terms"));
        }
        if self.j.len() != n - 1 {
            return Err(Error::domain(format!(
                "expected {} multipliers, got {}",
                n - 1,
                self.j.len()
            )));
        }
        if self.m_seq[0] != self.m {
            return Err(Error::domain("first term must equal m"));
        }
        if self.m == 0 || self.j.contains(&0) || self.m_seq.contains(&0) {
            return Err(Error::domain("terms must be positive"));
        }
        Ok(())
    }

    /// Partial sums `n_i = sum_{l <= i} j_l m_l` for `i = 1..N-1`.
    pub fn n_seq(&self) -> Vec<u128> {
        let mut acc = 0u128;
        self.j
            .iter()
            .zip(&self.m_seq)
            .map(|(&j, &m)| {
                acc += j as u128 * m as u128;
                acc
            })
            .collect()
    }
}

/// Growth condition `m_{i+1} > n_i`, with the tuning alternative at the last step.
pub fn validate_thm24(a: &Address24) -> Result<Verdict> {
    a.check_shape()?;
    let n = a.n_seq();
    let last = a.m_seq.len() - 1;
    let mut v = Vec::new();
    for i in 1..=last {
        let grows = a.m_seq[i] as u128 > n[i - 1];
        if grows {
            continue;
        }
        let tuned = i == last
            && a.tuning_tail
            && a.m_seq[i] as u128 == a.j[i - 1] as u128 * a.m_seq[i - 1] as u128;
        if !tuned {
            v.push(violation("growth", i));
        }
    }
    Ok(Verdict::from(v))
}

/// Which closed forms define `n_i - r_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulas {
    /// The forms used in the proofs: `n_2 - r_2 = j_2 m_2 - r_1` and
    /// `n_i - r_i = j_i m_i + j_{i-2} m_{i-2} - 2 r_1` for `i >= 3`.
    #[default]
    Derivation,
    /// The displayed definitions, kept for comparison.
    Displayed,
}

/// Address data for the nested construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Address313 {
    pub m: u64,
    pub i1: u64,
    pub j: Vec<u64>,
    pub m_seq: Vec<u64>,
}

/// Derived `n_i` and `r_i`, 1-indexed through position `i - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derived {
    pub n: Vec<i128>,
    pub r: Vec<i128>,
}

impl Address313 {
    fn check_shape(&self) -> Result<()> {
        if self.m_seq.is_empty() || self.j.len() != self.m_seq.len() {
            return Err(Error::domain("j and m_seq must have the same positive length"));
        }
        if self.m_seq[0] != self.m {
            return Err(Error::domain("first term must equal m"));
        }
        if self.m == 0 || self.i1 == 0 || self.j.contains(&0) || self.m_seq.contains(&0) {
            return Err(Error::domain("terms must be positive"));
        }
        if self.j[0] <= 3 * self.i1 {
            return Err(Error::domain(format!(
                "j_1 = {} must exceed 3 i_1 = {}",
                self.j[0],
                3 * self.i1
            )));
        }
        Ok(())
    }

    fn jm(&self, i: usize) -> i128 {
        self.j[i - 1] as i128 * self.m_seq[i - 1] as i128
    }

    fn mm(&self, i: usize) -> i128 {
        self.m_seq[i - 1] as i128
    }

    pub fn derive(&self, formulas: Formulas) -> Result<Derived> {
        self.check_shape()?;
        let len = self.m_seq.len();
        let m = self.m as i128;
        let r1 = self.i1 as i128 * m;
        let mut n = vec![self.jm(1)];
        let mut r = vec![r1];
        for i in 2..=len {
            let ni = self.jm(i) + (n[i - 2] - r[i - 2]);
            let gap = match formulas {
                Formulas::Derivation => match i {
                    2 => self.jm(2) - r1,
                    _ => self.jm(i) + self.jm(i - 2) - 2 * r1,
                },
                Formulas::Displayed => match i {
                    2 => self.jm(2) - self.mm(2) + self.jm(1) - r1,
                    3 => self.jm(3) + (self.j[0] as i128 - 2 * self.i1 as i128) * m,
                    _ => self.jm(i) - self.mm(i) + self.jm(i - 1) + self.jm(i - 3),
                },
            };
            n.push(ni);
            r.push(ni - gap);
        }
        Ok(Derived { n, r })
    }
}

/// `sum_{l <= i, l = i mod 2} j_l m_l`.
fn alternating_sum(a: &Address313, i: usize) -> i128 {
    (1..=i).rev().step_by(2).map(|l| a.jm(l)).sum()
}

/// Checks the six properties of the number scheme plus monotonicity.
pub fn validate_lemma314(a: &Address313) -> Result<Verdict> {
    validate_lemma314_with(a, Formulas::Derivation)
}

pub fn validate_lemma314_with(a: &Address313, formulas: Formulas) -> Result<Verdict> {
    let d = a.derive(formulas)?;
    let len = a.m_seq.len();
    let n = |i: usize| d.n[i - 1];
    let r = |i: usize| d.r[i - 1];
    let g = |i: usize| n(i) - r(i);
    let mut v = Vec::new();
    for i in 1..len {
        if a.mm(i + 1) <= a.jm(i) {
            v.push(violation("m_growth", i));
        }
        if g(i) + a.mm(i + 1) <= n(i) {
            v.push(violation("n_growth", i));
        }
        if g(i + 1) <= g(i) {
            v.push(violation("gap_growth", i));
        }
        if i >= 3 && a.mm(i + 1) <= alternating_sum(a, i) {
            v.push(violation("m_alternating", i));
        }
        if a.mm(i + 1) <= a.mm(i) {
            v.push(violation("m_increasing", i));
        }
        if n(i + 1) <= n(i) {
            v.push(violation("n_increasing", i));
        }
    }
    for i in 2..=len {
        if r(i) >= a.mm(i) {
            v.push(violation("r_bound", i));
        }
    }
    if len >= 3 && g(3) <= n(2) - r(1) {
        v.push(violation("gap_overlap", 3));
    }
    for i in 4..=len {
        if g(i) <= n(i - 1) {
            v.push(violation("gap_overlap", i));
        }
    }
    Ok(Verdict::from(v))
}

/// True iff `a` satisfies the input constraints: `m_{i+1}` exceeds the
/// alternating sum at every `i`, and `j_1 > 3 i_1`.
pub fn meets_generation_constraints(a: &Address313) -> bool {
    if a.check_shape().is_err() {
        return false;
    }
    (1..a.m_seq.len()).all(|i| a.mm(i + 1) > alternating_sum(a, i))
}

/// Which address scheme to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Thm24,
    S313,
}

/// Search box for enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub m: u64,
    pub i1: u64,
    pub terms: usize,
    pub j_min: u64,
    pub j_max: u64,
    pub m_max: u64,
}

const ENUMERATION_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Address {
    Thm24(Address24),
    S313(Address313),
}

/// Every valid address inside `bounds`, in lexicographic order of `(j, m_seq)`.
pub fn enumerate_addresses(scheme: Scheme, bounds: &Bounds) -> Result<Vec<Address>> {
    let mut out = Vec::new();
    if bounds.m == 0 || bounds.terms == 0 || bounds.j_min > bounds.j_max || bounds.m > bounds.m_max {
        return Ok(out);
    }
    let j_min = bounds.j_min.max(1);
    match scheme {
        Scheme::Thm24 => {
            if bounds.terms < 2 {
                return Ok(out);
            }
            let mut stack = vec![(vec![], vec![bounds.m])];
            while let Some((j, ms)) = stack.pop() {
                let k = ms.len();
                if k == bounds.terms {
                    continue;
                }
                let mut children = Vec::new();
                for ji in j_min..=bounds.j_max {
                    let mut jj: Vec<u64> = j.clone();
                    jj.push(ji);
                    let n_i: u128 = jj.iter().zip(&ms).map(|(&a, &b)| a as u128 * b as u128).sum();
                    let last = k + 1 == bounds.terms;
                    let mut next_m: Vec<(u64, bool)> = Vec::new();
                    if last {
                        let t = ji as u128 * *ms.last().expect("nonempty") as u128;
                        if t <= bounds.m_max as u128 {
                            next_m.push((t as u64, true));
                        }
                    }
                    let lo = n_i + 1;
                    if lo <= bounds.m_max as u128 {
                        next_m.extend((lo as u64..=bounds.m_max).map(|x| (x, false)));
                    }
                    next_m.sort();
                    for (mi, tuning) in next_m {
                        let mut mm = ms.clone();
                        mm.push(mi);
                        if last {
                            let a = Address24 {
                                m: bounds.m,
                                j: jj.clone(),
                                m_seq: mm,
                                tuning_tail: tuning,
                            };
                            if validate_thm24(&a)?.valid {
                                out.push(Address::Thm24(a));
                                if out.len() > ENUMERATION_CAP {
                                    return Err(cap_error(out.len()));
                                }
                            }
                        } else {
                            children.push((jj.clone(), mm));
                        }
                    }
                }
                children.reverse();
                stack.extend(children);
            }
        }
        Scheme::S313 => {
            let j1_min = j_min.max(3 * bounds.i1 + 1);
            if bounds.i1 == 0 || j1_min > bounds.j_max {
                return Ok(out);
            }
            let mut stack: Vec<(Vec<u64>, Vec<u64>)> = vec![(vec![], vec![bounds.m])];
            while let Some((j, ms)) = stack.pop() {
                let k = ms.len();
                let lo_j = if k == 1 { j1_min } else { j_min };
                let mut children = Vec::new();
                for ji in lo_j..=bounds.j_max {
                    let mut jj = j.clone();
                    jj.push(ji);
                    if k == bounds.terms {
                        let a = Address313 {
                            m: bounds.m,
                            i1: bounds.i1,
                            j: jj,
                            m_seq: ms.clone(),
                        };
                        if meets_generation_constraints(&a) && validate_lemma314(&a)?.valid {
                            out.push(Address::S313(a));
                            if out.len() > ENUMERATION_CAP {
                                return Err(cap_error(out.len()));
                            }
                        }
                        continue;
                    }
                    let probe = Address313 {
                        m: bounds.m,
                        i1: bounds.i1,
                        j: jj.clone(),
                        m_seq: ms.clone(),
                    };
                    let floor = alternating_sum(&probe, k);
                    let lo = (floor + 1).max(1) as u128;
                    if lo > bounds.m_max as u128 {
                        continue;
                    }
                    for mi in lo as u64..=bounds.m_max {
                        let mut mm = ms.clone();
                        mm.push(mi);
                        children.push((jj.clone(), mm));
                    }
                }
                children.reverse();
                stack.extend(children);
            }
        }
    }
    Ok(out)
}

fn cap_error(n: usize) -> Error {
    Error::ResourceCap {
        what: "addresses",
        value: n as u64,
        cap: ENUMERATION_CAP as u64,
    }
}

pub(crate) fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}
