//! Exact angles on the circle `R/Z`, chords between them and arcs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational point of the circle, kept as a reduced fraction in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(Ratio<BigUint>);

impl Angle {
    /// Builds `num/den mod 1`; the denominator must be positive.
    pub fn new(num: impl Into<BigUint>, den: impl Into<BigUint>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(Angle(Ratio::new(num % &den, den)))
    }

    /// Convenience constructor for small literals. Panics on a zero denominator.
    pub fn frac(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Angle(Ratio::new(BigUint::from(num % den), BigUint::from(den)))
    }

    pub fn zero() -> Self {
        Angle(Ratio::zero())
    }

    pub fn half() -> Self {
        Angle::frac(1, 2)
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn has_odd_denominator(&self) -> bool {
        self.denom().is_odd()
    }

    pub(crate) fn as_ratio(&self) -> &Ratio<BigUint> {
        &self.0
    }

    pub(crate) fn from_ratio(r: Ratio<BigUint>) -> Self {
        let one = Ratio::one();
        if r >= one {
            let f = r.fract();
            Angle(f)
        } else {
            Angle(r)
        }
    }

    /// Numerator and denominator when both fit in a `u64`.
    pub fn to_u64_parts(&self) -> Option<(u64, u64)> {
        Some((self.numer().to_u64()?, self.denom().to_u64()?))
    }

    /// `2x mod 1`.
    pub fn double(&self) -> Self {
        let num = (self.numer() << 1usize) % self.denom();
        Angle(Ratio::new(num, self.denom().clone()))
    }

    /// `2^k x mod 1`.
    pub fn double_n(&self, k: u32) -> Self {
        let num = (self.numer() << k as usize) % self.denom();
        Angle(Ratio::new(num, self.denom().clone()))
    }

    /// The two angles doubling onto `self`: `(x/2, x/2 + 1/2)`.
    pub fn preimages(&self) -> (Angle, Angle) {
        let den = self.denom() << 1usize;
        let a = Angle(Ratio::new(self.numer().clone(), den.clone()));
        let b = Angle(Ratio::new(self.numer() + self.denom(), den));
        (a, b)
    }

    /// `x + 1/2 mod 1`.
    pub fn add_half(&self) -> Self {
        Angle::from_ratio(&self.0 + Ratio::new(BigUint::one(), BigUint::from(2u8)))
    }

    /// `-x mod 1`.
    pub fn conjugate(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Angle(Ratio::new(self.denom() - self.numer(), self.denom().clone()))
    }

    /// Preperiod and period under doubling.
    pub fn period_under_doubling(&self) -> (usize, usize) {
        let den = self.denom();
        let twos = den.trailing_zeros().unwrap_or(0) as usize;
        let odd = den >> twos;
        (twos, multiplicative_order_of_two(&odd))
    }

    pub fn period(&self) -> usize {
        self.period_under_doubling().1
    }

    pub fn preperiod(&self) -> usize {
        self.period_under_doubling().0
    }

    pub fn is_periodic(&self) -> bool {
        self.has_odd_denominator()
    }

    /// Sum of two angles mod 1.
    pub fn add(&self, other: &Angle) -> Angle {
        Angle::from_ratio(&self.0 + &other.0)
    }

    /// Difference `self - other mod 1`.
    pub fn sub(&self, other: &Angle) -> Angle {
        if self.0 >= other.0 {
            Angle(&self.0 - &other.0)
        } else {
            Angle(Ratio::one() - (&other.0 - &self.0))
        }
    }
}

/// Order of 2 modulo an odd modulus; 1 for modulus 1.
fn multiplicative_order_of_two(m: &BigUint) -> usize {
    if m.is_one() {
        return 1;
    }
    if let Some(m) = m.to_u64() {
        let m = m as u128;
        let mut r: u128 = 2 % m;
        let mut t = 1usize;
        while r != 1 {
            r = (r * 2) % m;
            t += 1;
        }
        return t;
    }
    let two = BigUint::from(2u8);
    let mut r = &two % m;
    let mut t = 1usize;
    while !r.is_one() {
        r = (r << 1usize) % m;
        t += 1;
    }
    t
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (n, d) = t.split_once('/').ok_or_else(|| Error::Parse(s.to_string()))?;
        let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
        if !digits(n) || !digits(d) {
            return Err(Error::Parse(s.to_string()));
        }
        let n: BigUint = n.parse().map_err(|_| Error::Parse(s.to_string()))?;
        let d: BigUint = d.parse().map_err(|_| Error::Parse(s.to_string()))?;
        if d.is_zero() {
            return Err(Error::Parse(s.to_string()));
        }
        if n >= d {
            return Err(Error::domain(format!("{s} is not in [0, 1)")));
        }
        Angle::new(n, d)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A chord between two distinct angles, stored smaller endpoint first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leaf {
    lo: Angle,
    hi: Angle,
}

impl Leaf {
    pub fn new(a: Angle, b: Angle) -> Result<Self> {
        match a.cmp(&b) {
            Ordering::Less => Ok(Leaf { lo: a, hi: b }),
            Ordering::Greater => Ok(Leaf { lo: b, hi: a }),
            Ordering::Equal => Err(Error::domain(format!("degenerate leaf at {a}"))),
        }
    }

    /// Panicking constructor for literals.
    pub fn frac(a: (u64, u64), b: (u64, u64)) -> Self {
        Leaf::new(Angle::frac(a.0, a.1), Angle::frac(b.0, b.1)).expect("distinct endpoints")
    }

    pub fn lo(&self) -> &Angle {
        &self.lo
    }

    pub fn hi(&self) -> &Angle {
        &self.hi
    }

    pub fn endpoints(&self) -> [&Angle; 2] {
        [&self.lo, &self.hi]
    }

    pub fn has_endpoint(&self, x: &Angle) -> bool {
        &self.lo == x || &self.hi == x
    }

    /// `min(b - a, 1 - (b - a))`, in `(0, 1/2]`.
    pub fn length(&self) -> Ratio<BigUint> {
        let d = self.hi.as_ratio() - self.lo.as_ratio();
        let e = Ratio::one() - &d;
        if d <= e {
            d
        } else {
            e
        }
    }

    /// True iff the chords meet in the open disc. Shared endpoints never count.
    pub fn crosses(&self, other: &Leaf) -> bool {
        if self == other {
            return false;
        }
        let inside = |x: &Angle| &self.lo < x && x < &self.hi;
        let on = |x: &Angle| self.has_endpoint(x);
        if on(&other.lo) || on(&other.hi) {
            return false;
        }
        inside(&other.lo) != inside(&other.hi)
    }

    pub fn conjugate(&self) -> Leaf {
        Leaf::new(self.lo.conjugate(), self.hi.conjugate()).expect("conjugation is injective")
    }

    /// Image under doubling; `None` when the chord is a diameter.
    pub fn double(&self) -> Option<Leaf> {
        Leaf::new(self.lo.double(), self.hi.double()).ok()
    }

    /// Translate both endpoints by 1/2.
    pub fn add_half(&self) -> Leaf {
        Leaf::new(self.lo.add_half(), self.hi.add_half()).expect("translation is injective")
    }

    /// True iff `x` lies strictly inside the arc `(lo, hi)` not containing 0.
    pub fn strictly_behind(&self, x: &Angle) -> bool {
        &self.lo < x && x < &self.hi
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.lo, self.hi)
    }
}

impl fmt::Debug for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{:?}, {:?}}}", self.lo, self.hi)
    }
}

impl Serialize for Leaf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [&self.lo, &self.hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Leaf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[Angle; 2]>::deserialize(d)?;
        Leaf::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// The set of angles met going counterclockwise from `start` to `end`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub start: Angle,
    pub end: Angle,
    pub start_open: bool,
    pub end_open: bool,
}

impl Arc {
    pub fn new(start: Angle, end: Angle, start_open: bool, end_open: bool) -> Result<Self> {
        if start == end {
            return Err(Error::domain("arc endpoints coincide"));
        }
        Ok(Arc {
            start,
            end,
            start_open,
            end_open,
        })
    }

    pub fn open(start: Angle, end: Angle) -> Result<Self> {
        Arc::new(start, end, true, true)
    }

    pub fn closed(start: Angle, end: Angle) -> Result<Self> {
        Arc::new(start, end, false, false)
    }

    pub fn contains(&self, x: &Angle) -> bool {
        if x == &self.start {
            return !self.start_open;
        }
        if x == &self.end {
            return !self.end_open;
        }
        if self.start < self.end {
            &self.start < x && x < &self.end
        } else {
            x > &self.start || x < &self.end
        }
    }
}

/// Least common multiple of two periods.
pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}
