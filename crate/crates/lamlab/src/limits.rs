//! Process-wide resource caps.
//!
//! Enumeration over angles `j/(2^n - 1)` grows like `2^n`; every operation that
//! enumerates checks the period cap here. The command line front end sets the
//! caps once at startup, library callers may do the same.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_PERIOD: u32 = 22;
pub const HARD_MAX_PERIOD: u32 = 23;
pub const DEFAULT_MAX_DEPTH: u32 = 10;
pub const HARD_MAX_DEPTH: u32 = 20;
pub const DEFAULT_CLASS_CAP: usize = 64;

static MAX_PERIOD: AtomicU32 = AtomicU32::new(DEFAULT_MAX_PERIOD);
static MAX_DEPTH: AtomicU32 = AtomicU32::new(DEFAULT_MAX_DEPTH);

pub fn max_period() -> u32 {
    MAX_PERIOD.load(Ordering::Relaxed)
}

pub fn max_depth() -> u32 {
    MAX_DEPTH.load(Ordering::Relaxed)
}

/// Sets the period cap, clamped to [`HARD_MAX_PERIOD`]. Returns the value in effect.
pub fn set_max_period(n: u32) -> u32 {
    let n = n.clamp(1, HARD_MAX_PERIOD);
    MAX_PERIOD.store(n, Ordering::Relaxed);
    n
}

/// Sets the pullback depth cap, clamped to [`HARD_MAX_DEPTH`]. Returns the value in effect.
pub fn set_max_depth(d: u32) -> u32 {
    let d = d.min(HARD_MAX_DEPTH);
    MAX_DEPTH.store(d, Ordering::Relaxed);
    d
}

pub(crate) fn check_period(what: &'static str, n: u64) -> Result<()> {
    let cap = max_period() as u64;
    if n > cap {
        return Err(Error::ResourceCap { what, value: n, cap });
    }
    Ok(())
}

pub(crate) fn check_depth(d: u64) -> Result<()> {
    let cap = max_depth() as u64;
    if d > cap {
        return Err(Error::ResourceCap {
            what: "depth",
            value: d,
            cap,
        });
    }
    Ok(())
}
