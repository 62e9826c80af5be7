use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;

/// `hits` out of `total`. Kept as counts so that reports can be merged and
/// re-derived without rounding drift.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tally {
    pub hits: u64,
    pub total: u64,
}

impl Tally {
    pub fn new(hits: u64, total: u64) -> Self {
        assert!(hits <= total, "{hits} hits out of {total}");
        Tally { hits, total }
    }

    pub fn record(&mut self, hit: bool) {
        self.total += 1;
        self.hits += u64::from(hit);
    }

    /// Exact percentage; an empty tally is 0.
    pub fn percent(&self) -> Percent {
        if self.total == 0 {
            return Percent::ZERO;
        }
        Percent(Ratio::new(100 * u128::from(self.hits), u128::from(self.total)))
    }
}

impl std::ops::Add for Tally {
    type Output = Tally;

    fn add(self, other: Tally) -> Tally {
        Tally { hits: self.hits + other.hits, total: self.total + other.total }
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.hits, self.total)
    }
}

/// An exact percentage. Displays with one decimal, rounding half up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(pub Ratio<u128>);

impl Percent {
    pub const ZERO: Percent = Percent(Ratio::new_raw(0, 1));

    pub fn from_tenths(tenths: u128) -> Self {
        Percent(Ratio::new(tenths, 10))
    }

    pub fn mean(a: Percent, b: Percent) -> Percent {
        Percent((a.0 + b.0) / 2)
    }

    /// Value in tenths of a percent, half-up: floor(10 p + 1/2).
    pub fn tenths(&self) -> u128 {
        let (n, d) = (*self.0.numer(), *self.0.denom());
        (20 * n + d) / (2 * d)
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.tenths();
        write!(f, "{}.{}", t / 10, t % 10)
    }
}
