use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported fermionic dimension (one machine word of slots).
pub const MAX_DIM: usize = 64;

/// Basis blade `e_J`, stored as a bitset of monomial-degree slots.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Blade(u64);

impl Blade {
    pub const EMPTY: Blade = Blade(0);

    pub const fn from_bits(bits: u64) -> Self {
        Blade(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The volume blade `e_I` of an `n`-dimensional space.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Blade(u64::MAX)
        } else {
            Blade((1u64 << n) - 1)
        }
    }

    pub fn single(r: usize) -> Self {
        assert!(r < MAX_DIM, "slot {r} out of range");
        Blade(1u64 << r)
    }

    /// Builds a blade from distinct slots; order of the input is irrelevant.
    pub fn from_degrees(degrees: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &r in degrees {
            if r >= MAX_DIM {
                return Err(Error::OutOfRange(format!("slot {r}")));
            }
            if bits & (1 << r) != 0 {
                return Err(Error::Parse(format!("repeated slot {r}")));
            }
            bits |= 1 << r;
        }
        Ok(Blade(bits))
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, r: usize) -> bool {
        r < MAX_DIM && self.0 & (1 << r) != 0
    }

    pub fn is_disjoint(self, other: Blade) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Blade) -> Blade {
        Blade(self.0 | other.0)
    }

    /// Highest occupied slot plus one (0 for the empty blade).
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Ascending slots.
    pub fn degrees(self) -> Degrees {
        Degrees(self.0)
    }

    pub fn degree_sum(self) -> i64 {
        self.degrees().map(|r| r as i64).sum()
    }

    /// `2 * (sum of centered indices)`, centered index being `r - (n-1)/2`.
    pub fn doubled_momentum(self, n: usize) -> i64 {
        2 * self.degree_sum() - self.grade() as i64 * (n as i64 - 1)
    }

    /// Total centered momentum when it is an integer.
    pub fn momentum(self, n: usize) -> Option<i64> {
        let d = self.doubled_momentum(n);
        (d % 2 == 0).then_some(d / 2)
    }

    /// Doubled centered indices `2r - (n-1)`, used for display only.
    pub fn centered_doubled(self, n: usize) -> Vec<i64> {
        self.degrees()
            .map(|r| 2 * r as i64 - (n as i64 - 1))
            .collect()
    }

    /// Sign of the merge permutation: `e_self ∧ e_other = sign * e_{self ∪ other}`.
    /// Returns 0 when the blades overlap.
    pub fn merge_sign(self, other: Blade) -> i32 {
        if !self.is_disjoint(other) {
            return 0;
        }
        let mut crossings = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let k = rest.trailing_zeros();
            rest &= rest - 1;
            // slots of `self` strictly above k must move past e_k
            crossings += (self.0.checked_shr(k + 1).unwrap_or(0)).count_ones();
        }
        if crossings.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Comma-separated ascending slots, e.g. `"0,3"`. Empty blade is `""`.
    pub fn key(self) -> String {
        self.degrees()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(key: &str) -> Result<Self> {
        let key = key.trim();
        if key.is_empty() {
            return Ok(Blade::EMPTY);
        }
        let degrees = key
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad blade key {key:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("blade key {key:?} not ascending")));
        }
        Blade::from_degrees(&degrees)
    }
}

/// Lexicographic order on the ascending degree lists.
impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let t = diff.trailing_zeros();
        // Both lists agree below slot t and exactly one side holds t.
        if self.0 & (1 << t) != 0 {
            if other.0 >> t == 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        } else if self.0 >> t == 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{{{}}}", self.key())
    }
}

pub struct Degrees(u64);

impl Iterator for Degrees {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let r = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(r)
    }
}

/// All `k`-subsets of `0..n` in increasing bit order (Gosper's hack).
pub fn combinations(n: usize, k: usize) -> Combinations {
    assert!(n <= MAX_DIM);
    let limit = if n == 64 { u128::from(u64::MAX) + 1 } else { 1u128 << n };
    let first = if k > n {
        None
    } else if k == 0 {
        Some(0u64)
    } else if k == 64 {
        Some(u64::MAX)
    } else {
        Some((1u64 << k) - 1)
    };
    Combinations {
        next: first,
        limit,
    }
}

pub struct Combinations {
    next: Option<u64>,
    limit: u128,
}

impl Iterator for Combinations {
    type Item = Blade;
    fn next(&mut self) -> Option<Blade> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = u128::from(cur) + u128::from(c);
            if r >= self.limit {
                None
            } else {
                let r = r as u64;
                Some((((r ^ cur) >> 2) / c) | r)
            }
        };
        Some(Blade(cur))
    }
}
