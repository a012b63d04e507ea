//! Discrete domains the searches walk over.
//!
//! A domain only sees the *active* slots of a template; frozen slots are
//! filled back in by [`SlotSelection::expand`].

use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Rejection draws before falling back to enumerating unseen points.
const REJECTION_TRIES: usize = 64;
/// Largest raw grid that may be enumerated for the fallback.
const ENUMERATION_LIMIT: u128 = 1 << 22;

pub trait Domain {
    fn dims(&self) -> usize;
    /// Alphabet size per slot.
    fn levels(&self) -> u8;
    /// Number of feasible points, if it fits in a `u128`.
    fn size(&self) -> Option<u128>;
    fn is_feasible(&self, v: &[u8]) -> bool;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<u8>;
    /// A feasible point differing from `base` in exactly one slot.
    fn mutate(&self, base: &[u8], rng: &mut ChaCha8Rng) -> Option<Vec<u8>>;

    /// Raw grid size `levels^dims`, ignoring feasibility.
    fn grid_size(&self) -> Option<u128> {
        u128::from(self.levels()).checked_pow(self.dims() as u32)
    }

    /// Point with lexicographic rank `rank` on the raw grid (slot 0 is the
    /// most significant digit).
    fn decode(&self, mut rank: u128) -> Vec<u8> {
        let base = u128::from(self.levels());
        let mut v = vec![0u8; self.dims()];
        for slot in v.iter_mut().rev() {
            *slot = (rank % base) as u8;
            rank /= base;
        }
        v
    }
}

/// The Clifford alphabet `{0,1,2,3}` (multiples of π/2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuarterTurns {
    pub dims: usize,
}

impl Domain for QuarterTurns {
    fn dims(&self) -> usize {
        self.dims
    }

    fn levels(&self) -> u8 {
        4
    }

    fn size(&self) -> Option<u128> {
        self.grid_size()
    }

    fn is_feasible(&self, v: &[u8]) -> bool {
        v.len() == self.dims && v.iter().all(|&x| x < 4)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<u8> {
        (0..self.dims).map(|_| rng.gen_range(0..4u8)).collect()
    }

    fn mutate(&self, base: &[u8], rng: &mut ChaCha8Rng) -> Option<Vec<u8>> {
        if self.dims == 0 {
            return None;
        }
        let slot = rng.gen_range(0..self.dims);
        let alternatives: Vec<u8> = (0..4).filter(|&l| l != base[slot]).collect();
        let mut v = base.to_vec();
        v[slot] = alternatives[rng.gen_range(0..alternatives.len())];
        Some(v)
    }
}

/// Eighth-turn alphabet `{0..8}` (multiples of π/4) with at most `max_odd`
/// odd (non-Clifford) slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EighthTurns {
    pub dims: usize,
    pub max_odd: usize,
}

pub fn odd_count(v: &[u8]) -> usize {
    v.iter().filter(|&&x| x % 2 == 1).count()
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

impl Domain for EighthTurns {
    fn dims(&self) -> usize {
        self.dims
    }

    fn levels(&self) -> u8 {
        8
    }

    fn size(&self) -> Option<u128> {
        let base = 4u128.checked_pow(self.dims as u32)?;
        let mut count: u128 = 0;
        for m in 0..=self.max_odd.min(self.dims) {
            count = count.checked_add(binomial(self.dims, m)?.checked_mul(base)?)?;
        }
        Some(count)
    }

    fn is_feasible(&self, v: &[u8]) -> bool {
        v.len() == self.dims && v.iter().all(|&x| x < 8) && odd_count(v) <= self.max_odd
    }

    /// Draws a Clifford point exactly as [`QuarterTurns`] does, then (only
    /// when `max_odd > 0`) turns a uniformly chosen number of slots into
    /// neighbouring odd angles.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<u8> {
        let mut v: Vec<u8> = (0..self.dims).map(|_| 2 * rng.gen_range(0..4u8)).collect();
        let cap = self.max_odd.min(self.dims);
        if cap > 0 {
            let m = rng.gen_range(0..=cap);
            for slot in index::sample(rng, self.dims, m) {
                let step = if rng.gen::<bool>() { 1 } else { 7 };
                v[slot] = (v[slot] + step) % 8;
            }
        }
        v
    }

    fn mutate(&self, base: &[u8], rng: &mut ChaCha8Rng) -> Option<Vec<u8>> {
        if self.dims == 0 {
            return None;
        }
        let slot = rng.gen_range(0..self.dims);
        let others = odd_count(base) - usize::from(base[slot] % 2 == 1);
        let alternatives: Vec<u8> = (0..8)
            .filter(|&l| l != base[slot] && (l % 2 == 0 || others < self.max_odd))
            .collect();
        if alternatives.is_empty() {
            return None;
        }
        let mut v = base.to_vec();
        v[slot] = alternatives[rng.gen_range(0..alternatives.len())];
        Some(v)
    }
}

/// Draws a feasible point not in `seen`.
pub fn sample_unseen<D: Domain + ?Sized>(
    domain: &D,
    rng: &mut ChaCha8Rng,
    seen: &HashSet<Vec<u8>>,
) -> Result<Vec<u8>> {
    let exhausted = Error::SpaceExhausted {
        evaluated: seen.len(),
    };
    if let Some(size) = domain.size() {
        if seen.len() as u128 >= size {
            return Err(exhausted);
        }
    }
    for _ in 0..REJECTION_TRIES {
        let v = domain.sample(rng);
        if !seen.contains(&v) {
            return Ok(v);
        }
    }
    match domain.grid_size() {
        Some(grid) if grid <= ENUMERATION_LIMIT => {
            let unseen: Vec<Vec<u8>> = (0..grid)
                .map(|r| domain.decode(r))
                .filter(|v| domain.is_feasible(v) && !seen.contains(v))
                .collect();
            if unseen.is_empty() {
                return Err(exhausted);
            }
            let pick = rng.gen_range(0..unseen.len());
            Ok(unseen.into_iter().nth(pick).expect("in range"))
        }
        _ => Err(exhausted),
    }
}

/// Which template slots a search may change; the rest stay at zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotSelection {
    total: usize,
    active: Vec<usize>,
}

impl SlotSelection {
    pub fn all(total: usize) -> Self {
        Self {
            total,
            active: (0..total).collect(),
        }
    }

    pub fn subset(total: usize, mut active: Vec<usize>) -> Result<Self> {
        active.sort_unstable();
        active.dedup();
        if let Some(&bad) = active.iter().find(|&&s| s >= total) {
            return Err(Error::InvalidConfig(format!(
                "active slot {bad} outside template of {total} slots"
            )));
        }
        Ok(Self { total, active })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn expand(&self, values: &[u8]) -> Vec<u8> {
        let mut full = vec![0u8; self.total];
        for (&slot, &v) in self.active.iter().zip(values) {
            full[slot] = v;
        }
        full
    }
}
