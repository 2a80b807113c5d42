//! Forward aliquot orbits, cycles, and classification of connected
//! components of the aliquot graph.

mod classify;
mod component;

pub use classify::{classify, Classification, Classifier, Config, FallbackRung};
pub use component::{
    aliquot_sum_big, aliquot_sum_u128, inverse_orbit_bfs, verify_certificate, Certificate, ComponentResult, FiniteComponent,
    Indeterminate, Limits, ResourceLimit,
};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::{aliquot_sum_wide, is_prime};
use crate::error::{Error, Result};

/// Default value bound for forward orbits.
pub const DEFAULT_BOUND: u64 = 1 << 62;
/// Default cap on forward-orbit steps.
pub const DEFAULT_MAX_STEPS: usize = 20_000;

/// An aliquot cycle in orbit order, rotated so its minimum comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cycle {
    elements: Vec<u64>,
}

impl Cycle {
    /// Rotates `elements` (given in orbit order) to start at the minimum.
    pub fn from_orbit(mut elements: Vec<u64>) -> Self {
        if let Some(pos) = elements.iter().enumerate().min_by_key(|&(_, v)| *v).map(|(i, _)| i) {
            elements.rotate_left(pos);
        }
        Cycle { elements }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn min(&self) -> u64 {
        self.elements[0]
    }

    pub fn position(&self, v: u64) -> Option<usize> {
        self.elements.iter().position(|&e| e == v)
    }

    /// Checks that `s` maps each element to the next, cyclically.
    pub fn verify(&self) -> Result<bool> {
        let len = self.elements.len();
        for (i, &e) in self.elements.iter().enumerate() {
            if aliquot_sum_wide(e)? != self.elements[(i + 1) % len] as u128 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// How a forward orbit stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    /// `m` is odd.
    ReachedOdd { m: u64 },
    /// `m - 1` is prime, so the odd `(m - 1)²` maps to `m`.
    PredecessorPrimeSquare { m: u64, prime: u64, witness: u128 },
    /// `m` was already visited at index `entry`.
    EnteredCycle { cycle: Cycle, entry: usize },
    /// The next value reached or passed the bound.
    ExceededBound { value: u128 },
    /// The step cap ran out first.
    StepsExhausted { last: u64 },
}

/// Result of iterating `s` from a starting value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitOutcome {
    pub start: u64,
    /// `n, s(n), …, m`. For a cycle the revisited value is the last entry;
    /// for an exceeded bound the offending value is only in the terminal.
    pub trajectory: Vec<u64>,
    /// Index of the terminal value `m = s^k(n)`.
    pub k: usize,
    pub terminal: Terminal,
}

/// Stopping rules for [`forward_orbit_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitParams {
    pub bound: u64,
    pub max_steps: usize,
    /// Stop as soon as `m - 1` is prime. Disabling this yields the plain
    /// aliquot sequence up to an odd value, a cycle or the bound.
    pub stop_on_prime_predecessor: bool,
}

impl Default for OrbitParams {
    fn default() -> Self {
        OrbitParams { bound: DEFAULT_BOUND, max_steps: DEFAULT_MAX_STEPS, stop_on_prime_predecessor: true }
    }
}

/// Iterates `s` from `n`, checking in order at each `m = s^k(n)`: `m` odd,
/// `m - 1` prime, `m` seen before, `m >= bound`.
pub fn forward_orbit(n: u64, bound: u64, max_steps: usize) -> Result<OrbitOutcome> {
    forward_orbit_with(n, &OrbitParams { bound, max_steps, stop_on_prime_predecessor: true })
}

pub fn forward_orbit_with(n: u64, params: &OrbitParams) -> Result<OrbitOutcome> {
    if n == 0 {
        return Err(Error::Domain("orbits start at n >= 1".into()));
    }
    let mut trajectory = vec![n];
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut m = n;
    loop {
        let k = trajectory.len() - 1;
        let done = |terminal| Ok(OrbitOutcome { start: n, trajectory: trajectory.clone(), k, terminal });
        if m % 2 == 1 {
            return done(Terminal::ReachedOdd { m });
        }
        if params.stop_on_prime_predecessor && is_prime(m - 1) {
            let p = m - 1;
            return done(Terminal::PredecessorPrimeSquare { m, prime: p, witness: p as u128 * p as u128 });
        }
        if let Some(&j) = seen.get(&m) {
            let cycle = Cycle::from_orbit(trajectory[j..k].to_vec());
            return done(Terminal::EnteredCycle { cycle, entry: j });
        }
        if m >= params.bound {
            return done(Terminal::ExceededBound { value: m as u128 });
        }
        if k >= params.max_steps {
            return done(Terminal::StepsExhausted { last: m });
        }
        seen.insert(m, k);
        let next = aliquot_sum_wide(m)?;
        if next > u64::MAX as u128 {
            return Ok(OrbitOutcome {
                start: n,
                trajectory,
                k,
                terminal: Terminal::ExceededBound { value: next },
            });
        }
        m = next as u64;
        trajectory.push(m);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(n: u64) -> OrbitOutcome {
        forward_orbit_with(n, &OrbitParams { stop_on_prime_predecessor: false, ..Default::default() }).unwrap()
    }

    #[test]
    fn amicable_pair_is_a_cycle_in_the_plain_sequence() {
        let o = plain(220);
        assert_eq!(o.trajectory, vec![220, 284, 220]);
        assert_eq!(o.terminal, Terminal::EnteredCycle { cycle: Cycle::from_orbit(vec![220, 284]), entry: 0 });
        assert_eq!(o.k, 2);
    }

    #[test]
    fn amicable_pair_under_all_four_conditions() {
        // 283 is prime, so 284 has the odd predecessor 283².
        let o = forward_orbit(220, DEFAULT_BOUND, 100).unwrap();
        assert_eq!(o.k, 1);
        assert_eq!(o.terminal, Terminal::PredecessorPrimeSquare { m: 284, prime: 283, witness: 80_089 });
    }

    #[test]
    fn twelve() {
        let o = plain(12);
        assert_eq!(o.trajectory, vec![12, 16, 15]);
        assert_eq!(o.terminal, Terminal::ReachedOdd { m: 15 });
        assert_eq!(o.k, 2);
        // With all four conditions, 11 is prime and stops at once.
        let o = forward_orbit(12, DEFAULT_BOUND, 100).unwrap();
        assert_eq!(o.k, 0);
        assert_eq!(o.terminal, Terminal::PredecessorPrimeSquare { m: 12, prime: 11, witness: 121 });
    }

    #[test]
    fn fourteen() {
        let o = forward_orbit(14, DEFAULT_BOUND, 100).unwrap();
        assert_eq!(o.k, 0);
        assert_eq!(o.terminal, Terminal::PredecessorPrimeSquare { m: 14, prime: 13, witness: 169 });
        assert_eq!(crate::arith::aliquot_sum_wide(169).unwrap(), 14);
    }

    #[test]
    fn perfect_numbers() {
        let o = plain(6);
        assert_eq!(o.terminal, Terminal::EnteredCycle { cycle: Cycle::from_orbit(vec![6]), entry: 0 });
        let o = forward_orbit(28, DEFAULT_BOUND, 100).unwrap();
        assert_eq!(o.trajectory, vec![28, 28]);
        assert_eq!(o.terminal, Terminal::EnteredCycle { cycle: Cycle::from_orbit(vec![28]), entry: 0 });
    }

    #[test]
    fn open_ended_start_exceeds_bound() {
        // Plain sequence: with all four conditions 276 stops at 1104 (1103 is prime).
        let o = forward_orbit_with(
            276,
            &OrbitParams { bound: 1_000_000_000_000, max_steps: 10_000, stop_on_prime_predecessor: false },
        )
        .unwrap();
        assert!(matches!(o.terminal, Terminal::ExceededBound { value } if value >= 1_000_000_000_000));
        for w in o.trajectory.windows(2) {
            assert_eq!(aliquot_sum_wide(w[0]).unwrap(), w[1] as u128);
        }
    }

    #[test]
    fn step_cap_is_distinct_from_bound() {
        let o = forward_orbit_with(
            276,
            &OrbitParams { bound: DEFAULT_BOUND, max_steps: 5, stop_on_prime_predecessor: false },
        )
        .unwrap();
        assert_eq!(o.k, 5);
        assert!(matches!(o.terminal, Terminal::StepsExhausted { .. }));
    }

    #[test]
    fn odd_start_stops_at_zero() {
        let o = forward_orbit(15, DEFAULT_BOUND, 10).unwrap();
        assert_eq!(o.k, 0);
        assert_eq!(o.terminal, Terminal::ReachedOdd { m: 15 });
        assert!(forward_orbit(0, DEFAULT_BOUND, 10).is_err());
    }

    #[test]
    fn cycle_canonical_from_any_element() {
        // The sociable 5-cycle through 12496.
        let members = [12496u64, 14288, 15472, 14536, 14264];
        for &start in &members {
            let o = plain(start);
            match o.terminal {
                Terminal::EnteredCycle { cycle, .. } => {
                    assert_eq!(cycle.elements(), &members);
                    assert!(cycle.verify().unwrap());
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }
}
