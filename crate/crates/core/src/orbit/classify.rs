use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use num_bigint::BigUint;

use super::component::{aliquot_sum_u128, inverse_orbit_bfs, Certificate, ComponentResult, Indeterminate, Limits, ResourceLimit};
use super::{forward_orbit_with, Cycle, OrbitParams, Terminal, DEFAULT_BOUND, DEFAULT_MAX_STEPS};
use crate::arith::is_prime_wide;
use crate::error::{Error, Result};
use crate::inverse::s_inverse;

/// One step of the ladder tried, in order, when a forward orbit passes the
/// bound or runs out of steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FallbackRung {
    /// Keep iterating in 128-bit arithmetic until the value reaches
    /// `2^bits`, a factorization gives up, or `max_steps` more steps.
    Forward { bits: u32, max_steps: usize },
    /// Look for an odd number among the first `depth` generations of
    /// predecessors of each trajectory value `<= cutoff`, spending at most
    /// `budget` inverse-image evaluations per value.
    Inverse { cutoff: u64, depth: u32, budget: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bound: u64,
    pub max_steps: usize,
    pub max_nodes: usize,
    pub max_value: u64,
    /// Worker threads for scans; 0 picks the number of CPUs.
    pub threads: usize,
    pub fallback: Vec<FallbackRung>,
}

impl Default for Config {
    fn default() -> Self {
        let limits = Limits::default();
        Config {
            bound: DEFAULT_BOUND,
            max_steps: DEFAULT_MAX_STEPS,
            max_nodes: limits.max_nodes,
            max_value: limits.max_value,
            threads: 0,
            fallback: vec![
                FallbackRung::Forward { bits: 100, max_steps: 1000 },
                FallbackRung::Inverse { cutoff: 1 << 36, depth: 4, budget: 64 },
                FallbackRung::Inverse { cutoff: 1 << 40, depth: 6, budget: 512 },
            ],
        }
    }
}

impl Config {
    pub fn limits(&self) -> Limits {
        Limits { max_nodes: self.max_nodes, max_value: self.max_value }
    }

    fn orbit_params(&self) -> OrbitParams {
        OrbitParams { bound: self.bound, max_steps: self.max_steps, stop_on_prime_predecessor: true }
    }
}

/// `classify` plus the cycle the forward orbit ran into, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub result: ComponentResult,
    pub cycle: Option<Cycle>,
}

type Slot = Arc<OnceLock<Result<ComponentResult>>>;
/// `(rung, t)` to the odd predecessor found and its depth, if any.
type OddSearchCache = HashMap<(usize, u64), Option<(u128, u32)>>;

/// Classifies many values under one [`Config`], exploring each cycle's
/// component once and remembering fallback searches.
#[derive(Debug, Default)]
pub struct Classifier {
    config: Config,
    components: Mutex<HashMap<u64, (Cycle, Slot)>>,
    odd_search: Mutex<OddSearchCache>,
}

impl Classifier {
    pub fn new(config: Config) -> Self {
        Classifier { config, components: Mutex::default(), odd_search: Mutex::default() }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn classify(&self, n: u64) -> Result<ComponentResult> {
        self.classify_detailed(n).map(|c| c.result)
    }

    pub fn classify_detailed(&self, n: u64) -> Result<Classification> {
        if n == 0 {
            return Err(Error::Domain("classify needs n >= 1".into()));
        }
        let plain = |result| Ok(Classification { result, cycle: None });
        if n % 2 == 1 {
            return plain(potentially_infinite(n, 0, 0));
        }
        let outcome = forward_orbit_with(n, &self.config.orbit_params())?;
        let k = outcome.k as u32;
        match outcome.terminal {
            Terminal::ReachedOdd { m } => plain(potentially_infinite(m, 0, k)),
            Terminal::PredecessorPrimeSquare { witness, .. } => plain(potentially_infinite(witness, 1, k)),
            Terminal::EnteredCycle { cycle, entry } => {
                let result = match self.component_of(&cycle)? {
                    ComponentResult::Finite(c) => {
                        if !c.contains(n) {
                            return Err(Error::Internal(format!("{n} reaches cycle {} but is not in its component", cycle.min())));
                        }
                        ComponentResult::Finite(c)
                    }
                    ComponentResult::PotentiallyInfinite { certificate: c } => {
                        let pos = cycle.position(outcome.trajectory[entry]).ok_or_else(|| {
                            Error::Internal(format!("cycle entry of {n} is not a cycle element"))
                        })?;
                        let to_min = ((cycle.order() - pos) % cycle.order()) as u32;
                        potentially_infinite(c.m, c.j, c.k + entry as u32 + to_min)
                    }
                    other => other,
                };
                Ok(Classification { result, cycle: Some(cycle) })
            }
            Terminal::ExceededBound { value } => plain(self.fallback(&outcome.trajectory, ResourceLimit::ValueBound, value)?),
            Terminal::StepsExhausted { last } => plain(self.fallback(&outcome.trajectory, ResourceLimit::MaxSteps, last as u128)?),
        }
    }

    /// The component anchored at `cycle`, computed at most once.
    pub fn component_of(&self, cycle: &Cycle) -> Result<ComponentResult> {
        let slot = {
            let mut map = self.components.lock().expect("component cache poisoned");
            map.entry(cycle.min()).or_insert_with(|| (cycle.clone(), Slot::default())).1.clone()
        };
        slot.get_or_init(|| inverse_orbit_bfs(cycle, &self.config.limits())).clone()
    }

    /// Every cycle met so far with its component (if finished), by minimum.
    pub fn cycles(&self) -> Vec<(Cycle, Option<Result<ComponentResult>>)> {
        let map = self.components.lock().expect("component cache poisoned");
        let mut out: Vec<_> = map.values().map(|(c, slot)| (c.clone(), slot.get().cloned())).collect();
        out.sort_by_key(|(c, _)| c.min());
        out
    }

    fn fallback(&self, trajectory: &[u64], limit: ResourceLimit, at: u128) -> Result<ComponentResult> {
        for (rung_index, rung) in self.config.fallback.iter().enumerate() {
            match *rung {
                FallbackRung::Forward { bits, max_steps } => {
                    let last = trajectory.len() - 1;
                    if let Some(cert) = forward_wide(trajectory[last] as u128, last as u32, bits, max_steps)? {
                        return Ok(ComponentResult::PotentiallyInfinite { certificate: cert });
                    }
                }
                FallbackRung::Inverse { cutoff, depth, budget } => {
                    for (i, &t) in trajectory.iter().enumerate() {
                        if t > cutoff {
                            break;
                        }
                        if let Some((m, d)) = self.odd_predecessor(rung_index, t, cutoff, depth, budget)? {
                            return Ok(potentially_infinite(m, d, i as u32));
                        }
                    }
                }
            }
        }
        Ok(ComponentResult::Indeterminate(Indeterminate { limit, explored: trajectory.len(), at }))
    }

    fn odd_predecessor(
        &self,
        rung_index: usize,
        t: u64,
        cutoff: u64,
        depth: u32,
        budget: usize,
    ) -> Result<Option<(u128, u32)>> {
        if let Some(hit) = self.odd_search.lock().expect("fallback cache poisoned").get(&(rung_index, t)) {
            return Ok(*hit);
        }
        let hit = odd_predecessor_search(t, cutoff, depth, budget)?;
        self.odd_search.lock().expect("fallback cache poisoned").insert((rung_index, t), hit);
        Ok(hit)
    }
}

/// Continues an orbit from `s^k(n) = m` with 128-bit values, stopping at the
/// first odd value or value whose predecessor is prime. `None` when the value
/// reaches `2^bits`, repeats, cannot be factored, or the steps run out.
fn forward_wide(mut m: u128, mut k: u32, bits: u32, max_steps: usize) -> Result<Option<Certificate>> {
    let bound = 1u128.checked_shl(bits.min(127)).unwrap_or(u128::MAX);
    let mut seen = HashSet::new();
    for _ in 0..=max_steps {
        if m % 2 == 1 {
            return Ok(Some(Certificate::new(m, 0, k)));
        }
        if m > 2 && is_prime_wide(m - 1) {
            return Ok(Some(Certificate::new(BigUint::from(m - 1).pow(2), 1, k)));
        }
        if m >= bound || !seen.insert(m) {
            return Ok(None);
        }
        m = match aliquot_sum_u128(m) {
            Ok(next) => next,
            Err(Error::EffortExceeded { .. } | Error::Overflow(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        k += 1;
    }
    Ok(None)
}

/// Breadth-first search for an odd `m` and `d <= depth` with `s^d(m) = t`.
fn odd_predecessor_search(t: u64, cutoff: u64, depth: u32, budget: usize) -> Result<Option<(u128, u32)>> {
    let mut queue = VecDeque::from([(t, 0u32)]);
    let mut seen = HashSet::from([t]);
    let mut spent = 0;
    while let Some((v, d)) = queue.pop_front() {
        if d >= depth || spent >= budget {
            break;
        }
        spent += 1;
        let image = s_inverse(v)?;
        if let Some(m) = image.odd().next() {
            return Ok(Some((m, d + 1)));
        }
        for pre in image.even() {
            if pre <= cutoff && seen.insert(pre) {
                queue.push_back((pre, d + 1));
            }
        }
    }
    Ok(None)
}

fn potentially_infinite(m: impl Into<BigUint>, j: u32, k: u32) -> ComponentResult {
    ComponentResult::PotentiallyInfinite { certificate: Certificate::new(m, j, k) }
}

/// One-off classification; use a [`Classifier`] to share work across calls.
pub fn classify(n: u64, config: &Config) -> Result<ComponentResult> {
    Classifier::new(config.clone()).classify(n)
}
