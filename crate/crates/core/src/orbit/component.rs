use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::Cycle;
use crate::arith::{factor_wide, FactorConfig};
use crate::error::{Error, Result};
use crate::inverse::s_inverse;

/// An odd `m` with `s^k(n) = s^j(m)`.
///
/// `m` may exceed 128 bits when it is the square of a large prime. In JSON it
/// is a number when it fits in 64 bits and a decimal string otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "wide_decimal")]
    pub m: BigUint,
    pub j: u32,
    pub k: u32,
}

impl Certificate {
    pub fn new(m: impl Into<BigUint>, j: u32, k: u32) -> Self {
        Certificate { m: m.into(), j, k }
    }
}

mod wide_decimal {
    use num_bigint::BigUint;
    use serde::{de, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match u64::try_from(m) {
            Ok(v) => s.serialize_u64(v),
            Err(_) => s.serialize_str(&m.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        d.deserialize_any(Visitor)
    }

    struct Visitor;

    impl de::Visitor<'_> for Visitor {
        type Value = BigUint;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a non-negative integer or its decimal string")
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigUint, E> {
            Ok(v.into())
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<BigUint, E> {
            v.parse().map_err(|_| E::custom(format!("not a decimal integer: {v:?}")))
        }
    }
}

/// A finite connected component: every node, its out-edge, and the cycle it
/// drains into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteComponent {
    pub nodes: Vec<u64>,
    pub edges: Vec<(u64, u64)>,
    pub anchor: Cycle,
}

impl FiniteComponent {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, v: u64) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    /// A component that is exactly its cycle.
    pub fn is_isolated(&self) -> bool {
        self.nodes.len() == self.anchor.order()
    }

    /// Directed graph text, vertices and edges in ascending order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph aliquot {\n");
        for v in &self.nodes {
            out.push_str(&format!("  {v};\n"));
        }
        for (from, to) in &self.edges {
            out.push_str(&format!("  {from} -> {to};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceLimit {
    MaxNodes,
    MaxValue,
    MaxSteps,
    ValueBound,
}

impl ResourceLimit {
    pub fn as_str(self) -> &'static str {
        match self {
            ResourceLimit::MaxNodes => "max_nodes",
            ResourceLimit::MaxValue => "max_value",
            ResourceLimit::MaxSteps => "max_steps",
            ResourceLimit::ValueBound => "value_bound",
        }
    }
}

/// Which limit fired and where the search stood.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indeterminate {
    pub limit: ResourceLimit,
    /// Nodes explored so far (inverse search) or trajectory length (forward).
    pub explored: usize,
    /// The value that tripped the limit, or the last trajectory value.
    pub at: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ComponentResult {
    Finite(FiniteComponent),
    PotentiallyInfinite { certificate: Certificate },
    Indeterminate(Indeterminate),
}

impl ComponentResult {
    pub fn status(&self) -> &'static str {
        match self {
            ComponentResult::Finite(_) => "finite",
            ComponentResult::PotentiallyInfinite { .. } => "potentially_infinite",
            ComponentResult::Indeterminate(_) => "indeterminate",
        }
    }
}

/// Caps for the predecessor search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_value: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 1_000_000, max_value: 1 << 62 }
    }
}

/// `s(x)` for a 128-bit argument.
pub fn aliquot_sum_u128(x: u128) -> Result<u128> {
    if x == 0 {
        return Err(Error::Domain("s(0) is undefined".into()));
    }
    let factors = factor_wide(x, &FactorConfig::default())?;
    let mut sigma = 1u128;
    for (p, e) in factors {
        let mut term = 1u128;
        let mut pk = 1u128;
        for _ in 0..e {
            pk = pk.checked_mul(p).ok_or(Error::Overflow("aliquot_sum_u128"))?;
            term = term.checked_add(pk).ok_or(Error::Overflow("aliquot_sum_u128"))?;
        }
        sigma = sigma.checked_mul(term).ok_or(Error::Overflow("aliquot_sum_u128"))?;
    }
    Ok(sigma - x)
}

/// `s(x)` for `x` below 2^128, or a perfect square whose root is below 2^128.
/// Anything else cannot be factored here and is reported as overflow.
pub fn aliquot_sum_big(x: &BigUint) -> Result<BigUint> {
    if let Ok(small) = u128::try_from(x) {
        return aliquot_sum_u128(small).map(BigUint::from);
    }
    let root = x.sqrt();
    let root_small = match u128::try_from(&root) {
        Ok(r) if &root * &root == *x => r,
        _ => return Err(Error::Overflow("aliquot sum above 128 bits")),
    };
    let mut sigma = BigUint::from(1u32);
    for (p, e) in factor_wide(root_small, &FactorConfig::default())? {
        let p = BigUint::from(p);
        let top = p.pow(2 * e + 1);
        sigma *= (top - 1u32) / (&p - 1u32);
    }
    Ok(sigma - x)
}

fn iterate(mut x: BigUint, times: u32) -> Result<BigUint> {
    for _ in 0..times {
        x = aliquot_sum_big(&x)?;
    }
    Ok(x)
}

/// True iff `m` is odd and `s^k(n) = s^j(m)`. A value that cannot be
/// factored along the way is an error, not a failed check.
pub fn verify_certificate(n: u64, cert: &Certificate) -> Result<bool> {
    if !cert.m.bit(0) {
        return Ok(false);
    }
    if n == 0 {
        return Err(Error::Domain("certificates need n >= 1".into()));
    }
    Ok(iterate(BigUint::from(n), cert.k)? == iterate(cert.m.clone(), cert.j)?)
}

struct Node {
    /// Steps to reach the cycle.
    depth: u32,
    /// Cycle position reached after `depth` steps.
    entry: usize,
    /// `s(v)`.
    next: u64,
}

/// Breadth-first search over predecessors starting from a cycle.
///
/// Finite when the search runs dry. Potentially infinite as soon as an odd
/// predecessor appears; the certificate is relative to the cycle minimum,
/// i.e. `s^0(min) = s^j(m)`.
pub fn inverse_orbit_bfs(cycle: &Cycle, limits: &Limits) -> Result<ComponentResult> {
    let order = cycle.order();
    let to_min = |entry: usize| ((order - entry) % order) as u32;
    if let Some(pos) = cycle.elements().iter().position(|&e| e % 2 == 1) {
        let certificate = Certificate::new(cycle.elements()[pos], to_min(pos), 0);
        return Ok(ComponentResult::PotentiallyInfinite { certificate });
    }
    let mut nodes: HashMap<u64, Node> = HashMap::new();
    let mut queue = VecDeque::new();
    for (i, &e) in cycle.elements().iter().enumerate() {
        let next = cycle.elements()[(i + 1) % order];
        nodes.insert(e, Node { depth: 0, entry: i, next });
        queue.push_back(e);
    }
    if nodes.len() > limits.max_nodes {
        return Ok(ComponentResult::Indeterminate(Indeterminate {
            limit: ResourceLimit::MaxNodes,
            explored: nodes.len(),
            at: cycle.min() as u128,
        }));
    }
    while let Some(v) = queue.pop_front() {
        let (depth, entry) = {
            let node = &nodes[&v];
            (node.depth + 1, node.entry)
        };
        let image = s_inverse(v)?;
        if let Some(m) = image.odd().next() {
            let certificate = Certificate::new(m, depth + to_min(entry), 0);
            return Ok(ComponentResult::PotentiallyInfinite { certificate });
        }
        for pre in image.even() {
            if nodes.contains_key(&pre) {
                continue;
            }
            if pre > limits.max_value {
                return Ok(ComponentResult::Indeterminate(Indeterminate {
                    limit: ResourceLimit::MaxValue,
                    explored: nodes.len(),
                    at: pre as u128,
                }));
            }
            nodes.insert(pre, Node { depth, entry, next: v });
            if nodes.len() > limits.max_nodes {
                return Ok(ComponentResult::Indeterminate(Indeterminate {
                    limit: ResourceLimit::MaxNodes,
                    explored: nodes.len(),
                    at: pre as u128,
                }));
            }
            queue.push_back(pre);
        }
    }
    let mut edges: Vec<(u64, u64)> = nodes.iter().map(|(&v, node)| (v, node.next)).collect();
    edges.sort_unstable();
    let nodes: Vec<u64> = edges.iter().map(|&(v, _)| v).collect();
    Ok(ComponentResult::Finite(FiniteComponent { nodes, edges, anchor: cycle.clone() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::aliquot_sum;

    #[test]
    fn certificate_examples() {
        assert!(verify_certificate(16, &Certificate::new(15u32, 0, 1)).unwrap());
        assert!(verify_certificate(12, &Certificate::new(15u32, 0, 2)).unwrap());
        assert!(!verify_certificate(16, &Certificate::new(15u32, 1, 1)).unwrap());
        assert!(!verify_certificate(16, &Certificate::new(16u32, 0, 0)).unwrap());
    }

    #[test]
    fn wide_certificate() {
        let p = 1_000_000_000_039u128;
        let n = 1_000_000_000_040u64;
        assert!(verify_certificate(n, &Certificate::new(p * p, 1, 0)).unwrap());
    }

    #[test]
    fn certificate_beyond_128_bits() {
        // p = 2^89 - 1 is prime, so s(p²) = 2^89 and s(2^89) = 2^89 - 1 = p.
        let p = (1u128 << 89) - 1;
        let m = BigUint::from(p).pow(2);
        assert!(m.bits() > 128);
        assert_eq!(aliquot_sum_big(&m).unwrap(), BigUint::from(1u128 << 89));
        let cert = Certificate::new(m.clone(), 2, 0);
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.starts_with(r#"{"m":""#));
        assert_eq!(serde_json::from_str::<Certificate>(&text).unwrap(), cert);
        assert!(aliquot_sum_big(&(m + 2u32)).is_err());
    }

    #[test]
    fn certificate_json_forms() {
        let small = Certificate::new(15u32, 0, 1);
        assert_eq!(serde_json::to_string(&small).unwrap(), r#"{"m":15,"j":0,"k":1}"#);
        let mid = Certificate::new(21804649376995124641u128, 1, 30);
        let text = serde_json::to_string(&mid).unwrap();
        assert_eq!(text, r#"{"m":"21804649376995124641","j":1,"k":30}"#);
        assert_eq!(serde_json::from_str::<Certificate>(&text).unwrap(), mid);
        assert!(serde_json::from_str::<Certificate>(r#"{"m":"x1","j":0,"k":0}"#).is_err());
    }

    #[test]
    fn isolated_perfect_number() {
        let result = inverse_orbit_bfs(&Cycle::from_orbit(vec![28]), &Limits::default()).unwrap();
        let ComponentResult::Finite(c) = result else { panic!("expected finite, got {result:?}") };
        assert_eq!(c.nodes, vec![28]);
        assert_eq!(c.edges, vec![(28, 28)]);
        assert!(c.is_isolated());
        assert_eq!(c.to_dot(), "digraph aliquot {\n  28;\n  28 -> 28;\n}\n");
    }

    #[test]
    fn six_has_odd_predecessor() {
        let result = inverse_orbit_bfs(&Cycle::from_orbit(vec![6]), &Limits::default()).unwrap();
        let certificate = Certificate::new(25u32, 1, 0);
        assert!(verify_certificate(6, &certificate).unwrap());
        assert_eq!(result, ComponentResult::PotentiallyInfinite { certificate });
    }

    #[test]
    fn first_amicable_pair_is_consistent() {
        let cycle = Cycle::from_orbit(vec![284, 220]);
        assert_eq!(cycle.elements(), &[220, 284]);
        match inverse_orbit_bfs(&cycle, &Limits::default()).unwrap() {
            ComponentResult::PotentiallyInfinite { certificate } => {
                assert!(verify_certificate(220, &certificate).unwrap());
            }
            ComponentResult::Finite(c) => {
                for &(v, w) in &c.edges {
                    assert_eq!(aliquot_sum(v).unwrap(), w);
                }
            }
            ComponentResult::Indeterminate(_) => {}
        }
    }

    #[test]
    fn node_cap_reports_indeterminate() {
        let limits = Limits { max_nodes: 1, max_value: 1 << 62 };
        let r = inverse_orbit_bfs(&Cycle::from_orbit(vec![28]), &limits).unwrap();
        assert!(matches!(r, ComponentResult::Finite(_)));
        let r = inverse_orbit_bfs(&Cycle::from_orbit(vec![356408, 399592]), &limits).unwrap();
        assert!(matches!(r, ComponentResult::Indeterminate(Indeterminate { limit: ResourceLimit::MaxNodes, .. })));
    }
}
