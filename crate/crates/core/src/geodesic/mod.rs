//! Exact word lengths.
//!
//! For an element of `Sol(m, 2)` with flow `μ` on `Z^m`, a shortest word
//! traverses every edge `|μ(e)|` times in the direction of its sign and adds a
//! cheapest set of extra edges, each walked once in each direction, that joins
//! the support components and the identity. So
//! `|g| = N + 2·C` where `N` is the weight and `C` the Steiner connection cost.
//! When the support is connected and the flow balanced, `C` is just the
//! distance from the identity to the support.

mod oracle;
mod steiner;

use std::collections::{BTreeSet, HashMap};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::flows::{
    classify, realize_loop, support, BalanceKind, CayleyGraph, EdgeKey, Flow, Lattice, Point,
};
use crate::tower::{SolubleElement, SolubleGroup};
use crate::words::{FreeWord, Letter};

pub use oracle::{bfs_length_oracle, Ball, OracleOutcome};
pub use steiner::{steiner_connect, BoundingBox, SteinerInstance, SteinerTree};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub length: u64,
    #[serde(rename = "N")]
    pub weight_n: u64,
    #[serde(rename = "conn")]
    pub connection_cost: u64,
    pub witness: FreeWord,
}

fn weight_u64<V: Clone + Ord>(flow: &Flow<V>) -> Result<u64> {
    let w = flow.weight();
    w.to_u64().ok_or_else(|| Error::TooLarge(w.to_string()))
}

/// `|g| = N + 2·dist(1, supp μ)` for a nonzero balanced flow with connected support.
pub fn length_connected_balanced(x: &SolubleElement) -> Result<GeodesicResult> {
    let lower = x
        .spec()
        .lower()
        .ok_or_else(|| Error::Unsupported("degree-1 elements have no flow".into()))?;
    let graph = SolubleGroup::new(lower);
    let flow = x.flow().expect("degree ≥ 2 carries a flow");
    if flow.is_zero() {
        return Err(Error::ZeroFlow);
    }
    if classify(&graph, flow).kind != BalanceKind::Balanced {
        return Err(Error::NotBalanced);
    }
    let sup = support(&graph, flow);
    if !sup.is_connected() {
        return Err(Error::DisconnectedSupport {
            components: sup.components.len(),
        });
    }
    let identity = graph.identity();
    let mut nearest: Option<(u64, &SolubleElement)> = None;
    for v in &sup.vertices {
        let d = graph.distance(&identity, v)?;
        if nearest.is_none_or(|(best, _)| d < best) {
            nearest = Some((d, v));
        }
    }
    let (dist, base) = nearest.expect("nonzero flow has support");
    let weight = weight_u64(flow)?;
    let approach = graph.geodesic(&identity, base)?;
    let cycle = realize_loop(&graph, flow, base)?;
    let mut letters = approach.letters().to_vec();
    letters.extend_from_slice(&cycle.letters);
    letters.extend_from_slice(approach.inverse().letters());
    let witness = crate::words::reduce(&letters, x.spec().m)?;
    let length = weight + 2 * dist;
    if witness.len() as u64 != length {
        return Err(Error::Invariant(format!(
            "connected-support witness has length {} but formula gives {length}",
            witness.len()
        )));
    }
    Ok(GeodesicResult {
        length,
        weight_n: weight,
        connection_cost: dist,
        witness,
    })
}

/// The payload of a degree-2 element as a flow on lattice points.
pub fn lattice_flow(x: &SolubleElement) -> Result<Flow<Point>> {
    if x.spec().d != 2 {
        return Err(Error::SpecMismatch(format!(
            "expected a free metabelian element, got {}",
            x.spec()
        )));
    }
    Ok(x.flow()
        .unwrap()
        .map_vertices(|v| v.point().expect("degree-1 vertex").to_vec()))
}

pub fn length_exact_metabelian(x: &SolubleElement) -> Result<GeodesicResult> {
    length_exact_metabelian_with(x, &Limits::default())
}

pub fn length_exact_metabelian_with(x: &SolubleElement, limits: &Limits) -> Result<GeodesicResult> {
    let m = x.spec().m;
    let flow = lattice_flow(x)?;
    if flow.is_zero() {
        return Ok(GeodesicResult {
            length: 0,
            weight_n: 0,
            connection_cost: 0,
            witness: FreeWord::empty(m),
        });
    }
    let lattice = Lattice::new(m);
    let origin = lattice.identity();
    let end = x.endpoint().unwrap().point().unwrap().to_vec();
    let weight = weight_u64(&flow)?;
    let sup = support(&lattice, &flow);
    let mut groups: Vec<Vec<Point>> = sup
        .components
        .iter()
        .map(|c| c.iter().cloned().collect())
        .collect();
    if !sup.vertices.contains(&origin) {
        groups.push(vec![origin.clone()]);
    }
    let inst = SteinerInstance::new(groups)?;
    let tree = steiner_connect(&inst, limits)?;
    let letters = euler_walk(&lattice, &flow, &tree.edges, &origin, &end)?;
    let witness = crate::words::reduce(&letters, m)?;
    let length = weight + 2 * tree.cost;
    if witness.len() as u64 != length {
        return Err(Error::Invariant(format!(
            "witness for {} has length {} but N + 2C = {length}",
            x.canonical_form(),
            witness.len()
        )));
    }
    Ok(GeodesicResult {
        length,
        weight_n: weight,
        connection_cost: tree.cost,
        witness,
    })
}

/// Eulerian walk from `start` to `end` through the flow edges (with
/// multiplicity, in their positive direction) and each connector edge once
/// in each direction (Hierholzer).
fn euler_walk(
    lattice: &Lattice,
    flow: &Flow<Point>,
    connectors: &[EdgeKey<Point>],
    start: &Point,
    end: &Point,
) -> Result<Vec<Letter>> {
    let mut arcs: HashMap<Point, Vec<Letter>> = HashMap::new();
    let mut total = 0usize;
    for (edge, value) in flow.entries() {
        let count = crate::flows::small_magnitude(value)
            .ok_or_else(|| Error::TooLarge(value.to_string()))? as usize;
        let (from, letter) = if value.sign() == num_bigint::Sign::Plus {
            (edge.source.clone(), Letter::positive(edge.generator))
        } else {
            (
                lattice.step(&edge.source, Letter::positive(edge.generator)),
                Letter::negative(edge.generator),
            )
        };
        arcs.entry(from)
            .or_default()
            .extend(std::iter::repeat_n(letter, count));
        total += count;
    }
    for edge in connectors {
        let l = Letter::positive(edge.generator);
        arcs.entry(edge.source.clone()).or_default().push(l);
        arcs.entry(lattice.step(&edge.source, l))
            .or_default()
            .push(l.inv());
        total += 2;
    }
    // pop() takes the smallest letter first
    for list in arcs.values_mut() {
        list.sort_unstable_by(|a, b| b.cmp(a));
    }
    let mut stack: Vec<(Point, Option<Letter>)> = vec![(start.clone(), None)];
    let mut out: Vec<Letter> = Vec::with_capacity(total);
    while let Some((v, _)) = stack.last() {
        let v = v.clone();
        match arcs.get_mut(&v).and_then(|l| l.pop()) {
            Some(l) => stack.push((lattice.step(&v, l), Some(l))),
            None => {
                let (_, via) = stack.pop().unwrap();
                if let Some(l) = via {
                    out.push(l);
                }
            }
        }
    }
    out.reverse();
    if out.len() != total || lattice.walk(start, &out) != *end {
        return Err(Error::Invariant("flow plus connector is not traversable".into()));
    }
    Ok(out)
}

/// Exact length where it is available: degree 1 and 2 always, higher degrees
/// for balanced flows with connected support.
pub fn exact_length(x: &SolubleElement) -> Result<u64> {
    match x.spec().d {
        1 => Ok(Lattice::l1(x.point().unwrap())),
        2 => Ok(length_exact_metabelian(x)?.length),
        _ => {
            if x.is_identity() {
                return Ok(0);
            }
            Ok(length_connected_balanced(x)?.length)
        }
    }
}

/// Vertices of the flow support for a degree-2 element, as lattice points.
pub fn support_points(x: &SolubleElement) -> Result<BTreeSet<Point>> {
    let flow = lattice_flow(x)?;
    Ok(support(&Lattice::new(x.spec().m), &flow).vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{flow_from_word, flow_of_walk};
    use crate::tower::GroupSpec;

    fn sol22() -> GroupSpec {
        GroupSpec::new(2, 2).unwrap()
    }

    fn el(w: &str) -> SolubleElement {
        SolubleElement::from_word(&FreeWord::parse(w, 2).unwrap(), sol22()).unwrap()
    }

    fn from_lattice_flow(f: &Flow<Point>) -> SolubleElement {
        let lifted = f.map_vertices(|p| SolubleElement::from_point(2, p.clone()));
        SolubleElement::from_flow(sol22(), lifted).unwrap()
    }

    #[test]
    fn short_elements() {
        assert_eq!(length_exact_metabelian(&el("1")).unwrap().length, 0);
        let r = length_exact_metabelian(&el("ab")).unwrap();
        assert_eq!((r.length, r.weight_n, r.connection_cost), (2, 2, 0));
        let r = length_exact_metabelian(&el("ABab")).unwrap();
        assert_eq!(r.length, 4);
    }

    #[test]
    fn unit_square_at_distance_three() {
        let g = Lattice::new(2);
        let (sq, _) = flow_of_walk(&g, &vec![3, 0], FreeWord::parse("abAB", 2).unwrap().letters());
        let x = from_lattice_flow(&sq);
        let r = length_exact_metabelian(&x).unwrap();
        assert_eq!((r.length, r.weight_n, r.connection_cost), (10, 4, 3));
        let c = length_connected_balanced(&x).unwrap();
        assert_eq!(c.length, 10);
        assert_eq!(flow_from_word(&g, &r.witness).0, sq);
    }

    #[test]
    fn connected_balanced_preconditions() {
        assert!(matches!(length_connected_balanced(&el("1")), Err(Error::ZeroFlow)));
        assert!(matches!(length_connected_balanced(&el("ab")), Err(Error::NotBalanced)));
        let g = Lattice::new(2);
        let w = FreeWord::parse("abAB", 2).unwrap();
        let two = flow_of_walk(&g, &vec![0, 0], w.letters())
            .0
            .add(&flow_of_walk(&g, &vec![5, 0], w.letters()).0);
        assert!(matches!(
            length_connected_balanced(&from_lattice_flow(&two)),
            Err(Error::DisconnectedSupport { components: 2 })
        ));
        // two squares 5 apart: N = 8, connector of 4 edges to join them, origin on the first
        assert_eq!(length_exact_metabelian(&from_lattice_flow(&two)).unwrap().length, 16);
    }

    #[test]
    fn witness_is_reduced_and_sound() {
        for w in ["abAAbaBB", "aabbAABB", "abABabAB", "bbaBaBBABAAbAbbabaBB"] {
            let x = el(w);
            let r = length_exact_metabelian(&x).unwrap();
            assert_eq!(r.witness.len() as u64, r.length);
            assert_eq!(el(&r.witness.to_string()), x);
            assert!(r.length <= FreeWord::parse(w, 2).unwrap().len() as u64);
        }
    }

    #[test]
    fn serialization_field_names() {
        let r = length_exact_metabelian(&el("ab")).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"length":2,"N":2,"conn":0,"witness":"ab"}"#
        );
    }
}
