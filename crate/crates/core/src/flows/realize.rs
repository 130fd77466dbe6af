use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::{classify, flow_of_walk, support, BalanceKind, CayleyGraph, Flow};
use crate::error::{Error, Result};
use crate::words::Letter;

/// Largest weight a realized loop may have.
const MAX_LOOP_WEIGHT: u64 = 1 << 28;

/// A walk in a Cayley graph given by its start vertex and edge labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk<V> {
    pub start: V,
    pub letters: Vec<Letter>,
}

impl<V: Clone + Ord> Walk<V> {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn flow<G: CayleyGraph<Vertex = V>>(&self, graph: &G) -> Flow<V> {
        flow_of_walk(graph, &self.start, &self.letters).0
    }

    pub fn end<G: CayleyGraph<Vertex = V>>(&self, graph: &G) -> V {
        graph.walk(&self.start, &self.letters)
    }
}

/// A closed walk at `base` made of P-edges that traverses every edge `e`
/// exactly `μ(e)` times in its positive direction.
///
/// Follows the inductive construction: walk along P-edges until a vertex
/// repeats, cut out that simple cycle `q`, realize each component of
/// `μ − χ_q` at its first vertex on `q`, and splice the subloops into `q`.
/// When several P-edges leave a vertex the first letter in alphabet order wins.
pub fn realize_loop<G: CayleyGraph>(
    graph: &G,
    flow: &Flow<G::Vertex>,
    base: &G::Vertex,
) -> Result<Walk<G::Vertex>> {
    if flow.is_zero() {
        return Err(Error::ZeroFlow);
    }
    if classify(graph, flow).kind != BalanceKind::Balanced {
        return Err(Error::NotBalanced);
    }
    let sup = support(graph, flow);
    if !sup.is_connected() {
        return Err(Error::DisconnectedSupport {
            components: sup.components.len(),
        });
    }
    if !sup.vertices.contains(base) {
        return Err(Error::BaseOutsideSupport);
    }
    let weight = flow.weight();
    if weight.to_u64().is_none_or(|w| w > MAX_LOOP_WEIGHT) {
        return Err(Error::TooLarge(weight.to_string()));
    }
    let letters = realize_connected(graph, flow.clone(), base)?;
    Ok(Walk {
        start: base.clone(),
        letters,
    })
}

/// First P-edge leaving `at`, in alphabet order.
fn next_p_edge<G: CayleyGraph>(graph: &G, flow: &Flow<G::Vertex>, at: &G::Vertex) -> Option<Letter> {
    Letter::alphabet(graph.rank()).find(|&l| {
        let (edge, forward) = super::directed_edge(graph, at, l);
        let v = flow.get(&edge);
        if forward {
            v.is_positive()
        } else {
            v.is_negative()
        }
    })
}

fn realize_connected<G: CayleyGraph>(
    graph: &G,
    mut flow: Flow<G::Vertex>,
    base: &G::Vertex,
) -> Result<Vec<Letter>> {
    // walk P-edges from base until some vertex repeats
    let mut seen: HashMap<G::Vertex, usize> = HashMap::new();
    let mut path_vertices = vec![base.clone()];
    let mut path_letters: Vec<Letter> = Vec::new();
    seen.insert(base.clone(), 0);
    let cycle_start = loop {
        let at = path_vertices.last().unwrap();
        let letter = next_p_edge(graph, &flow, at)
            .ok_or_else(|| Error::Invariant("balanced flow has a vertex without outgoing P-edge".into()))?;
        let next = graph.step(at, letter);
        path_letters.push(letter);
        if let Some(&i) = seen.get(&next) {
            break i;
        }
        seen.insert(next.clone(), path_vertices.len());
        path_vertices.push(next);
    };
    let cycle_vertices: Vec<G::Vertex> = path_vertices[cycle_start..].to_vec();
    let cycle_letters: Vec<Letter> = path_letters[cycle_start..].to_vec();

    // μ' = μ − χ_q
    let mut at = cycle_vertices[0].clone();
    for &l in &cycle_letters {
        let (edge, forward) = super::directed_edge(graph, &at, l);
        let delta = if forward { -BigInt::one() } else { BigInt::one() };
        flow.add_at(edge, &delta);
        at = graph.step(&at, l);
    }

    let mut spliced: Vec<Letter> = Vec::new();
    if flow.is_zero() {
        spliced = cycle_letters;
    } else {
        let sup = support(graph, &flow);
        // every component meets q; attach it at its first vertex along q
        let mut attach: HashMap<usize, Vec<Letter>> = HashMap::new();
        let mut attached: BTreeSet<usize> = BTreeSet::new();
        for (pos, v) in cycle_vertices.iter().enumerate() {
            if let Some(c) = sup.component_of(v) {
                if attached.insert(c) {
                    let part = flow.restrict(&sup.components[c]);
                    let sub = realize_connected(graph, part, v)?;
                    attach.insert(pos, sub);
                }
            }
        }
        if attached.len() != sup.components.len() {
            return Err(Error::Invariant(
                "a component of the residual flow does not meet the extracted cycle".into(),
            ));
        }
        for (pos, &l) in cycle_letters.iter().enumerate() {
            if let Some(sub) = attach.remove(&pos) {
                spliced.extend(sub);
            }
            spliced.push(l);
        }
    }

    // rotate the closed walk (currently at cycle_vertices[0]) to start at base
    let loop_start = &cycle_vertices[0];
    if loop_start == base {
        return Ok(spliced);
    }
    let mut at = loop_start.clone();
    for i in 0..spliced.len() {
        if at == *base {
            spliced.rotate_left(i);
            return Ok(spliced);
        }
        at = graph.step(&at, spliced[i]);
    }
    Err(Error::Invariant("realized loop does not visit its base".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{flow_from_word, Lattice, Point};
    use crate::words::FreeWord;
    use num_bigint::BigUint;

    fn z2() -> Lattice {
        Lattice::new(2)
    }

    fn square(at: [i64; 2]) -> Flow<Point> {
        flow_of_walk(&z2(), &at.to_vec(), FreeWord::parse("abAB", 2).unwrap().letters()).0
    }

    fn check(flow: &Flow<Point>, base: Point) -> Walk<Point> {
        let walk = realize_loop(&z2(), flow, &base).unwrap();
        assert_eq!(walk.start, base);
        assert_eq!(walk.end(&z2()), base);
        assert_eq!(walk.flow(&z2()), *flow);
        assert_eq!(BigUint::from(walk.len()), flow.weight());
        walk
    }

    #[test]
    fn unit_square() {
        let w = check(&square([0, 0]), vec![1, 1]);
        assert_eq!(w.len(), 4);
    }

    #[test]
    fn doubled_square() {
        let f = square([0, 0]).scale(&BigInt::from(2));
        assert_eq!(check(&f, vec![0, 0]).len(), 8);
    }

    #[test]
    fn figure_eight() {
        let f = square([0, 0]).add(&square([1, 1]));
        let w = check(&f, vec![2, 2]);
        assert_eq!(w.len(), 8);
    }

    #[test]
    fn errors() {
        let g = z2();
        assert!(matches!(realize_loop(&g, &Flow::zero(2), &vec![0, 0]), Err(Error::ZeroFlow)));
        let (open, _) = flow_from_word(&g, &FreeWord::parse("ab", 2).unwrap());
        assert!(matches!(realize_loop(&g, &open, &vec![0, 0]), Err(Error::NotBalanced)));
        let two = square([0, 0]).add(&square([5, 5]));
        assert!(matches!(
            realize_loop(&g, &two, &vec![0, 0]),
            Err(Error::DisconnectedSupport { components: 2 })
        ));
        assert!(matches!(
            realize_loop(&g, &square([0, 0]), &vec![3, 3]),
            Err(Error::BaseOutsideSupport)
        ));
    }
}
