//! Integer flows on Cayley graphs.
//!
//! A flow assigns an integer to every directed edge with `μ(e⁻¹) = −μ(e)`.
//! Only the positively labelled orientation `(source, generator)` is stored;
//! the value on the inverse edge is implicit. Zero values are never stored,
//! so two flows are equal exactly when their maps are equal.

mod graph;
mod realize;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{FreeWord, Letter};

pub use graph::{lattice_path, parse_point, point_form, CayleyGraph, Lattice, Point};
pub use realize::{realize_loop, Walk};

/// The positively oriented edge from `source` to `source · a_generator`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey<V> {
    pub source: V,
    /// Zero-based generator index.
    pub generator: usize,
}

impl<V> EdgeKey<V> {
    pub fn new(source: V, generator: usize) -> Self {
        EdgeKey { source, generator }
    }
}

/// A directed traversal of one edge: the stored key plus the direction.
/// `forward` means from `key.source` to its `a_generator` neighbour.
pub(crate) fn directed_edge<G: CayleyGraph>(
    graph: &G,
    at: &G::Vertex,
    letter: Letter,
) -> (EdgeKey<G::Vertex>, bool) {
    if letter.is_inverse() {
        (EdgeKey::new(graph.step(at, letter), letter.generator()), false)
    } else {
        (EdgeKey::new(at.clone(), letter.generator()), true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flow<V> {
    rank: usize,
    values: BTreeMap<EdgeKey<V>, BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceKind {
    Balanced,
    SemiBalanced,
    Unconstrained,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport<V> {
    pub kind: BalanceKind,
    pub v_minus: Option<V>,
    pub v_plus: Option<V>,
}

/// Union of the edges carrying nonzero flow together with their endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGraph<V> {
    pub vertices: BTreeSet<V>,
    pub edges: BTreeSet<EdgeKey<V>>,
    /// Connected classes, each sorted, listed by smallest vertex.
    pub components: Vec<BTreeSet<V>>,
}

impl<V: Ord> SupportGraph<V> {
    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    pub fn component_of(&self, v: &V) -> Option<usize> {
        self.components.iter().position(|c| c.contains(v))
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    source: String,
    gen: usize,
    val: String,
}

impl<V: Clone + Ord> Flow<V> {
    pub fn zero(rank: usize) -> Self {
        Flow {
            rank,
            values: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of stored (nonzero) edges.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, edge: &EdgeKey<V>) -> BigInt {
        self.values.get(edge).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&EdgeKey<V>, &BigInt)> {
        self.values.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = &EdgeKey<V>> {
        self.values.keys()
    }

    pub fn add_at(&mut self, edge: EdgeKey<V>, delta: &BigInt) {
        if delta.is_zero() {
            return;
        }
        match self.values.entry(edge) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(delta.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += delta;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_unit(&mut self, edge: EdgeKey<V>, forward: bool) {
        let delta = if forward { BigInt::one() } else { -BigInt::one() };
        self.add_at(edge, &delta);
    }

    pub fn remove(&mut self, edge: &EdgeKey<V>) -> Option<BigInt> {
        self.values.remove(edge)
    }

    pub fn add(&self, other: &Flow<V>) -> Flow<V> {
        let mut out = self.clone();
        for (k, v) in &other.values {
            out.add_at(k.clone(), v);
        }
        out
    }

    pub fn add_assign(&mut self, other: &Flow<V>) {
        for (k, v) in &other.values {
            self.add_at(k.clone(), v);
        }
    }

    pub fn negate(&self) -> Flow<V> {
        Flow {
            rank: self.rank,
            values: self.values.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn scale(&self, factor: &BigInt) -> Flow<V> {
        if factor.is_zero() {
            return Flow::zero(self.rank);
        }
        Flow {
            rank: self.rank,
            values: self
                .values
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
        }
    }

    /// Sum of flows through the P-edges, i.e. `Σ |μ(e)|` over stored edges.
    pub fn weight(&self) -> BigUint {
        self.values.values().map(|v| v.magnitude().clone()).sum()
    }

    /// The restriction to edges whose source lies in `vertices`.
    pub fn restrict(&self, vertices: &BTreeSet<V>) -> Flow<V> {
        Flow {
            rank: self.rank,
            values: self
                .values
                .iter()
                .filter(|(k, _)| vertices.contains(&k.source))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn map_vertices<W: Clone + Ord>(&self, mut f: impl FnMut(&V) -> W) -> Flow<W> {
        Flow {
            rank: self.rank,
            values: self
                .values
                .iter()
                .map(|(k, v)| (EdgeKey::new(f(&k.source), k.generator), v.clone()))
                .collect(),
        }
    }
}

/// Adds the characteristic flow of one step and returns the new position.
pub fn push_step<G: CayleyGraph>(
    graph: &G,
    flow: &mut Flow<G::Vertex>,
    at: &G::Vertex,
    letter: Letter,
) -> G::Vertex {
    let (edge, forward) = directed_edge(graph, at, letter);
    flow.add_unit(edge, forward);
    graph.step(at, letter)
}

/// Flow induced by the walk from `start` labelled `letters`, with its endpoint.
pub fn flow_of_walk<G: CayleyGraph>(
    graph: &G,
    start: &G::Vertex,
    letters: &[Letter],
) -> (Flow<G::Vertex>, G::Vertex) {
    let mut flow = Flow::zero(graph.rank());
    let mut at = start.clone();
    for &l in letters {
        at = push_step(graph, &mut flow, &at, l);
    }
    (flow, at)
}

/// Flow induced by `word` read from the identity, with the endpoint.
pub fn flow_from_word<G: CayleyGraph>(graph: &G, word: &FreeWord) -> (Flow<G::Vertex>, G::Vertex) {
    flow_of_walk(graph, &graph.identity(), word.letters())
}

/// Moves every edge `(s, i)` to `(by · s, i)`.
pub fn translate<G: CayleyGraph>(
    graph: &G,
    flow: &Flow<G::Vertex>,
    by: &G::Vertex,
) -> Flow<G::Vertex> {
    if *by == graph.identity() {
        return flow.clone();
    }
    flow.map_vertices(|s| graph.multiply(by, s))
}

/// Sum of flows through edges ending at `v`.
pub fn inflow<G: CayleyGraph>(graph: &G, flow: &Flow<G::Vertex>, v: &G::Vertex) -> BigInt {
    let mut total = BigInt::zero();
    for i in 0..graph.rank() {
        // edge (v, i) leaves v
        total -= flow.get(&EdgeKey::new(v.clone(), i));
        // edge (v a_i^{-1}, i) enters v
        let prev = graph.step(v, Letter::negative(i));
        total += flow.get(&EdgeKey::new(prev, i));
    }
    total
}

/// All vertices with nonzero inflow.
pub fn inflows<G: CayleyGraph>(
    graph: &G,
    flow: &Flow<G::Vertex>,
) -> HashMap<G::Vertex, BigInt> {
    let mut map: HashMap<G::Vertex, BigInt> = HashMap::new();
    for (edge, value) in flow.entries() {
        let target = graph.step(&edge.source, Letter::positive(edge.generator));
        *map.entry(target).or_default() += value;
        *map.entry(edge.source.clone()).or_default() -= value;
    }
    map.retain(|_, v| !v.is_zero());
    map
}

pub fn classify<G: CayleyGraph>(graph: &G, flow: &Flow<G::Vertex>) -> BalanceReport<G::Vertex> {
    let map = inflows(graph, flow);
    let unconstrained = BalanceReport {
        kind: BalanceKind::Unconstrained,
        v_minus: None,
        v_plus: None,
    };
    match map.len() {
        0 => BalanceReport {
            kind: BalanceKind::Balanced,
            v_minus: None,
            v_plus: None,
        },
        2 => {
            let mut minus = None;
            let mut plus = None;
            for (v, val) in map {
                if val == BigInt::one() {
                    plus = Some(v);
                } else if val == -BigInt::one() {
                    minus = Some(v);
                }
            }
            match (minus, plus) {
                (Some(m), Some(p)) => BalanceReport {
                    kind: BalanceKind::SemiBalanced,
                    v_minus: Some(m),
                    v_plus: Some(p),
                },
                _ => unconstrained,
            }
        }
        _ => unconstrained,
    }
}

/// Support subgraph with connected components from union-find over edge endpoints.
pub fn support<G: CayleyGraph>(graph: &G, flow: &Flow<G::Vertex>) -> SupportGraph<G::Vertex> {
    let mut index: HashMap<G::Vertex, usize> = HashMap::new();
    let mut verts: Vec<G::Vertex> = Vec::new();
    let mut id = |v: G::Vertex, verts: &mut Vec<G::Vertex>| -> usize {
        *index.entry(v.clone()).or_insert_with(|| {
            verts.push(v);
            verts.len() - 1
        })
    };
    let mut pairs = Vec::with_capacity(flow.len());
    for edge in flow.edges() {
        let target = graph.step(&edge.source, Letter::positive(edge.generator));
        let a = id(edge.source.clone(), &mut verts);
        let b = id(target, &mut verts);
        pairs.push((a, b));
    }
    let mut uf = UnionFind::new(verts.len());
    for (a, b) in pairs {
        uf.union(a, b);
    }
    let mut classes: HashMap<usize, BTreeSet<G::Vertex>> = HashMap::new();
    for (i, v) in verts.iter().enumerate() {
        classes.entry(uf.find(i)).or_default().insert(v.clone());
    }
    let mut components: Vec<BTreeSet<G::Vertex>> = classes.into_values().collect();
    components.sort_by(|a, b| a.first().cmp(&b.first()));
    SupportGraph {
        vertices: verts.into_iter().collect(),
        edges: flow.edges().cloned().collect(),
        components,
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    /// Adds a singleton and returns its index.
    pub(crate) fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.rank.push(0);
        self.parent.len() - 1
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// A word inducing `flow`, for flows that are balanced or semi-balanced from the identity.
pub fn word_from_flow<G: CayleyGraph>(graph: &G, flow: &Flow<G::Vertex>) -> Result<FreeWord> {
    let report = classify(graph, flow);
    match report.kind {
        BalanceKind::Unconstrained => Err(Error::Unconstrained),
        BalanceKind::Balanced => word_from_balanced(graph, flow),
        BalanceKind::SemiBalanced => {
            let identity = graph.identity();
            if report.v_minus.as_ref() != Some(&identity) {
                return Err(Error::NotBasedAtIdentity);
            }
            let end = report.v_plus.expect("semi-balanced has v_plus");
            // close the flow with a path Q from the endpoint back to 1, then append Q^{-1}
            let back = graph.geodesic(&end, &identity)?;
            let (closing, _) = flow_of_walk(graph, &end, back.letters());
            let balanced = flow.add(&closing);
            let w = word_from_balanced(graph, &balanced)?;
            Ok(w.concat(&back.inverse()))
        }
    }
}

fn word_from_balanced<G: CayleyGraph>(graph: &G, flow: &Flow<G::Vertex>) -> Result<FreeWord> {
    let identity = graph.identity();
    let sup = support(graph, flow);
    let mut anchored = Vec::with_capacity(sup.components.len());
    for comp in &sup.components {
        let mut best: Option<(u64, &G::Vertex)> = None;
        for v in comp {
            let d = graph.distance(&identity, v)?;
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        let (d, v) = best.expect("components are nonempty");
        anchored.push((d, v.clone(), comp));
    }
    anchored.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let mut letters: Vec<Letter> = Vec::new();
    for (_, base, comp) in anchored {
        let approach = graph.geodesic(&identity, &base)?;
        let part = flow.restrict(comp);
        let cycle = realize_loop(graph, &part, &base)?;
        letters.extend_from_slice(approach.letters());
        letters.extend_from_slice(&cycle.letters);
        letters.extend(approach.inverse().letters().iter().copied());
    }
    crate::words::reduce(&letters, graph.rank())
}

/// Canonical text: a JSON array of `{"source","gen","val"}` records sorted by
/// `(source form, gen)`. `gen` is one-based and `val` a decimal string.
pub fn canonical_form<G: CayleyGraph>(graph: &G, flow: &Flow<G::Vertex>) -> String {
    let mut records: Vec<Record> = flow
        .entries()
        .map(|(k, v)| Record {
            source: graph.vertex_form(&k.source),
            gen: k.generator + 1,
            val: v.to_string(),
        })
        .collect();
    records.sort_by(|a, b| (a.source.as_str(), a.gen).cmp(&(b.source.as_str(), b.gen)));
    serde_json::to_string(&records).expect("records serialize")
}

pub fn parse_canonical<G: CayleyGraph>(graph: &G, text: &str) -> Result<Flow<G::Vertex>> {
    let records: Vec<Record> = serde_json::from_str(text)?;
    let mut flow = Flow::zero(graph.rank());
    for r in records {
        if r.gen == 0 || r.gen > graph.rank() {
            return Err(Error::GeneratorOutOfRange {
                index: r.gen,
                rank: graph.rank(),
            });
        }
        let val: BigInt = r
            .val
            .parse()
            .map_err(|e| Error::Parse(format!("flow value {:?}: {e}", r.val)))?;
        if val.sign() == Sign::NoSign {
            return Err(Error::Parse("zero value in canonical flow".into()));
        }
        let source = graph.parse_vertex(&r.source)?;
        flow.add_at(EdgeKey::new(source, r.gen - 1), &val);
    }
    Ok(flow)
}

/// Absolute value of one stored entry as `u64`, if it fits.
pub(crate) fn small_magnitude(v: &BigInt) -> Option<u64> {
    let (_, digits) = v.abs().to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => Some(digits[0]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Lattice {
        Lattice::new(2)
    }

    fn word(s: &str) -> FreeWord {
        FreeWord::parse(s, 2).unwrap()
    }

    fn unit_square_at(x: i64, y: i64) -> Flow<Point> {
        let g = z2();
        flow_of_walk(&g, &vec![x, y], word("abAB").letters()).0
    }

    #[test]
    fn flow_of_trivial_words() {
        let g = z2();
        let (f, end) = flow_from_word(&g, &word("1"));
        assert!(f.is_zero());
        assert_eq!(end, vec![0, 0]);
        let (f, end) = flow_from_word(&g, &word("aA"));
        assert!(f.is_zero());
        assert_eq!(end, vec![0, 0]);
    }

    #[test]
    fn commutator_flow_is_unit_square() {
        let g = z2();
        let (f, end) = flow_from_word(&g, &word("ABab"));
        assert_eq!(end, vec![0, 0]);
        assert_eq!(f.weight(), BigUint::from(4u32));
        assert_eq!(f.len(), 4);
        // A B a b from the origin: (0,0)->(-1,0)->(-1,-1)->(0,-1)->(0,0)
        assert_eq!(f.get(&EdgeKey::new(vec![-1, 0], 0)), BigInt::from(-1));
        assert_eq!(f.get(&EdgeKey::new(vec![-1, -1], 1)), BigInt::from(-1));
        assert_eq!(f.get(&EdgeKey::new(vec![-1, -1], 0)), BigInt::from(1));
        assert_eq!(f.get(&EdgeKey::new(vec![0, -1], 1)), BigInt::from(1));
        assert_eq!(classify(&g, &f).kind, BalanceKind::Balanced);
        let sup = support(&g, &f);
        assert_eq!(sup.vertices.len(), 4);
        assert_eq!(sup.edges.len(), 4);
        assert_eq!(sup.components.len(), 1);
    }

    #[test]
    fn classify_examples() {
        let g = z2();
        assert_eq!(classify(&g, &Flow::zero(2)).kind, BalanceKind::Balanced);
        let (f, _) = flow_from_word(&g, &word("ab"));
        let r = classify(&g, &f);
        assert_eq!(r.kind, BalanceKind::SemiBalanced);
        assert_eq!(r.v_minus, Some(vec![0, 0]));
        assert_eq!(r.v_plus, Some(vec![1, 1]));
        let mut two = Flow::zero(2);
        two.add_at(EdgeKey::new(vec![0, 0], 0), &BigInt::from(2));
        assert_eq!(classify(&g, &two).kind, BalanceKind::Unconstrained);
        assert_eq!(inflow(&g, &two, &vec![1, 0]), BigInt::from(2));
        assert_eq!(inflow(&g, &two, &vec![0, 0]), BigInt::from(-2));
    }

    #[test]
    fn arithmetic_and_translation() {
        let g = z2();
        let f = unit_square_at(0, 0);
        assert!(f.add(&f.negate()).is_zero());
        assert_eq!(translate(&g, &f, &vec![0, 0]), f);
        assert_eq!(translate(&g, &f, &vec![3, -2]), unit_square_at(3, -2));
        assert_eq!(Flow::<Point>::zero(2).weight(), BigUint::zero());
    }

    #[test]
    fn disjoint_squares_give_two_components() {
        let g = z2();
        let f = unit_square_at(0, 0).add(&unit_square_at(10, 0));
        let sup = support(&g, &f);
        assert_eq!(sup.components.len(), 2);
        assert!(support(&g, &Flow::zero(2)).vertices.is_empty());
    }

    #[test]
    fn word_from_flow_examples() {
        let g = z2();
        assert!(word_from_flow(&g, &Flow::zero(2)).unwrap().is_empty());
        let sq = unit_square_at(0, 0);
        let w = word_from_flow(&g, &sq).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(flow_from_word(&g, &w).0, sq);
        let (ab, _) = flow_from_word(&g, &word("ab"));
        let w = word_from_flow(&g, &ab).unwrap();
        let (back, end) = flow_from_word(&g, &w);
        assert_eq!(back, ab);
        assert_eq!(end, vec![1, 1]);
    }

    #[test]
    fn word_from_flow_errors() {
        let g = z2();
        let mut two = Flow::zero(2);
        two.add_at(EdgeKey::new(vec![0, 0], 0), &BigInt::from(2));
        assert!(matches!(word_from_flow(&g, &two), Err(Error::Unconstrained)));
        let (f, _) = flow_of_walk(&g, &vec![5, 5], word("ab").letters());
        assert!(matches!(word_from_flow(&g, &f), Err(Error::NotBasedAtIdentity)));
    }

    #[test]
    fn canonical_form_round_trips() {
        let g = z2();
        let (f, _) = flow_from_word(&g, &word("abbaBAAbab"));
        let text = canonical_form(&g, &f);
        assert_eq!(parse_canonical(&g, &text).unwrap(), f);
        let (sq, _) = flow_from_word(&g, &word("ab"));
        assert_eq!(
            canonical_form(&g, &sq),
            r#"[{"source":"[0,0]","gen":1,"val":"1"},{"source":"[1,0]","gen":2,"val":"1"}]"#
        );
    }
}
