use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::flows::{directed_edge, CayleyGraph, EdgeKey};
use crate::words::Letter;

/// Region of a Cayley graph with some vertices and at most one edge removed.
pub(crate) struct Region<'a, G: CayleyGraph> {
    pub graph: &'a G,
    pub blocked: &'a HashSet<G::Vertex>,
    pub removed_edge: Option<&'a EdgeKey<G::Vertex>>,
}

impl<G: CayleyGraph> Region<'_, G> {
    fn allows(&self, at: &G::Vertex, letter: Letter, to: &G::Vertex) -> bool {
        if self.blocked.contains(to) {
            return false;
        }
        match self.removed_edge {
            Some(e) => directed_edge(self.graph, at, letter).0 != *e,
            None => true,
        }
    }
}

struct Tree<V> {
    // vertex -> (parent, letter from parent to vertex)
    parent: HashMap<V, Option<(V, Letter)>>,
    frontier: Vec<V>,
}

impl<V: Clone + Eq + std::hash::Hash> Tree<V> {
    fn new(root: V) -> Self {
        let mut parent = HashMap::new();
        parent.insert(root.clone(), None);
        Tree {
            parent,
            frontier: vec![root],
        }
    }

    /// Letters from the root to `v`.
    fn trace(&self, v: &V) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut at = v.clone();
        while let Some(Some((p, l))) = self.parent.get(&at) {
            out.push(*l);
            at = p.clone();
        }
        out.reverse();
        out
    }
}

/// A shortest path from `from` to `to` inside `region`, by bidirectional
/// breadth-first search. Neighbours are expanded in alphabet order, so the
/// result is deterministic. `budget` caps the number of visited vertices.
pub(crate) fn shortest_path<G: CayleyGraph>(
    region: &Region<'_, G>,
    from: &G::Vertex,
    to: &G::Vertex,
    budget: usize,
) -> Result<Option<Vec<Letter>>> {
    if from == to {
        return Ok(Some(Vec::new()));
    }
    let alphabet: Vec<Letter> = Letter::alphabet(region.graph.rank()).collect();
    let mut fwd = Tree::new(from.clone());
    let mut bwd = Tree::new(to.clone());
    loop {
        if fwd.frontier.is_empty() || bwd.frontier.is_empty() {
            return Ok(None);
        }
        if fwd.parent.len() + bwd.parent.len() > budget {
            return Err(Error::BudgetExhausted(format!(
                "path search visited more than {budget} vertices"
            )));
        }
        let forward = fwd.frontier.len() <= bwd.frontier.len();
        let (grow, other) = if forward {
            (&mut fwd, &bwd)
        } else {
            (&mut bwd, &fwd)
        };
        let mut next = Vec::new();
        let mut meet = None;
        'layer: for v in std::mem::take(&mut grow.frontier) {
            for &l in &alphabet {
                let w = region.graph.step(&v, l);
                if grow.parent.contains_key(&w) || !region.allows(&v, l, &w) {
                    continue;
                }
                grow.parent.insert(w.clone(), Some((v.clone(), l)));
                if other.parent.contains_key(&w) {
                    meet = Some(w);
                    break 'layer;
                }
                next.push(w);
            }
        }
        grow.frontier = next;
        if let Some(w) = meet {
            let mut letters = fwd.trace(&w);
            letters.extend(bwd.trace(&w).iter().rev().map(|l| l.inv()));
            return Ok(Some(letters));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::Lattice;

    #[test]
    fn detour_around_blocked_origin() {
        let g = Lattice::new(2);
        let blocked: HashSet<Vec<i64>> = [vec![0, 0]].into();
        let region = Region {
            graph: &g,
            blocked: &blocked,
            removed_edge: None,
        };
        let p = shortest_path(&region, &vec![1, 0], &vec![-1, 0], 1000).unwrap().unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(g.walk(&vec![1, 0], &p), vec![-1, 0]);
        let p = shortest_path(&region, &vec![1, 0], &vec![0, 1], 1000).unwrap().unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn removed_edge_forces_square() {
        let g = Lattice::new(2);
        let blocked = HashSet::new();
        let e = EdgeKey::new(vec![0, 0], 0);
        let region = Region {
            graph: &g,
            blocked: &blocked,
            removed_edge: Some(&e),
        };
        let p = shortest_path(&region, &vec![1, 0], &vec![0, 0], 1000).unwrap().unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn budget_is_reported() {
        let g = Lattice::new(2);
        let blocked = HashSet::new();
        let region = Region {
            graph: &g,
            blocked: &blocked,
            removed_edge: None,
        };
        assert!(matches!(
            shortest_path(&region, &vec![0, 0], &vec![40, 40], 100),
            Err(Error::BudgetExhausted(_))
        ));
    }
}
