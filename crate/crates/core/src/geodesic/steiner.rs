//! Exact Steiner connection of vertex groups in the lattice `Z^m`.
//!
//! Each terminal group is contracted to one node, so reaching any vertex of a
//! group connects the whole group. The search is restricted to the bounding
//! box of all terminals: clamping coordinates into the box maps lattice edges
//! to edges or points, so an optimal connector inside the box always exists.
//! The optimum is found by the Dreyfus–Wagner subset recursion.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::flows::{EdgeKey, Point};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl BoundingBox {
    pub fn of<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in it {
            for i in 0..lo.len() {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        Some(BoundingBox { lo, hi })
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, &x)| self.lo[i] <= x && x <= self.hi[i])
    }

    pub fn vertex_count(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1) as u128)
            .product()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerInstance {
    pub terminal_groups: Vec<Vec<Point>>,
    pub region: BoundingBox,
}

impl SteinerInstance {
    /// Instance over the bounding box of all terminal vertices.
    pub fn new(terminal_groups: Vec<Vec<Point>>) -> Result<Self> {
        let region = BoundingBox::of(terminal_groups.iter().flatten()).ok_or(Error::EmptyInstance)?;
        if terminal_groups.iter().any(|g| g.is_empty()) {
            return Err(Error::EmptyInstance);
        }
        Ok(SteinerInstance {
            terminal_groups,
            region,
        })
    }
}

/// A minimum connector: `cost` lattice edges, listed in positive orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerTree {
    pub cost: u64,
    pub edges: Vec<EdgeKey<Point>>,
}

const INF: u32 = u32::MAX / 4;
const NONE: u32 = u32::MAX;

struct Contracted {
    adjacency: Vec<Vec<u32>>,
    /// one lattice edge per contracted edge, keyed by (min node, max node)
    representative: HashMap<(u32, u32), EdgeKey<Point>>,
}

fn contract(inst: &SteinerInstance, limits: &Limits) -> Result<Contracted> {
    let region = &inst.region;
    let dims = region.lo.len();
    let count = region.vertex_count();
    if count > limits.max_region_vertices {
        return Err(Error::RegionTooLarge {
            vertices: count,
            limit: limits.max_region_vertices,
        });
    }
    let sizes: Vec<usize> = (0..dims)
        .map(|i| (region.hi[i] - region.lo[i] + 1) as usize)
        .collect();
    let total = count as usize;
    let index = |p: &[i64]| -> usize {
        let mut idx = 0usize;
        for i in (0..dims).rev() {
            idx = idx * sizes[i] + (p[i] - region.lo[i]) as usize;
        }
        idx
    };
    let groups = inst.terminal_groups.len();
    let mut node = vec![NONE; total];
    for (g, group) in inst.terminal_groups.iter().enumerate() {
        for p in group {
            let slot = &mut node[index(p)];
            if *slot != NONE && *slot != g as u32 {
                return Err(Error::Invariant("terminal groups overlap".into()));
            }
            *slot = g as u32;
        }
    }
    let mut next = groups as u32;
    for slot in node.iter_mut() {
        if *slot == NONE {
            *slot = next;
            next += 1;
        }
    }
    let mut adjacency = vec![Vec::new(); next as usize];
    let mut representative = HashMap::new();
    let mut point = region.lo.clone();
    for idx in 0..total {
        // decode idx into point
        let mut rest = idx;
        for i in 0..dims {
            point[i] = region.lo[i] + (rest % sizes[i]) as i64;
            rest /= sizes[i];
        }
        let a = node[idx];
        let mut stride = 1usize;
        for i in 0..dims {
            if point[i] < region.hi[i] {
                let b = node[idx + stride];
                if a != b {
                    let key = (a.min(b), a.max(b));
                    representative
                        .entry(key)
                        .or_insert_with(|| EdgeKey::new(point.clone(), i));
                    adjacency[a as usize].push(b);
                    adjacency[b as usize].push(a);
                }
            }
            stride *= sizes[i];
        }
    }
    for list in adjacency.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    Ok(Contracted {
        adjacency,
        representative,
    })
}

/// Relaxes `dist` along unit-weight edges (Dijkstra with a bucket queue).
fn relax(adjacency: &[Vec<u32>], dist: &mut [u32], pred: &mut [u32]) {
    let mut buckets: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (v, &d) in dist.iter().enumerate() {
        if d < INF {
            buckets.entry(d).or_default().push(v as u32);
        }
    }
    while let Some((d, verts)) = buckets.pop_first() {
        for v in verts {
            if dist[v as usize] != d {
                continue;
            }
            for &u in &adjacency[v as usize] {
                if d + 1 < dist[u as usize] {
                    dist[u as usize] = d + 1;
                    pred[u as usize] = v;
                    buckets.entry(d + 1).or_default().push(u);
                }
            }
        }
    }
}

fn bfs_from(adjacency: &[Vec<u32>], source: u32, dist: &mut [u32], pred: &mut [u32]) {
    dist[source as usize] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &u in &adjacency[v as usize] {
            if dist[u as usize] == INF {
                dist[u as usize] = dist[v as usize] + 1;
                pred[u as usize] = v;
                queue.push_back(u);
            }
        }
    }
}

/// Minimum number of lattice edges connecting all terminal groups.
pub fn steiner_connect(inst: &SteinerInstance, limits: &Limits) -> Result<SteinerTree> {
    let groups = inst.terminal_groups.len();
    if groups == 0 {
        return Err(Error::EmptyInstance);
    }
    if groups > limits.max_terminal_groups {
        return Err(Error::TooManyTerminalGroups {
            groups,
            limit: limits.max_terminal_groups,
        });
    }
    if groups == 1 {
        return Ok(SteinerTree {
            cost: 0,
            edges: Vec::new(),
        });
    }
    let graph = contract(inst, limits)?;
    let n = graph.adjacency.len();
    let t = groups - 1; // the last group is the root
    let full = (1usize << t) - 1;
    let mut dist = vec![INF; (full + 1) * n];
    let mut pred = vec![NONE; (full + 1) * n];
    let mut split = vec![0u32; (full + 1) * n];

    for i in 0..t {
        let mask = 1usize << i;
        let (d, p) = (
            &mut dist[mask * n..(mask + 1) * n],
            &mut pred[mask * n..(mask + 1) * n],
        );
        bfs_from(&graph.adjacency, i as u32, d, p);
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let row = mask * n;
        // submasks containing the lowest bit cover each split once
        let mut sub = (mask - 1) & mask;
        while sub > 0 {
            if sub & low != 0 {
                let other = mask ^ sub;
                for v in 0..n {
                    let c = dist[sub * n + v].saturating_add(dist[other * n + v]);
                    if c < dist[row + v] {
                        dist[row + v] = c;
                        split[row + v] = sub as u32;
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        let (d, p) = (&mut dist[row..row + n], &mut pred[row..row + n]);
        relax(&graph.adjacency, d, p);
    }
    let root = t;
    let cost = dist[full * n + root];
    if cost >= INF {
        return Err(Error::Invariant("terminal groups are not connected in the region".into()));
    }

    let mut edges = Vec::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, v)) = stack.pop() {
        let at = mask * n + v;
        if pred[at] != NONE {
            let u = pred[at] as usize;
            let key = ((u as u32).min(v as u32), (u as u32).max(v as u32));
            edges.push(graph.representative[&key].clone());
            stack.push((mask, u));
        } else if split[at] != 0 {
            let sub = split[at] as usize;
            stack.push((sub, v));
            stack.push((mask ^ sub, v));
        }
    }
    edges.sort();
    edges.dedup();
    if edges.len() as u32 != cost {
        return Err(Error::Invariant(format!(
            "Steiner reconstruction found {} edges for cost {cost}",
            edges.len()
        )));
    }
    Ok(SteinerTree {
        cost: cost as u64,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(groups: Vec<Vec<Point>>) -> u64 {
        let inst = SteinerInstance::new(groups).unwrap();
        steiner_connect(&inst, &Limits::default()).unwrap().cost
    }

    #[test]
    fn single_group_is_free() {
        assert_eq!(cost(vec![vec![vec![0, 0]]]), 0);
    }

    #[test]
    fn straight_segment() {
        assert_eq!(cost(vec![vec![vec![0, 0]], vec![vec![3, 0]]]), 3);
    }

    #[test]
    fn three_corners() {
        assert_eq!(
            cost(vec![vec![vec![0, 0]], vec![vec![2, 0]], vec![vec![0, 2]]]),
            4
        );
    }

    #[test]
    fn groups_are_contracted() {
        // a long group spanning x = 0..5 at y = 2 and the origin: one edge pair away
        let bar: Vec<Point> = (0..6).map(|x| vec![x, 2]).collect();
        assert_eq!(cost(vec![vec![vec![4, 0]], bar]), 2);
    }

    /// Smallest edge subset of the region connecting every group, by enumeration.
    fn brute_force(groups: &[Vec<Point>]) -> u64 {
        let region = BoundingBox::of(groups.iter().flatten()).unwrap();
        let mut verts = Vec::new();
        for x in region.lo[0]..=region.hi[0] {
            for y in region.lo[1]..=region.hi[1] {
                verts.push(vec![x, y]);
            }
        }
        let id = |p: &Point| verts.iter().position(|q| q == p).unwrap();
        let mut all_edges = Vec::new();
        for p in &verts {
            for i in 0..2 {
                let mut q = p.clone();
                q[i] += 1;
                if region.contains(&q) {
                    all_edges.push((id(p), id(&q)));
                }
            }
        }
        assert!(all_edges.len() <= 20);
        let mut best = u64::MAX;
        for subset in 0u32..(1 << all_edges.len()) {
            let size = subset.count_ones() as u64;
            if size >= best {
                continue;
            }
            let mut uf = crate::flows::UnionFind::new(verts.len());
            for g in groups {
                for p in &g[1..] {
                    uf.union(id(&g[0]), id(p));
                }
            }
            for (e, &(a, b)) in all_edges.iter().enumerate() {
                if subset >> e & 1 == 1 {
                    uf.union(a, b);
                }
            }
            let root = uf.find(id(&groups[0][0]));
            if groups.iter().all(|g| uf.find(id(&g[0])) == root) {
                best = size;
            }
        }
        best
    }

    #[test]
    fn matches_brute_force_on_small_boxes() {
        let cases: Vec<Vec<Vec<Point>>> = vec![
            vec![vec![vec![0, 0]], vec![vec![2, 0]], vec![vec![0, 2]]],
            vec![vec![vec![0, 0]], vec![vec![2, 2]], vec![vec![0, 2]], vec![vec![2, 0]]],
            vec![vec![vec![0, 1]], vec![vec![2, 1], vec![2, 2]], vec![vec![1, 0]]],
            vec![vec![vec![0, 0], vec![0, 1], vec![0, 2]], vec![vec![3, 0]], vec![vec![3, 2]]],
            vec![vec![vec![1, 1]], vec![vec![0, 0]], vec![vec![3, 2]], vec![vec![0, 2]]],
        ];
        for groups in cases {
            let expected = brute_force(&groups);
            let inst = SteinerInstance::new(groups.clone()).unwrap();
            let tree = steiner_connect(&inst, &Limits::default()).unwrap();
            assert_eq!(tree.cost, expected, "{groups:?}");
            assert_eq!(tree.edges.len() as u64, expected);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(SteinerInstance::new(vec![]), Err(Error::EmptyInstance)));
        let many: Vec<Vec<Point>> = (0..12).map(|i| vec![vec![2 * i, 0]]).collect();
        let inst = SteinerInstance::new(many).unwrap();
        assert!(matches!(
            steiner_connect(&inst, &Limits::default()),
            Err(Error::TooManyTerminalGroups { groups: 12, limit: 10 })
        ));
    }
}
