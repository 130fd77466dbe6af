use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::config::{Limits, Parallelism};
use crate::error::{Error, Result};
use crate::tower::{GroupSpec, SolubleElement};
use crate::words::Letter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleOutcome {
    Exact(u64),
    ExceedsRadius,
}

struct Side {
    seen: HashMap<SolubleElement, u64>,
    frontier: Vec<SolubleElement>,
    radius: u64,
    bytes: usize,
}

impl Side {
    fn new(start: SolubleElement) -> Self {
        let bytes = start.approx_bytes();
        let mut seen = HashMap::new();
        seen.insert(start.clone(), 0);
        Side {
            seen,
            frontier: vec![start],
            radius: 0,
            bytes,
        }
    }

    /// Grows by one layer; returns the smallest `radius + other distance`
    /// over the new vertices that the other side already holds.
    fn expand(&mut self, other: &Side, m: usize, limits: &Limits) -> Result<Option<u64>> {
        let mut next = Vec::new();
        let mut best: Option<u64> = None;
        let r = self.radius + 1;
        for v in &self.frontier {
            for l in Letter::alphabet(m) {
                let w = v.mul_letter(l);
                if self.seen.contains_key(&w) {
                    continue;
                }
                if let Some(&d) = other.seen.get(&w) {
                    best = Some(best.map_or(r + d, |b| b.min(r + d)));
                }
                self.bytes += w.approx_bytes() + 64;
                self.seen.insert(w.clone(), r);
                next.push(w);
            }
            if self.bytes + other.bytes > limits.mem_limit_bytes {
                return Err(Error::MemoryGuard {
                    used: self.bytes + other.bytes,
                    limit: limits.mem_limit_bytes,
                });
            }
        }
        self.frontier = next;
        self.radius = r;
        Ok(best)
    }
}

/// Word length of `x` by bidirectional breadth-first search, up to `max_radius`.
pub fn bfs_length_oracle(x: &SolubleElement, max_radius: u64, limits: &Limits) -> Result<OracleOutcome> {
    if x.is_identity() {
        return Ok(OracleOutcome::Exact(0));
    }
    let m = x.spec().m;
    let mut a = Side::new(SolubleElement::identity(x.spec()));
    let mut b = Side::new(x.clone());
    while a.radius + b.radius < max_radius {
        let found = if a.frontier.len() <= b.frontier.len() {
            a.expand(&b, m, limits)?
        } else {
            b.expand(&a, m, limits)?
        };
        if let Some(d) = found {
            return Ok(OracleOutcome::Exact(d));
        }
        if a.frontier.is_empty() || b.frontier.is_empty() {
            break;
        }
    }
    Ok(OracleOutcome::ExceedsRadius)
}

/// Ball around the identity, stored sphere by sphere.
#[derive(Clone, Debug)]
pub struct Ball {
    pub spec: GroupSpec,
    pub spheres: Vec<Vec<SolubleElement>>,
    distance: HashMap<SolubleElement, u64>,
    bytes: usize,
    /// Set when the memory guard stopped the search before the requested radius.
    pub truncated: bool,
}

impl Ball {
    /// The ball of radius 0.
    pub fn new(spec: GroupSpec) -> Ball {
        Ball::from_spheres(spec, vec![vec![SolubleElement::identity(spec)]])
    }

    /// Rebuilds a ball from stored spheres (for example a disk cache).
    pub fn from_spheres(spec: GroupSpec, spheres: Vec<Vec<SolubleElement>>) -> Ball {
        let mut distance = HashMap::new();
        let mut bytes = 0;
        for (r, sphere) in spheres.iter().enumerate() {
            for x in sphere {
                bytes += x.approx_bytes() + 64;
                distance.insert(x.clone(), r as u64);
            }
        }
        Ball {
            spec,
            spheres,
            distance,
            bytes,
            truncated: false,
        }
    }

    pub fn grow(spec: GroupSpec, radius: u64, limits: &Limits, par: &Parallelism) -> Ball {
        let mut ball = Ball::new(spec);
        ball.extend_to(radius, limits, par, |_| Ok(()))
            .expect("callback never fails");
        ball
    }

    /// Adds spheres until `radius`, calling `on_level` after each one. Stops
    /// early, setting `truncated`, when the memory guard trips.
    pub fn extend_to(
        &mut self,
        radius: u64,
        limits: &Limits,
        par: &Parallelism,
        mut on_level: impl FnMut(&Ball) -> Result<()>,
    ) -> Result<()> {
        let alphabet: Vec<Letter> = Letter::alphabet(self.spec.m).collect();
        while self.radius() < radius {
            let r = self.radius() + 1;
            let frontier = self.spheres.last().unwrap();
            let candidates = par.map(frontier, |v| {
                alphabet.iter().map(|&l| v.mul_letter(l)).collect::<Vec<_>>()
            });
            let mut sphere = Vec::new();
            let mut bytes = self.bytes;
            for w in candidates.into_iter().flatten() {
                if self.distance.contains_key(&w) {
                    continue;
                }
                bytes += w.approx_bytes() + 64;
                self.distance.insert(w.clone(), r);
                sphere.push(w);
            }
            if bytes > limits.mem_limit_bytes {
                for w in &sphere {
                    self.distance.remove(w);
                }
                self.truncated = true;
                return Ok(());
            }
            self.bytes = bytes;
            self.spheres.push(sphere);
            on_level(self)?;
        }
        Ok(())
    }

    pub fn radius(&self) -> u64 {
        self.spheres.len() as u64 - 1
    }

    pub fn sphere_sizes(&self) -> Vec<u64> {
        self.spheres.iter().map(|s| s.len() as u64).collect()
    }

    /// `b_0, b_1, …` cumulative sizes.
    pub fn sizes(&self) -> Vec<u64> {
        self.sphere_sizes()
            .iter()
            .scan(0, |acc, s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }

    pub fn distance_of(&self, x: &SolubleElement) -> Option<u64> {
        self.distance.get(x).copied()
    }

    pub fn contains(&self, x: &SolubleElement) -> bool {
        self.distance.contains_key(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::FreeWord;

    fn el(w: &str, m: usize, d: usize) -> SolubleElement {
        SolubleElement::from_word(&FreeWord::parse(w, m).unwrap(), GroupSpec::new(m, d).unwrap()).unwrap()
    }

    #[test]
    fn oracle_small_lengths() {
        let lim = Limits::default();
        assert_eq!(bfs_length_oracle(&el("1", 2, 2), 5, &lim).unwrap(), OracleOutcome::Exact(0));
        assert_eq!(bfs_length_oracle(&el("ab", 2, 2), 5, &lim).unwrap(), OracleOutcome::Exact(2));
        assert_eq!(bfs_length_oracle(&el("abAB", 2, 1), 5, &lim).unwrap(), OracleOutcome::Exact(0));
        assert_eq!(bfs_length_oracle(&el("abAB", 2, 2), 5, &lim).unwrap(), OracleOutcome::Exact(4));
        assert_eq!(bfs_length_oracle(&el("abAB", 2, 2), 3, &lim).unwrap(), OracleOutcome::ExceedsRadius);
    }

    #[test]
    fn ball_of_free_abelian_rank_two() {
        let ball = Ball::grow(GroupSpec::new(2, 1).unwrap(), 4, &Limits::default(), &Parallelism::sequential());
        assert_eq!(ball.sizes(), vec![1, 5, 13, 25, 41]);
    }

    #[test]
    fn ball_of_free_metabelian_is_a_tree_early() {
        let ball = Ball::grow(GroupSpec::new(2, 2).unwrap(), 4, &Limits::default(), &Parallelism::with_threads(2));
        assert_eq!(ball.sizes(), vec![1, 5, 17, 53, 161]);
        assert_eq!(ball.distance_of(&el("abAB", 2, 2)), Some(4));
        assert!(!ball.truncated);
    }

    #[test]
    fn memory_guard_truncates() {
        let lim = Limits::default().with_mem_limit_mib(0);
        let ball = Ball::grow(GroupSpec::new(2, 2).unwrap(), 4, &lim, &Parallelism::sequential());
        assert!(ball.truncated);
        assert!(ball.radius() < 4);
        assert!(matches!(
            bfs_length_oracle(&el("abABab", 2, 2), 10, &lim),
            Err(Error::MemoryGuard { .. })
        ));
    }
}
