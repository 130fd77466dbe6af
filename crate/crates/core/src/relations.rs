//! Shortest relations of `Sol(m, d)`.
//!
//! Words are searched depth first with the level-one data kept incrementally:
//! the point of `Z^m` reached and, for `d ≥ 2`, the flow induced on the lattice.
//! A prefix is dropped once the letters left cannot cancel that flow.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::config::Parallelism;
use crate::error::{Error, Result};
use crate::tower::{GroupSpec, SolubleElement};
use crate::words::{FreeWord, Letter};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSearch {
    pub rho: Option<usize>,
    /// Every relation has at least this length.
    pub lower_bound: usize,
    /// One representative per class under rotation, inversion and signed
    /// permutations of the generators.
    pub witnesses: Vec<FreeWord>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub budget_exhausted: bool,
}

/// `4·3^(d−1)`: three times the previous level at each step, from 4 for `Z^m`.
pub fn analytic_lower_bound(d: usize) -> usize {
    4 * 3usize.pow(d.saturating_sub(1) as u32)
}

/// Lower bound on relation length for rank at least 2: the tripling bound
/// started from 14 in degree 2, or from 4 below that.
pub fn recursion_lower_bound(d: usize) -> usize {
    if d >= 3 {
        14 * 3usize.pow((d - 2) as u32)
    } else {
        analytic_lower_bound(d)
    }
}

pub fn check_recursion(rho_d: usize, rho_next: usize) -> bool {
    rho_next >= 3 * rho_d
}

/// Level-one state of a prefix: position in `Z^m` and lattice flow on a dense grid.
struct Walker {
    reach: i64,
    track_flow: bool,
    pos: Vec<i64>,
    /// Grid index of the edge `(pos, 0)`; the edge `(pos, g)` is `at + g`.
    at: usize,
    stride: Vec<usize>,
    flow: Vec<i32>,
    weight: u64,
    letters: Vec<Letter>,
}

impl Walker {
    fn new(m: usize, max_len: usize, track_flow: bool) -> Result<Self> {
        let reach = (max_len / 2) as i64;
        let side = 2 * reach as usize + 1;
        let cells = match track_flow {
            true => side
                .checked_pow(m as u32)
                .and_then(|c| c.checked_mul(m))
                .filter(|&c| c <= 1 << 26)
                .ok_or_else(|| Error::TooLarge(format!("flow grid for rank {m} and length {max_len}")))?,
            false => 0,
        };
        // without a flow grid the index is never read
        let stride: Vec<usize> = match track_flow {
            true => (0..m).map(|g| side.pow((m - 1 - g) as u32) * m).collect(),
            false => vec![0; m],
        };
        let at = stride.iter().map(|s| s * reach as usize).sum();
        Ok(Walker {
            reach,
            track_flow,
            pos: vec![0; m],
            at,
            stride,
            flow: if track_flow { vec![0; cells] } else { Vec::new() },
            weight: 0,
            letters: Vec::with_capacity(max_len),
        })
    }

    fn bump(&mut self, idx: usize, delta: i32) {
        let before = self.flow[idx].unsigned_abs();
        self.flow[idx] += delta;
        let after = self.flow[idx].unsigned_abs();
        self.weight = self.weight + after as u64 - before as u64;
    }

    /// Applies `l`; returns false (and leaves the state untouched) if the walk
    /// would leave the grid.
    fn push(&mut self, l: Letter) -> bool {
        let g = l.generator();
        let next = self.pos[g] + l.sign();
        if next.abs() > self.reach {
            return false;
        }
        if l.is_inverse() {
            self.at -= self.stride[g];
            if self.track_flow {
                self.bump(self.at + g, -1);
            }
        } else {
            if self.track_flow {
                self.bump(self.at + g, 1);
            }
            self.at += self.stride[g];
        }
        self.pos[g] = next;
        self.letters.push(l);
        true
    }

    fn pop(&mut self) {
        let l = self.letters.pop().expect("pop on empty walk");
        let g = l.generator();
        if l.is_inverse() {
            if self.track_flow {
                self.bump(self.at + g, 1);
            }
            self.at += self.stride[g];
        } else {
            self.at -= self.stride[g];
            if self.track_flow {
                self.bump(self.at + g, -1);
            }
        }
        self.pos[g] -= l.sign();
    }

    /// Steps still needed to return with zero level-one data.
    fn debt(&self) -> u64 {
        if self.track_flow {
            self.weight
        } else {
            self.pos.iter().map(|c| c.unsigned_abs()).sum()
        }
    }
}

struct Search<'a> {
    spec: GroupSpec,
    n: usize,
    nodes: &'a AtomicU64,
    budget: u64,
}

impl Search<'_> {
    fn dfs(&self, w: &mut Walker, found: &mut Vec<FreeWord>) -> Result<()> {
        let left = (self.n - w.letters.len()) as u64;
        if w.debt() > left || (left - w.debt()) % 2 == 1 {
            return Ok(());
        }
        if left == 0 {
            let first = w.letters[0];
            if *w.letters.last().unwrap() != first.inv() {
                let word = FreeWord::from_letters(&w.letters, self.spec.m)?;
                if SolubleElement::from_word(&word, self.spec)?.is_identity() {
                    found.push(word);
                }
            }
            return Ok(());
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) > self.budget {
            return Err(Error::BudgetExhausted(format!("relation search at length {}", self.n)));
        }
        let last = *w.letters.last().unwrap();
        for l in Letter::alphabet(self.spec.m) {
            if l == last.inv() || !w.push(l) {
                continue;
            }
            let r = self.dfs(w, found);
            w.pop();
            r?;
        }
        Ok(())
    }
}

/// Reduced prefixes of the given length starting with `a` and then `a` or `b`.
/// Every cyclically reduced word is equivalent to one of these under the
/// signed permutations of the generators.
fn seed_prefixes(m: usize, len: usize) -> Vec<Vec<Letter>> {
    let a = Letter::positive(0);
    let mut out = vec![vec![a]];
    if len >= 2 {
        let mut second = vec![vec![a, a]];
        if m >= 2 {
            second.push(vec![a, Letter::positive(1)]);
        }
        out = second;
    }
    for _ in 2..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                let last = *p.last().unwrap();
                Letter::alphabet(m)
                    .filter(move |&l| l != last.inv())
                    .map(move |l| [p.as_slice(), &[l]].concat())
            })
            .collect();
    }
    out
}

/// Image of `w` under the signed permutation sending generator `i` to `perm[i]`
/// with the sign `flip[i]`.
fn permute(w: &[Letter], perm: &[usize], flip: &[bool]) -> Vec<Letter> {
    w.iter()
        .map(|l| Letter::new(perm[l.generator()], l.is_inverse() ^ flip[l.generator()]))
        .collect()
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for slot in 0..m {
            let mut q = p.clone();
            q.insert(slot, m - 1);
            out.push(q);
        }
    }
    out
}

/// Shortlex-least word among rotations, inverses and signed generator permutations.
pub fn orbit_representative(w: &FreeWord) -> FreeWord {
    let m = w.rank();
    let letters = w.letters();
    let mut best: Option<Vec<Letter>> = None;
    let inverse: Vec<Letter> = letters.iter().rev().map(|l| l.inv()).collect();
    let perms = permutations(m);
    for base in [letters.to_vec(), inverse] {
        for perm in &perms {
            for mask in 0..(1u32 << m) {
                let flip: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
                let mut img = permute(&base, perm, &flip);
                for _ in 0..img.len().max(1) {
                    if best.as_ref().is_none_or(|b| img < *b) {
                        best = Some(img.clone());
                    }
                    img.rotate_left(1);
                }
            }
        }
    }
    FreeWord::from_letters(&best.unwrap_or_default(), m).expect("cyclically reduced images are reduced")
}

/// Shortest nonempty cyclically reduced word equal to 1 in `spec`, searching
/// lengths up to `max_len`. `node_budget` caps the total number of visited prefixes.
pub fn shortest_relation(
    spec: GroupSpec,
    max_len: usize,
    node_budget: u64,
    par: &Parallelism,
) -> Result<RelationSearch> {
    let floor = if spec.m >= 2 { recursion_lower_bound(spec.d) } else { 0 };
    let nodes = AtomicU64::new(0);
    for n in 1..=max_len {
        if n % 2 == 1 {
            // every relation lies in the commutator subgroup, so has even length
            continue;
        }
        let search = Search {
            spec,
            n,
            nodes: &nodes,
            budget: node_budget,
        };
        let seeds = seed_prefixes(spec.m, n.min(4));
        let parts = par.map(&seeds, |seed| -> Result<Vec<FreeWord>> {
            let mut walker = Walker::new(spec.m, n, spec.d >= 2)?;
            for &l in seed {
                if !walker.push(l) {
                    return Ok(Vec::new());
                }
            }
            let mut found = Vec::new();
            search.dfs(&mut walker, &mut found)?;
            Ok(found)
        });
        let mut classes = BTreeSet::new();
        for part in parts {
            match part {
                Ok(words) => classes.extend(words.iter().map(orbit_representative)),
                Err(e) if e.is_budget() => {
                    return Ok(RelationSearch {
                        rho: None,
                        lower_bound: n.max(floor),
                        witnesses: Vec::new(),
                        budget_exhausted: true,
                    })
                }
                Err(e) => return Err(e),
            }
        }
        if !classes.is_empty() {
            return Ok(RelationSearch {
                rho: Some(n),
                lower_bound: n,
                witnesses: classes.into_iter().collect(),
                budget_exhausted: false,
            });
        }
    }
    Ok(RelationSearch {
        rho: None,
        lower_bound: ((max_len + 2) & !1).max(floor),
        witnesses: Vec::new(),
        budget_exhausted: false,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityMethod {
    /// Relations lie in the commutator subgroup; a nonempty positive word has
    /// a positive exponent sum.
    Analytic,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub holds: bool,
    pub method: PositivityMethod,
    pub words_checked: u64,
    pub counterexample: Option<FreeWord>,
}

/// No nonempty positive word is trivial in `spec`. With `exhaustive`, every
/// positive word up to `max_len` is also tested directly.
pub fn verify_no_positive_relations(spec: GroupSpec, max_len: usize, exhaustive: bool) -> Result<PositivityCheck> {
    if !exhaustive {
        return Ok(PositivityCheck {
            holds: true,
            method: PositivityMethod::Analytic,
            words_checked: 0,
            counterexample: None,
        });
    }
    let m = spec.m;
    let mut checked = 0u64;
    for n in 1..=max_len {
        let total = (m as u64).checked_pow(n as u32).ok_or_else(|| Error::TooLarge(format!("{m}^{n} words")))?;
        for mut code in 0..total {
            let mut letters = Vec::with_capacity(n);
            for _ in 0..n {
                letters.push(Letter::positive((code % m as u64) as usize));
                code /= m as u64;
            }
            let w = FreeWord::from_letters(&letters, m)?;
            checked += 1;
            if SolubleElement::from_word(&w, spec)?.is_identity() {
                return Ok(PositivityCheck {
                    holds: false,
                    method: PositivityMethod::Exhaustive,
                    words_checked: checked,
                    counterexample: Some(w),
                });
            }
        }
    }
    Ok(PositivityCheck {
        holds: true,
        method: PositivityMethod::Exhaustive,
        words_checked: checked,
        counterexample: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: usize, d: usize) -> GroupSpec {
        GroupSpec::new(m, d).unwrap()
    }

    #[test]
    fn free_abelian() {
        let r = shortest_relation(spec(2, 1), 6, u64::MAX, &Parallelism::sequential()).unwrap();
        assert_eq!(r.rho, Some(4));
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].to_string(), "abAB");
        let r = shortest_relation(spec(3, 1), 6, u64::MAX, &Parallelism::sequential()).unwrap();
        assert_eq!(r.rho, Some(4));
    }

    #[test]
    fn nothing_short_in_metabelian() {
        let r = shortest_relation(spec(2, 2), 10, u64::MAX, &Parallelism::sequential()).unwrap();
        assert_eq!(r.rho, None);
        assert_eq!(r.lower_bound, 12);
    }

    #[test]
    fn cyclic_group_has_no_relations() {
        let r = shortest_relation(spec(1, 1), 6, u64::MAX, &Parallelism::sequential()).unwrap();
        assert_eq!((r.rho, r.lower_bound), (None, 8));
    }

    #[test]
    fn budget_gives_lower_bound() {
        let r = shortest_relation(spec(2, 2), 14, 10, &Parallelism::sequential()).unwrap();
        assert!(r.budget_exhausted);
        assert_eq!(r.rho, None);
    }

    #[test]
    fn recursion() {
        assert!(check_recursion(4, 14));
        assert!(!check_recursion(4, 11));
        assert_eq!(analytic_lower_bound(3), 36);
        assert_eq!(recursion_lower_bound(3), 42);
    }

    #[test]
    fn representative_is_invariant() {
        let w = FreeWord::parse("abAB", 2).unwrap();
        for v in ["BAba", "baBA", "ABab", "bAB a"] {
            let v = FreeWord::parse(v, 2).unwrap();
            assert_eq!(orbit_representative(&v), orbit_representative(&w));
        }
    }

    #[test]
    fn positivity() {
        assert!(verify_no_positive_relations(spec(2, 2), 8, false).unwrap().holds);
        let c = verify_no_positive_relations(spec(2, 2), 8, true).unwrap();
        assert!(c.holds);
        assert_eq!(c.words_checked, 510);
        assert!(!SolubleElement::from_word(&FreeWord::parse("aabb", 2).unwrap(), spec(2, 3))
            .unwrap()
            .is_identity());
    }
}
