use std::collections::HashSet;

use crate::config::Parallelism;
use crate::error::{Error, Result};
use crate::tower::{GroupSpec, SolubleElement};
use crate::words::{FreeWord, Letter};

pub const MAX_SAW_LENGTH: usize = 20;

fn offset(l: Letter) -> (i32, i32) {
    let s = l.sign() as i32;
    if l.generator() == 0 {
        (s, 0)
    } else {
        (0, s)
    }
}

/// The twelve two-step self-avoiding prefixes.
fn prefixes() -> Vec<[Letter; 2]> {
    let mut out = Vec::new();
    for a in Letter::alphabet(2) {
        for b in Letter::alphabet(2) {
            if b != a.inv() {
                out.push([a, b]);
            }
        }
    }
    out
}

/// Counts by length, visited set kept in a hash set.
fn count_hashed(prefix: &[Letter], n: usize) -> Vec<u64> {
    fn go(at: (i32, i32), left: usize, depth: usize, seen: &mut HashSet<(i32, i32)>, counts: &mut [u64]) {
        counts[depth] += 1;
        if left == 0 {
            return;
        }
        for l in Letter::alphabet(2) {
            let (dx, dy) = offset(l);
            let next = (at.0 + dx, at.1 + dy);
            if seen.insert(next) {
                go(next, left - 1, depth + 1, seen, counts);
                seen.remove(&next);
            }
        }
    }
    let mut seen = HashSet::from([(0, 0)]);
    let mut at = (0, 0);
    for &l in prefix {
        let (dx, dy) = offset(l);
        at = (at.0 + dx, at.1 + dy);
        seen.insert(at);
    }
    let mut counts = vec![0; n + 1];
    if prefix.len() <= n {
        go(at, n - prefix.len(), prefix.len(), &mut seen, &mut counts);
    }
    counts
}

/// Counts by length, visited set kept in a flat grid indexed by coordinates.
fn count_grid(prefix: &[Letter], n: usize) -> Vec<u64> {
    let side = 2 * n + 3;
    let centre = (n + 1) as isize;
    let idx = |x: isize, y: isize| (y * side as isize + x) as usize;
    let steps: [isize; 4] = [1, -1, side as isize, -(side as isize)];
    let mut grid = vec![false; side * side];
    let mut at = idx(centre, centre);
    grid[at] = true;
    for &l in prefix {
        at = (at as isize + steps[l.ordinal()]) as usize;
        grid[at] = true;
    }
    let mut counts = vec![0u64; n + 1];
    // explicit stack of (cell, next direction to try)
    let mut stack: Vec<(usize, usize)> = vec![(at, 0)];
    if prefix.len() > n {
        return counts;
    }
    counts[prefix.len()] += 1;
    while let Some(&(cell, dir)) = stack.last() {
        let depth = prefix.len() + stack.len() - 1;
        if dir == 4 || depth == n {
            if stack.len() > 1 {
                grid[cell] = false;
            }
            stack.pop();
            continue;
        }
        stack.last_mut().unwrap().1 += 1;
        let next = (cell as isize + steps[dir]) as usize;
        if !grid[next] {
            grid[next] = true;
            counts[depth + 1] += 1;
            stack.push((next, 0));
        }
    }
    counts
}

/// `c_1, …, c_n`: self-avoiding walks of each length from the origin of the
/// square lattice. Two independent enumerations must agree.
pub fn saw_counts(n: usize, par: &Parallelism) -> Result<Vec<u64>> {
    if n > MAX_SAW_LENGTH {
        return Err(Error::TooLarge(format!("SAW length {n} (limit {MAX_SAW_LENGTH})")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let seeds = prefixes();
    let parts = par.map(&seeds, |p| (count_hashed(p, n), count_grid(p, n)));
    let mut hashed = vec![0u64; n + 1];
    let mut grid = vec![0u64; n + 1];
    for (h, g) in parts {
        for i in 0..=n {
            hashed[i] += h[i];
            grid[i] += g[i];
        }
    }
    // lengths 0 and 1 are not covered by the two-step prefixes
    hashed[1] = 4;
    grid[1] = 4;
    if hashed != grid {
        return Err(Error::Invariant(format!(
            "SAW enumerators disagree: {:?} vs {:?}",
            &hashed[1..],
            &grid[1..]
        )));
    }
    Ok(hashed[1..].to_vec())
}

/// Every self-avoiding walk of length `n` as a word.
pub fn saw_words(n: usize) -> Vec<FreeWord> {
    fn go(at: (i32, i32), left: usize, seen: &mut HashSet<(i32, i32)>, path: &mut Vec<Letter>, out: &mut Vec<FreeWord>) {
        if left == 0 {
            out.push(FreeWord::from_letters(path, 2).expect("self-avoiding walks are reduced"));
            return;
        }
        for l in Letter::alphabet(2) {
            let (dx, dy) = offset(l);
            let next = (at.0 + dx, at.1 + dy);
            if seen.insert(next) {
                path.push(l);
                go(next, left - 1, seen, path, out);
                path.pop();
                seen.remove(&next);
            }
        }
    }
    let mut out = Vec::new();
    go((0, 0), n, &mut HashSet::from([(0, 0)]), &mut Vec::new(), &mut out);
    out
}

/// Whether the self-avoiding walks of length `n` give pairwise distinct
/// elements of `Sol(2,2)`; returns the answer and the number of walks.
pub fn saw_injects_into_group(n: usize) -> Result<(bool, usize)> {
    let spec = GroupSpec { m: 2, d: 2 };
    let words = saw_words(n);
    let mut seen = HashSet::with_capacity(words.len());
    for w in &words {
        seen.insert(SolubleElement::from_word(w, spec)?);
    }
    Ok((seen.len() == words.len(), words.len()))
}
