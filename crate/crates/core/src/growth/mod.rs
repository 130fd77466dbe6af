//! Ball sizes, self-avoiding walks and n-th root growth estimates.

mod cache;
mod saw;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{Limits, Parallelism};
use crate::error::Result;
use crate::geodesic::Ball;
use crate::tower::GroupSpec;

pub use cache::{BallCache, CACHE_VERSION};
pub use saw::{saw_counts, saw_injects_into_group, saw_words, MAX_SAW_LENGTH};

/// Published value of the connective constant of the square lattice. It is
/// printed next to the computed estimates for comparison and never derived here.
pub const SAW_RATE_REFERENCE: f64 = 2.63815853034;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// `b_0, b_1, …`
    Ball,
    /// `s_0, s_1, …`
    Sphere,
    /// `c_1, c_2, …`
    Saw,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthSeries {
    pub kind: SeriesKind,
    /// `None` for the square lattice walks.
    pub spec: Option<GroupSpec>,
    pub counts: Vec<u64>,
    #[serde(default)]
    pub truncated: bool,
}

impl GrowthSeries {
    /// Index of `counts[0]`.
    pub fn first_index(&self) -> usize {
        match self.kind {
            SeriesKind::Saw => 1,
            _ => 0,
        }
    }

    pub fn saw(counts: Vec<u64>) -> Self {
        GrowthSeries {
            kind: SeriesKind::Saw,
            spec: None,
            counts,
            truncated: false,
        }
    }

    /// Pairs `(n, count)`.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().enumerate().map(|(i, &c)| (i + self.first_index(), c))
    }

    /// Rows `n,count,root` with the n-th root estimate (empty for `n = 0`).
    pub fn to_csv(&self) -> String {
        let roots = rate_estimates(self);
        let mut out = String::from("n,count,root\n");
        for (n, c) in self.indexed() {
            let root = roots
                .iter()
                .find(|(k, _)| *k == n)
                .map(|(_, r)| format!("{r:.6}"))
                .unwrap_or_default();
            writeln!(out, "{n},{c},{root}").unwrap();
        }
        out
    }
}

/// Cumulative ball sizes `b_0..b_n` by level-synchronous BFS, resuming from
/// and extending `cache` when given.
pub fn ball_sizes(
    spec: GroupSpec,
    n: u64,
    limits: &Limits,
    par: &Parallelism,
    cache: Option<&BallCache>,
) -> Result<GrowthSeries> {
    let ball = grow_ball(spec, n, limits, par, cache)?;
    let mut sizes = ball.sizes();
    sizes.truncate(n as usize + 1);
    Ok(GrowthSeries {
        kind: SeriesKind::Ball,
        spec: Some(spec),
        counts: sizes,
        truncated: ball.truncated,
    })
}

/// A ball of radius at least `n` (or less if the memory guard tripped).
pub fn grow_ball(
    spec: GroupSpec,
    n: u64,
    limits: &Limits,
    par: &Parallelism,
    cache: Option<&BallCache>,
) -> Result<Ball> {
    let mut ball = match cache {
        Some(c) => c.load(spec),
        None => Ball::new(spec),
    };
    if let Some(c) = cache {
        if ball.radius() == 0 {
            c.store_last(&ball)?;
        }
    }
    ball.extend_to(n, limits, par, |b| match cache {
        Some(c) => c.store_last(b),
        None => Ok(()),
    })?;
    Ok(ball)
}

/// `counts_n^(1/n)` for every `n ≥ 1` in the series.
pub fn rate_estimates(series: &GrowthSeries) -> Vec<(usize, f64)> {
    series
        .indexed()
        .filter(|&(n, _)| n >= 1)
        .map(|(n, c)| (n, (c as f64).powf(1.0 / n as f64)))
        .collect()
}

/// `1 + Σ_{i=1..n} 2m(2m−1)^(i−1)`, the ball size while balls are trees.
pub fn tree_ball_size(m: usize, n: usize) -> u64 {
    let mut total = 1u64;
    let mut sphere = 2 * m as u64;
    for _ in 0..n {
        total += sphere;
        sphere *= 2 * m as u64 - 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metabelian_balls_are_trees_early() {
        let s = ball_sizes(GroupSpec::new(2, 2).unwrap(), 4, &Limits::default(), &Parallelism::sequential(), None)
            .unwrap();
        assert_eq!(s.counts, (0..=4).map(|n| tree_ball_size(2, n)).collect::<Vec<_>>());
        assert_eq!(tree_ball_size(2, 6), 1457);
    }

    #[test]
    fn lattice_ball_and_rates() {
        let s = ball_sizes(GroupSpec::new(2, 1).unwrap(), 3, &Limits::default(), &Parallelism::sequential(), None)
            .unwrap();
        assert_eq!(s.counts, vec![1, 5, 13, 25]);
        let r = rate_estimates(&s);
        assert_eq!(r.len(), 3);
        assert!((r[0].1 - 5.0).abs() < 1e-12);
        assert!(s.to_csv().starts_with("n,count,root\n0,1,\n1,5,5.000000\n"));
    }

    #[test]
    fn cache_resume_matches_fresh() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path()).unwrap();
        let spec = GroupSpec::new(2, 2).unwrap();
        let lim = Limits::default();
        let par = Parallelism::sequential();
        ball_sizes(spec, 2, &lim, &par, Some(&cache)).unwrap();
        let resumed = ball_sizes(spec, 4, &lim, &par, Some(&cache)).unwrap();
        let fresh = ball_sizes(spec, 4, &lim, &par, None).unwrap();
        assert_eq!(resumed, fresh);
        // asking for less than is cached still returns exactly n + 1 values
        assert_eq!(ball_sizes(spec, 1, &lim, &par, Some(&cache)).unwrap().counts, vec![1, 5]);
    }
}
