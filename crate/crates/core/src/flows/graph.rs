use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::words::{FreeWord, Letter};

/// Group multiplication as seen by the flow code: a right Cayley graph with
/// respect to the standard generators.
pub trait CayleyGraph: Sync {
    type Vertex: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn rank(&self) -> usize;

    fn identity(&self) -> Self::Vertex;

    /// Endpoint of the edge labelled `letter` leaving `v`.
    fn step(&self, v: &Self::Vertex, letter: Letter) -> Self::Vertex;

    fn multiply(&self, u: &Self::Vertex, v: &Self::Vertex) -> Self::Vertex;

    fn invert(&self, v: &Self::Vertex) -> Self::Vertex;

    /// Canonical text form of a vertex.
    fn vertex_form(&self, v: &Self::Vertex) -> String;

    fn parse_vertex(&self, form: &str) -> Result<Self::Vertex>;

    /// Label of a shortest path from `from` to `to`.
    fn geodesic(&self, from: &Self::Vertex, to: &Self::Vertex) -> Result<FreeWord>;

    fn distance(&self, from: &Self::Vertex, to: &Self::Vertex) -> Result<u64> {
        Ok(self.geodesic(from, to)?.len() as u64)
    }

    fn walk(&self, start: &Self::Vertex, letters: &[Letter]) -> Self::Vertex {
        letters
            .iter()
            .fold(start.clone(), |v, &l| self.step(&v, l))
    }
}

pub type Point = Vec<i64>;

/// The free abelian group `Z^m`: the square lattice for `m = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    rank: usize,
}

impl Lattice {
    pub fn new(rank: usize) -> Self {
        assert!((1..=crate::words::MAX_RANK).contains(&rank));
        Lattice { rank }
    }

    pub fn l1(p: &[i64]) -> u64 {
        p.iter().map(|x| x.unsigned_abs()).sum()
    }
}

pub fn point_form(p: &[i64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

pub fn parse_point(form: &str, rank: usize) -> Result<Point> {
    let inner = form
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("lattice point {form:?}")))?;
    let coords: Vec<i64> = if inner.is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|s| s.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("lattice point {form:?}: {e}")))?
    };
    if coords.len() != rank {
        return Err(Error::Parse(format!(
            "lattice point {form:?} has {} coordinates, expected {rank}",
            coords.len()
        )));
    }
    Ok(coords)
}

/// Axis-parallel path: generators in index order, each in one direction.
pub fn lattice_path(diff: &[i64], rank: usize) -> FreeWord {
    let mut letters = Vec::new();
    for (i, &d) in diff.iter().enumerate() {
        let l = Letter::new(i, d < 0);
        letters.extend(std::iter::repeat_n(l, d.unsigned_abs() as usize));
    }
    FreeWord::from_reduced_unchecked(rank, letters)
}

impl CayleyGraph for Lattice {
    type Vertex = Point;

    fn rank(&self) -> usize {
        self.rank
    }

    fn identity(&self) -> Point {
        vec![0; self.rank]
    }

    fn step(&self, v: &Point, letter: Letter) -> Point {
        let mut out = v.clone();
        out[letter.generator()] += letter.sign();
        out
    }

    fn multiply(&self, u: &Point, v: &Point) -> Point {
        u.iter().zip(v).map(|(a, b)| a + b).collect()
    }

    fn invert(&self, v: &Point) -> Point {
        v.iter().map(|a| -a).collect()
    }

    fn vertex_form(&self, v: &Point) -> String {
        point_form(v)
    }

    fn parse_vertex(&self, form: &str) -> Result<Point> {
        parse_point(form, self.rank)
    }

    fn geodesic(&self, from: &Point, to: &Point) -> Result<FreeWord> {
        let diff: Vec<i64> = to.iter().zip(from).map(|(b, a)| b - a).collect();
        Ok(lattice_path(&diff, self.rank))
    }

    fn distance(&self, from: &Point, to: &Point) -> Result<u64> {
        Ok(from
            .iter()
            .zip(to)
            .map(|(a, b)| (a - b).unsigned_abs())
            .sum())
    }
}
