//! Elements of the free soluble group `Sol(m, d) = F_m / F_m^(d)`.
//!
//! Degree 1 is `Z^m`. For `d ≥ 2` an element is the flow its words induce on
//! the Cayley graph of `Sol(m, d − 1)`: two words are equal in `Sol(m, d)`
//! exactly when they induce the same flow there. Flows are compared in
//! canonical sparse form, so structural equality is group equality.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::flows::{
    self, canonical_form, classify, lattice_path, parse_canonical, parse_point, point_form,
    translate, BalanceKind, CayleyGraph, EdgeKey, Flow,
};
use crate::words::{FreeWord, Letter, MAX_RANK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupSpec {
    pub m: usize,
    pub d: usize,
}

impl GroupSpec {
    pub fn new(m: usize, d: usize) -> Result<Self> {
        if m == 0 || m > MAX_RANK {
            return Err(Error::UnsupportedRank(m));
        }
        if d == 0 {
            return Err(Error::Unsupported("solvability degree must be at least 1".into()));
        }
        Ok(GroupSpec { m, d })
    }

    /// The group whose Cayley graph carries the flows of this one.
    pub fn lower(self) -> Option<GroupSpec> {
        (self.d >= 2).then_some(GroupSpec {
            m: self.m,
            d: self.d - 1,
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sol({},{})", self.m, self.d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    /// Degree 1: a point of `Z^m`.
    Abelian(Vec<i64>),
    /// Degree ≥ 2: a flow on the Cayley graph of the next group down.
    Flow(Flow<SolubleElement>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolubleElement {
    spec: GroupSpec,
    payload: Payload,
}

impl fmt::Debug for SolubleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.spec, self.canonical_form())
    }
}

/// The Cayley graph of `Sol(m, d)` with vertices [`SolubleElement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolubleGroup {
    spec: GroupSpec,
}

impl SolubleGroup {
    pub fn new(spec: GroupSpec) -> Self {
        SolubleGroup { spec }
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }
}

fn check_same(a: GroupSpec, b: GroupSpec) -> Result<()> {
    if a != b {
        return Err(Error::SpecMismatch(format!("{a} vs {b}")));
    }
    Ok(())
}

impl SolubleElement {
    pub fn identity(spec: GroupSpec) -> Self {
        let payload = if spec.d == 1 {
            Payload::Abelian(vec![0; spec.m])
        } else {
            Payload::Flow(Flow::zero(spec.m))
        };
        SolubleElement { spec, payload }
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    /// The payload flow for degree ≥ 2.
    pub fn flow(&self) -> Option<&Flow<SolubleElement>> {
        match &self.payload {
            Payload::Flow(f) => Some(f),
            Payload::Abelian(_) => None,
        }
    }

    pub fn point(&self) -> Option<&[i64]> {
        match &self.payload {
            Payload::Abelian(p) => Some(p),
            Payload::Flow(_) => None,
        }
    }

    pub fn from_point(m: usize, point: Vec<i64>) -> Self {
        assert_eq!(point.len(), m);
        SolubleElement {
            spec: GroupSpec { m, d: 1 },
            payload: Payload::Abelian(point),
        }
    }

    /// Wraps a flow on the Cayley graph of `Sol(m, d−1)`; it must be induced by some word.
    pub fn from_flow(spec: GroupSpec, flow: Flow<SolubleElement>) -> Result<Self> {
        let lower = spec
            .lower()
            .ok_or_else(|| Error::Unsupported("degree-1 elements are lattice points".into()))?;
        let graph = SolubleGroup::new(lower);
        let report = classify(&graph, &flow);
        match report.kind {
            BalanceKind::Balanced => {}
            BalanceKind::SemiBalanced => {
                if report.v_minus != Some(graph.identity()) {
                    return Err(Error::NotBasedAtIdentity);
                }
            }
            BalanceKind::Unconstrained => return Err(Error::Unconstrained),
        }
        Ok(SolubleElement {
            spec,
            payload: Payload::Flow(flow),
        })
    }

    pub fn is_identity(&self) -> bool {
        match &self.payload {
            Payload::Abelian(p) => p.iter().all(|&x| x == 0),
            Payload::Flow(f) => f.is_zero(),
        }
    }

    pub fn from_word(word: &FreeWord, spec: GroupSpec) -> Result<Self> {
        if word.rank() > spec.m {
            return Err(Error::SpecMismatch(format!(
                "word of rank {} in {spec}",
                word.rank()
            )));
        }
        let mut x = SolubleElement::identity(spec);
        let mut end = x.lower_identity();
        for &l in word.letters() {
            x.push_letter(l, &mut end);
        }
        Ok(x)
    }

    /// Image of the generator (or inverse) `letter`.
    pub fn generator(letter: Letter, spec: GroupSpec) -> Self {
        let mut x = SolubleElement::identity(spec);
        let mut end = x.lower_identity();
        x.push_letter(letter, &mut end);
        x
    }

    fn lower_identity(&self) -> Option<SolubleElement> {
        self.spec.lower().map(SolubleElement::identity)
    }

    /// Right multiplication by one letter, given the current endpoint in the
    /// lower group (kept in sync).
    fn push_letter(&mut self, letter: Letter, end: &mut Option<SolubleElement>) {
        match &mut self.payload {
            Payload::Abelian(p) => p[letter.generator()] += letter.sign(),
            Payload::Flow(f) => {
                let at = end.as_ref().expect("flow payload has a lower endpoint");
                let graph = SolubleGroup::new(at.spec);
                let next = flows::push_step(&graph, f, at, letter);
                *end = Some(next);
            }
        }
    }

    /// Image in the next group down: the identity for balanced payloads,
    /// `v_plus` for semi-balanced ones. `None` in degree 1.
    pub fn endpoint(&self) -> Option<SolubleElement> {
        match &self.payload {
            Payload::Abelian(_) => None,
            Payload::Flow(f) if self.spec.d == 2 => {
                // in Z^m the endpoint is the signed sum of traversed generators
                let mut small = vec![0i128; self.spec.m];
                let mut exact = true;
                for (k, v) in f.entries() {
                    match i64::try_from(v) {
                        Ok(x) => small[k.generator] += x as i128,
                        Err(_) => {
                            exact = false;
                            break;
                        }
                    }
                }
                let p: Vec<i64> = if exact {
                    small.iter().map(|&s| s as i64).collect()
                } else {
                    let mut sums = vec![BigInt::default(); self.spec.m];
                    for (k, v) in f.entries() {
                        sums[k.generator] += v;
                    }
                    sums.iter()
                        .map(|s| i64::try_from(s).expect("endpoint coordinates fit in i64"))
                        .collect()
                };
                Some(SolubleElement::from_point(self.spec.m, p))
            }
            Payload::Flow(f) => {
                let lower = self.spec.lower().unwrap();
                let graph = SolubleGroup::new(lower);
                let report = classify(&graph, f);
                Some(match report.kind {
                    BalanceKind::SemiBalanced => report.v_plus.unwrap(),
                    _ => SolubleElement::identity(lower),
                })
            }
        }
    }

    /// `self · a` for a single letter.
    pub fn mul_letter(&self, letter: Letter) -> SolubleElement {
        let mut out = self.clone();
        let mut end = self.endpoint();
        out.push_letter(letter, &mut end);
        out
    }

    pub fn mul_word(&self, word: &FreeWord) -> SolubleElement {
        let mut out = self.clone();
        let mut end = self.endpoint();
        for &l in word.letters() {
            out.push_letter(l, &mut end);
        }
        out
    }

    pub fn multiply(&self, other: &SolubleElement) -> Result<SolubleElement> {
        check_same(self.spec, other.spec)?;
        Ok(self.multiply_unchecked(other))
    }

    fn multiply_unchecked(&self, other: &SolubleElement) -> SolubleElement {
        let payload = match (&self.payload, &other.payload) {
            (Payload::Abelian(a), Payload::Abelian(b)) => {
                Payload::Abelian(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Payload::Flow(a), Payload::Flow(b)) => {
                let graph = SolubleGroup::new(self.spec.lower().unwrap());
                let shift = self.endpoint().unwrap();
                Payload::Flow(a.add(&translate(&graph, b, &shift)))
            }
            _ => unreachable!("payload kinds follow the degree"),
        };
        SolubleElement {
            spec: self.spec,
            payload,
        }
    }

    pub fn invert(&self) -> SolubleElement {
        let payload = match &self.payload {
            Payload::Abelian(a) => Payload::Abelian(a.iter().map(|x| -x).collect()),
            Payload::Flow(f) => {
                let graph = SolubleGroup::new(self.spec.lower().unwrap());
                let back = self.endpoint().unwrap().invert();
                Payload::Flow(translate(&graph, f, &back).negate())
            }
        };
        SolubleElement {
            spec: self.spec,
            payload,
        }
    }

    pub fn equals(&self, other: &SolubleElement) -> Result<bool> {
        check_same(self.spec, other.spec)?;
        Ok(self == other)
    }

    /// Exponent-sum image in `Z^m`.
    pub fn abelianization(&self) -> Vec<i64> {
        match &self.payload {
            Payload::Abelian(p) => p.clone(),
            Payload::Flow(_) => self.endpoint().unwrap().abelianization(),
        }
    }

    /// Canonical text: `[x,y,...]` in degree 1, the canonical flow form above.
    pub fn canonical_form(&self) -> String {
        match &self.payload {
            Payload::Abelian(p) => point_form(p),
            Payload::Flow(f) => {
                canonical_form(&SolubleGroup::new(self.spec.lower().unwrap()), f)
            }
        }
    }

    pub fn parse_canonical(spec: GroupSpec, text: &str) -> Result<Self> {
        match spec.lower() {
            None => Ok(SolubleElement::from_point(spec.m, parse_point(text, spec.m)?)),
            Some(lower) => {
                let flow = parse_canonical(&SolubleGroup::new(lower), text)?;
                SolubleElement::from_flow(spec, flow)
            }
        }
    }

    /// SHA-256 of the canonical form, hex encoded.
    pub fn canonical_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_form().as_bytes()))
    }

    /// Number of stored entries, summed through the tower.
    pub fn size(&self) -> usize {
        match &self.payload {
            Payload::Abelian(p) => p.len(),
            Payload::Flow(f) => f.entries().map(|(k, _)| 1 + k.source.size()).sum(),
        }
    }

    /// Rough heap footprint, for memory guards.
    pub fn approx_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + match &self.payload {
                Payload::Abelian(p) => p.len() * 8,
                Payload::Flow(f) => f
                    .entries()
                    .map(|(k, v)| 64 + v.bits() as usize / 8 + k.source.approx_bytes())
                    .sum(),
            }
    }
}

impl CayleyGraph for SolubleGroup {
    type Vertex = SolubleElement;

    fn rank(&self) -> usize {
        self.spec.m
    }

    fn identity(&self) -> SolubleElement {
        SolubleElement::identity(self.spec)
    }

    fn step(&self, v: &SolubleElement, letter: Letter) -> SolubleElement {
        v.mul_letter(letter)
    }

    fn multiply(&self, u: &SolubleElement, v: &SolubleElement) -> SolubleElement {
        u.multiply_unchecked(v)
    }

    fn invert(&self, v: &SolubleElement) -> SolubleElement {
        v.invert()
    }

    fn vertex_form(&self, v: &SolubleElement) -> String {
        v.canonical_form()
    }

    fn parse_vertex(&self, form: &str) -> Result<SolubleElement> {
        SolubleElement::parse_canonical(self.spec, form)
    }

    fn geodesic(&self, from: &SolubleElement, to: &SolubleElement) -> Result<FreeWord> {
        let diff = from.invert().multiply_unchecked(to);
        match self.spec.d {
            1 => Ok(lattice_path(diff.point().unwrap(), self.spec.m)),
            2 => Ok(crate::geodesic::length_exact_metabelian(&diff)?.witness),
            _ => Err(Error::Unsupported(format!(
                "geodesics in {} for general elements",
                self.spec
            ))),
        }
    }

    fn distance(&self, from: &SolubleElement, to: &SolubleElement) -> Result<u64> {
        let diff = from.invert().multiply_unchecked(to);
        crate::geodesic::exact_length(&diff)
    }
}

/// The characteristic flow `χ_e` of one positively oriented edge.
pub fn unit_edge_flow(source: SolubleElement, generator: usize, m: usize) -> Flow<SolubleElement> {
    let mut f = Flow::zero(m);
    f.add_at(EdgeKey::new(source, generator), &BigInt::one());
    f
}

/// True when every payload value fits in an `i64`, recursively.
pub fn has_small_values(x: &SolubleElement) -> bool {
    match &x.payload {
        Payload::Abelian(_) => true,
        Payload::Flow(f) => f
            .entries()
            .all(|(k, v)| v.abs().bits() < 63 && has_small_values(&k.source)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(m: usize, d: usize) -> GroupSpec {
        GroupSpec::new(m, d).unwrap()
    }

    fn el(w: &str, m: usize, d: usize) -> SolubleElement {
        SolubleElement::from_word(&FreeWord::parse(w, m).unwrap(), sol(m, d)).unwrap()
    }

    #[test]
    fn commutator_dies_in_z2_but_not_in_metabelian() {
        assert!(el("ABab", 2, 1).is_identity());
        assert!(!el("ABab", 2, 2).is_identity());
        assert!(el("1", 2, 2).is_identity());
        assert!(el("1", 3, 3).is_identity());
    }

    #[test]
    fn ab_and_ba_differ_in_metabelian() {
        assert_ne!(el("ab", 2, 2), el("ba", 2, 2));
        assert_eq!(el("ab", 2, 1), el("ba", 2, 1));
    }

    #[test]
    fn commutator_of_relators_is_trivial() {
        // r1 = [a,b], r2 = b[a,b]B are relators of Z^2; their commutator dies in Sol(2,2)
        let w = FreeWord::parse("BAba bBAbaB ABab bABabB", 2).unwrap();
        assert!(!w.is_empty());
        assert!(SolubleElement::from_word(&w, sol(2, 2)).unwrap().is_identity());
        assert!(!SolubleElement::from_word(&w, sol(2, 3)).unwrap().is_identity());
    }

    #[test]
    fn abelianization_examples() {
        assert_eq!(el("aab", 2, 2).abelianization(), vec![2, 1]);
        assert_eq!(el("ABab", 2, 3).abelianization(), vec![0, 0]);
        assert_eq!(SolubleElement::identity(sol(3, 2)).abelianization(), vec![0, 0, 0]);
    }

    #[test]
    fn endpoint_matches_lower_image() {
        let x = el("abbAb", 2, 3);
        assert_eq!(x.endpoint().unwrap(), el("abbAb", 2, 2));
        assert_eq!(el("abbAb", 2, 2).endpoint().unwrap(), el("abbAb", 2, 1));
    }

    #[test]
    fn group_law_small() {
        let x = el("abAAb", 2, 3);
        let y = el("BBaba", 2, 3);
        assert_eq!(x.multiply(&y).unwrap(), el("abAAbBBaba", 2, 3));
        assert!(x.multiply(&x.invert()).unwrap().is_identity());
        assert!(x.multiply(&el("a", 2, 2)).is_err());
    }

    #[test]
    fn canonical_round_trip_through_tower() {
        for (w, d) in [("abAAbB", 1), ("abAABaab", 2), ("abAABaab", 3)] {
            let x = el(w, 2, d);
            let text = x.canonical_form();
            let back = SolubleElement::parse_canonical(sol(2, d), &text).unwrap();
            assert_eq!(back, x);
            assert_eq!(back.canonical_hash(), x.canonical_hash());
        }
        assert_eq!(el("aaB", 2, 1).canonical_form(), "[2,-1]");
    }

    #[test]
    fn from_flow_rejects_unconstrained() {
        let mut f = Flow::zero(2);
        f.add_at(
            EdgeKey::new(SolubleElement::identity(sol(2, 1)), 0),
            &BigInt::from(2),
        );
        assert!(SolubleElement::from_flow(sol(2, 2), f).is_err());
    }
}
