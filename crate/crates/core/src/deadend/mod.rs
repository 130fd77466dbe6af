//! Dead ends and their depth.
//!
//! `g` is a strict dead end of depth `k` when `|g| > |g a_1| > … > |g a_1…a_k|`
//! for every freely irreducible word `a_1…a_k`. The non-strict version only
//! asks that the `k`-ball around `g` stays inside the `|g|`-ball around 1.

mod construct;
mod search;

use serde::{Deserialize, Serialize};

use crate::config::Parallelism;
use crate::error::{Error, Result};
use crate::tower::{GroupSpec, SolubleElement};
use crate::words::{enumerate_irreducible, FreeWord, Letter};

pub use construct::{
    construct_dead_end, verify_certificate, Construction, ConstructionOptions, ConstructionStats,
    DepthCertificate, Multipliers, Verification,
};

/// Exact length oracle used by the depth searches.
pub type LengthFn<'a> = dyn Fn(&SolubleElement) -> Result<u64> + Sync + 'a;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthReport {
    pub strict_depth: usize,
    pub is_dead_end: bool,
    /// First irreducible word (shortlex) whose chain stops decreasing, if found within `max_k`.
    pub limiting_witness: Option<FreeWord>,
    /// `|g|` followed by the lengths along the witness.
    pub witness_chain: Vec<u64>,
    pub length: u64,
}

fn tagged(length_fn: &LengthFn<'_>, x: &SolubleElement) -> Result<u64> {
    length_fn(x).map_err(|e| Error::LengthFailed {
        element: x.canonical_form(),
        source: Box::new(e),
    })
}

/// Largest `k ≤ max_k` for which lengths strictly decrease along every
/// irreducible word of length `k`.
pub fn strict_depth(
    x: &SolubleElement,
    max_k: usize,
    length_fn: &LengthFn<'_>,
    par: &Parallelism,
) -> Result<DepthReport> {
    let m = x.spec().m;
    let length = tagged(length_fn, x)?;
    // (word, element, length of element)
    let mut level: Vec<(FreeWord, SolubleElement, u64)> = vec![(FreeWord::empty(m), x.clone(), length)];
    for k in 0..max_k {
        let extended = par.map(&level, |(w, g, len)| -> Result<Vec<(FreeWord, SolubleElement, u64, bool)>> {
            let mut out = Vec::new();
            for l in Letter::alphabet(m) {
                if w.letters().last() == Some(&l.inv()) {
                    continue;
                }
                let next = g.mul_letter(l);
                let next_len = tagged(length_fn, &next)?;
                let word = FreeWord::from_letters(&[w.letters(), &[l]].concat(), m)?;
                out.push((word, next, next_len, next_len < *len));
            }
            Ok(out)
        });
        let mut next_level = Vec::new();
        for part in extended {
            next_level.extend(part?);
        }
        if let Some((w, _, _, _)) = next_level.iter().find(|t| !t.3) {
            let chain = chain_lengths(x, w, length_fn)?;
            return Ok(DepthReport {
                strict_depth: k,
                is_dead_end: k >= 1,
                limiting_witness: Some(w.clone()),
                witness_chain: chain,
                length,
            });
        }
        level = next_level.into_iter().map(|(w, g, l, _)| (w, g, l)).collect();
    }
    Ok(DepthReport {
        strict_depth: max_k,
        is_dead_end: max_k >= 1 || is_dead_end(x, length_fn)?,
        limiting_witness: None,
        witness_chain: vec![length],
        length,
    })
}

/// `|g|, |g a_1|, …, |g a_1…a_k|` along `word`.
pub fn chain_lengths(x: &SolubleElement, word: &FreeWord, length_fn: &LengthFn<'_>) -> Result<Vec<u64>> {
    let mut g = x.clone();
    let mut out = vec![tagged(length_fn, &g)?];
    for &l in word.letters() {
        g = g.mul_letter(l);
        out.push(tagged(length_fn, &g)?);
    }
    Ok(out)
}

pub fn is_dead_end(x: &SolubleElement, length_fn: &LengthFn<'_>) -> Result<bool> {
    let len = tagged(length_fn, x)?;
    for l in Letter::alphabet(x.spec().m) {
        if tagged(length_fn, &x.mul_letter(l))? >= len {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `k ≤ max_k` with `|g w| ≤ |g|` for every reduced `w` of length at most `k`.
pub fn nonstrict_depth(
    x: &SolubleElement,
    max_k: usize,
    length_fn: &LengthFn<'_>,
    par: &Parallelism,
) -> Result<usize> {
    let m = x.spec().m;
    let len = tagged(length_fn, x)?;
    for k in 1..=max_k {
        let words: Vec<FreeWord> = enumerate_irreducible(m, k).collect();
        let ok = par.map(&words, |w| -> Result<bool> { Ok(tagged(length_fn, &x.mul_word(w))? <= len) });
        for r in ok {
            if !r? {
                return Ok(k - 1);
            }
        }
    }
    Ok(max_k)
}

/// `g = b²(ab⁻¹)²(b⁻¹a⁻¹)²(a⁻¹b)²(ba)²b⁻²` in `Sol(2,2)`, a strict dead end of depth 2.
pub fn depth_two_example() -> SolubleElement {
    let word = depth_two_example_word();
    SolubleElement::from_word(&word, GroupSpec { m: 2, d: 2 }).expect("valid word")
}

pub fn depth_two_example_word() -> FreeWord {
    let text = "b^2 a b^-1 a b^-1 b^-1 a^-1 b^-1 a^-1 a^-1 b a^-1 b b a b a b^-2";
    FreeWord::parse(text, 2).expect("valid word")
}
