//! Words over a free generating set and its inverses.
//!
//! Generator `i` (zero-based here, `1..=m` in documents) is written as the
//! `i`-th lowercase letter and its inverse as the matching uppercase letter,
//! so ranks up to 26 are supported. The empty word is written `1`.
//!
//! Two input forms are accepted:
//!
//! * letter form: `abAB`
//! * caret form: whitespace separated tokens `x` or `x^n` with a signed
//!   integer exponent, e.g. `a b a^-1 b^-1` or `b^2 a^-3`.
//!
//! Both are normalized to the freely reduced letter form.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 26;

/// A generator or its inverse. Ordered as `a < A < b < B < ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    generator: u8,
    inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator < MAX_RANK, "generator index {generator} too large");
        Letter {
            generator: generator as u8,
            inverse,
        }
    }

    pub fn positive(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn negative(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    /// Zero-based generator index.
    pub fn generator(self) -> usize {
        self.generator as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Position in the alphabet order `a, A, b, B, ...`.
    pub fn ordinal(self) -> usize {
        2 * self.generator as usize + self.inverse as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Self {
        Letter::new(ordinal / 2, ordinal % 2 == 1)
    }

    /// All `2m` letters of rank `m` in alphabet order.
    pub fn alphabet(rank: usize) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * rank).map(Letter::from_ordinal)
    }

    pub fn to_char(self) -> char {
        let base = if self.inverse { b'A' } else { b'a' };
        (base + self.generator) as char
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::new(c as usize - 'a' as usize, false)),
            'A'..='Z' => Some(Letter::new(c as usize - 'A' as usize, true)),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word of a given rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex: shorter words first, then alphabet order letter by letter.
impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.rank.cmp(&other.rank))
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::UnsupportedRank(rank));
    }
    Ok(())
}

/// Freely reduces a raw letter sequence.
pub fn reduce(raw: &[Letter], rank: usize) -> Result<FreeWord> {
    check_rank(rank)?;
    let mut out: Vec<Letter> = Vec::with_capacity(raw.len());
    for &l in raw {
        if l.generator() >= rank {
            return Err(Error::GeneratorOutOfRange {
                index: l.generator() + 1,
                rank,
            });
        }
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Ok(FreeWord { rank, letters: out })
}

impl FreeWord {
    pub fn empty(rank: usize) -> Self {
        FreeWord {
            rank,
            letters: Vec::new(),
        }
    }

    /// Builds a word from letters that are already known to be reduced.
    pub(crate) fn from_reduced_unchecked(rank: usize, letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inv()));
        FreeWord { rank, letters }
    }

    pub fn from_letters(letters: &[Letter], rank: usize) -> Result<Self> {
        reduce(letters, rank)
    }

    /// Parses letter form or caret form and reduces.
    pub fn parse(input: &str, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        let raw = parse_raw(input)?;
        reduce(&raw, rank)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut raw = self.letters.clone();
        raw.extend_from_slice(&other.letters);
        reduce(&raw, self.rank.max(other.rank)).expect("letters already in range")
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) if self.letters.len() > 1 => f != l.inv(),
            _ => true,
        }
    }

    /// Strips mutually inverse first/last letters until the word is cyclically reduced.
    pub fn cyclic_reduce(&self) -> FreeWord {
        let mut start = 0;
        let mut end = self.letters.len();
        while end - start >= 2 && self.letters[start] == self.letters[end - 1].inv() {
            start += 1;
            end -= 1;
        }
        FreeWord {
            rank: self.rank,
            letters: self.letters[start..end].to_vec(),
        }
    }

    /// Exponent sum on each generator.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.generator()] += l.sign();
        }
        sums
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| !l.is_inverse())
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let raw = parse_raw(&s).map_err(serde::de::Error::custom)?;
        let rank = raw.iter().map(|l| l.generator() + 1).max().unwrap_or(1);
        reduce(&raw, rank).map_err(serde::de::Error::custom)
    }
}

fn invalid(input: &str, reason: impl Into<String>) -> Error {
    Error::InvalidWord {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Parses either input form into an unreduced letter sequence.
pub fn parse_raw(input: &str) -> Result<Vec<Letter>> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Err(invalid(input, "empty input (use \"1\" for the empty word)"));
    }
    if trimmed == "1" {
        return Ok(Vec::new());
    }
    if !trimmed.contains('^') && !trimmed.contains(char::is_whitespace) {
        return trimmed
            .chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| invalid(input, format!("unexpected character {c:?}")))
            })
            .collect();
    }
    let mut out = Vec::new();
    for token in trimmed.split_whitespace() {
        if token == "1" {
            continue;
        }
        let (base, exponent) = match token.split_once('^') {
            Some((b, e)) => {
                let e: i64 = e
                    .parse()
                    .map_err(|_| invalid(input, format!("bad exponent in {token:?}")))?;
                (b, e)
            }
            None => (token, 1),
        };
        let mut chars = base.chars();
        let letter = match (chars.next(), chars.next()) {
            (Some(c), None) => Letter::from_char(c)
                .ok_or_else(|| invalid(input, format!("unexpected token {token:?}")))?,
            _ => {
                if exponent != 1 {
                    return Err(invalid(input, format!("exponent on multi-letter token {token:?}")));
                }
                for c in base.chars() {
                    out.push(
                        Letter::from_char(c)
                            .ok_or_else(|| invalid(input, format!("unexpected token {token:?}")))?,
                    );
                }
                continue;
            }
        };
        let letter = if exponent < 0 { letter.inv() } else { letter };
        out.extend(std::iter::repeat_n(letter, exponent.unsigned_abs() as usize));
    }
    Ok(out)
}

/// Number of freely reduced words of length exactly `k` over rank `m`.
pub fn count_irreducible(rank: usize, k: usize) -> u128 {
    if k == 0 {
        return 1;
    }
    let m = rank as u128;
    2 * m * (2 * m - 1).pow(k as u32 - 1)
}

/// The reduced word of length `k` at position `index` in enumeration order.
pub fn irreducible_word_at(rank: usize, k: usize, index: u128) -> Option<FreeWord> {
    if index >= count_irreducible(rank, k) {
        return None;
    }
    if k == 0 {
        return Some(FreeWord::empty(rank));
    }
    let base = 2 * rank as u128 - 1;
    // mixed radix digits: first in 0..2m, rest in 0..2m-1
    let mut digits = vec![0usize; k];
    let mut rest = index;
    for slot in digits.iter_mut().skip(1).rev() {
        *slot = (rest % base) as usize;
        rest /= base;
    }
    digits[0] = rest as usize;
    let mut letters = Vec::with_capacity(k);
    let first = Letter::from_ordinal(digits[0]);
    letters.push(first);
    for &d in &digits[1..] {
        let prev = *letters.last().unwrap();
        letters.push(nth_successor(prev, d));
    }
    Some(FreeWord { rank, letters })
}

/// The `d`-th letter (in alphabet order) that may follow `prev` in a reduced word.
fn nth_successor(prev: Letter, d: usize) -> Letter {
    let skip = prev.inv().ordinal();
    let ord = if d >= skip { d + 1 } else { d };
    Letter::from_ordinal(ord)
}

/// Iterator over all freely reduced words of one length, in alphabet order.
#[derive(Clone, Debug)]
pub struct IrreducibleWords {
    rank: usize,
    digits: Vec<usize>,
    remaining: u128,
}

impl Iterator for IrreducibleWords {
    type Item = FreeWord;

    fn next(&mut self) -> Option<FreeWord> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let mut letters: Vec<Letter> = Vec::with_capacity(self.digits.len());
        for (i, &d) in self.digits.iter().enumerate() {
            let l = if i == 0 {
                Letter::from_ordinal(d)
            } else {
                nth_successor(letters[i - 1], d)
            };
            letters.push(l);
        }
        // advance odometer
        let base = 2 * self.rank - 1;
        for i in (0..self.digits.len()).rev() {
            let limit = if i == 0 { 2 * self.rank } else { base };
            self.digits[i] += 1;
            if self.digits[i] < limit {
                break;
            }
            self.digits[i] = 0;
        }
        Some(FreeWord {
            rank: self.rank,
            letters,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

/// All reduced words of length exactly `k`.
pub fn enumerate_irreducible(rank: usize, k: usize) -> IrreducibleWords {
    IrreducibleWords::range(rank, k, 0, count_irreducible(rank, k))
}

impl IrreducibleWords {
    /// Words with enumeration index in `start..end`, so sweeps can be split into chunks.
    pub fn range(rank: usize, k: usize, start: u128, end: u128) -> Self {
        let total = count_irreducible(rank, k);
        let end = end.min(total);
        let start = start.min(end);
        let base = (2 * rank - 1).max(1) as u128;
        let mut digits = vec![0usize; k];
        let mut rest = start;
        for slot in digits.iter_mut().skip(1).rev() {
            *slot = (rest % base) as usize;
            rest /= base;
        }
        if k > 0 {
            digits[0] = rest as usize;
        }
        IrreducibleWords {
            rank,
            digits,
            remaining: end - start,
        }
    }
}

/// Every reduced word of length at most `k`, shortest first.
pub fn enumerate_up_to(rank: usize, k: usize) -> impl Iterator<Item = FreeWord> {
    (0..=k).flat_map(move |len| enumerate_irreducible(rank, len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FreeWord {
        FreeWord::parse(s, 2).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("aA").to_string(), "1");
        assert_eq!(w("abBA").to_string(), "1");
        assert_eq!(w("abAB").to_string(), "abAB");
    }

    #[test]
    fn reduce_rejects_out_of_range() {
        assert!(matches!(
            FreeWord::parse("abc", 2),
            Err(Error::GeneratorOutOfRange { index: 3, rank: 2 })
        ));
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("aba").cyclic_reduce().to_string(), "aba");
        assert_eq!(w("Aba").cyclic_reduce().to_string(), "b");
        assert_eq!(w("1").cyclic_reduce().to_string(), "1");
        assert!(w("aBAb").is_cyclically_reduced());
        assert!(!w("abA").is_cyclically_reduced());
    }

    #[test]
    fn caret_form() {
        assert_eq!(w("a b a^-1 b^-1").to_string(), "abAB");
        assert_eq!(w("b^2 a^-3").to_string(), "bbAAA");
        assert_eq!(w("b^2 b^-2").to_string(), "1");
        assert!(FreeWord::parse("a^x", 2).is_err());
        assert!(FreeWord::parse("", 2).is_err());
        assert!(FreeWord::parse("a1", 2).is_err());
    }

    #[test]
    fn enumeration_small() {
        let words: Vec<String> = enumerate_irreducible(2, 1).map(|w| w.to_string()).collect();
        assert_eq!(words, ["a", "A", "b", "B"]);
        assert_eq!(enumerate_irreducible(2, 2).count(), 12);
        let zero: Vec<_> = enumerate_irreducible(2, 0).collect();
        assert_eq!(zero.len(), 1);
        assert!(zero[0].is_empty());
        let two: Vec<String> = enumerate_irreducible(2, 2).map(|w| w.to_string()).collect();
        assert_eq!(&two[..4], ["aa", "ab", "aB", "AA"]);
    }

    #[test]
    fn enumeration_counts_match_formula() {
        for m in 1..=3 {
            for k in 0..=6 {
                let words: Vec<_> = enumerate_irreducible(m, k).collect();
                assert_eq!(words.len() as u128, count_irreducible(m, k), "m={m} k={k}");
                let mut sorted = words.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), words.len());
                assert_eq!(sorted, words, "enumeration is in alphabet order");
                for word in &words {
                    assert_eq!(word.len(), k);
                    assert_eq!(reduce(word.letters(), m).unwrap(), *word);
                }
            }
        }
    }

    #[test]
    fn prefixes_of_irreducible_are_irreducible() {
        for k in 0..=5 {
            for word in enumerate_irreducible(2, k) {
                for j in 0..=k {
                    let prefix = &word.letters()[..j];
                    assert_eq!(reduce(prefix, 2).unwrap().len(), j);
                }
            }
        }
    }

    #[test]
    fn unranking_matches_iteration() {
        for (i, word) in enumerate_irreducible(3, 4).enumerate() {
            assert_eq!(irreducible_word_at(3, 4, i as u128).unwrap(), word);
        }
        let tail: Vec<_> = IrreducibleWords::range(2, 5, 100, 110).collect();
        let all: Vec<_> = enumerate_irreducible(2, 5).collect();
        assert_eq!(tail, all[100..110]);
    }
}
