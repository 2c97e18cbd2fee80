//! Letters and freely reduced words over `a..z` with formal inverses `A..Z`.
//!
//! Letters order as `a < A < b < B < ...`; words compare shortlex, which is
//! the enumeration order used everywhere in the crate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A generator or its formal inverse, encoded as `2 * generator + inverse`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub const MAX_GENERATORS: u8 = 26;

    pub fn new(generator: u8, inverse: bool) -> Self {
        debug_assert!(generator < Self::MAX_GENERATORS);
        Letter(2 * generator + inverse as u8)
    }

    pub fn from_code(code: u8) -> Self {
        debug_assert!(code < 2 * Self::MAX_GENERATORS);
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn generator(self) -> u8 {
        self.0 / 2
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter::new(c as u8 - b'a', false)),
            'A'..='Z' => Some(Letter::new(c as u8 - b'A', true)),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator()) as char
    }

    /// All `2 * rank` letters in alphabet order.
    pub fn alphabet(rank: u8) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * rank).map(Letter)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word. Construction always reduces, so two words are equal
/// as group elements of the free group iff they are equal as values.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord {
            letters: Vec::new(),
        }
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out }
    }

    /// Wraps letters the caller guarantees are already freely reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        GroupWord { letters }
    }

    pub fn generator(generator: u8) -> Self {
        GroupWord {
            letters: vec![Letter::new(generator, false)],
        }
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

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// Largest generator index used, plus one.
    pub fn min_rank(&self) -> u8 {
        self.letters
            .iter()
            .map(|l| l.generator() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        GroupWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Free product of two reduced words.
    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let cancel = self
            .letters
            .iter()
            .rev()
            .zip(other.letters.iter())
            .take_while(|(a, b)| **a == b.inverse())
            .count();
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * cancel);
        letters.extend_from_slice(&self.letters[..self.len() - cancel]);
        letters.extend_from_slice(&other.letters[cancel..]);
        GroupWord { letters }
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Appends one letter, reducing.
    pub fn push(&self, l: Letter) -> GroupWord {
        let mut letters = self.letters.clone();
        if letters.last() == Some(&l.inverse()) {
            letters.pop();
        } else {
            letters.push(l);
        }
        GroupWord { letters }
    }

    pub fn prefix(&self, n: usize) -> GroupWord {
        GroupWord {
            letters: self.letters[..n.min(self.len())].to_vec(),
        }
    }

    pub fn common_prefix_len(&self, other: &GroupWord) -> usize {
        common_prefix(&self.letters, &other.letters)
    }

    pub fn is_prefix_of(&self, other: &GroupWord) -> bool {
        other.letters.starts_with(&self.letters)
    }

    /// Splits `self = u · c · u⁻¹` with `c` cyclically reduced.
    pub fn cyclic_decomposition(&self) -> (GroupWord, GroupWord) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        (
            GroupWord::from_reduced(self.letters[..k].to_vec()),
            GroupWord::from_reduced(self.letters[k..n - k].to_vec()),
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    pub fn shortlex_cmp(&self, other: &GroupWord) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }

    /// Parses a word and checks every letter lies in the rank-`rank` alphabet.
    pub fn parse_with_rank(s: &str, rank: u8) -> Result<GroupWord> {
        let w: GroupWord = s.parse()?;
        if w.min_rank() > rank {
            return Err(Error::invalid_word(
                s,
                format!("uses a generator outside the rank-{rank} alphabet"),
            ));
        }
        Ok(w)
    }
}

pub(crate) fn common_prefix(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl FromStr for GroupWord {
    type Err = Error;

    /// Accepts `e`, `1` or the empty string for the identity.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "e" || t == "1" {
            return Ok(GroupWord::identity());
        }
        let letters = t
            .chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| Error::invalid_word(s, format!("unexpected character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupWord::from_letters(letters))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupWord({self})")
    }
}

impl PartialOrd for GroupWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn parsing_reduces() {
        assert_eq!(w("aA"), GroupWord::identity());
        assert_eq!(w("abBa").to_string(), "aa");
        assert_eq!(w("e").to_string(), "e");
        assert!("a1".parse::<GroupWord>().is_err());
    }

    #[test]
    fn multiplication_cancels_at_the_seam() {
        assert_eq!(w("A").mul(&w("Ab")), w("AAb"));
        assert_eq!(w("ab").mul(&w("Bc")), w("ac"));
        assert_eq!(w("ab").mul(&w("BA")), GroupWord::identity());
    }

    #[test]
    fn cyclic_decomposition_finds_core() {
        let (u, c) = w("aBA").cyclic_decomposition();
        assert_eq!(u, w("a"));
        assert_eq!(c, w("B"));
        let (u, c) = w("ab").cyclic_decomposition();
        assert!(u.is_empty());
        assert_eq!(c, w("ab"));
        let (u, c) = w("abaBA").cyclic_decomposition();
        assert_eq!(u, w("ab"));
        assert_eq!(c, w("a"));
    }

    #[test]
    fn shortlex_order() {
        let mut v = [w("b"), w("aa"), w("A"), w("a"), w("e")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["e", "a", "A", "b", "aa"]);
    }

    #[test]
    fn rank_checked_parse() {
        assert!(GroupWord::parse_with_rank("abc", 2).is_err());
        assert!(GroupWord::parse_with_rank("abAB", 2).is_ok());
    }

    fn arb_word() -> impl Strategy<Value = GroupWord> {
        prop::collection::vec(0u8..6, 0..12)
            .prop_map(|codes| GroupWord::from_letters(codes.into_iter().map(Letter::from_code)))
    }

    proptest! {
        #[test]
        fn group_axioms(x in arb_word(), y in arb_word(), z in arb_word()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            prop_assert_eq!(x.mul(&x.inverse()), GroupWord::identity());
            prop_assert_eq!(x.mul(&y).inverse(), y.inverse().mul(&x.inverse()));
        }

        #[test]
        fn cyclic_decomposition_recomposes(x in arb_word()) {
            let (u, c) = x.cyclic_decomposition();
            prop_assert!(c.is_cyclically_reduced());
            prop_assert_eq!(u.mul(&c).mul(&u.inverse()), x);
        }
    }
}
