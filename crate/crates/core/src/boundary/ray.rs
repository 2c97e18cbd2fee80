use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::word::{GroupWord, Letter};

/// An eventually periodic infinite reduced word `u · v · v · v ⋯`.
///
/// Stored canonically: the period is primitive and the preperiod is as short
/// as possible, so two rays are equal as boundary points iff they are equal
/// as values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ray {
    prefix: GroupWord,
    period: GroupWord,
}

impl Ray {
    pub fn new(prefix: GroupWord, period: GroupWord) -> Result<Ray> {
        let shown = || format!("{prefix}|{period}");
        if period.is_empty() {
            return Err(Error::invalid_word(shown(), "ray period must be nonempty"));
        }
        if !period.is_cyclically_reduced() {
            return Err(Error::invalid_word(
                shown(),
                "ray period must be cyclically reduced",
            ));
        }
        if let (Some(l), Some(f)) = (prefix.last(), period.first()) {
            if l == f.inverse() {
                return Err(Error::invalid_word(
                    shown(),
                    "preperiod cancels against the period",
                ));
            }
        }
        Ok(Self::canonical(
            prefix.letters().to_vec(),
            period.letters().to_vec(),
        ))
    }

    /// The ray `v^∞`.
    pub fn periodic(period: GroupWord) -> Result<Ray> {
        Ray::new(GroupWord::identity(), period)
    }

    /// The representative point `w · (last letter of w)^∞` of the cell `[w]`.
    pub fn cell_point(cell: &GroupWord) -> Result<Ray> {
        let last = cell
            .last()
            .ok_or_else(|| Error::invalid_word("e", "cells have depth at least 1"))?;
        Ray::new(cell.clone(), GroupWord::from_letters([last]))
    }

    fn canonical(mut u: Vec<Letter>, v: Vec<Letter>) -> Ray {
        let n = v.len();
        let root = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| v[i] == v[i - d]))
            .unwrap_or(n);
        let mut v = v[..root].to_vec();
        while let (Some(&l), Some(&t)) = (u.last(), v.last()) {
            if l != t {
                break;
            }
            u.pop();
            v.rotate_right(1);
        }
        Ray {
            prefix: GroupWord::from_reduced(u),
            period: GroupWord::from_reduced(v),
        }
    }

    pub fn preperiod(&self) -> &GroupWord {
        &self.prefix
    }

    pub fn period(&self) -> &GroupWord {
        &self.period
    }

    pub fn letter(&self, i: usize) -> Letter {
        let u = self.prefix.letters();
        if i < u.len() {
            u[i]
        } else {
            let v = self.period.letters();
            v[(i - u.len()) % v.len()]
        }
    }

    /// The first `n` letters.
    pub fn head(&self, n: usize) -> GroupWord {
        GroupWord::from_reduced((0..n).map(|i| self.letter(i)).collect())
    }

    pub fn max_generator(&self) -> u8 {
        self.prefix.min_rank().max(self.period.min_rank())
    }

    /// Length of the longest common prefix, or `None` if the rays coincide.
    pub fn confluence(&self, other: &Ray) -> Option<usize> {
        if self == other {
            return None;
        }
        // Two distinct eventually periodic words differ within this many letters.
        let bound =
            self.prefix.len().max(other.prefix.len()) + self.period.len() + other.period.len();
        let i = (0..bound)
            .find(|&i| self.letter(i) != other.letter(i))
            .expect("distinct canonical rays differ within the Fine–Wilf bound");
        Some(i)
    }

    /// Length of the common prefix with a finite word.
    pub fn confluence_with_word(&self, w: &GroupWord) -> usize {
        w.letters()
            .iter()
            .enumerate()
            .take_while(|(i, l)| self.letter(*i) == **l)
            .count()
    }

    /// Whether the ray lies in the cylinder `[w]`.
    pub fn in_cell(&self, w: &GroupWord) -> bool {
        self.confluence_with_word(w) == w.len()
    }

    /// Image under the left action of a group element.
    pub fn act(&self, g: &GroupWord) -> Ray {
        let w = g.mul(&self.prefix);
        // Enough period copies that cancellation cannot eat all of them.
        let copies = w.len() / self.period.len() + 1;
        let x = w.mul(&self.period.pow(copies as i64));
        Ray::canonical(x.letters().to_vec(), self.period.letters().to_vec())
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.prefix, self.period)
    }
}

impl fmt::Debug for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ray({self})")
    }
}

impl FromStr for Ray {
    type Err = Error;

    /// Parses `u|v`; a bare `v` means `v^∞`.
    fn from_str(s: &str) -> Result<Ray> {
        let (u, v) = s.split_once('|').unwrap_or(("", s));
        Ray::new(u.parse()?, v.parse()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Ray {
        s.parse().unwrap()
    }

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(r("a|a"), r("a"));
        assert_eq!(r("ab|ab"), r("ab"));
        assert_eq!(r("abab"), r("ab"));
        assert_eq!(r("b|ab"), r("ba"));
        assert_eq!(r("aab|aab").to_string(), "e|aab");
        assert_eq!(r("Ba|ba"), r("B|ab"));
        assert!("a|A".parse::<Ray>().is_err());
        assert!("aB|e".parse::<Ray>().is_err());
        assert!("b|aBA".parse::<Ray>().is_err());
    }

    #[test]
    fn confluence_depths() {
        assert_eq!(r("a").confluence(&r("b")), Some(0));
        assert_eq!(r("ab").confluence(&r("ab")), None);
        assert_eq!(r("a").confluence(&r("aab")), Some(2));
        assert_eq!(r("a").confluence_with_word(&w("A")), 0);
        assert_eq!(r("ab").confluence_with_word(&w("abaB")), 3);
    }

    #[test]
    fn action_on_rays() {
        assert_eq!(r("a").act(&w("a")), r("a"));
        assert_eq!(r("b").act(&w("a")), r("a|b"));
        assert_eq!(r("a|b").act(&w("A")), r("b"));
        assert_eq!(r("ab").act(&w("ab")), r("ab"));
        assert_eq!(r("ab").act(&w("BA")), r("ab"));
        assert_eq!(r("aab|b").act(&w("BAA")), r("b"));
    }

    #[test]
    fn cell_points_lie_in_their_cells() {
        let c = w("abA");
        let p = Ray::cell_point(&c).unwrap();
        assert!(p.in_cell(&c));
        assert_eq!(p.head(5), w("abAAA"));
        assert!(Ray::cell_point(&GroupWord::identity()).is_err());
    }

    fn arb_word(len: std::ops::Range<usize>) -> impl Strategy<Value = GroupWord> {
        prop::collection::vec(0u8..4, len)
            .prop_map(|c| GroupWord::from_letters(c.into_iter().map(Letter::from_code)))
    }

    fn arb_ray() -> impl Strategy<Value = Ray> {
        (arb_word(0..5), arb_word(1..5)).prop_filter_map("not a valid ray", |(u, v)| {
            let (_, c) = v.cyclic_decomposition();
            Ray::new(u, c).ok()
        })
    }

    proptest! {
        #[test]
        fn action_is_a_group_action(x in arb_ray(), g in arb_word(0..6), h in arb_word(0..6)) {
            prop_assert_eq!(x.act(&h).act(&g), x.act(&g.mul(&h)));
            prop_assert_eq!(x.act(&g).act(&g.inverse()), x.clone());
        }

        #[test]
        fn action_matches_long_prefixes(x in arb_ray(), g in arb_word(0..6)) {
            // g·x agrees with reduce(g · head(N)) away from the cancellation zone
            let n = 40;
            let image = g.mul(&x.head(n));
            let y = x.act(&g);
            let k = n - 2 * g.len();
            prop_assert_eq!(image.prefix(k), y.head(k));
        }

        #[test]
        fn confluence_matches_letterwise_comparison(x in arb_ray(), y in arb_ray()) {
            let brute = (0..60).find(|&i| x.letter(i) != y.letter(i));
            prop_assert_eq!(x.confluence(&y), brute);
        }
    }
}
