use crate::error::{Error, Result};
use crate::word::{GroupWord, Letter};

/// A free product of finite cyclic groups `ℤ/n₁ * ℤ/n₂ * …` with its word
/// metric for the generating set `{a_i, a_i⁻¹}`. Factor `i` uses letter `i`.
///
/// Elements are stored in geodesic normal form: alternating syllables, each
/// syllable `x^e` written as `e` copies of `x` or `n − e` copies of `X`,
/// whichever is shorter (positive on ties).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeProduct {
    orders: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Syllable {
    factor: u8,
    exponent: u32,
}

impl FreeProduct {
    pub fn new(orders: Vec<u32>) -> Result<Self> {
        if orders.len() < 2 || orders.len() > Letter::MAX_GENERATORS as usize {
            return Err(Error::InvalidModel(format!(
                "free product needs 2..=26 factors, got {}",
                orders.len()
            )));
        }
        if let Some(o) = orders.iter().find(|&&o| o < 2) {
            return Err(Error::InvalidModel(format!(
                "factor orders must be at least 2, got {o}"
            )));
        }
        if orders.len() == 2 && orders.iter().all(|&o| o == 2) {
            return Err(Error::InvalidModel(
                "ℤ/2 * ℤ/2 is virtually cyclic (elementary)".into(),
            ));
        }
        Ok(FreeProduct { orders })
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn factors(&self) -> usize {
        self.orders.len()
    }

    fn syllable_len(&self, s: Syllable) -> usize {
        let n = self.orders[s.factor as usize];
        s.exponent.min(n - s.exponent) as usize
    }

    fn syllables(&self, letters: &[Letter]) -> Vec<Syllable> {
        let mut stack: Vec<Syllable> = Vec::new();
        for l in letters {
            let f = l.generator();
            let n = self.orders[f as usize];
            let step = if l.is_inverse() { n - 1 } else { 1 };
            match stack.last_mut() {
                Some(top) if top.factor == f => {
                    top.exponent = (top.exponent + step) % n;
                    if top.exponent == 0 {
                        stack.pop();
                    }
                }
                _ => stack.push(Syllable {
                    factor: f,
                    exponent: step,
                }),
            }
        }
        stack
    }

    fn render(&self, syllables: &[Syllable]) -> GroupWord {
        let mut letters = Vec::new();
        for s in syllables {
            let n = self.orders[s.factor as usize];
            if s.exponent <= n - s.exponent {
                letters.extend(std::iter::repeat_n(
                    Letter::new(s.factor, false),
                    s.exponent as usize,
                ));
            } else {
                letters.extend(std::iter::repeat_n(
                    Letter::new(s.factor, true),
                    (n - s.exponent) as usize,
                ));
            }
        }
        GroupWord::from_reduced(letters)
    }

    fn check_letters(&self, w: &GroupWord) -> Result<()> {
        if w.min_rank() as usize > self.orders.len() {
            return Err(Error::invalid_word(
                w.to_string(),
                format!("uses a letter beyond the {} factors", self.orders.len()),
            ));
        }
        Ok(())
    }

    /// Normal form of an arbitrary letter string.
    pub fn normalize(&self, w: &GroupWord) -> Result<GroupWord> {
        self.check_letters(w)?;
        Ok(self.render(&self.syllables(w.letters())))
    }

    pub fn parse(&self, s: &str) -> Result<GroupWord> {
        // Free reduction in `FromStr` is valid in any free product.
        let w: GroupWord = s.parse()?;
        self.normalize(&w)
    }

    pub fn mul(&self, x: &GroupWord, y: &GroupWord) -> Result<GroupWord> {
        self.check_letters(x)?;
        self.check_letters(y)?;
        let mut letters = x.letters().to_vec();
        letters.extend_from_slice(y.letters());
        Ok(self.render(&self.syllables(&letters)))
    }

    pub fn inverse(&self, x: &GroupWord) -> Result<GroupWord> {
        self.normalize(&x.inverse())
    }

    pub fn length(&self, x: &GroupWord) -> Result<usize> {
        self.check_letters(x)?;
        Ok(self
            .syllables(x.letters())
            .into_iter()
            .map(|s| self.syllable_len(s))
            .sum())
    }

    pub fn distance(&self, x: &GroupWord, y: &GroupWord) -> Result<usize> {
        self.length(&self.mul(&self.inverse(x)?, y)?)
    }

    /// Exact sphere sizes for radii `0..=r`, by dynamic programming over the
    /// factor of the last syllable.
    pub fn sphere_counts(&self, r: usize) -> Result<Vec<u128>> {
        let f = self.orders.len();
        // ending[len][factor]
        let mut ending = vec![vec![0u128; f]; r + 1];
        let mut counts = vec![0u128; r + 1];
        counts[0] = 1;
        for len in 1..=r {
            for (fi, &n) in self.orders.iter().enumerate() {
                let mut total = 0u128;
                for e in 1..n {
                    let sl = e.min(n - e) as usize;
                    if sl > len {
                        continue;
                    }
                    let rest = len - sl;
                    let before = if rest == 0 {
                        1
                    } else {
                        (0..f)
                            .filter(|&g| g != fi)
                            .map(|g| ending[rest][g])
                            .try_fold(0u128, |a, b| a.checked_add(b))
                            .ok_or_else(|| Error::Overflow("free product sphere count".into()))?
                    };
                    total = total
                        .checked_add(before)
                        .ok_or_else(|| Error::Overflow("free product sphere count".into()))?;
                }
                ending[len][fi] = total;
            }
            counts[len] = ending[len].iter().sum();
        }
        Ok(counts)
    }

    /// All elements of length `≤ r` in shortlex order.
    pub fn ball(&self, r: usize) -> Vec<GroupWord> {
        let mut out = vec![GroupWord::identity()];
        let mut stack: Vec<(Vec<Syllable>, usize)> = vec![(Vec::new(), 0)];
        while let Some((syl, len)) = stack.pop() {
            let last = syl.last().map(|s| s.factor);
            for (fi, &n) in self.orders.iter().enumerate() {
                if Some(fi as u8) == last {
                    continue;
                }
                for e in 1..n {
                    let s = Syllable {
                        factor: fi as u8,
                        exponent: e,
                    };
                    let nl = len + self.syllable_len(s);
                    if nl > r {
                        continue;
                    }
                    let mut next = syl.clone();
                    next.push(s);
                    out.push(self.render(&next));
                    stack.push((next, nl));
                }
            }
        }
        out.sort();
        out
    }
}
