use crate::error::{Error, Result};
use crate::word::{GroupWord, Letter};

/// The free group of rank `k ≥ 2` acting on its Cayley tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    rank: u8,
}

impl FreeGroup {
    pub fn new(rank: u8) -> Result<Self> {
        if !(2..=Letter::MAX_GENERATORS).contains(&rank) {
            return Err(Error::InvalidModel(format!(
                "free group rank must lie in 2..=26, got {rank}"
            )));
        }
        Ok(FreeGroup { rank })
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    /// Valence of the Cayley tree, `2k`.
    pub fn valence(&self) -> usize {
        2 * self.rank as usize
    }

    /// `ln(2k − 1)`, the exact critical exponent of the full group.
    pub fn critical_exponent(&self) -> f64 {
        ((2 * self.rank as usize - 1) as f64).ln()
    }

    pub fn alphabet(&self) -> impl Iterator<Item = Letter> + Clone {
        Letter::alphabet(self.rank)
    }

    pub fn parse(&self, s: &str) -> Result<GroupWord> {
        GroupWord::parse_with_rank(s, self.rank)
    }

    pub fn check(&self, w: &GroupWord) -> Result<()> {
        if w.min_rank() > self.rank {
            return Err(Error::invalid_word(
                w.to_string(),
                format!("not a word in the rank-{} free group", self.rank),
            ));
        }
        Ok(())
    }

    /// Word-metric distance `|x⁻¹ y|`, the tree distance between the vertices.
    pub fn distance(&self, x: &GroupWord, y: &GroupWord) -> usize {
        let c = x.common_prefix_len(y);
        x.len() + y.len() - 2 * c
    }

    /// Exact sphere size `2k (2k−1)^{n−1}`.
    pub fn sphere_size(&self, n: usize) -> u128 {
        if n == 0 {
            return 1;
        }
        let k = self.rank as u128;
        2 * k * (2 * k - 1).pow(n as u32 - 1)
    }

    /// Letters that may follow `w` without cancelling, in alphabet order.
    pub fn extensions<'a>(&self, w: &'a GroupWord) -> impl Iterator<Item = Letter> + 'a {
        let forbidden = w.last().map(|l| l.inverse());
        Letter::alphabet(self.rank).filter(move |l| Some(*l) != forbidden)
    }

    /// All reduced words of length exactly `n`, shortlex ordered.
    pub fn sphere(&self, n: usize) -> Vec<GroupWord> {
        let mut level = vec![GroupWord::identity()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(level.len() * (2 * self.rank as usize - 1));
            for w in &level {
                for l in self.extensions(w) {
                    let mut letters = w.letters().to_vec();
                    letters.push(l);
                    next.push(GroupWord::from_reduced(letters));
                }
            }
            level = next;
        }
        level
    }
}
