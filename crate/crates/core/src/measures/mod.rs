//! Boundary measures on cylinder cells: Patterson-Sullivan approximants and
//! limits, Radon-Nikodym checks and Bowen-Margulis pair masses.

pub mod bowen;
pub mod cache;
pub mod critical;
pub mod patterson;
pub mod radon;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::space::FreeGroup;
use crate::word::GroupWord;

pub use bowen::{bm_invariance_defect, bm_pair_measure, pair_integral, BmValue};
pub use critical::{critical_exponent, CriticalExponentEstimate};
pub use patterson::{mu_t, ps_measure, MuT, PsMeasure, Schedule};
pub use radon::{radon_nikodym_check, RnReport};

/// Image `g·[w]` of a cylinder cell, which is again a cell `[gw]` unless
/// `w` is a prefix of `g⁻¹`.
pub fn cell_image(g: &GroupWord, w: &GroupWord) -> Option<GroupWord> {
    if g.inverse().common_prefix_len(w) < w.len() {
        Some(g.mul(w))
    } else {
        None
    }
}

/// A finite measure on the boundary of a free-group tree, known on cylinder
/// cells up to some depth.
pub trait CellMeasure {
    fn rank(&self) -> u8;

    /// Deepest level at which cell masses are available.
    fn max_depth(&self) -> usize;

    /// Mass of the cell `[w]`; the identity word names the whole boundary.
    /// `None` if `w` is deeper than `max_depth`.
    fn mass(&self, w: &GroupWord) -> Option<f64>;

    /// Uniform bound on the error of each cell mass.
    fn mass_error(&self) -> f64 {
        0.0
    }

    /// `Σ_{|w| = m, w extends cell} ν(w)² − Σ_{children c} ν(c)²`, the mass
    /// of pairs in `cell × cell` whose confluence is exactly `m`.
    fn level_pair_sum(&self, cell: &GroupWord, m: usize) -> Option<f64> {
        if m + 1 > self.max_depth() || m < cell.len() {
            return None;
        }
        let group = FreeGroup::new(self.rank()).ok()?;
        let mut level = vec![cell.clone()];
        for _ in cell.len()..m {
            level = level
                .iter()
                .flat_map(|w| group.extensions(w).map(move |l| w.push(l)))
                .collect();
        }
        let mut acc = 0.0;
        for w in &level {
            let own = self.mass(w)?;
            let children: f64 = group
                .extensions(w)
                .map(|l| self.mass(&w.push(l)).map(|x| x * x))
                .sum::<Option<f64>>()?;
            acc += own * own - children;
        }
        Some(acc)
    }
}

/// The uniform cylinder measure `ν([w]) = 1 / (2k (2k−1)^{|w|−1})`, which is
/// the Patterson-Sullivan measure of the full free group by symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformMeasure {
    rank: u8,
}

impl UniformMeasure {
    pub fn new(rank: u8) -> Result<Self> {
        FreeGroup::new(rank)?;
        Ok(UniformMeasure { rank })
    }

    fn level_mass(&self, n: usize) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let k = self.rank as f64;
        1.0 / (2.0 * k * (2.0 * k - 1.0).powi(n as i32 - 1))
    }
}

impl CellMeasure for UniformMeasure {
    fn rank(&self) -> u8 {
        self.rank
    }

    fn max_depth(&self) -> usize {
        usize::MAX
    }

    fn mass(&self, w: &GroupWord) -> Option<f64> {
        Some(self.level_mass(w.len()))
    }

    fn level_pair_sum(&self, cell: &GroupWord, m: usize) -> Option<f64> {
        if m < cell.len() {
            return None;
        }
        let q = 2.0 * self.rank as f64 - 1.0;
        // cells at level m inside `cell`, and children per cell
        let count = if cell.is_empty() {
            if m == 0 {
                1.0
            } else {
                (q + 1.0) * q.powi(m as i32 - 1)
            }
        } else {
            q.powi((m - cell.len()) as i32)
        };
        let children = if m == 0 { q + 1.0 } else { q };
        let own = self.level_mass(m);
        let child = self.level_mass(m + 1);
        Some(count * (own * own - children * child * child))
    }
}

/// Masses on the cells of a fixed depth, with all coarser levels aggregated.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteBoundaryMeasure {
    rank: u8,
    depth: usize,
    // levels[n]: masses of the depth-n cells with positive mass
    levels: Vec<BTreeMap<GroupWord, f64>>,
    error: f64,
}

impl DiscreteBoundaryMeasure {
    /// Builds from masses of depth-`depth` cells. Missing cells have mass 0.
    pub fn from_cells(
        rank: u8,
        depth: usize,
        cells: BTreeMap<GroupWord, f64>,
        error: f64,
    ) -> Result<Self> {
        FreeGroup::new(rank)?;
        for (w, m) in &cells {
            if w.len() != depth || w.min_rank() > rank {
                return Err(Error::InvalidArgument(format!(
                    "cell {w} is not a depth-{depth} cell of the rank-{rank} tree"
                )));
            }
            if !(*m >= 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("cell {w} has mass {m}")));
            }
        }
        let mut levels = vec![BTreeMap::new(); depth + 1];
        for n in (0..depth).rev() {
            let mut coarse: BTreeMap<GroupWord, f64> = BTreeMap::new();
            let finer = if n + 1 == depth {
                &cells
            } else {
                &levels[n + 1]
            };
            // children iterate in shortlex order, so each parent sums them in a fixed order
            for (w, m) in finer {
                *coarse.entry(w.prefix(n)).or_insert(0.0) += m;
            }
            levels[n] = coarse;
        }
        levels[depth] = cells;
        Ok(DiscreteBoundaryMeasure {
            rank,
            depth,
            levels,
            error,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn total(&self) -> f64 {
        self.levels[0].values().sum()
    }

    /// Cells of the given depth with positive mass, shortlex ordered.
    pub fn cells(&self, depth: usize) -> Option<&BTreeMap<GroupWord, f64>> {
        self.levels.get(depth)
    }

    /// Largest `|ν(w) − Σ ν(children)|` over cells of depth `< depth`.
    pub fn refinement_defect(&self) -> f64 {
        let group = FreeGroup::new(self.rank).expect("rank validated at construction");
        let mut worst = 0.0f64;
        for n in 0..self.depth {
            for (w, m) in &self.levels[n] {
                let children: f64 = group
                    .extensions(w)
                    .map(|l| self.levels[n + 1].get(&w.push(l)).copied().unwrap_or(0.0))
                    .sum();
                worst = worst.max((m - children).abs());
            }
        }
        worst
    }
}

impl CellMeasure for DiscreteBoundaryMeasure {
    fn rank(&self) -> u8 {
        self.rank
    }

    fn max_depth(&self) -> usize {
        self.depth
    }

    fn mass(&self, w: &GroupWord) -> Option<f64> {
        let level = self.levels.get(w.len())?;
        Some(level.get(w).copied().unwrap_or(0.0))
    }

    fn mass_error(&self) -> f64 {
        self.error
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn uniform_masses() {
        let u = UniformMeasure::new(2).unwrap();
        assert_eq!(u.mass(&w("a")), Some(0.25));
        assert_eq!(u.mass(&w("ab")), Some(1.0 / 12.0));
        assert_eq!(u.mass(&GroupWord::identity()), Some(1.0));
    }

    #[test]
    fn analytic_level_sums_match_enumeration() {
        let u = UniformMeasure::new(2).unwrap();
        let cells: BTreeMap<GroupWord, f64> = FreeGroup::new(2)
            .unwrap()
            .sphere(6)
            .into_iter()
            .map(|c| {
                let m = u.mass(&c).unwrap();
                (c, m)
            })
            .collect();
        let d = DiscreteBoundaryMeasure::from_cells(2, 6, cells, 0.0).unwrap();
        for cell in ["e", "a", "ab", "aBB"] {
            let c = w(cell);
            for m in c.len()..5 {
                let a = u.level_pair_sum(&c, m).unwrap();
                let b = d.level_pair_sum(&c, m).unwrap();
                assert!((a - b).abs() < 1e-15, "{cell} level {m}: {a} vs {b}");
            }
        }
        assert!(d.refinement_defect() < 1e-15);
        assert!((d.total() - 1.0).abs() < 1e-12);
        assert!((d.mass(&w("aBa")).unwrap() - 1.0 / 36.0).abs() < 1e-15);
        assert_eq!(d.mass(&w("aBaaaaa")), None);
    }

    #[test]
    fn malformed_cells_rejected() {
        let mut cells = BTreeMap::new();
        cells.insert(w("ab"), 0.5);
        assert!(DiscreteBoundaryMeasure::from_cells(2, 3, cells.clone(), 0.0).is_err());
        cells.insert(w("ac"), 0.5);
        assert!(DiscreteBoundaryMeasure::from_cells(2, 2, cells, 0.0).is_err());
    }
}
