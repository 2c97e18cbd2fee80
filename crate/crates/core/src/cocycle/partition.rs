//! The sets `A_n = {ξ : λⁿ/(λⁿ+λ⁻ⁿ) < t_ξ ≤ λ^{n+1}/(λ^{n+1}+λ^{−n−1})}`
//! cut out by the `t`-coordinate of a hyperbolic free-group element.
//!
//! On the tree `t_ξ` is the logistic function of `ε₀ D(ξ)` with the integer
//! `D(ξ) = (ξ,g⁺) − (ξ,g⁻)`, and the thresholds are at `D = nℓ`, so
//! `ξ ∈ A_n` iff `nℓ < D(ξ) ≤ (n+1)ℓ`. `D` is constant on every cell that
//! contains neither fixed point.

use std::collections::BTreeMap;

use serde::Serialize;

use super::cone::logistic;
use crate::boundary::Ray;
use crate::dynamics::classify_tree;
use crate::error::{Error, Result};
use crate::measures::cell_image;
use crate::space::FreeGroup;
use crate::word::GroupWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellIndex {
    /// The cell lies in `A_n`.
    Level(i64),
    /// The cell contains `g⁺` or `g⁻`.
    Fixed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxisPartition {
    pub g: GroupWord,
    pub plus: Ray,
    pub minus: Ray,
    /// Translation length `ℓ`.
    pub ell: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Partition {
    pub levels: BTreeMap<i64, Vec<GroupWord>>,
    pub fixed: Vec<GroupWord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl AxisPartition {
    pub fn new(g: &GroupWord) -> Result<Self> {
        let class = classify_tree(g);
        let (plus, minus) = class
            .fixed_points
            .ok_or_else(|| Error::NotHyperbolic(g.to_string()))?;
        Ok(AxisPartition {
            g: g.clone(),
            plus,
            minus,
            ell: class.translation_length as usize,
        })
    }

    fn level_of(&self, d: i64) -> i64 {
        // ceil(d / ℓ) − 1
        let ell = self.ell as i64;
        -((-d).div_euclid(ell)) - 1
    }

    pub fn index_of_cell(&self, w: &GroupWord) -> CellIndex {
        let n = w.len();
        let hp = self.plus.head(n);
        let hm = self.minus.head(n);
        if *w == hp || *w == hm {
            return CellIndex::Fixed;
        }
        let d = w.common_prefix_len(&hp) as i64 - w.common_prefix_len(&hm) as i64;
        CellIndex::Level(self.level_of(d))
    }

    pub fn index_of_point(&self, xi: &Ray) -> CellIndex {
        match (xi.confluence(&self.plus), xi.confluence(&self.minus)) {
            (Some(p), Some(m)) => CellIndex::Level(self.level_of(p as i64 - m as i64)),
            _ => CellIndex::Fixed,
        }
    }

    /// `(λⁿ/(λⁿ+λ⁻ⁿ), λ^{n+1}/(λ^{n+1}+λ^{−n−1})]` for `ln λ = ε₀ℓ/2`,
    /// evaluated as logistic functions so large `|n|` cannot overflow.
    pub fn thresholds(&self, n: i64, eps0: f64) -> (f64, f64) {
        let ln_lambda = eps0 * self.ell as f64 / 2.0;
        (
            logistic(2.0 * n as f64 * ln_lambda),
            logistic(2.0 * (n + 1) as f64 * ln_lambda),
        )
    }

    pub fn partition(&self, rank: u8, depth: usize) -> Result<Partition> {
        let group = FreeGroup::new(rank)?;
        group.check(&self.g)?;
        let mut out = Partition::default();
        for c in group.sphere(depth) {
            match self.index_of_cell(&c) {
                CellIndex::Level(n) => out.levels.entry(n).or_default().push(c),
                CellIndex::Fixed => out.fixed.push(c),
            }
        }
        Ok(out)
    }

    /// Checks `g^k·A_n = A_{n+k}` on every cell of the given depth that
    /// avoids the fixed points and maps to a cell.
    pub fn equivariance(&self, rank: u8, depth: usize, k: i64) -> Result<EquivarianceReport> {
        let part = self.partition(rank, depth)?;
        let gk = self.g.pow(k);
        let mut report = EquivarianceReport {
            checked: 0,
            mismatches: Vec::new(),
        };
        for (n, cells) in &part.levels {
            for c in cells {
                let Some(image) = cell_image(&gk, c) else {
                    continue;
                };
                report.checked += 1;
                let got = self.index_of_cell(&image);
                if got != CellIndex::Level(n + k) {
                    report
                        .mismatches
                        .push(format!("{c} -> {image}: {got:?}, expected A_{}", n + k));
                }
            }
        }
        Ok(report)
    }

    /// Cells branching off the two fixed rays within the first `max_len`
    /// letters. Together with the two ray heads of length `max_len` they
    /// partition the boundary, and each has a constant index.
    pub fn branch_cells(&self, rank: u8, max_len: usize) -> Result<Vec<GroupWord>> {
        let group = FreeGroup::new(rank)?;
        let mut out = Vec::new();
        for ray in [&self.plus, &self.minus] {
            for j in 0..max_len {
                let stem = ray.head(j);
                for l in group.extensions(&stem) {
                    let c = stem.push(l);
                    let on_plus = self.plus.in_cell(&c);
                    let on_minus = self.minus.in_cell(&c);
                    if on_plus || on_minus {
                        continue;
                    }
                    out.push(c);
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// `A_n` as a finite union of branch cells.
    pub fn level_cells(&self, rank: u8, n: i64) -> Result<Vec<GroupWord>> {
        let u = self.g.cyclic_decomposition().0.len();
        // D grows by ℓ per period once past the conjugator, on either ray
        let max_len = u + (n.unsigned_abs() as usize + 2) * self.ell + self.ell + 2;
        Ok(self
            .branch_cells(rank, max_len)?
            .into_iter()
            .filter(|c| self.index_of_cell(c) == CellIndex::Level(n))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::TreeBoundary;
    use crate::cocycle::cone::t_coordinate;
    use crate::measures::{CellMeasure, UniformMeasure};

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn thresholds_at_zero() {
        let p = AxisPartition::new(&w("a")).unwrap();
        let (lo, hi) = p.thresholds(0, 1.0);
        assert_eq!(lo, 0.5);
        let e = 1f64.exp();
        assert!((hi - e / (e + 1.0)).abs() < 1e-15);
        let (lo, hi) = p.thresholds(200, 1.0);
        assert!(lo <= hi && hi <= 1.0);
        assert!(AxisPartition::new(&GroupWord::identity()).is_err());
    }

    #[test]
    fn cell_index_agrees_with_t_coordinate() {
        let t = TreeBoundary::new(2).unwrap();
        for g in ["a", "ab", "bAB"] {
            let p = AxisPartition::new(&w(g)).unwrap();
            for c in t.cells(5) {
                let CellIndex::Level(n) = p.index_of_cell(&c) else {
                    continue;
                };
                let (lo, hi) = p.thresholds(n, 1.0);
                let x = Ray::cell_point(&c).unwrap();
                let tx = t_coordinate(&t, &p.plus, &p.minus, &x, 1.0);
                assert!(lo < tx && tx <= hi, "{g} {c}: t = {tx} not in ({lo}, {hi}]");
                assert_eq!(p.index_of_point(&x), CellIndex::Level(n));
            }
        }
    }

    #[test]
    fn partition_covers_and_is_equivariant() {
        for g in ["a", "ab", "bAB", "aab"] {
            let p = AxisPartition::new(&w(g)).unwrap();
            let part = p.partition(2, 4).unwrap();
            let total: usize = part.levels.values().map(Vec::len).sum::<usize>() + part.fixed.len();
            assert_eq!(total, 108);
            assert_eq!(part.fixed.len(), 2);
            for k in [1, 2, 3, -1] {
                let eq = p.equivariance(2, 4, k).unwrap();
                assert!(eq.mismatches.is_empty(), "{g}^{k}: {:?}", eq.mismatches);
                assert!(eq.checked > 20);
            }
        }
    }

    #[test]
    fn level_sets_for_a() {
        let p = AxisPartition::new(&w("a")).unwrap();
        let u = UniformMeasure::new(2).unwrap();
        for n in 0..5i64 {
            let cells = p.level_cells(2, n).unwrap();
            // A_n = a^{n+1}·(b or B)
            let stem = "a".repeat(n as usize + 1);
            assert_eq!(cells, vec![w(&format!("{stem}b")), w(&format!("{stem}B"))]);
            let mass: f64 = cells.iter().map(|c| u.mass(c).unwrap()).sum();
            assert!((mass - 3f64.powi(-(n as i32)) / 6.0).abs() < 1e-15);
        }
        let below = p.level_cells(2, -1).unwrap();
        assert_eq!(below, vec![w("b"), w("B")]);
    }
}
