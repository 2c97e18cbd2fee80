//! `‖β_{gⁿ}‖_p^p` along powers of a hyperbolic element, with the block
//! lower bound over `A_i × A_{i+k}`.

use serde::Serialize;

use super::cone::{kf_bound, LengthFunction};
use super::partition::AxisPartition;
use super::{beta, lp_norm};
use crate::boundary::{Ray, TreeBoundary};
use crate::error::{Error, Result};
use crate::measures::{bm_pair_measure, CellMeasure};
use crate::word::GroupWord;

/// Blocks whose Bowen-Margulis masses are compared.
const BLOCKS_CHECKED: i64 = 3;

/// Required ratio between the last and first value of the series.
pub const GROWTH_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    pub value: f64,
    pub error: f64,
    pub certified: bool,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockBound {
    /// Gap `k` between paired levels, the least integer with
    /// `k ln λ ≥ 3 max(2ε₀K, ln 2 + ln λ)` where `K` bounds `|K_f|`.
    pub k: i64,
    /// Lower bound `c = (k − 2) ln λ / (2ε₀)` for `|β|` on a block.
    pub c: f64,
    /// Smallest `|β_{g^{k+2}}|` seen between cell points of `A_0` and `A_k`.
    pub observed_min_beta: f64,
    /// `m(A_i × A_{i+k})` for the first few `i`; `None` if the measure is
    /// not known deep enough.
    pub masses: Option<Vec<f64>>,
    /// `m(A_0 × A_k) c^p`, the contribution of each block.
    pub per_block: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UnboundedConsistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthExperiment {
    pub rows: Vec<GrowthRow>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the linear fit divided by the mean value.
    pub relative_residual: f64,
    pub block: Option<BlockBound>,
    pub verdict: Verdict,
}

fn block_mass<M: CellMeasure + ?Sized>(
    measure: &M,
    part: &AxisPartition,
    i: i64,
    k: i64,
    delta: f64,
) -> Result<f64> {
    let lo = part.level_cells(measure.rank(), i)?;
    let hi = part.level_cells(measure.rank(), i + k)?;
    let mut acc = 0.0;
    for c in &lo {
        for d in &hi {
            acc += bm_pair_measure(measure, c, d, delta, 0)?.value;
        }
    }
    Ok(acc)
}

fn block_bound<M: CellMeasure + ?Sized>(
    measure: &M,
    g: &GroupWord,
    p: f64,
    delta: f64,
    eps0: f64,
) -> Result<BlockBound> {
    let tree = TreeBoundary::new(measure.rank())?;
    let part = AxisPartition::new(g)?;
    let f = LengthFunction::Axis {
        plus: part.plus.clone(),
        minus: part.minus.clone(),
    };
    let kf = kf_bound(&tree, &f, eps0);
    let ln_lambda = eps0 * part.ell as f64 / 2.0;
    let k = (3.0 * (2.0 * eps0 * kf).max(2f64.ln() + ln_lambda) / ln_lambda).ceil() as i64;
    let c = (k - 2) as f64 * ln_lambda / (2.0 * eps0);
    let gk = g.pow(k + 2);
    let points = |n: i64| -> Result<Vec<Ray>> {
        part.level_cells(measure.rank(), n)?
            .iter()
            .map(Ray::cell_point)
            .collect()
    };
    let (a0, ak) = (points(0)?, points(k)?);
    let observed_min_beta = a0
        .iter()
        .flat_map(|x| ak.iter().map(move |y| (x, y)))
        .map(|(x, y)| beta(&tree, &gk, x, y).abs())
        .fold(f64::INFINITY, f64::min);
    let masses = (0..BLOCKS_CHECKED)
        .map(|i| block_mass(measure, &part, i, k, delta))
        .collect::<Result<Vec<f64>>>();
    let masses = match masses {
        Ok(m) => Some(m),
        Err(Error::Depth { .. }) => None,
        Err(e) => return Err(e),
    };
    let per_block = masses.as_ref().map(|m| m[0] * c.powf(p));
    Ok(BlockBound {
        k,
        c,
        observed_min_beta,
        masses,
        per_block,
    })
}

/// Computes the series over `powers`, a least-squares line through it, and
/// the block bound. The verdict is "unbounded-consistent" iff the series is
/// strictly increasing, its last value exceeds `GROWTH_FACTOR` times the
/// first, the slope is positive, the block masses agree and `|β|` on the
/// blocks reaches `c`.
pub fn growth_experiment<M: CellMeasure + ?Sized>(
    measure: &M,
    g: &GroupWord,
    p: f64,
    powers: &[u32],
    delta: f64,
    eps0: f64,
    depth: usize,
) -> Result<GrowthExperiment> {
    if powers.len() < 2 {
        return Err(Error::InvalidArgument(
            "growth experiment needs at least two powers".into(),
        ));
    }
    if powers.windows(2).any(|w| w[1] <= w[0]) || powers[0] == 0 {
        return Err(Error::InvalidArgument(
            "powers must be positive and strictly increasing".into(),
        ));
    }
    let rows: Vec<GrowthRow> = powers
        .iter()
        .map(|&n| {
            let r = lp_norm(measure, &g.pow(n as i64), p, delta, eps0, depth)?;
            Ok(GrowthRow {
                n,
                value: r.value,
                error: r.error,
                certified: r.certified,
                depth: r.depth,
            })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let relative_residual = if my > 0.0 { (rss / k).sqrt() / my } else { 0.0 };

    let block = if g.is_empty() {
        None
    } else {
        Some(block_bound(measure, g, p, delta, eps0)?)
    };
    let increasing = ys.windows(2).all(|w| w[1] > w[0]);
    let grows = ys[0] > 0.0 && ys[ys.len() - 1] > GROWTH_FACTOR * ys[0];
    let blocks_ok = block.as_ref().is_some_and(|b| {
        let equal = b
            .masses
            .as_ref()
            .is_some_and(|m| m.iter().all(|x| (x - m[0]).abs() <= 1e-9 * m[0].abs()) && m[0] > 0.0);
        equal && b.c > 0.0 && b.observed_min_beta >= b.c
    });
    let verdict = if increasing && grows && slope > 0.0 && blocks_ok {
        Verdict::UnboundedConsistent
    } else {
        Verdict::Inconclusive
    };
    Ok(GrowthExperiment {
        rows,
        slope,
        intercept,
        relative_residual,
        block,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::UniformMeasure;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn powers_of_a_grow_linearly() {
        let u = UniformMeasure::new(2).unwrap();
        let ex = growth_experiment(&u, &w("a"), 3.0, &[1, 2, 4, 8, 16], 3f64.ln(), 1.0, 8).unwrap();
        assert!((ex.rows[0].value - 0.375).abs() < 1e-12);
        assert!(ex.slope > 0.0);
        assert!(ex.relative_residual < 0.1, "{ex:?}");
        assert_eq!(ex.verdict, Verdict::UnboundedConsistent);
        let b = ex.block.unwrap();
        assert_eq!(b.k, 17);
        assert!((b.c - 3.75).abs() < 1e-12);
        assert_eq!(b.observed_min_beta, 17.0);
        for m in b.masses.unwrap() {
            assert!((m - 3f64.powi(-17) / 4.0).abs() < 1e-12 * m);
        }
    }

    #[test]
    fn identity_series_is_zero() {
        let u = UniformMeasure::new(2).unwrap();
        let ex = growth_experiment(
            &u,
            &GroupWord::identity(),
            3.0,
            &[1, 2, 4],
            3f64.ln(),
            1.0,
            4,
        )
        .unwrap();
        assert!(ex.rows.iter().all(|r| r.value == 0.0));
        assert_eq!(ex.verdict, Verdict::Inconclusive);
        assert!(ex.block.is_none());
    }

    #[test]
    fn bad_powers_rejected() {
        let u = UniformMeasure::new(2).unwrap();
        assert!(growth_experiment(&u, &w("a"), 3.0, &[2, 1], 1.0, 1.0, 4).is_err());
        assert!(growth_experiment(&u, &w("a"), 3.0, &[4], 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn conjugated_element() {
        let u = UniformMeasure::new(2).unwrap();
        let ex = growth_experiment(&u, &w("bab"), 3.0, &[1, 2, 4, 8], 3f64.ln(), 1.0, 8).unwrap();
        assert!(ex.rows.windows(2).all(|r| r[1].value > r[0].value));
        let b = ex.block.unwrap();
        let m = b.masses.unwrap();
        assert!(m.iter().all(|x| (x - m[0]).abs() <= 1e-9 * m[0]));
    }
}
