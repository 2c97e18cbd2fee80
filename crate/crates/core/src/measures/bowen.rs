//! The Bowen-Margulis current `dm = e^{2δ(ξ,η)} dν(ξ) dν(η)` on pairs of
//! cells.

use serde::Serialize;

use super::{cell_image, CellMeasure};
use crate::error::{Error, Result};
use crate::space::FreeGroup;
use crate::word::GroupWord;

/// A value together with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BmValue {
    pub value: f64,
    pub error: f64,
}

/// `∫_{[c]²} e^{s(ξ,η)} dν dν`, summed level by level over the confluence
/// `m = (ξ,η)` up to `max_level`, plus a geometric tail with the ratio of the
/// last two level terms.
pub fn pair_integral<M: CellMeasure + ?Sized>(
    measure: &M,
    cell: &GroupWord,
    s: f64,
    max_level: usize,
) -> Result<BmValue> {
    let top = max_level.min(measure.max_depth().saturating_sub(1));
    if top < cell.len() + 1 {
        return Err(Error::Depth {
            depth: measure.max_depth(),
            reason: format!("a tail estimate needs two confluence levels below cell {cell}"),
        });
    }
    let terms: Vec<f64> = (cell.len()..=top)
        .map(|m| {
            measure
                .level_pair_sum(cell, m)
                .map(|p| (s * m as f64).exp() * p)
                .ok_or_else(|| Error::Depth {
                    depth: m,
                    reason: "level pair sum unavailable".into(),
                })
        })
        .collect::<Result<_>>()?;
    let last = terms[terms.len() - 1];
    let prev = terms[terms.len() - 2];
    let head: f64 = terms.iter().sum();
    if last == 0.0 {
        return Ok(BmValue {
            value: head,
            error: 0.0,
        });
    }
    let ratio = last / prev;
    if !ratio.is_finite() || ratio >= 1.0 {
        return Err(Error::DivergentTail { ratio });
    }
    let tail = last * ratio / (1.0 - ratio);
    // each squared-mass level sum moves by at most 4·err·ν(cell) when every cell mass moves by err
    let weights: f64 = (cell.len()..=top).map(|m| (s * m as f64).exp()).sum();
    let mass_err = 4.0 * measure.mass_error() * measure.mass(cell).unwrap_or(1.0) * weights;
    Ok(BmValue {
        value: head + tail,
        error: mass_err,
    })
}

/// `m([c] × [d])`. Disjoint cells use `e^{2δ(c,d)} ν(c) ν(d)`; nested cells
/// split into the diagonal block of the smaller cell and disjoint siblings.
pub fn bm_pair_measure<M: CellMeasure + ?Sized>(
    measure: &M,
    c: &GroupWord,
    d: &GroupWord,
    delta: f64,
    max_level: usize,
) -> Result<BmValue> {
    let mass = |w: &GroupWord| {
        measure.mass(w).ok_or_else(|| Error::Depth {
            depth: measure.max_depth(),
            reason: format!("cell {w} is deeper than the measure"),
        })
    };
    let e = measure.mass_error();
    let cp = c.common_prefix_len(d);
    if cp < c.len() && cp < d.len() {
        let (mc, md) = (mass(c)?, mass(d)?);
        let w = (2.0 * delta * cp as f64).exp();
        return Ok(BmValue {
            value: w * mc * md,
            error: w * (mc * e + md * e + e * e),
        });
    }
    let (small, big) = if c.len() >= d.len() { (c, d) } else { (d, c) };
    let diag = pair_integral(measure, small, 2.0 * delta, max_level)?;
    let group = FreeGroup::new(measure.rank())?;
    let ms = mass(small)?;
    let mut value = diag.value;
    let mut error = diag.error;
    for j in big.len()..small.len() {
        let parent = small.prefix(j);
        let on_path = small.letters()[j];
        let w = (2.0 * delta * j as f64).exp();
        for l in group.extensions(&parent) {
            if l == on_path {
                continue;
            }
            let ms2 = mass(&parent.push(l))?;
            value += w * ms * ms2;
            error += w * (ms * e + ms2 * e + e * e);
        }
    }
    Ok(BmValue { value, error })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BmInvariance {
    pub max_rel_defect: f64,
    pub pairs_checked: usize,
    pub worst_pair: Option<(String, String)>,
}

/// Largest `|m(gC × gD) − m(C × D)| / m(C × D)` over pairs of distinct
/// positive-mass cells of the given depth.
pub fn bm_invariance_defect<M: CellMeasure + ?Sized>(
    measure: &M,
    g: &GroupWord,
    depth: usize,
    delta: f64,
) -> Result<BmInvariance> {
    if depth <= g.len() {
        return Err(Error::Depth {
            depth,
            reason: format!("cells must be deeper than |g| = {}", g.len()),
        });
    }
    if measure.max_depth() < depth + g.len() {
        return Err(Error::Depth {
            depth: measure.max_depth(),
            reason: format!("the measure must be known to depth {}", depth + g.len()),
        });
    }
    let group = FreeGroup::new(measure.rank())?;
    group.check(g)?;
    let cells: Vec<GroupWord> = group
        .sphere(depth)
        .into_iter()
        .filter(|c| measure.mass(c).is_some_and(|m| m > 0.0))
        .collect();
    let images: Vec<GroupWord> = cells
        .iter()
        .map(|c| cell_image(g, c).expect("cells deeper than |g| map to cells"))
        .collect();
    let mut out = BmInvariance {
        max_rel_defect: 0.0,
        pairs_checked: 0,
        worst_pair: None,
    };
    for i in 0..cells.len() {
        for j in 0..cells.len() {
            if i == j {
                continue;
            }
            let before = bm_pair_measure(measure, &cells[i], &cells[j], delta, 0)?.value;
            let after = bm_pair_measure(measure, &images[i], &images[j], delta, 0)?.value;
            let defect = (after - before).abs() / before;
            out.pairs_checked += 1;
            if defect > out.max_rel_defect || out.worst_pair.is_none() {
                out.max_rel_defect = out.max_rel_defect.max(defect);
                out.worst_pair = Some((cells[i].to_string(), cells[j].to_string()));
            }
        }
    }
    Ok(out)
}
