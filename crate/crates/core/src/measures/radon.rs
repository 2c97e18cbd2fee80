use serde::Serialize;

use super::{cell_image, CellMeasure};
use crate::error::{Error, Result};
use crate::space::FreeGroup;
use crate::word::GroupWord;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RnReport {
    pub max_rel_error: f64,
    pub cells_checked: usize,
    pub worst_cell: Option<String>,
}

/// Compares `ν(gC) / ν(C)` with `e^{δ(2(g⁻¹, C) − |g|)}` on every
/// positive-mass cell `C` of the given depth, where `(g⁻¹, C)` is the length
/// of the common prefix of `g⁻¹` and the cell word.
pub fn radon_nikodym_check<M: CellMeasure + ?Sized>(
    measure: &M,
    g: &GroupWord,
    depth: usize,
    delta: f64,
) -> Result<RnReport> {
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
    let g_inv = g.inverse();
    let mut report = RnReport {
        max_rel_error: 0.0,
        cells_checked: 0,
        worst_cell: None,
    };
    for c in group.sphere(depth) {
        let m = measure.mass(&c).expect("depth within range");
        if m <= 0.0 {
            continue;
        }
        let image = cell_image(g, &c).expect("cells deeper than |g| map to cells");
        let mg = measure.mass(&image).expect("image depth within range");
        let cp = g_inv.common_prefix_len(&c) as f64;
        let predicted = (delta * (2.0 * cp - g.len() as f64)).exp();
        let err = (mg / m - predicted).abs() / predicted;
        report.cells_checked += 1;
        if err > report.max_rel_error || report.worst_cell.is_none() {
            report.max_rel_error = report.max_rel_error.max(err);
            report.worst_cell = Some(c.to_string());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::{ps_measure, Schedule, UniformMeasure};
    use super::*;
    use crate::dynamics::OrbitAutomaton;

    #[test]
    fn uniform_measure_is_quasi_conformal_exactly() {
        let u = UniformMeasure::new(2).unwrap();
        let delta = 3f64.ln();
        for g in ["a", "ab", "aBA", "bbaB"] {
            let g: GroupWord = g.parse().unwrap();
            let r = radon_nikodym_check(&u, &g, g.len() + 2, delta).unwrap();
            assert!(r.max_rel_error < 1e-12, "{g}: {r:?}");
            assert_eq!(r.cells_checked, 4 * 3usize.pow(g.len() as u32 + 1));
        }
    }

    #[test]
    fn limit_measure_passes_and_wrong_exponent_fails() {
        let aut = OrbitAutomaton::full(2);
        let delta = 3f64.ln();
        let ps = ps_measure(&aut, delta, &Schedule::default(), 5).unwrap();
        let a: GroupWord = "a".parse().unwrap();
        let r = radon_nikodym_check(&ps.measure, &a, 4, delta).unwrap();
        assert!(r.max_rel_error < 1e-9);
        let wrong = radon_nikodym_check(&ps.measure, &a, 4, delta + 0.1).unwrap();
        assert!(wrong.max_rel_error > 0.05);
    }

    #[test]
    fn depth_requirements() {
        let u = UniformMeasure::new(2).unwrap();
        let g: GroupWord = "ab".parse().unwrap();
        assert!(matches!(
            radon_nikodym_check(&u, &g, 2, 1.0),
            Err(Error::Depth { .. })
        ));
        let aut = OrbitAutomaton::full(2);
        let ps = ps_measure(&aut, 3f64.ln(), &Schedule::default(), 4).unwrap();
        assert!(matches!(
            radon_nikodym_check(&ps.measure, &g, 3, 1.0),
            Err(Error::Depth { .. })
        ));
    }
}
