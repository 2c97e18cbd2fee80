//! The Busemann cocycle `β_g(ξ,η) = (gp,ξ) − (gp,η)` on boundary pairs, its
//! `L^p` norms against the Bowen-Margulis current, and the cone over the
//! boundary used to show those norms are unbounded along a hyperbolic
//! element.

pub mod cone;
pub mod growth;
pub mod partition;

use serde::Serialize;

use crate::boundary::{lipschitz_constant, BoundaryModel, TreeBoundary};
use crate::error::{Error, Result};
use crate::measures::CellMeasure;
use crate::space::FreeGroup;
use crate::word::GroupWord;

pub use cone::{
    bullet, eigenvalue_lambda, iota, kf_bound, kf_residual, kf_scan, log_iota, t_coordinate,
    t_recurrence, ConePoint, Eigenvalue, LengthFunction,
};
pub use growth::{growth_experiment, BlockBound, GrowthExperiment, GrowthRow, Verdict};
pub use partition::{AxisPartition, CellIndex, EquivarianceReport, Partition};

pub fn beta<M: BoundaryModel>(m: &M, g: &GroupWord, xi: &M::Point, eta: &M::Point) -> f64 {
    if xi == eta {
        return 0.0;
    }
    m.orbit_product(g, xi) - m.orbit_product(g, eta)
}

/// Largest `|β_{gh}(ξ,η) − β_h(g⁻¹ξ, g⁻¹η) − β_g(ξ,η)|` over the pairs.
pub fn cocycle_identity_check<M: BoundaryModel>(
    m: &M,
    g: &GroupWord,
    h: &GroupWord,
    pairs: &[(M::Point, M::Point)],
) -> Result<f64> {
    m.check_word(g)?;
    m.check_word(h)?;
    let gh = g.mul(h);
    let g_inv = g.inverse();
    Ok(pairs
        .iter()
        .map(|(xi, eta)| {
            let moved = beta(m, h, &m.act(&g_inv, xi), &m.act(&g_inv, eta));
            (beta(m, &gh, xi, eta) - moved - beta(m, g, xi, eta)).abs()
        })
        .fold(0.0, f64::max))
}

/// `‖β_g‖_p^p` with an error bound propagated from the cell-mass errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpNorm {
    pub value: f64,
    pub error: f64,
    /// Whether `p ≥ 2δ/ε₀`, the range where the norm is finite for every
    /// element and the upper bound below applies.
    pub certified: bool,
    /// Cell depth at which `β_g` is constant off the diagonal.
    pub depth: usize,
    pub sup_norm: f64,
    pub kappa: f64,
    /// `‖β_g‖_∞^{p − 2δ/ε₀} κ_g^{2δ/ε₀} ν(∂X)²`.
    pub upper_bound: f64,
}

/// Exact `‖β_g‖_p^p` on the tree.
///
/// With `P(j) = ν{ξ : (gp, ξ) = j}`, a pair with `(gp,ξ) = j > m = (gp,η)`
/// has `(ξ,η) = m`, so
/// `‖β_g‖_p^p = 2 Σ_{m<j} e^{2δm} (j−m)^p P(m) P(j)`. Only the masses of
/// the prefixes of `g` enter.
pub fn lp_norm<M: CellMeasure + ?Sized>(
    measure: &M,
    g: &GroupWord,
    p: f64,
    delta: f64,
    eps0: f64,
    depth: usize,
) -> Result<LpNorm> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "p must be positive, got {p}"
        )));
    }
    if eps0.is_nan() || eps0 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "ε₀ must be positive, got {eps0}"
        )));
    }
    let tree = TreeBoundary::new(measure.rank())?;
    tree.check_word(g)?;
    let n = g.len();
    let depth = depth.max(n + 1);
    let s = 2.0 * delta / eps0;
    let certified = p >= s;
    let nu: Vec<f64> = (0..=n)
        .map(|k| {
            measure.mass(&g.prefix(k)).ok_or_else(|| Error::Depth {
                depth: measure.max_depth(),
                reason: format!("the measure must be known to depth |g| = {n}"),
            })
        })
        .collect::<Result<_>>()?;
    let total = nu[0];
    if n == 0 {
        return Ok(LpNorm {
            value: 0.0,
            error: 0.0,
            certified,
            depth,
            sup_norm: 0.0,
            kappa: 0.0,
            upper_bound: 0.0,
        });
    }
    let e = measure.mass_error();
    let level = |k: usize, shift: f64| -> f64 {
        // shift = 0: value; −1: lower end; +1: upper end
        if k == n {
            (nu[n] + shift * e).max(0.0)
        } else {
            (nu[k] - nu[k + 1] + 2.0 * shift * e).max(0.0)
        }
    };
    let sum = |shift: f64| -> f64 {
        let mut acc = 0.0;
        for m in 0..n {
            let inner: f64 = (m + 1..=n)
                .map(|j| ((j - m) as f64).powf(p) * level(j, shift))
                .sum();
            acc += (2.0 * delta * m as f64).exp() * level(m, shift) * inner;
        }
        2.0 * acc
    };
    let value = sum(0.0);
    let error = (sum(1.0) - value).max(value - sum(-1.0));
    let kappa = lipschitz_constant(&tree, g, n + 2, eps0)?;
    let sup_norm = n as f64;
    Ok(LpNorm {
        value,
        error,
        certified,
        depth,
        sup_norm,
        kappa,
        upper_bound: sup_norm.powf(p - s) * kappa.powf(s) * total * total,
    })
}

/// `‖β_g‖_p^p` by summing `|β_g|^p e^{2δ(C,D)} ν(C) ν(D)` over all pairs of
/// distinct cells of the given depth. `β_g` is constant on such pairs once
/// the depth exceeds `|g|`, and vanishes on diagonal blocks, so the sum is
/// exact; the cost is quadratic in the number of cells.
pub fn lp_norm_cell_sum<M: CellMeasure + ?Sized>(
    measure: &M,
    g: &GroupWord,
    p: f64,
    delta: f64,
    depth: usize,
) -> Result<f64> {
    if depth <= g.len() {
        return Err(Error::Depth {
            depth,
            reason: format!("cells must be deeper than |g| = {}", g.len()),
        });
    }
    let group = FreeGroup::new(measure.rank())?;
    group.check(g)?;
    let cells: Vec<(GroupWord, f64, f64)> = group
        .sphere(depth)
        .into_iter()
        .map(|c| {
            let m = measure.mass(&c).ok_or_else(|| Error::Depth {
                depth: measure.max_depth(),
                reason: format!("the measure must be known to depth {depth}"),
            })?;
            let b = g.common_prefix_len(&c) as f64;
            Ok((c, m, b))
        })
        .collect::<Result<_>>()?;
    let mut acc = 0.0;
    for (c, mc, bc) in &cells {
        for (d, md, bd) in &cells {
            if bc == bd {
                continue;
            }
            let cp = c.common_prefix_len(d) as f64;
            acc += (bc - bd).abs().powf(p) * (2.0 * delta * cp).exp() * mc * md;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{Angle, DiskBoundary, Ray};
    use crate::measures::UniformMeasure;
    use crate::space::{schottky::default_generators, Schottky};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    fn random_ray(rng: &mut ChaCha8Rng) -> Ray {
        let len = rng.gen_range(0..6);
        let u = GroupWord::from_letters(
            (0..len).map(|_| crate::word::Letter::from_code(rng.gen_range(0..4))),
        );
        loop {
            let plen = rng.gen_range(1..4);
            let v = GroupWord::from_letters(
                (0..plen).map(|_| crate::word::Letter::from_code(rng.gen_range(0..4))),
            );
            if !v.is_empty()
                && v.is_cyclically_reduced()
                && u.last().is_none_or(|l| Some(l.inverse()) != v.first())
            {
                return Ray::new(u, v).unwrap();
            }
        }
    }

    #[test]
    fn beta_basic_values() {
        let t = TreeBoundary::new(2).unwrap();
        let a = w("a");
        let xi: Ray = "a".parse().unwrap();
        let eta: Ray = "A".parse().unwrap();
        assert_eq!(beta(&t, &a, &xi, &eta), 1.0);
        assert_eq!(beta(&t, &a, &eta, &xi), -1.0);
        assert_eq!(beta(&t, &a, &xi, &xi), 0.0);
        assert_eq!(beta(&t, &GroupWord::identity(), &xi, &eta), 0.0);
    }

    #[test]
    fn cocycle_identity_is_exact_on_trees() {
        let t = TreeBoundary::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pairs: Vec<(Ray, Ray)> = (0..1000)
            .map(|_| (random_ray(&mut rng), random_ray(&mut rng)))
            .collect();
        for (g, h) in [("a", "b"), ("ab", "ab"), ("aBA", "e"), ("bbaB", "AbA")] {
            assert_eq!(
                cocycle_identity_check(&t, &w(g), &w(h), &pairs).unwrap(),
                0.0,
                "{g} {h}"
            );
        }
        for (xi, eta) in &pairs {
            let g = w("abAB");
            let b = beta(&t, &g, xi, eta);
            assert!(b.abs() <= 4.0);
            assert_eq!(b, -beta(&t, &g, eta, xi));
        }
    }

    #[test]
    fn cocycle_identity_on_the_disk() {
        let d = DiskBoundary {
            group: Schottky::new(&default_generators()).unwrap(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pairs: Vec<(Angle, Angle)> = (0..200)
            .map(|_| {
                (
                    Angle::new(rng.gen_range(0.0..std::f64::consts::TAU)),
                    Angle::new(rng.gen_range(0.0..std::f64::consts::TAU)),
                )
            })
            .collect();
        let defect = cocycle_identity_check(&d, &w("a"), &w("bA"), &pairs).unwrap();
        assert!(defect < 1e-8, "{defect}");
    }

    #[test]
    fn norm_of_a_generator() {
        let u = UniformMeasure::new(2).unwrap();
        let delta = 3f64.ln();
        for p in [2.5, 3.0, 4.0] {
            let r = lp_norm(&u, &w("a"), p, delta, 1.0, 6).unwrap();
            assert!((r.value - 0.375).abs() < 1e-12);
            assert_eq!(r.error, 0.0);
            assert!(r.certified);
            assert!(r.value <= r.upper_bound);
        }
        let e = lp_norm(&u, &GroupWord::identity(), 3.0, delta, 1.0, 6).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(!lp_norm(&u, &w("a"), 2.0, delta, 1.0, 6).unwrap().certified);
    }

    #[test]
    fn exact_formula_matches_cell_pair_sum() {
        let u = UniformMeasure::new(2).unwrap();
        let delta = 3f64.ln();
        for g in ["a", "ab", "aBA", "aa"] {
            for p in [2.5, 3.0] {
                let exact = lp_norm(&u, &w(g), p, delta, 1.0, 6).unwrap().value;
                let brute = lp_norm_cell_sum(&u, &w(g), p, delta, 6).unwrap();
                assert!(
                    (exact - brute).abs() < 1e-9 * exact,
                    "{g} p={p}: {exact} vs {brute}"
                );
            }
        }
    }

    /// `‖β_{aⁿ}‖_3^3` for the uniform measure, from the level masses
    /// `P(0) = 3/4`, `P(j) = 3^{−j}/2` for `0 < j < n`, `P(n) = 3^{1−n}/4`.
    #[test]
    fn powers_of_a_closed_form() {
        let u = UniformMeasure::new(2).unwrap();
        let delta = 3f64.ln();
        for n in 1..=16usize {
            let level = |j: usize| -> f64 {
                if j == n {
                    3f64.powi(1 - n as i32) / 4.0
                } else if j == 0 {
                    0.75
                } else {
                    3f64.powi(-(j as i32)) / 2.0
                }
            };
            let mut expected = 0.0;
            for m in 0..n {
                for j in m + 1..=n {
                    expected +=
                        2.0 * 9f64.powi(m as i32) * ((j - m) as f64).powi(3) * level(m) * level(j);
                }
            }
            let got = lp_norm(&u, &w("a").pow(n as i64), 3.0, delta, 1.0, 8).unwrap();
            assert!((got.value - expected).abs() < 1e-9 * expected, "n = {n}");
            assert!(got.value <= got.upper_bound);
        }
        let series: Vec<f64> = [1, 2, 4, 8, 16]
            .iter()
            .map(|&n| {
                lp_norm(&u, &w("a").pow(n), 3.0, delta, 1.0, 8)
                    .unwrap()
                    .value
            })
            .collect();
        assert!((series[1] - 1.5).abs() < 1e-12);
        assert!((series[2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn beta_bounded_by_lipschitz_constant() {
        let t = TreeBoundary::new(2).unwrap();
        let cells = t.cells(6);
        let pts: Vec<Ray> = cells
            .iter()
            .step_by(7)
            .map(|c| Ray::cell_point(c).unwrap())
            .collect();
        for g in ["a", "aB", "abAB"] {
            let g = w(g);
            let kappa = lipschitz_constant(&t, &g, g.len() + 2, 1.0).unwrap();
            for x in &pts {
                for y in &pts {
                    if x != y {
                        let b = beta(&t, &g, x, y).abs();
                        assert!(b <= kappa * crate::boundary::check_d(&t, x, y, 1.0) + 1e-12);
                    }
                }
            }
        }
    }
}
