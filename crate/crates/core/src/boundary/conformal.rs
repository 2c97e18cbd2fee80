//! The metric `ď = e^{−ε₀ (·,·)}`, cross-ratios and metric derivatives.
//!
//! Everything is evaluated through logarithms, i.e. sums of Gromov products.
//! On trees those are integers, so identities between them hold exactly in
//! floating point.

use super::{BoundaryModel, TreeBoundary};
use crate::error::{Error, Result};
use crate::word::GroupWord;

/// Visual-metric parameters: exponent `ε` and hyperbolicity constant `δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisualParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl VisualParams {
    /// Trees accept any `ε > 0`; on the disk `(|ξ−η|/2)^ε` is a metric only
    /// for `ε ≤ 1`.
    pub fn new<M: BoundaryModel>(model: &M, epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ε must be positive, got {epsilon}"
            )));
        }
        if !model.is_exact() && epsilon > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "ε = {epsilon} exceeds the disk threshold 1"
            )));
        }
        Ok(VisualParams { epsilon, delta })
    }

    /// Lower sandwich constant `3 − 2e^{2δε}`.
    pub fn lower_constant(&self) -> f64 {
        3.0 - 2.0 * (2.0 * self.delta * self.epsilon).exp()
    }
}

/// `ď(ξ, η) = e^{−ε₀ (ξ,η)}`.
pub fn check_d<M: BoundaryModel>(m: &M, xi: &M::Point, eta: &M::Point, eps0: f64) -> f64 {
    (-eps0 * m.product(xi, eta)).exp()
}

fn log_cross_ratio<M: BoundaryModel>(m: &M, z: [&M::Point; 4], eps0: f64) -> Result<f64> {
    for i in 0..4 {
        for j in i + 1..4 {
            if m.product(z[i], z[j]).is_infinite() {
                return Err(Error::Degenerate(format!(
                    "cross-ratio needs four distinct points; {} repeats",
                    z[i]
                )));
            }
        }
    }
    let p = |i: usize, j: usize| m.product(z[i], z[j]);
    Ok(-eps0 * ((p(0, 2) + p(1, 3)) - (p(0, 3) + p(1, 2))))
}

/// `ď(z₁,z₃) ď(z₂,z₄) / (ď(z₁,z₄) ď(z₂,z₃))`.
pub fn cross_ratio<M: BoundaryModel>(
    m: &M,
    z1: &M::Point,
    z2: &M::Point,
    z3: &M::Point,
    z4: &M::Point,
    eps0: f64,
) -> Result<f64> {
    Ok(log_cross_ratio(m, [z1, z2, z3, z4], eps0)?.exp())
}

/// Whether the cross-ratio of the quadruple is unchanged by `g`: exact
/// comparison of the product sums on trees, 1e−9 relative on the disk.
pub fn cross_ratio_invariant<M: BoundaryModel>(
    m: &M,
    g: &GroupWord,
    z: [&M::Point; 4],
    eps0: f64,
) -> Result<bool> {
    m.check_word(g)?;
    let before = log_cross_ratio(m, z, eps0)?;
    let moved: Vec<M::Point> = z.iter().map(|p| m.act(g, p)).collect();
    let after = log_cross_ratio(m, [&moved[0], &moved[1], &moved[2], &moved[3]], eps0)?;
    Ok(agree(m, before, after))
}

/// `ln |g'|(ξ) = −ε₀ (2(gξ, gp) − d(p, gp))`.
pub fn log_metric_derivative<M: BoundaryModel>(
    m: &M,
    g: &GroupWord,
    xi: &M::Point,
    eps0: f64,
) -> f64 {
    let gxi = m.act(g, xi);
    -eps0 * (2.0 * m.orbit_product(g, &gxi) - m.displacement(g))
}

pub fn metric_derivative<M: BoundaryModel>(
    m: &M,
    g: &GroupWord,
    xi: &M::Point,
    eps0: f64,
) -> Result<f64> {
    m.check_word(g)?;
    Ok(log_metric_derivative(m, g, xi, eps0).exp())
}

/// Checks `ď²(gξ, gη) = |g'|(ξ) |g'|(η) ď²(ξ, η)` in logarithmic form.
pub fn moebius_identity_check<M: BoundaryModel>(
    m: &M,
    g: &GroupWord,
    xi: &M::Point,
    eta: &M::Point,
    eps0: f64,
) -> Result<bool> {
    m.check_word(g)?;
    let before = m.product(xi, eta);
    if before.is_infinite() {
        return Err(Error::Degenerate(format!(
            "Möbius identity needs ξ ≠ η, got {xi} twice"
        )));
    }
    let lhs = -2.0 * eps0 * m.product(&m.act(g, xi), &m.act(g, eta));
    let rhs = log_metric_derivative(m, g, xi, eps0) + log_metric_derivative(m, g, eta, eps0)
        - 2.0 * eps0 * before;
    Ok(agree(m, lhs, rhs))
}

fn agree<M: BoundaryModel>(m: &M, a: f64, b: f64) -> bool {
    if m.is_exact() {
        a == b
    } else {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }
}

/// `κ_g = sup |β_g(ξ,η)| / ď(ξ,η)` over pairs of distinct cells at
/// `sample_depth`, where `β_g(ξ,η) = (gp,ξ) − (gp,η)`.
///
/// On the tree `β_g` is constant on cells of depth `|g|`, and a pair that
/// splits at depth `m < |g|` after following `g` can reach `|β_g| = |g| − m`,
/// so the maximum over cell pairs is `max_m (|g| − m) e^{ε₀ m}` at every
/// depth `≥ |g| + 1`.
pub fn lipschitz_constant(
    t: &TreeBoundary,
    g: &GroupWord,
    sample_depth: usize,
    eps0: f64,
) -> Result<f64> {
    t.check_word(g)?;
    let n = g.len();
    if sample_depth < n + 2 {
        return Err(Error::Depth {
            depth: sample_depth,
            reason: format!("Lipschitz scan needs depth ≥ |g| + 2 = {}", n + 2),
        });
    }
    Ok((0..n)
        .map(|m| (n - m) as f64 * (eps0 * m as f64).exp())
        .fold(0.0, f64::max))
}
