//! The cone `∂X × ℝ_{>0}` with the pairing `ι((ξ,a),(η,b)) = a b ď(ξ,η)`,
//! the scaling action of the group that preserves it, and homogeneous
//! length functions.

use serde::Serialize;

use crate::boundary::{check_d, log_metric_derivative, BoundaryModel, Ray, TreeBoundary};
use crate::dynamics::IsometryClass;
use crate::error::{Error, Result};
use crate::measures::{cell_image, CellMeasure};
use crate::word::GroupWord;

use super::beta;

/// A boundary point with a positive scale, stored as `ln t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint<P> {
    pub xi: P,
    pub ln_t: f64,
}

impl<P> ConePoint<P> {
    pub fn new(xi: P, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cone scale must be positive, got {t}"
            )));
        }
        Ok(ConePoint { xi, ln_t: t.ln() })
    }

    pub fn unit(xi: P) -> Self {
        ConePoint { xi, ln_t: 0.0 }
    }

    pub fn t(&self) -> f64 {
        self.ln_t.exp()
    }
}

/// `ln ι(x, y)`; `−∞` when the boundary points coincide.
pub fn log_iota<M: BoundaryModel>(
    m: &M,
    x: &ConePoint<M::Point>,
    y: &ConePoint<M::Point>,
    eps0: f64,
) -> f64 {
    let prod = m.product(&x.xi, &y.xi);
    if prod.is_infinite() {
        return f64::NEG_INFINITY;
    }
    x.ln_t + y.ln_t - eps0 * prod
}

pub fn iota<M: BoundaryModel>(
    m: &M,
    x: &ConePoint<M::Point>,
    y: &ConePoint<M::Point>,
    eps0: f64,
) -> f64 {
    log_iota(m, x, y, eps0).exp()
}

/// `g∙(ξ, t) = (gξ, |g'|(ξ)^{−1/2} t)`, the unique rescaling under which `ι`
/// is invariant.
pub fn bullet<M: BoundaryModel>(
    m: &M,
    g: &GroupWord,
    x: &ConePoint<M::Point>,
    eps0: f64,
) -> ConePoint<M::Point> {
    ConePoint {
        xi: m.act(g, &x.xi),
        ln_t: x.ln_t - 0.5 * log_metric_derivative(m, g, &x.xi, eps0),
    }
}

/// Scale factors of the bullet action at the fixed points of `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub ln_lambda: f64,
    /// Factor at the repelling point; `1/λ`.
    pub at_repelling: f64,
}

pub fn eigenvalue_lambda<M: BoundaryModel>(
    m: &M,
    g: &GroupWord,
    class: &IsometryClass<M::Point>,
    eps0: f64,
) -> Result<Eigenvalue> {
    let (plus, minus) = class
        .fixed_points
        .as_ref()
        .ok_or_else(|| Error::NotHyperbolic(g.to_string()))?;
    let ln_lambda = -0.5 * log_metric_derivative(m, g, plus, eps0);
    let ln_minus = -0.5 * log_metric_derivative(m, g, minus, eps0);
    Ok(Eigenvalue {
        lambda: ln_lambda.exp(),
        ln_lambda,
        at_repelling: ln_minus.exp(),
    })
}

pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `t_ξ = ι(ξ, g⁻) / (ι(ξ, g⁺) + ι(ξ, g⁻))` at unit scales, which is the
/// logistic function of `ε₀((ξ,g⁺) − (ξ,g⁻))`.
pub fn t_coordinate<M: BoundaryModel>(
    m: &M,
    plus: &M::Point,
    minus: &M::Point,
    xi: &M::Point,
    eps0: f64,
) -> f64 {
    let to_plus = m.product(xi, plus);
    let to_minus = m.product(xi, minus);
    if to_plus.is_infinite() {
        return 1.0;
    }
    if to_minus.is_infinite() {
        return 0.0;
    }
    logistic(eps0 * (to_plus - to_minus))
}

/// `t_{gξ}` in terms of `t_ξ`: the odds `t/(1−t)` are multiplied by `λ²`.
pub fn t_recurrence(t: f64, lambda: f64) -> f64 {
    lambda * t / ((1.0 - t) / lambda + lambda * t)
}

/// A length function on the cone, homogeneous of degree 1 in the scale.
#[derive(Clone, Debug, PartialEq)]
pub enum LengthFunction<P> {
    /// `l(ξ, t) = t`.
    Canonical,
    /// `f(ξ, t) = ι((ξ,t), (g⁺,1)) + ι((ξ,t), (g⁻,1))` for a hyperbolic `g`.
    Axis { plus: P, minus: P },
}

impl<P: Clone> LengthFunction<P> {
    pub fn axis(class: &IsometryClass<P>, g: &GroupWord) -> Result<Self> {
        let (plus, minus) = class
            .fixed_points
            .clone()
            .ok_or_else(|| Error::NotHyperbolic(g.to_string()))?;
        Ok(LengthFunction::Axis { plus, minus })
    }

    pub fn at_unit<M: BoundaryModel<Point = P>>(&self, m: &M, xi: &P, eps0: f64) -> f64 {
        match self {
            LengthFunction::Canonical => 1.0,
            LengthFunction::Axis { plus, minus } => {
                check_d(m, xi, plus, eps0) + check_d(m, xi, minus, eps0)
            }
        }
    }

    pub fn value<M: BoundaryModel<Point = P>>(&self, m: &M, x: &ConePoint<P>, eps0: f64) -> f64 {
        x.t() * self.at_unit(m, &x.xi, eps0)
    }
}

/// `(2/ε₀) ln(2/ď(g⁺,g⁻))`, a bound on `|K_f|` for the axis function: by the
/// ultrametric inequality `ď(g⁺,g⁻) ≤ f(ξ) ≤ 2` on the tree.
pub fn kf_bound<M: BoundaryModel>(m: &M, f: &LengthFunction<M::Point>, eps0: f64) -> f64 {
    match f {
        LengthFunction::Canonical => 0.0,
        LengthFunction::Axis { plus, minus } => {
            2.0 / eps0 * (2.0 / check_d(m, plus, minus, eps0)).ln()
        }
    }
}

/// The residual
/// `K_f(g,ξ,η) = β_g(ξ,η) − (1/2δ)[L(ξ) − L(η)]`,
/// `L(ζ) = ln(ν_f(g⁻¹C) / ν_f(C))` for the cell `C ∋ ζ` of the given depth,
/// where `dν_f = f(·,1)^{−2δ/ε₀} dν` is the measure cut out of the lifted
/// cone measure by `f ≤ 1`.
#[allow(clippy::too_many_arguments)]
pub fn kf_residual<N: CellMeasure + ?Sized>(
    t: &TreeBoundary,
    measure: &N,
    f: &LengthFunction<Ray>,
    g: &GroupWord,
    xi: &Ray,
    eta: &Ray,
    delta: f64,
    eps0: f64,
    depth: usize,
) -> Result<f64> {
    if xi == eta {
        return Ok(0.0);
    }
    let log_ratio = |zeta: &Ray| -> Result<f64> {
        let d = depth.max(g.len() + 1);
        let cell = zeta.head(d);
        let back = cell_image(&g.inverse(), &cell).expect("cells deeper than |g| map to cells");
        let lookup = |w: &GroupWord| {
            measure.mass(w).ok_or_else(|| Error::Depth {
                depth: measure.max_depth(),
                reason: format!("the measure must be known to depth {}", d + g.len()),
            })
        };
        let (num, den) = (lookup(&back)?, lookup(&cell)?);
        if num <= 0.0 || den <= 0.0 {
            return Err(Error::Degenerate(format!(
                "cell {cell} or its image has no mass"
            )));
        }
        let s = 2.0 * delta / eps0;
        let f_here = f.at_unit(t, zeta, eps0).ln();
        let f_back = f.at_unit(t, &zeta.act(&g.inverse()), eps0).ln();
        Ok(s * (f_here - f_back) + (num / den).ln())
    };
    Ok(beta(t, g, xi, eta) - (log_ratio(xi)? - log_ratio(eta)?) / (2.0 * delta))
}

/// Largest `|K_f(g, ·, ·)|` over pairs of cell points of the given depth.
pub fn kf_scan<N: CellMeasure + ?Sized>(
    t: &TreeBoundary,
    measure: &N,
    f: &LengthFunction<Ray>,
    g: &GroupWord,
    delta: f64,
    eps0: f64,
    depth: usize,
) -> Result<f64> {
    let points: Vec<Ray> = t
        .cells(depth)
        .iter()
        .map(Ray::cell_point)
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for x in &points {
        for y in &points {
            worst = worst.max(kf_residual(t, measure, f, g, x, y, delta, eps0, depth)?.abs());
        }
    }
    Ok(worst)
}
