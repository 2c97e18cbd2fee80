//! Boundary points, extended Gromov products and the conformal structure of
//! the boundary at infinity.

pub mod conformal;
mod ray;

use std::fmt;

use crate::error::{Error, Result};
use crate::space::{schottky, FreeGroup, Schottky};
use crate::word::GroupWord;

pub use conformal::{
    check_d, cross_ratio, lipschitz_constant, log_metric_derivative, metric_derivative,
    moebius_identity_check, VisualParams,
};
pub use ray::Ray;

/// The operations every boundary backend provides, all at the base point `p`
/// (identity word / disk origin).
pub trait BoundaryModel {
    type Point: Clone + PartialEq + fmt::Debug + fmt::Display;

    fn backend(&self) -> &'static str;

    /// Whether products are exact (integers on trees).
    fn is_exact(&self) -> bool;

    fn check_word(&self, g: &GroupWord) -> Result<()>;

    /// `(ξ, η)_p`, `+∞` iff `ξ = η`.
    fn product(&self, xi: &Self::Point, eta: &Self::Point) -> f64;

    /// `(g·p, ξ)_p`.
    fn orbit_product(&self, g: &GroupWord, xi: &Self::Point) -> f64;

    /// `d(p, g·p)`.
    fn displacement(&self, g: &GroupWord) -> f64;

    fn act(&self, g: &GroupWord, xi: &Self::Point) -> Self::Point;
}

/// The boundary of a free group's Cayley tree: eventually periodic rays.
#[derive(Clone, Copy, Debug)]
pub struct TreeBoundary {
    pub group: FreeGroup,
}

impl TreeBoundary {
    pub fn new(rank: u8) -> Result<Self> {
        Ok(TreeBoundary {
            group: FreeGroup::new(rank)?,
        })
    }

    pub fn rank(&self) -> u8 {
        self.group.rank()
    }

    pub fn check_ray(&self, xi: &Ray) -> Result<()> {
        if xi.max_generator() > self.rank() {
            return Err(Error::invalid_word(
                xi.to_string(),
                format!("not a boundary point of the rank-{} tree", self.rank()),
            ));
        }
        Ok(())
    }

    pub fn parse_ray(&self, s: &str) -> Result<Ray> {
        let r: Ray = s.parse()?;
        self.check_ray(&r)?;
        Ok(r)
    }

    /// All cylinder cells of the given depth, shortlex ordered.
    pub fn cells(&self, depth: usize) -> Vec<GroupWord> {
        self.group.sphere(depth)
    }

    /// Extended Gromov product `(x, y)_base` of vertices and/or rays.
    pub fn extended_product(&self, x: &TreeEnd, y: &TreeEnd, base: &GroupWord) -> f64 {
        let shift = base.inverse();
        let x = x.act(&shift);
        let y = y.act(&shift);
        match (&x, &y) {
            (TreeEnd::Vertex(a), TreeEnd::Vertex(b)) => a.common_prefix_len(b) as f64,
            (TreeEnd::Vertex(a), TreeEnd::Ray(r)) | (TreeEnd::Ray(r), TreeEnd::Vertex(a)) => {
                r.confluence_with_word(a) as f64
            }
            (TreeEnd::Ray(r), TreeEnd::Ray(s)) => {
                r.confluence(s).map_or(f64::INFINITY, |c| c as f64)
            }
        }
    }
}

impl BoundaryModel for TreeBoundary {
    type Point = Ray;

    fn backend(&self) -> &'static str {
        "free-group"
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn check_word(&self, g: &GroupWord) -> Result<()> {
        self.group.check(g)
    }

    fn product(&self, xi: &Ray, eta: &Ray) -> f64 {
        xi.confluence(eta).map_or(f64::INFINITY, |c| c as f64)
    }

    fn orbit_product(&self, g: &GroupWord, xi: &Ray) -> f64 {
        xi.confluence_with_word(g) as f64
    }

    fn displacement(&self, g: &GroupWord) -> f64 {
        g.len() as f64
    }

    fn act(&self, g: &GroupWord, xi: &Ray) -> Ray {
        xi.act(g)
    }
}

/// A vertex or an end of the tree.
#[derive(Clone, Debug, PartialEq)]
pub enum TreeEnd {
    Vertex(GroupWord),
    Ray(Ray),
}

impl TreeEnd {
    fn act(&self, g: &GroupWord) -> TreeEnd {
        match self {
            TreeEnd::Vertex(w) => TreeEnd::Vertex(g.mul(w)),
            TreeEnd::Ray(r) => TreeEnd::Ray(r.act(g)),
        }
    }
}

/// A point `e^{iθ}` of the unit circle, `θ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64) -> Self {
        Angle(schottky::normalize_angle(theta))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

/// The unit circle as the boundary of a Schottky group's disk model.
#[derive(Clone, Debug)]
pub struct DiskBoundary {
    pub group: Schottky,
}

impl BoundaryModel for DiskBoundary {
    type Point = Angle;

    fn backend(&self) -> &'static str {
        "fuchsian-schottky"
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn check_word(&self, g: &GroupWord) -> Result<()> {
        self.group.check(g)
    }

    fn product(&self, xi: &Angle, eta: &Angle) -> f64 {
        let p = schottky::boundary_product(xi.0, eta.0);
        // chords below 1e−12 are treated as coincident points
        if p > -(0.5e-12f64).ln() {
            f64::INFINITY
        } else {
            p
        }
    }

    fn orbit_product(&self, g: &GroupWord, xi: &Angle) -> f64 {
        let m = self.group.element(g).expect("word checked by caller");
        schottky::orbit_boundary_product(&m, xi.0)
    }

    fn displacement(&self, g: &GroupWord) -> f64 {
        self.group
            .element(g)
            .expect("word checked by caller")
            .displacement()
    }

    fn act(&self, g: &GroupWord, xi: &Angle) -> Angle {
        let m = self.group.element(g).expect("word checked by caller");
        let z = m.apply(num_complex::Complex64::from_polar(1.0, xi.0));
        Angle::new(z.arg())
    }
}
