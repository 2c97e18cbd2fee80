//! Classification of isometries and limit sets of finitely generated
//! subgroups.

mod subgroup;

use num_complex::Complex64;
use serde::Serialize;

pub use subgroup::{NonElementary, OrbitAutomaton};

use crate::boundary::{Angle, Ray};
use crate::error::Result;
use crate::space::Schottky;
use crate::word::GroupWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsometryKind {
    Elliptic,
    Hyperbolic,
}

/// Kind, translation length and (for hyperbolic elements) the attracting
/// and repelling fixed points on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryClass<P> {
    pub kind: IsometryKind,
    pub translation_length: f64,
    pub fixed_points: Option<(P, P)>,
}

impl<P> IsometryClass<P> {
    pub fn attracting(&self) -> Option<&P> {
        self.fixed_points.as_ref().map(|(p, _)| p)
    }

    pub fn repelling(&self) -> Option<&P> {
        self.fixed_points.as_ref().map(|(_, m)| m)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.kind == IsometryKind::Hyperbolic
    }
}

/// Classifies a free-group element acting on its Cayley tree.
///
/// Writing `g = u c u⁻¹` with `c` cyclically reduced, the translation length
/// is `|c|` and the fixed points are `u c^∞` and `u (c⁻¹)^∞`. Free groups are
/// torsion free, so every nontrivial element is hyperbolic.
pub fn classify_tree(g: &GroupWord) -> IsometryClass<Ray> {
    if g.is_empty() {
        return IsometryClass {
            kind: IsometryKind::Elliptic,
            translation_length: 0.0,
            fixed_points: None,
        };
    }
    let (u, c) = g.cyclic_decomposition();
    let plus = Ray::new(u.clone(), c.clone()).expect("u·c^∞ is reduced");
    let minus = Ray::new(u, c.inverse()).expect("u·(c⁻¹)^∞ is reduced");
    IsometryClass {
        kind: IsometryKind::Hyperbolic,
        translation_length: c.len() as f64,
        fixed_points: Some((plus, minus)),
    }
}

/// Classifies a Schottky group element by the trace of its matrix.
pub fn classify_disk(s: &Schottky, g: &GroupWord) -> Result<IsometryClass<Angle>> {
    let m = s.element(g)?;
    let re = m.alpha.re.abs();
    if re <= 1.0 + 1e-12 {
        return Ok(IsometryClass {
            kind: IsometryKind::Elliptic,
            translation_length: 0.0,
            fixed_points: None,
        });
    }
    let length = 2.0 * re.acosh();
    let root = (m.alpha.re * m.alpha.re - 1.0).sqrt();
    let bc = m.beta.conj();
    let z1 = (Complex64::new(root, m.alpha.im)) / bc;
    let z2 = (Complex64::new(-root, m.alpha.im)) / bc;
    let attracting = |z: Complex64| (bc * z + m.alpha.conj()).norm() > 1.0;
    let (plus, minus) = if attracting(z1) { (z1, z2) } else { (z2, z1) };
    Ok(IsometryClass {
        kind: IsometryKind::Hyperbolic,
        translation_length: length,
        fixed_points: Some((Angle::new(plus.arg()), Angle::new(minus.arg()))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryModel, DiskBoundary};
    use crate::space::schottky::default_generators;
    use crate::space::FreeGroup;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn generator_is_hyperbolic() {
        let c = classify_tree(&w("a"));
        assert!(c.is_hyperbolic());
        assert_eq!(c.translation_length, 1.0);
        assert_eq!(c.attracting().unwrap(), &"a".parse::<Ray>().unwrap());
        assert_eq!(c.repelling().unwrap(), &"A".parse::<Ray>().unwrap());
        assert_eq!(
            classify_tree(&GroupWord::identity()).kind,
            IsometryKind::Elliptic
        );
    }

    /// Translation length is the minimal displacement over a ball that is
    /// large enough to reach the axis.
    #[test]
    fn translation_length_matches_brute_force_minimum() {
        let f = FreeGroup::new(2).unwrap();
        let ball: Vec<GroupWord> = (0..=4).flat_map(|n| f.sphere(n)).collect();
        for g in ["aBA", "abAB", "aab", "BaabA", "ab"] {
            let g = w(g);
            let brute = ball.iter().map(|x| f.distance(x, &g.mul(x))).min().unwrap();
            assert_eq!(classify_tree(&g).translation_length, brute as f64, "{g}");
        }
    }

    #[test]
    fn fixed_points_are_fixed_and_swap_under_inversion() {
        for g in ["aBA", "ab", "abaBAB", "BBa"] {
            let g = w(g);
            let c = classify_tree(&g);
            let (p, m) = c.fixed_points.clone().unwrap();
            assert_eq!(p.act(&g), p);
            assert_eq!(m.act(&g), m);
            assert_ne!(p, m);
            let ci = classify_tree(&g.inverse());
            assert_eq!(ci.fixed_points.unwrap(), (m, p));
            for n in 1..=6 {
                assert_eq!(
                    classify_tree(&g.pow(n)).translation_length,
                    n as f64 * c.translation_length
                );
            }
        }
    }

    #[test]
    fn disk_classification() {
        let s = Schottky::new(&default_generators()).unwrap();
        let d = DiskBoundary { group: s.clone() };
        for g in ["a", "b", "aB", "abAB"] {
            let gw = w(g);
            let c = classify_disk(&s, &gw).unwrap();
            assert!(c.is_hyperbolic());
            let (p, m) = c.fixed_points.unwrap();
            assert!(d.product(&d.act(&gw, &p), &p) > 15.0);
            assert!(d.product(&d.act(&gw, &m), &m) > 15.0);
            // iterates of a generic point approach the attracting fixed point
            let mut x = Angle::new(p.radians() + 1.0);
            for _ in 0..40 {
                x = d.act(&gw, &x);
            }
            assert!(d.product(&x, &p) > 10.0, "{g}");
        }
        let a = classify_disk(&s, &w("a")).unwrap();
        assert!((a.translation_length - 2.0 * (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12);
        assert_eq!(
            classify_disk(&s, &GroupWord::identity()).unwrap().kind,
            IsometryKind::Elliptic
        );
    }
}
