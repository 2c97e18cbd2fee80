//! Schottky subgroups of `PSL(2,ℝ)` acting on the Poincaré disk.
//!
//! Generators are given as real `SL(2,ℝ)` matrices acting on the upper half
//! plane and moved to the disk by the Cayley transform `z ↦ (z − i)/(z + i)`,
//! where they take the form `[[α, β], [β̄, ᾱ]]` with `|α|² − |β|² = 1`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::word::{GroupWord, Letter};

const DET_TOLERANCE: f64 = 1e-9;

/// A real 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub fn from_rows(m: [[f64; 2]; 2]) -> Self {
        Mat2 {
            a: m[0][0],
            b: m[0][1],
            c: m[1][0],
            d: m[1][1],
        }
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }
}

/// An element of `SU(1,1)`, stored by its first row `(α, β)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskMap {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl DiskMap {
    pub const IDENTITY: DiskMap = DiskMap {
        alpha: Complex64::new(1.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
    };

    /// Conjugates a half-plane map by the Cayley transform.
    pub fn from_half_plane(m: &Mat2) -> Self {
        let i = Complex64::i();
        DiskMap {
            alpha: ((m.a + m.d) + i * (m.b - m.c)) / 2.0,
            beta: ((m.a - m.d) - i * (m.b + m.c)) / 2.0,
        }
    }

    pub fn compose(&self, other: &DiskMap) -> DiskMap {
        DiskMap {
            alpha: self.alpha * other.alpha + self.beta * other.beta.conj(),
            beta: self.alpha * other.beta + self.beta * other.alpha.conj(),
        }
    }

    pub fn inverse(&self) -> DiskMap {
        DiskMap {
            alpha: self.alpha.conj(),
            beta: -self.beta,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.alpha * z + self.beta) / (self.beta.conj() * z + self.alpha.conj())
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.alpha.re
    }

    /// Image of the origin, `β / ᾱ`.
    pub fn orbit_point(&self) -> Complex64 {
        self.beta / self.alpha.conj()
    }

    /// `d(o, g·o) = 2 ln(|α| + |β|)`.
    pub fn displacement(&self) -> f64 {
        2.0 * (self.alpha.norm() + self.beta.norm()).ln()
    }

    /// Center and radius of the isometric circle `|β̄ z + ᾱ| = 1`.
    pub fn isometric_circle(&self) -> Option<(Complex64, f64)> {
        let b = self.beta.norm();
        if b < 1e-12 {
            return None;
        }
        Some((-self.alpha.conj() / self.beta.conj(), 1.0 / b))
    }

    /// Euclidean derivative of the boundary map at `e^{iθ}`.
    pub fn boundary_derivative(&self, z: Complex64) -> f64 {
        1.0 / (self.beta.conj() * z + self.alpha.conj()).norm_sqr()
    }
}

/// A Schottky group on `k ≥ 2` generators; words over the first `k` letters
/// name its elements, which form a free group.
#[derive(Clone, Debug)]
pub struct Schottky {
    generators: Vec<Mat2>,
    // indexed by letter code
    maps: Vec<DiskMap>,
}

pub fn default_generators() -> Vec<[[f64; 2]; 2]> {
    let s = 3f64.sqrt();
    vec![[[2.0, s], [s, 2.0]], [[2.0 + s, 0.0], [0.0, 2.0 - s]]]
}

impl Schottky {
    pub fn new(generators: &[[[f64; 2]; 2]]) -> Result<Self> {
        if generators.len() < 2 || generators.len() > Letter::MAX_GENERATORS as usize {
            return Err(Error::InvalidModel(format!(
                "Schottky group needs 2..=26 generators, got {}",
                generators.len()
            )));
        }
        let generators: Vec<Mat2> = generators.iter().map(|m| Mat2::from_rows(*m)).collect();
        let mut maps = Vec::with_capacity(2 * generators.len());
        for (i, m) in generators.iter().enumerate() {
            if (m.det() - 1.0).abs() > DET_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "generator {i} has determinant {} instead of 1",
                    m.det()
                )));
            }
            if m.trace().abs() <= 2.0 {
                return Err(Error::InvalidModel(format!(
                    "generator {i} is not hyperbolic (|trace| = {} ≤ 2)",
                    m.trace().abs()
                )));
            }
            let g = DiskMap::from_half_plane(m);
            maps.push(g);
            maps.push(g.inverse());
        }
        let mut circles = Vec::with_capacity(maps.len());
        for (code, g) in maps.iter().enumerate() {
            let c = g.isometric_circle().ok_or_else(|| {
                Error::InvalidModel(format!(
                    "letter {} fixes the origin and has no isometric circle",
                    Letter::from_code(code as u8).to_char()
                ))
            })?;
            circles.push(c);
        }
        for i in 0..circles.len() {
            for j in i + 1..circles.len() {
                let (ci, ri) = circles[i];
                let (cj, rj) = circles[j];
                if (ci - cj).norm() <= ri + rj {
                    return Err(Error::InvalidModel(format!(
                        "ping-pong fails: isometric circles of {} and {} intersect",
                        Letter::from_code(i as u8).to_char(),
                        Letter::from_code(j as u8).to_char()
                    )));
                }
            }
        }
        Ok(Schottky { generators, maps })
    }

    pub fn rank(&self) -> u8 {
        self.generators.len() as u8
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn parse(&self, s: &str) -> Result<GroupWord> {
        GroupWord::parse_with_rank(s, self.rank())
    }

    pub fn check(&self, w: &GroupWord) -> Result<()> {
        if w.min_rank() > self.rank() {
            return Err(Error::invalid_word(
                w.to_string(),
                format!("not a word in the {} Schottky generators", self.rank()),
            ));
        }
        Ok(())
    }

    pub fn letter_map(&self, l: Letter) -> DiskMap {
        self.maps[l.code() as usize]
    }

    pub fn element(&self, w: &GroupWord) -> Result<DiskMap> {
        self.check(w)?;
        Ok(w.letters().iter().fold(DiskMap::IDENTITY, |acc, &l| {
            acc.compose(&self.letter_map(l))
        }))
    }

    pub fn distance_words(&self, x: &GroupWord, y: &GroupWord) -> Result<f64> {
        Ok(self.element(&x.inverse().mul(y))?.displacement())
    }

    /// Orbit words with `d(o, w·o) ≤ r`, in shortlex order, and their
    /// displacements.
    ///
    /// Depth-first over reduced words; a branch is abandoned once its
    /// displacement exceeds `r` by more than the largest generator
    /// displacement.
    pub fn orbit_ball(&self, r: f64, limit: usize) -> Result<Vec<(GroupWord, f64)>> {
        let slack = self
            .maps
            .iter()
            .map(|g| g.displacement())
            .fold(0.0, f64::max);
        let mut out = vec![(GroupWord::identity(), 0.0)];
        let mut stack = vec![(GroupWord::identity(), DiskMap::IDENTITY)];
        while let Some((w, g)) = stack.pop() {
            let forbidden = w.last().map(|l| l.inverse());
            for l in Letter::alphabet(self.rank()) {
                if Some(l) == forbidden {
                    continue;
                }
                let h = g.compose(&self.letter_map(l));
                let d = h.displacement();
                if d > r + slack {
                    continue;
                }
                let next = w.push(l);
                if d <= r {
                    out.push((next.clone(), d));
                    if out.len() > limit {
                        return Err(Error::ResourceBudget {
                            stage: "Schottky orbit enumeration".into(),
                            required: out.len() as u64,
                            budget: limit as u64,
                        });
                    }
                }
                stack.push((next, h));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }
}

/// Hyperbolic distance between two points of the open unit disk.
pub fn disk_distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    let den = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    2.0 * (num / den).atanh()
}

/// Gromov product at the origin of two boundary points `e^{iθ}`.
pub fn boundary_product(theta: f64, phi: f64) -> f64 {
    let chord = (Complex64::from_polar(1.0, theta) - Complex64::from_polar(1.0, phi)).norm();
    if chord == 0.0 {
        return f64::INFINITY;
    }
    -(chord / 2.0).ln()
}

/// Gromov product `(g·o, ξ)_o` for an orbit point and a boundary point.
pub fn orbit_boundary_product(g: &DiskMap, theta: f64) -> f64 {
    let xi = Complex64::from_polar(1.0, theta);
    0.5 * (g.displacement() - (xi * g.alpha.conj() - g.beta).norm_sqr().ln())
}

pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}
