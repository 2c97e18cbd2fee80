//! Group models: exact word metrics on trees and free products, numerical
//! hyperbolic-disk metrics for Schottky groups.

mod free_group;
mod free_product;
pub mod hyperbolicity;
pub mod schottky;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use free_group::FreeGroup;
pub use free_product::FreeProduct;
pub use schottky::{DiskMap, Mat2, Schottky};

use crate::error::{Error, Result};
use crate::word::{GroupWord, Letter};

/// Default memory budget for materialized balls: 2 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// Serializable description of a model, as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    FreeGroup { rank: u8 },
    FreeProduct { orders: Vec<u32> },
    FuchsianSchottky { generators: Vec<[[f64; 2]; 2]> },
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::FreeGroup { rank: 2 }
    }
}

impl ModelSpec {
    /// Parses the short command-line forms `F2`, `free-group:3`,
    /// `free-product:2,3`, `schottky` (default generators) or a JSON object.
    pub fn parse_short(s: &str) -> Result<ModelSpec> {
        let t = s.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()));
        }
        let lower = t.to_ascii_lowercase();
        if let Some(r) = lower.strip_prefix('f') {
            if let Ok(rank) = r.parse::<u8>() {
                return Ok(ModelSpec::FreeGroup { rank });
            }
        }
        let (kind, arg) = lower.split_once(':').unwrap_or((lower.as_str(), ""));
        match kind {
            "free-group" => Ok(ModelSpec::FreeGroup {
                rank: arg
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad free-group rank {arg:?}")))?,
            }),
            "free-product" => {
                let orders = arg
                    .split(',')
                    .map(|x| x.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse(format!("bad free-product orders {arg:?}")))?;
                Ok(ModelSpec::FreeProduct { orders })
            }
            "schottky" | "fuchsian-schottky" if arg.is_empty() => Ok(ModelSpec::FuchsianSchottky {
                generators: schottky::default_generators(),
            }),
            _ => Err(Error::Parse(format!(
                "unknown model {s:?}; expected F<k>, free-group:<k>, free-product:<n1,n2,..>, schottky or a JSON object"
            ))),
        }
    }
}

/// A point of a model space: an orbit vertex named by a group word, or (disk
/// backend only) an arbitrary point of the open unit disk.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Word(GroupWord),
    Disk(Complex64),
}

impl From<GroupWord> for Point {
    fn from(w: GroupWord) -> Self {
        Point::Word(w)
    }
}

/// Per-radius counts of a ball around the base point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallStats {
    pub radius: usize,
    pub spheres: Vec<u128>,
    pub cumulative: Vec<u128>,
}

impl BallStats {
    pub fn from_spheres(spheres: Vec<u128>) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(spheres.len());
        let mut acc = 0u128;
        for &s in &spheres {
            acc = acc
                .checked_add(s)
                .ok_or_else(|| Error::Overflow("cumulative ball size".into()))?;
            cumulative.push(acc);
        }
        Ok(BallStats {
            radius: spheres.len().saturating_sub(1),
            spheres,
            cumulative,
        })
    }

    pub fn total(&self) -> u128 {
        self.cumulative.last().copied().unwrap_or(0)
    }
}

/// A materialized ball: its counts and its points in shortlex order.
#[derive(Clone, Debug)]
pub struct Ball {
    pub stats: BallStats,
    pub words: Vec<GroupWord>,
}

#[derive(Clone, Debug)]
pub enum SpaceModel {
    FreeGroup(FreeGroup),
    FreeProduct(FreeProduct),
    Schottky(Schottky),
}

impl SpaceModel {
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        Ok(match spec {
            ModelSpec::FreeGroup { rank } => SpaceModel::FreeGroup(FreeGroup::new(*rank)?),
            ModelSpec::FreeProduct { orders } => {
                SpaceModel::FreeProduct(FreeProduct::new(orders.clone())?)
            }
            ModelSpec::FuchsianSchottky { generators } => {
                SpaceModel::Schottky(Schottky::new(generators)?)
            }
        })
    }

    pub fn spec(&self) -> ModelSpec {
        match self {
            SpaceModel::FreeGroup(f) => ModelSpec::FreeGroup { rank: f.rank() },
            SpaceModel::FreeProduct(f) => ModelSpec::FreeProduct {
                orders: f.orders().to_vec(),
            },
            SpaceModel::Schottky(s) => ModelSpec::FuchsianSchottky {
                generators: s.generators().iter().map(|m| m.rows()).collect(),
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpaceModel::FreeGroup(_) => "free-group",
            SpaceModel::FreeProduct(_) => "free-product",
            SpaceModel::Schottky(_) => "fuchsian-schottky",
        }
    }

    /// Whether distances are exact integers.
    pub fn is_exact(&self) -> bool {
        !matches!(self, SpaceModel::Schottky(_))
    }

    /// Number of generators (letters come in inverse pairs).
    pub fn generator_count(&self) -> u8 {
        match self {
            SpaceModel::FreeGroup(f) => f.rank(),
            SpaceModel::FreeProduct(f) => f.factors() as u8,
            SpaceModel::Schottky(s) => s.rank(),
        }
    }

    /// Hyperbolicity constant known in closed form, if any.
    pub fn known_delta(&self) -> Option<f64> {
        match self {
            SpaceModel::FreeGroup(_) => Some(0.0),
            _ => None,
        }
    }

    /// Critical exponent known in closed form, if any.
    pub fn known_critical_exponent(&self) -> Option<f64> {
        match self {
            SpaceModel::FreeGroup(f) => Some(f.critical_exponent()),
            _ => None,
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        match self {
            SpaceModel::FreeGroup(f) => f.parse(s),
            SpaceModel::FreeProduct(f) => f.parse(s),
            SpaceModel::Schottky(g) => g.parse(s),
        }
    }

    /// Group multiplication in the model's normal form.
    pub fn mul(&self, x: &GroupWord, y: &GroupWord) -> Result<GroupWord> {
        match self {
            SpaceModel::FreeProduct(f) => f.mul(x, y),
            SpaceModel::FreeGroup(f) => {
                f.check(x)?;
                f.check(y)?;
                Ok(x.mul(y))
            }
            SpaceModel::Schottky(s) => {
                s.check(x)?;
                s.check(y)?;
                Ok(x.mul(y))
            }
        }
    }

    fn disk_point(&self, p: &Point) -> Result<Complex64> {
        match (self, p) {
            (SpaceModel::Schottky(s), Point::Word(w)) => Ok(s.element(w)?.orbit_point()),
            (SpaceModel::Schottky(_), Point::Disk(z)) => {
                if z.norm() >= 1.0 {
                    return Err(Error::InvalidArgument(format!(
                        "{z} lies outside the open unit disk"
                    )));
                }
                Ok(*z)
            }
            _ => Err(Error::ModelMismatch(format!(
                "disk point used with the {} model",
                self.name()
            ))),
        }
    }

    fn word<'a>(&self, p: &'a Point) -> Result<&'a GroupWord> {
        match p {
            Point::Word(w) => Ok(w),
            Point::Disk(_) => Err(Error::ModelMismatch(format!(
                "disk point used with the {} model",
                self.name()
            ))),
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        match self {
            SpaceModel::FreeGroup(f) => {
                let (x, y) = (self.word(x)?, self.word(y)?);
                f.check(x)?;
                f.check(y)?;
                Ok(f.distance(x, y) as f64)
            }
            SpaceModel::FreeProduct(f) => Ok(f.distance(self.word(x)?, self.word(y)?)? as f64),
            SpaceModel::Schottky(s) => match (x, y) {
                (Point::Word(a), Point::Word(b)) => s.distance_words(a, b),
                _ => Ok(schottky::disk_distance(
                    self.disk_point(x)?,
                    self.disk_point(y)?,
                )),
            },
        }
    }

    /// `(x, y)_base = ½(d(x,base) + d(y,base) − d(x,y))`.
    pub fn gromov_product(&self, x: &Point, y: &Point, base: &Point) -> Result<f64> {
        let dx = self.distance(x, base)?;
        let dy = self.distance(y, base)?;
        let dxy = self.distance(x, y)?;
        Ok((0.5 * (dx + dy - dxy)).max(0.0))
    }

    /// Checks `|(x,y)_o − (x,y)_p| ≤ d(o,p)`, with a 1e−9 slack on the disk.
    pub fn base_point_shift_check(
        &self,
        x: &Point,
        y: &Point,
        o: &Point,
        p: &Point,
    ) -> Result<bool> {
        let lhs = (self.gromov_product(x, y, o)? - self.gromov_product(x, y, p)?).abs();
        let rhs = self.distance(o, p)?;
        let slack = if self.is_exact() { 0.0 } else { 1e-9 };
        Ok(lhs <= rhs + slack)
    }

    /// Exact sphere counts for radii `0..=r` without materializing the ball.
    /// On the disk, sphere `n` counts orbit points with `n − 1 < d ≤ n`.
    pub fn sphere_counts(&self, r: usize, budget: u64) -> Result<BallStats> {
        let spheres = match self {
            SpaceModel::FreeGroup(f) => (0..=r).map(|n| f.sphere_size(n)).collect(),
            SpaceModel::FreeProduct(f) => f.sphere_counts(r)?,
            SpaceModel::Schottky(s) => {
                let pts = s.orbit_ball(r as f64, orbit_point_limit(budget))?;
                let mut spheres = vec![0u128; r + 1];
                for (_, d) in pts {
                    spheres[d.ceil().max(0.0) as usize] += 1;
                }
                spheres
            }
        };
        BallStats::from_spheres(spheres)
    }

    /// The ball of radius `r` in shortlex order; on the disk, the orbit points
    /// within hyperbolic distance `r`. Fails before allocating if the
    /// estimated footprint exceeds `budget` bytes.
    pub fn enumerate_ball(&self, r: usize, budget: u64) -> Result<Ball> {
        match self {
            SpaceModel::Schottky(s) => {
                let pts = s.orbit_ball(r as f64, orbit_point_limit(budget))?;
                let stats = self.sphere_counts(r, budget)?;
                Ok(Ball {
                    stats,
                    words: pts.into_iter().map(|(w, _)| w).collect(),
                })
            }
            _ => {
                let stats = self.sphere_counts(r, budget)?;
                check_budget("enumerate_ball", &stats, budget)?;
                let words = self.word_ball(r, budget)?;
                Ok(Ball { stats, words })
            }
        }
    }

    /// All elements of word length `≤ r`, shortlex ordered.
    pub fn word_ball(&self, r: usize, budget: u64) -> Result<Vec<GroupWord>> {
        match self {
            SpaceModel::FreeProduct(f) => {
                check_budget(
                    "word ball",
                    &f.sphere_counts(r).and_then(BallStats::from_spheres)?,
                    budget,
                )?;
                Ok(f.ball(r))
            }
            SpaceModel::FreeGroup(_) | SpaceModel::Schottky(_) => {
                let rank = self.generator_count();
                let free = FreeGroup::new(rank)?;
                let stats =
                    BallStats::from_spheres((0..=r).map(|n| free.sphere_size(n)).collect())?;
                check_budget("word ball", &stats, budget)?;
                let mut words = Vec::with_capacity(stats.total() as usize);
                let mut level = vec![GroupWord::identity()];
                for n in 0..=r {
                    if n > 0 {
                        level = level
                            .iter()
                            .flat_map(|w| free.extensions(w).map(move |l| w.push(l)))
                            .collect();
                    }
                    words.extend(level.iter().cloned());
                }
                Ok(words)
            }
        }
    }

    /// Matrix of Gromov products at the base point for a sample of words.
    pub fn product_matrix(&self, sample: &[GroupWord]) -> Result<Vec<Vec<f64>>> {
        let base = Point::Word(GroupWord::identity());
        let pts: Vec<Point> = sample.iter().cloned().map(Point::Word).collect();
        let norms = pts
            .iter()
            .map(|p| self.distance(p, &base))
            .collect::<Result<Vec<_>>>()?;
        pts.iter()
            .enumerate()
            .map(|(i, x)| {
                pts.iter()
                    .enumerate()
                    .map(|(j, y)| Ok((0.5 * (norms[i] + norms[j] - self.distance(x, y)?)).max(0.0)))
                    .collect()
            })
            .collect()
    }

    /// Least `δ` for which the four-point inequality holds on every ordered
    /// triple of the sample, base point fixed at the identity.
    pub fn four_point_delta(&self, sample: &[GroupWord]) -> Result<f64> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        match self {
            SpaceModel::FreeGroup(f) => {
                for w in sample {
                    f.check(w)?;
                }
                let doubled: Vec<Vec<i32>> = sample
                    .iter()
                    .map(|x| {
                        sample
                            .iter()
                            .map(|y| 2 * x.common_prefix_len(y) as i32)
                            .collect()
                    })
                    .collect();
                Ok(hyperbolicity::four_point_delta_doubled(&doubled)? as f64 / 2.0)
            }
            SpaceModel::FreeProduct(f) => {
                let norms = sample
                    .iter()
                    .map(|w| f.length(w))
                    .collect::<Result<Vec<_>>>()?;
                let doubled = sample
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        sample
                            .iter()
                            .enumerate()
                            .map(|(j, y)| Ok((norms[i] + norms[j] - f.distance(x, y)?) as i32))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(hyperbolicity::four_point_delta_doubled(&doubled)? as f64 / 2.0)
            }
            SpaceModel::Schottky(_) => {
                hyperbolicity::four_point_delta(&self.product_matrix(sample)?)
            }
        }
    }
}

fn orbit_point_limit(budget: u64) -> usize {
    (budget / approx_word_bytes(64)).min(usize::MAX as u64) as usize
}

fn approx_word_bytes(len: usize) -> u64 {
    // Vec header plus heap block rounded to the allocator's 16-byte granule.
    (std::mem::size_of::<GroupWord>() + len.div_ceil(16) * 16 + 16) as u64
}

fn check_budget(stage: &str, stats: &BallStats, budget: u64) -> Result<()> {
    let mut required = 0u64;
    for (n, &count) in stats.spheres.iter().enumerate() {
        let bytes = (count.min(u64::MAX as u128) as u64).saturating_mul(approx_word_bytes(n));
        required = required.saturating_add(bytes);
    }
    if required > budget {
        return Err(Error::ResourceBudget {
            stage: stage.to_string(),
            required,
            budget,
        });
    }
    Ok(())
}

/// Letters of the model's alphabet, in order.
pub fn alphabet(model: &SpaceModel) -> Vec<Letter> {
    Letter::alphabet(model.generator_count()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> SpaceModel {
        SpaceModel::from_spec(&ModelSpec::FreeGroup { rank: 2 }).unwrap()
    }

    fn w(m: &SpaceModel, s: &str) -> Point {
        Point::Word(m.parse_word(s).unwrap())
    }

    #[test]
    fn gromov_products_on_the_tree() {
        let m = f2();
        let e = w(&m, "e");
        assert_eq!(
            m.gromov_product(&w(&m, "ab"), &w(&m, "abA"), &e).unwrap(),
            2.0
        );
        assert_eq!(m.gromov_product(&w(&m, "a"), &w(&m, "b"), &e).unwrap(), 0.0);
        let x = w(&m, "aBab");
        assert_eq!(m.gromov_product(&x, &x, &e).unwrap(), 4.0);
        assert!(m
            .base_point_shift_check(&w(&m, "ab"), &w(&m, "aB"), &e, &w(&m, "a"))
            .unwrap());
    }

    #[test]
    fn mixed_points_are_a_mismatch() {
        let m = f2();
        let z = Point::Disk(Complex64::new(0.1, 0.0));
        assert!(matches!(
            m.distance(&w(&m, "a"), &z),
            Err(Error::ModelMismatch(_))
        ));
    }

    #[test]
    fn ball_counts() {
        let m = f2();
        let b = m.enumerate_ball(2, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(b.stats.spheres, vec![1, 4, 12]);
        assert_eq!(b.words.len(), 17);
        assert!(b.words.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(
            m.enumerate_ball(0, DEFAULT_MEMORY_BUDGET)
                .unwrap()
                .stats
                .spheres,
            vec![1]
        );
        let zp = SpaceModel::from_spec(&ModelSpec::FreeProduct { orders: vec![2, 3] }).unwrap();
        assert_eq!(
            zp.enumerate_ball(2, DEFAULT_MEMORY_BUDGET)
                .unwrap()
                .stats
                .spheres,
            vec![1, 3, 4]
        );
    }

    #[test]
    fn budget_is_enforced_before_allocation() {
        let m = f2();
        let err = m.enumerate_ball(12, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::ResourceBudget { .. }));
    }

    #[test]
    fn short_model_names() {
        assert_eq!(
            ModelSpec::parse_short("F3").unwrap(),
            ModelSpec::FreeGroup { rank: 3 }
        );
        assert_eq!(
            ModelSpec::parse_short("free-product:2,3").unwrap(),
            ModelSpec::FreeProduct { orders: vec![2, 3] }
        );
        assert!(matches!(
            ModelSpec::parse_short("schottky").unwrap(),
            ModelSpec::FuchsianSchottky { .. }
        ));
        let json = r#"{"kind":"free-group","rank":4}"#;
        assert_eq!(
            ModelSpec::parse_short(json).unwrap(),
            ModelSpec::FreeGroup { rank: 4 }
        );
        assert!(ModelSpec::parse_short("torus").is_err());
    }

    #[test]
    fn tree_delta_is_zero() {
        let m = f2();
        let ball = m.word_ball(3, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(m.four_point_delta(&ball).unwrap(), 0.0);
        let x = m.parse_word("ab").unwrap();
        assert_eq!(
            m.four_point_delta(&[x.clone(), m.parse_word("b").unwrap(), x])
                .unwrap(),
            0.0
        );
    }
}
