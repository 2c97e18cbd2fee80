//! One function per subcommand. Each returns the tables it produced and
//! whether every check it ran passed.

use std::time::Instant;

use anyhow::{bail, Context as _};
use lpcocycle::boundary::{BoundaryModel, DiskBoundary, TreeBoundary, VisualParams};
use lpcocycle::cocycle::{eigenvalue_lambda, growth_experiment, lp_norm};
use lpcocycle::dynamics::{
    classify_disk, classify_tree, IsometryClass, NonElementary, OrbitAutomaton,
};
use lpcocycle::measures::bowen::BmInvariance;
use lpcocycle::measures::{
    bm_invariance_defect, cache, critical_exponent, ps_measure, radon_nikodym_check, CellMeasure,
    DiscreteBoundaryMeasure, UniformMeasure,
};
use lpcocycle::space::{BallStats, FreeGroup, SpaceModel};
use lpcocycle::{Error, GroupWord};
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{float, opt_float, runtime, Table};

pub const PS_DEPTH: usize = 2;
pub const RN_DEPTH: usize = 6;
pub const BM_DEPTH: usize = 4;
pub const COCYCLE_DEPTH: usize = 8;
pub const BALL_RADIUS: usize = 12;
pub const DELTA_RADIUS: usize = 6;
/// Elements up to this length are scanned when `-g` is not given.
pub const SCAN_LENGTH: usize = 3;
/// Depth at which the uniform measure is compared with a computed one.
const UNIFORM_CHECK_DEPTH: usize = 2;

pub struct Outcome {
    pub tables: Vec<Table>,
    pub passed: bool,
}

impl Outcome {
    fn of(tables: Vec<Table>) -> Self {
        Outcome {
            tables,
            passed: true,
        }
    }
}

pub struct Context {
    pub cfg: RunConfig,
    pub model: SpaceModel,
    pub hash: String,
}

/// A measure together with how it was obtained.
pub struct Measure {
    pub measure: Box<dyn CellMeasure>,
    pub delta: f64,
    pub notes: Vec<(&'static str, String)>,
}

impl Context {
    pub fn new(cfg: RunConfig) -> anyhow::Result<Self> {
        let model = SpaceModel::from_spec(&cfg.model).context("building the model")?;
        if cfg.subgroup.is_some() && !matches!(model, SpaceModel::FreeGroup(_)) {
            bail!("--subgroup needs a free-group model, got {}", model.name());
        }
        let hash = cfg.hash();
        Ok(Context { cfg, model, hash })
    }

    fn rank(&self, what: &str) -> lpcocycle::Result<u8> {
        match &self.model {
            SpaceModel::FreeGroup(f) => Ok(f.rank()),
            _ => Err(Error::unsupported(self.model.name(), what)),
        }
    }

    fn tree(&self, what: &str) -> lpcocycle::Result<TreeBoundary> {
        TreeBoundary::new(self.rank(what)?)
    }

    pub fn element(&self, default: &str) -> anyhow::Result<GroupWord> {
        let s = self.cfg.element.as_deref().unwrap_or(default);
        Ok(self.model.parse_word(s)?)
    }

    /// `-g` if given, else every nontrivial element of length `≤ SCAN_LENGTH`.
    fn elements(&self) -> anyhow::Result<Vec<GroupWord>> {
        if self.cfg.element.is_some() {
            return Ok(vec![self.element("")?]);
        }
        let group = FreeGroup::new(self.rank("element scans")?)?;
        Ok((1..=SCAN_LENGTH).flat_map(|n| group.sphere(n)).collect())
    }

    fn generators(&self) -> anyhow::Result<Option<Vec<GroupWord>>> {
        self.cfg
            .subgroup
            .as_ref()
            .map(|gens| gens.iter().map(|s| Ok(self.model.parse_word(s)?)).collect())
            .transpose()
    }

    fn automaton(&self) -> anyhow::Result<OrbitAutomaton> {
        let rank = self.rank("boundary measures")?;
        Ok(match self.generators()? {
            Some(gens) => OrbitAutomaton::from_generators(rank, &gens)?,
            None => OrbitAutomaton::full(rank),
        })
    }

    fn ball_stats(&self, radius: usize) -> anyhow::Result<BallStats> {
        if self.cfg.subgroup.is_some() {
            Ok(BallStats::from_spheres(
                self.automaton()?.sphere_counts(radius)?,
            )?)
        } else {
            Ok(self.model.sphere_counts(radius, self.cfg.memory_budget)?)
        }
    }

    /// The exponent used inside formulas: the closed form for a whole free
    /// group, otherwise the fitted growth rate of the orbit.
    pub fn delta(&self) -> anyhow::Result<(f64, &'static str)> {
        if self.cfg.subgroup.is_none() {
            if let Some(d) = self.model.known_critical_exponent() {
                return Ok((d, "analytic"));
            }
        }
        let stats = self.ball_stats(self.cfg.radius.unwrap_or(BALL_RADIUS))?;
        Ok((critical_exponent(&stats, None)?.estimate, "fitted"))
    }

    pub fn p(&self, delta: f64) -> f64 {
        self.cfg
            .p
            .unwrap_or_else(|| (2.0 * delta / self.cfg.epsilon0).ceil().max(3.0))
    }

    /// The limit measure at `depth`, through the cache.
    pub fn computed_measure(
        &self,
        depth: usize,
    ) -> anyhow::Result<(DiscreteBoundaryMeasure, Vec<(&'static str, String)>)> {
        let aut = self.automaton()?;
        let (delta, source) = self.delta()?;
        let inputs = json!({
            "model": self.cfg.model,
            "subgroup": self.cfg.subgroup,
            "delta": delta,
            "schedule": self.cfg.schedule,
            "depth": depth,
        });
        let key = cache::cache_key(&inputs);
        let dir = self.cfg.cache_dir();
        let mut notes = vec![
            ("delta", float(delta)),
            ("delta_source", source.to_string()),
        ];
        if let Some(m) = cache::load(&dir, &key)
            .with_context(|| format!("reading the measure cache in {}", dir.display()))?
        {
            eprintln!(
                "measure cache hit: {}",
                cache::cache_path(&dir, &key).display()
            );
            notes.push(("gap", float(m.mass_error())));
            return Ok((m, notes));
        }
        let ps = ps_measure(&aut, delta, &self.cfg.schedule, depth)
            .with_context(|| format!("building the depth-{depth} Patterson-Sullivan measure"))?;
        cache::store(&dir, &key, inputs, &ps.measure)
            .with_context(|| format!("writing the measure cache in {}", dir.display()))?;
        eprintln!(
            "measure cache stored: {}",
            cache::cache_path(&dir, &key).display()
        );
        notes.push(("gap", float(ps.gap)));
        Ok((ps.measure, notes))
    }

    /// The measure for cocycle work. For a whole free group this is the
    /// analytic uniform measure, which is checked against a computed one
    /// first; subgroups use the computed measure.
    pub fn cocycle_measure(&self, depth: usize) -> anyhow::Result<Measure> {
        let (delta, _) = self.delta()?;
        if self.cfg.subgroup.is_some() {
            let (m, notes) = self.computed_measure(depth)?;
            return Ok(Measure {
                measure: Box::new(m),
                delta,
                notes,
            });
        }
        let uniform = UniformMeasure::new(self.rank("cocycle norms")?)?;
        let (computed, mut notes) = self.computed_measure(UNIFORM_CHECK_DEPTH)?;
        let group = FreeGroup::new(uniform.rank())?;
        let worst = (1..=UNIFORM_CHECK_DEPTH)
            .flat_map(|n| group.sphere(n))
            .map(|c| (uniform.mass(&c).unwrap_or(0.0) - computed.mass(&c).unwrap_or(0.0)).abs())
            .fold(0.0, f64::max);
        if worst > self.cfg.schedule.tolerance {
            bail!(
                "uniform measure differs from the computed one by {worst:e} at depth {UNIFORM_CHECK_DEPTH}"
            );
        }
        notes.push(("measure", "uniform".into()));
        notes.push(("uniform_vs_computed", float(worst)));
        Ok(Measure {
            measure: Box::new(uniform),
            delta,
            notes,
        })
    }
}

fn summary(name: &str, rows: Vec<(&str, String)>) -> Table {
    let mut t = Table::new(name, &["property", "value"]);
    for (k, v) in rows {
        t.push(vec![k.to_string(), v]);
    }
    t
}

pub fn space_info(ctx: &Context) -> anyhow::Result<Outcome> {
    let m = &ctx.model;
    let mut rows = vec![
        ("model", m.name().to_string()),
        ("spec", serde_json::to_string(&m.spec())?),
        ("generators", m.generator_count().to_string()),
        ("exact", m.is_exact().to_string()),
        ("hyperbolicity_constant", opt_float(m.known_delta())),
        ("critical_exponent", opt_float(m.known_critical_exponent())),
    ];
    if let Some(gens) = ctx.generators()? {
        let aut = ctx.automaton()?;
        rows.push((
            "subgroup",
            gens.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" "),
        ));
        rows.push(("subgroup_rank", aut.subgroup_rank().to_string()));
        let ne = match aut.is_non_elementary(&gens, BM_DEPTH) {
            NonElementary::Yes => "yes",
            NonElementary::No => "no",
            NonElementary::Inconclusive => "inconclusive",
        };
        rows.push(("non_elementary", ne.into()));
    }
    Ok(Outcome::of(vec![summary("space-info", rows)]))
}

pub fn delta(ctx: &Context) -> anyhow::Result<Outcome> {
    let radius = ctx.cfg.radius.unwrap_or(DELTA_RADIUS);
    let start = Instant::now();
    let ball = ctx
        .model
        .enumerate_ball(radius, ctx.cfg.memory_budget)
        .context("enumerating the ball")?;
    let d = ctx.model.four_point_delta(&ball.words)?;
    let mut t = Table::new(
        "delta",
        &["radius", "points", "delta", "exact", "runtime_ms"],
    );
    t.push(vec![
        radius.to_string(),
        ball.words.len().to_string(),
        float(d),
        ctx.model.is_exact().to_string(),
        runtime(start.elapsed(), ctx.cfg.timings),
    ]);
    Ok(Outcome::of(vec![t]))
}

pub fn growth(ctx: &Context) -> anyhow::Result<Outcome> {
    let stats = ctx.ball_stats(ctx.cfg.radius.unwrap_or(BALL_RADIUS))?;
    let mut t = Table::new("growth", &["r", "sphere", "ball"]);
    for (r, (s, b)) in stats.spheres.iter().zip(&stats.cumulative).enumerate() {
        t.push(vec![r.to_string(), s.to_string(), b.to_string()]);
    }
    Ok(Outcome::of(vec![t]))
}

pub fn critical(ctx: &Context) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let stats = ctx.ball_stats(ctx.cfg.radius.unwrap_or(BALL_RADIUS))?;
    let analytic = if ctx.cfg.subgroup.is_none() {
        ctx.model.known_critical_exponent()
    } else {
        None
    };
    let est = critical_exponent(&stats, analytic)?;
    let mut t = Table::new(
        "critical-exponent",
        &[
            "radius",
            "window_lo",
            "window_hi",
            "estimate",
            "analytic",
            "abs_error",
            "residual",
            "runtime_ms",
        ],
    );
    t.push(vec![
        stats.radius.to_string(),
        est.window.0.to_string(),
        est.window.1.to_string(),
        float(est.estimate),
        opt_float(est.analytic),
        opt_float(est.analytic.map(|a| (est.estimate - a).abs())),
        float(est.residual),
        runtime(start.elapsed(), ctx.cfg.timings),
    ]);
    Ok(Outcome::of(vec![t]))
}

pub fn ps(ctx: &Context) -> anyhow::Result<Outcome> {
    let depth = ctx.cfg.depth.unwrap_or(PS_DEPTH);
    let (m, mut notes) = ctx.computed_measure(depth)?;
    let mut t = Table::new("ps-measure", &["cell", "mass"]);
    for (w, x) in m.cells(depth).expect("own depth") {
        t.push(vec![w.to_string(), float(*x)]);
    }
    let defect = m.refinement_defect();
    notes.push(("total", float(m.total())));
    notes.push(("refinement_defect", float(defect)));
    let passed = defect < ctx.cfg.tolerances.refinement;
    Ok(Outcome {
        tables: vec![t, summary("ps-measure-summary", notes)],
        passed,
    })
}

pub fn rn_check(ctx: &Context) -> anyhow::Result<Outcome> {
    let depth = ctx.cfg.depth.unwrap_or(RN_DEPTH);
    let elements = ctx.elements()?;
    let longest = elements.iter().map(GroupWord::len).max().unwrap_or(0);
    let (m, notes) = ctx.computed_measure(depth + longest)?;
    let (delta, _) = ctx.delta()?;
    let mut t = Table::new(
        "rn-check",
        &["g", "cells_checked", "max_rel_error", "worst_cell", "pass"],
    );
    let mut passed = true;
    for g in &elements {
        let r = radon_nikodym_check(&m, g, depth, delta)?;
        let ok = r.max_rel_error <= ctx.cfg.tolerances.rn;
        passed &= ok;
        t.push(vec![
            g.to_string(),
            r.cells_checked.to_string(),
            float(r.max_rel_error),
            r.worst_cell.unwrap_or_default(),
            ok.to_string(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t, summary("rn-check-summary", notes)],
        passed,
    })
}

pub fn bm_invariance(ctx: &Context) -> anyhow::Result<Outcome> {
    let depth = ctx.cfg.depth.unwrap_or(BM_DEPTH);
    let elements = ctx.elements()?;
    let longest = elements.iter().map(GroupWord::len).max().unwrap_or(0);
    let (m, notes) = ctx.computed_measure(depth + longest)?;
    let (delta, _) = ctx.delta()?;
    let mut t = Table::new(
        "bm-invariance",
        &["g", "pairs_checked", "max_rel_defect", "worst_pair", "pass"],
    );
    let mut passed = true;
    for g in &elements {
        let r: BmInvariance = bm_invariance_defect(&m, g, depth, delta)?;
        let ok = r.max_rel_defect <= ctx.cfg.tolerances.bm;
        passed &= ok;
        t.push(vec![
            g.to_string(),
            r.pairs_checked.to_string(),
            float(r.max_rel_defect),
            r.worst_pair
                .map(|(c, d)| format!("{c} {d}"))
                .unwrap_or_default(),
            ok.to_string(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t, summary("bm-invariance-summary", notes)],
        passed,
    })
}

fn class_row<P: std::fmt::Display>(g: &GroupWord, c: &IsometryClass<P>) -> Vec<String> {
    let kind = if c.is_hyperbolic() {
        "hyperbolic"
    } else {
        "elliptic"
    };
    vec![
        g.to_string(),
        kind.to_string(),
        float(c.translation_length),
        c.attracting().map(ToString::to_string).unwrap_or_default(),
        c.repelling().map(ToString::to_string).unwrap_or_default(),
    ]
}

pub fn classify(ctx: &Context) -> anyhow::Result<Outcome> {
    let g = ctx.element("a")?;
    let mut t = Table::new(
        "classify",
        &["g", "kind", "translation_length", "attracting", "repelling"],
    );
    match &ctx.model {
        SpaceModel::FreeGroup(_) => t.push(class_row(&g, &classify_tree(&g))),
        SpaceModel::Schottky(s) => t.push(class_row(&g, &classify_disk(s, &g)?)),
        SpaceModel::FreeProduct(_) => {
            return Err(Error::unsupported(ctx.model.name(), "classify").into())
        }
    }
    Ok(Outcome::of(vec![t]))
}

const NORM_HEADER: [&str; 5] = [
    "n",
    "norm_p_pow_p",
    "certified_error",
    "depth",
    "runtime_ms",
];

pub fn cocycle_norm(ctx: &Context) -> anyhow::Result<Outcome> {
    let g = ctx.element("a")?;
    ctx.tree("cocycle norms")?;
    let depth = ctx.cfg.depth.unwrap_or(COCYCLE_DEPTH);
    let m = ctx.cocycle_measure(depth.max(g.len()))?;
    let p = ctx.p(m.delta);
    let start = Instant::now();
    let r = lp_norm(m.measure.as_ref(), &g, p, m.delta, ctx.cfg.epsilon0, depth)?;
    let mut t = Table::new("cocycle-norm", &NORM_HEADER);
    t.push(vec![
        "1".into(),
        float(r.value),
        float(r.error),
        r.depth.to_string(),
        runtime(start.elapsed(), ctx.cfg.timings),
    ]);
    let mut notes = vec![
        ("element", g.to_string()),
        ("p", float(p)),
        ("epsilon0", float(ctx.cfg.epsilon0)),
        ("certified", r.certified.to_string()),
        ("sup_norm", float(r.sup_norm)),
        ("kappa", float(r.kappa)),
        ("upper_bound", float(r.upper_bound)),
    ];
    notes.extend(m.notes);
    let passed = !r.certified || r.value <= r.upper_bound + r.error;
    Ok(Outcome {
        tables: vec![t, summary("cocycle-norm-summary", notes)],
        passed,
    })
}

pub fn growth_exp(ctx: &Context) -> anyhow::Result<Outcome> {
    let g = ctx.element("a")?;
    ctx.tree("growth experiments")?;
    let depth = ctx.cfg.depth.unwrap_or(COCYCLE_DEPTH);
    let top = ctx.cfg.powers.iter().copied().max().unwrap_or(1) as usize * g.len();
    let m = ctx.cocycle_measure(depth.max(top))?;
    let p = ctx.p(m.delta);
    let eps0 = ctx.cfg.epsilon0;
    let ex = growth_experiment(
        m.measure.as_ref(),
        &g,
        p,
        &ctx.cfg.powers,
        m.delta,
        eps0,
        depth,
    )?;
    let mut t = Table::new("growth-experiment", &NORM_HEADER);
    for row in &ex.rows {
        let elapsed = if ctx.cfg.timings {
            let start = Instant::now();
            lp_norm(
                m.measure.as_ref(),
                &g.pow(row.n as i64),
                p,
                m.delta,
                eps0,
                depth,
            )?;
            start.elapsed()
        } else {
            Default::default()
        };
        t.push(vec![
            row.n.to_string(),
            float(row.value),
            float(row.error),
            row.depth.to_string(),
            runtime(elapsed, ctx.cfg.timings),
        ]);
    }
    let verdict = match ex.verdict {
        lpcocycle::cocycle::Verdict::UnboundedConsistent => "unbounded-consistent",
        lpcocycle::cocycle::Verdict::Inconclusive => "inconclusive",
    };
    let mut notes = vec![
        ("element", g.to_string()),
        ("p", float(p)),
        ("epsilon0", float(eps0)),
        ("slope", float(ex.slope)),
        ("intercept", float(ex.intercept)),
        ("relative_residual", float(ex.relative_residual)),
        ("verdict", verdict.into()),
    ];
    if let Some(b) = &ex.block {
        notes.push(("block_k", b.k.to_string()));
        notes.push(("block_c", float(b.c)));
        notes.push(("block_observed_min_beta", float(b.observed_min_beta)));
        let masses = b
            .masses
            .as_ref()
            .map(|ms| ms.iter().map(|x| float(*x)).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        notes.push(("block_masses", masses));
        notes.push(("block_contribution", opt_float(b.per_block)));
    }
    notes.extend(m.notes);
    Ok(Outcome::of(vec![
        t,
        summary("growth-experiment-summary", notes),
    ]))
}

pub fn cone_lambda(ctx: &Context) -> anyhow::Result<Outcome> {
    let g = ctx.element("a")?;
    let eps0 = ctx.cfg.epsilon0;
    let mut t = Table::new(
        "cone-lambda",
        &[
            "g",
            "epsilon0",
            "translation_length",
            "lambda",
            "ln_lambda",
            "at_repelling",
        ],
    );
    let (ell, ev) = match &ctx.model {
        SpaceModel::FreeGroup(f) => {
            let tree = TreeBoundary::new(f.rank())?;
            tree.check_word(&g)?;
            let c = classify_tree(&g);
            (
                c.translation_length,
                eigenvalue_lambda(&tree, &g, &c, eps0)?,
            )
        }
        SpaceModel::Schottky(s) => {
            let disk = DiskBoundary { group: s.clone() };
            VisualParams::new(&disk, eps0, 0.0)?;
            let c = classify_disk(s, &g)?;
            (
                c.translation_length,
                eigenvalue_lambda(&disk, &g, &c, eps0)?,
            )
        }
        SpaceModel::FreeProduct(_) => {
            return Err(Error::unsupported(ctx.model.name(), "cone-lambda").into())
        }
    };
    t.push(vec![
        g.to_string(),
        float(eps0),
        float(ell),
        float(ev.lambda),
        float(ev.ln_lambda),
        float(ev.at_repelling),
    ]);
    Ok(Outcome::of(vec![t]))
}
