//! The invariant suite behind `verify-all`. Parameters are fixed; only the
//! sampling seed comes from the config.

use std::time::Instant;

use lpcocycle::boundary::conformal::cross_ratio_invariant;
use lpcocycle::boundary::{moebius_identity_check, DiskBoundary, Ray, TreeBoundary};
use lpcocycle::cocycle::{
    bullet, cocycle_identity_check, eigenvalue_lambda, growth_experiment, log_iota, lp_norm,
    AxisPartition, ConePoint, GrowthExperiment,
};
use lpcocycle::dynamics::{classify_disk, classify_tree, OrbitAutomaton};
use lpcocycle::measures::{
    bm_invariance_defect, critical_exponent, ps_measure, radon_nikodym_check, CellMeasure,
    Schedule, UniformMeasure,
};
use lpcocycle::space::schottky::default_generators;
use lpcocycle::space::{FreeGroup, ModelSpec, Schottky, SpaceModel, DEFAULT_MEMORY_BUDGET};
use lpcocycle::{Error, GroupWord, Letter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::output::{float, runtime, Table};

pub const SAMPLES_PER_ELEMENT: usize = 1000;
pub const GROWTH_POWERS: [u32; 5] = [1, 2, 4, 8, 16];

#[derive(Clone, Debug, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub value: String,
    pub threshold: String,
    pub pass: bool,
}

type Check = fn(&mut ChaCha8Rng) -> anyhow::Result<Criterion>;

pub const CHECKS: [Check; 9] = [
    tree_hyperbolicity,
    critical_exponents,
    patterson_sullivan,
    radon_nikodym,
    bowen_margulis,
    moebius,
    cocycle,
    cone,
    growth,
];

fn ln3() -> f64 {
    3f64.ln()
}

fn words(rank: u8, max_len: usize) -> Vec<GroupWord> {
    let g = FreeGroup::new(rank).expect("valid rank");
    (1..=max_len).flat_map(|n| g.sphere(n)).collect()
}

fn random_word(rng: &mut ChaCha8Rng, rank: u8, len: usize) -> GroupWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_code(rng.gen_range(0..2 * rank));
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    GroupWord::from_letters(letters)
}

/// An eventually periodic ray with preperiod `< 6` and period `≤ 3`.
pub fn random_ray(rng: &mut ChaCha8Rng, rank: u8) -> Ray {
    loop {
        let (lp, lq) = (rng.gen_range(0..6), rng.gen_range(1..4));
        let prefix = random_word(rng, rank, lp);
        let period = random_word(rng, rank, lq);
        if let Ok(r) = Ray::new(prefix, period) {
            return r;
        }
    }
}

fn tree_hyperbolicity(_: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let model = SpaceModel::from_spec(&ModelSpec::FreeGroup { rank: 2 })?;
    let ball = model.word_ball(6, DEFAULT_MEMORY_BUDGET)?;
    let d = model.four_point_delta(&ball)?;
    Ok(Criterion {
        id: 1,
        name: "four-point delta of the F2 ball of radius 6",
        value: float(d),
        threshold: "= 0".into(),
        pass: d == 0.0,
    })
}

fn critical_exponents(_: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let mut worst = 0.0f64;
    for rank in [2u8, 3] {
        let model = SpaceModel::from_spec(&ModelSpec::FreeGroup { rank })?;
        let stats = model.sphere_counts(12, DEFAULT_MEMORY_BUDGET)?;
        let est = critical_exponent(&stats, None)?;
        let exact = (2.0 * rank as f64 - 1.0).ln();
        worst = worst.max((est.estimate - exact).abs());
    }
    Ok(Criterion {
        id: 2,
        name: "critical exponent fit for F2 and F3 at R = 12",
        value: float(worst),
        threshold: "< 1e-2".into(),
        pass: worst < 1e-2,
    })
}

fn patterson_sullivan(_: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let aut = OrbitAutomaton::full(2);
    let sched = Schedule::default();
    let one = ps_measure(&aut, ln3(), &sched, 1)?;
    let two = ps_measure(&aut, ln3(), &sched, 2)?;
    let mut mass_err = 0.0f64;
    for c in words(2, 2) {
        let (m, exact) = if c.len() == 1 {
            (one.measure.mass(&c), 0.25)
        } else {
            (two.measure.mass(&c), 1.0 / 12.0)
        };
        mass_err = mass_err.max((m.unwrap_or(0.0) - exact).abs());
    }
    // independently computed depth-1 masses against the aggregated depth-2 ones
    let refinement = words(2, 1)
        .iter()
        .map(|c| (one.measure.mass(c).unwrap_or(0.0) - two.measure.mass(c).unwrap_or(0.0)).abs())
        .fold(two.measure.refinement_defect(), f64::max);
    Ok(Criterion {
        id: 3,
        name: "Patterson-Sullivan masses at depths 1 and 2, refinement defect",
        value: format!("{} {}", float(mass_err), float(refinement)),
        threshold: "<= 1e-3, < 1e-6".into(),
        pass: mass_err <= 1e-3 && refinement < 1e-6,
    })
}

fn radon_nikodym(_: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let aut = OrbitAutomaton::full(2);
    let ps = ps_measure(&aut, ln3(), &Schedule::default(), 9)?;
    let mut worst = 0.0f64;
    for g in words(2, 3) {
        worst = worst.max(radon_nikodym_check(&ps.measure, &g, 6, ln3())?.max_rel_error);
    }
    // analytic masses: ν([ab]) / ν([b]) = 1/3 and ν([b]) / ν([Ab]) = 3 for g = a
    let u = UniformMeasure::new(2)?;
    let m = |s: &str| u.mass(&s.parse().expect("literal word")).expect("uniform");
    let exact = m("ab") / m("b") == 1.0 / 3.0 && m("b") / m("Ab") == 3.0;
    Ok(Criterion {
        id: 4,
        name: "Radon-Nikodym formula for |g| <= 3 at depth 6",
        value: float(worst),
        threshold: "<= 1e-3, uniform ratios 1/3 and 3 exact".into(),
        pass: worst <= 1e-3 && exact,
    })
}

fn bowen_margulis(_: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let aut = OrbitAutomaton::full(2);
    let ps = ps_measure(&aut, ln3(), &Schedule::default(), 7)?;
    let mut worst = 0.0f64;
    for g in words(2, 3) {
        worst = worst.max(bm_invariance_defect(&ps.measure, &g, 4, ln3())?.max_rel_defect);
    }
    Ok(Criterion {
        id: 5,
        name: "Bowen-Margulis invariance on depth-4 pairs, |g| <= 3",
        value: float(worst),
        threshold: "<= 1e-6".into(),
        pass: worst <= 1e-6,
    })
}

fn moebius(rng: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let t = TreeBoundary::new(2)?;
    let mut failures = 0usize;
    let mut checked = 0usize;
    for g in words(2, 4) {
        let mut done = 0;
        while done < SAMPLES_PER_ELEMENT {
            let z: Vec<Ray> = (0..4).map(|_| random_ray(rng, 2)).collect();
            let cr = match cross_ratio_invariant(&t, &g, [&z[0], &z[1], &z[2], &z[3]], 1.0) {
                Ok(b) => b,
                Err(Error::Degenerate(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let mo = moebius_identity_check(&t, &g, &z[0], &z[1], 1.0)?;
            failures += usize::from(!cr) + usize::from(!mo);
            checked += 2;
            done += 1;
        }
    }
    Ok(Criterion {
        id: 6,
        name: "cross-ratio invariance and metric-derivative identity, |g| <= 4",
        value: format!("{failures}/{checked}"),
        threshold: "0 failures".into(),
        pass: failures == 0,
    })
}

fn cocycle(rng: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let t = TreeBoundary::new(2)?;
    let mut small = words(2, 2);
    small.push(GroupWord::identity());
    let mut pairs_of_elements: Vec<(GroupWord, GroupWord)> = small
        .iter()
        .flat_map(|g| small.iter().map(move |h| (g.clone(), h.clone())))
        .collect();
    for _ in 0..500 {
        let (a, b) = (rng.gen_range(0..5), rng.gen_range(0..5));
        pairs_of_elements.push((random_word(rng, 2, a), random_word(rng, 2, b)));
    }
    let mut defect = 0.0f64;
    for (g, h) in &pairs_of_elements {
        let pts: Vec<(Ray, Ray)> = (0..20)
            .map(|_| (random_ray(rng, 2), random_ray(rng, 2)))
            .collect();
        defect = defect.max(cocycle_identity_check(&t, g, h, &pts)?);
    }
    let u = UniformMeasure::new(2)?;
    let a: GroupWord = "a".parse()?;
    let mut norm_err = 0.0f64;
    for p in [2.5, 3.0, 4.0] {
        norm_err = norm_err.max((lp_norm(&u, &a, p, ln3(), 1.0, 8)?.value - 0.375).abs());
    }
    let mut violations = 0usize;
    for g in words(2, 3) {
        for p in [2.5, 3.0, 4.0] {
            let r = lp_norm(&u, &g, p, ln3(), 1.0, 8)?;
            if r.certified && r.value > r.upper_bound {
                violations += 1;
            }
        }
    }
    Ok(Criterion {
        id: 7,
        name: "cocycle identity, norm of beta_a, upper bound",
        value: format!("{} {} {violations}", float(defect), float(norm_err)),
        threshold: "= 0, <= 1e-12, 0 violations".into(),
        pass: defect == 0.0 && norm_err <= 1e-12 && violations == 0,
    })
}

fn cone(rng: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let t = TreeBoundary::new(2)?;
    let elements = words(2, 3);
    let mut iota_failures = 0usize;
    for g in &elements {
        for _ in 0..100 {
            // dyadic scales keep every logarithm exact
            let x = ConePoint {
                xi: random_ray(rng, 2),
                ln_t: rng.gen_range(-64..64) as f64 / 8.0,
            };
            let y = ConePoint {
                xi: random_ray(rng, 2),
                ln_t: rng.gen_range(-64..64) as f64 / 8.0,
            };
            let before = log_iota(&t, &x, &y, 1.0);
            let after = log_iota(&t, &bullet(&t, g, &x, 1.0), &bullet(&t, g, &y, 1.0), 1.0);
            iota_failures += usize::from(before != after);
        }
    }
    let a: GroupWord = "a".parse()?;
    let lambda_a = eigenvalue_lambda(&t, &a, &classify_tree(&a), 1.0)?.lambda;
    let lambda_err = (lambda_a - 0.5f64.exp()).abs();
    let mut min_lambda = f64::INFINITY;
    for g in &elements {
        min_lambda = min_lambda.min(eigenvalue_lambda(&t, g, &classify_tree(g), 1.0)?.lambda);
    }
    let disk = DiskBoundary {
        group: Schottky::new(&default_generators())?,
    };
    for s in ["a", "b", "ab", "aB"] {
        let g = disk.group.parse(s)?;
        min_lambda = min_lambda
            .min(eigenvalue_lambda(&disk, &g, &classify_disk(&disk.group, &g)?, 1.0)?.lambda);
    }
    let mut mismatches = 0usize;
    for g in &elements {
        let part = AxisPartition::new(g)?;
        for k in 1..=3 {
            mismatches += part.equivariance(2, 4, k)?.mismatches.len();
        }
    }
    Ok(Criterion {
        id: 8,
        name: "bullet preserves iota, lambda(a), lambda > 1, A_n = g^n A_0",
        value: format!(
            "{iota_failures} {} {} {mismatches}",
            float(lambda_err),
            float(min_lambda)
        ),
        threshold: "0, <= 1e-12, > 1, 0".into(),
        pass: iota_failures == 0 && lambda_err <= 1e-12 && min_lambda > 1.0 && mismatches == 0,
    })
}

pub fn growth_series() -> anyhow::Result<GrowthExperiment> {
    let u = UniformMeasure::new(2)?;
    Ok(growth_experiment(
        &u,
        &"a".parse()?,
        3.0,
        &GROWTH_POWERS,
        ln3(),
        1.0,
        8,
    )?)
}

fn growth(_: &mut ChaCha8Rng) -> anyhow::Result<Criterion> {
    let ex = growth_series()?;
    let v: Vec<f64> = ex.rows.iter().map(|r| r.value).collect();
    let increasing = v.windows(2).all(|w| w[1] > w[0]);
    let factor = v[v.len() - 1] / v[0];
    Ok(Criterion {
        id: 9,
        name: "norms of beta_{a^n} for n = 1, 2, 4, 8, 16 at p = 3",
        value: format!(
            "{} {} {}",
            float(factor),
            float(ex.slope),
            float(ex.relative_residual)
        ),
        threshold: "increasing, factor > 10, slope > 0, residual < 0.1".into(),
        pass: increasing && factor > 10.0 && ex.slope > 0.0 && ex.relative_residual < 0.1,
    })
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Table::new(
        "verify-all",
        &[
            "criterion",
            "name",
            "value",
            "threshold",
            "pass",
            "runtime_ms",
        ],
    );
    let mut passed = true;
    for check in CHECKS {
        let start = Instant::now();
        let c = check(&mut rng)?;
        passed &= c.pass;
        t.push(vec![
            c.id.to_string(),
            c.name.to_string(),
            c.value,
            c.threshold,
            c.pass.to_string(),
            runtime(start.elapsed(), cfg.timings),
        ]);
    }
    Ok(Outcome {
        tables: vec![t],
        passed,
    })
}
