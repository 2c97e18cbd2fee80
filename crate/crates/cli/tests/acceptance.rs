//! One line per acceptance criterion; exits nonzero if any fails.

use std::fs;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use lpcocycle::boundary::conformal::cross_ratio_invariant;
use lpcocycle::boundary::{moebius_identity_check, Ray, TreeBoundary};
use lpcocycle::cocycle::{
    bullet, cocycle_identity_check, eigenvalue_lambda, growth_experiment, log_iota, lp_norm,
    lp_norm_cell_sum, AxisPartition, ConePoint,
};
use lpcocycle::dynamics::{classify_tree, OrbitAutomaton};
use lpcocycle::measures::{
    bm_invariance_defect, critical_exponent, ps_measure, radon_nikodym_check, CellMeasure,
    Schedule, UniformMeasure,
};
use lpcocycle::space::{FreeGroup, ModelSpec, SpaceModel, DEFAULT_MEMORY_BUDGET};
use lpcocycle::GroupWord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = (bool, String);

fn ln3() -> f64 {
    3f64.ln()
}

fn w(s: &str) -> GroupWord {
    s.parse().unwrap()
}

fn ball(max_len: usize) -> Vec<GroupWord> {
    let f = FreeGroup::new(2).unwrap();
    (1..=max_len).flat_map(|n| f.sphere(n)).collect()
}

fn ray(rng: &mut ChaCha8Rng) -> Ray {
    loop {
        let mut letters = String::new();
        let (u, v) = (rng.gen_range(0..6), rng.gen_range(1..4));
        for _ in 0..u + v {
            letters.push(['a', 'A', 'b', 'B'][rng.gen_range(0..4)]);
        }
        let text = format!("{}|{}", &letters[..u], &letters[u..]);
        if let Ok(r) = text.parse::<Ray>() {
            return r;
        }
    }
}

fn random_element(rng: &mut ChaCha8Rng, max_len: usize) -> GroupWord {
    let letters: String = (0..rng.gen_range(0..=max_len))
        .map(|_| ['a', 'A', 'b', 'B'][rng.gen_range(0..4)])
        .collect();
    // free reduction happens in the parser
    letters.parse().unwrap_or_else(|_| GroupWord::identity())
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

fn c1() -> Verdict {
    let start = Instant::now();
    let m = SpaceModel::from_spec(&ModelSpec::FreeGroup { rank: 2 }).unwrap();
    let pts = m.word_ball(6, DEFAULT_MEMORY_BUDGET).unwrap();
    let d = m.four_point_delta(&pts).unwrap();
    (
        d == 0.0 && within(start, Duration::from_secs(10)),
        format!("delta = {d} over {} points", pts.len()),
    )
}

fn c2() -> Verdict {
    let mut ok = true;
    let mut msg = Vec::new();
    for (rank, exact) in [(2u8, 3f64.ln()), (3, 5f64.ln())] {
        let start = Instant::now();
        let m = SpaceModel::from_spec(&ModelSpec::FreeGroup { rank }).unwrap();
        let e =
            critical_exponent(&m.sphere_counts(12, DEFAULT_MEMORY_BUDGET).unwrap(), None).unwrap();
        ok &= (e.estimate - exact).abs() < 1e-2 && within(start, Duration::from_secs(60));
        msg.push(format!("F{rank}: {:.6}", e.estimate));
    }
    (ok, msg.join(", "))
}

fn c3() -> Verdict {
    let aut = OrbitAutomaton::full(2);
    let one = ps_measure(&aut, ln3(), &Schedule::default(), 1)
        .unwrap()
        .measure;
    let two = ps_measure(&aut, ln3(), &Schedule::default(), 2)
        .unwrap()
        .measure;
    let e1 = ball(1)
        .iter()
        .map(|c| (one.mass(c).unwrap() - 0.25).abs())
        .fold(0.0, f64::max);
    let e2 = FreeGroup::new(2)
        .unwrap()
        .sphere(2)
        .iter()
        .map(|c| (two.mass(c).unwrap() - 1.0 / 12.0).abs())
        .fold(0.0, f64::max);
    // each depth-1 cell against the sum of its computed children
    let f = FreeGroup::new(2).unwrap();
    let refine = ball(1)
        .iter()
        .map(|c| {
            let kids: f64 = f.extensions(c).map(|l| two.mass(&c.push(l)).unwrap()).sum();
            (one.mass(c).unwrap() - kids).abs()
        })
        .fold(0.0, f64::max);
    (
        e1 <= 1e-3 && e2 <= 1e-3 && refine < 1e-6,
        format!("depth-1 error {e1:e}, depth-2 error {e2:e}, refinement {refine:e}"),
    )
}

fn c4() -> Verdict {
    let ps = ps_measure(&OrbitAutomaton::full(2), ln3(), &Schedule::default(), 9).unwrap();
    let worst = ball(3)
        .iter()
        .map(|g| {
            radon_nikodym_check(&ps.measure, g, 6, ln3())
                .unwrap()
                .max_rel_error
        })
        .fold(0.0, f64::max);
    let u = UniformMeasure::new(2).unwrap();
    let m = |s: &str| u.mass(&w(s)).unwrap();
    // g = a maps [b] to [ab] and [Ab] to [b]
    let (r1, r2) = (m("ab") / m("b"), m("b") / m("Ab"));
    (
        worst <= 1e-3 && r1 == 1.0 / 3.0 && r2 == 3.0,
        format!("max relative error {worst:e}, analytic ratios {r1} and {r2}"),
    )
}

fn c5() -> Verdict {
    let ps = ps_measure(&OrbitAutomaton::full(2), ln3(), &Schedule::default(), 7).unwrap();
    let worst = ball(3)
        .iter()
        .map(|g| {
            bm_invariance_defect(&ps.measure, g, 4, ln3())
                .unwrap()
                .max_rel_defect
        })
        .fold(0.0, f64::max);
    (worst <= 1e-6, format!("max relative defect {worst:e}"))
}

fn c6() -> Verdict {
    let t = TreeBoundary::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    let mut total = 0;
    for g in ball(4) {
        let mut n = 0;
        while n < 1000 {
            let z: Vec<Ray> = (0..4).map(|_| ray(&mut rng)).collect();
            let Ok(cr) = cross_ratio_invariant(&t, &g, [&z[0], &z[1], &z[2], &z[3]], 1.0) else {
                continue;
            };
            let mo = moebius_identity_check(&t, &g, &z[0], &z[1], 1.0).unwrap();
            bad += usize::from(!cr) + usize::from(!mo);
            total += 2;
            n += 1;
        }
    }
    (bad == 0, format!("{bad} failures in {total} checks"))
}

fn c7() -> Verdict {
    let t = TreeBoundary::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut defect = 0.0f64;
    for _ in 0..2000 {
        let (g, h) = (random_element(&mut rng, 4), random_element(&mut rng, 4));
        let pairs: Vec<(Ray, Ray)> = (0..10).map(|_| (ray(&mut rng), ray(&mut rng))).collect();
        defect = defect.max(cocycle_identity_check(&t, &g, &h, &pairs).unwrap());
    }
    let u = UniformMeasure::new(2).unwrap();
    let mut norm_err = 0.0f64;
    for p in [2.5, 3.0, 4.0] {
        let exact = lp_norm(&u, &w("a"), p, ln3(), 1.0, 8).unwrap().value;
        let summed = lp_norm_cell_sum(&u, &w("a"), p, ln3(), 3).unwrap();
        norm_err = norm_err
            .max((exact - 0.375).abs())
            .max((summed - 0.375).abs());
    }
    let mut violated = 0;
    for g in ball(3) {
        for p in [2.5, 3.0, 4.0, 6.0] {
            let r = lp_norm(&u, &g, p, ln3(), 1.0, 8).unwrap();
            violated += usize::from(r.certified && r.value > r.upper_bound);
        }
    }
    (
        defect == 0.0 && norm_err <= 1e-12 && violated == 0,
        format!("identity defect {defect}, norm error {norm_err:e}, {violated} bound violations"),
    )
}

fn c8() -> Verdict {
    let t = TreeBoundary::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut iota_bad = 0;
    for g in ball(3) {
        for _ in 0..200 {
            let x = ConePoint {
                xi: ray(&mut rng),
                ln_t: rng.gen_range(-40..40) as f64 / 4.0,
            };
            let y = ConePoint {
                xi: ray(&mut rng),
                ln_t: rng.gen_range(-40..40) as f64 / 4.0,
            };
            let (gx, gy) = (bullet(&t, &g, &x, 1.0), bullet(&t, &g, &y, 1.0));
            iota_bad += usize::from(log_iota(&t, &gx, &gy, 1.0) != log_iota(&t, &x, &y, 1.0));
        }
    }
    let a = w("a");
    let la = eigenvalue_lambda(&t, &a, &classify_tree(&a), 1.0)
        .unwrap()
        .lambda;
    let min_lambda = ball(4)
        .iter()
        .map(|g| {
            eigenvalue_lambda(&t, g, &classify_tree(g), 1.0)
                .unwrap()
                .lambda
        })
        .fold(f64::INFINITY, f64::min);
    let mut mismatches = 0;
    for g in ball(3) {
        let part = AxisPartition::new(&g).unwrap();
        for k in 1..=4 {
            mismatches += part.equivariance(2, 4, k).unwrap().mismatches.len();
        }
    }
    (
        iota_bad == 0 && (la - 0.5f64.exp()).abs() <= 1e-12 && min_lambda > 1.0 && mismatches == 0,
        format!("iota failures {iota_bad}, lambda(a) = {la}, min lambda {min_lambda}, partition mismatches {mismatches}"),
    )
}

fn c9() -> Verdict {
    let start = Instant::now();
    let u = UniformMeasure::new(2).unwrap();
    let ex = growth_experiment(&u, &w("a"), 3.0, &[1, 2, 4, 8, 16], ln3(), 1.0, 8).unwrap();
    let v: Vec<f64> = ex.rows.iter().map(|r| r.value).collect();
    // brute-force cell sums for the small powers
    let oracle_ok = [(0usize, 1i64), (1, 2), (2, 4)].iter().all(|&(i, n)| {
        let s = lp_norm_cell_sum(&u, &w("a").pow(n), 3.0, ln3(), n as usize + 1).unwrap();
        (s - v[i]).abs() < 1e-12 * s
    });
    let ok = v.windows(2).all(|p| p[1] > p[0])
        && v[4] > 10.0 * v[0]
        && ex.slope > 0.0
        && ex.relative_residual < 0.1
        && oracle_ok
        && within(start, Duration::from_secs(300));
    (
        ok,
        format!(
            "series {v:?}, slope {:.4}, relative residual {:.4}",
            ex.slope, ex.relative_residual
        ),
    )
}

fn c10() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_lpcocycle"))
            .args(["--out", dir.path().to_str().unwrap(), "verify-all"])
            .env_remove("LPCOCYCLE_TIMINGS")
            .stdout(Stdio::null())
            .status()
            .unwrap()
    };
    let first = run();
    let a = fs::read(dir.path().join("verify-all.csv")).unwrap();
    let second = run();
    let b = fs::read(dir.path().join("verify-all.csv")).unwrap();
    (
        first.success() && second.success() && a == b,
        format!(
            "exit {:?} then {:?}, identical output: {}",
            first.code(),
            second.code(),
            a == b
        ),
    )
}

fn main() {
    let checks: [fn() -> Verdict; 10] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10];
    let mut failed = 0;
    for (i, check) in checks.iter().enumerate() {
        let (ok, detail) = check();
        println!(
            "criterion {}: {} ({detail})",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
