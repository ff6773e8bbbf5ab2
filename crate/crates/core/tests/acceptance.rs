//! Acceptance criteria 1-8. Runs as a plain binary so that every criterion
//! prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use renorm_lab::bounded::{conjugate, group_norm, m_weight, BoundedSettings};
use renorm_lab::detector::{certify, recheck, RejectionWitness, Verdict};
use renorm_lab::functions::{lipschitz, random_tents};
use renorm_lab::gallery;
use renorm_lab::norm::{atoms_oracle, dual_decompose, solve_unit, triple_norm, RenormConfig, RenormSettings, TriangularSystem};
use renorm_lab::operators::{check_sot_convergence, compose, GroupSpec, SotOptions, WeightedComposition};
use renorm_lab::space::{builtin_space, onepoint_point, BuiltinSpace, SampledSpace};
use renorm_lab::tuples::TupleIndex;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn line() -> SampledSpace {
    builtin_space(&BuiltinSpace::Line { resolution: 0.01, half_width: 10.0 }).unwrap()
}

fn line_cfg() -> RenormConfig {
    let s = line();
    let g = GroupSpec::trivial(&s);
    RenormConfig::build(s, g, &RenormSettings { depth: 6, ..Default::default() }).unwrap()
}

/// circle x [0, 1] at 120 x 21 with the rotation group of order 12.
fn cylinder_cfg() -> RenormConfig {
    let s = builtin_space(&BuiltinSpace::CircleXInterval { circle_points: 120, interval_points: 21 }).unwrap();
    let g = gallery::rotation_group(&s, 12);
    RenormConfig::build(s, g, &RenormSettings { depth: 4, gamma_cap: 12, ..Default::default() }).unwrap()
}

/// Smallest integer `L` with `1/(L-1) < C - lambda_1 = 0.05`.
fn oracle_big_l() -> u64 {
    (2u64..).find(|&l| 1.0 / (l as f64 - 1.0) < 0.05).unwrap()
}

fn c1() -> Outcome {
    let start = Instant::now();
    let s = builtin_space(&BuiltinSpace::Circle { points: 256 }).unwrap();
    let g = gallery::rotation_group(&s, 4);
    let configs = [line_cfg(), RenormConfig::build(s, g, &RenormSettings { depth: 6, ..Default::default() }).unwrap()];
    let mut summary = Vec::new();
    for cfg in &configs {
        ensure!(cfg.params().big_l == oracle_big_l(), "L = {}", cfg.params().big_l);
        ensure!(cfg.params().lambda(1) == 1.05, "lambda_1 = {}", cfg.params().lambda(1));
        let r = cfg.bmap_report();
        for p in &r.properties {
            ensure!(p.pass, "property {}: {:?}", p.property, p.violation);
        }
        // Properties 5 and 6 recomputed from the registry.
        let reg = cfg.registry();
        let l = cfg.params().big_l as f64;
        let mut members = 0;
        for (id, t) in reg.all_members() {
            let k = reg.class(id).exponent;
            ensure!(k >= ((3 * t.index.last()) as i64 - 4).into(), "{t}: exponent {k}");
            if t.n() >= 2 {
                let kp = reg.exponent_of(&t.prefix(t.n() as usize - 1)).unwrap();
                ensure!(k > kp + 1, "{t}: b(t') <= L b(t)");
            }
            members += 1;
        }
        let tail: f64 = (7..60).map(|m| l.powi(-(3 * m - 1))).sum();
        ensure!(r.chain_max + tail < cfg.params().c, "chain max {}", r.chain_max);
        summary.push(format!("{}: {} classes, {members} tuples", cfg.space().name(), r.classes));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs <= 10.0, "runtime {secs:.1} s");
    Ok(format!("{}; {secs:.2} s", summary.join(", ")))
}

fn random_system(rng: &mut ChaCha8Rng) -> TriangularSystem {
    let n = rng.gen_range(1..=8);
    let lambdas = loop {
        let mut l: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..1.1)).collect();
        l.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if l.windows(2).all(|w| w[0] > w[1]) && l[n - 1] > 1.0 {
            break l;
        }
    };
    let mut zeta = vec![vec![0.0; n]; n];
    for (j, row) in zeta.iter_mut().enumerate() {
        for (k, z) in row.iter_mut().enumerate().skip(j + 1) {
            *z = rng.gen_range(0.0..=9f64.powi(1 - 3 * k as i32));
        }
    }
    TriangularSystem::new(lambdas, zeta).unwrap()
}

fn c2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_res, mut worst_id) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let sys = random_system(&mut rng);
        sys.check_hypotheses().map_err(|e| e.to_string())?;
        let a = solve_unit(&sys).map_err(|e| e.to_string())?;
        let res = sys.apply(&a).iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        ensure!(a.iter().all(|v| (0.8..=1.0).contains(v)), "unit entries {a:?}");
        ensure!(res <= 1e-12, "unit residual {res}");
        let beta: Vec<f64> = (0..sys.size()).map(|_| rng.gen_range(0.8..=1.2)).collect();
        let d = dual_decompose(&beta, &sys).map_err(|e| e.to_string())?;
        ensure!(d.alpha.iter().all(|v| (0.0..2.0).contains(v)), "alpha {:?}", d.alpha);
        let back = sys.apply_transpose(&d.alpha);
        let r = back.iter().zip(&beta).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        ensure!(r <= 1e-12, "decomposition residual {r}");
        let id = (beta.iter().zip(&a).map(|(b, z)| b * z).sum::<f64>() - d.alpha.iter().sum::<f64>()).abs();
        ensure!(id <= 1e-10, "beta . z0 differs from the alpha sum by {id}");
        worst_res = worst_res.max(res.max(r));
        worst_id = worst_id.max(id);
    }
    Ok(format!("1000 systems; max residual {worst_res:.1e}, max identity gap {worst_id:.1e}"))
}

fn c3(cfg: &RenormConfig) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = cfg.params().c;
    let mut worst = 0.0f64;
    for k in 0..200 {
        let x = random_tents(cfg.space(), &mut rng, 6, (0.2, 3.0)).eval(cfg.space());
        let v = triple_norm(&x, cfg);
        let s = v.sup_norm;
        ensure!(s <= v.value, "function {k}: sup {s} > value {}", v.value);
        ensure!(v.value <= c * s && v.upper <= c * s, "function {k}: upper {} > C sup {}", v.upper, c * s);
        ensure!(v.truncation_bound <= 0.02 * s, "function {k}: truncation {} > 0.02 sup", v.truncation_bound);
        ensure!(!v.gamma_truncated, "function {k}: labels truncated");
        worst = worst.max(v.truncation_bound / s);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs <= 60.0, "runtime {secs:.1} s");
    Ok(format!("200 functions; max truncation/sup {worst:.2e}; {secs:.2} s"))
}

fn c4(cfg: &RenormConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let res = cfg.space().resolution();
    let mut worst = f64::INFINITY;
    let mut checks = 0;
    for k in 0..50 {
        let x = random_tents(cfg.space(), &mut rng, 4, (0.3, 2.0)).eval(cfg.space());
        let v = triple_norm(&x, cfg);
        let lip = lipschitz(cfg.space(), &x);
        for g in &cfg.group().generators {
            let vg = triple_norm(&g.apply(&x), cfg);
            let bound = 2.0 * lip * 2.0 * res + 2.0 * v.truncation_bound.max(vg.truncation_bound);
            let diff = (vg.value - v.value).abs();
            ensure!(diff <= bound, "function {k}, {}: {diff} > {bound}", g.label());
            worst = worst.min(bound - diff);
            checks += 1;
        }
    }
    Ok(format!("{checks} generator checks; min slack {worst:.2e}"))
}

fn c5(cfg: &RenormConfig) -> Outcome {
    let grid = [0.8, 0.85, 0.9, 0.95, 1.0];
    let pool: Vec<TupleIndex> = cfg.tuples().into_iter().filter(|t| t.n() <= 2).collect();
    let step = (pool.len() / 20).max(1);
    let picked: Vec<&TupleIndex> = pool.iter().step_by(step).take(20).collect();
    ensure!(picked.len() == 20, "only {} tuples", picked.len());
    let eps = 1e-3;
    let (mut worst_gap, mut rows) = (0.0f64, 0);
    for t in picked {
        let len = t.gammas.len();
        let mut betas = vec![vec![]];
        for _ in 0..len {
            betas = betas.into_iter().flat_map(|b: Vec<f64>| grid.iter().map(move |&g| [b.clone(), vec![g]].concat())).collect();
        }
        let o = atoms_oracle(t, &betas, &grid, eps, 0.25, cfg).map_err(|e| format!("{t}: {e}"))?;
        ensure!(o.worst_row_ratio <= 1.0 + eps, "{t}: witness norm exceeds max_k z_k*(u) + eps");
        for r in &o.rows {
            ensure!(r.lower <= r.analytic * (1.0 + 1e-12), "{t}, beta {:?}: lower {} > {}", r.beta, r.lower, r.analytic);
            let gap = 1.0 - r.lower / r.analytic;
            ensure!(gap <= 0.05, "{t}, beta {:?}: gap {gap}", r.beta);
            worst_gap = worst_gap.max(gap);
            rows += 1;
        }
    }
    Ok(format!("20 tuples, {rows} beta vectors; max relative gap {worst_gap:.2e}"))
}

fn c6() -> Outcome {
    let s = builtin_space(&BuiltinSpace::Remark25 { n_max: 50 }).unwrap();
    let seq = gallery::remark25_family(&s, 51);
    let id = WeightedComposition::identity(&s);
    let compacts = s.exhaustion_sets();
    let v = check_sot_convergence(&s, &seq, &id, &compacts, &SotOptions::default()).map_err(|e| e.to_string())?;
    ensure!(v.map_uniform.pass, "condition (1) fails");
    ensure!(v.compacts.iter().all(|c| c.map_uniform), "condition (1) fails on some compact");
    ensure!(!v.inverse_close.pass, "condition (3) holds");
    let w = v.inverse_close.witness.as_ref().ok_or("no condition (3) witness")?;
    let x = gallery::remark25_witness(&s);
    for (n, g) in seq.iter().enumerate().take(50) {
        let gap = g.apply(&x).iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure!(gap == 1.0, "|x o phi_{} - x| = {gap}", n + 1);
    }
    Ok(format!(
        "{} compacts; condition (3) witness n = {} at {}; |x o phi_n - x| = 1 for n <= 50",
        compacts.len(),
        w.n,
        s.label(w.point)
    ))
}

fn c7() -> Outcome {
    let s = builtin_space(&BuiltinSpace::OnePoint01N { n_max: 50 }).unwrap();
    let g = gallery::onepoint_group(&s, 50, 2);
    let b = m_weight(&s, &g, &BoundedSettings::default()).map_err(|e| e.to_string())?;
    let inf = s.find_label("inf").ok_or("no point at infinity")?;
    ensure!(b.m[inf] == 1.0, "m(inf) = {}", b.m[inf]);
    for n in 1..=50 {
        let p1 = onepoint_point(&s, 1, Some(n)).unwrap();
        let p0 = onepoint_point(&s, 0, Some(n)).unwrap();
        ensure!(b.m[p1] == 0.5 && b.m[p0] == 1.0, "m at level {n}: {} / {}", b.m[p0], b.m[p1]);
    }
    ensure!(b.continuity.flagged.len() == 1 && b.continuity.flagged[0].point == inf, "flags {:?}", b.continuity.flagged);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let funcs: Vec<Vec<f64>> = (0..50).map(|_| (0..s.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut worst = 0.0f64;
    for n in 1..=50 {
        let c = conjugate(&gallery::onepoint_swap(&s, n), &b);
        for x in &funcs {
            worst = worst.max((sup(&c.op.apply(x)) - sup(x)).abs());
        }
    }
    ensure!(worst <= 1e-12, "conjugate isometry defect {worst}");
    for x in &funcs {
        let v = group_norm(x, &b);
        ensure!(v.value == v.direct, "group norm formulas {} vs {}", v.value, v.direct);
    }
    let mut bump = vec![0.0; s.len()];
    bump[onepoint_point(&s, 1, Some(7)).unwrap()] = 1.0;
    let v = group_norm(&bump, &b);
    ensure!(v.value == 2.0 && v.direct == 2.0, "bump norm {} / {}", v.value, v.direct);
    Ok(format!("{} words; inf flagged; isometry defect {worst:.1e}; formulas agree on 50 functions", b.words))
}

fn c8(cyl: &RenormConfig) -> Outcome {
    let cfg = line_cfg();
    let id = WeightedComposition::identity(cfg.space());
    let v = certify(&id, &cfg, 6).map_err(|e| e.to_string())?;
    ensure!(v.verdict == Verdict::CertifiedInG, "identity: {:?}", v.verdict);
    let t = gallery::translation(cfg.space(), 0.3);
    let v1 = certify(&t, &cfg, 6).map_err(|e| e.to_string())?;
    let v2 = certify(&t, &cfg, 6).map_err(|e| e.to_string())?;
    ensure!(v1.verdict == Verdict::Rejected && v1 == v2, "translation: {:?}", v1.verdict);
    let w = v1.witness.as_ref().ok_or("no witness")?;
    ensure!(matches!(w, RejectionWitness::Fingerprint { .. }), "witness {w:?}");
    ensure!(recheck(w, &t, &cfg).map_err(|e| e.to_string())?, "witness does not recheck");

    let mut words = 0;
    for el in cyl.expanded().elements.iter().filter(|e| e.word.len() <= 4) {
        let v = certify(&el.op, cyl, 4).map_err(|e| e.to_string())?;
        ensure!(v.verdict == Verdict::CertifiedInG, "{}: {:?}", el.op.label(), v.verdict);
        words += 1;
    }
    let r = &cyl.group().generators[0];
    let rf = compose(r, &gallery::interval_flip(cyl.space())).map_err(|e| e.to_string())?;
    let v = certify(&rf, cyl, 4).map_err(|e| e.to_string())?;
    ensure!(v.verdict == Verdict::Rejected, "rotation o flip: {:?}", v.verdict);
    ensure!(recheck(v.witness.as_ref().unwrap(), &rf, cyl).map_err(|e| e.to_string())?, "flip witness does not recheck");
    Ok(format!("identity certified; translation rejected; {words} words certified; rotation o flip rejected"))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let secs = start.elapsed().as_secs_f64();
    match r {
        Ok(msg) => {
            println!("{name} PASS ({secs:.2} s) {msg}");
            true
        }
        Err(msg) => {
            println!("{name} FAIL ({secs:.2} s) {msg}");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    ok &= run("criterion 1 weight maps", c1);
    ok &= run("criterion 2 triangular systems", c2);
    let line = line_cfg();
    ok &= run("criterion 3 norm sandwich", || c3(&line));
    let cyl = cylinder_cfg();
    ok &= run("criterion 4 G-invariance", || c4(&cyl));
    ok &= run("criterion 5 dual oracle", || c5(&cyl));
    ok &= run("criterion 6 SOT counterexample", c6);
    ok &= run("criterion 7 bounded group", c7);
    ok &= run("criterion 8 detector", || c8(&cyl));
    if !ok {
        std::process::exit(1);
    }
}
