//! End-to-end acceptance checks. Runs without the libtest harness so that
//! each criterion's PASS/FAIL line is always printed.

use std::process::Command;
use std::time::{Duration, Instant};

use pmroot::conditions::{lookup_existence, Theorem, Verdict};
use pmroot::engine::{construct, construct_auto, ConstructOptions, Evaluable, RootClass, RootFunction};
use pmroot::fixtures;
use pmroot::kernel::{dec_root_on_k, inc_root_segment, KernelRoot, OrbitSettings, Orientation};
use pmroot::monotone::MonotoneSegment;
use pmroot::pm::{height, iterate_with_budget, HeightValue, PmFunction, DEFAULT_BREAKPOINT_BUDGET};
use pmroot::recipe::RootRecipe;
use pmroot::verify::{verify_root, JunctionProbe, VerifyOptions};
use pmroot::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn build(f: &PmFunction, t: Theorem) -> Result<RootFunction, String> {
    construct(f, t, &ConstructOptions::default()).map_err(|e| format!("{t}: {e}"))
}

fn verified(f: &PmFunction, root: &RootFunction) -> Result<f64, String> {
    let r = verify_root(f, root, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.passed, format!("verification failed: {r:?}"))?;
    ensure(r.residual_grid_size >= 5001, "grid smaller than 5001 points")?;
    ensure(r.sup_residual <= 1e-8, format!("supResidual {}", r.sup_residual))?;
    ensure(r.root_height == HeightValue::Finite(2), format!("rootHeight {}", r.root_height))?;
    ensure(r.inclusion_height == Some(2), format!("inclusion height {:?}", r.inclusion_height))?;
    Ok(r.sup_residual)
}

fn monotone_on(root: &RootFunction, a: f64, b: f64, increasing: bool) -> Result<(), String> {
    let ys: Vec<f64> = grid(a, b, 2001).map(|x| root.eval(x).unwrap()).collect();
    let ok = ys.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
    ensure(ok, format!("f not strictly {} on [{a}, {b}]", if increasing { "increasing" } else { "decreasing" }))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f = fixtures::f1();
    let root = build(&f, Theorem::T21)?;
    let sup = verified(&f, &root)?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("supResidual {sup:.2e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let f = fixtures::f2();
    let root = build(&f, Theorem::T22)?;
    let sup = verified(&f, &root)?;
    monotone_on(&root, 0.4, 0.6, true)?;
    Ok(format!("supResidual {sup:.2e}, H(f) = 2 by fort counts and by range inclusion"))
}

fn criterion_3() -> Outcome {
    let f = fixtures::f3();
    let root = build(&f, Theorem::T23)?;
    let sup = verified(&f, &root)?;
    monotone_on(&root, 0.0, 0.5, false)?;
    let (f0, f5) = (root.eval(0.0).unwrap(), root.eval(0.5).unwrap());
    ensure((f0 - 0.40).abs() <= 1e-12 && f5.abs() <= 1e-12, format!("f(0) = {f0}, f(0.5) = {f5}"))?;
    Ok(format!("supResidual {sup:.2e}, f(0) = {f0}, f(0.5) = {f5}"))
}

fn criterion_4() -> Outcome {
    let f = fixtures::f2();
    let root = build(&f, Theorem::T24)?;
    let sup = verified(&f, &root)?;
    let (a, b) = (root.eval(0.4).unwrap(), root.eval(0.6).unwrap());
    ensure((a - 0.58).abs() <= 1e-12 && (b - 0.42).abs() <= 1e-12, format!("f(0.4) = {a}, f(0.6) = {b}"))?;
    Ok(format!("supResidual {sup:.2e}, f(0.4) = {a}, f(0.6) = {b}"))
}

fn criterion_5() -> Outcome {
    let lin = MonotoneSegment::from_lap(&fixtures::lin(), 0);
    let phi = inc_root_segment(&lin, 1.0 / 3.0, OrbitSettings::default()).map_err(|e| e.to_string())?;
    let phi = KernelRoot::Increasing(phi);
    let lin_sup = grid(0.0, 1.0, 1001)
        .map(|x| (phi.eval(phi.eval(x).unwrap()).unwrap() - lin.eval(x)).abs())
        .fold(0.0, f64::max);
    ensure(lin_sup <= 1e-10, format!("LIN residual {lin_sup}"))?;

    let seg = MonotoneSegment::from_lap(&fixtures::f3(), 0);
    let d = dec_root_on_k(&seg, 0.40, 0.0, OrbitSettings::default()).map_err(|e| e.to_string())?;
    let xi = d.anchors().xi;
    let conj = grid(0.0, xi, 1001)
        .map(|x| (d.conjugator(seg.eval(x)).unwrap() - seg.eval(d.conjugator(x).unwrap())).abs())
        .fold(0.0, f64::max);
    ensure(conj <= 1e-10, format!("conjugation defect {conj}"))?;
    Ok(format!("LIN residual {lin_sup:.2e}, conjugation defect {conj:.2e}"))
}

fn criterion_6() -> Outcome {
    let tent = fixtures::tent();
    for n in 1..=5 {
        let count = iterate_with_budget(&tent, n, DEFAULT_BREAKPOINT_BUDGET).map_err(|e| e.to_string())?.fort_count();
        ensure(count == (1 << n) - 1, format!("N(TENT^{n}) = {count}"))?;
    }
    for (name, f) in [("F1", fixtures::f1()), ("F2", fixtures::f2()), ("F3", fixtures::f3())] {
        let h = height(&f, 32).map_err(|e| e.to_string())?.value;
        ensure(h == HeightValue::Finite(1), format!("H({name}) = {h}"))?;
    }
    let h = height(&fixtures::identity(), 32).map_err(|e| e.to_string())?.value;
    ensure(h == HeightValue::Finite(0), format!("H(identity) = {h}"))?;
    Ok("N(TENT^n) = 1, 3, 7, 15, 31; H = 1, 1, 1, 0".into())
}

/// Continuous PL self-map of [0, 1] with 2..=8 breakpoints and no flat pieces.
fn random_map(rng: &mut ChaCha8Rng) -> PmFunction {
    loop {
        let n = rng.gen_range(2..=8);
        let mut xs: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(0.01..0.99)).collect();
        xs.push(0.0);
        xs.push(1.0);
        xs.sort_by(f64::total_cmp);
        let ys: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        if let Ok(f) = PmFunction::new((0.0, 1.0), xs, ys) {
            return f;
        }
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut violations = Vec::new();
    let mut skipped = 0;
    for case in 0..200 {
        let f = random_map(&mut rng);
        let mut counts = vec![f.fort_count()];
        let mut g = f.clone();
        for _ in 0..5 {
            match pmroot::pm::compose_with_budget(&f, &g, DEFAULT_BREAKPOINT_BUDGET) {
                Ok(next) => g = next,
                Err(Error::BudgetExceeded { .. }) => {
                    skipped += 1;
                    break;
                }
                Err(e) => return Err(e.to_string()),
            }
            counts.push(g.fort_count());
        }
        if counts.windows(2).any(|w| w[0] > w[1]) {
            violations.push((case, counts));
        }
    }
    let elapsed = start.elapsed();
    ensure(violations.is_empty(), format!("violations: {violations:?}"))?;
    ensure(skipped == 0, format!("{skipped} maps exceeded the breakpoint budget"))?;
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("200 maps, zero violations, {elapsed:.2?}"))
}

fn criterion_8() -> Outcome {
    use Orientation::{Decreasing as Dn, Increasing as Up};
    use Verdict::*;
    // (n, N(F), class, H(f)) -> expected, one query per row
    let rows = [
        (2, 5, Up, 1, Nonexistence),
        (2, 5, Dn, 1, Existence),
        (3, 5, Up, 2, Nonexistence),
        (4, 6, Dn, 2, Nonexistence),
        (3, 3, Up, 3, Nonexistence),
        (4, 4, Dn, 2, Nonexistence),
        (3, 3, Dn, 3, Existence),
        (4, 3, Up, 4, Nonexistence),
        (5, 4, Dn, 3, Nonexistence),
    ];
    for (n, forts, class, h, want) in rows {
        let got = lookup_existence(n, forts, class, h).map_err(|e| e.to_string())?;
        ensure(got.verdict == want && got.row.is_some(), format!("({n}, {forts}, {class:?}, {h}) -> {:?}", got.verdict))?;
    }
    let off_table = [(3, 5, Up, 3), (4, 6, Dn, 3), (3, 3, Dn, 2), (10, 3, Up, 1), (2, 5, Up, 2), (4, 3, Dn, 3)];
    for (n, forts, class, h) in off_table {
        let got = lookup_existence(n, forts, class, h).map_err(|e| e.to_string())?;
        ensure(got.verdict == Unknown && got.row.is_none(), format!("({n}, {forts}, {class:?}, {h}) -> {:?}", got.verdict))?;
    }
    Ok("9 rows matched, 6 off-table queries Unknown".into())
}

/// `φ ∘ g ∘ φ` for the reflection `φ(x) = a + b - x`.
struct Reflected<'a>(&'a RootFunction);

impl Reflected<'_> {
    fn phi(&self, x: f64) -> f64 {
        let (a, b) = self.0.domain();
        a + b - x
    }
}

impl Evaluable for Reflected<'_> {
    fn domain(&self) -> (f64, f64) {
        self.0.domain()
    }

    fn eval_at(&self, x: f64) -> pmroot::Result<f64> {
        Ok(self.phi(self.0.eval(self.phi(x))?))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints().into_iter().map(|x| self.phi(x)).collect()
    }
}

impl JunctionProbe for Reflected<'_> {
    fn junction_gaps(&self) -> pmroot::Result<Vec<(f64, f64)>> {
        Ok(self.0.junction_gaps()?.into_iter().map(|(x, gap)| (self.phi(x), gap)).collect())
    }
}

fn criterion_9() -> Outcome {
    let f1 = fixtures::f1();
    let g = f1.mirror_conjugate();
    let root = construct_auto(&g, RootClass::Any, &ConstructOptions::default()).map_err(|e| e.to_string())?;
    ensure(root.mirrored(), "construction did not go through the mirror image")?;
    let direct = verify_root(&g, &root, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(direct.passed, format!("root of the mirrored map failed: {direct:?}"))?;
    let back = g.mirror_conjugate();
    let r = verify_root(&back, &Reflected(&root), &VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.passed && r.sup_residual <= 1e-8, format!("un-mirrored root failed: {r:?}"))?;
    Ok(format!("{} via reflection, supResidual {:.2e}", root.source_theorem(), r.sup_residual))
}

fn criterion_10() -> Outcome {
    match construct_auto(&fixtures::tent(), RootClass::Any, &ConstructOptions::default()) {
        Err(Error::NoApplicableTheorem { .. }) => {}
        other => return Err(format!("TENT: {other:?}")),
    }
    match construct(&fixtures::f1(), Theorem::T23, &ConstructOptions::default()) {
        Err(Error::ConditionsNotMet { .. }) => {}
        other => return Err(format!("F1 as T23: {:?}", other.map(|r| r.source_theorem()))),
    }
    let f1 = fixtures::f1();
    let root = build(&f1, Theorem::T21)?;
    let mut recipe = serde_json::to_value(RootRecipe::from_root(&f1, &root)).unwrap();
    let anchor = &mut recipe["kernel"]["pieces"][0]["anchor"];
    *anchor = serde_json::json!(anchor.as_f64().unwrap() + 1e-3);

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let map_path = dir.path().join("f1.json");
    let recipe_path = dir.path().join("tampered.json");
    std::fs::write(&map_path, serde_json::to_string(&f1.to_input()).unwrap()).unwrap();
    std::fs::write(&recipe_path, recipe.to_string()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pmroot"))
        .arg("verify")
        .arg(&map_path)
        .arg("--root")
        .arg(&recipe_path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1), format!("tampered recipe exit {:?}", out.status.code()))?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let sup = report["supResidual"].as_f64().unwrap_or(0.0);
    ensure(sup > 1e-8, format!("tampered supResidual {sup}"))?;
    Ok(format!("TENT rejected, F1/T23 rejected, tampered recipe exit 1 with supResidual {sup:.2e}"))
}

fn criterion_11() -> Outcome {
    use pmroot::conditions::{match_t22, PatternMode};
    let f = fixtures::f4();
    match match_t22(&f, PatternMode::Literal) {
        Err(Error::NoPattern { .. }) => {}
        Ok(r) if !r.matched() => {}
        other => return Err(format!("literal reading accepted F4: {other:?}")),
    }
    let r = match_t22(&f, PatternMode::Strict).map_err(|e| e.to_string())?;
    ensure(r.matched(), "strict reading rejected F4")?;
    let s = r.pattern.as_ref().and_then(|p| p.s);
    ensure(s == Some(3), format!("expected four left pockets, s = {s:?}"))?;
    let root = build(&f, Theorem::T22)?;
    let sup = verified(&f, &root)?;
    Ok(format!("F4: literal rejects, strict accepts with s = 3, supResidual {sup:.2e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("root identity, increasing, first lap (F1)", criterion_1),
        ("root identity, increasing, middle lap (F2)", criterion_2),
        ("root identity, decreasing, first lap (F3)", criterion_3),
        ("root identity, decreasing, middle lap (F2)", criterion_4),
        ("kernel oracles (LIN, F3 conjugation)", criterion_5),
        ("height engine", criterion_6),
        ("fort counts nondecreasing under iteration", criterion_7),
        ("existence table", criterion_8),
        ("mirror reduction", criterion_9),
        ("negative controls", criterion_10),
        ("corrected pocket reading", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
