//! Numerical checks of a claimed square root, using only pointwise
//! evaluation and PL composition.

use serde::Serialize;

use crate::engine::Evaluable;
use crate::error::{Error, Result};
use crate::pm::{characteristic_interval, compose_with_budget, range_in_own_lap, HeightValue, PmFunction};

pub const DEFAULT_GRID: usize = 5001;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Samples used to replace the root by a PL map for fort counting.
pub const DEFAULT_RESAMPLE: usize = 10_000;
/// Iterates examined when counting forts of the resampled root.
const ROOT_HEIGHT_CAP: usize = 6;
const ROOT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub grid: usize,
    pub tol: f64,
    pub resample: usize,
    /// Height the root is expected to have; `None` skips that check.
    pub claimed_height: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { grid: DEFAULT_GRID, tol: DEFAULT_TOL, resample: DEFAULT_RESAMPLE, claimed_height: Some(2) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JunctionGap {
    pub fort: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub sup_residual: f64,
    /// Where the largest residual occurs.
    pub sup_residual_at: f64,
    pub residual_grid_size: usize,
    pub junction_gaps: Vec<JunctionGap>,
    /// One entry per lap of `F`.
    pub lap_monotonicity_ok: Vec<bool>,
    pub root_forts: usize,
    /// `N(f^0), N(f^1), ...` of the resampled root.
    pub root_fort_counts: Vec<usize>,
    pub root_height: HeightValue,
    /// `f(I) ⊆ K` and `f²(I) ⊆ K`, with `K` the characteristic interval of `F`.
    pub k_inclusion: [bool; 2],
    /// Smallest `m` with `f^m(I)` inside one lap of `f^m`, on the resampled root.
    pub inclusion_height: Option<usize>,
    pub passed: bool,
}

fn eval(g: &dyn Evaluable, x: f64) -> Result<f64> {
    g.eval_at(x).map_err(|e| match e {
        e @ Error::EvaluationFailure { .. } => e,
        e => Error::EvaluationFailure { x, reason: e.to_string() },
    })
}

/// Uniform grid on the domain merged with the breakpoints, sorted and deduplicated.
fn grid_with_breakpoints(g: &dyn Evaluable, points: usize, extra: &[f64]) -> Vec<f64> {
    let (a, b) = g.domain();
    let mut xs: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { b } else { a + (b - a) * i as f64 / (points - 1) as f64 })
        .chain(g.breakpoints())
        .chain(extra.iter().copied())
        .filter(|x| (a..=b).contains(x))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Gaps between the one-sided values of `g` at its piece boundaries.
pub trait JunctionProbe {
    fn junction_gaps(&self) -> Result<Vec<(f64, f64)>>;
}

impl JunctionProbe for crate::engine::RootFunction {
    fn junction_gaps(&self) -> Result<Vec<(f64, f64)>> {
        crate::engine::RootFunction::junction_gaps(self)
    }
}

impl JunctionProbe for PmFunction {
    fn junction_gaps(&self) -> Result<Vec<(f64, f64)>> {
        Ok(Vec::new())
    }
}

/// Verifies that `g ∘ g = F` on `F`'s domain.
pub fn verify_root<G: Evaluable + JunctionProbe>(f: &PmFunction, g: &G, opts: &VerifyOptions) -> Result<VerificationReport> {
    let xs = grid_with_breakpoints(g, opts.grid, f.xs());
    let mut gx = Vec::with_capacity(xs.len());
    let (mut sup, mut sup_at) = (0.0f64, xs[0]);
    for &x in &xs {
        let y = eval(g, x)?;
        let r = (eval(g, y)? - f.value_at(x)).abs();
        if r > sup || r.is_nan() {
            sup = r;
            sup_at = x;
        }
        gx.push(y);
    }

    let junction_gaps: Vec<JunctionGap> = g.junction_gaps()?.into_iter().map(|(fort, gap)| JunctionGap { fort, gap }).collect();

    let lap_monotonicity_ok = (0..f.lap_count())
        .map(|lap| {
            let (c0, c1) = f.lap(lap);
            let vals: Vec<f64> = xs.iter().zip(&gx).filter(|(x, _)| (c0..=c1).contains(*x)).map(|(_, y)| *y).collect();
            let up = vals.windows(2).all(|w| w[1] >= w[0]);
            let down = vals.windows(2).all(|w| w[1] <= w[0]);
            (up || down) && vals.first() != vals.last()
        })
        .collect::<Vec<_>>();

    let k = characteristic_interval(f)?.bounds;
    let inside = |y: f64| y >= k[0] - opts.tol && y <= k[1] + opts.tol;
    let mut k_inclusion = [gx.iter().all(|&y| inside(y)), true];
    for &y in &gx {
        if !inside(eval(g, y)?) {
            k_inclusion[1] = false;
            break;
        }
    }

    let pl = resample(g, opts.resample)?;
    let (root_fort_counts, root_height, inclusion_height) = height_of_resampled(&pl, opts.tol)?;

    let height_ok = match opts.claimed_height {
        Some(h) => root_height == HeightValue::Finite(h) && inclusion_height == Some(h),
        None => true,
    };
    let passed = sup <= opts.tol
        && junction_gaps.iter().all(|j| j.gap <= opts.tol)
        && lap_monotonicity_ok.iter().all(|&ok| ok)
        && height_ok;

    Ok(VerificationReport {
        sup_residual: sup,
        sup_residual_at: sup_at,
        residual_grid_size: xs.len(),
        junction_gaps,
        lap_monotonicity_ok,
        root_forts: pl.fort_count(),
        root_fort_counts,
        root_height,
        k_inclusion,
        inclusion_height,
        passed,
    })
}

/// PL map through `points` uniform samples of `g` and its breakpoints.
/// Consecutive equal values are merged so the result has no flat pieces.
pub fn resample(g: &dyn Evaluable, points: usize) -> Result<PmFunction> {
    let xs = grid_with_breakpoints(g, points, &[]);
    let (a, b) = g.domain();
    let mut px: Vec<f64> = Vec::with_capacity(xs.len());
    let mut py: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        let y = eval(g, x)?.clamp(a, b);
        if py.last() == Some(&y) {
            if x == b {
                *px.last_mut().unwrap() = b;
            }
            continue;
        }
        px.push(x);
        py.push(y);
    }
    if px.len() < 2 {
        return Err(Error::EvaluationFailure { x: a, reason: "resampled map is constant".into() });
    }
    *px.last_mut().unwrap() = b;
    PmFunction::new((a, b), px, py)
}

/// Fort counts of iterates until they stabilize, and the range-inclusion height.
fn height_of_resampled(pl: &PmFunction, tol: f64) -> Result<(Vec<usize>, HeightValue, Option<usize>)> {
    let mut counts = vec![0, pl.fort_count()];
    let mut current = pl.clone();
    let mut inclusion = None;
    for m in 1..=ROOT_HEIGHT_CAP {
        if inclusion.is_none() && range_in_own_lap(&current, tol) {
            inclusion = Some(m);
        }
        if counts[m] == counts[m - 1] {
            let inclusion = if counts[1] == 0 { Some(0) } else { inclusion };
            return Ok((counts, HeightValue::Finite(m - 1), inclusion));
        }
        current = match compose_with_budget(pl, &current, ROOT_BUDGET) {
            Ok(next) => next,
            Err(Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        };
        counts.push(current.fort_count());
    }
    let last = counts.len() - 1;
    if counts[last] == counts[last - 1] {
        return Ok((counts, HeightValue::Finite(last - 1), inclusion));
    }
    Ok((counts, HeightValue::Infinite { cap: ROOT_HEIGHT_CAP }, inclusion))
}

/// Formats with 17 significant digits in positional notation, trailing zeros trimmed.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = exp + 1;
    let mut out = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    if out.contains('.') {
        out = out.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if negative {
        out.insert(0, '-');
    }
    out
}

/// `(x, g(x))` on a uniform grid merged with the breakpoints of `g`.
pub fn sample(g: &dyn Evaluable, points: usize) -> Result<Vec<(f64, f64)>> {
    if points < 2 {
        return Err(Error::PreconditionFailed(format!("at least 2 sample points required, got {points}")));
    }
    grid_with_breakpoints(g, points, &[]).into_iter().map(|x| Ok((x, eval(g, x)?))).collect()
}

/// CSV with header `x,y`.
pub fn sample_csv(g: &dyn Evaluable, points: usize) -> Result<String> {
    let mut out = String::from("x,y\n");
    for (x, y) in sample(g, points)? {
        out.push_str(&format_sig17(x));
        out.push(',');
        out.push_str(&format_sig17(y));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::Theorem;
    use crate::engine::{construct, ConstructOptions};
    use crate::fixtures;

    #[test]
    fn constructed_roots_pass() {
        for (f, t) in [
            (fixtures::f1(), Theorem::T21),
            (fixtures::f2(), Theorem::T22),
            (fixtures::f3(), Theorem::T23),
            (fixtures::f2(), Theorem::T24),
        ] {
            let root = construct(&f, t, &ConstructOptions::default()).unwrap();
            let r = verify_root(&f, &root, &VerifyOptions::default()).unwrap();
            assert!(r.passed, "{t}: {r:?}");
            assert_eq!(r.root_height, HeightValue::Finite(2));
            assert_eq!(r.k_inclusion, [false, true]);
        }
    }

    #[test]
    fn identity_is_not_a_root() {
        let f1 = fixtures::f1();
        let id = fixtures::identity();
        let r = verify_root(&f1, &id, &VerifyOptions::default()).unwrap();
        assert!(!r.passed);
        assert!((r.sup_residual - 0.8).abs() < 1e-15);
        assert_eq!(r.sup_residual_at, 0.8);
    }

    #[test]
    fn csv_rows() {
        let csv = sample_csv(&fixtures::f1(), 3).unwrap();
        assert_eq!(csv, "x,y\n0,0.10000000000000001\n0.5,0.29999999999999999\n0.59999999999999998,0.050000000000000003\n0.69999999999999996,0.40000000000000002\n0.80000000000000004,0\n1,0.45000000000000001\n");
        assert_eq!(sample_csv(&fixtures::identity(), 2).unwrap(), "x,y\n0,0\n1,1\n");
    }

    #[test]
    fn sig17() {
        assert_eq!(format_sig17(1.0), "1");
        assert_eq!(format_sig17(-0.25), "-0.25");
        assert_eq!(format_sig17(1234.5), "1234.5");
        assert_eq!(format_sig17(1e-5), "0.000010000000000000001");
    }
}
