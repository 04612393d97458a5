//! Canonical example maps shipped with the crate.
//!
//! The same data lives as JSON under `fixtures/` for the CLI.

use crate::pm::PmFunction;

fn build(xs: &[f64], ys: &[f64]) -> PmFunction {
    PmFunction::new((0.0, 1.0), xs.to_vec(), ys.to_vec()).expect("fixture is valid")
}

/// First-lap characteristic interval, increasing root available.
pub fn f1() -> PmFunction {
    build(&[0.0, 0.5, 0.6, 0.7, 0.8, 1.0], &[0.10, 0.30, 0.05, 0.40, 0.00, 0.45])
}

/// Middle-lap characteristic interval `[0.4, 0.6]`; admits both root classes.
pub fn f2() -> PmFunction {
    build(
        &[0.0, 0.15, 0.3, 0.4, 0.6, 0.7, 0.85, 1.0],
        &[0.50, 0.40, 0.58, 0.45, 0.55, 0.42, 0.60, 0.50],
    )
}

/// First-lap characteristic interval, decreasing root available.
pub fn f3() -> PmFunction {
    build(&[0.0, 0.5, 0.7, 1.0], &[0.10, 0.40, 0.00, 0.30])
}

/// Middle-lap map whose left region needs four pockets.
///
/// The third pocket reaches above `F(c_{k-1})`, so it can only be covered by
/// the `f_{k-1}` branch; the second and fourth pockets span exactly
/// `[F(c_{k+2}), F(c_{k-1})]`.
pub fn f4() -> PmFunction {
    build(
        &[0.0, 0.07, 0.14, 0.21, 0.28, 0.33, 0.38, 0.4, 0.6, 0.7, 1.0],
        &[0.58, 0.42, 0.59, 0.42, 0.58, 0.41, 0.58, 0.45, 0.55, 0.42, 0.60],
    )
}

pub fn tent() -> PmFunction {
    build(&[0.0, 0.5, 1.0], &[0.0, 1.0, 0.0])
}

/// `x ↦ (x + 1) / 2`.
pub fn lin() -> PmFunction {
    build(&[0.0, 1.0], &[0.5, 1.0])
}

pub fn identity() -> PmFunction {
    PmFunction::identity(0.0, 1.0)
}

/// Looks up a fixture by its short name.
pub fn by_name(name: &str) -> Option<PmFunction> {
    Some(match name.to_ascii_lowercase().as_str() {
        "f1" => f1(),
        "f2" => f2(),
        "f3" => f3(),
        "f4" => f4(),
        "tent" => tent(),
        "lin" => lin(),
        "identity" => identity(),
        _ => return None,
    })
}
